"""Constructive classification of quasi-sum functions and theorem checks.

A quasi-sum F(h_1(x_1)+...+h_n(x_n)) with constant pairwise elasticity sigma
falls into one of three structural cases, decided here from the closed-form
inner functions rather than by curve fitting:

* every inner is a power c_i x^((sigma-1)/sigma) up to shift  -> HomotheticACMS
* every inner is a log (sigma = 1)                            -> HomotheticCobbDouglas
* two inputs with opposite log inners (degenerate elasticity) -> RatioTwoInput

Anything else is NotCES.  The verdict is gated twice: the sampled elasticity
must actually be constant (or degenerate), and the matched structure must
reproduce the inner derivatives and the cross-multiplied elasticity identity
within the configured residual tolerances.

The theorem checkers compare two independently computed sides of a
biconditional on a sampled box: a curvature side (scaled Gauss-Kronecker
curvature for the determinant theorem, normalized Riemann components for the
flatness theorem) and a structure side (membership in the linearly
homogeneous families).  Each check reports both one-sided implications and a
full per-point residual table; a verdict is never adjusted to match the
expected outcome, so a genuine disagreement between the two sides surfaces
as Inconsistent together with the data needed to inspect it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .elasticity import (
    DEGENERATE_CES, NOT_CES, REGULAR_CES,
    ElasticityReport, ces_residual, detect_ces,
)
from .errors import DomainError, HypothesisError, SpecError
from .families import (
    FORM_AFFINE, FORM_EXP, FORM_LOG, FORM_POWER,
    FunctionExpr, QuasiSumSpec, ScalarFn,
    as_quasi_sum, build_quasi_sum, default_box, homogeneity_degree,
    normalize_outer_shift, validate_box,
)
from .geometry import graph_geometry
from .sampling import box_center, log_uniform
from . import tolerances

HOMOTHETIC_ACMS = "HomotheticACMS"
HOMOTHETIC_COBB_DOUGLAS = "HomotheticCobbDouglas"
RATIO_TWO_INPUT = "RatioTwoInput"

CONSISTENT = "Consistent"
INCONSISTENT = "Inconsistent"
DEGENERATE_HYPOTHESIS = "DegenerateHypothesis"

THEOREM_CLASSIFICATION = "T11"
THEOREM_GAUSS_KRONECKER = "T41"
THEOREM_FLATNESS = "T42"

# The degenerate two-input case satisfies the elasticity identity for every
# sigma, so its separation constant is only defined relative to a reference
# value; 2 is the convention used throughout.
SIGMA_REFERENCE_DEGENERATE = 2.0

__all__ = [
    "ClassificationResult", "TheoremReport", "classify_quasi_sum",
    "verify_theorem_11", "verify_theorem_41", "verify_theorem_42",
    "acms_outer_ode_residual", "cobb_douglas_outer_ode_residual",
    "HOMOTHETIC_ACMS", "HOMOTHETIC_COBB_DOUGLAS", "RATIO_TWO_INPUT",
    "NOT_CES", "CONSISTENT", "INCONSISTENT", "DEGENERATE_HYPOTHESIS",
    "SIGMA_REFERENCE_DEGENERATE",
]


@dataclass(frozen=True)
class ClassificationResult:
    """Structural case of a quasi-sum, with the fit that justified it."""

    case: str
    sigma: float | None
    fitted_inner_parameters: tuple | None
    separation_constant_k: float | None
    ces_residual: float
    structure_residual: float
    detection: ElasticityReport

    def as_dict(self) -> dict:
        fitted = self.fitted_inner_parameters
        return {
            "case": self.case,
            "sigma": self.sigma,
            "fitted_inner_parameters": None if fitted is None else list(fitted),
            "separation_constant_k": self.separation_constant_k,
            "residuals": {"ces": self.ces_residual,
                          "structure": self.structure_residual},
            "detection": self.detection.as_dict(),
        }


def _max_ces_residual(expr: FunctionExpr, points, sigma: float) -> float:
    worst = 0.0
    for x in points:
        for i in range(expr.n):
            for j in range(i + 1, expr.n):
                worst = max(worst, abs(ces_residual(expr, x, sigma, i, j)))
    return worst


def _structure_residual(spec: QuasiSumSpec, points, fitted_d1) -> float:
    """Largest relative gap between actual and fitted inner derivatives.

    ``fitted_d1(i, x)`` is the derivative the matched normal form predicts.
    """
    worst = 0.0
    for x in points:
        for i, h in enumerate(spec.inner):
            xi = float(x[i])
            _, d1, _ = h.derivatives(xi)
            worst = max(worst, abs(d1 / fitted_d1(i, xi) - 1.0))
    return worst


def _not_ces(detection: ElasticityReport,
             ces: float = math.inf,
             structure: float = math.inf) -> ClassificationResult:
    return ClassificationResult(NOT_CES, None, None, None, ces, structure,
                                detection)


def classify_quasi_sum(spec, box=None, samples: int = 64,
                       seed: int = 0) -> ClassificationResult:
    """Decide the structural case of a quasi-sum on ``box``.

    Accepts a QuasiSumSpec, or any FunctionExpr that has a quasi-sum form.
    The returned residuals are maxima over ``samples`` log-uniform points:
    ``ces`` for the cross-multiplied elasticity identity at the fitted sigma
    (at the reference sigma for the degenerate case), ``structure`` for the
    deviation of each inner derivative from the fitted normal form.
    """
    if isinstance(spec, FunctionExpr):
        spec = as_quasi_sum(spec)
    if not isinstance(spec, QuasiSumSpec):
        raise SpecError("classification needs a QuasiSumSpec")
    if box is None:
        box = default_box(spec.n)
    box = validate_box(box, spec.n)
    expr = build_quasi_sum(spec, box)
    detection = detect_ces(expr, box, samples=samples, seed=seed)
    points = log_uniform(box, samples, seed)

    if detection.verdict == REGULAR_CES:
        sigma_hat = detection.sigma_estimate
        if abs(sigma_hat - 1.0) <= tolerances.SIGMA_ONE_TIE_TOL:
            return _log_branch(spec, expr, points, detection)
        return _power_branch(spec, expr, points, detection, sigma_hat)
    if detection.verdict == DEGENERATE_CES:
        return _degenerate_branch(spec, expr, points, detection)
    return _not_ces(detection)


def _log_branch(spec, expr, points, detection) -> ClassificationResult:
    """sigma = 1: the inners must all be logarithms."""
    if not all(h.form == FORM_LOG for h in spec.inner):
        return _not_ces(detection)
    alphas = tuple(h.coefficient for h in spec.inner)
    structure = _structure_residual(spec, points, lambda i, x: alphas[i] / x)
    ces = _max_ces_residual(expr, points, 1.0)
    if (structure > tolerances.STRUCTURE_RESIDUAL_TOL
            or ces > tolerances.CES_RESIDUAL_TOL):
        return _not_ces(detection, ces, structure)
    return ClassificationResult(HOMOTHETIC_COBB_DOUGLAS, 1.0, alphas, None,
                                ces, structure, detection)


def _power_branch(spec, expr, points, detection,
                  sigma_hat: float) -> ClassificationResult:
    """sigma != 1: the inners must share the exponent (sigma-1)/sigma."""
    p_star = (sigma_hat - 1.0) / sigma_hat
    tol = tolerances.EXPONENT_MATCH_TOL * max(1.0, abs(p_star))
    for h in spec.inner:
        if h.form != FORM_POWER or abs(h.exponent - p_star) > tol:
            return _not_ces(detection)
    p = spec.inner[0].exponent
    if p == 1.0:
        return _not_ces(detection)
    sigma = 1.0 / (1.0 - p)
    coeffs = tuple(h.coefficient for h in spec.inner)
    structure = _structure_residual(
        spec, points, lambda i, x: coeffs[i] * p * x ** (p - 1.0))
    ces = _max_ces_residual(expr, points, sigma)
    if (structure > tolerances.STRUCTURE_RESIDUAL_TOL
            or ces > tolerances.CES_RESIDUAL_TOL):
        return _not_ces(detection, ces, structure)
    return ClassificationResult(HOMOTHETIC_ACMS, sigma, coeffs, None,
                                ces, structure, detection)


def _degenerate_branch(spec, expr, points, detection) -> ClassificationResult:
    """Everywhere-degenerate elasticity: two opposite log inners."""
    if spec.n != 2 or not all(h.form == FORM_LOG for h in spec.inner):
        return _not_ces(detection)
    b1, b2 = (h.coefficient for h in spec.inner)
    if abs(b1 + b2) > tolerances.DEGREE_ONE_TOL * max(abs(b1), abs(b2)):
        return _not_ces(detection)
    betas = (b1, b2)
    k = -(SIGMA_REFERENCE_DEGENERATE - 1.0) / b1
    structure = _structure_residual(spec, points, lambda i, x: betas[i] / x)
    ces = _max_ces_residual(expr, points, SIGMA_REFERENCE_DEGENERATE)
    if (structure > tolerances.STRUCTURE_RESIDUAL_TOL
            or ces > tolerances.CES_RESIDUAL_TOL):
        return _not_ces(detection, ces, structure)
    return ClassificationResult(RATIO_TWO_INPUT, None, betas, k,
                                ces, structure, detection)


# -- outer-function differential consistency ---------------------------------


def acms_outer_ode_residual(outer: ScalarFn, sigma: float, u: float) -> float:
    """Relative defect of F'(u) = (sigma-1) u F''(u) at one argument.

    Zero exactly for F(u) = c u^(sigma/(sigma-1)) + s, the outer functions
    that make a power quasi-sum homogeneous of degree one.
    """
    sigma = float(sigma)
    if not math.isfinite(sigma) or sigma in (0.0, 1.0):
        raise SpecError("sigma must be finite and neither 0 nor 1")
    _, d1, d2 = outer.derivatives(u)
    lhs = d1
    rhs = (sigma - 1.0) * u * d2
    scale = max(abs(lhs), abs(rhs))
    return 0.0 if scale == 0.0 else abs(lhs - rhs) / scale


def cobb_douglas_outer_ode_residual(outer: ScalarFn, alpha: float,
                                    u: float) -> float:
    """Relative defect of (alpha-1) F'(u) + alpha u F''(u) = 0.

    Here u is the product-form argument; zero exactly for
    F(u) = c u^(1/alpha) + s.
    """
    alpha = float(alpha)
    if not math.isfinite(alpha) or alpha == 0.0:
        raise SpecError("alpha must be finite and nonzero")
    _, d1, d2 = outer.derivatives(u)
    t1 = (alpha - 1.0) * d1
    t2 = alpha * u * d2
    scale = max(abs(t1), abs(t2))
    return 0.0 if scale == 0.0 else abs(t1 + t2) / scale


def _cobb_douglas_log_ode_residual(outer: ScalarFn, alpha: float,
                                   v: float) -> float:
    """The same condition with the argument in log coordinates.

    Substituting u = e^v turns (alpha-1)F' + alphauF'' = 0 into
    alpha P''(v) = P'(v) for P(v) = F(e^v); zero exactly for exp outers
    with alpha = 1.
    """
    _, d1, d2 = outer.derivatives(v)
    t1 = alpha * d2
    t2 = d1
    scale = max(abs(t1), abs(t2))
    return 0.0 if scale == 0.0 else abs(t1 - t2) / scale


# -- theorem verification -----------------------------------------------------


@dataclass(frozen=True)
class PointRow:
    """One sampled point of a verification table."""

    point: tuple
    gauss_kronecker: float
    gauss_kronecker_scaled: float
    flatness_residual: float

    def as_dict(self) -> dict:
        return {
            "point": list(self.point),
            "gauss_kronecker": self.gauss_kronecker,
            "gauss_kronecker_scaled": self.gauss_kronecker_scaled,
            "flatness_residual": self.flatness_residual,
        }


@dataclass(frozen=True)
class TheoremReport:
    """Both sides of a verified biconditional, with the per-point evidence.

    ``hypothesis_holds`` is None when the sampled residuals land between the
    vanishing and clearly-nonzero thresholds; the verdict is then
    DegenerateHypothesis rather than a guess.
    """

    theorem: str
    verdict: str
    hypothesis_holds: bool | None
    conclusion_holds: bool
    hypothesis_check: dict
    conclusion_check: dict
    per_point: tuple

    def as_dict(self) -> dict:
        if self.hypothesis_holds is None:
            forward = reverse = None
        else:
            forward = (not self.hypothesis_holds) or self.conclusion_holds
            reverse = (not self.conclusion_holds) or self.hypothesis_holds
        return {
            "theorem": self.theorem,
            "verdict": self.verdict,
            "hypothesis_holds": self.hypothesis_holds,
            "conclusion_holds": self.conclusion_holds,
            "forward_implication_ok": forward,
            "reverse_implication_ok": reverse,
            "hypothesis_check": self.hypothesis_check,
            "conclusion_check": self.conclusion_check,
            "per_point_data": [row.as_dict() for row in self.per_point],
        }


def _family_degree_one(expr: FunctionExpr, box, samples, seed):
    """Structure side of the curvature theorems.

    Returns (matches, family label, record, classification-or-None): whether
    ``expr`` is, up to an additive output constant, a linearly homogeneous
    member of the power-aggregator or log-aggregator family.  Parameter tests
    are exact (1e-12), never sampled.
    """
    if expr.family == "acms":
        gap = abs(expr.params["d"] - 1.0)
        return (gap <= tolerances.DEGREE_ONE_TOL, "acms",
                {"degree_gap": gap}, None)
    if expr.family == "cobb_douglas":
        gap = abs(math.fsum(expr.params["alpha"]) - 1.0)
        return (gap <= tolerances.DEGREE_ONE_TOL, "cobb_douglas",
                {"exponent_sum_gap": gap}, None)
    if expr.family == "ratio":
        return (False, None,
                {"note": "ratio family is homogeneous of degree zero"}, None)

    spec = expr.params["spec"]
    cls = classify_quasi_sum(spec, box, samples=samples, seed=seed)
    record: dict = {"classification_case": cls.case,
                    "outer_form": spec.outer.form}
    if cls.case == HOMOTHETIC_ACMS:
        p = spec.inner[0].exponent
        shift_sum = math.fsum(h.shift for h in spec.inner)
        shift_scale = max(1.0, max(abs(h.shift) for h in spec.inner))
        record["inner_shift_sum"] = shift_sum
        matches = (spec.outer.form == FORM_POWER
                   and abs(spec.outer.exponent * p - 1.0)
                   <= tolerances.DEGREE_ONE_TOL
                   and abs(shift_sum)
                   <= tolerances.DEGREE_ONE_TOL * shift_scale)
        if spec.outer.form == FORM_POWER:
            record["degree_product"] = spec.outer.exponent * p
        return matches, "acms", record, cls
    if cls.case == HOMOTHETIC_COBB_DOUGLAS:
        beta_sum = math.fsum(h.coefficient for h in spec.inner)
        record["coefficient_sum"] = beta_sum
        matches = (spec.outer.form == FORM_EXP
                   and abs(beta_sum - 1.0)
                   <= tolerances.DEGREE_ONE_TOL * max(1.0, abs(beta_sum)))
        return matches, "cobb_douglas", record, cls
    return False, None, record, cls


def _outer_ode_diagnostic(expr: FunctionExpr, points, cls):
    """Worst outer-function differential residual over the sampled arguments."""
    if expr.family == "acms":
        rho = expr.params["rho"]
        if rho == 1.0:
            return None, None
        outer = ScalarFn(FORM_POWER, expr.params["gamma"],
                         exponent=expr.params["d"] / rho)
        sigma = 1.0 / (1.0 - rho)
        weights = expr.params["weights"]
        worst = 0.0
        for x in points:
            u = math.fsum(w * float(xi) ** rho for w, xi in zip(weights, x))
            worst = max(worst, acms_outer_ode_residual(outer, sigma, u))
        return "power_aggregator", worst
    if expr.family == "cobb_douglas":
        outer = ScalarFn(FORM_AFFINE, expr.params["gamma"])
        alpha = math.fsum(expr.params["alpha"])
        worst = 0.0
        for x in points:
            u = math.prod(float(xi) ** a
                          for xi, a in zip(x, expr.params["alpha"]))
            worst = max(worst,
                        cobb_douglas_outer_ode_residual(outer, alpha, u))
        return "log_aggregator", worst
    if expr.family == "quasi_sum" and cls is not None:
        spec = expr.params["spec"]
        if cls.case == HOMOTHETIC_ACMS:
            worst = max(acms_outer_ode_residual(spec.outer, cls.sigma,
                                                spec.inner_sum(x))
                        for x in points)
            return "power_aggregator", worst
        if cls.case == HOMOTHETIC_COBB_DOUGLAS:
            alpha = math.fsum(h.coefficient for h in spec.inner)
            worst = max(_cobb_douglas_log_ode_residual(spec.outer, alpha,
                                                       spec.inner_sum(x))
                        for x in points)
            return "log_aggregator", worst
    return None, None


def _verify_curvature_theorem(theorem: str, expr: FunctionExpr, box,
                              samples: int, seed: int) -> TheoremReport:
    if not isinstance(expr, FunctionExpr):
        raise SpecError("verification needs a FunctionExpr")
    if expr.family == "custom":
        raise HypothesisError(
            "custom composites are outside the quasi-sum hypothesis")
    if box is None:
        box = default_box(expr.n)
    box = validate_box(box, expr.n)
    detection = detect_ces(expr, box, samples=samples, seed=seed)
    if detection.verdict == NOT_CES:
        raise HypothesisError(
            "constant-elasticity hypothesis fails on this box (NotCES)")

    points = [box_center(box)]
    points.extend(log_uniform(box, samples, seed))
    geometries = [graph_geometry(expr, x) for x in points]
    rows = tuple(
        PointRow(tuple(float(v) for v in x), g.gauss_kronecker,
                 g.gauss_kronecker_scaled, g.flatness_residual)
        for x, g in zip(points, geometries))

    if theorem == THEOREM_GAUSS_KRONECKER:
        worst = max(g.gauss_kronecker_scaled for g in geometries)
        vanish_tol = tolerances.VANISHING_CURVATURE_TOL
        clear_tol = tolerances.CLEAR_CURVATURE_TOL
        residual_key = "max_scaled_gauss_kronecker"
    else:
        worst = max(g.flatness_residual for g in geometries)
        vanish_tol = tolerances.FLATNESS_VERDICT_TOL
        clear_tol = tolerances.CLEAR_NONFLAT_TOL
        residual_key = "max_flatness_residual"

    if worst <= vanish_tol:
        hypothesis = True
    elif worst > clear_tol:
        hypothesis = False
    else:
        hypothesis = None

    matches, family, record, cls = _family_degree_one(expr, box, samples, seed)

    bare = normalize_outer_shift(expr)
    degree_gap = 0.0
    for x in points:
        try:
            degree_gap = max(degree_gap,
                             abs(homogeneity_degree(bare, x) - 1.0))
        except DomainError:
            degree_gap = math.inf
            break
    record["euler_degree_gap"] = degree_gap

    conclusion_check = {"family_matches": matches, "family": family}
    conclusion_check.update(record)
    if theorem == THEOREM_GAUSS_KRONECKER:
        ode_label, ode_worst = _outer_ode_diagnostic(expr, points, cls)
        if ode_label is not None:
            conclusion_check["outer_ode"] = {"form": ode_label,
                                             "max_residual": ode_worst}

    hypothesis_check = {
        "ces_verdict": detection.verdict,
        "sigma_estimate": detection.sigma_estimate,
        residual_key: worst,
        "vanishing_tolerance": vanish_tol,
        "clearly_nonzero_tolerance": clear_tol,
    }

    if hypothesis is None:
        verdict = DEGENERATE_HYPOTHESIS
    elif hypothesis == matches:
        verdict = CONSISTENT
    else:
        verdict = INCONSISTENT
    return TheoremReport(theorem, verdict, hypothesis, matches,
                         hypothesis_check, conclusion_check, rows)


def verify_theorem_41(expr: FunctionExpr, box=None, samples: int = 64,
                      seed: int = 0) -> TheoremReport:
    """Vanishing Gauss-Kronecker curvature vs degree-one family membership."""
    return _verify_curvature_theorem(THEOREM_GAUSS_KRONECKER, expr, box,
                                     samples, seed)


def verify_theorem_42(expr: FunctionExpr, box=None, samples: int = 64,
                      seed: int = 0) -> TheoremReport:
    """Intrinsic flatness of the graph vs degree-one family membership."""
    return _verify_curvature_theorem(THEOREM_FLATNESS, expr, box,
                                     samples, seed)


def verify_theorem_11(expr, box=None, samples: int = 64,
                      seed: int = 0) -> TheoremReport:
    """Constant-elasticity detection vs structural classification.

    A quasi-sum has a constant (or everywhere-degenerate) pairwise elasticity
    exactly when it classifies into one of the three structural cases; both
    sides false is as consistent as both sides true.  Unlike the curvature
    checks this accepts NotCES inputs, since they are half of the statement.
    """
    if isinstance(expr, QuasiSumSpec):
        spec = expr
        if box is None:
            box = default_box(spec.n)
        expr = build_quasi_sum(spec, box)
    else:
        spec = as_quasi_sum(expr)
    if box is None:
        box = default_box(spec.n)
    box = validate_box(box, spec.n)
    detection = detect_ces(expr, box, samples=samples, seed=seed)
    cls = classify_quasi_sum(spec, box, samples=samples, seed=seed)

    hypothesis = detection.verdict in (REGULAR_CES, DEGENERATE_CES)
    conclusion = cls.case != NOT_CES
    verdict = CONSISTENT if hypothesis == conclusion else INCONSISTENT
    hypothesis_check = {
        "ces_verdict": detection.verdict,
        "sigma_estimate": detection.sigma_estimate,
        "max_deviation": detection.max_deviation,
    }
    conclusion_check = {
        "family_matches": conclusion,
        "classification": cls.as_dict(),
    }
    return TheoremReport(THEOREM_CLASSIFICATION, verdict, hypothesis,
                         conclusion, hypothesis_check, conclusion_check, ())
