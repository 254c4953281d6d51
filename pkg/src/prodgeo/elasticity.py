"""Pairwise substitution elasticity and constant-elasticity detection.

For a twice-differentiable f with nonvanishing marginal products the Hicks
elasticity of substitution between inputs i and j is

    H_ij = (1/(x_i f_i) + 1/(x_j f_j))
           / (-f_ii/f_i**2 + 2 f_ij/(f_i f_j) - f_jj/f_j**2)

where subscripts denote partial derivatives.  Numerator and denominator can
vanish independently, so the result is a tagged value: finite, infinite
(vanishing denominator), or degenerate (both vanish and the ratio carries no
information).  Vanishing is judged against the summed magnitude of the terms,
with an exact-zero escape so that functions whose second derivatives are
identically zero are classified without reference to a scale.

The two-input ratio family F(x2/x1) is the reason the degenerate tag exists:
both numerator and denominator vanish identically for it, so the constant-
elasticity identity holds for every sigma at once and no sigma value is
reported.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .autodiff import Jet2
from .errors import DomainError, SpecError
from .families import FunctionExpr, QuasiSumSpec, default_box
from .sampling import box_center, log_uniform
from . import tolerances

FINITE = "finite"
INFINITE = "infinite"
DEGENERATE = "degenerate"

REGULAR_CES = "RegularCES"
DEGENERATE_CES = "DegenerateCES"
NOT_CES = "NotCES"

__all__ = [
    "HicksValue", "ElasticityReport", "hicks_elasticity",
    "pairwise_elasticities", "ces_residual", "quasisum_separated_residual",
    "detect_ces",
    "FINITE", "INFINITE", "DEGENERATE",
    "REGULAR_CES", "DEGENERATE_CES", "NOT_CES",
]


@dataclass(frozen=True)
class HicksValue:
    """Pairwise elasticity tagged with its degeneracy status."""

    kind: str
    value: float | None = None

    @property
    def is_finite(self) -> bool:
        return self.kind == FINITE

    def as_float(self) -> float:
        """Numeric rendering: inf for infinite, nan for degenerate."""
        if self.kind == FINITE:
            return self.value
        return math.inf if self.kind == INFINITE else math.nan


def _pair_indices(n: int, i: int, j: int) -> tuple[int, int]:
    for k in (i, j):
        if not isinstance(k, int) or not 0 <= k < n:
            raise SpecError(f"input index {k!r} out of range for {n} inputs")
    if i == j:
        raise SpecError("elasticity needs two distinct inputs")
    return (i, j) if i < j else (j, i)


def _hicks_from_jet(jet: Jet2, x, i: int, j: int) -> HicksValue:
    """Elasticity from a precomputed jet.

    The pair is put in ascending order before any arithmetic so the result
    for (i, j) and (j, i) is identical to the last bit.
    """
    lo, hi = _pair_indices(jet.n, i, j)
    g = jet.gradient
    if g[lo] == 0.0 or g[hi] == 0.0:
        raise DomainError(
            "elasticity undefined where a marginal product vanishes")
    fl, fh = float(g[lo]), float(g[hi])
    hll = float(jet.hessian[lo, lo])
    hlh = float(jet.hessian[lo, hi])
    hhh = float(jet.hessian[hi, hi])
    xl, xh = float(x[lo]), float(x[hi])

    num_terms = (1.0 / (xl * fl), 1.0 / (xh * fh))
    num = math.fsum(num_terms)
    den_terms = (-hll / (fl * fl), 2.0 * hlh / (fl * fh), -hhh / (fh * fh))
    den = math.fsum(den_terms)

    eps = tolerances.DEGENERACY_EPS
    num_small = num == 0.0 or abs(num) <= eps * math.fsum(map(abs, num_terms))
    den_small = den == 0.0 or abs(den) <= eps * math.fsum(map(abs, den_terms))
    if den_small:
        return HicksValue(DEGENERATE) if num_small else HicksValue(INFINITE)
    return HicksValue(FINITE, num / den)


def hicks_elasticity(expr: FunctionExpr, point, i: int, j: int) -> HicksValue:
    """H_ij of ``expr`` at ``point`` for the (zero-based) input pair."""
    x = expr._check_point(point)
    return _hicks_from_jet(expr.jet(x), x, i, j)


def pairwise_elasticities(expr: FunctionExpr, point):
    """[(i, j, HicksValue)] over all pairs i < j, from a single jet."""
    x = expr._check_point(point)
    jet = expr.jet(x)
    return [(i, j, _hicks_from_jet(jet, x, i, j))
            for i in range(expr.n) for j in range(i + 1, expr.n)]


def ces_residual(expr: FunctionExpr, point, sigma: float,
                 i: int, j: int) -> float:
    """Signed defect of the constant-elasticity identity H_ij = sigma.

    The identity is cross-multiplied so no division by the (possibly
    vanishing) denominator occurs:

        2 f_i f_j f_ij - f_j**2 f_ii - f_i**2 f_jj
            = (x_i f_i + x_j f_j) f_i f_j / (sigma x_i x_j)

    and the difference is normalized by max(|lhs|, |rhs|, g^3/(x_i x_j)^2)
    where g = max(|x_i f_i|, |x_j f_j|).  The floor term, which carries the
    same scaling as the two sides, keeps the residual meaningful when both
    vanish identically, as they do for the two-input ratio family: there the
    residual is rounding noise over the gradient scale, hence effectively
    zero for every sigma at once.  A floor built from the value of f would
    not do, because a shifted quasi-sum can cross zero inside the box.
    """
    sigma = float(sigma)
    if sigma == 0.0 or not math.isfinite(sigma):
        raise SpecError("sigma must be finite and nonzero")
    x = expr._check_point(point)
    lo, hi = _pair_indices(expr.n, i, j)
    jet = expr.jet(x)
    fl = float(jet.gradient[lo])
    fh = float(jet.gradient[hi])
    hll = float(jet.hessian[lo, lo])
    hlh = float(jet.hessian[lo, hi])
    hhh = float(jet.hessian[hi, hi])
    xl, xh = float(x[lo]), float(x[hi])

    lhs = math.fsum((2.0 * fl * fh * hlh, -fh * fh * hll, -fl * fl * hhh))
    rhs = (xl * fl + xh * fh) * fl * fh / (sigma * xl * xh)
    grad_scale = max(abs(xl * fl), abs(xh * fh))
    floor = grad_scale ** 3 / (xl * xh) ** 2
    scale = max(abs(lhs), abs(rhs), floor)
    if scale == 0.0:
        return 0.0
    return (lhs - rhs) / scale


def quasisum_separated_residual(spec: QuasiSumSpec, point, sigma: float,
                                i: int, j: int) -> float:
    """Signed defect of the separated constant-elasticity condition.

    For f = F(sum h_k) the outer function drops out of H_ij and the identity
    H_ij = sigma splits into per-input terms

        s_k = 1/(x_k h_k') + sigma * h_k''/h_k'**2

    with H_ij = sigma exactly when s_i + s_j = 0.  Returns s_i + s_j.
    """
    sigma = float(sigma)
    if sigma == 0.0 or not math.isfinite(sigma):
        raise SpecError("sigma must be finite and nonzero")
    lo, hi = _pair_indices(spec.n, i, j)
    out = 0.0
    for k in (lo, hi):
        xk = float(point[k])
        if xk <= 0.0:
            raise DomainError("point must be strictly positive")
        _, d1, d2 = spec.inner[k].derivatives(xk)
        if d1 == 0.0:
            raise DomainError(
                "separated residual undefined where an inner derivative vanishes")
        out += 1.0 / (xk * d1) + sigma * d2 / (d1 * d1)
    return out


@dataclass(frozen=True)
class ElasticityReport:
    """Outcome of sampling the pairwise elasticity over a box.

    ``pair_values`` holds the tagged elasticities at the box center, keyed by
    the zero-based pair.  ``sigma_estimate`` is the anchor value the constancy
    check ran against, absent when no pair was ever finite.
    """

    verdict: str
    sigma_estimate: float | None
    max_deviation: float
    pair_values: dict
    n_points: int
    finite_pairs: int
    infinite_pairs: int
    degenerate_pairs: int

    def as_dict(self) -> dict:
        pairs = {f"{i + 1},{j + 1}": {"kind": h.kind, "value": h.value}
                 for (i, j), h in sorted(self.pair_values.items())}
        return {
            "verdict": self.verdict,
            "sigma_estimate": self.sigma_estimate,
            "max_deviation": self.max_deviation,
            "center_pair_values": pairs,
            "n_points": self.n_points,
            "finite_pairs": self.finite_pairs,
            "infinite_pairs": self.infinite_pairs,
            "degenerate_pairs": self.degenerate_pairs,
        }


def detect_ces(expr: FunctionExpr, box=None, samples: int = 32,
               seed: int = 0) -> ElasticityReport:
    """Decide whether ``expr`` has constant pairwise elasticity on ``box``.

    The box center plus ``samples`` log-uniform points are evaluated, every
    input pair at every point.  The reference sigma is the center value of
    the first input pair; if that pair is not finite there, the first finite
    nonzero value over the sample points (scan order) takes its place.

    * RegularCES: a reference exists, no pair is infinite anywhere, and every
      finite value agrees with the reference to within the constancy
      tolerance.  Degenerate pairs are allowed; they carry no value to check.
    * DegenerateCES: every pair at every point is degenerate.
    * NotCES: anything else.  A linear function lands here (its denominator
      vanishes while its numerator does not), as does any mixed quasi-sum.
    """
    if samples < 2:
        raise SpecError("detection needs at least two sample points")
    if box is None:
        box = default_box(expr.n)
    points = [box_center(box)]
    points.extend(log_uniform(box, samples, seed))

    rows = [pairwise_elasticities(expr, x) for x in points]
    center = {(i, j): h for i, j, h in rows[0]}

    center_first = center[(0, 1)] if expr.n >= 2 else None
    sigma_hat = None
    if center_first is not None and center_first.is_finite \
            and center_first.value != 0.0:
        sigma_hat = center_first.value
    else:
        for row in rows[1:]:
            for _i, _j, h in row:
                if h.is_finite and h.value != 0.0:
                    sigma_hat = h.value
                    break
            if sigma_hat is not None:
                break

    finite = 0
    infinite = 0
    degenerate = 0
    max_dev = 0.0
    for row in rows:
        for _i, _j, h in row:
            if h.kind == DEGENERATE:
                degenerate += 1
            elif h.kind == INFINITE:
                infinite += 1
            else:
                finite += 1
                if sigma_hat is not None:
                    dev = abs(h.value - sigma_hat) / max(1.0, abs(sigma_hat))
                    max_dev = max(max_dev, dev)

    if degenerate > 0 and finite == 0 and infinite == 0:
        verdict = DEGENERATE_CES
        sigma_out = None
    elif (sigma_hat is not None and infinite == 0
          and max_dev <= tolerances.CES_CONSTANCY_RTOL):
        verdict = REGULAR_CES
        sigma_out = sigma_hat
    else:
        verdict = NOT_CES
        sigma_out = None
    return ElasticityReport(verdict, sigma_out, max_dev, center,
                            len(points), finite, infinite, degenerate)
