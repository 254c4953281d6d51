"""Parametric production-function families and their closed-form pieces.

The admissible inputs are points of the positive orthant.  Four evaluable
families are provided:

* generalized Cobb-Douglas      ``gamma * prod(x_i ** alpha_i)``
* generalized ACMS aggregator   ``gamma * (sum(a_i**rho * x_i**rho)) ** (d/rho)``
* quasi-sum                     ``F(h_1(x_1) + ... + h_n(x_n))``
* two-input ratio               ``F(x_2 / x_1)``

plus a ``custom`` escape hatch for composites assembled directly from jet
arithmetic.  Quasi-sum components come from a small closed family of scalar
functions (power, log, exp, affine), each with exact first and second
derivatives, so structure matching downstream can work on parameters rather
than on curve fitting.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .autodiff import Jet2, lift_variable
from .errors import DomainError, SpecError

FORM_POWER = "power"
FORM_LOG = "log"
FORM_EXP = "exp"
FORM_AFFINE = "affine"
FORMS = (FORM_POWER, FORM_LOG, FORM_EXP, FORM_AFFINE)

DEFAULT_BOX_AXIS = (0.5, 2.0)
MONOTONICITY_SAMPLES = 64


def default_box(n: int) -> tuple[tuple[float, float], ...]:
    """The canonical evaluation box [0.5, 2]^n."""
    return tuple(DEFAULT_BOX_AXIS for _ in range(n))


@dataclass(frozen=True)
class ScalarFn:
    """One-variable scalar function from the closed family.

    form        one of power, log, exp, affine
    coefficient nonzero multiplier c
    exponent    power only: c * x**p + shift with p != 0
    shift       additive constant (the family is closed under translation)

    The four forms and their derivatives:

        power   c * x**p + s      c*p*x**(p-1)     c*p*(p-1)*x**(p-2)
        log     c * ln(x) + s     c / x            -c / x**2
        exp     c * e**x + s      c * e**x         c * e**x
        affine  c * x + s         c                0
    """

    form: str
    coefficient: float
    exponent: float | None = None
    shift: float = 0.0

    def __post_init__(self):
        if self.form not in FORMS:
            raise SpecError(f"unknown scalar form {self.form!r}")
        c = float(self.coefficient)
        if not math.isfinite(c) or c == 0.0:
            raise SpecError("coefficient must be finite and nonzero")
        object.__setattr__(self, "coefficient", c)
        if self.form == FORM_POWER:
            if self.exponent is None:
                raise SpecError("power form requires an exponent")
            p = float(self.exponent)
            if not math.isfinite(p) or p == 0.0:
                raise SpecError("power exponent must be finite and nonzero")
            object.__setattr__(self, "exponent", p)
        elif self.exponent is not None:
            raise SpecError(f"{self.form} form takes no exponent")
        s = float(self.shift)
        if not math.isfinite(s):
            raise SpecError("shift must be finite")
        object.__setattr__(self, "shift", s)

    # -- evaluation --------------------------------------------------------

    def value(self, x: float) -> float:
        return self.derivatives(x)[0]

    def derivatives(self, x: float) -> tuple[float, float, float]:
        """(value, first, second) at x, all in closed form."""
        c = self.coefficient
        s = self.shift
        x = float(x)
        if self.form == FORM_POWER:
            p = self.exponent
            if float(p).is_integer():
                if x == 0.0 and p < 2:
                    raise DomainError("power form undefined at zero")
            elif x <= 0.0:
                raise DomainError(
                    f"power form with exponent {p} needs a positive argument")
            return (c * x ** p + s,
                    c * p * x ** (p - 1.0),
                    c * p * (p - 1.0) * x ** (p - 2.0))
        if self.form == FORM_LOG:
            if x <= 0.0:
                raise DomainError("log form needs a positive argument")
            return (c * math.log(x) + s, c / x, -c / (x * x))
        if self.form == FORM_EXP:
            e = math.exp(x)
            return (c * e + s, c * e, c * e)
        return (c * x + s, c, 0.0)

    def apply_jet(self, u: Jet2) -> Jet2:
        v0, v1, v2 = self.derivatives(u.value)
        return u.chain(v0, v1, v2)

    def increasing_on_positive(self) -> bool:
        """Whether the derivative is positive on the whole positive axis."""
        if self.form == FORM_POWER:
            return self.coefficient * self.exponent > 0.0
        return self.coefficient > 0.0

    def to_dict(self) -> dict:
        doc = {"form": self.form, "coefficient": self.coefficient,
               "shift": self.shift}
        if self.form == FORM_POWER:
            doc["exponent"] = self.exponent
        return doc

    @classmethod
    def from_dict(cls, doc) -> "ScalarFn":
        if not isinstance(doc, dict):
            raise SpecError("scalar function record must be an object")
        allowed = {"form", "coefficient", "exponent", "shift"}
        extra = set(doc) - allowed
        if extra:
            raise SpecError(f"unknown scalar function keys: {sorted(extra)}")
        if "form" not in doc or "coefficient" not in doc:
            raise SpecError("scalar function record needs form and coefficient")
        return cls(form=doc["form"], coefficient=doc["coefficient"],
                   exponent=doc.get("exponent"), shift=doc.get("shift", 0.0))


IDENTITY = ScalarFn(FORM_AFFINE, 1.0)


@dataclass(frozen=True)
class QuasiSumSpec:
    """Outer function applied to a sum of per-input scalar functions."""

    outer: ScalarFn
    inner: tuple[ScalarFn, ...]

    def __post_init__(self):
        inner = tuple(self.inner)
        if len(inner) < 2:
            raise SpecError("quasi-sum needs at least two inputs")
        if not all(isinstance(h, ScalarFn) for h in inner):
            raise SpecError("inner components must be ScalarFn instances")
        if not isinstance(self.outer, ScalarFn):
            raise SpecError("outer must be a ScalarFn")
        object.__setattr__(self, "inner", inner)

    @property
    def n(self) -> int:
        return len(self.inner)

    def inner_sum(self, point) -> float:
        return math.fsum(h.value(x) for h, x in zip(self.inner, point))


@dataclass(frozen=True, eq=False)
class FunctionExpr:
    """Evaluable member of one of the closed families.

    family  one of cobb_douglas, acms, quasi_sum, ratio, custom
    n       input count
    params  family-specific record
    """

    family: str
    n: int
    params: dict

    def _check_point(self, point) -> np.ndarray:
        x = np.asarray(point, dtype=float)
        if x.ndim != 1 or x.shape[0] != self.n:
            raise SpecError(
                f"point has shape {x.shape}, expected ({self.n},)")
        if not np.all(np.isfinite(x)) or np.any(x <= 0.0):
            raise DomainError(
                "points must be finite and strictly positive in every coordinate")
        return x

    def value(self, point) -> float:
        """Plain float evaluation (shares no code with jet propagation)."""
        x = self._check_point(point)
        p = self.params
        if self.family == "cobb_douglas":
            out = p["gamma"]
            for a, xi in zip(p["alpha"], x):
                out *= xi ** a
            return float(out)
        if self.family == "acms":
            u = math.fsum(w * xi ** p["rho"] for w, xi in zip(p["weights"], x))
            if u <= 0.0:
                raise DomainError("aggregator sum must stay positive")
            return float(p["gamma"] * u ** (p["d"] / p["rho"]))
        if self.family == "quasi_sum":
            spec: QuasiSumSpec = p["spec"]
            return float(spec.outer.value(spec.inner_sum(x)))
        if self.family == "ratio":
            return float(p["outer"].value(x[1] / x[0]))
        return self.jet(x).value

    def jet(self, point) -> Jet2:
        """Second-order jet at ``point`` (exact gradient and Hessian)."""
        x = self._check_point(point)
        n = self.n
        p = self.params
        if self.family == "cobb_douglas":
            acc = None
            for i, a in enumerate(p["alpha"]):
                t = lift_variable(i, x[i], n) ** a
                acc = t if acc is None else acc * t
            return p["gamma"] * acc
        if self.family == "acms":
            u = Jet2.constant(0.0, n)
            for i, w in enumerate(p["weights"]):
                u = u + w * (lift_variable(i, x[i], n) ** p["rho"])
            if u.value <= 0.0:
                raise DomainError("aggregator sum must stay positive")
            return p["gamma"] * (u ** (p["d"] / p["rho"]))
        if self.family == "quasi_sum":
            spec: QuasiSumSpec = p["spec"]
            u = Jet2.constant(0.0, n)
            for i, h in enumerate(spec.inner):
                u = u + h.apply_jet(lift_variable(i, x[i], n))
            return spec.outer.apply_jet(u)
        if self.family == "ratio":
            r = lift_variable(1, x[1], n) * (lift_variable(0, x[0], n) ** -1.0)
            return p["outer"].apply_jet(r)
        return p["fn"]([lift_variable(i, x[i], n) for i in range(n)])


# -- builders ---------------------------------------------------------------


def _check_scale(gamma: float) -> float:
    g = float(gamma)
    if not math.isfinite(g) or g <= 0.0:
        raise SpecError("scale gamma must be finite and positive")
    return g


def build_cobb_douglas(gamma: float, alpha) -> FunctionExpr:
    """gamma * prod(x_i ** alpha_i) with gamma > 0 and every alpha_i nonzero."""
    g = _check_scale(gamma)
    a = tuple(float(v) for v in alpha)
    if len(a) < 2:
        raise SpecError("need at least two inputs")
    if any(not math.isfinite(v) or v == 0.0 for v in a):
        raise SpecError("every exponent alpha_i must be finite and nonzero")
    return FunctionExpr("cobb_douglas", len(a), {"gamma": g, "alpha": a})


def build_acms(gamma: float, a, rho: float, d: float) -> FunctionExpr:
    """gamma * (sum((a_i * x_i) ** rho-style weights)) ** (d / rho).

    Weights are a_i**rho; rho must be nonzero and d nonzero.  With
    sigma = 1 / (1 - rho) this family has constant substitution elasticity.
    """
    g = _check_scale(gamma)
    rho = float(rho)
    d = float(d)
    if not math.isfinite(rho) or rho == 0.0:
        raise SpecError("rho must be finite and nonzero")
    if not math.isfinite(d) or d == 0.0:
        raise SpecError("degree d must be finite and nonzero")
    coeffs = tuple(float(v) for v in a)
    if len(coeffs) < 2:
        raise SpecError("need at least two inputs")
    if any(not math.isfinite(v) or v == 0.0 for v in coeffs):
        raise SpecError("every a_i must be finite and nonzero")
    weights = []
    for v in coeffs:
        try:
            weights.append(math.pow(v, rho))
        except ValueError as exc:
            raise SpecError(
                f"a_i**rho not real for a_i={v}, rho={rho}") from exc
    return FunctionExpr("acms", len(coeffs),
                        {"gamma": g, "a": coeffs, "rho": rho, "d": d,
                         "weights": tuple(weights)})


def _validate_quasi_sum_on_box(spec: QuasiSumSpec, box) -> None:
    """Sampled monotonicity and domain check on the declared box.

    Each inner derivative is checked at MONOTONICITY_SAMPLES points per axis;
    the outer derivative is checked at the same number of points across the
    inner-sum range (inner components are monotone, so the range comes from
    the axis endpoints).
    """
    lo_sum = 0.0
    hi_sum = 0.0
    for i, ((lo, hi), h) in enumerate(zip(box, spec.inner)):
        xs = np.linspace(lo, hi, MONOTONICITY_SAMPLES)
        sign = 0.0
        for x in xs:
            try:
                _, d1, _ = h.derivatives(float(x))
            except DomainError as exc:
                raise SpecError(
                    f"inner component {i} undefined at x={float(x)!r}") from exc
            if d1 == 0.0 or (sign != 0.0 and math.copysign(1.0, d1) != sign):
                raise SpecError(
                    f"inner component {i} is not strictly monotone at x={float(x)!r}")
            sign = math.copysign(1.0, d1)
        va, vb = h.value(lo), h.value(hi)
        lo_sum += min(va, vb)
        hi_sum += max(va, vb)
    for u in np.linspace(lo_sum, hi_sum, MONOTONICITY_SAMPLES):
        try:
            _, d1, _ = spec.outer.derivatives(float(u))
        except DomainError as exc:
            raise SpecError(
                f"outer undefined on the inner-sum range at u={float(u)!r}") from exc
        if d1 <= 0.0:
            raise SpecError(
                f"outer must be strictly increasing on the inner-sum range; "
                f"derivative is {d1!r} at u={float(u)!r}")


def build_quasi_sum(spec: QuasiSumSpec, box=None) -> FunctionExpr:
    """F(h_1(x_1) + ... + h_n(x_n)) after a sampled validity check on ``box``.

    ``box`` defaults to [0.5, 2]^n.  The box is only used for validation; it
    is not stored on the expression.
    """
    if box is None:
        box = default_box(spec.n)
    box = validate_box(box, spec.n)
    _validate_quasi_sum_on_box(spec, box)
    return FunctionExpr("quasi_sum", spec.n, {"spec": spec})


def build_ratio(outer: ScalarFn) -> FunctionExpr:
    """F(x_2 / x_1) on two inputs, F strictly increasing on the positive axis."""
    if not isinstance(outer, ScalarFn):
        raise SpecError("outer must be a ScalarFn")
    if not outer.increasing_on_positive():
        raise SpecError("outer must be strictly increasing on the positive axis")
    return FunctionExpr("ratio", 2, {"outer": outer})


def build_custom(n: int, jet_fn, label: str = "custom") -> FunctionExpr:
    """Composite assembled directly from jet arithmetic.

    ``jet_fn`` maps a list of lifted coordinate jets to the output jet.  No
    document form exists for these.
    """
    if n < 2:
        raise SpecError("need at least two inputs")
    return FunctionExpr("custom", int(n), {"fn": jet_fn, "label": label})


# -- derived quantities ------------------------------------------------------


def homogeneity_degree(expr: FunctionExpr, point) -> float:
    """Euler quotient (x . grad f) / f at ``point``.

    Constant across points exactly when the function is homogeneous.
    """
    jet = expr.jet(point)
    if jet.value == 0.0:
        raise DomainError("homogeneity degree undefined where f vanishes")
    x = np.asarray(point, dtype=float)
    return float(np.dot(x, jet.gradient) / jet.value)


def hessian_det_quasisum(spec: QuasiSumSpec, point) -> float:
    """Closed-form Hessian determinant of a quasi-sum.

    det H = F'^n * prod(h_i'') + F'^(n-1) * F'' * sum_j prod_{i != j}(h_i'') * h_j'^2

    evaluated at the inner sum u and the given point.
    """
    x = np.asarray(point, dtype=float)
    if x.shape[0] != spec.n:
        raise SpecError(f"point has {x.shape[0]} coordinates, expected {spec.n}")
    if np.any(x <= 0.0):
        raise DomainError("point must be strictly positive")
    u = spec.inner_sum(x)
    _, f1, f2 = spec.outer.derivatives(u)
    d1 = []
    d2 = []
    for h, xi in zip(spec.inner, x):
        _, a, b = h.derivatives(float(xi))
        d1.append(a)
        d2.append(b)
    n = spec.n
    term1 = f1 ** n * math.prod(d2)
    cross = math.fsum(
        math.prod(d2[i] for i in range(n) if i != j) * d1[j] ** 2
        for j in range(n))
    return float(term1 + f1 ** (n - 1) * f2 * cross)


def as_quasi_sum(expr: FunctionExpr) -> QuasiSumSpec:
    """Rewrite a family expression in quasi-sum form, when one exists.

    Cobb-Douglas becomes exp of a weighted log sum; the aggregator family
    becomes a power outer over power inners (only when d/rho > 0, otherwise
    the outer would be decreasing); a ratio becomes log inners of opposite
    sign under the outer rewritten in log coordinates (affine and log outers
    only; the exp form has no rate parameter).
    """
    if expr.family == "quasi_sum":
        return expr.params["spec"]
    if expr.family == "cobb_douglas":
        return QuasiSumSpec(
            outer=ScalarFn(FORM_EXP, expr.params["gamma"]),
            inner=tuple(ScalarFn(FORM_LOG, a) for a in expr.params["alpha"]))
    if expr.family == "acms":
        rho = expr.params["rho"]
        exp_out = expr.params["d"] / rho
        if exp_out <= 0.0:
            raise SpecError(
                "no increasing quasi-sum form exists when d/rho <= 0")
        return QuasiSumSpec(
            outer=ScalarFn(FORM_POWER, expr.params["gamma"], exponent=exp_out),
            inner=tuple(ScalarFn(FORM_POWER, w, exponent=rho)
                        for w in expr.params["weights"]))
    if expr.family == "ratio":
        outer: ScalarFn = expr.params["outer"]
        inner = (ScalarFn(FORM_LOG, -1.0), ScalarFn(FORM_LOG, 1.0))
        if outer.form == FORM_AFFINE:
            return QuasiSumSpec(
                outer=ScalarFn(FORM_EXP, outer.coefficient, shift=outer.shift),
                inner=inner)
        if outer.form == FORM_LOG:
            return QuasiSumSpec(
                outer=ScalarFn(FORM_AFFINE, outer.coefficient, shift=outer.shift),
                inner=inner)
        raise SpecError(
            f"ratio with {outer.form} outer has no quasi-sum form in this family")
    raise SpecError(f"{expr.family} expressions have no quasi-sum form")


def normalize_outer_shift(expr: FunctionExpr) -> FunctionExpr:
    """Copy of ``expr`` with any additive output constant removed."""
    if expr.family == "quasi_sum":
        spec: QuasiSumSpec = expr.params["spec"]
        if spec.outer.shift == 0.0:
            return expr
        bare = QuasiSumSpec(outer=replace(spec.outer, shift=0.0),
                            inner=spec.inner)
        return FunctionExpr("quasi_sum", expr.n, {"spec": bare})
    if expr.family == "ratio":
        outer: ScalarFn = expr.params["outer"]
        if outer.shift == 0.0:
            return expr
        return FunctionExpr("ratio", 2, {"outer": replace(outer, shift=0.0)})
    return expr


# -- document form ------------------------------------------------------------

_FAMILY_KEYS = {
    "cobb_douglas": {"type", "gamma", "alpha"},
    "acms": {"type", "gamma", "a", "rho", "d"},
    "quasi_sum": {"type", "outer", "inner"},
    "ratio": {"type", "outer"},
}


def expr_from_dict(doc, box=None) -> FunctionExpr:
    """Build an expression from its document form (see README for the keys)."""
    if not isinstance(doc, dict):
        raise SpecError("function document must be an object")
    kind = doc.get("type")
    if kind not in _FAMILY_KEYS:
        raise SpecError(
            f"unknown function type {kind!r}; expected one of "
            f"{sorted(_FAMILY_KEYS)}")
    extra = set(doc) - _FAMILY_KEYS[kind]
    if extra:
        raise SpecError(f"unknown keys for {kind}: {sorted(extra)}")
    missing = _FAMILY_KEYS[kind] - set(doc)
    if missing:
        raise SpecError(f"missing keys for {kind}: {sorted(missing)}")
    if kind == "cobb_douglas":
        return build_cobb_douglas(doc["gamma"], doc["alpha"])
    if kind == "acms":
        return build_acms(doc["gamma"], doc["a"], doc["rho"], doc["d"])
    if kind == "quasi_sum":
        inner = doc["inner"]
        if not isinstance(inner, (list, tuple)):
            raise SpecError("inner must be an array of scalar function records")
        spec = QuasiSumSpec(outer=ScalarFn.from_dict(doc["outer"]),
                            inner=tuple(ScalarFn.from_dict(h) for h in inner))
        return build_quasi_sum(spec, box)
    return build_ratio(ScalarFn.from_dict(doc["outer"]))


def expr_to_dict(expr: FunctionExpr) -> dict:
    """Document form of an expression (custom composites have none)."""
    p = expr.params
    if expr.family == "cobb_douglas":
        return {"type": "cobb_douglas", "gamma": p["gamma"],
                "alpha": list(p["alpha"])}
    if expr.family == "acms":
        return {"type": "acms", "gamma": p["gamma"], "a": list(p["a"]),
                "rho": p["rho"], "d": p["d"]}
    if expr.family == "quasi_sum":
        spec: QuasiSumSpec = p["spec"]
        return {"type": "quasi_sum", "outer": spec.outer.to_dict(),
                "inner": [h.to_dict() for h in spec.inner]}
    if expr.family == "ratio":
        return {"type": "ratio", "outer": p["outer"].to_dict()}
    raise SpecError("custom expressions have no document form")


def validate_box(box, n: int | None = None):
    """Check a per-axis (lo, hi) box: strictly positive, lo < hi, finite."""
    out = []
    for axis, pair in enumerate(box):
        lo, hi = (float(pair[0]), float(pair[1]))
        if not (math.isfinite(lo) and math.isfinite(hi)):
            raise SpecError(f"box axis {axis} bounds must be finite")
        if lo <= 0.0 or lo >= hi:
            raise SpecError(
                f"box axis {axis} needs 0 < lo < hi, got {lo!r}:{hi!r}")
        out.append((lo, hi))
    if n is not None and len(out) != n:
        raise SpecError(f"box has {len(out)} axes, expected {n}")
    return tuple(out)
