"""Differential geometry of the production hypersurface.

The graph of f over the positive orthant, {(x, f(x))}, is a hypersurface in
(n+1)-space.  With W = sqrt(1 + |grad f|^2) its induced metric, unit normal,
and second fundamental form are

    g   = I + grad f (grad f)^T          (det g = W^2)
    xi  = (-grad f, 1) / W
    h   = Hess f / W

The shape operator is S = g^{-1} h, the principal curvatures are the
eigenvalues of the pencil (h, g), and the Gauss-Kronecker curvature is

    G = det(Hess f) / W^(n+2).

Because G decays like W^(n+2) along rays it is a poor zero test on its own;
``gauss_kronecker_scaled`` divides |det Hess f| by the Frobenius norm of the
Hessian raised to n, which is invariant under rescaling the Hessian and stays
O(1) unless the determinant genuinely collapses.

Intrinsic flatness is measured through the Gauss equation: the curvature
tensor components are h_ik h_jl - h_il h_jk, and ``flatness_residual`` is
their largest magnitude normalized by 1 + |h|^2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .autodiff import Jet2
from .families import FunctionExpr

__all__ = ["GraphGeometry", "graph_point", "graph_geometry",
           "gauss_kronecker", "flatness_residual"]


@dataclass(frozen=True, eq=False)
class GraphGeometry:
    """All pointwise surface quantities of the graph of f at one point."""

    point: np.ndarray
    value: float
    gradient: np.ndarray
    hessian: np.ndarray
    area_factor: float
    unit_normal: np.ndarray
    metric: np.ndarray
    second_fundamental_form: np.ndarray
    shape_operator: np.ndarray
    principal_curvatures: np.ndarray
    gauss_kronecker: float
    gauss_kronecker_scaled: float
    riemann_max: float
    flatness_residual: float

    @property
    def n(self) -> int:
        return self.point.shape[0]

    def as_dict(self) -> dict:
        """JSON-ready rendering with arrays as nested lists."""
        return {
            "point": self.point.tolist(),
            "value": self.value,
            "gradient": self.gradient.tolist(),
            "hessian": self.hessian.tolist(),
            "area_factor": self.area_factor,
            "unit_normal": self.unit_normal.tolist(),
            "metric": self.metric.tolist(),
            "second_fundamental_form": self.second_fundamental_form.tolist(),
            "shape_operator": self.shape_operator.tolist(),
            "principal_curvatures": self.principal_curvatures.tolist(),
            "gauss_kronecker": self.gauss_kronecker,
            "gauss_kronecker_scaled": self.gauss_kronecker_scaled,
            "riemann_max": self.riemann_max,
            "flatness_residual": self.flatness_residual,
        }


def _riemann_max(h: np.ndarray) -> float:
    """Largest |h_ik h_jl - h_il h_jk| over index pairs i<j, k<l.

    These are the independent curvature components supplied by the Gauss
    equation; only unordered pairs of pairs are scanned since the tensor
    symmetries repeat the rest.
    """
    n = h.shape[0]
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    best = 0.0
    for a, (i, j) in enumerate(pairs):
        for k, l in pairs[a:]:
            comp = abs(h[i, k] * h[j, l] - h[i, l] * h[j, k])
            if comp > best:
                best = comp
    return float(best)


def _geometry_from_jet(jet: Jet2, x: np.ndarray) -> GraphGeometry:
    n = jet.n
    grad = jet.gradient
    hess = jet.hessian
    w_sq = 1.0 + float(np.dot(grad, grad))
    w = math.sqrt(w_sq)

    metric = np.eye(n) + np.outer(grad, grad)
    normal = np.append(-grad, 1.0) / w
    second = hess / w
    shape = np.linalg.solve(metric, second)
    kappas = scipy.linalg.eigh(second, metric, eigvals_only=True)

    det_hess = float(np.linalg.det(hess))
    gauss = det_hess / w ** (n + 2)
    hess_norm = float(np.linalg.norm(hess))
    scaled = 0.0 if hess_norm == 0.0 else abs(det_hess) / hess_norm ** n

    rmax = _riemann_max(second)
    flatness = rmax / (1.0 + hess_norm * hess_norm / w_sq)

    return GraphGeometry(
        point=x.copy(),
        value=jet.value,
        gradient=grad.copy(),
        hessian=hess.copy(),
        area_factor=w,
        unit_normal=normal,
        metric=metric,
        second_fundamental_form=second,
        shape_operator=shape,
        principal_curvatures=np.asarray(kappas, dtype=float),
        gauss_kronecker=gauss,
        gauss_kronecker_scaled=scaled,
        riemann_max=rmax,
        flatness_residual=flatness,
    )


def graph_point(expr: FunctionExpr, point) -> np.ndarray:
    """The point (x, f(x)) on the hypersurface."""
    x = expr._check_point(point)
    return np.append(x, expr.value(x))


def graph_geometry(expr: FunctionExpr, point) -> GraphGeometry:
    """Every surface quantity of the graph of ``expr`` at ``point``."""
    x = expr._check_point(point)
    return _geometry_from_jet(expr.jet(x), x)


def gauss_kronecker(expr: FunctionExpr, point) -> float:
    """det(Hess f) / W^(n+2) at ``point``."""
    return graph_geometry(expr, point).gauss_kronecker


def flatness_residual(expr: FunctionExpr, point) -> float:
    """Scale-normalized largest curvature component at ``point``."""
    return graph_geometry(expr, point).flatness_residual
