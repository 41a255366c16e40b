"""Globally adaptive Gauss-Kronrod (7/15) quadrature for smooth-ish integrands.

Endpoint singularities are the caller's job: :func:`integrate_from_anchor`
applies a power substitution ``t = L v**k`` that cancels an algebraic
singularity ``t**a`` when ``k = 1 / (1 + a)``.
"""

from __future__ import annotations

import heapq
from typing import Callable

import numpy as np

__all__ = ["QuadratureResult", "integrate", "integrate_from_anchor", "substitution_power"]

_XGK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])

# 15 abscissae on [-1, 1]; Gauss points are the odd entries of _XGK.
_NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])
_KRONROD = np.concatenate([_WGK[:-1], _WGK[::-1]])
_GAUSS = np.zeros(15)
_GAUSS[1:7:2] = _WG[:3]
_GAUSS[7] = _WG[3]
_GAUSS[9:14:2] = _WG[2::-1]


class QuadratureResult(float):
    """A float carrying the error estimate and evaluation count."""

    error: float
    evaluations: int
    converged: bool

    def __new__(cls, value, error, evaluations, converged):
        obj = super().__new__(cls, value)
        obj.error = error
        obj.evaluations = evaluations
        obj.converged = converged
        return obj


def _gk15(f, a: float, b: float):
    c = 0.5 * (a + b)
    h = 0.5 * (b - a)
    fx = np.asarray(f(c + h * _NODES))
    k = h * np.dot(_KRONROD, fx)
    g = h * np.dot(_GAUSS, fx)
    return k, abs(k - g)


def integrate(
    f: Callable[[np.ndarray], np.ndarray],
    a: float,
    b: float,
    *,
    rtol: float = 1e-11,
    atol: float = 1e-14,
    limit: int = 2000,
):
    """Integrate a vectorised ``f`` over the finite interval ``[a, b]``.

    Bisects the panel with the largest error estimate until the summed error
    is below ``max(atol, rtol * |I|)``.  ``f`` may be complex valued; the
    result is then a plain ``complex``.
    """
    value, err = _gk15(f, a, b)
    panels = [(-err, a, b, value)]
    total, total_err = value, err
    evaluations = 15
    while total_err > max(atol, rtol * abs(total)) and len(panels) < limit:
        neg_err, lo, hi, v = heapq.heappop(panels)
        mid = 0.5 * (lo + hi)
        v1, e1 = _gk15(f, lo, mid)
        v2, e2 = _gk15(f, mid, hi)
        evaluations += 30
        heapq.heappush(panels, (-e1, lo, mid, v1))
        heapq.heappush(panels, (-e2, mid, hi, v2))
        # re-summing avoids drift from incremental updates
        total = sum(p[3] for p in panels)
        total_err = sum(-p[0] for p in panels)
    converged = total_err <= max(atol, rtol * abs(total))
    if np.iscomplexobj(total):
        return complex(total)
    return QuadratureResult(float(total), float(total_err), evaluations, converged)


def substitution_power(a: float | None) -> float:
    """Exponent ``k`` for ``t = L v**k`` given local behaviour ``t**a``; ``None`` means ``log t``."""
    if a is None:
        return 4.0
    if a <= -1:
        raise ValueError(f"t**{a} is not integrable at the anchor")
    return 1.0 / (1.0 + a) if a < 0 else 2.0


def integrate_from_anchor(F, length: float, k: float, **kw):
    """``int_0^length F(t) dt`` through ``t = length * v**k``, ``v`` in ``[0, 1]``.

    ``F`` receives the exact distance ``t`` from the anchor, so callers can
    evaluate near-singular expressions without cancellation.
    """
    if length <= 0:
        return 0.0

    def g(v):
        t = length * v**k
        return F(t) * (length * k * v ** (k - 1.0))

    return integrate(g, 0.0, 1.0, **kw)
