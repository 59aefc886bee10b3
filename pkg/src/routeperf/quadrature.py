"""Adaptive Gauss-Kronrod quadrature with semi-infinite range support.

Finite ranges use global adaptive bisection driven by a 7/15-point
Gauss-Kronrod pair.  For an infinite upper limit the range is cut into
panels of doubling width; the horizon stops growing once the integrand
has visibly died out and the latest panel contributes less than the
requested tolerance.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from typing import Callable

__all__ = ["QuadratureSpec", "NumericError", "integrate", "DEFAULT_QUAD"]

# Kronrod abscissae (positive half, descending) and weights; the Gauss
# points are the odd-indexed entries.
_XGK = (
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
)
_WGK = (
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
)
_WG = (
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
)


class NumericError(ArithmeticError):
    """Quadrature failed to reach its tolerance.

    ``estimate`` and ``error`` carry the best value reached and its
    error bound so callers can decide whether it is still usable.
    """

    def __init__(self, message: str, estimate: float = math.nan, error: float = math.inf):
        super().__init__(f"{message} (estimate={estimate!r}, achieved error={error!r})")
        self.estimate = estimate
        self.error = error


@dataclass(frozen=True)
class QuadratureSpec:
    rel_tol: float = 1e-8
    abs_tol: float = 1e-12
    tail_cutoff_mass: float = 1e-12
    max_intervals: int = 4000
    max_panels: int = 80

    def __post_init__(self):
        for name in ("rel_tol", "abs_tol", "tail_cutoff_mass"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be strictly positive")
        if self.rel_tol > 1e-3:
            raise ValueError("rel_tol must be <= 1e-3")


DEFAULT_QUAD = QuadratureSpec()


def _gk15(f: Callable[[float], float], a: float, b: float) -> tuple[float, float]:
    center = 0.5 * (a + b)
    half = 0.5 * (b - a)
    fc = f(center)
    res_k = fc * _WGK[7]
    res_g = fc * _WG[3]
    for j in range(7):
        dx = half * _XGK[j]
        fsum = f(center - dx) + f(center + dx)
        res_k += _WGK[j] * fsum
        if j % 2 == 1:
            res_g += _WG[j // 2] * fsum
    res_k *= half
    res_g *= half
    return res_k, abs(res_k - res_g)


def _adaptive(f, a: float, b: float, quad: QuadratureSpec) -> tuple[float, float]:
    value, err = _gk15(f, a, b)
    if not math.isfinite(value):
        raise NumericError(f"non-finite integrand on [{a}, {b}]", value, err)
    heap = [(-err, a, b, value)]
    total, total_err = value, err
    n = 1
    while total_err > max(quad.abs_tol, quad.rel_tol * abs(total)):
        if n >= quad.max_intervals:
            raise NumericError("subdivision budget exhausted", total, total_err)
        neg_err, lo, hi, val = heapq.heappop(heap)
        mid = 0.5 * (lo + hi)
        if not lo < mid < hi:
            # Interval collapsed to floating-point resolution.
            raise NumericError(f"interval collapsed near {lo!r}", total, total_err)
        v1, e1 = _gk15(f, lo, mid)
        v2, e2 = _gk15(f, mid, hi)
        total += v1 + v2 - val
        total_err += e1 + e2 + neg_err
        heapq.heappush(heap, (-e1, lo, mid, v1))
        heapq.heappush(heap, (-e2, mid, hi, v2))
        n += 1
    # Re-sum to shed accumulated rounding from the running updates.
    total = math.fsum(item[3] for item in heap)
    total_err = math.fsum(-item[0] for item in heap)
    return total, total_err


def integrate(
    f: Callable[[float], float],
    lower: float,
    upper: float,
    quad: QuadratureSpec = DEFAULT_QUAD,
    scale: float = 1.0,
) -> float:
    """Integrate ``f`` from ``lower`` to ``upper`` (which may be ``math.inf``).

    ``scale`` is the width of the first panel of a semi-infinite range;
    callers pass the natural decay length of their integrand.
    """
    if math.isinf(lower):
        raise ValueError("lower limit must be finite")
    if upper == lower:
        return 0.0
    if not math.isinf(upper):
        if upper < lower:
            return -integrate(f, upper, lower, quad)
        return _adaptive(f, lower, upper, quad)[0]
    if upper < 0:
        raise ValueError("upper limit of -inf is not supported")
    if not scale > 0:
        raise ValueError("scale must be positive")

    threshold = max(quad.abs_tol, quad.tail_cutoff_mass)
    total = 0.0
    parts = []
    start, width = lower, scale
    quiet = 0
    for _ in range(quad.max_panels):
        end = start + width
        inc, _err = _adaptive(f, start, end, quad)
        parts.append(inc)
        total = math.fsum(parts)
        envelope = abs(f(end)) * width
        small = max(threshold, quad.tail_cutoff_mass * abs(total))
        if abs(inc) <= small and envelope <= small:
            quiet += 1
            if quiet >= 2:
                return total
        else:
            quiet = 0
        start, width = end, 2.0 * width
    raise NumericError("tail did not decay within the panel budget", total, abs(parts[-1]))
