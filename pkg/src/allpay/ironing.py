"""Ironing of the maximum-payment virtual value in quantile space.

Sample R(q) = integral from 0 to q of psi_n(F^-1(t)) dt, take the lower
convex envelope of the sampled curve, and read the ironed virtual value
psi_bar off the envelope's slope.  Where the envelope lies strictly below R
the slope is constant: those quantile runs map to the ironed value
intervals on which tied agents split the reward.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .distributions import Distribution
from .errors import OutOfSupportError
from .numerics import bisect_root
from .virtual_values import _psi

DEFAULT_IRON_GRID_SIZE = 8192
# quantile grid is clipped away from 0 and 1 so quantile() stays finite
Q_CLIP = 1e-10
# envelope gaps below this fraction of max|R| are float residue, not ironing
GAP_RTOL = 1e-9


@dataclass(frozen=True, eq=False)
class QuantileCurve:
    """The antiderivative of psi_n against quantiles, with its samples."""

    d: Distribution
    n: int
    q: np.ndarray        # strictly increasing grid in (0, 1)
    values: np.ndarray   # quantile(q)
    psi: np.ndarray      # integrand samples psi_n(values)
    R: np.ndarray        # trapezoid cumulative integral, R[0] = 0


@dataclass(frozen=True, eq=False)
class IronedCurve:
    """Lower convex envelope of R and the quantities read off it."""

    curve: QuantileCurve
    envelope: np.ndarray
    psi_bar: np.ndarray
    ironed_intervals: tuple[tuple[float, float], ...]  # value space [l, u]

    def ironed_q_intervals(self) -> tuple[tuple[float, float], ...]:
        d = self.curve.d
        return tuple((float(d.cdf(l)), float(d.cdf(u))) for l, u in self.ironed_intervals)


def antiderivative_in_quantile(d: Distribution, n: int,
                               grid_size: int = DEFAULT_IRON_GRID_SIZE) -> QuantileCurve:
    """Trapezoidal cumulative integral of t -> psi_n(quantile(t))."""
    if grid_size < 256:
        raise OutOfSupportError(f"grid_size must be >= 256, got {grid_size}")
    q = np.linspace(Q_CLIP, 1.0 - Q_CLIP, grid_size)
    values = np.asarray(d.quantile(q), dtype=float)
    psi = _psi(d, n, values)
    increments = 0.5 * (psi[:-1] + psi[1:]) * np.diff(q)
    R = np.concatenate([[0.0], np.cumsum(increments)])
    return QuantileCurve(d=d, n=n, q=q, values=values, psi=psi, R=R)


def _lower_hull_indices(x: np.ndarray, y: np.ndarray) -> list[int]:
    """Monotone-chain lower hull of points already sorted by x."""
    hull: list[int] = []
    for i in range(len(x)):
        while len(hull) >= 2:
            j, k = hull[-2], hull[-1]
            # pop while the middle point k lies on or above chord j->i
            if (y[k] - y[j]) * (x[i] - x[k]) >= (y[i] - y[k]) * (x[k] - x[j]):
                hull.pop()
            else:
                break
        hull.append(i)
    return hull


def convex_envelope(curve: QuantileCurve) -> IronedCurve:
    """Lower convex envelope of the sampled R, its slope, and ironed intervals."""
    q, R = curve.q, curve.R
    hull = _lower_hull_indices(q, R)
    envelope = np.interp(q, q[hull], R[hull])

    # slope by centered differences: matches psi on contact regions to O(h^2)
    psi_bar = np.empty_like(R)
    psi_bar[1:-1] = (envelope[2:] - envelope[:-2]) / (q[2:] - q[:-2])
    psi_bar[0] = (envelope[1] - envelope[0]) / (q[1] - q[0])
    psi_bar[-1] = (envelope[-1] - envelope[-2]) / (q[-1] - q[-2])

    gap = R - envelope
    threshold = GAP_RTOL * max(np.max(np.abs(R)), 1e-300)
    ironed = gap > threshold
    intervals = []
    i = 0
    while i < len(q):
        if ironed[i]:
            j = i
            while j + 1 < len(q) and ironed[j + 1]:
                j += 1
            ql = _refine_boundary(curve, envelope, i - 1, threshold) if i > 0 else q[0]
            qu = _refine_boundary(curve, envelope, j, threshold) if j + 1 < len(q) else q[-1]
            intervals.append((float(curve.d.quantile(ql)), float(curve.d.quantile(qu))))
            i = j + 1
        else:
            i += 1
    return IronedCurve(curve=curve, envelope=envelope, psi_bar=psi_bar,
                       ironed_intervals=tuple(intervals))


def _refine_boundary(curve: QuantileCurve, envelope: np.ndarray,
                     cell: int, threshold: float) -> float:
    """Bisect where R - envelope crosses the ironing threshold inside a cell.

    R between nodes is extended with a local trapezoid using the exact psi,
    consistent with how the samples were accumulated.
    """
    q, R, psi, d, n = curve.q, curve.R, curve.psi, curve.d, curve.n
    q0, q1 = q[cell], q[cell + 1]
    slope = (envelope[cell + 1] - envelope[cell]) / (q1 - q0)

    def gap_minus_threshold(t: float) -> float:
        psival = float(_psi(d, n, np.asarray(d.quantile(t))))
        r_local = R[cell] + 0.5 * (psi[cell] + psival) * (t - q0)
        env_local = envelope[cell] + slope * (t - q0)
        return (r_local - env_local) - threshold

    lo, hi = gap_minus_threshold(q0), gap_minus_threshold(q1)
    if lo == 0.0 or np.sign(lo) == np.sign(hi):
        # threshold crossing sits on a node up to float noise
        return float(q0 if abs(lo) <= abs(hi) else q1)
    return bisect_root(gap_minus_threshold, float(q0), float(q1),
                       f_tol=threshold * 1e-3, x_tol=1e-14)


def ironed_mp_virtual_value(ic: IronedCurve, d: Distribution, n: int, v):
    """Evaluate psi_bar at q = cdf(v) by interpolation on the ironing grid."""
    arr = np.asarray(v, dtype=float)
    if not np.all((arr >= d.support_lo) & (arr <= d.support_hi)):
        raise OutOfSupportError(
            f"value(s) must lie inside [{d.support_lo}, {d.support_hi}]")
    qv = np.asarray(d.cdf(arr))
    out = np.interp(qv, ic.curve.q, ic.psi_bar)
    return float(out) if np.ndim(v) == 0 else out
