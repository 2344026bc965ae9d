"""Virtual values, hazard rates, reserves and regularity diagnostics.

Two virtual value functions drive everything downstream: the revenue one,
phi(v) = v - (1 - F(v)) / f(v), and the maximum-payment one for n agents,

    psi_n(z) = z F(z)^(n-1) - (1 - F(z)^n) / (n f(z)).

A distribution is regular for an objective when the matching virtual value
is nondecreasing; the optimal contest then reduces to a reserve rule with
the reserve at the virtual value's zero.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .distributions import Distribution, quantile_grid
from .errors import NoSignChangeError, OutOfSupportError
from .numerics import bisect_root

DEFAULT_GRID_SIZE = 4096
# slack absorbing float noise in adjacent-difference monotonicity verdicts
MONOTONE_SLACK = 1e-9


def _check_inside(d: Distribution, v, allow_top: bool = False) -> np.ndarray:
    arr = np.asarray(v, dtype=float)
    hi_ok = arr <= d.support_hi if allow_top else arr < d.support_hi
    if not np.all((arr > d.support_lo) & hi_ok):
        raise OutOfSupportError(
            f"value(s) must lie strictly inside ({d.support_lo}, {d.support_hi})")
    return arr


def _phi(d: Distribution, v) -> np.ndarray:
    return np.asarray(v, dtype=float) - np.asarray(d.sf(v)) / np.asarray(d.pdf(v))


def _psi(d: Distribution, n: int, v) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    F = np.asarray(d.cdf(v))
    # (1 - F^n) written as (1-F) * sum F^j to stay stable as F -> 1
    geom = np.zeros_like(F)
    for j in range(n):
        geom += F ** j
    return v * F ** (n - 1) - np.asarray(d.sf(v)) * geom / (n * np.asarray(d.pdf(v)))


def revenue_virtual_value(d: Distribution, v):
    """phi(v) = v - (1 - F(v)) / f(v); v strictly inside the support."""
    arr = _check_inside(d, v)
    out = _phi(d, arr)
    return float(out) if np.ndim(v) == 0 else out


def mp_virtual_value(d: Distribution, n: int, v):
    """psi_n(v); n >= 1, v strictly inside the support.  psi_1 == phi."""
    if n < 1:
        raise OutOfSupportError(f"n must be >= 1, got {n}")
    arr = _check_inside(d, v)
    out = _psi(d, n, arr)
    return float(out) if np.ndim(v) == 0 else out


def hazard_rate(d: Distribution, v):
    """h(v) = f(v) / (1 - F(v)); requires cdf(v) < 1."""
    arr = _check_inside(d, v)
    sf = np.asarray(d.sf(arr))
    if np.any(sf <= 0.0):
        raise OutOfSupportError("hazard rate undefined where cdf(v) = 1")
    out = np.asarray(d.pdf(arr)) / sf
    return float(out) if np.ndim(v) == 0 else out


def _largest_upcrossing_root(grid: np.ndarray, values: np.ndarray, f) -> float:
    """Bisect in the last grid cell where values cross from < 0 to >= 0."""
    neg = values[:-1] < 0.0
    nonneg = values[1:] >= 0.0
    cells = np.nonzero(neg & nonneg)[0]
    if len(cells) == 0:
        raise NoSignChangeError("no sign change of the virtual value on the grid")
    i = cells[-1]
    return bisect_root(f, float(grid[i]), float(grid[i + 1]), f_tol=1e-9)


def monopoly_reserve_value(d: Distribution, grid_size: int = DEFAULT_GRID_SIZE) -> float:
    """Zero of phi: the revenue-optimal reserve value for regular distributions."""
    grid = quantile_grid(d, grid_size)
    return _largest_upcrossing_root(grid, _phi(d, grid),
                                    lambda v: float(_phi(d, v)))


def mp_reserve_value(d: Distribution, n: int, grid_size: int = DEFAULT_GRID_SIZE) -> float:
    """Largest zero of psi_n, so that psi_n >= 0 above the returned value."""
    grid = quantile_grid(d, grid_size)
    return _largest_upcrossing_root(grid, _psi(d, n, grid),
                                    lambda v: float(_psi(d, n, v)))


def _nondecreasing(values: np.ndarray) -> bool:
    return bool(np.all(np.diff(values) >= -MONOTONE_SLACK))


@dataclass(frozen=True, eq=False)
class VirtualValueReport:
    """Sampled phi/psi/hazard curves plus regularity verdicts on one grid."""

    n: int
    grid: np.ndarray
    phi: np.ndarray
    psi: np.ndarray
    hazard: np.ndarray
    regular_for_revenue: bool
    n_regular_for_mp: bool
    mhr: bool
    psi_nonneg_from: float | None

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "regular_for_revenue": self.regular_for_revenue,
            "n_regular_for_mp": self.n_regular_for_mp,
            "mhr": self.mhr,
            "psi_nonneg_from": self.psi_nonneg_from,
            "grid": self.grid.tolist(),
            "phi": self.phi.tolist(),
            "psi": self.psi.tolist(),
            "hazard": self.hazard.tolist(),
        }


def analyze(d: Distribution, n: int, grid_size: int = DEFAULT_GRID_SIZE) -> VirtualValueReport:
    """Fill a VirtualValueReport on a quantile-equispaced grid."""
    if grid_size < 64:
        raise OutOfSupportError(f"grid_size must be >= 64, got {grid_size}")
    grid = quantile_grid(d, grid_size)
    phi = _phi(d, grid)
    psi = _psi(d, n, grid)
    hazard = np.asarray(d.pdf(grid)) / np.asarray(d.sf(grid))
    nonneg = np.nonzero(psi >= 0.0)[0]
    return VirtualValueReport(
        n=n,
        grid=grid,
        phi=phi,
        psi=psi,
        hazard=hazard,
        regular_for_revenue=_nondecreasing(phi),
        n_regular_for_mp=_nondecreasing(psi),
        mhr=_nondecreasing(hazard),
        psi_nonneg_from=float(grid[nonneg[0]]) if len(nonneg) else None,
    )
