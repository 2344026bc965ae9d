"""Quadrature and root-finding primitives used throughout the package.

Everything here is deliberately simple: adaptive Simpson for one-off scalar
integrals, fixed composite Simpson for vectorized segment integrals, a
cumulative-Simpson antiderivative table for fast repeated evaluation of
running integrals, and bracketing bisection.
"""

from __future__ import annotations

from typing import Callable, Sequence

import numpy as np

from .errors import NoSignChangeError


def adaptive_simpson(f: Callable[[float], float], a: float, b: float,
                     tol: float = 1e-10, max_depth: int = 48) -> float:
    """Integrate a scalar function on [a, b] to absolute tolerance ``tol``."""
    if b <= a:
        return 0.0

    def simpson(x0, f0, x2, f2):
        x1 = 0.5 * (x0 + x2)
        f1 = f(x1)
        return x1, f1, (x2 - x0) / 6.0 * (f0 + 4.0 * f1 + f2)

    fa, fb = f(a), f(b)
    m, fm, whole = simpson(a, fa, b, fb)
    # explicit stack: (x0, f0, x1, f1, whole, eps, depth)
    stack = [(a, fa, b, fb, m, fm, whole, tol, 0)]
    total = 0.0
    while stack:
        x0, f0, x2, f2, x1, f1, whole, eps, depth = stack.pop()
        lm, flm, left = simpson(x0, f0, x1, f1)
        rm, frm, right = simpson(x1, f1, x2, f2)
        delta = left + right - whole
        if depth >= max_depth or abs(delta) <= 15.0 * eps:
            total += left + right + delta / 15.0
        else:
            stack.append((x0, f0, x1, f1, lm, flm, left, eps / 2.0, depth + 1))
            stack.append((x1, f1, x2, f2, rm, frm, right, eps / 2.0, depth + 1))
    return total


def composite_simpson(f: Callable[[np.ndarray], np.ndarray], a: float, b: float,
                      intervals: int = 2048) -> float:
    """Composite Simpson with a vectorized integrand on a single segment."""
    if b <= a:
        return 0.0
    nodes = np.linspace(a, b, intervals + 1)
    mids = 0.5 * (nodes[:-1] + nodes[1:])
    fn = np.asarray(f(nodes), dtype=float)
    fm = np.asarray(f(mids), dtype=float)
    h = (b - a) / intervals
    return float(h / 6.0 * np.sum(fn[:-1] + 4.0 * fm + fn[1:]))


def integrate_segments(f: Callable[[np.ndarray], np.ndarray],
                       breakpoints: Sequence[float],
                       intervals_per_segment: int = 2048) -> float:
    """Sum composite-Simpson integrals over consecutive segments.

    ``breakpoints`` must be sorted; segments of zero (or negative) length are
    skipped so callers can pass unfiltered breakpoint lists.
    """
    pts = [float(p) for p in breakpoints]
    total = 0.0
    for lo, hi in zip(pts[:-1], pts[1:]):
        if hi > lo:
            total += composite_simpson(f, lo, hi, intervals_per_segment)
    return total


class CumulativeIntegral:
    """Antiderivative G(v) = integral of f from ``a`` to v, evaluable on arrays.

    Node values are accumulated with per-cell Simpson (midpoint included), so
    the table is exact to O(h^5) per cell; queries add one more Simpson step
    over the partial cell.  ``breakpoints`` split the range where f has kinks
    or jumps so no cell straddles them.
    """

    def __init__(self, f: Callable[[np.ndarray], np.ndarray], a: float, b: float,
                 breakpoints: Sequence[float] = (), intervals: int = 16384):
        self.f = f
        self.a = float(a)
        self.b = float(b)
        if self.b <= self.a:
            self.nodes = np.array([self.a, self.a])
            self.cum = np.zeros(2)
            self.fnodes = np.zeros(2)
            return
        inner = sorted(p for p in breakpoints if self.a < p < self.b)
        edges = np.array([self.a, *inner, self.b])
        lengths = np.diff(edges)
        # distribute cells proportionally to length, at least 16 per segment
        counts = np.maximum(16, np.rint(intervals * lengths / lengths.sum()).astype(int))
        nodes = [np.array([self.a])]
        for (lo, hi), k in zip(zip(edges[:-1], edges[1:]), counts):
            nodes.append(np.linspace(lo, hi, k + 1)[1:])
        self.nodes = np.concatenate(nodes)
        mids = 0.5 * (self.nodes[:-1] + self.nodes[1:])
        self.fnodes = np.asarray(f(self.nodes), dtype=float)
        fmids = np.asarray(f(mids), dtype=float)
        h = np.diff(self.nodes)
        cells = h / 6.0 * (self.fnodes[:-1] + 4.0 * fmids + self.fnodes[1:])
        self.cum = np.concatenate([[0.0], np.cumsum(cells)])

    def __call__(self, v):
        arr = np.asarray(v, dtype=float)
        x = np.clip(arr, self.a, self.b)
        idx = np.searchsorted(self.nodes, x, side="right") - 1
        idx = np.clip(idx, 0, len(self.nodes) - 2)
        x0 = self.nodes[idx]
        dx = x - x0
        fmid = np.asarray(self.f(x0 + 0.5 * dx), dtype=float)
        fx = np.asarray(self.f(x), dtype=float)
        part = dx / 6.0 * (self.fnodes[idx] + 4.0 * fmid + fx)
        out = self.cum[idx] + part
        if arr.ndim == 0:
            return float(out)
        return out


def bisect_root(f: Callable[[float], float], lo: float, hi: float,
                f_tol: float = 1e-9, x_tol: float = 4e-16, max_iter: int = 200) -> float:
    """Bisection on a bracketing interval, stopping on |f| <= f_tol.

    Raises :class:`NoSignChangeError` when [lo, hi] does not bracket a root.
    """
    flo, fhi = f(lo), f(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if np.sign(flo) == np.sign(fhi):
        raise NoSignChangeError(f"no sign change on [{lo}, {hi}]")
    mid = 0.5 * (lo + hi)
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        fmid = f(mid)
        if abs(fmid) <= f_tol or (hi - lo) <= x_tol * max(1.0, abs(mid)):
            return mid
        if np.sign(fmid) == np.sign(flo):
            lo, flo = mid, fmid
        else:
            hi = mid
    return mid
