"""Continuous skill/value distributions.

Every family exposes the same vectorized surface: ``cdf``, ``pdf``, ``sf``
(survival, computed stably per family), ``quantile``, support bounds,
interior ``breakpoints`` where the density jumps, and inverse-transform
sampling from a caller-owned generator.  Instances are frozen dataclasses:
immutable, hashable and safe to share across threads.

Families are built from a serializable :class:`DistributionSpec` with a JSON
shape of ``{"kind": ..., "params": {...}}``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import InvalidParameterError

# Unbounded supports are cut at this quantile for quadrature and envelope
# work; the discarded tail mass is far below every tolerance in the package.
TRUNCATION_QUANTILE = 1.0 - 1e-10


def _as_array(x):
    return np.asarray(x, dtype=float)


@dataclass(frozen=True)
class Distribution:
    """Common behaviour for all families; subclasses fill the math."""

    @property
    def support_lo(self) -> float:
        raise NotImplementedError

    @property
    def support_hi(self) -> float:
        raise NotImplementedError

    def cdf(self, x):
        raise NotImplementedError

    def pdf(self, x):
        raise NotImplementedError

    def sf(self, x):
        """Survival 1 - cdf, computed without cancellation near the top."""
        raise NotImplementedError

    def quantile(self, q):
        raise NotImplementedError

    def breakpoints(self) -> tuple[float, ...]:
        """Interior points where the density jumps (quadrature must split)."""
        return ()

    @property
    def upper_limit(self) -> float:
        """Finite top end used by quadrature: support top, or the truncation
        quantile for unbounded supports."""
        hi = self.support_hi
        if math.isinf(hi):
            return float(self.quantile(TRUNCATION_QUANTILE))
        return hi

    def sample(self, rng: np.random.Generator, size=None):
        """Inverse-transform draw(s); the caller owns the generator state."""
        return self.quantile(rng.random(size))

    def spec(self) -> "DistributionSpec":
        raise NotImplementedError

    def contains(self, v, strict: bool = False) -> bool:
        arr = _as_array(v)
        if strict:
            return bool(np.all((arr > self.support_lo) & (arr < self.support_hi)))
        return bool(np.all((arr >= self.support_lo) & (arr <= self.support_hi)))


@dataclass(frozen=True)
class Uniform(Distribution):
    a: float
    b: float

    def __post_init__(self):
        if not (self.a < self.b):
            raise InvalidParameterError(f"uniform requires a < b, got a={self.a}, b={self.b}")

    @property
    def support_lo(self):
        return self.a

    @property
    def support_hi(self):
        return self.b

    def cdf(self, x):
        return np.clip((_as_array(x) - self.a) / (self.b - self.a), 0.0, 1.0)

    def sf(self, x):
        return np.clip((self.b - _as_array(x)) / (self.b - self.a), 0.0, 1.0)

    def pdf(self, x):
        x = _as_array(x)
        inside = (x >= self.a) & (x <= self.b)
        return np.where(inside, 1.0 / (self.b - self.a), 0.0)

    def quantile(self, q):
        return self.a + _as_array(q) * (self.b - self.a)

    def spec(self):
        return DistributionSpec("uniform", {"a": self.a, "b": self.b})


@dataclass(frozen=True)
class Exponential(Distribution):
    rate: float

    def __post_init__(self):
        if not self.rate > 0:
            raise InvalidParameterError(f"exponential requires rate > 0, got {self.rate}")

    @property
    def support_lo(self):
        return 0.0

    @property
    def support_hi(self):
        return math.inf

    def cdf(self, x):
        x = _as_array(x)
        return np.where(x > 0, -np.expm1(-self.rate * np.maximum(x, 0.0)), 0.0)

    def sf(self, x):
        x = _as_array(x)
        return np.where(x > 0, np.exp(-self.rate * np.maximum(x, 0.0)), 1.0)

    def pdf(self, x):
        x = _as_array(x)
        return np.where(x >= 0, self.rate * np.exp(-self.rate * np.maximum(x, 0.0)), 0.0)

    def quantile(self, q):
        return -np.log1p(-_as_array(q)) / self.rate

    def spec(self):
        return DistributionSpec("exponential", {"rate": self.rate})


@dataclass(frozen=True)
class Power(Distribution):
    """cdf x**alpha on [0, 1]."""

    alpha: float

    def __post_init__(self):
        if not self.alpha > 0:
            raise InvalidParameterError(f"power requires alpha > 0, got {self.alpha}")

    @property
    def support_lo(self):
        return 0.0

    @property
    def support_hi(self):
        return 1.0

    def cdf(self, x):
        return np.clip(_as_array(x), 0.0, 1.0) ** self.alpha

    def sf(self, x):
        x = np.clip(_as_array(x), 0.0, 1.0)
        # 1 - x**alpha without cancellation as x -> 1
        with np.errstate(divide="ignore"):
            out = -np.expm1(self.alpha * np.log(x))
        return np.where(x == 0.0, 1.0, out)

    def pdf(self, x):
        x = _as_array(x)
        inside = (x >= 0) & (x <= 1)
        with np.errstate(divide="ignore", invalid="ignore"):
            val = self.alpha * np.maximum(x, 0.0) ** (self.alpha - 1.0)
        return np.where(inside, val, 0.0)

    def quantile(self, q):
        return _as_array(q) ** (1.0 / self.alpha)

    def spec(self):
        return DistributionSpec("power", {"alpha": self.alpha})


@dataclass(frozen=True)
class PiecewiseUniformMixture(Distribution):
    """Mixture of uniform segments; stored as ((lo, hi, weight), ...).

    Segments must be contiguous so the density stays strictly positive on the
    whole support interval.
    """

    segments: tuple[tuple[float, float, float], ...]

    def __post_init__(self):
        segs = tuple((float(a), float(b), float(w)) for a, b, w in self.segments)
        object.__setattr__(self, "segments", segs)
        if not segs:
            raise InvalidParameterError("mixture requires at least one segment")
        total = 0.0
        for i, (a, b, w) in enumerate(segs):
            if not a < b:
                raise InvalidParameterError(f"mixture segment {i} requires lo < hi, got [{a}, {b}]")
            if not w > 0:
                raise InvalidParameterError(f"mixture segment {i} weight must be positive, got {w}")
            if i > 0 and abs(a - segs[i - 1][1]) > 1e-12:
                raise InvalidParameterError(
                    f"mixture segments must be contiguous and ordered; segment {i} "
                    f"starts at {a} but the previous ends at {segs[i - 1][1]}")
            total += w
        if abs(total - 1.0) > 1e-9:
            raise InvalidParameterError(f"mixture weights must sum to 1, got {total}")

    @property
    def _edges(self):
        return np.array([self.segments[0][0]] + [s[1] for s in self.segments])

    @property
    def _cumw(self):
        return np.concatenate([[0.0], np.cumsum([s[2] for s in self.segments])])

    @property
    def _dens(self):
        return np.array([w / (b - a) for a, b, w in self.segments])

    @property
    def support_lo(self):
        return self.segments[0][0]

    @property
    def support_hi(self):
        return self.segments[-1][1]

    def breakpoints(self):
        return tuple(s[1] for s in self.segments[:-1])

    def _segment_index(self, x):
        # boundary values belong to the right segment (measure-zero choice)
        return np.clip(np.searchsorted(self._edges, x, side="right") - 1,
                       0, len(self.segments) - 1)

    def cdf(self, x):
        x = np.clip(_as_array(x), self.support_lo, self.support_hi)
        i = self._segment_index(x)
        return self._cumw[i] + (x - self._edges[i]) * self._dens[i]

    def sf(self, x):
        x = np.clip(_as_array(x), self.support_lo, self.support_hi)
        i = self._segment_index(x)
        # accumulate mass from the right for stability near the top
        w = np.array([s[2] for s in self.segments])
        tailw = np.concatenate([np.cumsum(w[::-1])[::-1], [0.0]])
        return tailw[i + 1] + (self._edges[i + 1] - x) * self._dens[i]

    def pdf(self, x):
        x = _as_array(x)
        inside = (x >= self.support_lo) & (x <= self.support_hi)
        i = self._segment_index(np.clip(x, self.support_lo, self.support_hi))
        return np.where(inside, self._dens[i], 0.0)

    def quantile(self, q):
        q = np.clip(_as_array(q), 0.0, 1.0)
        i = np.clip(np.searchsorted(self._cumw, q, side="right") - 1,
                    0, len(self.segments) - 1)
        return self._edges[i] + (q - self._cumw[i]) / self._dens[i]

    def spec(self):
        return DistributionSpec("mixture", {"segments": [
            {"lo": a, "hi": b, "weight": w} for a, b, w in self.segments]})


@dataclass(frozen=True)
class Tabulated(Distribution):
    """Piecewise-linear cdf through sorted (value, cdf) points.

    The density is the exact derivative of the interpolant: piecewise
    constant, taking the right-segment slope at knots.
    """

    points: tuple[tuple[float, float], ...]

    def __post_init__(self):
        pts = tuple((float(v), float(q)) for v, q in self.points)
        object.__setattr__(self, "points", pts)
        if len(pts) < 2:
            raise InvalidParameterError("tabulated requires at least two points")
        v = np.array([p[0] for p in pts])
        q = np.array([p[1] for p in pts])
        if np.any(np.diff(v) <= 0):
            raise InvalidParameterError("tabulated values must be strictly increasing")
        if np.any(np.diff(q) <= 0):
            raise InvalidParameterError("tabulated cdf must be strictly increasing")
        if abs(q[0]) > 1e-12 or abs(q[-1] - 1.0) > 1e-12:
            raise InvalidParameterError("tabulated cdf must run from 0 to 1")

    @property
    def _v(self):
        return np.array([p[0] for p in self.points])

    @property
    def _q(self):
        return np.array([p[1] for p in self.points])

    @property
    def support_lo(self):
        return self.points[0][0]

    @property
    def support_hi(self):
        return self.points[-1][0]

    def breakpoints(self):
        return tuple(p[0] for p in self.points[1:-1])

    def cdf(self, x):
        return np.interp(_as_array(x), self._v, self._q)

    def sf(self, x):
        return np.interp(_as_array(x), self._v, 1.0 - self._q)

    def pdf(self, x):
        x = _as_array(x)
        v, q = self._v, self._q
        slopes = np.diff(q) / np.diff(v)
        i = np.clip(np.searchsorted(v, x, side="right") - 1, 0, len(slopes) - 1)
        inside = (x >= v[0]) & (x <= v[-1])
        return np.where(inside, slopes[i], 0.0)

    def quantile(self, q):
        return np.interp(_as_array(q), self._q, self._v)

    def spec(self):
        return DistributionSpec("tabulated", {"points": [[v, q] for v, q in self.points]})


@dataclass(frozen=True)
class DistributionSpec:
    """Serializable constructor: a kind tag plus its parameter dict."""

    kind: str
    params: dict

    def to_json(self) -> str:
        return json.dumps({"kind": self.kind, "params": self.params})

    @staticmethod
    def from_json(text: str) -> "DistributionSpec":
        data = json.loads(text)
        if not isinstance(data, dict) or "kind" not in data or "params" not in data:
            raise InvalidParameterError("distribution JSON needs 'kind' and 'params'")
        return DistributionSpec(str(data["kind"]), dict(data["params"]))


def build(spec: DistributionSpec) -> Distribution:
    """Construct a Distribution from its spec, validating parameters."""
    kind, p = spec.kind, spec.params
    try:
        if kind == "uniform":
            return Uniform(float(p["a"]), float(p["b"]))
        if kind == "exponential":
            return Exponential(float(p["rate"]))
        if kind == "power":
            return Power(float(p["alpha"]))
        if kind == "mixture":
            segs = tuple((float(s["lo"]), float(s["hi"]), float(s["weight"]))
                         for s in p["segments"])
            return PiecewiseUniformMixture(segs)
        if kind == "tabulated":
            return Tabulated(tuple((float(v), float(q)) for v, q in p["points"]))
    except KeyError as exc:
        raise InvalidParameterError(f"missing parameter {exc} for kind '{kind}'") from exc
    raise InvalidParameterError(f"unknown distribution kind '{kind}'")


def load(path_or_text: Union[str, "os.PathLike"]) -> Distribution:
    """Build a distribution from a JSON string or a path to a JSON file."""
    import os
    text = path_or_text
    if isinstance(path_or_text, os.PathLike) or (
            isinstance(path_or_text, str) and os.path.exists(path_or_text)):
        with open(path_or_text) as fh:
            text = fh.read()
    return build(DistributionSpec.from_json(text))


def quantile_grid(d: Distribution, size: int) -> np.ndarray:
    """Values at quantiles k/(size+1), k = 1..size: strictly interior and
    uniformly resolved in probability, which also covers unbounded tails."""
    q = np.arange(1, size + 1) / (size + 1.0)
    return _as_array(d.quantile(q))
