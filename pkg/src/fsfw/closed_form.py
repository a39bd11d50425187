"""Limit constants and the bag-count law for the d-regular tree times a weighted edge."""

from __future__ import annotations

import math
from dataclasses import dataclass

DEFAULT_M_MAX = 64


class ConsistencyError(RuntimeError):
    """A derived constant left the range the theory guarantees."""


def _check(d, w):
    if isinstance(d, bool) or not isinstance(d, int):
        raise TypeError("d must be an integer")
    if d < 3:
        raise ValueError(f"d must be at least 3, got {d}")
    w = float(w)
    if not (w > 0 and math.isfinite(w)):
        raise ValueError(f"w must be positive and finite, got {w}")
    return w


def edge_probability_c(d: int, w: float) -> float:
    """Positive root of ``c^2 + c(2w + d - 2) - 2w = 0``.

    Evaluated as ``4w / (b + sqrt(b^2 + 8w))`` with ``b = 2w + d - 2``,
    which avoids subtracting nearly equal numbers when ``w`` is large.
    """
    w = _check(d, w)
    b = 2 * w + d - 2
    return 4 * w / (b + math.sqrt(b * b + 8 * w))


def quadratic_residual(c_val: float, d: int, w: float) -> float:
    return c_val * c_val + c_val * (2 * w + d - 2) - 2 * w


def ratio_s(d: int, w: float) -> float:
    """Limit of ``a_{n-1}^{d-1} / a_n``: ``c / (w (2 + c/w)^(d-1))``."""
    w = _check(d, w)
    c = edge_probability_c(d, w)
    return c / (w * (2 + c / w) ** (d - 1))


def geometric_ratio(d: int, w: float) -> float:
    """``r = (d-1) c / (2w + c)``, the per-bag decay of the bag-count law."""
    w = _check(d, w)
    c = edge_probability_c(d, w)
    r = (d - 1) * c / (2 * w + c)
    if not 0 < r < 1:
        raise ConsistencyError(f"geometric ratio {r} outside (0, 1) for d={d}, w={w}")
    return r


def _k_constant(d, w, c):
    return d * (2 * w + c) ** 2 / ((2 * w + 2 * c) * (d - 1) ** 2)


@dataclass(frozen=True)
class FsfConstants:
    d: int
    w: float
    c: float
    s: float
    r: float
    K: float

    @property
    def q1(self) -> float:
        return (2 * self.w + self.c) * self.c / (2 * self.w + 2 * self.c)

    def total_mass(self) -> float:
        """``q_1 + K r^2 / (1 - r)``; equals 1 up to rounding."""
        return self.q1 + self.K * self.r**2 / (1 - self.r)


def fsf_constants(d: int, w: float) -> FsfConstants:
    w = _check(d, w)
    c = edge_probability_c(d, w)
    return FsfConstants(d=d, w=w, c=c, s=ratio_s(d, w), r=geometric_ratio(d, w), K=_k_constant(d, w, c))


@dataclass(frozen=True)
class DistanceDistribution:
    """``q[m-1]`` is the probability that the root-bag path uses ``m`` bags."""

    d: int
    w: float
    q: tuple[float, ...]
    m_max: int
    tail: float

    def __getitem__(self, m: int) -> float:
        if not 1 <= m <= self.m_max:
            raise IndexError(f"m={m} outside 1..{self.m_max}")
        return self.q[m - 1]

    def total(self) -> float:
        return math.fsum(self.q) + self.tail


def distance_distribution(d: int, w: float, m_max: int = DEFAULT_M_MAX) -> DistanceDistribution:
    if isinstance(m_max, bool) or not isinstance(m_max, int) or m_max < 1:
        raise ValueError(f"m_max must be a positive integer, got {m_max!r}")
    k = fsf_constants(d, w)
    q = [k.q1] + [k.K * k.r**m for m in range(2, m_max + 1)]
    tail = k.K * k.r ** (m_max + 1) / (1 - k.r)
    return DistanceDistribution(d=d, w=k.w, q=tuple(q), m_max=m_max, tail=tail)


def closed_form_report(d: int, w: float, m_max: int = DEFAULT_M_MAX) -> dict:
    k = fsf_constants(d, w)
    dist = distance_distribution(d, w, m_max)
    return {
        "d": d,
        "w": k.w,
        "c": k.c,
        "s": k.s,
        "r": k.r,
        "K": k.K,
        "m_max": m_max,
        "q": list(dist.q),
        "tail": dist.tail,
        "residuals": {
            "quadratic": quadratic_residual(k.c, d, k.w),
            "s_identity": k.s * (2 + k.c / k.w) ** (d - 1) * k.w - k.c,
            "total_mass": dist.total() - 1.0,
            "closed_tail_mass": k.total_mass() - 1.0,
        },
    }
