"""Seeded random streams, sufficient-statistic tallies and chunked Monte Carlo."""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from statistics import NormalDist
from typing import Callable

import numpy as np

UNIFORM_BLOCK = 1 << 16
CHUNK_SIZE = 2048
CONFIDENCE = 0.99


@dataclass(frozen=True)
class RngStream:
    """A reproducible stream named by a 64-bit master seed and a stream index.

    ``child(i)`` derives further independent streams through numpy's
    ``SeedSequence`` spawn keys. The stream is a value: every consumer
    starts from its first draw.
    """

    seed: int
    index: int = 0
    path: tuple[int, ...] = field(default=())

    def __post_init__(self):
        if not (isinstance(self.seed, int) and 0 <= self.seed < 2**64):
            raise ValueError(f"seed must be a 64-bit unsigned integer, got {self.seed!r}")
        if not (isinstance(self.index, int) and self.index >= 0):
            raise ValueError(f"stream index must be a nonnegative integer, got {self.index!r}")

    def child(self, i: int) -> "RngStream":
        return RngStream(self.seed, self.index, self.path + (int(i),))

    def generator(self) -> np.random.Generator:
        seq = np.random.SeedSequence(self.seed, spawn_key=(self.index, *self.path))
        return np.random.Generator(np.random.PCG64(seq))

    def uniforms(self, block: int = UNIFORM_BLOCK) -> "UniformBuffer":
        return UniformBuffer(self.generator(), block)


class UniformBuffer:
    """Uniform(0,1) draws served in blocks to compiled kernels.

    Kernels read ``data[pos:]``. When they run dry, :meth:`refill` keeps the
    unread tail and appends a fresh block, so the sequence of draws does not
    depend on the block size.
    """

    def __init__(self, generator: np.random.Generator, block: int = UNIFORM_BLOCK):
        self._gen = generator
        self._block = block
        self.data = generator.random(block)
        self.pos = 0

    def refill(self) -> None:
        self.data = np.concatenate([self.data[self.pos:], self._gen.random(self._block)])
        self.pos = 0

    def take(self) -> float:
        if self.pos >= len(self.data):
            self.refill()
        x = float(self.data[self.pos])
        self.pos += 1
        return x


def as_uniforms(rng) -> UniformBuffer:
    if isinstance(rng, UniformBuffer):
        return rng
    if isinstance(rng, RngStream):
        return rng.uniforms()
    raise TypeError(f"expected RngStream or UniformBuffer, got {type(rng).__name__}")


@dataclass(frozen=True)
class EstimatorReport:
    estimate: float
    samples: int
    stderr: float
    ci_low: float
    ci_high: float
    confidence: float = CONFIDENCE

    def as_dict(self) -> dict:
        return {
            "estimate": self.estimate,
            "samples": self.samples,
            "stderr": self.stderr,
            "ci_low": self.ci_low,
            "ci_high": self.ci_high,
            "confidence": self.confidence,
        }


@dataclass
class Tally:
    """Count, sum and sum of squares; merging is associative."""

    count: int = 0
    total: float = 0.0
    total_sq: float = 0.0

    def add_array(self, values: np.ndarray) -> "Tally":
        values = np.asarray(values, dtype=np.float64)
        self.count += int(values.size)
        self.total += float(values.sum())
        self.total_sq += float(np.square(values).sum())
        return self

    def merge(self, other: "Tally") -> "Tally":
        return Tally(self.count + other.count, self.total + other.total, self.total_sq + other.total_sq)

    def report(self, confidence: float = CONFIDENCE) -> EstimatorReport:
        if self.count == 0:
            raise ValueError("no samples")
        mean = self.total / self.count
        if self.count > 1:
            var = max(self.total_sq - self.count * mean * mean, 0.0) / (self.count - 1)
        else:
            var = 0.0
        stderr = math.sqrt(var / self.count)
        z = NormalDist().inv_cdf(0.5 + confidence / 2)
        return EstimatorReport(mean, self.count, stderr, mean - z * stderr, mean + z * stderr, confidence)


def run_chunked(
    samples: int,
    rng: RngStream,
    chunk_fn: Callable[[RngStream, int], np.ndarray],
    workers: int = 1,
    chunk_size: int = CHUNK_SIZE,
) -> np.ndarray:
    """Draw ``samples`` values in fixed-size chunks, chunk ``i`` on ``rng.child(i)``.

    Results are concatenated in chunk order, so output does not depend on
    ``workers``.
    """
    if samples <= 0:
        raise ValueError(f"sample count must be positive, got {samples}")
    sizes = [min(chunk_size, samples - start) for start in range(0, samples, chunk_size)]
    jobs = [(rng.child(i), size) for i, size in enumerate(sizes)]
    if workers <= 1:
        parts = [chunk_fn(stream, size) for stream, size in jobs]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda job: chunk_fn(*job), jobs))
    return np.concatenate(parts)
