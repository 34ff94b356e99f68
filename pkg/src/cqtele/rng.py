"""Randomness plumbing.

Protocol code never owns a generator. It takes an ``rng`` handle that is
either anything with a ``random()`` method returning a uniform float in
[0, 1) (``numpy.random.Generator``, ``random.Random``, :class:`UniformStream`)
or a :class:`ForcedBranches`, which pins measurement outcomes for exhaustive
branch tests.

Per-trial streams for batch runs come from a splitmix64 mix of the run seed
and the trial index, so any trial can be regenerated on its own and results
do not depend on scheduling.
"""
from __future__ import annotations

from collections import deque
from typing import Iterable, Protocol

import numpy as np

MASK64 = (1 << 64) - 1
GOLDEN_GAMMA = 0x9E3779B97F4A7C15


class UniformSource(Protocol):
    def random(self) -> float: ...


def splitmix64(x: np.ndarray) -> np.ndarray:
    """Finalizer of the splitmix64 generator applied elementwise to uint64 values."""
    z = np.asarray(x, dtype=np.uint64) + np.uint64(GOLDEN_GAMMA)
    z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
    return z ^ (z >> np.uint64(31))


def _seed_word(seed: int) -> np.ndarray:
    if seed < 0:
        raise ValueError("seeds must be non-negative")
    return np.array([seed & MASK64], dtype=np.uint64)


def trial_keys(seed: int, indices: Iterable[int] | np.ndarray) -> np.ndarray:
    """One 64-bit key per trial index, derived from the run seed."""
    idx = np.asarray(indices, dtype=np.uint64)
    with np.errstate(over="ignore"):
        return splitmix64(splitmix64(_seed_word(seed)) + idx)


def trial_uniforms(seed: int, indices: Iterable[int] | np.ndarray, width: int) -> np.ndarray:
    """``(len(indices), width)`` array of doubles in [0, 1), one row per trial."""
    keys = trial_keys(seed, indices)[:, None]
    steps = (np.arange(1, width + 1, dtype=np.uint64) * np.uint64(GOLDEN_GAMMA))[None, :]
    with np.errstate(over="ignore"):
        words = splitmix64(keys + steps)
    return (words >> np.uint64(11)).astype(np.float64) * (1.0 / (1 << 53))


class UniformStream:
    """Replays a fixed sequence of uniform samples through ``random()``."""

    def __init__(self, samples: Iterable[float]):
        self._samples = deque(float(s) for s in samples)

    def random(self) -> float:
        if not self._samples:
            raise RuntimeError("uniform stream exhausted")
        return self._samples.popleft()


class ForcedBranches:
    """Selects measurement outcomes by index, in the order measurements happen."""

    def __init__(self, outcomes: Iterable[int]):
        self._outcomes = deque(int(o) for o in outcomes)

    def next_outcome(self) -> int:
        if not self._outcomes:
            raise RuntimeError("no forced outcome left")
        return self._outcomes.popleft()

    def random(self) -> float:
        raise TypeError("ForcedBranches only supplies measurement outcomes")


def draw(rng) -> dict:
    """Keyword arguments for :func:`cqtele.statevec.measure` from an rng handle."""
    if isinstance(rng, ForcedBranches):
        return {"outcome": rng.next_outcome()}
    return {"rand": float(rng.random())}
