"""Stateless counter-based random streams.

A draw is a pure function of ``(seed, family, lane, counter)``: the 64-bit SplitMix
finalizer is applied to a per-lane Weyl sequence whose increment is itself derived from
the lane key (the same construction as ``SplittableRandom.split``). Nothing is carried
between calls, so any partition of lanes over workers yields the same numbers.
"""

from __future__ import annotations

import zlib

import numpy as np
from scipy import special

__all__ = ["CounterRNG", "LaneStreams"]

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_G1 = np.uint64(0xFF51AFD7ED558CCD)
_G2 = np.uint64(0xC4CEB9FE1A85EC53)
_ONE = np.uint64(1)
_TWO_M53 = 2.0**-53


def _mix64(z):
    z = (z ^ (z >> np.uint64(30))) * _M1
    z = (z ^ (z >> np.uint64(27))) * _M2
    return z ^ (z >> np.uint64(31))


def _mix_gamma(z):
    z = (z ^ (z >> np.uint64(33))) * _G1
    z = (z ^ (z >> np.uint64(33))) * _G2
    return (z ^ (z >> np.uint64(33))) | _ONE


class CounterRNG:
    """Counter-based generator keyed by a 64-bit seed.

    ``family`` is a short string separating independent uses (e.g. outer exit paths vs
    inner paths) under the same seed.
    """

    def __init__(self, seed: int):
        self.seed = int(seed) & 0xFFFFFFFFFFFFFFFF

    def _lane_state(self, family: str, lanes):
        tag = np.uint64(zlib.crc32(family.encode()) * 0x100000001 & 0xFFFFFFFFFFFFFFFF)
        with np.errstate(over="ignore"):
            base = _mix64(np.array(self.seed, dtype=np.uint64) ^ tag)
            lanes = np.asarray(lanes, dtype=np.uint64)
            key = _mix64(base + (lanes + _ONE) * _GOLDEN)
            gamma = _mix_gamma(_mix64(key ^ tag))
        return key, gamma

    def bits(self, family: str, lanes, counters):
        """Raw 64-bit outputs; ``lanes`` and ``counters`` broadcast."""
        key, gamma = self._lane_state(family, lanes)
        counters = np.asarray(counters, dtype=np.uint64)
        with np.errstate(over="ignore"):
            return _mix64(key + (counters + _ONE) * gamma)

    def uniform(self, family: str, lanes, counters):
        """Uniforms strictly inside (0, 1) on the 2**-53 grid midpoints."""
        b = self.bits(family, lanes, counters)
        return ((b >> np.uint64(11)).astype(np.float64) + 0.5) * _TWO_M53

    def normal(self, family: str, lanes, counters):
        return special.ndtri(self.uniform(family, lanes, counters))


class LaneStreams:
    """Precomputed lane keys for a fixed block of lanes (the hot loop of the simulator)."""

    def __init__(self, rng: CounterRNG, family: str, lanes):
        self.key, self.gamma = rng._lane_state(family, lanes)

    def uniform(self, counter: int, index=None):
        key = self.key if index is None else self.key[index]
        gamma = self.gamma if index is None else self.gamma[index]
        with np.errstate(over="ignore"):
            b = _mix64(key + np.uint64(counter + 1) * gamma)
        return ((b >> np.uint64(11)).astype(np.float64) + 0.5) * _TWO_M53

    def normal(self, counter: int, index=None):
        return special.ndtri(self.uniform(counter, index))
