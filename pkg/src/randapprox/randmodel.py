"""Lazy, reproducible realisation of the random numerator sets P_n.

Membership of each pair (n, a) is decided by a counter-based 64-bit hash of
(seed, n, a) compared with the integer threshold floor(p_n * 2**64), so any
single pair can be queried in O(1) without materialising anything else.

PRF64 (version ``splitmix64-chain/1``; constants frozen)::

    mix(z)  = SplitMix64 finaliser:
              z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
              z = (z ^ (z >> 27)) * 0x94D049BB133111EB
              z =  z ^ (z >> 31)                       (all mod 2**64)
    key     = mix(seed + n * 0x9E3779B97F4A7C15)
    PRF64   = mix(key  + a * 0xC2B2AE3D27D4EB4F)

The pair n = 0 is reserved for derived streams: trial seeds are
PRF64(base, 0, t) and the random partition arc of a trial is drawn from
PRF64(trial_seed, 0, 0).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import InputError
from .numtheory import NumeratorSet, gcd_bound, s_mask
from .sequences import SCALE, ProbSpec, p_threshold

PRF_VERSION = "splitmix64-chain/1"

MASK64 = (1 << 64) - 1
GAMMA_N = 0x9E3779B97F4A7C15
GAMMA_A = 0xC2B2AE3D27D4EB4F
_M1 = 0xBF58476D1CE4E5B9
_M2 = 0x94D049BB133111EB


def _mix(z: int) -> int:
    z = ((z ^ (z >> 30)) * _M1) & MASK64
    z = ((z ^ (z >> 27)) * _M2) & MASK64
    return z ^ (z >> 31)


def prf64(seed: int, n: int, a: int) -> int:
    """Reference scalar PRF64."""
    key = _mix((seed + n * GAMMA_N) & MASK64)
    return _mix((key + a * GAMMA_A) & MASK64)


_U30, _U27, _U31 = np.uint64(30), np.uint64(27), np.uint64(31)


def _mix_array(z: np.ndarray) -> np.ndarray:
    z = (z ^ (z >> _U30)) * np.uint64(_M1)
    z = (z ^ (z >> _U27)) * np.uint64(_M2)
    return z ^ (z >> _U31)


def prf64_array(seed, n, a) -> np.ndarray:
    """Vectorised PRF64; arguments broadcast like numpy arrays."""
    with np.errstate(over="ignore"):
        s = np.asarray(seed, dtype=np.uint64)
        nn = np.asarray(n, dtype=np.uint64)
        aa = np.asarray(a, dtype=np.uint64)
        key = _mix_array(s + nn * np.uint64(GAMMA_N))
        return _mix_array(key + aa * np.uint64(GAMMA_A))


def below_threshold(h: np.ndarray, threshold) -> np.ndarray:
    """h < threshold for uint64 hashes; thresholds may equal 2**64 (always true)."""
    thr = np.asarray(threshold, dtype=object)
    if thr.ndim == 0:
        t = int(thr)
        if t >= SCALE:
            return np.ones(np.shape(h), dtype=bool)
        return h < np.uint64(t)
    sat = np.array([int(t) >= SCALE for t in thr.ravel()]).reshape(thr.shape)
    capped = np.array([min(int(t), MASK64) for t in thr.ravel()], dtype=np.uint64).reshape(thr.shape)
    return (h < capped) | sat


def trial_seed(base_seed: int, t: int) -> int:
    return prf64(base_seed, 0, t)


def trial_seeds(base_seed: int, trials: int, start: int = 0) -> np.ndarray:
    return prf64_array(base_seed, 0, np.arange(start, start + trials, dtype=np.uint64))


def uniform_index(h, m: int):
    """Map 64-bit hashes to {0, ..., m-1} by the high-product rule floor(h*m / 2**64)."""
    if isinstance(h, (int, np.integer)):
        return (int(h) * m) >> 64
    return np.array([(int(x) * m) >> 64 for x in np.asarray(h).ravel()], dtype=np.int64).reshape(np.shape(h))


@dataclass(frozen=True)
class MembershipOracle:
    seed: int
    p: ProbSpec
    eps: Fraction = Fraction(1)

    def __post_init__(self):
        if not 0 <= int(self.seed) <= MASK64:
            raise InputError(f"seed must be an unsigned 64-bit value, got {self.seed}")
        object.__setattr__(self, "seed", int(self.seed))
        object.__setattr__(self, "eps", Fraction(self.eps))

    def member(self, n: int, a: int) -> bool:
        if not 1 <= a <= n:
            raise InputError(f"numerator {a} outside [1, {n}]")
        return prf64(self.seed, n, a) < p_threshold(self.p, n)

    def mask_P(self, n: int) -> np.ndarray:
        """Boolean mask over a = 1..n of membership in P_n."""
        a = np.arange(1, n + 1, dtype=np.uint64)
        return below_threshold(prf64_array(self.seed, n, a), p_threshold(self.p, n))

    def sample_P(self, n: int) -> NumeratorSet:
        if n < 1:
            raise InputError(f"n must be >= 1, got {n}")
        return NumeratorSet(n, np.flatnonzero(self.mask_P(n)) + 1, kind="P")

    def sample_Q(self, n: int) -> NumeratorSet:
        if n < 1:
            raise InputError(f"n must be >= 1, got {n}")
        mask = self.mask_P(n) & s_mask(n, self.eps)
        return NumeratorSet(n, np.flatnonzero(mask) + 1, kind="Q")

    def member_Q(self, n: int, a: int) -> bool:
        return self.member(n, a) and np.gcd(a, n) <= gcd_bound(n, self.eps)


def member(o: MembershipOracle, n: int, a: int) -> bool:
    return o.member(n, a)


def sample_P(o: MembershipOracle, n: int) -> NumeratorSet:
    return o.sample_P(n)


def sample_Q(o: MembershipOracle, n: int) -> NumeratorSet:
    return o.sample_Q(n)
