"""Approximation functions psi, selection probabilities p, and their series.

Every value is frozen to an exact rational at evaluation time.  Families
that involve logarithms or irrational powers are rounded *down* to a dyadic
rational with 64 fractional bits, so everything downstream (interval
endpoints, measures, overlap sums) is exact and platform independent.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import Any, Iterable, NamedTuple

import gmpy2

from .errors import ConfigError, InsufficientDivergence

FRAC_BITS = 64
SCALE = 1 << FRAC_BITS

_MP_PREC = 192

PSI_FAMILIES = ("constant", "power", "log-power", "table")
PROB_FAMILIES = ("constant", "log-power", "totient-ratio", "table")


def parse_rational(value: Any) -> Fraction:
    """Parse "num/den", a decimal string, or an int into an exact Fraction.

    Floats are refused: configs carry numbers as strings so that nothing is
    lost to binary rounding.
    """
    if isinstance(value, bool):
        raise ConfigError(f"not a rational: {value!r}")
    if isinstance(value, (int, Fraction)):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise ConfigError(f"not a rational: {value!r}") from exc
    raise ConfigError(f"rational parameters must be strings or ints, got {value!r}")


def format_rational(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def _parse_params(params: Iterable[Any]) -> tuple[Fraction, ...]:
    return tuple(parse_rational(v) for v in params)


# -- integer kernels ---------------------------------------------------------


def _scaled_power(c: Fraction, n: int, alpha: Fraction) -> int:
    """floor(c * n**(-alpha) * 2**64), exact for rational alpha and c >= 0."""
    p, q = alpha.numerator, alpha.denominator
    num = c.numerator**q * SCALE**q
    den = c.denominator**q
    if p >= 0:
        den *= n**p
    else:
        num *= n ** (-p)
    return int(gmpy2.iroot(gmpy2.mpz(num // den), q)[0])


_MPFR_CTX = gmpy2.context(precision=_MP_PREC)


def _scaled_log_power(c: Fraction, n: int, alpha: Fraction, cap: int) -> int:
    """min(cap, floor(c * (ln n)**(-alpha) * 2**64)), evaluated in 192-bit MPFR."""
    if c == 0:
        return 0
    if n == 1:
        if alpha > 0:
            return cap
        if alpha < 0:
            return 0
        return min(cap, c.numerator * SCALE // c.denominator)
    with gmpy2.context(_MPFR_CTX):
        expo = gmpy2.mpfr(alpha.numerator) / alpha.denominator
        v = gmpy2.mpfr(c.numerator) / c.denominator * gmpy2.log(n) ** (-expo)
        k = int(gmpy2.floor(v * SCALE))
    return min(cap, k)


def _scaled_floor(x: Fraction) -> int:
    return x.numerator * SCALE // x.denominator


# -- psi ---------------------------------------------------------------------


@dataclass(frozen=True)
class PsiSpec:
    """A named family for the approximation function psi.

    ``constant``   [c]                 psi(n) = c
    ``power``      [alpha] | [c, alpha] psi(n) = c * n**(-alpha)
    ``log-power``  [alpha] | [c, alpha] psi(n) = c * (ln n)**(-alpha)
    ``table``      [v1, v2, ...]       psi(n) = v_n, and 0 past the table

    Values are clamped into [0, 1/2] (or [0, 1/4] with ``clamp_quarter``).
    """

    family: str
    params: tuple[Fraction, ...] = ()
    clamp_quarter: bool = False

    def __post_init__(self):
        object.__setattr__(self, "params", _parse_params(self.params))
        if self.family not in PSI_FAMILIES:
            raise ConfigError(f"unknown psi family {self.family!r}")
        arity = {"constant": (1,), "power": (1, 2), "log-power": (1, 2)}.get(self.family)
        if arity is not None and len(self.params) not in arity:
            raise ConfigError(f"psi family {self.family!r} takes {arity} params, got {len(self.params)}")
        if self.family == "table" and not self.params:
            raise ConfigError("psi table must be non-empty")
        if self.family in ("power", "log-power"):
            coeffs = self.params[:1] if len(self.params) == 2 else ()
        else:
            coeffs = self.params
        if any(v < 0 for v in coeffs):
            raise ConfigError(f"negative psi value in {self.params}")

    def __hash__(self):
        return hash((self.family, self.params, self.clamp_quarter))

    @property
    def cap(self) -> Fraction:
        return Fraction(1, 4) if self.clamp_quarter else Fraction(1, 2)

    def to_dict(self) -> dict:
        d = {"family": self.family, "params": [format_rational(v) for v in self.params]}
        if self.clamp_quarter:
            d["clamp_quarter"] = True
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "PsiSpec":
        if not isinstance(d, dict) or "family" not in d:
            raise ConfigError(f"psi spec must be an object with a family: {d!r}")
        return cls(d["family"], tuple(d.get("params", ())), bool(d.get("clamp_quarter", False)))


_PSI_CACHE: dict[PsiSpec, dict[int, int]] = {}


def psi_scaled(spec: PsiSpec, n: int) -> int:
    """psi(n) * 2**64 as an exact integer (psi(n) is dyadic by construction)."""
    if n < 1:
        raise ConfigError(f"psi is defined for n >= 1, got {n}")
    cache = _PSI_CACHE.setdefault(spec, {})
    k = cache.get(n)
    if k is None:
        k = cache[n] = _compute_psi_scaled(spec, n)
    return k


def psi_scaled_range(spec: PsiSpec, n0: int, n1: int) -> list[int]:
    """[psi_scaled(spec, n) for n0 <= n <= n1]."""
    if n0 < 1:
        raise ConfigError(f"psi is defined for n >= 1, got {n0}")
    cache = _PSI_CACHE.setdefault(spec, {})
    out = []
    for n in range(n0, n1 + 1):
        k = cache.get(n)
        if k is None:
            k = cache[n] = _compute_psi_scaled(spec, n)
        out.append(k)
    return out


def _compute_psi_scaled(spec: PsiSpec, n: int) -> int:
    cap = _scaled_floor(spec.cap)
    fam, prm = spec.family, spec.params
    if fam == "constant":
        k = _scaled_floor(prm[0])
    elif fam == "power":
        c, alpha = (Fraction(1), prm[0]) if len(prm) == 1 else prm
        k = _scaled_power(c, n, alpha)
    elif fam == "log-power":
        c, alpha = (Fraction(1), prm[0]) if len(prm) == 1 else prm
        return _scaled_log_power(c, n, alpha, cap)
    else:
        k = _scaled_floor(prm[n - 1]) if n <= len(prm) else 0
    return min(k, cap)


def eval_psi(spec: PsiSpec, n: int) -> Fraction:
    return Fraction(psi_scaled(spec, n), SCALE)


# -- p -----------------------------------------------------------------------


class PValue(NamedTuple):
    value: Fraction
    threshold: int  # floor(value * 2**64); 2**64 means "always selected"


@dataclass(frozen=True)
class ProbSpec:
    """A named family for the selection probabilities p_n.

    ``constant``       [c]              p_n = c
    ``log-power``      [eps] | [C, eps] p_n = min(1, C * (ln n)**(-eps))
    ``totient-ratio``  [] | [c]         p_n = c * phi(n) / n
    ``table``          [v1, v2, ...]    p_n = v_n, and 0 past the table
    """

    family: str
    params: tuple[Fraction, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "params", _parse_params(self.params))
        if self.family not in PROB_FAMILIES:
            raise ConfigError(f"unknown p family {self.family!r}")
        arity = {"constant": (1,), "log-power": (1, 2), "totient-ratio": (0, 1)}.get(self.family)
        if arity is not None and len(self.params) not in arity:
            raise ConfigError(f"p family {self.family!r} takes {arity} params, got {len(self.params)}")
        if self.family == "table" and not self.params:
            raise ConfigError("p table must be non-empty")
        if self.family == "log-power":
            if self.exponent <= 0:
                raise ConfigError(f"log-power exponent must be positive, got {self.exponent}")
            if self.decay_constant < 0:
                raise ConfigError("log-power constant must be non-negative")

    def __hash__(self):
        return hash((self.family, self.params))

    @property
    def exponent(self) -> Fraction:
        return self.params[-1]

    @property
    def decay_constant(self) -> Fraction:
        """The declared C in p_n <= C (ln n)^(-eps) (log-power family only)."""
        return Fraction(1) if len(self.params) == 1 else self.params[0]

    def to_dict(self) -> dict:
        return {"family": self.family, "params": [format_rational(v) for v in self.params]}

    @classmethod
    def from_dict(cls, d: dict) -> "ProbSpec":
        if not isinstance(d, dict) or "family" not in d:
            raise ConfigError(f"p spec must be an object with a family: {d!r}")
        return cls(d["family"], tuple(d.get("params", ())))


_P_CACHE: dict[ProbSpec, dict[int, PValue]] = {}


def _compute_p(spec: ProbSpec, n: int) -> PValue:
    fam, prm = spec.family, spec.params
    if fam == "constant":
        v = prm[0]
    elif fam == "log-power":
        v = Fraction(_scaled_log_power(spec.decay_constant, n, spec.exponent, SCALE), SCALE)
    elif fam == "totient-ratio":
        from .numtheory import totient

        c = prm[0] if prm else Fraction(1)
        v = c * Fraction(totient(n), n)
    else:
        v = prm[n - 1] if n <= len(prm) else Fraction(0)
    if not 0 <= v <= 1:
        raise ConfigError(f"p_{n} = {v} lies outside [0, 1] for {spec}")
    return PValue(v, _scaled_floor(v))


def eval_p(spec: ProbSpec, n: int) -> PValue:
    if n < 1:
        raise ConfigError(f"p is defined for n >= 1, got {n}")
    cache = _P_CACHE.setdefault(spec, {})
    v = cache.get(n)
    if v is None:
        v = cache[n] = _compute_p(spec, n)
    return v


def p_range(spec: ProbSpec, n0: int, n1: int) -> list[PValue]:
    if n0 < 1:
        raise ConfigError(f"p is defined for n >= 1, got {n0}")
    cache = _P_CACHE.setdefault(spec, {})
    out = []
    for n in range(n0, n1 + 1):
        v = cache.get(n)
        if v is None:
            v = cache[n] = _compute_p(spec, n)
        out.append(v)
    return out


def p_threshold(spec: ProbSpec, n: int) -> int:
    return eval_p(spec, n).threshold


def check_decay(spec: ProbSpec, n_max: int) -> list[int]:
    """Return every n in [2, n_max] violating p_n <= C (ln n)^(-eps).

    Only the log-power family declares a decay constant; other families
    return an empty list.
    """
    if spec.family != "log-power":
        return []
    bad = []
    for n in range(2, n_max + 1):
        bound = _scaled_log_power(spec.decay_constant, n, spec.exponent, 1 << 256)
        if eval_p(spec, n).value * SCALE > bound:
            bad.append(n)
    return bad


# -- weighted series ---------------------------------------------------------


def weight(psi: PsiSpec, p: ProbSpec, n: int) -> Fraction:
    return eval_p(p, n).value * eval_psi(psi, n)


def _running_sums(psi: PsiSpec, p: ProbSpec, start: Fraction, n_from: int, n_to: int, chunk: int = 4096):
    """Yield (n, num, den) with num/den the exact prefix sum through n, continuing from ``start``."""
    # psi is k / 2**64; carry p * k over a common denominator (times 2**64)
    acc, den = start.numerator * SCALE, start.denominator
    for lo in range(n_from, n_to + 1, chunk):
        hi = min(n_to, lo + chunk - 1)
        ks = psi_scaled_range(psi, lo, hi)
        ps = p_range(p, lo, hi)
        for n, k, pv in zip(range(lo, hi + 1), ks, ps):
            if k:
                w_num, w_den = pv.value.numerator * k, pv.value.denominator
                if den % w_den:
                    scale = w_den // gcd(den, w_den)
                    acc *= scale
                    den *= scale
                acc += w_num * (den // w_den)
            yield n, acc, den * SCALE


@dataclass
class WeightedSeries:
    """Exact prefix sums of p_n psi(n) for 1 <= n <= n_max (index 0 holds 0).

    Entries are kept as unreduced (num, den) pairs and reduced on access.
    """

    psi: PsiSpec
    p: ProbSpec
    _raw: list[tuple[int, int]] = field(default_factory=lambda: [(0, 1)])

    @classmethod
    def build(cls, psi: PsiSpec, p: ProbSpec, n_max: int) -> "WeightedSeries":
        s = cls(psi, p)
        s.extend(n_max)
        return s

    @property
    def n_max(self) -> int:
        return len(self._raw) - 1

    def extend(self, n_max: int) -> None:
        start = Fraction(*self._raw[-1])
        for _, num, den in _running_sums(self.psi, self.p, start, self.n_max + 1, n_max):
            self._raw.append((num, den))

    def at(self, n: int) -> Fraction:
        if n > self.n_max:
            self.extend(n)
        return Fraction(*self._raw[n])

    def reaches(self, n: int, target: Fraction) -> bool:
        """partial_sum(n) >= target, without building a Fraction."""
        if n > self.n_max:
            self.extend(n)
        num, den = self._raw[n]
        return num * target.denominator >= target.numerator * den


def partial_sum(psi: PsiSpec, p: ProbSpec, n: int) -> Fraction:
    """Exact sum of p_k psi(k) over 1 <= k <= n."""
    if n < 1:
        raise ConfigError(f"partial_sum needs N >= 1, got {n}")
    num, den = 0, 1
    for _, num, den in _running_sums(psi, p, Fraction(0), 1, n):
        pass
    return Fraction(num, den)


def tail_sum(psi: PsiSpec, p: ProbSpec, n0: int, n1: int) -> Fraction:
    """Exact sum of p_k psi(k) over n0 <= k <= n1."""
    num, den = 0, 1
    for _, num, den in _running_sums(psi, p, Fraction(0), n0, n1):
        pass
    return Fraction(num, den)


def sparse_sequence(psi: PsiSpec, p: ProbSpec, t_max: int, n_cap: int) -> list[int]:
    """Checkpoints N_t = least N with partial_sum(N) >= t**2, for t <= t_max.

    The list stops early (fewer than t_max entries) once N would exceed
    ``n_cap``.  Strictly increasing because each weight is at most 1/2 while
    consecutive squares differ by at least 3.
    """
    out: list[int] = []
    num, den = 0, 1
    t = 1
    for n, num, den in _running_sums(psi, p, Fraction(0), 1, n_cap):
        while t <= t_max and num >= t * t * den:
            out.append(n)
            t += 1
        if t > t_max:
            break
    if not out:
        raise InsufficientDivergence(Fraction(num, den), n_cap)
    return out
