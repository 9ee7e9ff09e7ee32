"""p-adic valuations, the standard additive character, balls and cosets.

All p-adic numbers handled here are rationals: every function in scope
is locally constant, so each relevant coset has a rational
representative and no truncated digit type is needed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .exact import Cyclotomic, as_fraction, fraction_from_str, fraction_to_str, root_of_unity

INFINITY = math.inf


@lru_cache(maxsize=None)
def _is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin, valid for all 64-bit inputs."""
    if n < 2:
        return False
    for small in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % small == 0:
            return n == small
    d = n - 1
    s = 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


class Prime(int):
    """A rational prime, verified at construction."""

    _interned: dict[int, "Prime"] = {}

    def __new__(cls, value: int):
        cached = cls._interned.get(value)
        if cached is not None:
            return cached
        if not isinstance(value, int) or isinstance(value, bool) or not _is_prime(value):
            raise ValueError(f"{value!r} is not a prime")
        obj = super().__new__(cls, value)
        cls._interned[value] = obj
        return obj


def vp(x, p: int) -> int | float:
    """p-adic valuation; vp(0) = +infinity, |x|_p = p**(-vp(x))."""
    p = Prime(p)
    x = as_fraction(x)
    if x == 0:
        return INFINITY
    v = 0
    n = x.numerator
    while n % p == 0:
        n //= p
        v += 1
    d = x.denominator
    while d % p == 0:
        d //= p
        v -= 1
    return v


@lru_cache(maxsize=1 << 18)
def _digit_rep_cached(num: int, den: int, p: int, n: int) -> Fraction:
    x = Fraction(num, den)
    v = vp(x, p)
    if v >= n:
        return Fraction(0)
    m = n - int(v)
    unit = x / Fraction(p) ** int(v)
    t = unit.numerator * pow(unit.denominator, -1, p**m) % p**m
    return t * Fraction(p) ** int(v)


def digit_rep(x, p: int, n: int) -> Fraction:
    """Canonical representative of x modulo p^n * Z_p.

    The result is the unique rational sum(d_i * p^i) with digits
    d_i in {0, ..., p-1} over i from vp(x) to n-1; zero if x lies in
    p^n * Z_p already.
    """
    x = as_fraction(x)
    return _digit_rep_cached(x.numerator, x.denominator, Prime(p), n)


def frac_p(x, p: int) -> Fraction:
    """p-adic fractional part: r in [0,1) with p-power denominator and x - r in Z_p."""
    return digit_rep(x, p, 0)


@lru_cache(maxsize=1 << 18)
def _psi_cached(num: int, den: int, p: int) -> Cyclotomic:
    return root_of_unity(_digit_rep_cached(num, den, p, 0))


def psi_p(x, p: int) -> Cyclotomic:
    """The standard additive character of Q_p: trivial on Z_p, e(1/p^n) at p^-n."""
    x = as_fraction(x)
    return _psi_cached(x.numerator, x.denominator, Prime(p))


@dataclass(frozen=True)
class PadicBall:
    """The ball center + p^level * Z_p, with the center in canonical digit form."""

    p: int
    center: Fraction
    level: int

    def __post_init__(self):
        p = Prime(self.p)
        object.__setattr__(self, "p", int(p))
        object.__setattr__(self, "center", digit_rep(self.center, p, self.level))

    def contains(self, x) -> bool:
        return vp(as_fraction(x) - self.center, self.p) >= self.level

    def volume(self) -> Fraction:
        """Additive Haar measure, normalized so Z_p has volume 1."""
        return Fraction(self.p) ** (-self.level)

    def children(self) -> list["PadicBall"]:
        """The p disjoint sub-balls of the next level."""
        p, n = self.p, self.level
        step = Fraction(p) ** n
        return [PadicBall(p, self.center + d * step, n + 1) for d in range(p)]

    def parent(self) -> "PadicBall":
        return PadicBall(self.p, self.center, self.level - 1)

    def to_json(self) -> dict:
        return {"p": self.p, "center": fraction_to_str(self.center), "level": self.level}

    @classmethod
    def from_json(cls, data: dict) -> "PadicBall":
        return cls(int(data["p"]), fraction_from_str(data["center"]), int(data["level"]))


def ball_contains(ball: PadicBall, x) -> bool:
    """Membership test: vp(x - center) >= level."""
    return ball.contains(x)


@lru_cache(maxsize=None)
def _unit_reps_cached(p: int, k: int) -> tuple[int, ...]:
    return tuple(a for a in range(1, p**k + 1) if a % p != 0)


def unit_coset_reps(p: int, k: int) -> list[int]:
    """Integer representatives of Z_p^x modulo 1 + p^k Z_p.

    Returns the phi(p^k) integers in [1, p^k] coprime to p.  Each coset
    has multiplicative volume 1 / ((p-1) p^(k-1)) under vol(Z_p^x) = 1.
    """
    p = Prime(p)
    if k < 1:
        raise ValueError("coset level k must be >= 1")
    return list(_unit_reps_cached(int(p), k))


def unit_coset_volume(p: int, k: int) -> Fraction:
    """Multiplicative volume of one coset of 1 + p^k Z_p inside Z_p^x."""
    p = Prime(p)
    if k < 1:
        raise ValueError("coset level k must be >= 1")
    return Fraction(1, (p - 1) * p ** (k - 1))
