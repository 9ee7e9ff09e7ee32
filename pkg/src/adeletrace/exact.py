"""Exact cyclotomic arithmetic over the rationals.

Values are finite Q-linear combinations of roots of unity
e(r) = exp(2*pi*i*r) with r in Q/Z.  Every value is kept in a canonical
sparse form: write the reduced denominator of an angle as a product of
prime powers p^b and split the angle into partial fractions t_p / p^b.
The canonical condition is t_p < phi(p^b) for every p.  A violating
term is rewritten with the vanishing sum

    1 + x^{p^{b-1}} + x^{2 p^{b-1}} + ... + x^{(p-1) p^{b-1}} = 0,
    x = e(1 / p^b),

which pushes the exponent below phi(p^b) and never raises any other
prime's component.  The surviving angles index a Q-basis of the union
of all cyclotomic fields, so two values are equal iff their canonical
term maps coincide, and a value is zero iff its map is empty.

Coefficients are `fractions.Fraction`; no floats enter until
`cyclo_eval`, which returns a value together with a rounding-error
radius.
"""

from __future__ import annotations

import math
import sys
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

_EPS = sys.float_info.epsilon

#: Largest allowed denominator of any angle (= conductor contribution).
CONDUCTOR_LIMIT = 10**6


class ConductorLimitError(ValueError):
    """Raised when an operation would exceed CONDUCTOR_LIMIT."""


def as_fraction(x) -> Fraction:
    """Coerce int/Fraction input; reject floats (exactness boundary)."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    raise TypeError(f"expected a rational number, got {type(x).__name__}")


def fraction_to_str(q: Fraction) -> str:
    """Serialize a rational as "p/q", or "n" for integers."""
    q = as_fraction(q)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def fraction_from_str(s: str) -> Fraction:
    """Parse the "p/q" / "n" wire format (no floats accepted)."""
    if not isinstance(s, str):
        raise ValueError(f"expected a rational string, got {s!r}")
    try:
        return Fraction(s)
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"invalid rational {s!r}: {exc}") from None


@lru_cache(maxsize=None)
def _factorize(n: int) -> tuple[tuple[int, int], ...]:
    """Prime factorization by trial division (n stays below the cap)."""
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            e = 0
            while n % d == 0:
                e += 1
                n //= d
            out.append((d, e))
        d += 1 if d == 2 else 2
    if n > 1:
        out.append((n, 1))
    return tuple(out)


def _check_conductor(den: int) -> None:
    if den > CONDUCTOR_LIMIT:
        raise ConductorLimitError(
            f"angle denominator {den} exceeds conductor limit {CONDUCTOR_LIMIT}"
        )


@lru_cache(maxsize=None)
def _angle_expansion(num: int, den: int) -> tuple[Fraction, ...] | None:
    """None if e(num/den) is a basis angle; else the replacement angles, coeff -1 each.

    num/den must be reduced and lie in [0, 1).  Canonicality means: for
    every prime power p^b exactly dividing the denominator, the
    partial-fraction numerator t of the p-component satisfies
    t < phi(p^b).
    """
    r = Fraction(num, den)
    for p, b in _factorize(den):
        pb = p**b
        t = (num * pow(den // pb, -1, pb)) % pb
        phi = (p - 1) * p ** (b - 1)
        if t >= phi:
            s = t - phi
            return tuple(
                (r + Fraction(s + i * p ** (b - 1) - t, pb)) % 1 for i in range(p - 1)
            )
    return None


def _canonicalize(raw: dict[Fraction, Fraction]) -> dict[Fraction, Fraction]:
    """Reduce a raw angle->coefficient map to the canonical basis."""
    out: dict[Fraction, Fraction] = {}
    work = [(r % 1, c) for r, c in raw.items() if c != 0]
    while work:
        r, c = work.pop()
        _check_conductor(r.denominator)
        expansion = _angle_expansion(r.numerator, r.denominator)
        if expansion is None:
            acc = out.get(r)
            total = c if acc is None else acc + c
            if total == 0:
                out.pop(r, None)
            else:
                out[r] = total
        else:
            for r2 in expansion:
                work.append((r2, -c))
    return out


class Cyclotomic:
    """An exact finite sum of rational multiples of roots of unity.

    Instances are immutable and always canonical, so ``==`` decides
    equality of the represented complex numbers.
    """

    __slots__ = ("_terms", "_key", "_approx")

    def __init__(self, terms: dict[Fraction, Fraction] | None = None):
        self._terms = _canonicalize(terms) if terms else {}
        self._key = None
        self._approx = None

    @classmethod
    def _from_canonical(cls, terms: dict[Fraction, Fraction]) -> "Cyclotomic":
        obj = cls.__new__(cls)
        obj._terms = terms
        obj._key = None
        obj._approx = None
        return obj

    @classmethod
    def zero(cls) -> "Cyclotomic":
        return cls._from_canonical({})

    @classmethod
    def one(cls) -> "Cyclotomic":
        return cls._from_canonical({Fraction(0): Fraction(1)})

    @classmethod
    def from_rational(cls, q) -> "Cyclotomic":
        q = as_fraction(q)
        return cls._from_canonical({} if q == 0 else {Fraction(0): q})

    @property
    def terms(self) -> dict[Fraction, Fraction]:
        return dict(self._terms)

    def _sorted_items(self):
        return sorted(self._terms.items())

    @property
    def key(self) -> tuple:
        if self._key is None:
            self._key = tuple(self._sorted_items())
        return self._key

    def is_zero(self) -> bool:
        return not self._terms

    def is_rational(self) -> bool:
        return all(r == 0 for r in self._terms)

    def rational_value(self) -> Fraction:
        if not self.is_rational():
            raise ValueError("value is not rational")
        return self._terms.get(Fraction(0), Fraction(0))

    def conductor(self) -> int:
        """lcm of the angle denominators of the canonical support."""
        n = 1
        for r in self._terms:
            n = n * r.denominator // math.gcd(n, r.denominator)
        return n

    def conjugate(self) -> "Cyclotomic":
        return Cyclotomic({(-r) % 1: c for r, c in self._terms.items()})

    def abs_bound(self) -> float:
        """A rigorous float upper bound for the absolute value."""
        total = sum((abs(c) for c in self._terms.values()), Fraction(0))
        return math.nextafter(float(total), math.inf)

    def __add__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        out = dict(self._terms)
        for r, c in other._terms.items():
            total = out.get(r, Fraction(0)) + c
            if total == 0:
                out.pop(r, None)
            else:
                out[r] = total
        return Cyclotomic._from_canonical(out)

    __radd__ = __add__

    def __neg__(self):
        return Cyclotomic._from_canonical({r: -c for r, c in self._terms.items()})

    def __sub__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            if other == 0:
                return Cyclotomic.zero()
            return Cyclotomic._from_canonical(
                {r: c * other for r, c in self._terms.items()}
            )
        if not isinstance(other, Cyclotomic):
            return NotImplemented
        raw: dict[Fraction, Fraction] = {}
        for r1, c1 in self._terms.items():
            for r2, c2 in other._terms.items():
                r = (r1 + r2) % 1
                raw[r] = raw.get(r, Fraction(0)) + c1 * c2
        return Cyclotomic(raw)

    __rmul__ = __mul__

    def __eq__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self):
        return hash(self.key)

    def __bool__(self):
        return bool(self._terms)

    def __repr__(self):
        if not self._terms:
            return "Cyclotomic(0)"
        parts = [f"{c}*e({r})" for r, c in self._sorted_items()]
        return "Cyclotomic(" + " + ".join(parts) + ")"

    def to_json(self) -> list[dict[str, str]]:
        return [
            {"angle": fraction_to_str(r), "coeff": fraction_to_str(c)}
            for r, c in self._sorted_items()
        ]

    @classmethod
    def from_json(cls, data) -> "Cyclotomic":
        if not isinstance(data, list):
            raise ValueError(f"expected a list of terms, got {type(data).__name__}")
        raw: dict[Fraction, Fraction] = {}
        for item in data:
            if not isinstance(item, dict) or set(item) - {"angle", "coeff"}:
                raise ValueError(f"invalid cyclotomic term {item!r}")
            r = fraction_from_str(item["angle"]) % 1
            raw[r] = raw.get(r, Fraction(0)) + fraction_from_str(item["coeff"])
        return cls(raw)


def _coerce(x):
    if isinstance(x, Cyclotomic):
        return x
    if isinstance(x, (int, Fraction)):
        return Cyclotomic.from_rational(x)
    return NotImplemented


@dataclass(frozen=True)
class ComplexApprox:
    """A float complex value plus a radius bounding the true error."""

    re: float
    im: float
    err: float

    def __post_init__(self):
        if not (self.err >= 0.0):
            raise ValueError("error radius must be non-negative")

    @property
    def value(self) -> complex:
        return complex(self.re, self.im)

    def abs_upper(self) -> float:
        return math.hypot(self.re, self.im) + self.err


@lru_cache(maxsize=None)
def _root_of_unity_cached(num: int, den: int) -> Cyclotomic:
    return Cyclotomic({Fraction(num, den): Fraction(1)})


def root_of_unity(r) -> Cyclotomic:
    """The root of unity e(r) = exp(2*pi*i*(r mod 1)), canonical."""
    r = as_fraction(r) % 1
    _check_conductor(r.denominator)
    return _root_of_unity_cached(r.numerator, r.denominator)


def cyclo_reduce(c: Cyclotomic) -> Cyclotomic:
    """Re-run canonicalization (a no-op on the always-canonical type)."""
    return Cyclotomic(c.terms)


def cyclo_eval(c: Cyclotomic) -> ComplexApprox:
    """Evaluate to floats with a conservative rounding-error radius.

    Each term contributes at most a few ulps relative to |coeff|; the
    reported radius uses the crude but safe envelope
    (32 + 2n) * eps * sum|coeff| for n terms.
    """
    re = 0.0
    im = 0.0
    abs_sum = 0.0
    n = 0
    for r, coeff in c._sorted_items():
        cf = float(coeff)
        if r == 0:
            re += cf
        else:
            theta = math.tau * float(r)
            re += cf * math.cos(theta)
            im += cf * math.sin(theta)
        abs_sum += abs(cf)
        n += 1
    if n == 0:
        return ComplexApprox(0.0, 0.0, 0.0)
    return ComplexApprox(re, im, (32 + 2 * n) * _EPS * abs_sum)
