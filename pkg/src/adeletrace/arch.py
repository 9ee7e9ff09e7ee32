"""Gaussian atoms on the real line with certified lattice sums.

An atom is amp * exp(-pi*a*(x-mu)^2) * exp(2*pi*i*xi*x) with width
a > 0.  The class is closed under addition, scaling of the argument,
and Fourier transform, and every integral in scope has a closed form.

The transform kernel is exp(-2*pi*i*x*y).  Together with the finite
place characters (trivial on Z_p, e(1/p^n) at p^-n) this makes the
rationals, embedded diagonally in the adeles, their own dual lattice,
which is what the two-sided trace and Poisson identities need.  The
transform of an atom is again an atom:

    (amp, a, mu, xi)  |->  (amp * a^(-1/2) * e^(2*pi*i*mu*xi), 1/a, xi, -mu),

i.e. fhat(y) = amp * a^(-1/2) * e^(2*pi*i*mu*(xi-y)) * e^(-pi*(y-xi)^2/a).
Applying the transform twice returns the reflection x -> f(-x).

Tail bound used by lattice_sum over the grid (1/D)Z, |q| > M >= |mu|+1:
summands decrease monotonically beyond M, so the sum is at most D times
the integral of |f| over |x| > M, and the Gaussian tail inequality
int_T^inf exp(-pi*a*t^2) dt <= exp(-pi*a*T^2) / (2*pi*a*T) gives

    sum_{|q|>M} |f(q)| <= D * |amp| * exp(-pi*a*(M-|mu|)^2) / (pi*a*(M-|mu|)).

Doubling the cutoff must change the sum by less than this bound; the
test suite checks exactly that.
"""

from __future__ import annotations

import cmath
import math
import sys
from dataclasses import dataclass

_EPS = sys.float_info.epsilon


@dataclass(frozen=True)
class ArchAtom:
    """amp * exp(-pi*width*(x-shift)^2) * exp(2*pi*i*modulation*x)."""

    amp: complex
    width: float
    shift: float = 0.0
    modulation: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "amp", complex(self.amp))
        object.__setattr__(self, "width", float(self.width))
        object.__setattr__(self, "shift", float(self.shift))
        object.__setattr__(self, "modulation", float(self.modulation))
        if not (self.width > 0 and math.isfinite(self.width)):
            raise ValueError("atom width must be positive and finite")
        for name in ("shift", "modulation"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"atom {name} must be finite")
        if not (math.isfinite(self.amp.real) and math.isfinite(self.amp.imag)):
            raise ValueError("atom amplitude must be finite")

    def __call__(self, x: float) -> complex:
        x = float(x)
        g = math.exp(-math.pi * self.width * (x - self.shift) ** 2)
        return self.amp * g * cmath.exp(2j * math.pi * self.modulation * x)

    def to_json(self) -> dict:
        return {
            "amp_re": self.amp.real,
            "amp_im": self.amp.imag,
            "width": self.width,
            "shift": self.shift,
            "modulation": self.modulation,
        }

    @classmethod
    def from_json(cls, data: dict) -> "ArchAtom":
        extra = set(data) - {"amp_re", "amp_im", "width", "shift", "modulation"}
        if extra:
            raise ValueError(f"unknown atom fields {sorted(extra)}")
        return cls(
            complex(float(data["amp_re"]), float(data.get("amp_im", 0.0))),
            data["width"],
            data.get("shift", 0.0),
            data.get("modulation", 0.0),
        )


class ArchFunction:
    """A finite sum of Gaussian atoms."""

    __slots__ = ("atoms",)

    def __init__(self, atoms=()):
        prepared = []
        for atom in atoms:
            if not isinstance(atom, ArchAtom):
                atom = ArchAtom(*atom)
            prepared.append(atom)
        object.__setattr__(self, "atoms", tuple(prepared))

    def __setattr__(self, name, value):
        raise AttributeError("ArchFunction is immutable")

    def __eq__(self, other):
        if not isinstance(other, ArchFunction):
            return NotImplemented
        return self.atoms == other.atoms

    def __hash__(self):
        return hash(self.atoms)

    def __repr__(self):
        return f"ArchFunction({len(self.atoms)} atoms)"

    def __add__(self, other):
        if not isinstance(other, ArchFunction):
            return NotImplemented
        return ArchFunction(self.atoms + other.atoms)

    def scale_amp(self, factor: complex) -> "ArchFunction":
        return ArchFunction(
            [ArchAtom(a.amp * factor, a.width, a.shift, a.modulation) for a in self.atoms]
        )

    def scale_arg(self, s) -> "ArchFunction":
        """The function x -> f(s*x) for a nonzero real scale s."""
        s = float(s)
        if s == 0:
            raise ValueError("argument scale must be nonzero")
        return ArchFunction(
            [
                ArchAtom(a.amp, a.width * s * s, a.shift / s, a.modulation * s)
                for a in self.atoms
            ]
        )

    def reflect(self) -> "ArchFunction":
        return self.scale_arg(-1.0)

    def abs_amp_sum(self) -> float:
        return sum(abs(a.amp) for a in self.atoms)

    def max_shift(self) -> float:
        return max((abs(a.shift) for a in self.atoms), default=0.0)

    def to_json(self) -> list[dict]:
        return [a.to_json() for a in self.atoms]

    @classmethod
    def from_json(cls, data) -> "ArchFunction":
        if not isinstance(data, list):
            raise ValueError("expected a list of atoms")
        return cls([ArchAtom.from_json(item) for item in data])


def gaussian(width: float = 1.0) -> ArchFunction:
    """exp(-pi*width*x^2); width 1 is the self-dual default."""
    return ArchFunction([ArchAtom(1.0, width)])


def arch_eval(f: ArchFunction, x: float) -> complex:
    return sum((atom(x) for atom in f.atoms), 0j)


def arch_fourier(f: ArchFunction) -> ArchFunction:
    """Closed-form transform with kernel exp(-2*pi*i*x*y); see module docs."""
    out = []
    for a in f.atoms:
        amp = a.amp / math.sqrt(a.width) * cmath.exp(2j * math.pi * a.shift * a.modulation)
        out.append(ArchAtom(amp, 1.0 / a.width, a.modulation, -a.shift))
    return ArchFunction(out)


def arch_integral(f: ArchFunction) -> complex:
    """Lebesgue integral, i.e. the transform evaluated at zero."""
    total = 0j
    for a in f.atoms:
        total += (
            a.amp
            / math.sqrt(a.width)
            * cmath.exp(2j * math.pi * a.shift * a.modulation)
            * math.exp(-math.pi * a.modulation**2 / a.width)
        )
    return total


@dataclass(frozen=True)
class BoundedValue:
    """A complex value plus a certified truncation + rounding radius."""

    value: complex
    bound: float

    def __post_init__(self):
        object.__setattr__(self, "value", complex(self.value))
        object.__setattr__(self, "bound", float(self.bound))
        if not (self.bound >= 0.0):
            raise ValueError("bound must be non-negative")

    def __add__(self, other):
        if not isinstance(other, BoundedValue):
            return NotImplemented
        value = self.value + other.value
        slack = 2 * _EPS * (abs(self.value) + abs(other.value))
        return BoundedValue(value, self.bound + other.bound + slack)

    def to_json(self) -> dict:
        return {"re": self.value.real, "im": self.value.imag, "bound": self.bound}


def gaussian_lattice_tail(f: ArchFunction, density: float, cutoff: float) -> float:
    """Upper bound for sum of |f| over grid points beyond |x| = cutoff.

    Valid whenever cutoff >= |shift| + 1 for every atom (monotone
    comparison with the integral; see module docstring).
    """
    total = 0.0
    for a in f.atoms:
        t = cutoff - abs(a.shift)
        if t < 1.0:
            raise ValueError("cutoff too small for a certified tail bound")
        total += (
            density
            * abs(a.amp)
            * math.exp(-math.pi * a.width * t * t)
            / (math.pi * a.width * t)
        )
    return total


def _choose_cutoff(f: ArchFunction, density: float, tol: float, weight: float) -> float:
    cutoff = math.ceil(f.max_shift()) + 1.0
    while weight * gaussian_lattice_tail(f, density, cutoff) > tol:
        cutoff += 1.0
    return cutoff


def lattice_sum(f: ArchFunction, D: int, tol: float, *, cutoff_factor: int = 1) -> BoundedValue:
    """Certified sum of f over the lattice (1/D)Z.

    The cutoff M is the smallest integer with tail bound <= tol; terms
    are added in ascending order of the lattice index for reproducible
    rounding.  ``cutoff_factor`` widens the cutoff (the value must move
    by less than the previously reported bound, which the bound
    validity tests exercise).
    """
    if not (isinstance(D, int) and D >= 1):
        raise ValueError("lattice denominator D must be a positive integer")
    if not (tol > 0):
        raise ValueError("tolerance must be positive")
    if not f.atoms:
        return BoundedValue(0j, 0.0)
    cutoff = _choose_cutoff(f, float(D), tol, 1.0) * max(1, cutoff_factor)
    tail = gaussian_lattice_tail(f, float(D), cutoff)
    n_max = math.floor(cutoff * D)
    total = 0j
    abs_total = 0.0
    count = 0
    for n in range(-n_max, n_max + 1):
        term = arch_eval(f, n / D)
        total += term
        abs_total += abs(term)
        count += 1
    rounding = (count + 8) * _EPS * abs_total
    return BoundedValue(total, tail + rounding)
