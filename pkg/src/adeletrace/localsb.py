"""Exact Schwartz-Bruhat calculus at one finite place.

A function on Q_p is stored as a finite sum of atoms
coeff * psi_p(twist * x) * 1_{center + p^level Z_p}.  The class is
closed under addition, pointwise product, Fourier transform (kernel
psi_p(x*y), additive measure vol(Z_p) = 1) and the multiplicative
integrals over unit cosets used by the trace functionals.

Canonical form.  Twists only matter modulo p^{-level}, so each atom
stores the digit representative of its twist and absorbs the leftover
phase into the coefficient.  Atom balls are made pairwise disjoint by
splitting a coarse ball only along paths that meet finer balls (never
a global common level, which would grow like p^(level spread)).  A
ball may carry several twists; restricted to the ball the twisted
characters are linearly independent, so coefficients per (ball, twist)
are well defined.  When all p siblings of a parent ball are present
they can be folded into the parent through the invertible discrete
character transform on the child values; the fold is applied whenever
it does not grow the number of atoms, so the form prefers coarse
twisted atoms without ever expanding (a generic fold would multiply
twist counts by p per level).

Equality is decided exactly through differences: a function is zero
iff its canonical form is empty (after joint refinement the twisted
characters on each piece are independent), so ``f == g`` never depends
on which of several size-equivalent representations produced ``f``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .exact import Cyclotomic, as_fraction, fraction_from_str, fraction_to_str
from .padic import PadicBall, Prime, digit_rep, psi_p, unit_coset_reps, unit_coset_volume, vp


@dataclass(frozen=True)
class TwistedBall:
    """One atom: coeff * psi_p(twist * x) on center + p^level Z_p."""

    coeff: Cyclotomic
    twist: Fraction
    ball: PadicBall

    def to_json(self) -> dict:
        return {
            "coeff": self.coeff.to_json(),
            "twist": fraction_to_str(self.twist),
            "center": fraction_to_str(self.ball.center),
            "level": self.ball.level,
        }


def _canonical_atom(p: int, coeff: Cyclotomic, twist: Fraction, ball: PadicBall) -> TwistedBall:
    """Reduce the twist mod p^{-level}; the dropped part is a constant phase."""
    canon = digit_rep(twist, p, -ball.level)
    if canon != twist:
        coeff = coeff * psi_p((twist - canon) * ball.center, p)
    return TwistedBall(coeff, canon, ball)


def _split_atom(p: int, atom: TwistedBall) -> list[TwistedBall]:
    """Rewrite an atom as its p sub-ball restrictions (one level deeper)."""
    out = []
    for child in atom.ball.children():
        out.append(_canonical_atom(p, atom.coeff, atom.twist, child))
    return out


def _canonicalize_atoms(
    p: int,
    atoms: list[TwistedBall],
    *,
    allow_twist_lift: bool = True,
    min_level: int | None = None,
) -> tuple[TwistedBall, ...]:
    # pool per level: (center, twist) -> coeff
    pools: dict[int, dict[tuple[Fraction, Fraction], Cyclotomic]] = {}
    for atom in atoms:
        if atom.coeff.is_zero():
            continue
        key = (atom.ball.center, atom.twist)
        pool = pools.setdefault(atom.ball.level, {})
        pool[key] = pool.get(key, Cyclotomic.zero()) + atom.coeff

    # split coarse balls that strictly contain finer ones
    final: dict[int, dict[tuple[Fraction, Fraction], Cyclotomic]] = {}
    while pools:
        level = min(pools)
        pool = pools.pop(level)
        deeper = {
            digit_rep(center, p, level)
            for lv, pl in pools.items()
            for (center, _twist) in pl
        }
        for (center, twist), coeff in pool.items():
            if coeff.is_zero():
                continue
            if center in deeper:
                child_pool = pools.setdefault(level + 1, {})
                parent = TwistedBall(coeff, twist, PadicBall(p, center, level))
                for child in _split_atom(p, parent):
                    key = (child.ball.center, child.twist)
                    child_pool[key] = child_pool.get(key, Cyclotomic.zero()) + child.coeff
            else:
                fin = final.setdefault(level, {})
                key = (center, twist)
                fin[key] = fin.get(key, Cyclotomic.zero()) + coeff

    for level in list(final):
        final[level] = {k: c for k, c in final[level].items() if not c.is_zero()}
        if not final[level]:
            del final[level]

    # fold complete sibling families into their parent ball (descending
    # sweep; folds only propagate downward, so one pass suffices)
    floor = min_level
    inv_p = Fraction(1, p)
    level = max(final, default=0)
    while final and level >= min(final):
        pool = final.get(level)
        if pool and (floor is None or level > floor):
            step = Fraction(p) ** (-level)
            # parent_center -> child_center -> twist -> coeff
            fams: dict[Fraction, dict[Fraction, dict[Fraction, Cyclotomic]]] = {}
            for (center, twist), coeff in pool.items():
                fams.setdefault(digit_rep(center, p, level - 1), {}).setdefault(
                    center, {}
                )[twist] = coeff
            for parent_center, children in fams.items():
                if len(children) != p:
                    continue
                centers = sorted(children)
                child_size = sum(len(poly) for poly in children.values())
                twist_set = sorted({t for poly in children.values() for t in poly})
                parent_poly: dict[Fraction, Cyclotomic] = {}
                admissible = True
                for bstar in twist_set:
                    vals = [
                        (c, children[c].get(bstar, Cyclotomic.zero())) for c in centers
                    ]
                    for d in range(p):
                        lifted = Cyclotomic.zero()
                        for c, k in vals:
                            if not k.is_zero():
                                lifted = lifted + k * psi_p(-d * step * c, p)
                        if lifted.is_zero():
                            continue
                        if not allow_twist_lift and d != 0:
                            admissible = False
                            break
                        if len(parent_poly) >= child_size:
                            admissible = False  # fold would grow the form
                            break
                        parent_poly[bstar + d * step] = lifted * inv_p
                    if not admissible:
                        break
                if not admissible:
                    continue
                for c, poly in children.items():
                    for t in poly:
                        del pool[(c, t)]
                up = final.setdefault(level - 1, {})
                for t, coeff in parent_poly.items():
                    total = up.get((parent_center, t), Cyclotomic.zero()) + coeff
                    if total.is_zero():
                        up.pop((parent_center, t), None)
                    else:
                        up[(parent_center, t)] = total
            if not pool:
                del final[level]
        level -= 1

    out = []
    for level in sorted(final):
        for (center, twist), coeff in sorted(final[level].items()):
            if not coeff.is_zero():
                out.append(TwistedBall(coeff, twist, PadicBall(p, center, level)))
    return tuple(out)


class LocalSB:
    """A Schwartz-Bruhat function on Q_p as a canonical sum of twisted balls."""

    __slots__ = ("p", "atoms")

    def __init__(self, p: int, atoms=()):
        p = int(Prime(p))
        prepared = []
        for atom in atoms:
            if isinstance(atom, TwistedBall):
                coeff, twist, ball = atom.coeff, atom.twist, atom.ball
            else:
                coeff, twist, ball = atom
                if not isinstance(coeff, Cyclotomic):
                    coeff = Cyclotomic.from_rational(coeff)
                twist = as_fraction(twist)
                if not isinstance(ball, PadicBall):
                    ball = PadicBall(p, *ball)
            if ball.p != p:
                raise ValueError(f"atom at place {ball.p} inside a place-{p} function")
            prepared.append(_canonical_atom(p, coeff, twist, ball))
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "atoms", _canonicalize_atoms(p, prepared))

    def __setattr__(self, name, value):
        raise AttributeError("LocalSB is immutable")

    def is_zero(self) -> bool:
        return not self.atoms

    def __eq__(self, other):
        """Exact equality of functions (decided via the difference)."""
        if not isinstance(other, LocalSB):
            return NotImplemented
        if self.p != other.p:
            return False
        if self.atoms == other.atoms:
            return True
        return (self - other).is_zero()

    __hash__ = None

    def __repr__(self):
        return f"LocalSB(p={self.p}, atoms={len(self.atoms)})"

    def __add__(self, other):
        if not isinstance(other, LocalSB) or other.p != self.p:
            return NotImplemented
        return LocalSB(self.p, tuple(self.atoms) + tuple(other.atoms))

    def __mul__(self, scalar):
        if isinstance(scalar, (int, Fraction, Cyclotomic)):
            return LocalSB(
                self.p,
                [TwistedBall(a.coeff * scalar, a.twist, a.ball) for a in self.atoms],
            )
        return NotImplemented

    __rmul__ = __mul__

    def __neg__(self):
        return self * Fraction(-1)

    def __sub__(self, other):
        if not isinstance(other, LocalSB) or other.p != self.p:
            return NotImplemented
        return self + (-other)

    def support_min_valuation(self) -> int | None:
        """min vp over the support, or None for the zero function."""
        if not self.atoms:
            return None
        vals = []
        for a in self.atoms:
            c, n = a.ball.center, a.ball.level
            v = vp(c, self.p)
            vals.append(n if v >= n else int(v))
        return min(vals)

    def abs_bound(self) -> float:
        """Pointwise upper bound (balls are disjoint; twists on one ball add)."""
        per_ball: dict[PadicBall, float] = {}
        for a in self.atoms:
            per_ball[a.ball] = per_ball.get(a.ball, 0.0) + a.coeff.abs_bound()
        return max(per_ball.values(), default=0.0)

    def to_json(self) -> dict:
        return {"p": self.p, "atoms": [a.to_json() for a in self.atoms]}

    @classmethod
    def from_json(cls, data: dict) -> "LocalSB":
        p = int(data["p"])
        atoms = []
        for item in data.get("atoms", []):
            extra = set(item) - {"coeff", "twist", "center", "level"}
            if extra:
                raise ValueError(f"unknown atom fields {sorted(extra)}")
            atoms.append(
                (
                    Cyclotomic.from_json(item["coeff"]),
                    fraction_from_str(item.get("twist", "0")),
                    PadicBall(p, fraction_from_str(item["center"]), int(item["level"])),
                )
            )
        return cls(p, atoms)


def zp_indicator(p: int) -> LocalSB:
    """The self-dual default 1_{Z_p}."""
    return LocalSB(p, [(Cyclotomic.one(), Fraction(0), PadicBall(p, Fraction(0), 0))])


def sb_eval(f: LocalSB, x) -> Cyclotomic:
    """Pointwise value at a rational point (exact)."""
    x = as_fraction(x)
    total = Cyclotomic.zero()
    for atom in f.atoms:
        if atom.ball.contains(x):
            total = total + atom.coeff * psi_p(atom.twist * x, f.p)
    return total


def sb_fourier(f: LocalSB) -> LocalSB:
    """Fourier transform with kernel psi_p(x*y) and vol(Z_p) = 1.

    On one atom: psi(b.)1_{c+p^n Z_p} |-> p^-n psi(bc) psi(c.) 1_{-b+p^-n Z_p}.
    Applying it twice gives the reflection f(-x) exactly.
    """
    p = f.p
    out = []
    for atom in f.atoms:
        c, n = atom.ball.center, atom.ball.level
        b = atom.twist
        coeff = atom.coeff * Fraction(p) ** (-n) * psi_p(b * c, p)
        out.append((coeff, c, PadicBall(p, -b, -n)))
    return LocalSB(p, out)


def sb_integral(f: LocalSB) -> Cyclotomic:
    """Integral over Q_p against the additive measure, exactly.

    One atom integrates to coeff * psi(b*c) * p^-n when vp(b) >= -n and
    to 0 otherwise (the twist averages out over the ball).
    """
    p = f.p
    total = Cyclotomic.zero()
    for atom in f.atoms:
        n = atom.ball.level
        if vp(atom.twist, p) >= -n:
            total = total + atom.coeff * psi_p(atom.twist * atom.ball.center, p) * (
                Fraction(p) ** (-n)
            )
    return total


def sb_reflect(f: LocalSB) -> LocalSB:
    """The function x -> f(-x)."""
    return LocalSB(
        f.p,
        [
            (a.coeff, -a.twist, PadicBall(f.p, -a.ball.center, a.ball.level))
            for a in f.atoms
        ],
    )


def sb_conjugate(f: LocalSB) -> LocalSB:
    """Complex conjugate (conjugates coefficients, negates twists)."""
    return LocalSB(
        f.p,
        [(a.coeff.conjugate(), -a.twist, a.ball) for a in f.atoms],
    )


def sb_mul(f: LocalSB, g: LocalSB) -> LocalSB:
    """Pointwise product; ball intersections are nested or empty."""
    if f.p != g.p:
        raise ValueError("pointwise product across different places")
    p = f.p
    out = []
    for a in f.atoms:
        for b in g.atoms:
            fine, coarse = (a, b) if a.ball.level >= b.ball.level else (b, a)
            if coarse.ball.contains(fine.ball.center):
                out.append((a.coeff * b.coeff, a.twist + b.twist, fine.ball))
    return LocalSB(p, out)


class UnitFunction:
    """A locally constant function on Z_p^x, as coefficients on unit cosets.

    Cosets are additive balls a + p^k Z_p with a a unit and k >= 1 (these
    coincide with the multiplicative cosets a(1 + p^k Z_p)).  Canonical
    form reuses the disjoint/coarsest machinery, without twist lifts.
    """

    __slots__ = ("p", "atoms")

    def __init__(self, p: int, atoms=()):
        p = int(Prime(p))
        prepared = []
        for atom in atoms:
            coeff, ball = atom
            if not isinstance(coeff, Cyclotomic):
                coeff = Cyclotomic.from_rational(coeff)
            if not isinstance(ball, PadicBall):
                ball = PadicBall(p, *ball)
            if ball.p != p:
                raise ValueError(f"coset at place {ball.p} inside a place-{p} function")
            if ball.level < 1:
                raise ValueError("unit cosets must have level >= 1")
            if vp(ball.center, p) != 0:
                raise ValueError(f"coset center {ball.center} is not a unit at {p}")
            prepared.append(TwistedBall(coeff, Fraction(0), ball))
        canon = _canonicalize_atoms(p, prepared, allow_twist_lift=False, min_level=1)
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "atoms", tuple((a.coeff, a.ball) for a in canon))

    def __setattr__(self, name, value):
        raise AttributeError("UnitFunction is immutable")

    def __eq__(self, other):
        if not isinstance(other, UnitFunction):
            return NotImplemented
        if self.p != other.p:
            return False
        if self.atoms == other.atoms:
            return True
        diff = _canonicalize_atoms(
            self.p,
            [TwistedBall(c, Fraction(0), b) for c, b in self.atoms]
            + [TwistedBall(-c, Fraction(0), b) for c, b in other.atoms],
        )
        return not diff

    __hash__ = None

    def __repr__(self):
        return f"UnitFunction(p={self.p}, atoms={len(self.atoms)})"

    def eval(self, u) -> Cyclotomic:
        u = as_fraction(u)
        total = Cyclotomic.zero()
        for coeff, ball in self.atoms:
            if ball.contains(u):
                total = total + coeff
        return total

    def max_level(self) -> int:
        return max((ball.level for _c, ball in self.atoms), default=1)

    def abs_bound(self) -> float:
        return max((c.abs_bound() for c, _b in self.atoms), default=0.0)

    def to_json(self) -> dict:
        return {
            "p": self.p,
            "atoms": [
                {
                    "coeff": c.to_json(),
                    "center": fraction_to_str(ball.center),
                    "level": ball.level,
                }
                for c, ball in self.atoms
            ],
        }

    @classmethod
    def from_json(cls, data: dict) -> "UnitFunction":
        p = int(data["p"])
        atoms = []
        for item in data.get("atoms", []):
            extra = set(item) - {"coeff", "center", "level"}
            if extra:
                raise ValueError(f"unknown coset fields {sorted(extra)}")
            atoms.append(
                (
                    Cyclotomic.from_json(item["coeff"]),
                    PadicBall(p, fraction_from_str(item["center"]), int(item["level"])),
                )
            )
        return cls(p, atoms)


def unit_indicator(p: int) -> UnitFunction:
    """The default 1_{Z_p^x}."""
    one = Cyclotomic.one()
    return UnitFunction(
        p, [(one, PadicBall(p, Fraction(a), 1)) for a in range(1, p)]
    )


def unit_mult_integral(g: UnitFunction, q, f: LocalSB) -> Cyclotomic:
    """The exact multiplicative integral of g(u) f(q u) over Z_p^x.

    Both factors are refined to a common coset level k at which the
    integrand is constant coset-by-coset, then summed against the coset
    volume 1/((p-1) p^(k-1)).  The scale q stays a separate argument so
    that one code path serves every spectral and geometric term.
    """
    q = as_fraction(q)
    if q == 0:
        raise ValueError("scale q must be nonzero")
    p = f.p
    if g.p != p:
        raise ValueError("unit factor and additive factor live at different places")
    if not f.atoms:
        return Cyclotomic.zero()
    vq = vp(q, p)
    # the integrand vanishes identically when q*unit misses the support
    reachable = False
    for atom in f.atoms:
        c, n = atom.ball.center, atom.ball.level
        v_c = vp(c, p)
        if (v_c < n and vq == v_c) or (v_c >= n and vq >= n):
            reachable = True
            break
    if not reachable:
        return Cyclotomic.zero()
    k = max(1, g.max_level())
    for atom in f.atoms:
        k = max(k, atom.ball.level - int(vq))
        tv = vp(atom.twist, p)
        if tv != float("inf"):
            k = max(k, -int(tv) - int(vq))
    vol = unit_coset_volume(p, k)
    total = Cyclotomic.zero()
    for a in unit_coset_reps(p, k):
        gu = g.eval(a)
        if gu.is_zero():
            continue
        fu = sb_eval(f, q * a)
        if fu.is_zero():
            continue
        total = total + gu * fu * vol
    return total
