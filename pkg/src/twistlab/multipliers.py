"""Group 2-cocycles with values in U(1), kept exact whenever possible.

A multiplier sigma assigns a phase to each pair of group elements and
satisfies the normalized cocycle identity

    sigma(g1 g2, g3) sigma(g1, g2) = sigma(g1, g2 g3) sigma(g2, g3),
    sigma(e, g) = sigma(g, e) = 1.

Supported constructions: the trivial multiplier, exact bilinear (magnetic)
multipliers on Z^k, finite phase tables, pullbacks along homomorphisms,
products, coboundaries of U(1) functions, rational powers, and the
geometric construction from a lattice gauge potential.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

from .groups import (
    FiniteTableGroup,
    FreeAbelianGroup,
    Group,
    Homomorphism,
    ProductGroup,
    character_turn_tables,
)
from .phases import Phase, as_rational, rational_str


class MultiplierError(ValueError):
    """Raised for malformed multiplier data or unsupported requests."""


class PhaseMap:
    """A U(1)-valued function z on a group with z(e) = 1.

    Used for coboundaries, gauge changes and characters.  ``turns(g)``
    returns the angle in turns, exact (Fraction) when possible.
    """

    def __init__(self, group: Group, turns_fn: Callable, exact: bool = True, label: str = "",
                 character: bool = False):
        self.group = group
        self._turns_fn = turns_fn
        self.exact = exact
        self.label = label
        self.character = character

    def turns(self, g):
        t = self._turns_fn(g)
        if self.exact:
            return Fraction(t) % 1
        return float(t) % 1.0

    def phase(self, g) -> Phase:
        return Phase(self.turns(g), exact=self.exact)

    def __call__(self, g) -> complex:
        return self.phase(g).value

    def conjugate(self) -> "PhaseMap":
        return PhaseMap(
            self.group,
            lambda g: -self._turns_fn(g),
            self.exact,
            f"conj({self.label})",
            self.character,
        )

    def scaled(self, s) -> "PhaseMap":
        if not self.exact:
            raise MultiplierError("rational scaling needs exact phase data")
        s = as_rational(s)
        return PhaseMap(
            self.group,
            lambda g, _s=s: Fraction(self._turns_fn(g)) * _s,
            True,
            f"{self.label}^{rational_str(s)}",
            self.character,
        )

    @classmethod
    def one(cls, group: Group) -> "PhaseMap":
        return cls(group, lambda g: Fraction(0), True, "1", character=True)

    @classmethod
    def from_table(cls, group: FiniteTableGroup, turn_values: Sequence, label: str = "",
                   character: bool = False) -> "PhaseMap":
        table = [as_rational(t) % 1 for t in turn_values]
        if len(table) != group.n:
            raise MultiplierError("phase table must list one turn per group element")
        if table[group.identity_index] != 0:
            raise MultiplierError("phase maps must send the identity to 1")
        return cls(group, lambda g: table[g], True, label or "table", character=character)

    @classmethod
    def character_on_lattice(cls, group: FreeAbelianGroup, turn_vector: Sequence) -> "PhaseMap":
        vec = [as_rational(t) for t in turn_vector]
        if len(vec) != group.rank:
            raise MultiplierError("character needs one turn per lattice generator")
        return cls(
            group,
            lambda g: sum(v * a for v, a in zip(vec, g)),
            True,
            "chi(" + ",".join(rational_str(v) for v in vec) + ")",
            character=True,
        )

    @classmethod
    def quadratic_on_lattice(cls, group: FreeAbelianGroup, coeff) -> "PhaseMap":
        """z(g) = exp(2 pi i c g_1 g_2) on Z^2, the gauge-change profile."""
        if group.rank != 2:
            raise MultiplierError("quadratic phase maps are defined on Z^2")
        c = as_rational(coeff)
        return cls(group, lambda g: c * g[0] * g[1], True, f"quad({rational_str(c)})")

    @classmethod
    def product(cls, group: ProductGroup, left: "PhaseMap", right: "PhaseMap") -> "PhaseMap":
        exact = left.exact and right.exact
        return cls(
            group,
            lambda g: left._turns_fn(g[0]) + right._turns_fn(g[1]),
            exact,
            f"{left.label}x{right.label}",
            character=left.character and right.character,
        )

    @classmethod
    def random_exact(cls, group: Group, rng: random.Random, denominator: int = 24,
                     spread: int = 4) -> "PhaseMap":
        """Random rational-turn phase map; on infinite groups values are cached lazily."""
        if isinstance(group, FiniteTableGroup):
            turns = [Fraction(rng.randrange(denominator), denominator) for _ in range(group.n)]
            turns[group.identity_index] = Fraction(0)
            return cls.from_table(group, turns, "random")
        if group.is_finite():
            table = {
                g: Fraction(rng.randrange(denominator), denominator)
                for g in group.elements()
            }
            table[group.identity()] = Fraction(0)
            return cls(group, lambda g: table[g], True, "random")
        cache: dict = {group.identity(): Fraction(0)}

        def fn(g):
            if g not in cache:
                cache[g] = Fraction(rng.randrange(denominator), denominator)
            return cache[g]

        return cls(group, fn, True, "random")

    def verify_character(self, samples: int = 100, seed: int = 5) -> bool:
        rng = random.Random(seed)
        grp = self.group
        for _ in range(samples):
            a = grp.random_element(rng)
            b = grp.random_element(rng)
            lhs = self.turns(grp.multiply(a, b))
            rhs = (self.turns(a) + self.turns(b)) % 1 if self.exact else (self.turns(a) + self.turns(b)) % 1.0
            if self.exact:
                if lhs != rhs:
                    return False
            elif abs(Phase(lhs, exact=False).value - Phase(rhs, exact=False).value) > 1e-10:
                return False
        return True


def all_characters(group: FiniteTableGroup) -> list[PhaseMap]:
    """Every homomorphism of a finite table group into U(1)."""
    return [
        PhaseMap.from_table(group, table, f"chi{i}", character=True)
        for i, table in enumerate(character_turn_tables(group))
    ]


def product_characters(group: ProductGroup) -> list[PhaseMap]:
    """Characters of a product of finite table groups."""
    if not (isinstance(group.left, FiniteTableGroup) and isinstance(group.right, FiniteTableGroup)):
        raise MultiplierError("character enumeration needs finite factors")
    out = []
    for cl in all_characters(group.left):
        for cr in all_characters(group.right):
            out.append(PhaseMap.product(group, cl, cr))
    return out


class Multiplier:
    """Base class; concrete multipliers implement ``turns``."""

    kind = "abstract"

    def __init__(self, group: Group, exact: bool = True):
        self.group = group
        self.is_exact = exact

    def turns(self, g, h):
        """Angle of sigma(g, h) in turns (Fraction when exact)."""
        raise NotImplementedError

    def phase(self, g, h) -> Phase:
        return Phase(self.turns(g, h), exact=self.is_exact)

    def value(self, g, h) -> complex:
        return self.phase(g, h).value

    def conjugate(self) -> "Multiplier":
        return ConjugateMultiplier(self)

    def power(self, s) -> "Multiplier":
        """sigma^s for exact rational s; requires exact base data."""
        if not self.is_exact:
            raise MultiplierError("power families need an exact base multiplier")
        return ScaledMultiplier(self, as_rational(s))

    def twist(self, z: PhaseMap) -> "Multiplier":
        """sigma times the coboundary of z."""
        return TwistedMultiplier(self, z)

    def to_json(self) -> dict:
        raise MultiplierError(f"{self.kind} multipliers have no JSON form")


class TrivialMultiplier(Multiplier):
    kind = "trivial"

    def turns(self, g, h) -> Fraction:
        return Fraction(0)

    def to_json(self) -> dict:
        return {"kind": "trivial"}


class BilinearMultiplier(Multiplier):
    """sigma(x, y) = exp(2 pi i x^T P y) on Z^k with rational P."""

    kind = "bilinear"

    def __init__(self, group: FreeAbelianGroup, pairing: Sequence[Sequence], gauge: str = "",
                 theta=None):
        if not isinstance(group, FreeAbelianGroup):
            raise MultiplierError("bilinear multipliers live on free abelian groups")
        super().__init__(group, exact=True)
        self.pairing = tuple(tuple(as_rational(x) for x in row) for row in pairing)
        if len(self.pairing) != group.rank or any(len(r) != group.rank for r in self.pairing):
            raise MultiplierError("pairing matrix must be rank x rank")
        self.gauge = gauge
        self.theta = None if theta is None else as_rational(theta)

    def turns(self, g, h) -> Fraction:
        total = Fraction(0)
        for i, gi in enumerate(g):
            if gi:
                row = self.pairing[i]
                total += gi * sum(row[j] * hj for j, hj in enumerate(h) if hj)
        return total

    def antisymmetrized(self) -> tuple:
        p = self.pairing
        k = len(p)
        return tuple(tuple(p[i][j] - p[j][i] for j in range(k)) for i in range(k))

    def power(self, s) -> "BilinearMultiplier":
        s = as_rational(s)
        scaled = [[x * s for x in row] for row in self.pairing]
        theta = None if self.theta is None else self.theta * s
        return BilinearMultiplier(self.group, scaled, self.gauge, theta)

    def conjugate(self) -> "BilinearMultiplier":
        return self.power(-1)

    def to_json(self) -> dict:
        if self.theta is not None and self.gauge in ("landau", "symmetric"):
            return {"kind": "magnetic", "theta": rational_str(self.theta), "gauge": self.gauge}
        return {
            "kind": "bilinear",
            "pairing": [[rational_str(x) for x in row] for row in self.pairing],
        }


def magnetic_multiplier(theta, gauge: str = "landau", rank: int = 2) -> BilinearMultiplier:
    """Magnetic multiplier on Z^2 at rational flux theta.

    landau gauge:    sigma(x, y) = exp(2 pi i theta x_1 y_2)
    symmetric gauge: sigma(x, y) = exp(pi i theta (x_1 y_2 - x_2 y_1))
    """
    if rank != 2:
        raise MultiplierError("magnetic multipliers are defined on Z^2")
    theta = as_rational(theta)
    group = FreeAbelianGroup(2)
    if gauge == "landau":
        pairing = [[0, theta], [0, 0]]
    elif gauge == "symmetric":
        pairing = [[0, theta / 2], [-theta / 2, 0]]
    else:
        raise MultiplierError(f"unknown gauge {gauge!r}")
    return BilinearMultiplier(group, pairing, gauge, theta)


class TableMultiplier(Multiplier):
    """Exact phase table on a finite group."""

    kind = "table"

    def __init__(self, group: FiniteTableGroup, turn_table: Sequence[Sequence]):
        if not isinstance(group, FiniteTableGroup):
            raise MultiplierError("table multipliers need a finite table group")
        super().__init__(group, exact=True)
        self.turn_table = tuple(
            tuple(as_rational(x) % 1 for x in row) for row in turn_table
        )
        if len(self.turn_table) != group.n or any(len(r) != group.n for r in self.turn_table):
            raise MultiplierError("phase table must be n x n")
        e = group.identity_index
        for i in range(group.n):
            if self.turn_table[e][i] != 0 or self.turn_table[i][e] != 0:
                raise MultiplierError("table multiplier is not normalized at the identity")

    def turns(self, g, h) -> Fraction:
        return self.turn_table[g][h]

    def power(self, s) -> "TableMultiplier":
        s = as_rational(s)
        return TableMultiplier(
            self.group, [[x * s for x in row] for row in self.turn_table]
        )

    def conjugate(self) -> "TableMultiplier":
        return self.power(-1)

    def to_json(self) -> dict:
        return {
            "kind": "table",
            "phases": [[rational_str(x) for x in row] for row in self.turn_table],
        }


class PullbackMultiplier(Multiplier):
    """sigma(g, h) = base(pi(g), pi(h)) along a homomorphism pi."""

    kind = "pullback"

    def __init__(self, hom: Homomorphism, base: Multiplier):
        if base.group != hom.codomain:
            raise MultiplierError("base multiplier must live on the homomorphism codomain")
        super().__init__(hom.domain, base.is_exact)
        self.hom = hom
        self.base = base

    def turns(self, g, h):
        return self.base.turns(self.hom(g), self.hom(h))

    def power(self, s) -> "PullbackMultiplier":
        return PullbackMultiplier(self.hom, self.base.power(s))

    def conjugate(self) -> "PullbackMultiplier":
        return PullbackMultiplier(self.hom, self.base.conjugate())


class ProductMultiplier(Multiplier):
    """sigma((g1,g2),(h1,h2)) = left(g1,h1) right(g2,h2) on a product group."""

    kind = "product"

    def __init__(self, group: ProductGroup, left: Multiplier, right: Multiplier):
        if left.group != group.left or right.group != group.right:
            raise MultiplierError("factor multipliers must match the product factors")
        super().__init__(group, left.is_exact and right.is_exact)
        self.left = left
        self.right = right

    def turns(self, g, h):
        return self.left.turns(g[0], h[0]) + self.right.turns(g[1], h[1])

    def power(self, s) -> "ProductMultiplier":
        return ProductMultiplier(self.group, self.left.power(s), self.right.power(s))

    def conjugate(self) -> "ProductMultiplier":
        return ProductMultiplier(self.group, self.left.conjugate(), self.right.conjugate())


class ScaledMultiplier(Multiplier):
    """sigma^s with all angles multiplied by a rational s."""

    kind = "power"

    def __init__(self, base: Multiplier, s: Fraction):
        super().__init__(base.group, base.is_exact)
        self.base = base
        self.s = as_rational(s)

    def turns(self, g, h):
        return Fraction(self.base.turns(g, h)) * self.s

    def power(self, s) -> "ScaledMultiplier":
        return ScaledMultiplier(self.base, self.s * as_rational(s))

    def to_json(self) -> dict:
        return {"kind": "power", "base": self.base.to_json(), "s": rational_str(self.s)}


class ConjugateMultiplier(Multiplier):
    kind = "conjugate"

    def __init__(self, base: Multiplier):
        super().__init__(base.group, base.is_exact)
        self.base = base

    def turns(self, g, h):
        return -self.base.turns(g, h)

    def conjugate(self) -> Multiplier:
        return self.base


class TwistedMultiplier(Multiplier):
    """sigma' = sigma * (coboundary of z)."""

    kind = "coboundary-twist"

    def __init__(self, base: Multiplier, z: PhaseMap):
        if z.group != base.group:
            raise MultiplierError("twisting phase map must live on the same group")
        super().__init__(base.group, base.is_exact and z.exact)
        self.base = base
        self.z = z

    def turns(self, g, h):
        grp = self.group
        return (
            self.base.turns(g, h)
            + self.z.turns(g)
            + self.z.turns(h)
            - self.z.turns(grp.multiply(g, h))
        )


def coboundary(z: PhaseMap) -> Multiplier:
    """The multiplier dz(g, h) = z(g) z(h) / z(gh)."""
    return TwistedMultiplier(TrivialMultiplier(z.group), z)


@dataclass(frozen=True)
class CocycleReport:
    passed: bool
    checked: int
    worst_defect: float
    witness: tuple | None
    qualifier: str

    def __bool__(self) -> bool:
        return self.passed


def _sample_triples(group: Group, samples: int, seed: int, spread: int):
    if group.is_finite() and getattr(group, "n", 10 ** 9) <= 24:
        return list(itertools.product(group.elements(), repeat=3)), "exhaustive"
    if isinstance(group, ProductGroup) and group.is_finite():
        size = len(group.elements())
        if size <= 24:
            return list(itertools.product(group.elements(), repeat=3)), "exhaustive"
    rng = random.Random(seed)
    out = [
        (
            group.random_element(rng, spread),
            group.random_element(rng, spread),
            group.random_element(rng, spread),
        )
        for _ in range(samples)
    ]
    return out, "sampled"


def verify_cocycle(sigma: Multiplier, samples: int = 1000, seed: int = 0,
                   tol: float = 1e-12, spread: int = 4) -> CocycleReport:
    """Check normalization and the 2-cocycle identity.

    Exhaustive on finite groups of order <= 24, randomized otherwise.
    Exact multipliers are compared as rational turns, so a pass means the
    identity holds with zero defect.
    """
    grp = sigma.group
    e = grp.identity()
    triples, qualifier = _sample_triples(grp, samples, seed, spread)
    worst = 0.0
    witness = None
    for g1, g2, g3 in triples:
        if sigma.is_exact:
            lhs = (Fraction(sigma.turns(grp.multiply(g1, g2), g3)) + Fraction(sigma.turns(g1, g2))) % 1
            rhs = (Fraction(sigma.turns(g1, grp.multiply(g2, g3))) + Fraction(sigma.turns(g2, g3))) % 1
            defect = 0.0 if lhs == rhs else abs(Phase(lhs).value - Phase(rhs).value)
        else:
            lhs_v = sigma.value(grp.multiply(g1, g2), g3) * sigma.value(g1, g2)
            rhs_v = sigma.value(g1, grp.multiply(g2, g3)) * sigma.value(g2, g3)
            defect = abs(lhs_v - rhs_v)
        if defect > worst:
            worst = defect
            witness = (g1, g2, g3)
        norm_defect = max(
            abs(sigma.value(e, g1) - 1.0), abs(sigma.value(g1, e) - 1.0)
        )
        if norm_defect > worst:
            worst = norm_defect
            witness = (e, g1, None)
    return CocycleReport(worst <= tol, len(triples), worst, witness, qualifier)


def _pair_set(group: Group, radius: int):
    if group.is_finite() and getattr(group, "n", 10 ** 9) <= 24:
        return itertools.product(group.elements(), repeat=2)
    if isinstance(group, ProductGroup) and group.is_finite():
        elems = group.elements()
        if len(elems) <= 24:
            return itertools.product(elems, repeat=2)
    ball = group.ball(radius)
    return itertools.product(ball, repeat=2)


def is_cohomologous_via(sigma: Multiplier, sigma_prime: Multiplier, z: PhaseMap,
                        radius: int = 5, tol: float = 1e-12) -> bool:
    """Whether sigma' = sigma * dz on an exhaustive finite or ball-restricted pair set."""
    twisted = sigma.twist(z)
    for g, h in _pair_set(sigma.group, radius):
        if twisted.is_exact and sigma_prime.is_exact:
            if Fraction(twisted.turns(g, h)) % 1 != Fraction(sigma_prime.turns(g, h)) % 1:
                return False
        elif abs(twisted.value(g, h) - sigma_prime.value(g, h)) > tol:
            return False
    return True


def multipliers_equal(a: Multiplier, b: Multiplier, radius: int = 5, tol: float = 1e-12) -> bool:
    return is_cohomologous_via(a, b, PhaseMap.one(a.group), radius, tol)


class LatticeGeometry:
    """Gauge data for Z^2 acting on R^2: psi_g solves d psi_g = g*eta - eta.

    theta is the flux per unit cell in turns.  Angles are handled in turns
    so all values at rational points are exact.  ``offsets`` is an optional
    map g -> rational turns adding a constant to each psi_g, which changes
    the resulting multiplier by an explicit coboundary.
    """

    def __init__(self, theta, gauge: str = "landau", base_point: Sequence = (0, 0),
                 offsets: Callable | None = None):
        self.theta = as_rational(theta)
        if gauge not in ("landau", "symmetric"):
            raise MultiplierError(f"unknown gauge {gauge!r}")
        self.gauge = gauge
        self.base_point = tuple(as_rational(x) for x in base_point)
        if len(self.base_point) != 2:
            raise MultiplierError("base point must be a pair")
        self.offsets = offsets
        self.group = FreeAbelianGroup(2)

    def psi_turns(self, g, x: Sequence) -> Fraction:
        """psi_g(x) / (2 pi) at a rational point x."""
        x1, x2 = (as_rational(v) for v in x)
        g1, g2 = g
        if self.gauge == "landau":
            out = self.theta * g1 * x2
        else:
            out = self.theta * (Fraction(g1) * x2 - Fraction(g2) * x1) / 2
        if self.offsets is not None:
            off = as_rational(self.offsets(g))
            if g == (0, 0) and off != 0:
                raise MultiplierError("offset at the identity must vanish")
            out += off
        return out

    def vector_potential_turns(self, x: Sequence, direction: int) -> Fraction:
        """Edge potential for the step x -> x + e_direction, in turns."""
        x1, x2 = (as_rational(v) for v in x)
        if self.gauge == "landau":
            # eta = 2 pi theta x_1 dx_2 integrated along the unit edge
            return Fraction(0) if direction == 0 else self.theta * x1
        if direction == 0:
            return -self.theta * x2 / 2
        return self.theta * x1 / 2

    def plaquette_curvature_turns(self, x: Sequence) -> Fraction:
        """Discrete curl of the edge potential on the unit plaquette at x."""
        x1, x2 = (as_rational(v) for v in x)
        a1 = self.vector_potential_turns((x1, x2), 0)
        a2 = self.vector_potential_turns((x1 + 1, x2), 1)
        a3 = self.vector_potential_turns((x1, x2 + 1), 0)
        a4 = self.vector_potential_turns((x1, x2), 1)
        return a1 + a2 - a3 - a4

    def verify_curvature(self, window: int = 4) -> bool:
        """Flux per plaquette equals theta on an exhaustive window."""
        for x1 in range(-window, window + 1):
            for x2 in range(-window, window + 1):
                if self.plaquette_curvature_turns((x1, x2)) != self.theta:
                    return False
        return True


class GeometricMultiplier(Multiplier):
    """Multiplier built from lattice gauge data at a base point.

    sigma(g, h) = exp(i (psi_h(x0) + psi_g(h x0) - psi_gh(x0))), which is
    independent of x0; the group acts on R^2 by translation.
    """

    kind = "geometric"

    def __init__(self, geometry: LatticeGeometry):
        super().__init__(geometry.group, exact=True)
        self.geometry = geometry

    def turns(self, g, h) -> Fraction:
        x0 = self.geometry.base_point
        hx0 = (x0[0] + h[0], x0[1] + h[1])
        gh = (g[0] + h[0], g[1] + h[1])
        return (
            self.geometry.psi_turns(h, x0)
            + self.geometry.psi_turns(g, hx0)
            - self.geometry.psi_turns(gh, x0)
        )


def geometric_multiplier(geometry: LatticeGeometry) -> GeometricMultiplier:
    return GeometricMultiplier(geometry)


def multiplier_from_json(data: dict, group: Group | None = None) -> Multiplier:
    """Build a multiplier from its JSON form.

    ``group`` supplies the underlying group for kinds that need one
    (table, coboundary twists on finite groups); magnetic and bilinear
    kinds carry their own Z^2 or Z^k structure.
    """
    if not isinstance(data, dict) or "kind" not in data:
        raise MultiplierError("multiplier payload must be an object with a 'kind'")
    kind = data["kind"]
    if kind == "trivial":
        if group is None:
            raise MultiplierError("trivial multiplier needs an explicit group")
        return TrivialMultiplier(group)
    if kind == "magnetic":
        return magnetic_multiplier(data["theta"], data.get("gauge", "landau"))
    if kind == "bilinear":
        pairing = data["pairing"]
        grp = group if isinstance(group, FreeAbelianGroup) else FreeAbelianGroup(len(pairing))
        return BilinearMultiplier(grp, pairing)
    if kind == "table":
        if not isinstance(group, FiniteTableGroup):
            raise MultiplierError("table multiplier needs a finite table group")
        return TableMultiplier(group, data["phases"])
    if kind == "power":
        base = multiplier_from_json(data["base"], group)
        return base.power(data["s"])
    if kind == "coboundary-twist":
        base = multiplier_from_json(data["base"], group)
        zdata = data["z"]
        z = phase_map_from_json(zdata, base.group)
        return base.twist(z)
    raise MultiplierError(f"unknown multiplier kind {kind!r}")


def phase_map_from_json(data: dict, group: Group) -> PhaseMap:
    if not isinstance(data, dict):
        raise MultiplierError("phase map payload must be an object")
    if "entries" in data:
        if not isinstance(group, FiniteTableGroup):
            raise MultiplierError("entry tables need a finite table group")
        return PhaseMap.from_table(group, data["entries"])
    if "character" in data:
        if not isinstance(group, FreeAbelianGroup):
            raise MultiplierError("character data needs a free abelian group")
        return PhaseMap.character_on_lattice(group, data["character"])
    if "quadratic" in data:
        if not isinstance(group, FreeAbelianGroup):
            raise MultiplierError("quadratic data needs a free abelian group")
        return PhaseMap.quadratic_on_lattice(group, data["quadratic"])
    raise MultiplierError("phase map payload needs 'entries', 'character' or 'quadratic'")
