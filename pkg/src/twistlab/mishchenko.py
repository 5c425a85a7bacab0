"""Projections over twisted algebras from covers with lattice transitions.

A finite cover of the circle or torus with a subordinate partition of
unity and locally constant transition elements produces an idempotent
matrix over (functions on the base) tensor (twisted group algebra).  The
off diagonal phases come from the magnetic potential evaluated at the
rational lifts, which makes the idempotent and self adjointness
identities exact at the phase level; the only float content is the
partition of unity.

The pairing of such a projection with a degree one group cochain
recovers the winding of the transition cocycle by a discretized
Stokes sum over the base grid.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

from .algebra import AlgebraElement
from .cohomology import GroupCochain, inhomogeneous
from .groups import FreeAbelianGroup
from .multipliers import (
    LatticeGeometry,
    Multiplier,
    TrivialMultiplier,
    geometric_multiplier,
)
from .phases import Phase, as_rational


class CoverError(Exception):
    pass


def _chi_pair(x: float) -> tuple[float, float]:
    """Partition square roots on the circle: (|cos pi x|, sin pi x)."""
    return abs(math.cos(math.pi * x)), abs(math.sin(math.pi * x))


def _lift_frac(patch: int, x: Fraction) -> Fraction:
    """Lift of x in [0,1) through the chart of circle patch 0 or 1.

    Patch 0 charts (-1/2, 1/2] and patch 1 charts [0, 1); transition
    values are differences of lifts, so they jump by one unit across the
    component of the overlap containing x = 1/2... x = 1.
    """
    x = x % 1
    if patch == 0:
        return x if x <= Fraction(1, 2) else x - 1
    return x


class CircleCover:
    """Two patch cover of the circle with winding scaled transitions.

    The transition cocycle is w times the basic lift-difference cocycle,
    oriented so pairing against the coordinate cochain returns +w.
    """

    def __init__(self, winding: int = 1):
        self.winding = int(winding)
        self.group = FreeAbelianGroup(1)
        self.sigma: Multiplier = TrivialMultiplier(self.group)
        self.n_patches = 2

    def chi(self, patch: int, x) -> float:
        value = _chi_pair(float(x) % 1.0)
        return value[patch]

    def transition(self, i: int, j: int, x) -> tuple:
        if isinstance(x, float):
            xf = Fraction(x).limit_denominator(10 ** 9) % 1
        else:
            xf = as_rational(x) % 1
        step = _lift_frac(i, xf) - _lift_frac(j, xf)
        if step.denominator != 1:
            raise CoverError(f"non integral transition at {x}")
        return (self.winding * int(step),)

    def phase_turns(self, i: int, j: int, x) -> Fraction:
        return Fraction(0)

    def grid(self, n: int) -> list:
        return [Fraction(k, n) for k in range(n)]


class TorusCover:
    """Four patch product cover of the torus over a magnetic lattice.

    Patches are pairs of circle patches; transitions are lift differences
    in Z^2 and the off diagonal phases are minus the magnetic phase of
    the transition element at the rational lift, which closes the
    idempotent identity exactly against the geometric multiplier.
    ``lift_shifts`` moves each patch lift by a fixed lattice vector,
    which conjugates the projection without changing its invariants.
    """

    def __init__(self, geometry: LatticeGeometry,
                 lift_shifts: Sequence[tuple] | None = None):
        self.geometry = geometry
        self.group = FreeAbelianGroup(2)
        self.sigma: Multiplier = geometric_multiplier(geometry)
        self.patches = [(0, 0), (0, 1), (1, 0), (1, 1)]
        self.n_patches = 4
        if lift_shifts is None:
            lift_shifts = [(0, 0)] * 4
        if len(lift_shifts) != 4:
            raise CoverError("one lift shift per patch")
        self.lift_shifts = [tuple(int(v) for v in s) for s in lift_shifts]

    def chi(self, patch: int, x) -> float:
        p = self.patches[patch]
        return self.chi1(p[0], x[0]) * self.chi1(p[1], x[1])

    @staticmethod
    def chi1(circle_patch: int, coord) -> float:
        return _chi_pair(float(coord) % 1.0)[circle_patch]

    def lift(self, patch: int, x) -> tuple:
        p = self.patches[patch]
        s = self.lift_shifts[patch]
        return (
            _lift_frac(p[0], as_rational(x[0])) + s[0],
            _lift_frac(p[1], as_rational(x[1])) + s[1],
        )

    def transition(self, i: int, j: int, x) -> tuple:
        li = self.lift(i, x)
        lj = self.lift(j, x)
        step = (li[0] - lj[0], li[1] - lj[1])
        if step[0].denominator != 1 or step[1].denominator != 1:
            raise CoverError(f"non integral transition at {x}")
        return (int(step[0]), int(step[1]))

    def phase_turns(self, i: int, j: int, x) -> Fraction:
        g = self.transition(i, j, x)
        return -self.geometry.psi_turns(g, self.lift(j, x))

    def grid(self, n: int) -> list:
        return [
            (Fraction(a, n), Fraction(b, n)) for a in range(n) for b in range(n)
        ]


class Projection:
    """Matrix of algebra elements chi_i chi_j e^{2 pi i phase} delta_g."""

    def __init__(self, cover):
        self.cover = cover
        self.sigma = cover.sigma
        self.group = cover.group

    def matrix_at(self, x) -> list:
        cover = self.cover
        n = cover.n_patches
        chis = [cover.chi(i, x) for i in range(n)]
        rows = []
        for i in range(n):
            row = []
            for j in range(n):
                w = chis[i] * chis[j]
                if w == 0.0:
                    row.append(AlgebraElement(self.sigma, []))
                    continue
                g = cover.transition(i, j, x)
                phase = Phase(cover.phase_turns(i, j, x)).value
                row.append(AlgebraElement(self.sigma, [(g, w * phase)]))
            rows.append(row)
        return rows

    def _mat_mul(self, a: list, b: list) -> list:
        n = len(a)
        out = []
        for i in range(n):
            row = []
            for k in range(n):
                acc = AlgebraElement(self.sigma, [])
                for j in range(n):
                    acc = acc + a[i][j].convolve(b[j][k])
                row.append(acc)
            out.append(row)
        return out

    def _mat_star(self, a: list) -> list:
        n = len(a)
        return [[a[j][i].star() for j in range(n)] for i in range(n)]

    def defects_at(self, x) -> tuple[float, float]:
        """(idempotent, self adjointness) defects in the l1 coefficient norm."""
        p = self.matrix_at(x)
        p2 = self._mat_mul(p, p)
        ps = self._mat_star(p)
        worst_idem = 0.0
        worst_star = 0.0
        n = len(p)
        for i in range(n):
            for j in range(n):
                worst_idem = max(worst_idem, (p2[i][j] - p[i][j]).norm_l1())
                worst_star = max(worst_star, (ps[i][j] - p[i][j]).norm_l1())
        return worst_idem, worst_star

    def verify(self, n_grid: int = 32) -> dict:
        worst_idem = 0.0
        worst_star = 0.0
        count = 0
        for x in self.cover.grid(n_grid):
            idem, star = self.defects_at(x)
            worst_idem = max(worst_idem, idem)
            worst_star = max(worst_star, star)
            count += 1
        return {
            "points": count,
            "idempotent_defect": worst_idem,
            "selfadjoint_defect": worst_star,
        }

    def rank_trace(self, n_grid: int = 64) -> float:
        """Grid average of the fiberwise trace sum_i (P_ii)_e."""
        total = 0.0
        pts = self.cover.grid(n_grid)
        e = self.group.identity()
        for x in pts:
            for i in range(self.cover.n_patches):
                chi = self.cover.chi(i, x)
                if chi == 0.0:
                    continue
                g = self.cover.transition(i, i, x)
                if g == e:
                    total += chi * chi * Phase(self.cover.phase_turns(i, i, x)).value.real
        return total / len(pts)


def circle_projection(winding: int = 1) -> Projection:
    return Projection(CircleCover(winding))


def torus_projection(geometry: LatticeGeometry,
                     lift_shifts: Sequence[tuple] | None = None) -> Projection:
    return Projection(TorusCover(geometry, lift_shifts))


def lott_pairing_circle(cover: CircleCover, cochain: GroupCochain | None = None,
                        n_grid: int = 1024) -> float:
    """Pairing of the circle projection with a degree one cochain.

    w_c = sum over the grid of chi_{i0}^2 d(chi_{i1}^2) cbar(g_{i1 i0})
    with centered differences; for the coordinate cochain this is the
    transition winding, normalized so winding one gives +1.
    """
    if cochain is None:
        cochain = GroupCochain(cover.group, 1, lambda g0, g1: float(g1[0] - g0[0]), "z")
    if cochain.degree != 1:
        raise CoverError("the circle pairing takes a degree one cochain")
    cbar = inhomogeneous(cochain)
    xs = cover.grid(n_grid)
    n = len(xs)
    chi_sq = [
        [cover.chi(i, x) ** 2 for x in xs] for i in range(cover.n_patches)
    ]
    total = 0.0
    for k, x in enumerate(xs):
        for i0 in range(cover.n_patches):
            w0 = chi_sq[i0][k]
            if w0 == 0.0:
                continue
            for i1 in range(cover.n_patches):
                diff = (chi_sq[i1][(k + 1) % n] - chi_sq[i1][(k - 1) % n]) / 2.0
                if diff == 0.0:
                    continue
                g = cover.transition(i0, i1, xs[k])
                value = cbar(g)
                if value:
                    total += w0 * diff * value.real
    return total
