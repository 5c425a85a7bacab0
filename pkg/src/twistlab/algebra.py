"""Finitely supported elements of a twisted group algebra.

An element is a complex linear combination of point masses delta_g with
twisted convolution

    (a * b)(g) = sum over g1 g2 = g of a(g1) b(g2) sigma(g1, g2)

and involution (c delta_g)^* = conj(c) conj(sigma(g, g^-1)) delta_{g^-1}.
Coefficients below PRUNE_TOL are dropped after every operation.
"""

from __future__ import annotations

import random
from typing import Iterable, Mapping

from .groups import Group, GroupError
from .multipliers import Multiplier, MultiplierError, PhaseMap, is_cohomologous_via

PRUNE_TOL = 1e-15


class AlgebraError(ValueError):
    """Raised for mismatched algebras or malformed element data."""


def _same_multiplier(a: Multiplier, b: Multiplier) -> bool:
    if a is b:
        return True
    if type(a) is not type(b):
        return False
    try:
        return a.to_json() == b.to_json()
    except MultiplierError:
        return False


class AlgebraElement:
    """A finitely supported function on the group, tied to a multiplier."""

    __slots__ = ("sigma", "group", "coeffs")

    def __init__(self, sigma: Multiplier, coeffs: Mapping | Iterable = (), check: bool = True):
        self.sigma = sigma
        self.group = sigma.group
        items = coeffs.items() if isinstance(coeffs, Mapping) else coeffs
        data: dict = {}
        for g, c in items:
            c = complex(c)
            if check:
                self.group.check_element(g)
            if g in data:
                c = data[g] + c
            data[g] = c
        self.coeffs = {g: c for g, c in data.items() if abs(c) > PRUNE_TOL}

    @classmethod
    def delta(cls, sigma: Multiplier, g, coeff: complex = 1.0) -> "AlgebraElement":
        return cls(sigma, [(g, coeff)])

    @classmethod
    def unit(cls, sigma: Multiplier) -> "AlgebraElement":
        return cls.delta(sigma, sigma.group.identity())

    @classmethod
    def zero(cls, sigma: Multiplier) -> "AlgebraElement":
        return cls(sigma, {})

    def coefficient(self, g) -> complex:
        return self.coeffs.get(g, 0.0 + 0.0j)

    def support(self) -> list:
        return sorted(self.coeffs, key=self.group.element_key)

    def support_radius(self) -> int:
        """Largest word length appearing in the support (0 for the zero element)."""
        if not self.coeffs:
            return 0
        return max(self.group.word_length(g) for g in self.coeffs)

    def norm_l1(self) -> float:
        return sum(abs(c) for c in self.coeffs.values())

    def norm_l2(self) -> float:
        return sum(abs(c) ** 2 for c in self.coeffs.values()) ** 0.5

    def _require_same_algebra(self, other: "AlgebraElement") -> None:
        if self.group != other.group or not _same_multiplier(self.sigma, other.sigma):
            raise AlgebraError("elements live in different twisted algebras")

    def __add__(self, other: "AlgebraElement") -> "AlgebraElement":
        if not isinstance(other, AlgebraElement):
            return NotImplemented
        self._require_same_algebra(other)
        out = dict(self.coeffs)
        for g, c in other.coeffs.items():
            out[g] = out.get(g, 0.0) + c
        return AlgebraElement(self.sigma, out, check=False)

    def __sub__(self, other: "AlgebraElement") -> "AlgebraElement":
        if not isinstance(other, AlgebraElement):
            return NotImplemented
        return self + (-1.0) * other

    def __neg__(self) -> "AlgebraElement":
        return (-1.0) * self

    def __mul__(self, other):
        if isinstance(other, AlgebraElement):
            return self.convolve(other)
        return AlgebraElement(
            self.sigma, {g: c * complex(other) for g, c in self.coeffs.items()}, check=False
        )

    def __rmul__(self, other):
        return AlgebraElement(
            self.sigma, {g: complex(other) * c for g, c in self.coeffs.items()}, check=False
        )

    def convolve(self, other: "AlgebraElement") -> "AlgebraElement":
        self._require_same_algebra(other)
        grp, sigma = self.group, self.sigma
        out: dict = {}
        for g1, c1 in self.coeffs.items():
            for g2, c2 in other.coeffs.items():
                g = grp.multiply(g1, g2)
                out[g] = out.get(g, 0.0) + c1 * c2 * sigma.value(g1, g2)
        return AlgebraElement(sigma, out, check=False)

    def star(self) -> "AlgebraElement":
        """Involution: (c delta_g)^* = conj(c) conj(sigma(g, g^-1)) delta_{g^-1}."""
        grp, sigma = self.group, self.sigma
        out = {}
        for g, c in self.coeffs.items():
            ginv = grp.inverse(g)
            out[ginv] = c.conjugate() * sigma.value(g, ginv).conjugate()
        return AlgebraElement(sigma, out, check=False)

    def apply_phase_map(self, z: PhaseMap, target: Multiplier) -> "AlgebraElement":
        """delta_g -> z(g) delta_g, reinterpreted over the target multiplier."""
        out = {g: c * z(g) for g, c in self.coeffs.items()}
        return AlgebraElement(target, out, check=False)

    def approx_equal(self, other: "AlgebraElement", tol: float = 1e-10) -> bool:
        keys = set(self.coeffs) | set(other.coeffs)
        return all(abs(self.coefficient(g) - other.coefficient(g)) <= tol for g in keys)

    def to_json(self) -> dict:
        terms = []
        for g in self.support():
            c = self.coeffs[g]
            terms.append({"g": self.group.element_to_json(g), "re": c.real, "im": c.imag})
        return {"terms": terms}

    def __repr__(self) -> str:
        parts = []
        for g in self.support()[:6]:
            parts.append(f"{self.coeffs[g]:.3g}*d[{g}]")
        body = " + ".join(parts) if parts else "0"
        if len(self.coeffs) > 6:
            body += f" + ... ({len(self.coeffs)} terms)"
        return f"AlgebraElement({body})"


def element_from_json(sigma: Multiplier, data: dict) -> AlgebraElement:
    if not isinstance(data, dict) or "terms" not in data:
        raise AlgebraError("element payload must be an object with 'terms'")
    grp = sigma.group
    items = []
    for term in data["terms"]:
        try:
            g = grp.element_from_json(term["g"])
        except GroupError as exc:
            raise AlgebraError(str(exc)) from exc
        items.append((g, complex(float(term.get("re", 0.0)), float(term.get("im", 0.0)))))
    return AlgebraElement(sigma, items)


def projective_iso(z: PhaseMap, a: AlgebraElement, target: Multiplier,
                   check: bool = True, radius: int = 4) -> AlgebraElement:
    """The isomorphism b_z: delta_g -> z(g) delta_g between twisted algebras.

    Multiplying coefficients by z shifts the multiplier by the coboundary
    of the conjugate map, so the target must equal sigma * d(conj z);
    with check=True that relation is verified on a finite pair set before
    mapping.
    """
    if check and not is_cohomologous_via(a.sigma, target, z.conjugate(), radius=radius):
        raise MultiplierError("target multiplier is not sigma * d(conj z) for the given z")
    return a.apply_phase_map(z, target)


def random_element(sigma: Multiplier, rng: random.Random, n_terms: int = 4,
                   spread: int = 3) -> AlgebraElement:
    """Deterministic pseudo-random element for sampling-based checks."""
    items = []
    for _ in range(n_terms):
        g = sigma.group.random_element(rng, spread)
        c = complex(rng.uniform(-1, 1), rng.uniform(-1, 1))
        items.append((g, c))
    return AlgebraElement(sigma, items)
