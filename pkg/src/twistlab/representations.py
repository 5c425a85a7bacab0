"""Finite dimensional pictures of twisted algebra elements.

Two routes: ball-truncated compressions of the left regular
representation, and clock-and-shift Bloch fibers for Z^2 elements with a
rational magnetic multiplier.  The fiber route powers the Hofstadter
butterfly sweep and the k-grid trace formulas.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator, Sequence

import numpy as np

from .algebra import AlgebraElement
from .groups import FreeAbelianGroup
from .multipliers import Multiplier, MultiplierError, magnetic_multiplier
from .phases import Phase


@dataclass
class TruncatedOperator:
    """Compression of left convolution by an element to a word-length ball."""

    basis: list
    index: dict
    matrix: np.ndarray
    radius: int
    element: AlgebraElement

    @property
    def dim(self) -> int:
        return len(self.basis)


def left_regular(a: AlgebraElement, radius: int) -> TruncatedOperator:
    """Matrix of x -> a * x compressed to the ball of the given radius.

    Entry (gx, x) equals a(g) sigma(g, x); products of truncations agree
    with the truncation of the product on the sub-ball whose radius is
    reduced by the support radii of the factors.
    """
    grp = a.group
    basis = grp.ball(radius)
    index = {g: i for i, g in enumerate(basis)}
    mat = np.zeros((len(basis), len(basis)), dtype=complex)
    for g, c in a.coeffs.items():
        for x in basis:
            gx = grp.multiply(g, x)
            row = index.get(gx)
            if row is not None:
                mat[row, index[x]] += c * a.sigma.value(g, x)
    return TruncatedOperator(basis, index, mat, radius, a)


def harper_element(sigma: Multiplier, coefficients: Sequence[float] = (1.0, 1.0, 1.0, 1.0)) -> AlgebraElement:
    """Nearest neighbour hopping element on Z^2.

    coefficients = (c1, c2, c3, c4) weight delta_(1,0), its star,
    delta_(0,1) and its star; equal real pairs give a self adjoint element.
    """
    if not isinstance(sigma.group, FreeAbelianGroup) or sigma.group.rank != 2:
        raise MultiplierError("harper elements live on Z^2")
    c1, c2, c3, c4 = (complex(c) for c in coefficients)
    dx = AlgebraElement.delta(sigma, (1, 0))
    dy = AlgebraElement.delta(sigma, (0, 1))
    return c1 * dx + c2 * dx.star() + c3 * dy + c4 * dy.star()


def _probe_bilinear_turns(sigma: Multiplier, radius: int = 3):
    """Recover the rational pairing matrix of a bilinear multiplier on Z^2.

    Probes the generator pairs and then verifies the bilinear form against
    sigma exactly on a ball; raises when sigma is not of that shape.
    """
    grp = sigma.group
    if not isinstance(grp, FreeAbelianGroup) or grp.rank != 2:
        raise MultiplierError("Bloch fibers need a multiplier on Z^2")
    if not sigma.is_exact:
        raise MultiplierError("Bloch fibers need exact phase data")
    e1, e2 = (1, 0), (0, 1)
    p = [[Fraction(sigma.turns(a, b)) for b in (e1, e2)] for a in (e1, e2)]
    ball = grp.ball(radius)
    for g in ball:
        for h in ball:
            expected = (
                p[0][0] * g[0] * h[0]
                + p[0][1] * g[0] * h[1]
                + p[1][0] * g[1] * h[0]
                + p[1][1] * g[1] * h[1]
            )
            if (expected - Fraction(sigma.turns(g, h))) % 1 != 0:
                raise MultiplierError("multiplier is not bilinear; no Bloch fiber available")
    return p


class BlochMap:
    """Clock-and-shift fibers for a rational magnetic multiplier on Z^2.

    At flux p/q the generators map to u = exp(i k1) clock and
    v = exp(i k2) shift with u v = exp(2 pi i p / q) v u, and a quadratic
    phase correction extends this to all of Z^2 so that
    T(g) T(h) = sigma(g, h) T(g + h) holds exactly per k.
    """

    def __init__(self, sigma: Multiplier):
        self.sigma = sigma
        pairing = _probe_bilinear_turns(sigma)
        flux = pairing[0][1] - pairing[1][0]
        theta = flux % 1
        self.theta = theta
        self.q = theta.denominator
        self.p = theta.numerator
        # Symmetric matrix m with T(g) = exp(-pi i g^T m g) u^g1 v^g2.
        self.correction = [
            [pairing[0][0], pairing[0][1]],
            [pairing[1][0] + flux, pairing[1][1]],
        ]
        if self.correction[0][1] != self.correction[1][0]:
            raise MultiplierError("pairing cannot be symmetrized for fiber phases")
        q = self.q
        self.zeta = cmath.exp(2j * cmath.pi * self.p / q)
        self.clock_powers = np.arange(q)

    def phase_correction(self, g) -> complex:
        m = self.correction
        turns = -(m[0][0] * g[0] * g[0] + 2 * m[0][1] * g[0] * g[1] + m[1][1] * g[1] * g[1]) / 2
        return Phase(turns).value

    def rep_matrix(self, g, k1: float, k2: float) -> np.ndarray:
        """T(g) at Bloch momentum (k1, k2), a q x q unitary."""
        q = self.q
        mat = np.zeros((q, q), dtype=complex)
        scalar = self.phase_correction(g) * cmath.exp(1j * (k1 * g[0] + k2 * g[1]))
        for j in range(q):
            i = (j + g[1]) % q
            mat[i, j] = scalar * self.zeta ** ((i * g[0]) % q)
        return mat

    def fiber(self, a: AlgebraElement, k1: float, k2: float) -> np.ndarray:
        out = np.zeros((self.q, self.q), dtype=complex)
        for g, c in a.coeffs.items():
            out += c * self.rep_matrix(g, k1, k2)
        return out

    def fiber_stack(self, a: AlgebraElement, k1s: np.ndarray, k2s: np.ndarray) -> np.ndarray:
        """Stacked fibers over the k1 x k2 grid, shape (len(k1s)*len(k2s), q, q).

        Row order is lexicographic in (k1 index, k2 index).
        """
        q = self.q
        grid1, grid2 = np.meshgrid(k1s, k2s, indexing="ij")
        k1f = grid1.reshape(-1)
        k2f = grid2.reshape(-1)
        stack = np.zeros((k1f.size, q, q), dtype=complex)
        for g, c in a.coeffs.items():
            base = np.zeros((q, q), dtype=complex)
            scalar = self.phase_correction(g)
            for j in range(q):
                i = (j + g[1]) % q
                base[i, j] = scalar * self.zeta ** ((i * g[0]) % q)
            wave = np.exp(1j * (k1f * g[0] + k2f * g[1]))
            stack += c * wave[:, None, None] * base[None, :, :]
        return stack

    def grid(self, n: int) -> np.ndarray:
        """Uniform Bloch grid on [0, 2 pi), endpoint excluded."""
        return 2.0 * np.pi * np.arange(n) / n

    def extract_coefficient(self, stack: np.ndarray, g, k1s: np.ndarray, k2s: np.ndarray) -> complex:
        """Coefficient at g of the element represented by the fiber stack.

        Uses (1/q) tr(X_k T_k(g)^*) averaged over the grid, which isolates
        the coefficient once the grid is finer than the support.
        """
        grid1, grid2 = np.meshgrid(k1s, k2s, indexing="ij")
        k1f = grid1.reshape(-1)
        k2f = grid2.reshape(-1)
        q = self.q
        base = np.zeros((q, q), dtype=complex)
        scalar = self.phase_correction(g)
        for j in range(q):
            i = (j + g[1]) % q
            base[i, j] = scalar * self.zeta ** ((i * g[0]) % q)
        wave = np.exp(1j * (k1f * g[0] + k2f * g[1]))
        tmats = wave[:, None, None] * base[None, :, :]
        inner = np.einsum("kij,kij->k", stack, tmats.conj())
        return complex(inner.mean() / q)


@dataclass
class SpectrumResult:
    """Bloch spectrum data over a k-grid."""

    theta: Fraction
    q: int
    kgrid: int
    eigenvalues: np.ndarray  # shape (kgrid**2, q), ascending per row
    bands: list = field(default_factory=list)  # per sorted index (lo, hi)
    gaps: list = field(default_factory=list)  # (gap lo, gap hi) between separated bands
    threshold: float = 0.0

    def flat(self) -> np.ndarray:
        return np.sort(self.eigenvalues.reshape(-1))

    def distinct_band_count(self) -> int:
        """Number of per-index bands after merging proper overlaps."""
        count = 0
        current_hi = None
        for lo, hi in self.bands:
            if current_hi is None or lo > current_hi + self.threshold or abs(lo - current_hi) <= self.threshold:
                count += 1
            current_hi = hi if current_hi is None else max(current_hi, hi)
        return count


def spectrum_union(a: AlgebraElement, kgrid: int = 64, bloch: BlochMap | None = None) -> SpectrumResult:
    """Union of Bloch fiber spectra over a uniform k-grid.

    Band intervals are read per sorted eigenvalue index, so touching bands
    are kept separate; gaps below the threshold max(1e-9, 1e-4 * width)
    count as touching.
    """
    bm = bloch if bloch is not None else BlochMap(a.sigma)
    ks = bm.grid(kgrid)
    stack = bm.fiber_stack(a, ks, ks)
    herm_defect = float(np.abs(stack - stack.conj().transpose(0, 2, 1)).max())
    if herm_defect > 1e-9:
        raise ValueError(f"fiber matrices are not Hermitian (defect {herm_defect:.2e})")
    eigs = np.linalg.eigvalsh(stack)
    lo = float(eigs.min())
    hi = float(eigs.max())
    threshold = max(1e-9, 1e-4 * (hi - lo))
    bands = [(float(eigs[:, b].min()), float(eigs[:, b].max())) for b in range(bm.q)]
    gaps = []
    for b in range(bm.q - 1):
        gap_lo = bands[b][1]
        gap_hi = bands[b + 1][0]
        if gap_hi - gap_lo > threshold:
            gaps.append((gap_lo, gap_hi))
    return SpectrumResult(bm.theta, bm.q, kgrid, eigs, bands, gaps, threshold)


def algebraic_moment(a: AlgebraElement, n: int) -> complex:
    """tr2 of the n-th convolution power, computed in the algebra."""
    power = AlgebraElement.unit(a.sigma)
    for _ in range(n):
        power = power * a
    return power.coefficient(a.group.identity())


def grid_moment(a: AlgebraElement, n: int, kgrid: int, bloch: BlochMap | None = None) -> float:
    """k-grid average of the normalized fiber trace of the n-th power."""
    bm = bloch if bloch is not None else BlochMap(a.sigma)
    ks = bm.grid(kgrid)
    eigs = np.linalg.eigvalsh(bm.fiber_stack(a, ks, ks))
    return float((eigs ** n).mean())


@dataclass
class MomentStudy:
    orders: list
    grids: list
    errors: dict  # n -> list of |exact - grid| per grid
    convergence: dict  # n -> fitted order (inf when saturated)
    saturation: float = 1e-12

    def min_order(self) -> float:
        return min(self.convergence.values())


def moment_match_study(a: AlgebraElement, n_max: int = 8, grids: Sequence[int] = (16, 32, 64)) -> MomentStudy:
    """Compare algebraic moments with k-grid fiber averages under grid doubling.

    The uniform trigonometric grid integrates the fiber moments exactly
    once the grid resolves the support, so errors typically sit at the
    noise floor; such saturated sequences report infinite order.
    """
    bm = BlochMap(a.sigma)
    exact = {n: algebraic_moment(a, n) for n in range(1, n_max + 1)}
    scale = max(1.0, max(abs(v) for v in exact.values()))
    errors: dict = {n: [] for n in exact}
    for n_grid in grids:
        ks = bm.grid(n_grid)
        eigs = np.linalg.eigvalsh(bm.fiber_stack(a, ks, ks))
        for n in exact:
            approx = float((eigs ** n).mean())
            errors[n].append(abs(approx - exact[n].real))
    saturation = 1e-12 * scale
    convergence = {}
    for n, errs in errors.items():
        if errs[-1] <= saturation:
            convergence[n] = math.inf
            continue
        rates = []
        for i in range(len(errs) - 1):
            if errs[i] <= saturation or errs[i + 1] <= saturation:
                rates.append(math.inf)
            else:
                rates.append(math.log2(errs[i] / errs[i + 1]))
        convergence[n] = min(rates) if rates else math.inf
    return MomentStudy(list(exact), list(grids), errors, convergence, saturation)


def reduced_fractions(qmax: int) -> Iterator[Fraction]:
    """0/1 and all reduced p/q in (0,1) with q <= qmax, sorted by (q, p)."""
    yield Fraction(0)
    for q in range(2, qmax + 1):
        for p in range(1, q):
            if math.gcd(p, q) == 1:
                yield Fraction(p, q)


def butterfly_rows(qmax: int, kgrid: int, coefficients: Sequence[float] = (1.0, 1.0, 1.0, 1.0)) -> Iterator[str]:
    """CSV rows of the Hofstadter sweep, deterministic order, 17 digit floats.

    Columns: theta_num,theta_den,k1,k2,band_index,eigenvalue.
    """
    yield "theta_num,theta_den,k1,k2,band_index,eigenvalue"
    for theta in reduced_fractions(qmax):
        sigma = magnetic_multiplier(theta, "landau")
        h = harper_element(sigma, coefficients)
        bm = BlochMap(sigma)
        ks = bm.grid(kgrid)
        eigs = np.linalg.eigvalsh(bm.fiber_stack(h, ks, ks))
        q = bm.q
        idx = 0
        for i1 in range(kgrid):
            for i2 in range(kgrid):
                for b in range(q):
                    val = eigs[idx, b]
                    yield (
                        f"{theta.numerator},{theta.denominator},"
                        f"{ks[i1]:.17g},{ks[i2]:.17g},{b},{val:.17g}"
                    )
                idx += 1


def hausdorff_distance(a: Iterable[float], b: Iterable[float]) -> float:
    """Symmetric Hausdorff distance between two finite point sets."""
    av = np.asarray(sorted(a), dtype=float)
    bv = np.asarray(sorted(b), dtype=float)
    return max(_one_sided(av, bv), _one_sided(bv, av))


def _one_sided(av: np.ndarray, bv: np.ndarray) -> float:
    pos = np.searchsorted(bv, av)
    pos = np.clip(pos, 1, len(bv) - 1) if len(bv) > 1 else np.zeros_like(pos)
    left = np.abs(av - bv[np.maximum(pos - 1, 0)])
    right = np.abs(av - bv[np.minimum(pos, len(bv) - 1)])
    return float(np.minimum(left, right).max())


def truncation_spectrum(a: AlgebraElement, radius: int) -> np.ndarray:
    """Eigenvalues of the ball truncation (requires a self adjoint element)."""
    op = left_regular(a, radius)
    defect = float(np.abs(op.matrix - op.matrix.conj().T).max())
    if defect > 1e-9:
        raise ValueError(f"truncated matrix is not Hermitian (defect {defect:.2e})")
    return np.linalg.eigvalsh(op.matrix)


def truncation_study(a: AlgebraElement, radii: Sequence[int], kgrid: int = 64) -> dict:
    """Coverage of the Bloch spectrum by truncation spectra as the ball grows.

    Reports, per radius, the one sided distance from the Bloch spectrum to
    the truncation eigenvalues; this shrinks as the ball exhausts the
    group.  The opposite direction is also recorded since truncation can
    place boundary modes inside spectral gaps.
    """
    bloch = spectrum_union(a, kgrid).flat()
    coverage = []
    spillover = []
    for r in radii:
        eigs = truncation_spectrum(a, r)
        coverage.append(_one_sided(bloch, eigs))
        spillover.append(_one_sided(eigs, bloch))
    return {"radii": list(radii), "coverage": coverage, "spillover": spillover}
