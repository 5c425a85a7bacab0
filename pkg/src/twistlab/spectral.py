"""Finite dimensional spectral invariants: eta, spectral flow, index.

The eigensolver is a cyclic Jacobi sweep for complex Hermitian matrices
with a fixed pivot order, so results are deterministic given the input
bits.  Eta invariants come in a closed form (half the signature) and a
quadrature form for the heat-kernel integral; both support the two
normalizations found in the literature (with and without the factor 2 in
the denominator).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .algebra import AlgebraElement
from .phases import as_rational


class SpectralError(ValueError):
    """Raised for non-Hermitian input or insufficient quadrature windows."""


def _as_matrix(a) -> np.ndarray:
    mat = np.asarray(a, dtype=complex)
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise SpectralError("expected a square matrix")
    return mat


def require_hermitian(a, tol: float = 1e-9) -> np.ndarray:
    mat = _as_matrix(a)
    defect = float(np.abs(mat - mat.conj().T).max()) if mat.size else 0.0
    if defect > tol * max(1.0, float(np.abs(mat).max())):
        raise SpectralError(f"matrix is not Hermitian (defect {defect:.3e})")
    return mat


@dataclass
class EigenDecomposition:
    eigenvalues: np.ndarray  # ascending
    vectors: np.ndarray  # columns, unitary
    residual: float  # max column norm of A V - V diag(lambda)
    sweeps: int


def eigh(a, tol: float = 1e-13, max_sweeps: int = 60) -> EigenDecomposition:
    """Cyclic Jacobi diagonalization of a complex Hermitian matrix.

    Pivots run row major over the strict upper triangle every sweep;
    sweeps stop when the off-diagonal Frobenius mass falls below
    tol * ||A||.  Deterministic: identical input bits give identical
    output bits.
    """
    a = require_hermitian(a)
    n = a.shape[0]
    if n == 0:
        return EigenDecomposition(np.zeros(0), np.zeros((0, 0), dtype=complex), 0.0, 0)
    work = a.astype(complex, copy=True)
    vecs = np.eye(n, dtype=complex)
    norm = float(np.linalg.norm(work))
    if norm == 0.0:
        return EigenDecomposition(np.zeros(n), vecs, 0.0, 0)
    stop = tol * norm
    rotate_tol = stop / max(1, n * n)
    sweeps = 0
    for sweep in range(max_sweeps):
        off = float(np.linalg.norm(work - np.diag(np.diag(work))))
        if off <= stop:
            break
        sweeps = sweep + 1
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = work[p, q]
                r = abs(apq)
                if r <= rotate_tol:
                    continue
                phi = apq / r
                phibar = phi.conjugate()
                app = work[p, p].real
                aqq = work[q, q].real
                tau = (aqq - app) / (2.0 * r)
                t = math.copysign(1.0, tau) / (abs(tau) + math.sqrt(1.0 + tau * tau))
                c = 1.0 / math.sqrt(1.0 + t * t)
                s = t * c
                # Unitary with (p, q) block [[c, s phi], [-s conj(phi), c]],
                # chosen so the conjugated matrix has zero (p, q) entry.
                col_p = work[:, p].copy()
                col_q = work[:, q].copy()
                work[:, p] = c * col_p - s * phibar * col_q
                work[:, q] = s * phi * col_p + c * col_q
                row_p = work[p, :].copy()
                row_q = work[q, :].copy()
                work[p, :] = c * row_p - s * phi * row_q
                work[q, :] = s * phibar * row_p + c * row_q
                work[p, q] = 0.0
                work[q, p] = 0.0
                vcol_p = vecs[:, p].copy()
                vcol_q = vecs[:, q].copy()
                vecs[:, p] = c * vcol_p - s * phibar * vcol_q
                vecs[:, q] = s * phi * vcol_p + c * vcol_q
    diag = np.real(np.diag(work))
    order = np.argsort(diag, kind="stable")
    eigenvalues = diag[order]
    vectors = vecs[:, order]
    residual = float(np.abs(a @ vectors - vectors * eigenvalues[None, :]).max())
    return EigenDecomposition(eigenvalues, vectors, residual, sweeps)


def eigvalsh(a, tol: float = 1e-13) -> np.ndarray:
    return eigh(a, tol).eigenvalues


def default_zero_tol(eigenvalues: np.ndarray) -> float:
    """Relative kernel threshold: 1e-9 times the spectral radius (min 1e-12)."""
    radius = float(np.abs(eigenvalues).max()) if eigenvalues.size else 0.0
    return max(1e-12, 1e-9 * radius)


def _eta_scale(normalization: str) -> float:
    if normalization == "half":
        return 0.5
    if normalization == "full":
        return 1.0
    raise SpectralError(f"unknown eta normalization {normalization!r}")


@dataclass
class KernelReport:
    dim: int
    zero_tol: float
    ambiguous: list  # eigenvalues inside [zero_tol/10, zero_tol*10]


def kernel_report(eigenvalues: np.ndarray, zero_tol: float | None = None) -> KernelReport:
    ev = np.asarray(eigenvalues, dtype=float)
    if zero_tol is None:
        zero_tol = default_zero_tol(ev)
    dim = int(np.sum(np.abs(ev) <= zero_tol))
    band = [float(x) for x in ev if zero_tol / 10 < abs(x) < zero_tol * 10]
    return KernelReport(dim, zero_tol, band)


def eta_closed_form(a, zero_tol: float | None = None, normalization: str = "half") -> float:
    """Signature form of the eta invariant of a Hermitian matrix.

    Each eigenvalue above the kernel threshold contributes
    scale * sign(lambda), where scale is 1/2 ('half', the default) or 1
    ('full', the convention without the 2 in the denominator).
    """
    ev = a if isinstance(a, np.ndarray) and a.ndim == 1 else eigh(a).eigenvalues
    if zero_tol is None:
        zero_tol = default_zero_tol(ev)
    scale = _eta_scale(normalization)
    return scale * float(np.sum(np.sign(ev[np.abs(ev) > zero_tol])))


@dataclass
class EtaResult:
    eta: float
    error_bound: float
    method: str
    params: dict = field(default_factory=dict)
    germ: dict | None = None  # rational s -> eta for power families
    kernel: KernelReport | None = None


def _head_integral(ev: np.ndarray, u_max: float, rel_tol: float) -> tuple[float, float]:
    """Adaptive Simpson for (1/sqrt(pi)) * int_0^{u_max} sum(l exp(-u^2 l^2)) du."""

    def f(u: float) -> float:
        return float(np.sum(ev * np.exp(-(u * u) * ev * ev))) / math.sqrt(math.pi)

    panels = 8
    prev = None
    estimate = 0.0
    change = 0.0
    for _ in range(14):
        xs = np.linspace(0.0, u_max, 2 * panels + 1)
        ys = np.array([f(x) for x in xs])
        h = u_max / (2 * panels)
        estimate = h / 3.0 * (ys[0] + ys[-1] + 4.0 * ys[1:-1:2].sum() + 2.0 * ys[2:-2:2].sum())
        if prev is not None:
            change = abs(estimate - prev)
            if change <= rel_tol * (1.0 + abs(estimate)):
                break
        prev = estimate
        panels *= 2
    return estimate, change


def eta_quadrature(a, t_max: float | None = None, zero_tol: float | None = None,
                   normalization: str = "half", rel_tol: float = 1e-9) -> EtaResult:
    """Eta via the heat-kernel integral (1/(2 sqrt(pi))) int t^{-1/2} Tr(A e^{-t A^2}) dt.

    The integral over [0, t_max] is evaluated with adaptive Simpson after
    the substitution t = u^2; the tail beyond t_max is bounded by
    sum erfc(|lambda| sqrt(t_max)) / 2 over nonzero eigenvalues.  When the
    requested window makes the tail bound exceed 1e-6 the call fails and
    reports the t_max needed.
    """
    ev = eigh(a).eigenvalues
    if zero_tol is None:
        zero_tol = default_zero_tol(ev)
    nonzero = ev[np.abs(ev) > zero_tol]
    scale = _eta_scale(normalization)
    if nonzero.size == 0:
        return EtaResult(0.0, 0.0, "quadrature", {"t_max": 0.0, "zero_tol": zero_tol})
    lam_min = float(np.abs(nonzero).min())
    required = (5.0 / lam_min) ** 2
    if t_max is None:
        t_max = required
    tail_bound = 0.5 * float(np.sum([math.erfc(abs(l) * math.sqrt(t_max)) for l in nonzero]))
    if tail_bound > 1e-6:
        raise SpectralError(
            f"tail bound {tail_bound:.2e} exceeds 1e-6; use t_max >= {required:.6g}"
        )
    head, quad_err = _head_integral(nonzero, math.sqrt(t_max), rel_tol)
    eta = 2.0 * scale * head
    error = 2.0 * scale * (quad_err + tail_bound)
    return EtaResult(eta, error, "quadrature",
                     {"t_max": t_max, "zero_tol": zero_tol, "normalization": normalization},
                     kernel=kernel_report(ev, zero_tol))


def _weights_of_trace(tau, group) -> dict:
    """Finite weight map g -> c_g of a linear functional tau(x) = sum c_g x_g."""
    weights = getattr(tau, "weights", None)
    if callable(weights):
        return weights()
    raise SpectralError("trace functional does not expose finite weights")


def eta_operator(operator, tau=None, method: str = "bloch", normalization: str = "half",
                 kgrid: int = 64, radius: int = 8, s_grid: Sequence | None = None,
                 zero_tol: float | None = None, t_max: float | None = None) -> EtaResult:
    """Eta invariant of a self adjoint algebra element against a trace.

    method 'bloch': Z^2 with rational magnetic multiplier; the spectral
    sign function is computed per Bloch fiber and the trace weights are
    read off by fiber coefficient extraction.
    method 'truncation': heat-kernel quadrature of coefficients of the
    ball truncation, with the radius sensitivity reported as the error.
    method 'dense': plain matrix input with the matrix trace; reduces to
    eta_closed_form.

    With s_grid the multiplier is raised to each rational power s and the
    germ {s: eta} is tabulated.
    """
    if method == "dense":
        mat = require_hermitian(operator)
        ev = eigh(mat).eigenvalues
        eta = eta_closed_form(ev, zero_tol, normalization)
        return EtaResult(eta, 0.0, "dense", {"normalization": normalization},
                         kernel=kernel_report(ev, zero_tol))
    if not isinstance(operator, AlgebraElement):
        raise SpectralError("bloch/truncation methods need an algebra element")
    if s_grid is not None:
        germ = {}
        base_sigma = operator.sigma
        for s in s_grid:
            s = as_rational(s)
            sigma_s = base_sigma.power(s)
            elem_s = AlgebraElement(sigma_s, operator.coeffs, check=False)
            res = eta_operator(elem_s, tau, method, normalization, kgrid, radius,
                              None, zero_tol, t_max)
            germ[str(s)] = res.eta
        base = eta_operator(operator, tau, method, normalization, kgrid, radius,
                           None, zero_tol, t_max)
        base.germ = germ
        return base
    if method == "bloch":
        return _eta_bloch(operator, tau, normalization, kgrid, zero_tol)
    if method == "truncation":
        return _eta_truncation(operator, tau, normalization, radius, zero_tol, t_max)
    raise SpectralError(f"unknown eta method {method!r}")


def _eta_bloch(a: AlgebraElement, tau, normalization: str, kgrid: int,
               zero_tol: float | None) -> EtaResult:
    from .representations import BlochMap

    bm = BlochMap(a.sigma)
    ks = bm.grid(kgrid)
    stack = bm.fiber_stack(a, ks, ks)
    defect = float(np.abs(stack - stack.conj().transpose(0, 2, 1)).max())
    if defect > 1e-9:
        raise SpectralError("element is not self adjoint in its Bloch fibers")
    evals, evecs = np.linalg.eigh(stack)
    if zero_tol is None:
        zero_tol = default_zero_tol(evals.reshape(-1))
    signs = np.where(np.abs(evals) > zero_tol, np.sign(evals), 0.0)
    # Spectral sign function per fiber: V diag(sign) V^*.
    sign_ops = np.einsum("kij,kj,klj->kil", evecs, signs, evecs.conj())
    scale = _eta_scale(normalization)
    if tau is None or getattr(tau, "kind", "") == "regular":
        weights = {a.group.identity(): 1.0 + 0.0j}
    else:
        weights = _weights_of_trace(tau, a.group)
    total = 0.0 + 0.0j
    for g, c in weights.items():
        total += complex(c) * bm.extract_coefficient(sign_ops, g, ks, ks)
    eta = scale * total.real
    # Grid sensitivity: compare with the half-resolution grid.
    half = max(4, kgrid // 2)
    ks2 = bm.grid(half)
    stack2 = bm.fiber_stack(a, ks2, ks2)
    evals2, evecs2 = np.linalg.eigh(stack2)
    signs2 = np.where(np.abs(evals2) > zero_tol, np.sign(evals2), 0.0)
    sign_ops2 = np.einsum("kij,kj,klj->kil", evecs2, signs2, evecs2.conj())
    total2 = sum(
        complex(c) * bm.extract_coefficient(sign_ops2, g, ks2, ks2) for g, c in weights.items()
    )
    error = abs(eta - scale * complex(total2).real)
    return EtaResult(eta, error, "bloch",
                     {"kgrid": kgrid, "zero_tol": zero_tol, "normalization": normalization},
                     kernel=kernel_report(evals.reshape(-1), zero_tol))


def _eta_truncation(a: AlgebraElement, tau, normalization: str, radius: int,
                    zero_tol: float | None, t_max: float | None) -> EtaResult:
    from .representations import left_regular

    values = []
    for r in (max(2, radius - 2), radius):
        op = left_regular(a, r)
        mat = require_hermitian(op.matrix)
        dec = eigh(mat)
        ev = dec.eigenvalues
        tol_r = default_zero_tol(ev) if zero_tol is None else zero_tol
        if tau is None or getattr(tau, "kind", "") == "regular":
            weights = {a.group.identity(): 1.0 + 0.0j}
        else:
            weights = _weights_of_trace(tau, a.group)
        signs = np.where(np.abs(ev) > tol_r, np.sign(ev), 0.0)
        sign_op = dec.vectors @ (signs[:, None] * dec.vectors.conj().T)
        e_col = op.index[a.group.identity()]
        total = 0.0 + 0.0j
        for g, c in weights.items():
            row = op.index.get(g)
            if row is not None:
                total += complex(c) * sign_op[row, e_col]
        values.append(_eta_scale(normalization) * total.real)
    eta = values[-1]
    error = abs(values[-1] - values[0])
    return EtaResult(eta, error, "truncation",
                     {"radius": radius, "normalization": normalization})


@dataclass
class SpectralFlowResult:
    flow: int
    crossings: list  # (t_left, t_right, direction)
    endpoint_formula: float  # [eta + ker/2](end) - [eta + ker/2](start)
    samples: int
    refinements: int


class MatrixPath:
    """Hermitian path on [0, 1], from samples or a generator callback."""

    def __init__(self, fn: Callable[[float], np.ndarray]):
        self._fn = fn
        self._cache: dict = {}

    @classmethod
    def linear(cls, a0, a1) -> "MatrixPath":
        m0 = require_hermitian(a0)
        m1 = require_hermitian(a1)
        if m0.shape != m1.shape:
            raise SpectralError("endpoints must share a dimension")
        return cls(lambda t: (1.0 - t) * m0 + t * m1)

    @classmethod
    def from_samples(cls, mats: Sequence) -> "MatrixPath":
        mats = [require_hermitian(m) for m in mats]
        if len(mats) < 2:
            raise SpectralError("a path needs at least two samples")

        def fn(t: float) -> np.ndarray:
            pos = t * (len(mats) - 1)
            i = min(int(pos), len(mats) - 2)
            w = pos - i
            return (1.0 - w) * mats[i] + w * mats[i + 1]

        return cls(fn)

    def eigenvalues(self, t: float) -> np.ndarray:
        key = round(t, 15)
        if key not in self._cache:
            # Values only, sampled many times per flow computation; the
            # batched LAPACK routine is used here instead of the Jacobi
            # decomposition, which is reserved for calls needing vectors.
            self._cache[key] = np.linalg.eigvalsh(self._fn(t))
        return self._cache[key]

    def matrix(self, t: float) -> np.ndarray:
        return self._fn(t)


def spectral_flow(path: MatrixPath, zero_tol: float | None = None,
                  initial_samples: int = 17, max_refinements: int = 12) -> SpectralFlowResult:
    """Net signed count of eigenvalues crossing zero along the path.

    Tracking: per sorted index, sign categories (-, 0, +) are compared on
    adjacent samples; intervals are bisected until every per-index move is
    smaller than half the distance to zero at crossing candidates.
    Endpoint kernel eigenvalues count with the kernel-corrected weight, so
    the result equals [eta + ker/2](end) - [eta + ker/2](start) and is an
    integer whenever the endpoint kernels match the convention.
    """
    ev0 = path.eigenvalues(0.0)
    ev1 = path.eigenvalues(1.0)
    if zero_tol is None:
        zero_tol = max(default_zero_tol(ev0), default_zero_tol(ev1), 1e-12)
    ts = list(np.linspace(0.0, 1.0, initial_samples))
    refinements = 0
    for _ in range(max_refinements):
        new_ts = []
        for left, right in zip(ts[:-1], ts[1:]):
            evl = path.eigenvalues(left)
            evr = path.eigenvalues(right)
            move = float(np.abs(evl - evr).max())
            near = min(
                float(np.abs(evl).min()), float(np.abs(evr).min())
            )
            crossing_candidate = bool(np.any(np.sign(evl) * np.sign(evr) <= 0))
            if crossing_candidate and move > max(near / 2, 4 * zero_tol):
                new_ts.append((left + right) / 2.0)
        if not new_ts:
            break
        refinements += 1
        ts = sorted(set(ts) | set(new_ts))

    def category(x: float) -> int:
        if x > zero_tol:
            return 1
        if x < -zero_tol:
            return -1
        return 0

    def weight(cat: int, endpoint: bool) -> float:
        # Negative eigenvalues carry weight 1; kernel eigenvalues carry 1/2
        # at interior samples and 0 at endpoints (kernel-corrected rule).
        if cat < 0:
            return 1.0
        if cat == 0:
            return 0.0 if endpoint else 0.5
        return 0.0

    crossings = []
    total = 0.0
    for left, right in zip(ts[:-1], ts[1:]):
        evl = path.eigenvalues(left)
        evr = path.eigenvalues(right)
        for lam_l, lam_r in zip(evl, evr):
            cl, cr = category(float(lam_l)), category(float(lam_r))
            if cl == cr:
                continue
            step = weight(cl, left == 0.0) - weight(cr, right == 1.0)
            if step != 0.0:
                total += step
                crossings.append((float(left), float(right), step))

    def corrected(ev: np.ndarray) -> float:
        kr = kernel_report(ev, zero_tol)
        nonzero = ev[np.abs(ev) > zero_tol]
        return 0.5 * float(np.sum(np.sign(nonzero))) + 0.5 * kr.dim

    endpoint_formula = corrected(ev1) - corrected(ev0)
    flow = int(round(total))
    if abs(total - flow) > 1e-9:
        raise SpectralError(f"tracking count {total} is not an integer; refine the path")
    return SpectralFlowResult(flow, crossings, endpoint_formula, len(ts), refinements)


@dataclass
class GradedMatrix:
    """Odd self adjoint operator with a +-1 grading that anticommutes with it."""

    matrix: np.ndarray
    grading: np.ndarray

    def __post_init__(self):
        self.matrix = require_hermitian(self.matrix)
        self.grading = np.asarray(self.grading, dtype=float).reshape(-1)
        if self.grading.size != self.matrix.shape[0]:
            raise SpectralError("grading length must match the matrix dimension")
        if not np.all(np.isin(self.grading, (-1.0, 1.0))):
            raise SpectralError("grading entries must be +-1")
        anti = self.grading[:, None] * self.matrix + self.matrix * self.grading[None, :]
        if float(np.abs(anti).max()) > 1e-9 * max(1.0, float(np.abs(self.matrix).max())):
            raise SpectralError("operator does not anticommute with the grading")

    @property
    def n_plus(self) -> int:
        return int(np.sum(self.grading > 0))

    @property
    def n_minus(self) -> int:
        return int(np.sum(self.grading < 0))

    def index(self, zero_tol: float | None = None) -> int:
        """dim ker D+ - dim ker D-, via a singular value rank oracle."""
        plus = np.where(self.grading > 0)[0]
        minus = np.where(self.grading < 0)[0]
        block = self.matrix[np.ix_(minus, plus)]  # D+ : E+ -> E-
        if min(block.shape) == 0:
            rank = 0
        else:
            sv = np.sqrt(np.maximum(0.0, eigh(block.conj().T @ block).eigenvalues))
            cutoff = max(1e-12, 1e-9 * (sv.max() if sv.size else 0.0))
            rank = int(np.sum(sv > cutoff))
        return (len(plus) - rank) - (len(minus) - rank)


def mckean_singer(d: GradedMatrix, t_values: Sequence[float] = (0.1, 0.5, 1.0, 2.0)) -> dict:
    """Supertrace of the heat operator against the graded index.

    Str exp(-t D^2) is constant in t and equals ind(D+); returns the
    samples and the maximal deviation from the index.
    """
    dec = eigh(d.matrix)
    index = d.index()
    supertraces = []
    for t in t_values:
        heat = dec.vectors @ (np.exp(-t * dec.eigenvalues ** 2)[:, None] * dec.vectors.conj().T)
        supertraces.append(float(np.real(np.sum(d.grading * np.diag(heat)))))
    deviation = max(abs(s - index) for s in supertraces)
    return {"index": index, "t_values": list(t_values), "supertraces": supertraces,
            "max_deviation": deviation}


def product_eta_check(d_l, d_n: GradedMatrix, normalization: str = "half") -> dict:
    """Eta of z_N (x) D_L + D_N (x) 1 against eta(D_L) * ind(D_N)."""
    d_l = require_hermitian(d_l)
    big = np.kron(np.diag(d_n.grading), d_l) + np.kron(d_n.matrix, np.eye(d_l.shape[0]))
    lhs = eta_closed_form(big, normalization=normalization)
    rhs = eta_closed_form(d_l, normalization=normalization) * d_n.index()
    return {"lhs": lhs, "rhs": rhs, "defect": abs(lhs - rhs)}


@dataclass
class BettiResult:
    b_even: float
    b_odd: float
    euler: float
    index: int
    ambiguous: list
    zero_tol: float


def twisted_betti(even_block, odd_block, zero_tol: float | None = None,
                  tau: Callable | None = None) -> BettiResult:
    """Kernel traces of positive semidefinite even/odd Laplacian blocks.

    With tau = None the matrix trace is used, so the Betti numbers are
    kernel dimensions.  A custom tau receives the kernel projection matrix
    and must return a real number.  Eigenvalues inside the ambiguity band
    [zero_tol/10, zero_tol*10] are reported, not silently resolved.
    """
    results = []
    ambiguous: list = []
    tol_used = zero_tol
    for block in (even_block, odd_block):
        mat = require_hermitian(block)
        dec = eigh(mat)
        ev = dec.eigenvalues
        tol = default_zero_tol(ev) if zero_tol is None else zero_tol
        tol_used = tol if tol_used is None else max(tol_used, tol)
        if ev.size and float(ev.min()) < -tol * 10:
            raise SpectralError("Laplacian block is not positive semidefinite")
        ambiguous.extend(kernel_report(ev, tol).ambiguous)
        kernel_cols = dec.vectors[:, np.abs(ev) <= tol]
        projection = kernel_cols @ kernel_cols.conj().T
        if tau is None:
            results.append(float(np.real(np.trace(projection))))
        else:
            results.append(float(np.real(tau(projection))))
    b_even, b_odd = results
    index = int(round(b_even - b_odd))
    return BettiResult(b_even, b_odd, b_even - b_odd, index, ambiguous, tol_used or 0.0)


def cycle_complex(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Laplacians of the discretized circle de Rham complex on n vertices.

    d maps vertex functions to edge functions, (df)(j) = f(j+1) - f(j);
    returns (d^T d, d d^T).
    """
    if n < 3:
        raise SpectralError("a cycle complex needs at least 3 vertices")
    d = np.zeros((n, n))
    for j in range(n):
        d[j, j] = -1.0
        d[j, (j + 1) % n] = 1.0
    return d.T @ d, d @ d.T
