"""Exact diagonalization in the N-particle sector of a truncated Fock space.

Modes are the ``M + 1`` lowest Hartree eigenfunctions ``phi_0 .. phi_M``.
Every operator is assembled by acting with strings of ladder operators on
the whole occupation basis at once; strings are applied right to left.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from functools import lru_cache
from math import comb

import numpy as np
from scipy import linalg, sparse
from scipy.sparse import linalg as splinalg

from .bogoliubov import BogoliubovResult, excitation_levels, predict_ground_energy
from .domain import ExternalPotentialSpec, GridSpec, InteractionSpec, kernel_matrix
from .hartree import HartreeSolution, one_body_operator
from .onebody import OneBodySet, compute_symplectic

log = logging.getLogger(__name__)

DEFAULT_CAP = 500_000
DENSE_LIMIT = 2000
ED_TOL = 1e-9
TENSOR_CUTOFF = 1e-11


@lru_cache(maxsize=None)
def _compositions(total: int, parts: int) -> np.ndarray:
    """All ``parts``-tuples summing to ``total``, first entry descending."""
    if parts == 1:
        return np.array([[total]], dtype=np.int64)
    blocks = []
    for first in range(total, -1, -1):
        rest = _compositions(total - first, parts - 1)
        blocks.append(np.column_stack([np.full(len(rest), first, dtype=np.int64), rest]))
    return np.vstack(blocks)


@dataclass(frozen=True)
class FockBasis:
    """Occupation vectors ``(n_0, .., n_M)`` with ``sum n_i = N``.

    Ordered lexicographically with occupations descending, so index 0 is the
    pure condensate ``|N, 0, ..>``.
    """

    n_modes: int
    N: int
    states: np.ndarray = field(repr=False)
    _codes: np.ndarray = field(repr=False)
    _order: np.ndarray = field(repr=False)

    @property
    def dim(self) -> int:
        return len(self.states)

    def encode(self, states: np.ndarray) -> np.ndarray:
        radix = (self.N + 1) ** np.arange(self.n_modes, dtype=np.int64)
        return np.asarray(states, dtype=np.int64) @ radix

    def indices(self, states: np.ndarray) -> np.ndarray:
        """Basis indices of rows of ``states``; ``-1`` for rows outside the sector."""
        states = np.atleast_2d(states)
        valid = np.all(states >= 0, axis=1) & (states.sum(axis=1) == self.N)
        codes = self.encode(np.where(states >= 0, states, 0))
        pos = np.searchsorted(self._codes, codes)
        pos = np.clip(pos, 0, self.dim - 1)
        found = valid & (self._codes[pos] == codes)
        return np.where(found, self._order[pos], -1)

    def index(self, state) -> int:
        idx = int(self.indices(np.asarray(state)[None, :])[0])
        if idx < 0:
            raise KeyError(f"state {tuple(state)} is not in the basis")
        return idx

    def lookup(self, idx: int) -> tuple:
        return tuple(int(n) for n in self.states[idx])

    @property
    def condensate(self) -> np.ndarray:
        vec = np.zeros(self.dim)
        vec[0] = 1.0
        return vec


def build_basis(M: int, N: int, cap: int = DEFAULT_CAP) -> FockBasis:
    if M < 1:
        raise ValueError("need at least one excited mode (M >= 1)")
    if N < 2:
        raise ValueError("need at least two particles (N >= 2)")
    size = comb(N + M, M)
    if size > cap:
        raise ValueError(f"Fock sector dimension C({N + M},{M}) = {size} exceeds cap {cap}")
    if (N + 1) ** (M + 1) >= 2**62:
        raise ValueError("occupation codes overflow int64; reduce M or N")
    states = _compositions(N, M + 1)
    radix = (N + 1) ** np.arange(M + 1, dtype=np.int64)
    codes = states @ radix
    order = np.argsort(codes)
    return FockBasis(n_modes=M + 1, N=N, states=states, _codes=codes[order], _order=order)


def apply_string(basis: FockBasis, ops) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Act with a ladder-operator string on every basis state.

    ``ops`` is a sequence of ``(mode, is_creation)`` read left to right as
    written, so the last entry acts first.  Returns ``(rows, cols, amplitudes)``
    of the nonzero matrix elements.
    """
    s = basis.states.copy()
    amp = np.ones(basis.dim)
    for mode, create in reversed(ops):
        if create:
            amp *= np.sqrt(np.maximum(s[:, mode] + 1, 0))
            s[:, mode] += 1
        else:
            amp *= np.sqrt(np.maximum(s[:, mode], 0))
            s[:, mode] -= 1
    keep = amp != 0.0
    rows = basis.indices(s[keep])
    cols = np.flatnonzero(keep)
    if np.any(rows < 0):
        raise ValueError("operator string leaves the N-particle sector")
    return rows, cols, amp[keep]


def _assemble(basis: FockBasis, terms) -> sparse.csr_matrix:
    rows, cols, vals = [], [], []
    for coef, ops in terms:
        if coef == 0.0:
            continue
        r, c, a = apply_string(basis, ops)
        rows.append(r)
        cols.append(c)
        vals.append(coef * a)
    if not rows:
        return sparse.csr_matrix((basis.dim, basis.dim))
    mat = sparse.coo_matrix((np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
                            shape=(basis.dim, basis.dim))
    return mat.tocsr()


def _cr(i):
    return (i, True)


def _an(i):
    return (i, False)


@dataclass(frozen=True)
class ManyBodyTensors:
    h: np.ndarray
    vt: np.ndarray = field(repr=False)
    eps: np.ndarray
    v_at_zero: float

    @property
    def n_modes(self) -> int:
        return self.h.shape[0]


def compute_tensors(ob: OneBodySet, disc: GridSpec, V_ext: ExternalPotentialSpec,
                    v: InteractionSpec, n_modes: int | None = None,
                    stationarity_tol: float = 1e-8) -> ManyBodyTensors:
    """``h_ij = <phi_i|-Delta+V_ext|phi_j>`` and ``v_ijkl = <phi_i phi_j| v |phi_k phi_l>``.

    Raises ``ValueError`` when ``h_i0 + v_i000`` (zero at a Hartree minimizer)
    exceeds ``stationarity_tol``.
    """
    n_modes = n_modes or ob.m
    if n_modes > ob.m:
        raise ValueError(f"requested {n_modes} modes but only {ob.m} were assembled")
    phi = ob.modes[:, :n_modes]
    w = disc.w
    h = phi.T @ (w[:, None] * (one_body_operator(disc, V_ext) @ phi))
    h = 0.5 * (h + h.T)

    kernel = kernel_matrix(v, disc)
    pair = (phi[:, :, None] * phi[:, None, :]) * w[:, None, None]  # (x, i, k)
    pair = pair.reshape(len(w), -1)
    vik_jl = pair.T @ kernel @ pair  # [(i,k), (j,l)]
    vt = vik_jl.reshape(n_modes, n_modes, n_modes, n_modes).transpose(0, 2, 1, 3)

    stationarity = np.abs(h[1:, 0] + vt[1:, 0, 0, 0]).max(initial=0.0)
    if stationarity > stationarity_tol:
        raise ValueError(f"h_i0 + v_i000 = {stationarity:.3e}: modes are not built on a Hartree minimizer")
    return ManyBodyTensors(h=h, vt=vt, eps=ob.eps[:n_modes].copy(), v_at_zero=ob.v_at_zero)


def assemble_HN(t: ManyBodyTensors, basis: FockBasis, cutoff: float = TENSOR_CUTOFF) -> sparse.csr_matrix:
    """``sum h_ij a+_i a_j + 1/(2(N-1)) sum v_ijkl a+_j a+_i a_k a_l`` on the N-sector.

    Tensor entries below ``cutoff`` times the largest entry are dropped; at the
    default they are quadrature roundoff, and keeping them would split exact
    degeneracies and stall the Lanczos solver.
    """
    if t.n_modes != basis.n_modes:
        raise ValueError("tensor and basis mode counts differ")
    N = basis.N
    terms = []
    hmax = np.abs(t.h).max(initial=0.0)
    for i, j in zip(*np.nonzero(np.abs(t.h) > cutoff * max(hmax, 1.0))):
        terms.append((t.h[i, j], [_cr(i), _an(j)]))
    vmax = np.abs(t.vt).max(initial=0.0)
    for i, j, k, l in zip(*np.nonzero(np.abs(t.vt) > cutoff * max(vmax, 1.0))):
        terms.append((t.vt[i, j, k, l] / (2.0 * (N - 1)), [_cr(j), _cr(i), _an(k), _an(l)]))
    return _assemble(basis, terms)


def assemble_HBog(eps: np.ndarray, Vq: np.ndarray, basis: FockBasis) -> sparse.csr_matrix:
    """Number-conserving Bogoliubov Hamiltonian with ``b_i = a_i a_0^+ / sqrt(N-1)``.

    ``sum' (eps_i - eps_0) b+_i b_i + 1/2 sum' V_ij (2 b+_i b_j + b_i b_j + b+_j b+_i)``
    """
    N = basis.N
    M = basis.n_modes - 1
    c = 1.0 / (N - 1)
    terms = []
    for i in range(1, M + 1):
        # b+_i b_i = a_0 a+_i a_i a+_0 / (N-1)
        terms.append((c * (eps[i] - eps[0]), [_an(0), _cr(i), _an(i), _cr(0)]))
        for j in range(1, M + 1):
            vij = Vq[i - 1, j - 1]
            if vij == 0.0:
                continue
            terms.append((c * vij, [_an(0), _cr(i), _an(j), _cr(0)]))
            terms.append((0.5 * c * vij, [_an(i), _cr(0), _an(j), _cr(0)]))
            terms.append((0.5 * c * vij, [_an(0), _cr(j), _an(0), _cr(i)]))
    return _assemble(basis, terms)


def assemble_observables(basis: FockBasis, eps: np.ndarray) -> tuple[sparse.dia_matrix, sparse.dia_matrix]:
    """Diagonal ``N^> = N - n_0`` and ``T_H = sum_{i>=1} (eps_i - eps_0) n_i``."""
    n = basis.states
    n_out = (basis.N - n[:, 0]).astype(float)
    gaps = np.asarray(eps[:basis.n_modes]) - eps[0]
    th = n[:, 1:] @ gaps[1:]
    return sparse.diags(n_out), sparse.diags(th)


def assemble_X(alpha: np.ndarray, basis: FockBasis) -> sparse.csr_matrix:
    """``X = 1/2 sum' alpha_ij (b+_i b+_j - b_i b_j)``, built as ``C - C^T`` so it is exactly antisymmetric."""
    N = basis.N
    M = basis.n_modes - 1
    if alpha.shape != (M, M):
        raise ValueError(f"alpha must be {M}x{M} to match the basis")
    terms = []
    for i in range(1, M + 1):
        for j in range(1, M + 1):
            a = alpha[i - 1, j - 1]
            # b+_i b+_j = a_0 a+_i a_0 a+_j / (N-1)
            terms.append((0.5 * a / (N - 1), [_an(0), _cr(i), _an(0), _cr(j)]))
    C = _assemble(basis, terms)
    return (C - C.T).tocsr()


def apply_Udagger_condensate(X: sparse.spmatrix, basis: FockBasis, t: float = 1.0) -> np.ndarray:
    """``exp(-t X)|N, 0, ..>`` (the overall basis rotation fixes the condensate mode)."""
    psi = splinalg.expm_multiply(-t * X.tocsc(), basis.condensate)
    norm = np.linalg.norm(psi)
    if abs(norm - 1.0) > 1e-10:
        raise RuntimeError(f"exp(-X) lost unitarity: |psi| = {norm:.15f}")
    return psi


@dataclass(frozen=True)
class Eigenpairs:
    values: np.ndarray
    vectors: np.ndarray = field(repr=False)
    residuals: np.ndarray


def ed_lowest(H, k: int) -> Eigenpairs:
    """``k`` lowest eigenpairs of a symmetric matrix (dense below ``DENSE_LIMIT`` states)."""
    dim = H.shape[0]
    k = min(k, dim)
    if k < 1:
        raise ValueError("k must be >= 1")
    if dim <= DENSE_LIMIT or k >= dim - 1:
        dense = H.toarray() if sparse.issparse(H) else np.asarray(H)
        vals, vecs = linalg.eigh(dense, subset_by_index=[0, k - 1])
    else:
        ncv = min(dim, max(2 * k + 1, 40))
        try:
            vals, vecs = splinalg.eigsh(H, k=k, which="SA", tol=0.0, ncv=ncv, maxiter=50 * dim)
        except splinalg.ArpackNoConvergence:
            log.info("Lanczos stalled on %d states, retrying in shift-invert mode", dim)
            e0 = splinalg.eigsh(H, k=1, which="SA", ncv=ncv)[0][0]
            try:
                vals, vecs = splinalg.eigsh(sparse.csc_matrix(H), k=k, sigma=e0 - 1.0, which="LM")
            except splinalg.ArpackNoConvergence as err:
                raise RuntimeError(f"Lanczos failed on a {dim}-state sector: {err}") from err
        order = np.argsort(vals)
        vals, vecs = vals[order], vecs[:, order]
    res = np.linalg.norm(H @ vecs - vecs * vals, axis=0)
    bad = res > ED_TOL * (np.abs(vals) + 1.0)
    if np.any(bad):
        raise RuntimeError(f"eigenpair residuals too large: {res[bad]}")
    return Eigenpairs(values=vals, vectors=vecs, residuals=res)


@dataclass(frozen=True)
class EDConfig:
    M: int = 4
    N_list: tuple = (4, 8, 16, 32)
    k_states: int = 6
    cap: int = DEFAULT_CAP
    n_bounds: int = 5

    def __post_init__(self):
        if list(self.N_list) != sorted(set(self.N_list)):
            raise ValueError("N_list must be strictly ascending")
        if min(self.N_list) < 2:
            raise ValueError("every N must be >= 2")


@dataclass
class EDRow:
    N: int
    dim: int
    E0_ed: float
    E0_bog: float
    delta0: float
    delta0_sqrtN: float
    gap1_ed: float
    gap1_bog: float
    depletion: float
    TH_expect: float
    overlap_sq: float
    bare_overlap_sq: float
    lemma1_lower_ok: bool
    lemma1_upper_ok: bool
    lemma1_expect_ok: bool
    lemma3_ok: bool
    gap_errors: list = field(default_factory=list)
    hbog_gap_errors: list = field(default_factory=list)
    lemma1_lower_slack: float = 0.0
    lemma1_upper_slack: float = 0.0
    lemma3_min_slack: float = 0.0
    eigenvalues: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.lemma1_lower_ok and self.lemma1_upper_ok and self.lemma1_expect_ok and self.lemma3_ok


@dataclass
class TheoremReport:
    rows: list
    alpha_hs: float
    e: np.ndarray

    @property
    def ok(self) -> bool:
        return all(r.ok for r in self.rows)


BOUND_SLACK = 1e-8


def verify_point(N: int, sol: HartreeSolution, ob: OneBodySet, bog: BogoliubovResult,
                 t: ManyBodyTensors, alpha: np.ndarray, cfg: EDConfig) -> EDRow:
    """ED comparison at a single particle number ``N``."""
    M = t.n_modes - 1
    basis = build_basis(M, N, cfg.cap)
    H = assemble_HN(t, basis)
    k = min(cfg.k_states, basis.dim)
    ed = ed_lowest(H, k)
    E = ed.values
    psi0 = ed.vectors[:, 0]

    h00, v0000, v0 = t.h[0, 0], t.vt[0, 0, 0, 0], t.v_at_zero
    shifted = E[0] - N * h00 - 0.5 * N * v0000
    lower = 0.5 * v0000 - N / (2.0 * (N - 1)) * v0

    Nout, TH = assemble_observables(basis, t.eps)
    nd, td = Nout.diagonal(), TH.diagonal()
    gap = t.eps[1] - t.eps[0]
    expect_ok = True
    lemma3_ok = True
    lemma3_slack = np.inf
    for kk in range(min(cfg.n_bounds, k)):
        vec = ed.vectors[:, kk]
        prob = vec**2
        n_exp, th_exp, prod_exp = prob @ nd, prob @ td, prob @ (nd * td)
        mu = E[kk] - E[0] + ED_TOL * (abs(E[kk]) + 1.0)
        upper_th = mu + N / (2.0 * (N - 1)) * v0 - 0.5 * v0000
        expect_ok &= bool(gap * n_exp - th_exp <= BOUND_SLACK and th_exp - upper_th <= BOUND_SLACK)
        rhs = (mu - v0000 + 3 * v0) * upper_th + 0.25 * (2 * v0 + mu) ** 2
        slack = rhs - gap * prod_exp
        lemma3_slack = min(lemma3_slack, slack)
        lemma3_ok &= bool(slack >= -BOUND_SLACK)

    X = assemble_X(alpha, basis)
    trial = apply_Udagger_condensate(X, basis)
    overlap_sq = float(np.dot(psi0, trial) ** 2)
    bare_sq = float(psi0[0] ** 2)

    E0_bog = predict_ground_energy(bog, sol, N)
    delta0 = abs(E[0] - E0_bog)

    ed_gaps = E[1:] - E[0]
    xi = (ed_gaps.max() if ed_gaps.size else 0.0) * 1.5 + bog.e[0]
    predicted = excitation_levels(bog.e, xi, N)[1:k]
    gap_errors = [float(abs(a - b)) for a, b in zip(ed_gaps, predicted)]

    # H_Bog has spurious low states with an emptied condensate; compare on N^> <= N/2
    low = np.flatnonzero(nd <= N // 2)
    Hb = assemble_HBog(t.eps, ob.Vq[:M, :M], basis)[low][:, low]
    eb = ed_lowest(Hb, min(k, len(low))).values
    hbog_errors = [float(abs(a - b)) for a, b in zip(eb[1:] - eb[0], predicted)]

    return EDRow(
        N=N, dim=basis.dim, E0_ed=float(E[0]), E0_bog=float(E0_bog), delta0=float(delta0),
        delta0_sqrtN=float(delta0 * np.sqrt(N)),
        gap1_ed=float(ed_gaps[0]) if ed_gaps.size else float("nan"),
        gap1_bog=float(bog.e[0]),
        depletion=float(psi0**2 @ nd), TH_expect=float(psi0**2 @ td),
        overlap_sq=overlap_sq, bare_overlap_sq=bare_sq,
        lemma1_lower_ok=bool(shifted - lower >= -BOUND_SLACK),
        lemma1_upper_ok=bool(shifted <= BOUND_SLACK),
        lemma1_expect_ok=bool(expect_ok), lemma3_ok=bool(lemma3_ok),
        gap_errors=gap_errors, hbog_gap_errors=hbog_errors,
        lemma1_lower_slack=float(shifted - lower), lemma1_upper_slack=float(-shifted),
        lemma3_min_slack=float(lemma3_slack), eigenvalues=[float(x) for x in E],
    )


def verify_theorem(sol: HartreeSolution, ob: OneBodySet, bog: BogoliubovResult,
                   t: ManyBodyTensors, cfg: EDConfig) -> TheoremReport:
    """Compare ED of ``H_N`` with the Bogoliubov predictions for every ``N`` in ``cfg.N_list``.

    ``ob`` and ``bog`` must be built on the same ``M + 1`` modes as the tensors,
    so that both sides describe the same truncated model.
    """
    if ob.m != t.n_modes or bog.E_matrix.shape[0] != t.n_modes:
        raise ValueError("one-body set, Bogoliubov result and tensors must share the mode truncation")
    sym = compute_symplectic(ob.Dq, bog.E_matrix[1:, 1:])
    rows = [verify_point(N, sol, ob, bog, t, sym.alpha, cfg) for N in cfg.N_list]
    return TheoremReport(rows=rows, alpha_hs=sym.alpha_hs, e=bog.e)
