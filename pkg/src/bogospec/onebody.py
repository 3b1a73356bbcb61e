"""One-particle operators in the Hartree eigenbasis.

All matrices are expressed in the orthonormal eigenbasis ``{phi_i}`` of the
Hartree operator, truncated to the ``m`` lowest modes; ``D`` is therefore
diagonal.  Index 0 is the condensate mode, indices ``1..m-1`` span the
excited (``Q``) subspace.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
from scipy import linalg

from .domain import ExternalPotentialSpec, GridSpec, InteractionSpec, kernel_matrix
from .hartree import HartreeSolution, hartree_operator, one_body_operator

log = logging.getLogger(__name__)

INDEFINITE_RTOL = 1e-8


@dataclass(frozen=True)
class OneBodySet:
    m: int
    H_H: np.ndarray = field(repr=False)
    eps: np.ndarray
    modes: np.ndarray = field(repr=False)
    D: np.ndarray = field(repr=False)
    V: np.ndarray = field(repr=False)
    gap: float
    h00: float
    v0000: float
    v_at_zero: float

    @property
    def Dq(self) -> np.ndarray:
        return self.D[1:, 1:]

    @property
    def Vq(self) -> np.ndarray:
        return self.V[1:, 1:]


@dataclass(frozen=True)
class SymplecticSet:
    A: np.ndarray
    B: np.ndarray
    abs_A_star: np.ndarray
    abs_B_star: np.ndarray
    W0: np.ndarray
    alpha: np.ndarray
    U0: np.ndarray
    e: np.ndarray

    @property
    def alpha_hs(self) -> float:
        return float(np.linalg.norm(self.alpha, "fro"))


def _symmetrize(M: np.ndarray) -> np.ndarray:
    return 0.5 * (M + M.T)


def _psd_eigh(M: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    M = _symmetrize(np.asarray(M, dtype=float))
    vals, vecs = linalg.eigh(M)
    scale = max(np.abs(vals).max(initial=0.0), np.finfo(float).tiny)
    if vals.min(initial=0.0) < -INDEFINITE_RTOL * scale:
        raise ValueError(f"matrix is indefinite: min eigenvalue {vals.min():.3e} (norm {scale:.3e})")
    return np.clip(vals, 0.0, None), vecs


def psd_function(M: np.ndarray, f) -> np.ndarray:
    """Apply ``f`` to the spectrum of a symmetric PSD matrix."""
    vals, vecs = _psd_eigh(M)
    return _symmetrize((vecs * f(vals)) @ vecs.T)


def sqrt_psd(M: np.ndarray) -> np.ndarray:
    """Symmetric PSD square root; eigenvalues above ``-1e-8 ||M||`` are clipped at 0."""
    return psd_function(M, np.sqrt)


def inv_sqrt_pd(M: np.ndarray) -> np.ndarray:
    vals, vecs = _psd_eigh(M)
    if vals.min() <= 0:
        raise ValueError("matrix is singular")
    return _symmetrize((vecs / np.sqrt(vals)) @ vecs.T)


def _sign_fix(vecs: np.ndarray) -> np.ndarray:
    vecs = vecs.copy()
    for k in range(vecs.shape[1]):
        col = vecs[:, k]
        lead = np.flatnonzero(np.abs(col) > 1e-8 * np.abs(col).max())[0]
        if col[lead] < 0:
            vecs[:, k] = -col
    return vecs


def canonical_eigvecs(vals: np.ndarray, vecs: np.ndarray, rtol: float = 1e-9) -> np.ndarray:
    """Fix the gauge of an eigenbasis.

    Inside every degenerate cluster the basis is rebuilt by Gram-Schmidt on the
    projector's columns taken in coordinate order; each vector then has its
    first non-negligible coordinate positive.
    """
    vecs = vecs.copy()
    n = len(vals)
    scale = max(np.abs(vals).max(initial=0.0), 1.0)
    i = 0
    while i < n:
        j = i + 1
        while j < n and vals[j] - vals[j - 1] <= rtol * scale:
            j += 1
        if j - i > 1:
            block = vecs[:, i:j]
            P = block @ block.T
            basis = []
            for col in range(P.shape[0]):
                c = P[:, col].copy()
                for b in basis:
                    c -= np.dot(b, c) * b
                nrm = np.linalg.norm(c)
                if nrm > 1e-6:
                    basis.append(c / nrm)
                if len(basis) == j - i:
                    break
            vecs[:, i:j] = np.column_stack(basis)
        i = j
    return _sign_fix(vecs)


def _align_real_fourier(vals: np.ndarray, vecs: np.ndarray, disc: GridSpec) -> np.ndarray:
    """Rotate degenerate pairs on the torus onto ``(cos 2 pi k x, sin 2 pi k x)``."""
    vecs = vecs.copy()
    x = disc.x
    n = len(vals)
    scale = max(np.abs(vals).max(), 1.0)
    i = 0
    while i < n:
        j = i + 1
        while j < n and vals[j] - vals[j - 1] <= 1e-9 * scale:
            j += 1
        if j - i == 2:
            block = vecs[:, i:j]
            spec = np.abs(np.fft.rfft(block[:, 0])) ** 2 + np.abs(np.fft.rfft(block[:, 1])) ** 2
            k = int(np.argmax(spec[1:])) + 1
            targets = [np.cos(2 * np.pi * k * x), np.sin(2 * np.pi * k * x)]
            out = []
            for t in targets:
                c = block @ (block.T @ t)
                for b in out:
                    c -= np.dot(b, c) * b
                out.append(c / np.linalg.norm(c))
            vecs[:, i:j] = np.column_stack(out)
        i = j
    return vecs


def assemble_onebody(sol: HartreeSolution, disc: GridSpec, V_ext: ExternalPotentialSpec,
                     v: InteractionSpec, m: int) -> OneBodySet:
    """Diagonalize ``H_H`` and express ``D`` and ``V`` in its ``m`` lowest modes.

    ``V_ij = iint phi_i(x) phi0(x) v(x-y) phi0(y) phi_j(y)`` by double
    quadrature.  On the torus, degenerate ``+-p`` pairs are returned as the real
    modes ``sqrt(2) cos(px)``, ``sqrt(2) sin(px)``.
    """
    if not 1 <= m <= disc.size:
        raise ValueError(f"basis size m={m} must lie in [1, {disc.size}]")
    kernel = kernel_matrix(v, disc)
    H = hartree_operator(sol.phi0, disc, V_ext, v, kernel)
    vals, vecs = linalg.eigh(H)
    gap = float(vals[1] - vals[0])
    if gap <= 1e-10 * max(1.0, abs(vals[0])):
        raise ValueError(f"Hartree ground state is degenerate (eps1 - eps0 = {gap:.3e})")
    if m < len(vals) and vals[m] - vals[m - 1] <= 1e-9 * max(1.0, abs(vals[m])):
        log.warning("mode cutoff m=%d splits a degenerate level at eps=%.6f", m, vals[m])
    if disc.periodic:
        vecs = _align_real_fourier(vals, vecs, disc)
        vecs = _sign_fix(vecs)
    else:
        vecs = canonical_eigvecs(vals, vecs)

    modes = vecs[:, :m] / np.sqrt(disc.w)[:, None]
    eps = vals[:m]
    D = np.diag(eps - eps[0])
    F = modes * (disc.w * sol.phi0)[:, None]
    V = _symmetrize(F.T @ kernel @ F)
    phi0 = modes[:, 0]
    h00 = disc.integrate(phi0 * (one_body_operator(disc, V_ext) @ phi0))
    return OneBodySet(
        m=m, H_H=H, eps=eps, modes=modes, D=D, V=V, gap=gap, h00=float(h00),
        v0000=float(V[0, 0]), v_at_zero=v.at_zero,
    )


def compute_symplectic(D: np.ndarray, E: np.ndarray) -> SymplecticSet:
    """Symplectic-diagonalization objects on the excited subspace.

    ``A = D^{1/2} E^{-1/2}``, ``B = D^{-1/2} E^{1/2}``, the polar factors
    ``A = |A*| W0``, ``alpha = -log |A*|`` and the orthogonal ``U0`` that
    diagonalizes ``E`` in ascending order.
    """
    D = _symmetrize(np.asarray(D, dtype=float))
    E = _symmetrize(np.asarray(E, dtype=float))
    d_vals = linalg.eigvalsh(D)
    if d_vals.min() <= 1e-12 * max(d_vals.max(), np.finfo(float).tiny):
        raise ValueError("D has a near-zero eigenvalue on the excited subspace")

    D_half = sqrt_psd(D)
    D_mhalf = inv_sqrt_pd(D)
    E_half = sqrt_psd(E)
    E_mhalf = inv_sqrt_pd(E)
    A = D_half @ E_mhalf
    B = D_mhalf @ E_half

    abs_A_star = sqrt_psd(A @ A.T)
    abs_B_star = sqrt_psd(B @ B.T)
    W0 = inv_sqrt_pd(A @ A.T) @ A
    alpha = psd_function(abs_A_star, lambda x: -np.log(x))

    e, U0 = linalg.eigh(E)
    U0 = canonical_eigvecs(e, U0)
    return SymplecticSet(A=A, B=B, abs_A_star=abs_A_star, abs_B_star=abs_B_star,
                         W0=W0, alpha=alpha, U0=U0, e=e)
