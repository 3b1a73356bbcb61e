"""Excitation spectrum, BdG cross-check and ground-state energy prediction."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import linalg

from .hartree import HartreeSolution
from .onebody import OneBodySet, sqrt_psd

MAX_ENUMERATION = 1_000_000


@dataclass(frozen=True)
class BogoliubovResult:
    E_matrix: np.ndarray = field(repr=False)
    e: np.ndarray
    trace_correction: float
    e0n_coefficients: tuple[float, float]

    def predicted_energy(self, N: int) -> float:
        a, b = self.e0n_coefficients
        return a * N + b


def compute_E(ob: OneBodySet) -> BogoliubovResult:
    """``E = (D^{1/2} (D + 2V) D^{1/2})^{1/2}`` on the full truncated space.

    ``e`` holds the eigenvalues of ``E`` on the excited subspace.  The energy
    coefficients ``(a, b)`` give the ground-state prediction ``a N + b`` with
    ``a = h00 + v0000/2`` and ``b = v0000/2 - tr(D + V - E)/2``.
    """
    D_half = sqrt_psd(ob.D)
    inner = D_half @ (ob.D + 2.0 * ob.V) @ D_half
    E = sqrt_psd(0.5 * (inner + inner.T))
    e = linalg.eigvalsh(E[1:, 1:])
    tr = trace_correction(ob, E)
    a = ob.h00 + 0.5 * ob.v0000
    b = 0.5 * ob.v0000 - 0.5 * tr
    return BogoliubovResult(E_matrix=E, e=e, trace_correction=tr, e0n_coefficients=(a, b))


def trace_correction(ob: OneBodySet, E: np.ndarray) -> float:
    """``tr(D + V - E)`` over the full truncated basis; the condensate row adds ``v0000``."""
    return float(np.trace(ob.D) + np.trace(ob.V) - np.trace(E))


def bdg_matrix(ob: OneBodySet) -> np.ndarray:
    Dq, Vq = ob.Dq, ob.Vq
    return np.block([[Dq + Vq, Vq], [-Vq, -(Dq + Vq)]])


def bdg_spectrum(ob: OneBodySet) -> np.ndarray:
    """Positive eigenvalues of the (non-symmetric) BdG block matrix, ascending."""
    M = bdg_matrix(ob)
    w = linalg.eigvals(M)
    scale = np.linalg.norm(ob.Dq + ob.Vq, 2)
    if np.abs(w.imag).max(initial=0.0) > 1e-8 * scale:
        raise ValueError(f"BdG spectrum has complex eigenvalues (|Im| up to {np.abs(w.imag).max():.3e})")
    w = np.sort(w.real)
    return w[w.size // 2:]


def predict_ground_energy(bog: BogoliubovResult, sol: HartreeSolution, N: int) -> float:
    """``N <phi0|-Delta+V_ext|phi0> + (N+1)/2 v0000 - tr(D+V-E)/2``, dropping the ``O(N^{-1/2})`` term."""
    if N < 2:
        raise ValueError("N must be at least 2")
    return N * sol.one_body_energy + 0.5 * (N + 1) * sol.v0000 - 0.5 * bog.trace_correction


def _excitation_sums(e: np.ndarray, xi: float, N: int, limit: int) -> list[float]:
    e = np.sort(np.asarray(e, dtype=float))
    if e.size and e[0] <= 0:
        raise ValueError("excitation energies must be positive")
    out: list[float] = []
    slack = 1e-12 * max(xi, 1.0)

    def walk(i: int, total: float, left: int):
        if len(out) > limit:
            raise OverflowError(f"more than {limit} excitation sums below xi={xi}")
        if i == e.size:
            out.append(total)
            return
        n = 0
        while n <= left and total + n * e[i] <= xi + slack:
            walk(i + 1, total + n * e[i], left - n)
            n += 1

    walk(0, 0.0, N)
    return sorted(out)


def enumerate_excitations(e, xi: float, N: int, limit: int = MAX_ENUMERATION) -> np.ndarray:
    """Distinct values ``sum_i n_i e_i <= xi`` with ``sum_i n_i <= N``, ascending.

    Values closer than ``1e-12 xi`` are merged.
    """
    sums = _excitation_sums(e, xi, N, limit)
    tol = 1e-12 * xi
    distinct = [sums[0]]
    for s in sums[1:]:
        if s - distinct[-1] > tol:
            distinct.append(s)
    return np.array(distinct)


def excitation_levels(e, xi: float, N: int, limit: int = MAX_ENUMERATION) -> np.ndarray:
    """Like ``enumerate_excitations`` but every occupation pattern counted once."""
    return np.array(_excitation_sums(e, xi, N, limit))


@dataclass(frozen=True)
class OrderingDiagnostics:
    min_eig_E_minus_D: float
    hs_norm: float


def ordering_diagnostics(ob: OneBodySet, bog: BogoliubovResult) -> OrderingDiagnostics:
    """``min spec(E - D)`` and ``||D^{1/2} (E - D) D^{-1/2}||_HS`` on the excited subspace."""
    E = bog.E_matrix
    d = np.diag(ob.Dq)
    Eq_minus_D = E[1:, 1:] - ob.Dq
    chain = np.sqrt(d)[:, None] * Eq_minus_D / np.sqrt(d)[None, :]
    return OrderingDiagnostics(
        min_eig_E_minus_D=float(linalg.eigvalsh(E - ob.D).min()),
        hs_norm=float(np.linalg.norm(chain, "fro")),
    )
