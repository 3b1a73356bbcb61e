"""Self-consistent solution of the nonlinear Hartree equation.

    (-d^2/dx^2 + V_ext) phi + (v * phi^2) phi = eps0 phi

The iteration freezes the mean field, takes the positive ground state of the
frozen operator, and mixes it into the current iterate.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
from scipy import linalg

from .domain import ExternalPotentialSpec, GridSpec, InteractionSpec, convolve_density, kernel_matrix

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class ScfParams:
    eta: float = 0.5
    tol: float = 1e-10
    max_iter: int = 500

    def __post_init__(self):
        if not 0.0 < self.eta <= 1.0:
            raise ValueError(f"mixing must lie in (0, 1], got eta={self.eta}")
        if not self.tol > 0:
            raise ValueError(f"tolerance must be positive, got tol={self.tol}")
        if self.max_iter < 1:
            raise ValueError(f"max_iter must be >= 1, got {self.max_iter}")


@dataclass(frozen=True)
class HartreeSolution:
    phi0: np.ndarray = field(repr=False)
    eps0: float
    hartree_energy: float
    residual: float
    iterations: int
    v0000: float
    one_body_energy: float
    boundary_amplitude: float = 0.0


class HartreeError(RuntimeError):
    """SCF failure; ``diagnostics`` holds the last iterate's state."""

    def __init__(self, message: str, diagnostics: dict):
        super().__init__(message)
        self.diagnostics = diagnostics


def one_body_operator(disc: GridSpec, V_ext: ExternalPotentialSpec) -> np.ndarray:
    """Matrix of ``-Delta + V_ext`` on the active grid points."""
    return disc.laplacian() + np.diag(V_ext(disc.x))


def hartree_operator(phi: np.ndarray, disc: GridSpec, V_ext: ExternalPotentialSpec,
                     v: InteractionSpec, kernel: np.ndarray | None = None) -> np.ndarray:
    """``H_H = -Delta + V_ext + v * phi^2`` as a dense symmetric matrix."""
    mean_field = convolve_density(v, phi**2, disc, kernel)
    return one_body_operator(disc, V_ext) + np.diag(mean_field)


def _norm(disc: GridSpec, f: np.ndarray) -> float:
    return float(np.sqrt(disc.integrate(f * f)))


def _normalize(disc: GridSpec, f: np.ndarray) -> np.ndarray:
    f = f / _norm(disc, f)
    if disc.integrate(f) < 0:
        f = -f
    return f


def _ground_state(H: np.ndarray, disc: GridSpec) -> tuple[float, np.ndarray]:
    # weights are uniform, so the weighted eigenproblem is the plain symmetric one
    vals, vecs = linalg.eigh(H, subset_by_index=[0, 0])
    return float(vals[0]), _normalize(disc, vecs[:, 0])


def initial_guess(disc: GridSpec, V_ext: ExternalPotentialSpec) -> np.ndarray:
    if disc.periodic:
        return _normalize(disc, np.ones(disc.size))
    # gaussian at the trap minimum (x = 0 for every supported V_ext)
    width = 1.0 / np.sqrt(V_ext.omega) if V_ext.kind == "harmonic" else 1.0
    return _normalize(disc, np.exp(-0.5 * (disc.x / width) ** 2))


def interaction_energy(phi: np.ndarray, disc: GridSpec, v: InteractionSpec,
                       kernel: np.ndarray | None = None) -> float:
    """``v0000 = iint phi^2(x) v(x-y) phi^2(y)``."""
    rho = phi**2
    return disc.integrate(rho * convolve_density(v, rho, disc, kernel))


def hartree_functional(phi: np.ndarray, disc: GridSpec, V_ext: ExternalPotentialSpec,
                       v: InteractionSpec, kernel: np.ndarray | None = None) -> float:
    """Hartree energy ``int(|phi'|^2 + V_ext phi^2) + 1/2 iint phi^2 v phi^2``.

    The gradient term is the discrete Dirichlet form of the 3-point stencil.
    """
    phi = np.asarray(phi, dtype=float)
    norm2 = disc.integrate(phi * phi)
    if abs(norm2 - 1.0) > 1e-8:
        raise ValueError(f"phi must be L2-normalized, got norm^2 = {norm2}")
    T = one_body_operator(disc, V_ext)
    return disc.integrate(phi * (T @ phi)) + 0.5 * interaction_energy(phi, disc, v, kernel)


def solve_hartree(disc: GridSpec, V_ext: ExternalPotentialSpec, v: InteractionSpec,
                  params: ScfParams | None = None) -> HartreeSolution:
    """Damped fixed-point iteration for the Hartree ground state.

    Raises
    ------
    HartreeError
        If the residual stays above ``params.tol`` after ``params.max_iter``
        steps, or the converged state is not strictly positive.
    """
    params = params or ScfParams()
    kernel = kernel_matrix(v, disc)
    T = one_body_operator(disc, V_ext)
    phi = initial_guess(disc, V_ext)

    residual = np.inf
    eps = np.nan
    for it in range(1, params.max_iter + 1):
        H = T + np.diag(convolve_density(v, phi**2, disc, kernel))
        Hphi = H @ phi
        eps = disc.integrate(phi * Hphi)
        residual = _norm(disc, Hphi - eps * phi)
        if residual < params.tol:
            break
        _, phi_gs = _ground_state(H, disc)
        phi = _normalize(disc, (1.0 - params.eta) * phi + params.eta * phi_gs)
    else:
        raise HartreeError(
            f"Hartree iteration did not converge in {params.max_iter} steps "
            f"(residual {residual:.3e} > tol {params.tol:.1e})",
            {"residual": residual, "eps": eps, "iterations": params.max_iter, "phi": phi},
        )

    # tails far out in the box sit at the eigensolver's roundoff floor
    if phi.min() < -1e-12 * phi.max():
        raise HartreeError(
            "converged Hartree state is not strictly positive; the grid is too coarse",
            {"residual": residual, "eps": eps, "iterations": it, "phi": phi},
        )

    v0000 = interaction_energy(phi, disc, v, kernel)
    one_body = disc.integrate(phi * (T @ phi))
    boundary = 0.0 if disc.periodic else float(max(phi[0], phi[-1]) / phi.max())
    if boundary > 1e-8:
        log.warning("condensate amplitude %.2e at the box edge; increase L", boundary)
    log.info("Hartree converged in %d iterations, eps0=%.12f, residual=%.2e", it, eps, residual)
    return HartreeSolution(
        phi0=phi,
        eps0=float(eps),
        hartree_energy=one_body + 0.5 * v0000,
        residual=float(residual),
        iterations=it,
        v0000=float(v0000),
        one_body_energy=float(one_body),
        boundary_amplitude=boundary,
    )
