"""Closed-form Bogoliubov spectrum of the translation-invariant gas on the unit torus.

Here ``D`` and ``V`` are both diagonal in plane waves, so every quantity is
an explicit function of ``p^2`` and ``vhat(p)``.  Passing the grid size ``n``
swaps ``p^2`` for the symbol of the periodic 3-point Laplacian, which is what
a grid calculation actually diagonalizes.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .domain import InteractionSpec, ModeBasis, fourier_coefficient, stencil_symbol


def torus_dispersion(p, vhat_p: float, p_squared: float | None = None) -> float:
    """``e_p = sqrt(p^4 + 2 p^2 vhat(p))``.

    ``p_squared`` overrides ``|p|^2`` (e.g. with a stencil-corrected symbol).
    """
    if vhat_p < 0:
        raise ValueError(f"vhat(p) must be non-negative, got {vhat_p}")
    if p_squared is None:
        p = np.atleast_1d(np.asarray(p, dtype=float))
        p_squared = float(np.dot(p, p))
    return float(np.sqrt(p_squared**2 + 2.0 * p_squared * vhat_p))


@dataclass(frozen=True)
class TorusSpectrum:
    basis: ModeBasis
    p_squared: np.ndarray
    vhat: np.ndarray
    e: np.ndarray
    trace_sum: float
    stencil_n: int | None = field(default=None)

    def excitations(self) -> np.ndarray:
        """Sorted ``e_p`` over the nonzero modes."""
        nonzero = np.any(self.basis.modes != 0, axis=1)
        return np.sort(self.e[nonzero])

    def rows(self) -> list[dict]:
        out = []
        for p, p2, vh, e in zip(self.basis.modes, self.p_squared, self.vhat, self.e):
            row = {f"p{j + 1}": float(pj) for j, pj in enumerate(p)}
            row.update(p_squared=float(p2), vhat=float(vh), e_p=float(e))
            out.append(row)
        return out


def torus_spectrum(basis: ModeBasis, v: InteractionSpec, n: int | None = None) -> TorusSpectrum:
    """Dispersion and ``tr(D+V-E) = sum_p (p^2 + vhat - e_p)`` over the kept modes (``p = 0`` included)."""
    vhat = np.array([fourier_coefficient(v, p) for p in basis.modes])
    if n is None:
        p2 = basis.p_squared
    else:
        p2 = np.sum(stencil_symbol(basis.modes, 1.0 / n), axis=1)
    e = np.array([torus_dispersion(None, vh, q) for vh, q in zip(vhat, p2)])
    trace_sum = float(np.sum(p2 + vhat - e))
    return TorusSpectrum(basis=basis, p_squared=p2, vhat=vhat, e=e, trace_sum=trace_sum, stencil_n=n)
