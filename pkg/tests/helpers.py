"""Cached pipelines shared across the test modules."""

from __future__ import annotations

from functools import lru_cache
from types import SimpleNamespace

from bogospec.bogoliubov import compute_E
from bogospec.domain import BOX, TORUS, ExternalPotentialSpec, GridSpec, InteractionSpec
from bogospec.fock import compute_tensors
from bogospec.hartree import solve_hartree
from bogospec.onebody import assemble_onebody, compute_symplectic


def _interaction(kind: str, g: float) -> InteractionSpec:
    if kind == "cosine":
        return InteractionSpec.cosine_torus(g)
    if kind == "gaussian":
        return InteractionSpec.gaussian(g, 0.5)
    return InteractionSpec.zero()


@lru_cache(maxsize=None)
def torus(g: float = 1.0, m: int = 5, n: int = 256, kind: str = "cosine"):
    disc = GridSpec(TORUS, n)
    V_ext = ExternalPotentialSpec("none")
    v = _interaction(kind, g)
    return _build(disc, V_ext, v, m)


@lru_cache(maxsize=None)
def trap(g: float = 1.0, m: int = 32, n: int = 256, L: float = 8.0, kind: str = "gaussian"):
    disc = GridSpec(BOX, n, L)
    V_ext = ExternalPotentialSpec("harmonic", omega=1.0)
    v = _interaction(kind, g)
    return _build(disc, V_ext, v, m)


def _build(disc, V_ext, v, m):
    sol = solve_hartree(disc, V_ext, v)
    ob = assemble_onebody(sol, disc, V_ext, v, m)
    bog = compute_E(ob)
    return SimpleNamespace(disc=disc, V_ext=V_ext, v=v, sol=sol, ob=ob, bog=bog)


@lru_cache(maxsize=None)
def ed_model(g: float = 1.0, M: int = 4, kind: str = "torus"):
    """Pipeline on ``M + 1`` modes with its many-body tensors and symplectic set."""
    p = torus(g, m=M + 1) if kind == "torus" else trap(g, m=M + 1)
    tensors = compute_tensors(p.ob, p.disc, p.V_ext, p.v)
    sym = compute_symplectic(p.ob.Dq, p.bog.E_matrix[1:, 1:])
    return SimpleNamespace(**vars(p), tensors=tensors, sym=sym)
