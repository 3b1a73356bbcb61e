"""Discretizations, potentials and quadrature.

Two discretizations are supported:

* a Dirichlet box ``[-L, L]`` sampled with spacing ``h = 2L/n`` (trap runs),
* the periodic unit torus ``[0, 1)`` sampled with spacing ``h = 1/n``.

Grid functions live on the *active* points: the interior nodes of the box
(the endpoint values are pinned to zero) or every node of the torus.  Because
the box endpoints carry no mass, the trapezoid rule reduces to uniform
weights ``h`` on the active points.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Union

import numpy as np

BOX = "dirichlet_box"
TORUS = "periodic_torus"

MIN_POINTS = 8


@dataclass(frozen=True)
class GridSpec:
    kind: str
    n: int
    half_width: float = 0.5

    def __post_init__(self):
        if self.kind not in (BOX, TORUS):
            raise ValueError(f"unknown grid kind {self.kind!r}")
        if self.n < MIN_POINTS:
            raise ValueError(f"grid needs at least {MIN_POINTS} points, got n={self.n}")
        if not self.half_width > 0:
            raise ValueError(f"half width must be positive, got L={self.half_width}")
        if self.kind == TORUS and self.half_width != 0.5:
            raise ValueError("the torus grid is the unit torus (L=0.5)")

    @property
    def periodic(self) -> bool:
        return self.kind == TORUS

    @property
    def length(self) -> float:
        return 2.0 * self.half_width

    @property
    def h(self) -> float:
        return self.length / self.n

    @property
    def nodes(self) -> np.ndarray:
        """All quadrature nodes (box: both endpoints included)."""
        if self.periodic:
            return np.arange(self.n) * self.h
        return -self.half_width + np.arange(self.n + 1) * self.h

    @property
    def node_weights(self) -> np.ndarray:
        if self.periodic:
            return np.full(self.n, self.h)
        w = np.full(self.n + 1, self.h)
        w[0] = w[-1] = 0.5 * self.h
        return w

    @property
    def x(self) -> np.ndarray:
        """Active points, where grid functions are stored."""
        return self.nodes if self.periodic else self.nodes[1:-1]

    @property
    def w(self) -> np.ndarray:
        return self.node_weights if self.periodic else self.node_weights[1:-1]

    @property
    def size(self) -> int:
        return self.x.size

    def integrate(self, f: np.ndarray) -> float:
        return float(np.dot(self.w, f))

    def differences(self) -> np.ndarray:
        """Pairwise ``x_i - x_j``, wrapped into ``[-1/2, 1/2)`` on the torus."""
        d = self.x[:, None] - self.x[None, :]
        if self.periodic:
            d = d - np.floor(d + 0.5)
        return d

    def laplacian(self) -> np.ndarray:
        """Dense 3-point approximation of ``-d^2/dx^2`` on the active points."""
        m = self.size
        lap = (np.diag(np.full(m, 2.0)) - np.diag(np.ones(m - 1), 1)
               - np.diag(np.ones(m - 1), -1))
        if self.periodic:
            lap[0, -1] = lap[-1, 0] = -1.0
        return lap / self.h**2

    def dual_momenta(self) -> np.ndarray:
        """Momenta resolved by the grid: ``2*pi*k/length`` for ``|k| <= n/2``."""
        k = np.arange(-(self.n // 2), self.n // 2 + 1)
        return 2.0 * np.pi * k / self.length


def stencil_symbol(p, h: float):
    """Eigenvalue of the periodic 3-point ``-d^2/dx^2`` on the plane wave ``e^{ipx}``."""
    p = np.asarray(p, dtype=float)
    return 2.0 * (1.0 - np.cos(p * h)) / h**2


@dataclass(frozen=True)
class ModeBasis:
    """Plane-wave modes ``p in (2 pi Z)^d`` with every ``|p_j| <= 2 pi K``."""

    d: int
    K: int
    modes: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.d not in (1, 2, 3):
            raise ValueError(f"torus dimension must be 1, 2 or 3, got d={self.d}")
        if self.K < 1:
            raise ValueError(f"mode cutoff must be >= 1, got K={self.K}")
        ks = range(-self.K, self.K + 1)
        grid = np.array(list(itertools.product(ks, repeat=self.d)), dtype=float)
        object.__setattr__(self, "modes", 2.0 * np.pi * grid)

    def __len__(self):
        return len(self.modes)

    @property
    def p_squared(self) -> np.ndarray:
        return np.sum(self.modes**2, axis=1)


@dataclass(frozen=True)
class InteractionSpec:
    """Two-body potential ``v``.

    Kinds
    -----
    ``gaussian``
        ``v(x) = g exp(-x^2 / (2 s^2))`` with transform ``g (s sqrt(2 pi))^d exp(-s^2 p^2 / 2)``.
    ``cosine_series``
        Torus potential ``v(x) = sum_k a_k cos(2 pi k x)`` (summed over axes for d > 1,
        the constant counted once); ``vhat(0) = a_0``, ``vhat(+-2 pi k e_j) = a_k / 2``.
    ``cosine_torus``
        ``g (1 + cos 2 pi x)``, i.e. the series ``(g, g)``.
    ``zero``
        No interaction.
    """

    kind: str
    g: float = 0.0
    s: float = 1.0
    coefficients: tuple = ()

    def __post_init__(self):
        if self.kind not in ("gaussian", "cosine_series", "cosine_torus", "zero"):
            raise ValueError(f"unknown interaction kind {self.kind!r}")
        if self.kind == "gaussian" and not self.s > 0:
            raise ValueError("gaussian width s must be positive")
        if self.kind == "cosine_torus":
            object.__setattr__(self, "coefficients", (float(self.g), float(self.g)))

    @classmethod
    def gaussian(cls, g: float, s: float) -> "InteractionSpec":
        return cls("gaussian", g=g, s=s)

    @classmethod
    def cosine_torus(cls, g: float) -> "InteractionSpec":
        return cls("cosine_torus", g=g)

    @classmethod
    def cosine_series(cls, coefficients) -> "InteractionSpec":
        return cls("cosine_series", coefficients=tuple(float(c) for c in coefficients))

    @classmethod
    def zero(cls) -> "InteractionSpec":
        return cls("zero")

    @property
    def is_zero(self) -> bool:
        if self.kind == "zero":
            return True
        if self.kind == "gaussian":
            return self.g == 0.0
        return not any(self.coefficients)

    @property
    def periodic(self) -> bool:
        return self.kind in ("cosine_series", "cosine_torus")

    def __call__(self, x) -> np.ndarray:
        """Evaluate at 1D coordinates (any array shape)."""
        return self.at_points(np.asarray(x, dtype=float)[..., None])

    def at_points(self, x) -> np.ndarray:
        """Evaluate at d-dimensional points stored along the last axis."""
        x = np.asarray(x, dtype=float)
        if self.kind == "zero":
            return np.zeros(x.shape[:-1])
        if self.kind == "gaussian":
            return self.g * np.exp(-np.sum(x**2, axis=-1) / (2.0 * self.s**2))
        a = self.coefficients
        out = np.full(x.shape[:-1], a[0] if a else 0.0)
        for k, ak in enumerate(a[1:], start=1):
            out = out + ak * np.sum(np.cos(2.0 * np.pi * k * x), axis=-1)
        return out

    @property
    def at_zero(self) -> float:
        return float(self(0.0))


@dataclass(frozen=True)
class ExternalPotentialSpec:
    """``harmonic``: ``omega^2 x^2``; ``quartic``: ``kappa x^4``; ``none``: zero."""

    kind: str = "none"
    omega: float = 1.0
    kappa: float = 1.0

    def __post_init__(self):
        if self.kind not in ("harmonic", "quartic", "none"):
            raise ValueError(f"unknown external potential kind {self.kind!r}")

    def __call__(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if self.kind == "harmonic":
            return self.omega**2 * x**2
        if self.kind == "quartic":
            return self.kappa * x**4
        return np.zeros_like(x)

    @property
    def confining(self) -> bool:
        return self.kind != "none"


Discretization = Union[GridSpec, ModeBasis]


def make_discretization(config: dict) -> Discretization:
    """Build a discretization from a small mapping.

    ``{"kind": "torus", "n": 256}``, ``{"kind": "box", "L": 8, "n": 256}`` or
    ``{"kind": "modes", "d": 1, "K": 2}``.
    """
    kind = config.get("kind")
    if kind == "torus":
        return GridSpec(TORUS, int(config["n"]))
    if kind in ("box", "trap"):
        return GridSpec(BOX, int(config["n"]), float(config["L"]))
    if kind == "modes":
        return ModeBasis(int(config.get("d", 1)), int(config["K"]))
    raise ValueError(f"unknown discretization kind {kind!r}")


def fourier_coefficient(v: InteractionSpec, p) -> float:
    """``vhat(p)`` on the torus (periodic kinds) or on R^d (gaussian)."""
    p = np.atleast_1d(np.asarray(p, dtype=float))
    if v.kind == "zero":
        return 0.0
    if v.kind == "gaussian":
        d = p.size
        return float(v.g * (v.s * np.sqrt(2.0 * np.pi)) ** d * np.exp(-0.5 * v.s**2 * np.dot(p, p)))
    k = np.rint(p / (2.0 * np.pi)).astype(int)
    if not np.allclose(k * 2.0 * np.pi, p, atol=1e-9):
        return 0.0
    a = v.coefficients
    nonzero = np.flatnonzero(k)
    if nonzero.size == 0:
        return float(a[0]) if a else 0.0
    if nonzero.size > 1:
        return 0.0
    kk = abs(int(k[nonzero[0]]))
    return 0.5 * float(a[kk]) if kk < len(a) else 0.0


def grid_fourier_coefficients(v: InteractionSpec, grid: GridSpec) -> tuple[np.ndarray, np.ndarray]:
    """Quadrature DFT ``sum_j w_j v(x_j) e^{-i p x_j}`` on the grid's dual lattice."""
    p = grid.dual_momenta()
    x = grid.nodes
    vals = v(x) * grid.node_weights
    coeff = np.exp(-1j * np.outer(p, x)) @ vals
    return p, coeff.real


@dataclass(frozen=True)
class PositiveTypeReport:
    passed: bool
    min_coefficient: float
    tolerance: float
    momenta: np.ndarray = field(repr=False)
    coefficients: np.ndarray = field(repr=False)


def validate_positive_type(v: InteractionSpec, disc: GridSpec) -> PositiveTypeReport:
    """Check ``vhat(p) >= 0`` on the grid's dual lattice.

    Periodic kinds are transformed by quadrature on the grid itself; the
    gaussian uses its closed-form transform.  A failing potential is reported,
    not raised.
    """
    if v.kind == "gaussian":
        p = disc.dual_momenta()
        coeff = np.array([fourier_coefficient(v, q) for q in p])
    elif v.kind == "zero":
        p = disc.dual_momenta()
        coeff = np.zeros_like(p)
    else:
        if not disc.periodic:
            raise ValueError(f"{v.kind} interaction needs a periodic discretization")
        p, coeff = grid_fourier_coefficients(v, disc)
    scale = abs(v.at_zero)
    tol = 1e-10 * scale
    min_c = float(coeff.min())
    return PositiveTypeReport(min_c >= -tol, min_c, tol, p, coeff)


def kernel_matrix(v: InteractionSpec, disc: GridSpec) -> np.ndarray:
    """``K_ij = v(x_i - x_j)`` on the active points (differences wrapped on the torus)."""
    if v.kind == "zero":
        return np.zeros((disc.size, disc.size))
    return v(disc.differences())


def convolve_density(v: InteractionSpec, rho: np.ndarray, disc: GridSpec,
                     kernel: np.ndarray | None = None) -> np.ndarray:
    """Direct-sum ``(v * rho)(x_i) = sum_j w_j v(x_i - x_j) rho(x_j)``."""
    rho = np.asarray(rho, dtype=float)
    if rho.shape != (disc.size,):
        raise ValueError(f"density has shape {rho.shape}, grid has {disc.size} points")
    if kernel is None:
        kernel = kernel_matrix(v, disc)
    return kernel @ (disc.w * rho)
