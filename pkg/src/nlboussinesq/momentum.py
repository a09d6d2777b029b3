"""Faedo-Galerkin momentum equation in the discrete Stokes basis.

    dc_k/dt + sum_ij b[i, j, k] c_i c_j = -mu lambda_k c_k + f_k,
    b[i, j, k] = <div(w_i (x) w_j), w_k>,  f_k = -<Theta grad G, w_k>.

Time stepping is Crank-Nicolson on the diagonal diffusion and second-order
Adams-Bashforth on convection plus load.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .errors import MeshMismatchError, NumericalError, PreconditionError
from .mesh import ScalarField, _convect_arrays, face_average, grad
from .stokes import GalerkinState, StokesBasis

__all__ = [
    "ConvectionTensor",
    "GalerkinState",
    "build_tensor",
    "buoyancy_load",
    "momentum_step",
    "convection",
    "convection_work",
    "dissipation_rate",
]

SKEW_FAIL = 1e-6


@dataclass(frozen=True, eq=False)
class ConvectionTensor:
    b: np.ndarray
    skew_violation: float

    @property
    def N(self) -> int:
        return self.b.shape[0]


def _full_modes(basis: StokesBasis, N: int):
    n = basis.mesh.n
    m = (n - 1) * n
    W = basis.modes[:N]
    ux = np.zeros((N, n + 1, n))
    uy = np.zeros((N, n, n + 1))
    ux[:, 1:n, :] = W[:, :m].reshape(N, n - 1, n)
    uy[:, :, 1:n] = W[:, m:].reshape(N, n, n - 1)
    return ux, uy


def build_tensor(basis: StokesBasis, N: int | None = None) -> ConvectionTensor:
    """Assemble ``b[i, j, k]`` by quadrature and verify skew-symmetry in ``(j, k)``.

    Raises
    ------
    NumericalError
        If ``max |b[i,j,k] + b[i,k,j]|`` exceeds ``1e-6 * max |b|``, which
        means the discrete adjointness behind the energy balance is broken.
    """
    N = basis.N if N is None else N
    n, h = basis.mesh.n, basis.mesh.h
    ux, uy = _full_modes(basis, N)
    W = basis.modes[:N]
    b = np.empty((N, N, N))
    for i in range(N):
        cx, cy = _convect_arrays(ux[i], uy[i], ux, uy, h)
        flat = np.concatenate([cx.reshape(N, -1), cy.reshape(N, -1)], axis=1)
        b[i] = (h * h) * flat @ W.T
    # |b[i, j, k]| <= max|w_i| ||grad w_j|| ||w_k||, which bounds the entries
    # even when the computed ones all cancel to rounding level
    scale = max(float(np.max(np.abs(b))), float(np.max(np.abs(W)) * np.sqrt(basis.eigenvalues[N - 1])))
    skew = float(np.max(np.abs(b + b.transpose(0, 2, 1))))
    if skew > SKEW_FAIL * scale:
        raise NumericalError("convection tensor is not skew-symmetric in (j, k)", skew)
    return ConvectionTensor(b, skew)


def buoyancy_load(theta: ScalarField, G: ScalarField, basis: StokesBasis, N: int | None = None) -> np.ndarray:
    """``f_k = -<Theta grad G, w_k>`` with ``Theta`` averaged onto the faces."""
    if theta.mesh != basis.mesh or G.mesh != basis.mesh:
        raise MeshMismatchError("temperature, potential and basis must share a mesh")
    N = basis.N if N is None else N
    n, h = basis.mesh.n, basis.mesh.h
    ta = face_average(theta)
    g = grad(G)
    fx = (ta.ux * g.ux)[1:n, :].ravel()
    fy = (ta.uy * g.uy)[:, 1:n].ravel()
    return -(h * h) * (basis.modes[:N] @ np.concatenate([fx, fy]))


def convection(c: np.ndarray, tensor: ConvectionTensor) -> np.ndarray:
    """Galerkin convection term ``sum_ij b[i, j, k] c_i c_j``."""
    return np.einsum("ijk,i,j->k", tensor.b, c, c, optimize=True)


def convection_work(c: np.ndarray, tensor: ConvectionTensor) -> float:
    """Work of convection on ``c``; zero up to rounding for a skew tensor."""
    return float(convection(c, tensor) @ c)


def dissipation_rate(c: np.ndarray, eigenvalues: np.ndarray, mu: float) -> float:
    """``mu ||grad v_N||^2 = mu sum_n lambda_n c_n^2``."""
    N = len(c)
    return float(mu * np.sum(eigenvalues[:N] * c * c))


def momentum_step(
    state: GalerkinState,
    tensor: ConvectionTensor | None,
    eigenvalues: np.ndarray,
    load: np.ndarray | None,
    dt: float,
    mu: float,
) -> GalerkinState:
    """One IMEX step; ``tensor=None`` or ``load=None`` switch the term off."""
    if not dt > 0:
        raise PreconditionError(f"dt must be > 0, got {dt}")
    c = state.c
    N = len(c)
    lam = np.asarray(eigenvalues[:N], dtype=float)
    F = np.zeros(N)
    if tensor is not None:
        if tensor.N != N:
            raise PreconditionError(f"tensor has {tensor.N} modes, state has {N}")
        F -= convection(c, tensor)
    if load is not None:
        F += load
    if state.prev_explicit is None:
        explicit = F
    else:
        w = dt / state.prev_dt
        explicit = (1.0 + 0.5 * w) * F - 0.5 * w * state.prev_explicit
    half = 0.5 * dt * mu * lam
    new = ((1.0 - half) * c + dt * explicit) / (1.0 + half)
    if not np.all(np.isfinite(new)):
        raise NumericalError("momentum step overflowed")
    return GalerkinState(new, state.t + dt, F, dt)


MOMENTUM_TAIL = ("kinetic_energy", "dissipation")


def write_coefficients(path, rows: list[tuple[float, np.ndarray, float, float]]):
    """Write ``(t, c, kinetic energy, cumulative dissipation)`` rows to CSV."""
    if not rows:
        raise ValueError("no rows to write")
    N = len(rows[0][1])
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["t", *[f"c_{k + 1}" for k in range(N)], *MOMENTUM_TAIL])
        for t, c, ke, diss in rows:
            w.writerow([repr(float(t)), *[repr(float(x)) for x in c], repr(float(ke)), repr(float(diss))])
