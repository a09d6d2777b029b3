"""Preset initial and boundary data.

Every preset is built for ``a = 0``. Temperatures are made compatible with
the non-local condition by the constant shift ``c = lambda avint(base + bump) / (1 + lambda)``,
where ``base`` carries the boundary data and ``bump`` vanishes on the boundary.
The ``sin^3`` bumps also have vanishing Laplacian and normal derivative on the
wall, which is what the classical compatibility level asks of the data.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .mesh import Mesh, ScalarField, VectorField, avint, potential, sample
from .stokes import StokesBasis, reconstruct


@dataclass(frozen=True, eq=False)
class ScenarioBundle:
    id: str
    theta_0: ScalarField
    theta_B: ScalarField
    v_0: VectorField
    G: ScalarField
    level: int
    evolve_velocity: bool = True
    theta_0_b: ScalarField | None = None
    v_frozen: VectorField | None = None
    description: str = ""


def compatible_shift(base: ScalarField, bump: ScalarField, lam: float) -> ScalarField:
    """``base + bump - c`` with ``c`` chosen so the non-local condition holds at t = 0."""
    s = base + bump
    c = lam * avint(s) / (1.0 + lam)
    return s - c


def _sin3(mesh: Mesh, weight=lambda x, y: 1.0) -> ScalarField:
    return sample(mesh, lambda x, y: np.sin(np.pi * x) ** 3 * np.sin(np.pi * y) ** 3 * weight(x, y))


def dirichlet_mode(mesh: Mesh) -> ScalarField:
    """``sin(pi x) sin(pi y)``, the first Dirichlet eigenfunction, with zero trace."""
    return sample(mesh, lambda x, y: np.sin(np.pi * x) * np.sin(np.pi * y))


def saddle_boundary(mesh: Mesh, T_B: float) -> ScalarField:
    return sample(mesh, lambda x, y: T_B * ((x - 0.5) ** 2 - (y - 0.5) ** 2))


def frozen_velocity(basis: StokesBasis, vmax: float = 1.0) -> VectorField:
    """First Stokes mode rescaled to ``max |v| = vmax``."""
    w = reconstruct(np.eye(1)[0], basis)
    return w * (vmax / w.max_abs())


def scenario(
    sid: str,
    mesh: Mesh,
    lam: float,
    T_B: float = 1.0,
    amplitude: float = 1.0,
    basis: StokesBasis | None = None,
) -> ScenarioBundle:
    """Build the named preset on ``mesh`` for the non-local parameter ``lam``."""
    G = potential(mesh, "y")
    zero_v = VectorField.zeros(mesh)
    if sid == "equilibrium":
        theta_B = ScalarField.constant(mesh, T_B)
        theta_0 = ScalarField.constant(mesh, T_B / (1.0 + lam))
        return ScenarioBundle(sid, theta_0, theta_B, zero_v, G, 3, description="constant steady state")
    if sid == "thermal-decay":
        theta_B = ScalarField.constant(mesh, T_B)
        theta_0 = compatible_shift(theta_B, amplitude * _sin3(mesh), lam)
        return ScenarioBundle(
            sid, theta_0, theta_B, zero_v, G, 3, evolve_velocity=False,
            description="pure conduction from a compatible bump, v = 0",
        )
    if sid == "buoyant-cell":
        theta_B = saddle_boundary(mesh, T_B)
        bump = amplitude * _sin3(mesh, lambda x, y: 2.0 * x - 0.5)
        theta_0 = compatible_shift(theta_B, bump, lam)
        return ScenarioBundle(
            sid, theta_0, theta_B, zero_v, G, 3,
            description="saddle boundary temperature driving convection cells, G = y - 1/2",
        )
    if sid == "uniqueness-pair":
        if basis is None:
            raise ValueError("uniqueness-pair needs a Stokes basis for its frozen velocity")
        theta_B = ScalarField.constant(mesh, T_B)
        theta_0 = compatible_shift(theta_B, _sin3(mesh), lam)
        theta_0_b = theta_0 + (1e-3 * amplitude) * dirichlet_mode(mesh)
        return ScenarioBundle(
            sid, theta_0, theta_B, zero_v, G, 1, evolve_velocity=False,
            theta_0_b=theta_0_b, v_frozen=frozen_velocity(basis),
            description="two temperatures differing by 1e-3 sin(pi x) sin(pi y), frozen flow",
        )
    raise ValueError(f"unknown scenario {sid!r}")
