"""Temperature solver for the non-local Dirichlet problem.

The unknown is ``Z = Theta + lambda avint(Theta) - E`` with ``E`` the discrete
harmonic lift of the boundary data, so that ``Z`` vanishes on the boundary and
satisfies

    (I - beta A) dZ/dt + div(v (Z + E)) = kappa Lap0 Z,     beta = lambda / (1 + lambda).

Diffusion is Crank-Nicolson, advection second-order Adams-Bashforth (forward
Euler on the first step). Each implicit solve is a Helmholtz solve wrapped by
the Sherman-Morrison formula for the rank-one averaging term.
"""

from __future__ import annotations

import csv
import logging
import warnings
from dataclasses import dataclass, field, replace
from functools import lru_cache
from pathlib import Path

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .errors import CFLError, MeshMismatchError, NumericalError, PreconditionError
from .mesh import (
    Mesh,
    ScalarField,
    VectorField,
    advect,
    avint,
    dirichlet_laplacian_matrix,
    face_average,
    grad,
    harmonic_extension,
    inner,
    laplace_dirichlet,
    max_divergence,
    vinner,
)
from .nonlocal_ops import NonlocalParams, weighted_norm

log = logging.getLogger(__name__)

SOLVE_RTOL = 1e-11
COMPAT_TOL = 1e-10


class CompatibilityWarning(UserWarning):
    """Initial temperature violates the non-local boundary condition at t = 0."""


@dataclass(frozen=True, eq=False)
class HeatState:
    Z: ScalarField
    E: ScalarField
    theta_B: np.ndarray
    params: NonlocalParams
    t: float = 0.0
    G: ScalarField | None = None
    prev_adv: np.ndarray | None = field(default=None, repr=False)
    prev_dt: float | None = None
    compat_residual: float = 0.0

    @property
    def mesh(self) -> Mesh:
        return self.Z.mesh

    @property
    def mean_V(self) -> float:
        return avint(self.Z) + avint(self.E)

    def advected(self) -> ScalarField:
        """Quantity carried by the flow: ``Z + E`` plus ``a G`` when unshifted."""
        q = self.Z + self.E
        if self.G is not None and self.params.a != 0.0:
            q = q + self.params.a * self.G
        return q


def _trace_of(theta_B, mesh: Mesh) -> np.ndarray:
    if isinstance(theta_B, ScalarField):
        if theta_B.mesh != mesh:
            raise MeshMismatchError("boundary data on a different mesh")
        return np.array(theta_B.trace)
    g = np.array(theta_B, dtype=float)
    if g.shape == ():
        g = np.full((4, mesh.n), float(g))
    if g.shape != (4, mesh.n):
        raise MeshMismatchError(f"boundary data shape {g.shape}, expected (4, {mesh.n})")
    return g


def compatibility_residual(theta_0: ScalarField, theta_B, lam: float) -> float:
    """``max |Theta_0 + lambda avint(Theta_0) - Theta_B|`` over the boundary trace."""
    g = _trace_of(theta_B, theta_0.mesh)
    return float(np.max(np.abs(theta_0.trace + lam * avint(theta_0) - g)))


def init_heat(theta_0: ScalarField, theta_B, params: NonlocalParams, G: ScalarField | None = None) -> HeatState:
    """Lift the initial temperature to ``Z_0 = Theta_0 + lambda avint(Theta_0) - E``.

    ``G`` is only needed when solving the unshifted problem with ``a != 0``.
    An incompatible ``theta_0`` triggers a :class:`CompatibilityWarning`; the
    weak formulation still admits it.
    """
    mesh = theta_0.mesh
    if not np.all(np.isfinite(theta_0.values)):
        raise NumericalError("initial temperature is not finite")
    g = _trace_of(theta_B, mesh)
    if params.a != 0.0 and G is None:
        raise PreconditionError("a != 0 requires the potential G (or a prior shift_reduce)")
    E = harmonic_extension(g, mesh)
    lam = params.lam
    Z0 = theta_0.values + lam * avint(theta_0) - E.values
    res = compatibility_residual(theta_0, g, lam)
    scale = max(1.0, float(np.max(np.abs(g))), theta_0.max_abs())
    if res > COMPAT_TOL * scale:
        warnings.warn(
            f"initial temperature violates the non-local boundary condition, residual {res:.3e}",
            CompatibilityWarning,
            stacklevel=2,
        )
    return HeatState(ScalarField(mesh, Z0), E, g, params, 0.0, G, compat_residual=res)


@dataclass(frozen=True)
class _Helmholtz:
    lu: object
    H: sp.csr_matrix
    u: np.ndarray
    mean_u: float


@lru_cache(maxsize=16)
def _helmholtz(n: int, alpha: float) -> _Helmholtz:
    # H = I - alpha Lap0; u = H^{-1} 1 feeds the Sherman-Morrison correction
    L0 = dirichlet_laplacian_matrix(n)
    H = (sp.identity(n * n) - alpha * L0).tocsr()
    lu = spla.splu(H.tocsc())
    u = lu.solve(np.ones(n * n))
    return _Helmholtz(lu, H, u, float(np.mean(u)))


def solve_shifted_mass(rhs: np.ndarray, n: int, alpha: float, lam: float) -> np.ndarray:
    """Solve ``((I - alpha Lap0) - beta A) x = rhs`` for the flattened cell vector.

    With ``alpha = 0`` this reduces to :func:`nonlocal_ops.invert_mass`.
    """
    beta = lam / (1.0 + lam)
    hz = _helmholtz(n, float(alpha))
    y = hz.lu.solve(rhs)
    x = y + hz.u * (beta * float(np.mean(y)) / (1.0 - beta * hz.mean_u))
    residual = hz.H @ x - beta * float(np.mean(x)) - rhs
    scale = float(np.linalg.norm(rhs))
    r = float(np.linalg.norm(residual))
    if r > SOLVE_RTOL * scale:
        raise NumericalError("non-local Helmholtz solve failed", r / scale)
    return x


def admissible_dt(v: VectorField) -> float:
    vmax = v.max_abs()
    return np.inf if vmax == 0 else v.mesh.h / vmax


def check_velocity(v: VectorField, dt: float | None = None):
    """Raise unless ``v`` has zero normal trace, is solenoidal, and meets the CFL bound."""
    vmax = v.max_abs()
    if np.max(np.abs(v.normal_trace())) > 0.0:
        raise PreconditionError("velocity must have zero normal trace (no-slip)")
    if vmax > 0 and max_divergence(v) > 1e-10 * vmax:
        raise PreconditionError("velocity is not discretely solenoidal")
    if dt is not None and vmax * dt / v.mesh.h > 1.0:
        raise CFLError(dt, admissible_dt(v))


def heat_step(state: HeatState, v: VectorField, dt: float) -> HeatState:
    """Advance the temperature by one step with the velocity ``v`` frozen."""
    if not dt > 0:
        raise PreconditionError(f"dt must be > 0, got {dt}")
    mesh = state.mesh
    if v.mesh != mesh:
        raise MeshMismatchError("velocity and temperature live on different meshes")
    check_velocity(v, dt)
    n = mesh.n
    p = state.params
    Z = state.Z.values.ravel()

    adv = advect(v, state.advected()).values.ravel()
    if state.prev_adv is None:
        explicit = adv
    else:
        w = dt / state.prev_dt
        explicit = (1.0 + 0.5 * w) * adv - 0.5 * w * state.prev_adv

    alpha = 0.5 * dt * p.kappa
    L0 = dirichlet_laplacian_matrix(n)
    rhs = Z - p.beta * float(np.mean(Z)) + alpha * (L0 @ Z) - dt * explicit
    Znew = solve_shifted_mass(rhs, n, alpha, p.lam)
    if not np.all(np.isfinite(Znew)):
        raise NumericalError("temperature step produced non-finite values")
    return replace(
        state,
        Z=ScalarField(mesh, Znew.reshape(n, n)),
        t=state.t + dt,
        prev_adv=adv,
        prev_dt=dt,
    )


def reconstruct_theta(state: HeatState) -> ScalarField:
    """``Theta = V - lambda avint(V) / (1 + lambda)`` with ``V = Z + E``."""
    V = state.Z + state.E  # Z has zero trace, so V carries the trace of E
    return V - state.params.beta * avint(V)


def boundary_residual(state: HeatState, theta: ScalarField | None = None) -> float:
    """``max |Theta + lambda avint(Theta) - Theta_B|`` on the boundary."""
    theta = reconstruct_theta(state) if theta is None else theta
    return float(np.max(np.abs(theta.trace + state.params.lam * avint(theta) - state.theta_B)))


# ---------------------------------------------------------------------------
# energy terms


def heat_quadratic(state: HeatState) -> float:
    """``1/2 (1/(1+lambda)) ||Theta + lambda avint(Theta) - Theta_B||^2`` (lifted)."""
    return 0.5 * inner(state.Z, state.Z) / (1.0 + state.params.lam)


def weighted_energy(state: HeatState) -> float:
    """``1/2 Q(Z)``, the sharper quantity that the lifted equation dissipates."""
    return 0.5 * weighted_norm(state.Z, state.params.lam)


def thermal_dissipation_rate(Z: ScalarField | np.ndarray, kappa: float, mesh: Mesh | None = None) -> float:
    """``kappa ||grad Z||^2`` with ``Z`` vanishing on the boundary."""
    if not isinstance(Z, ScalarField):
        Z = ScalarField(mesh, Z)
    zero = ScalarField(Z.mesh, Z.values)
    return -kappa * inner(laplace_dirichlet(zero, np.zeros((4, Z.mesh.n))), zero)


def boundary_work_rate(state: HeatState, v: VectorField) -> float:
    """``int Theta_B v . grad(Theta - Theta_B)`` with the harmonic lift for ``Theta_B``."""
    lift = state.E
    if state.G is not None and state.params.a != 0.0:
        lift = lift + state.params.a * state.G
    la = face_average(lift)
    flux = VectorField(v.mesh, v.ux * la.ux, v.uy * la.uy)
    return vinner(flux, grad(ScalarField(state.mesh, state.Z.values)))


# ---------------------------------------------------------------------------
# monitors and experiments


class ExtremumMonitor:
    """Running minimum and maximum of the reconstructed temperature."""

    def __init__(self):
        self.min = np.inf
        self.max = -np.inf

    def __call__(self, state: HeatState | ScalarField) -> tuple[float, float]:
        theta = reconstruct_theta(state) if isinstance(state, HeatState) else state
        lo = min(float(np.min(theta.values)), float(np.min(theta.trace)))
        hi = max(float(np.max(theta.values)), float(np.max(theta.trace)))
        self.min = min(self.min, lo)
        self.max = max(self.max, hi)
        return self.min, self.max


def extremum_monitor(state: HeatState, monitor: ExtremumMonitor | None = None) -> tuple[float, float]:
    monitor = ExtremumMonitor() if monitor is None else monitor
    return monitor(state)


HEAT_COLUMNS = ("t", "Q", "boundary_residual", "theta_min", "theta_max", "dissipation", "advection_work")


@dataclass
class HeatRun:
    states: list[HeatState]
    rows: list[dict]


def run_heat(
    state: HeatState,
    v: VectorField,
    dt: float,
    steps: int,
    csv_path: Path | str | None = None,
    keep_states: bool = False,
) -> HeatRun:
    """Step the temperature ``steps`` times with a frozen velocity and log each step.

    Dissipation and advection work are cumulative time integrals; the
    dissipation uses the Crank-Nicolson midpoint, the work the trapezoid rule.
    """
    kappa = state.params.kappa
    monitor = ExtremumMonitor()
    diss = work = 0.0

    def row(s):
        lo, hi = monitor(s)
        return {
            "t": s.t,
            "Q": weighted_norm(s.Z, s.params.lam),
            "boundary_residual": boundary_residual(s),
            "theta_min": lo,
            "theta_max": hi,
            "dissipation": diss,
            "advection_work": work,
        }

    rows = [row(state)]
    states = [state]
    w0 = boundary_work_rate(state, v)
    for _ in range(steps):
        new = heat_step(state, v, dt)
        zmid = 0.5 * (state.Z.values + new.Z.values)
        diss += dt * thermal_dissipation_rate(zmid, kappa, state.mesh)
        w1 = boundary_work_rate(new, v)
        work += 0.5 * dt * (w0 + w1)
        w0 = w1
        state = new
        rows.append(row(state))
        if keep_states:
            states.append(state)
    if not keep_states:
        states.append(state)
    if csv_path is not None:
        write_rows(csv_path, HEAT_COLUMNS, rows)
    return HeatRun(states, rows)


def write_rows(path, columns, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(columns)
        for r in rows:
            w.writerow([repr(float(r[c])) for c in columns])


@dataclass
class UniquenessReport:
    times: np.ndarray
    Q: np.ndarray
    monotone: bool
    max_increase: float
    scale: float
    max_Q: float


def uniqueness_experiment(
    theta_0_a: ScalarField,
    theta_0_b: ScalarField,
    v: VectorField,
    T: float,
    dt: float,
    theta_B=0.0,
    params: NonlocalParams | None = None,
) -> UniquenessReport:
    """Evolve two temperatures with the same velocity and boundary data.

    Reports the weighted norm ``Q(V)`` of the difference in the lifted
    variable at every step. ``monotone`` holds when no step increases ``Q`` by
    more than ``1e-12 * scale`` with ``scale = max(Q(0), max|Theta_0|^2)``.
    """
    params = params if params is not None else NonlocalParams(lam=1.0, kappa=1.0, mu=1.0)
    check_velocity(v)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", CompatibilityWarning)
        sa = init_heat(theta_0_a, theta_B, params)
        sb = init_heat(theta_0_b, theta_B, params)
    steps = int(round(T / dt))
    lam = params.lam
    Q = [weighted_norm(sa.Z - sb.Z, lam)]
    for _ in range(steps):
        sa = heat_step(sa, v, dt)
        sb = heat_step(sb, v, dt)
        Q.append(weighted_norm(ScalarField(sa.mesh, sa.Z.values - sb.Z.values), lam))
    Q = np.array(Q)
    scale = max(Q[0], theta_0_a.max_abs() ** 2, theta_0_b.max_abs() ** 2)
    inc = np.diff(Q)
    max_inc = float(np.max(inc)) if len(inc) else 0.0
    return UniquenessReport(
        times=np.arange(steps + 1) * dt,
        Q=Q,
        monotone=bool(max_inc <= 1e-12 * scale),
        max_increase=max_inc,
        scale=float(scale),
        max_Q=float(np.max(Q)),
    )
