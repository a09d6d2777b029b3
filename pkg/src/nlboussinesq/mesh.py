"""Staggered (MAC) discretization of the unit square.

Layout, with ``n = nx = ny`` and ``h = 1/n``::

    scalar  f[i, j]   cell centre   x = (i + 1/2) h, y = (j + 1/2) h   shape (n, n)
    ux[i, j]          vertical face x = i h,         y = (j + 1/2) h   shape (n + 1, n)
    uy[i, j]          horiz. face   x = (i + 1/2) h, y = j h           shape (n, n + 1)

Scalar boundary traces are stored as an array of shape ``(4, n)`` with rows
``west, east, south, north``; west/east rows are indexed by ``j`` and
south/north rows by ``i``, i.e. they sit at the midpoints of the boundary faces.

Dirichlet data enter the cell-centred Laplacian through the linear ghost value
``2 g - f``, which keeps the homogeneous operator symmetric negative definite.
Velocity no-slip is imposed the same way for the tangential component; the
normal component lives on the boundary faces and is zero there.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .errors import MeshMismatchError, NumericalError

WEST, EAST, SOUTH, NORTH = range(4)
SIDES = ("west", "east", "south", "north")


@dataclass(frozen=True)
class Mesh:
    """Uniform square mesh of the unit square with ``nx = ny`` cells per axis."""

    nx: int
    ny: int | None = None

    def __post_init__(self):
        ny = self.nx if self.ny is None else self.ny
        if int(self.nx) != self.nx or int(ny) != ny:
            raise ValueError("cell counts must be integers")
        if self.nx != ny:
            raise ValueError(f"square cells required: nx={self.nx}, ny={ny}")
        if self.nx < 8:
            raise ValueError(f"nx must be at least 8, got {self.nx}")
        object.__setattr__(self, "nx", int(self.nx))
        object.__setattr__(self, "ny", int(ny))

    @property
    def n(self) -> int:
        return self.nx

    @property
    def h(self) -> float:
        return 1.0 / self.nx

    @property
    def area(self) -> float:
        return 1.0

    @property
    def weights(self) -> np.ndarray:
        """Midpoint quadrature weights of the cells."""
        return np.full((self.n, self.n), self.h * self.h)

    def cell_centres(self) -> tuple[np.ndarray, np.ndarray]:
        c = (np.arange(self.n) + 0.5) * self.h
        return np.meshgrid(c, c, indexing="ij")

    def x_faces(self) -> tuple[np.ndarray, np.ndarray]:
        x = np.arange(self.n + 1) * self.h
        y = (np.arange(self.n) + 0.5) * self.h
        return np.meshgrid(x, y, indexing="ij")

    def y_faces(self) -> tuple[np.ndarray, np.ndarray]:
        x = (np.arange(self.n) + 0.5) * self.h
        y = np.arange(self.n + 1) * self.h
        return np.meshgrid(x, y, indexing="ij")

    def boundary_points(self) -> tuple[np.ndarray, np.ndarray]:
        """Coordinates of the trace locations, each of shape ``(4, n)``."""
        s = (np.arange(self.n) + 0.5) * self.h
        zero, one = np.zeros(self.n), np.ones(self.n)
        bx = np.stack([zero, one, s, s])
        by = np.stack([s, s, zero, one])
        return bx, by

    @property
    def n_interior_faces(self) -> int:
        return 2 * self.n * (self.n - 1)


def _frozen(a, shape, what) -> np.ndarray:
    arr = np.array(a, dtype=float)
    if arr.shape != shape:
        raise ValueError(f"{what} has shape {arr.shape}, expected {shape}")
    if not np.all(np.isfinite(arr)):
        raise NumericalError(f"non-finite entries in {what}")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class ScalarField:
    """Cell-centred scalar with its boundary trace."""

    mesh: Mesh
    values: np.ndarray
    trace: np.ndarray | None = None

    def __post_init__(self):
        n = self.mesh.n
        object.__setattr__(self, "values", _frozen(self.values, (n, n), "values"))
        tr = np.zeros((4, n)) if self.trace is None else self.trace
        object.__setattr__(self, "trace", _frozen(tr, (4, n), "trace"))

    @classmethod
    def constant(cls, mesh: Mesh, c: float) -> ScalarField:
        return cls(mesh, np.full((mesh.n, mesh.n), float(c)), np.full((4, mesh.n), float(c)))

    @classmethod
    def zeros(cls, mesh: Mesh) -> ScalarField:
        return cls.constant(mesh, 0.0)

    def with_values(self, values, trace=None) -> ScalarField:
        return ScalarField(self.mesh, values, self.trace if trace is None else trace)

    def __add__(self, other):
        if isinstance(other, ScalarField):
            _check_same(self.mesh, other.mesh)
            return ScalarField(self.mesh, self.values + other.values, self.trace + other.trace)
        return ScalarField(self.mesh, self.values + other, self.trace + other)

    def __sub__(self, other):
        if isinstance(other, ScalarField):
            _check_same(self.mesh, other.mesh)
            return ScalarField(self.mesh, self.values - other.values, self.trace - other.trace)
        return ScalarField(self.mesh, self.values - other, self.trace - other)

    def __mul__(self, c: float):
        return ScalarField(self.mesh, self.values * c, self.trace * c)

    __rmul__ = __mul__

    def __neg__(self):
        return self * -1.0

    def max_abs(self) -> float:
        return float(max(np.max(np.abs(self.values)), np.max(np.abs(self.trace))))


@dataclass(frozen=True, eq=False)
class VectorField:
    """Face-centred (staggered) vector field."""

    mesh: Mesh
    ux: np.ndarray
    uy: np.ndarray

    def __post_init__(self):
        n = self.mesh.n
        object.__setattr__(self, "ux", _frozen(self.ux, (n + 1, n), "ux"))
        object.__setattr__(self, "uy", _frozen(self.uy, (n, n + 1), "uy"))

    @classmethod
    def zeros(cls, mesh: Mesh) -> VectorField:
        n = mesh.n
        return cls(mesh, np.zeros((n + 1, n)), np.zeros((n, n + 1)))

    @classmethod
    def from_interior(cls, mesh: Mesh, vec: np.ndarray) -> VectorField:
        """Build a field with zero normal trace from its interior-face values."""
        n = mesh.n
        m = (n - 1) * n
        ux = np.zeros((n + 1, n))
        uy = np.zeros((n, n + 1))
        ux[1:n, :] = vec[:m].reshape(n - 1, n)
        uy[:, 1:n] = vec[m:].reshape(n, n - 1)
        return cls(mesh, ux, uy)

    def interior(self) -> np.ndarray:
        n = self.mesh.n
        return np.concatenate([self.ux[1:n, :].ravel(), self.uy[:, 1:n].ravel()])

    def __add__(self, other: VectorField) -> VectorField:
        _check_same(self.mesh, other.mesh)
        return VectorField(self.mesh, self.ux + other.ux, self.uy + other.uy)

    def __sub__(self, other: VectorField) -> VectorField:
        _check_same(self.mesh, other.mesh)
        return VectorField(self.mesh, self.ux - other.ux, self.uy - other.uy)

    def __mul__(self, c: float) -> VectorField:
        return VectorField(self.mesh, self.ux * c, self.uy * c)

    __rmul__ = __mul__

    def max_abs(self) -> float:
        return float(max(np.max(np.abs(self.ux)), np.max(np.abs(self.uy))))

    def normal_trace(self) -> np.ndarray:
        """Normal components on the four walls, shape ``(4, n)``."""
        return np.stack([self.ux[0], self.ux[-1], self.uy[:, 0], self.uy[:, -1]])


def _check_same(a: Mesh, b: Mesh):
    if a != b:
        raise MeshMismatchError(f"mesh mismatch: {a} vs {b}")


def sample(mesh: Mesh, func: Callable[[np.ndarray, np.ndarray], np.ndarray]) -> ScalarField:
    """Sample ``func(x, y)`` at the cell centres and the trace points."""
    x, y = mesh.cell_centres()
    bx, by = mesh.boundary_points()
    values = np.broadcast_to(func(x, y), x.shape)
    trace = np.broadcast_to(func(bx, by), bx.shape)
    return ScalarField(mesh, values, trace)


def sample_vector(mesh: Mesh, fx, fy) -> VectorField:
    """Sample a velocity at the faces; the normal trace is set to zero."""
    X, Y = mesh.x_faces()
    ux = np.array(np.broadcast_to(fx(X, Y), X.shape), dtype=float)
    X, Y = mesh.y_faces()
    uy = np.array(np.broadcast_to(fy(X, Y), X.shape), dtype=float)
    ux[0] = ux[-1] = 0.0
    uy[:, 0] = uy[:, -1] = 0.0
    return VectorField(mesh, ux, uy)


# ---------------------------------------------------------------------------
# quadrature and inner products


def avint(f: ScalarField) -> float:
    """Domain average ``(1/|Omega|) sum_i w_i f_i`` with midpoint weights."""
    m = f.mesh
    return float(np.sum(f.values) * (m.h * m.h) / m.area)


def inner(f: ScalarField, g: ScalarField) -> float:
    """Discrete L2 inner product of two cell fields."""
    _check_same(f.mesh, g.mesh)
    h = f.mesh.h
    return float(np.sum(f.values * g.values) * h * h)


def norm(f: ScalarField) -> float:
    return float(np.sqrt(inner(f, f)))


def vinner(u: VectorField, w: VectorField) -> float:
    """Discrete L2 inner product of face fields.

    Interior faces carry the weight ``h^2``; boundary faces, whose control
    volumes are cut in half by the wall, carry ``h^2 / 2``.
    """
    _check_same(u.mesh, w.mesh)
    h2 = u.mesh.h ** 2
    px = u.ux * w.ux
    py = u.uy * w.uy
    s = np.sum(px[1:-1]) + np.sum(py[:, 1:-1])
    s += 0.5 * (np.sum(px[0]) + np.sum(px[-1]) + np.sum(py[:, 0]) + np.sum(py[:, -1]))
    return float(s * h2)


def vnorm(u: VectorField) -> float:
    return float(np.sqrt(vinner(u, u)))


# ---------------------------------------------------------------------------
# differential operators


def grad(f: ScalarField) -> VectorField:
    """Staggered gradient; the boundary faces use the stored trace at distance h/2."""
    h = f.mesh.h
    v, tr = f.values, f.trace
    n = f.mesh.n
    gx = np.empty((n + 1, n))
    gy = np.empty((n, n + 1))
    gx[1:n] = (v[1:] - v[:-1]) / h
    gx[0] = (v[0] - tr[WEST]) / (0.5 * h)
    gx[n] = (tr[EAST] - v[-1]) / (0.5 * h)
    gy[:, 1:n] = (v[:, 1:] - v[:, :-1]) / h
    gy[:, 0] = (v[:, 0] - tr[SOUTH]) / (0.5 * h)
    gy[:, n] = (tr[NORTH] - v[:, -1]) / (0.5 * h)
    return VectorField(f.mesh, gx, gy)


def div(u: VectorField) -> ScalarField:
    h = u.mesh.h
    d = (u.ux[1:] - u.ux[:-1] + u.uy[:, 1:] - u.uy[:, :-1]) / h
    return ScalarField(u.mesh, d)


def max_divergence(u: VectorField) -> float:
    return float(np.max(np.abs(div(u).values)))


def is_solenoidal(u: VectorField, rtol: float = 1e-10) -> bool:
    scale = u.max_abs()
    return max_divergence(u) <= rtol * scale if scale > 0 else True


def _with_ghosts(values: np.ndarray, g: np.ndarray) -> np.ndarray:
    n = values.shape[0]
    p = np.zeros((n + 2, n + 2))
    p[1:-1, 1:-1] = values
    p[0, 1:-1] = 2.0 * g[WEST] - values[0]
    p[-1, 1:-1] = 2.0 * g[EAST] - values[-1]
    p[1:-1, 0] = 2.0 * g[SOUTH] - values[:, 0]
    p[1:-1, -1] = 2.0 * g[NORTH] - values[:, -1]
    return p


def laplace_dirichlet(f: ScalarField, g: np.ndarray | ScalarField | None = None) -> ScalarField:
    """Five-point Laplacian with Dirichlet data ``g`` imposed through ghost reflection.

    ``g`` may be a ``(4, n)`` trace array, a field whose trace is used, or
    ``None`` to use the trace of ``f`` itself.
    """
    if g is None:
        g = f.trace
    elif isinstance(g, ScalarField):
        _check_same(f.mesh, g.mesh)
        g = g.trace
    g = np.asarray(g, dtype=float)
    if g.shape != (4, f.mesh.n):
        raise MeshMismatchError(f"boundary data of shape {g.shape} on mesh {f.mesh}")
    h = f.mesh.h
    p = _with_ghosts(f.values, g)
    lap = (p[2:, 1:-1] + p[:-2, 1:-1] + p[1:-1, 2:] + p[1:-1, :-2] - 4.0 * f.values) / (h * h)
    return ScalarField(f.mesh, lap)


def _tridiag_ghost(m: int) -> sp.spmatrix:
    d = -2.0 * np.ones(m)
    d[0] = d[-1] = -3.0
    off = np.ones(m - 1)
    return sp.diags([off, d, off], [-1, 0, 1])


@lru_cache(maxsize=8)
def dirichlet_laplacian_matrix(n: int) -> sp.csr_matrix:
    """Homogeneous Dirichlet Laplacian acting on ``values.ravel()`` (C order)."""
    h = 1.0 / n
    T = _tridiag_ghost(n)
    eye = sp.identity(n)
    return ((sp.kron(T, eye) + sp.kron(eye, T)) / (h * h)).tocsr()


@lru_cache(maxsize=8)
def _dirichlet_solver(n: int):
    return spla.splu(dirichlet_laplacian_matrix(n).tocsc())


def harmonic_extension(theta_B: np.ndarray | ScalarField, mesh: Mesh | None = None) -> ScalarField:
    """Discrete harmonic lift of boundary data into the interior.

    Parameters
    ----------
    theta_B : array of shape (4, n) or ScalarField
        Boundary data; for a field, its trace is used.
    mesh : Mesh, optional
        Required when ``theta_B`` is a bare array.

    Returns
    -------
    ScalarField
        Field ``E`` with ``laplace_dirichlet(E, theta_B) = 0`` and trace ``theta_B``.

    Raises
    ------
    NumericalError
        If the interior residual exceeds ``1e-10 * max|theta_B|``.
    """
    if isinstance(theta_B, ScalarField):
        mesh = theta_B.mesh
        g = theta_B.trace
    else:
        g = np.asarray(theta_B, dtype=float)
        if mesh is None:
            raise ValueError("mesh is required for array boundary data")
    n = mesh.n
    if g.shape != (4, n) or not np.all(np.isfinite(g)):
        raise NumericalError("boundary data must be finite with shape (4, n)")
    rhs = -laplace_dirichlet(ScalarField(mesh, np.zeros((n, n))), g).values.ravel()
    E = ScalarField(mesh, _dirichlet_solver(n).solve(rhs).reshape(n, n), g)
    residual = float(np.max(np.abs(laplace_dirichlet(E, g).values)))
    scale = float(np.max(np.abs(g)))
    if residual > 1e-10 * scale:
        raise NumericalError("harmonic extension did not converge", residual)
    return E


def face_average(f: ScalarField) -> VectorField:
    """Interpolate a cell field to the faces; boundary faces take the trace."""
    v, tr = f.values, f.trace
    n = f.mesh.n
    fx = np.empty((n + 1, n))
    fy = np.empty((n, n + 1))
    fx[1:n] = 0.5 * (v[1:] + v[:-1])
    fx[0], fx[n] = tr[WEST], tr[EAST]
    fy[:, 1:n] = 0.5 * (v[:, 1:] + v[:, :-1])
    fy[:, 0], fy[:, n] = tr[SOUTH], tr[NORTH]
    return VectorField(f.mesh, fx, fy)


def advect(v: VectorField, f: ScalarField) -> ScalarField:
    """Conservative central advection ``div(v f)`` with face-averaged ``f``.

    Skew-adjoint in ``f`` whenever ``v`` is discretely solenoidal with zero
    normal trace.
    """
    _check_same(v.mesh, f.mesh)
    fa = face_average(f)
    return div(VectorField(v.mesh, v.ux * fa.ux, v.uy * fa.uy))


def vector_laplacian(u: VectorField) -> VectorField:
    """Component-wise Laplacian under no-slip, evaluated on the interior faces.

    The tangential wall value is imposed by the ghost ``-u``; the normal
    boundary faces are taken as given (zero for admissible velocities).
    """
    n = u.mesh.n
    h2 = u.mesh.h ** 2
    ux, uy = u.ux, u.uy
    lx = np.zeros((n + 1, n))
    px = np.zeros((n + 1, n + 2))
    px[:, 1:-1] = ux
    px[:, 0] = -ux[:, 0]
    px[:, -1] = -ux[:, -1]
    lx[1:n] = (ux[2:] + ux[:-2] - 2.0 * ux[1:n] + px[1:n, 2:] + px[1:n, :-2] - 2.0 * ux[1:n]) / h2
    ly = np.zeros((n, n + 1))
    py = np.zeros((n + 2, n + 1))
    py[1:-1] = uy
    py[0] = -uy[0]
    py[-1] = -uy[-1]
    ly[:, 1:n] = (
        uy[:, 2:] + uy[:, :-2] - 2.0 * uy[:, 1:n] + py[2:, 1:n] + py[:-2, 1:n] - 2.0 * uy[:, 1:n]
    ) / h2
    return VectorField(u.mesh, lx, ly)


def _convect_arrays(ux, uy, wx, wy, h):
    # Divergence form div(u (x) w) with midpoint-averaged advecting fluxes.
    # Leading axes broadcast, which lets the tensor build batch over modes.
    n = ux.shape[-1]
    pad = [(0, 0)] * (wx.ndim - 1) + [(1, 1)]
    wxp = np.pad(wx, pad)
    Ue = 0.5 * (ux[..., 1:n, :] + ux[..., 2:, :])
    Uw = 0.5 * (ux[..., : n - 1, :] + ux[..., 1:n, :])
    we = 0.5 * (wx[..., 1:n, :] + wx[..., 2:, :])
    ww = 0.5 * (wx[..., : n - 1, :] + wx[..., 1:n, :])
    Vn = 0.5 * (uy[..., : n - 1, 1:] + uy[..., 1:n, 1:])
    Vs = 0.5 * (uy[..., : n - 1, :-1] + uy[..., 1:n, :-1])
    wn = 0.5 * (wxp[..., 1:n, 1:-1] + wxp[..., 1:n, 2:])
    ws = 0.5 * (wxp[..., 1:n, :-2] + wxp[..., 1:n, 1:-1])
    cx = (Ue * we - Uw * ww + Vn * wn - Vs * ws) / h

    pad = [(0, 0)] * (wy.ndim - 2) + [(1, 1), (0, 0)]
    wyp = np.pad(wy, pad)
    Vn = 0.5 * (uy[..., :, 1:n] + uy[..., :, 2:])
    Vs = 0.5 * (uy[..., :, : n - 1] + uy[..., :, 1:n])
    wn = 0.5 * (wy[..., :, 1:n] + wy[..., :, 2:])
    ws = 0.5 * (wy[..., :, : n - 1] + wy[..., :, 1:n])
    Ue = 0.5 * (ux[..., 1:, : n - 1] + ux[..., 1:, 1:n])
    Uw = 0.5 * (ux[..., :-1, : n - 1] + ux[..., :-1, 1:n])
    we = 0.5 * (wyp[..., 1:-1, 1:n] + wyp[..., 2:, 1:n])
    ww = 0.5 * (wyp[..., :-2, 1:n] + wyp[..., 1:-1, 1:n])
    cy = (Vn * wn - Vs * ws + Ue * we - Uw * ww) / h
    return cx, cy


def convect(u: VectorField, w: VectorField) -> VectorField:
    """Momentum flux divergence ``div(u (x) w)`` on the interior faces.

    ``u`` is the advecting field. When it is discretely solenoidal with zero
    normal trace the map ``w -> convect(u, w)`` is skew-adjoint under
    :func:`vinner` on no-slip fields, so convection does no work.
    """
    _check_same(u.mesh, w.mesh)
    n = u.mesh.n
    cx, cy = _convect_arrays(u.ux, u.uy, w.ux, w.uy, u.mesh.h)
    ox = np.zeros((n + 1, n))
    oy = np.zeros((n, n + 1))
    ox[1:n] = cx
    oy[:, 1:n] = cy
    return VectorField(u.mesh, ox, oy)


# ---------------------------------------------------------------------------
# gravitational potential


@dataclass(frozen=True)
class PotentialReport:
    mean: float
    interior_residual: float
    passed: bool
    reasons: list[str] = field(default_factory=list)


def interior_laplacian(f: ScalarField) -> np.ndarray:
    """Five-point Laplacian on cells whose four neighbours are all cells."""
    v = f.values
    h2 = f.mesh.h ** 2
    return (v[2:, 1:-1] + v[:-2, 1:-1] + v[1:-1, 2:] + v[1:-1, :-2] - 4.0 * v[1:-1, 1:-1]) / h2


def validate_potential(G: ScalarField) -> PotentialReport:
    """Check that ``G`` has zero mean and is discretely harmonic in the interior."""
    mean = avint(G)
    residual = float(np.max(np.abs(interior_laplacian(G))))
    scale = float(np.max(np.abs(G.values)))
    reasons = []
    if abs(mean) > 1e-10:
        reasons.append(f"mean {mean:.3e} is not zero")
    if residual > 1e-8 * scale:
        reasons.append(f"interior Laplacian residual {residual:.3e} exceeds 1e-8 * max|G|")
    return PotentialReport(mean, residual, not reasons, reasons)


POTENTIALS = ("x", "y", "saddle")


def potential(mesh: Mesh, kind: str) -> ScalarField:
    """Preset gravitational potentials, all mean-zero and harmonic.

    ``"x"``: x - 1/2, ``"y"``: y - 1/2, ``"saddle"``: x^2 - y^2 minus its average.
    """
    if kind == "x":
        return sample(mesh, lambda x, y: x - 0.5)
    if kind == "y":
        return sample(mesh, lambda x, y: y - 0.5)
    if kind == "saddle":
        G = sample(mesh, lambda x, y: x * x - y * y)
        return G - avint(G)
    raise ValueError(f"unknown potential {kind!r}; choose from {POTENTIALS}")
