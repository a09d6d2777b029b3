import json

import numpy as np
import pytest
from hypothesis import given

from helpers import random_vector, seeds
from oracles import leray_interior, stokes_eigenvalues_nullspace
from nlboussinesq.errors import CapacityError, MeshMismatchError
from nlboussinesq.mesh import Mesh, VectorField, is_solenoidal, vector_laplacian, vinner, vnorm
from nlboussinesq.stokes import (
    GalerkinState,
    build_basis,
    clear_memory_cache,
    load_basis,
    project,
    reconstruct,
    solenoidal_dimension,
)


def test_capacity_error():
    m = Mesh(8)
    assert solenoidal_dimension(m) == 49
    with pytest.raises(CapacityError) as info:
        build_basis(m, 50)
    assert info.value.available == 49


def test_basis_invariants(basis32):
    b = basis32
    assert np.max(np.abs(b.gram() - np.eye(b.N))) < 1e-10
    assert np.all(b.eigenvalues > 0) and np.all(np.diff(b.eigenvalues) >= 0)
    for k in range(b.N):
        w = b.mode(k)
        assert is_solenoidal(w)
        assert np.all(w.normal_trace() == 0.0)


def test_single_mode(mesh16):
    b = build_basis(mesh16, 1)
    w = b.mode(0)
    assert vnorm(w) == pytest.approx(1.0, abs=1e-12)
    assert is_solenoidal(w)


def test_rayleigh_quotients_match_eigenvalues(basis32):
    b = basis32
    for k in range(8):
        w = b.mode(k)
        q = -vinner(vector_laplacian(w), w)
        assert abs(q - b.eigenvalues[k]) < 1e-8 * b.eigenvalues[k]


def test_galerkin_diffusion_diagonal(basis32):
    b = basis32
    G = np.array([[-vinner(vector_laplacian(b.mode(i)), b.mode(j)) for j in range(b.N)] for i in range(b.N)])
    assert np.max(np.abs(G - np.diag(b.eigenvalues))) < 1e-8 * b.eigenvalues[-1]


def test_eigenvalues_match_nullspace_oracle(basis16):
    ref = stokes_eigenvalues_nullspace(16, 12)
    assert np.max(np.abs(basis16.eigenvalues[:12] - ref) / ref) < 1e-10


def test_first_eigenvalue_richardson():
    # second-order convergence: extrapolations from (16, 32) and (32, 64) agree
    lam = {n: build_basis(Mesh(n), 1).eigenvalues[0] for n in (16, 32, 64)}
    r1 = (4 * lam[32] - lam[16]) / 3
    r2 = (4 * lam[64] - lam[32]) / 3
    assert abs(r1 - r2) / r2 < 1e-3
    ratio = (lam[32] - lam[16]) / (lam[64] - lam[32])
    assert 3.5 < ratio < 4.5


def test_project_reconstruct(basis32):
    b = basis32
    e3 = project(b.mode(2), b).c
    assert np.max(np.abs(e3 - np.eye(b.N)[2])) < 1e-12


@given(seeds)
def test_round_trip_and_idempotence(seed):
    b = build_basis(Mesh(16), 16)
    c = np.random.default_rng(seed).standard_normal(16)
    assert np.max(np.abs(project(reconstruct(c, b), b).c - c)) < 1e-12
    u = random_vector(b.mesh, seed)
    p1 = reconstruct(project(u, b), b)
    p2 = reconstruct(project(p1, b), b)
    assert max(np.max(np.abs(p1.ux - p2.ux)), np.max(np.abs(p1.uy - p2.uy))) < 1e-12
    # Parseval
    assert abs(vnorm(reconstruct(c, b)) ** 2 - c @ c) < 1e-10 * (c @ c)


def test_projector_self_adjoint_idempotent(basis16):
    b = basis16
    h2 = b.mesh.h ** 2
    P = h2 * b.modes.T @ b.modes  # matrix of reconstruct o project on interior faces
    assert np.max(np.abs(P @ P - P)) < 1e-12
    assert np.max(np.abs(P - P.T)) < 1e-14


def test_projection_ignores_gradient_part(basis16):
    b = basis16
    u = random_vector(b.mesh, 3)
    sol = VectorField.from_interior(b.mesh, leray_interior(u.interior(), 16))
    assert is_solenoidal(sol, 1e-9)
    assert np.max(np.abs(project(u, b).c - project(sol, b).c)) < 1e-11


def test_mesh_mismatch(basis16, mesh32):
    with pytest.raises(MeshMismatchError):
        project(VectorField.zeros(mesh32), basis16)


def test_disk_cache_round_trip(tmp_path):
    m = Mesh(8)
    clear_memory_cache()
    b = build_basis(m, 4, cache_dir=tmp_path)
    heads = list(tmp_path.glob("stokes_n8_*.json"))
    assert len(heads) == 1
    header = json.loads(heads[0].read_text())
    assert header["nx"] == 8 and len(header["eigenvalues"]) == header["N"]
    loaded = load_basis(heads[0])
    assert np.array_equal(loaded.modes[:4], b.modes)
    clear_memory_cache()
    again = build_basis(m, 4, cache_dir=tmp_path)
    assert np.array_equal(again.modes, b.modes)


def test_galerkin_state_energy(basis16):
    s = GalerkinState(np.array([3.0, 4.0] + [0.0] * 14))
    assert s.kinetic_energy() == pytest.approx(12.5)
    assert vnorm(reconstruct(s, basis16)) ** 2 / 2 == pytest.approx(12.5, rel=1e-10)
