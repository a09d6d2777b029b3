import numpy as np
import pytest
from hypothesis import given, strategies as st

from helpers import random_scalar, random_vector, seeds
from oracles import dense_dirichlet_laplacian
from nlboussinesq.errors import MeshMismatchError
from nlboussinesq.mesh import (
    Mesh,
    ScalarField,
    VectorField,
    advect,
    avint,
    convect,
    div,
    grad,
    harmonic_extension,
    inner,
    is_solenoidal,
    laplace_dirichlet,
    potential,
    sample,
    validate_potential,
    vinner,
)


def test_mesh_rejects_small_and_rectangular():
    with pytest.raises(ValueError):
        Mesh(4)
    with pytest.raises(ValueError):
        Mesh(16, 32)
    m = Mesh(32)
    assert m.h * m.nx == 1.0
    assert abs(m.weights.sum() - 1.0) < 1e-14


def test_fields_are_immutable_and_finite(mesh16):
    f = ScalarField.constant(mesh16, 1.0)
    with pytest.raises(ValueError):
        f.values[0, 0] = 2.0
    with pytest.raises(Exception):
        ScalarField(mesh16, np.full((16, 16), np.nan))
    with pytest.raises(ValueError):
        ScalarField(mesh16, np.zeros((15, 16)))


def test_avint_constants_and_antisymmetry(mesh32):
    assert avint(ScalarField.constant(mesh32, 3.5)) == pytest.approx(3.5, abs=1e-14)
    assert abs(avint(potential(mesh32, "x"))) < 1e-14


def test_avint_midpoint_rule_second_order():
    err = [abs(avint(sample(Mesh(n), lambda x, y: x * x)) - 1.0 / 3.0) for n in (64, 128)]
    assert err[0] < 2e-4
    assert err[0] / err[1] == pytest.approx(4.0, rel=1e-6)


@given(seeds, st.floats(-5, 5), st.floats(-5, 5))
def test_avint_linear(seed, a, b):
    m = Mesh(16)
    f, g = random_scalar(m, seed), random_scalar(m, seed + 1)
    assert abs(avint(a * f + b * g) - (a * avint(f) + b * avint(g))) < 1e-13


def test_grad_of_constant_is_zero(mesh16):
    g = grad(ScalarField.constant(mesh16, 2.7))
    assert g.max_abs() == 0.0


def test_div_grad_second_order():
    errs = []
    for n in (16, 32, 64):
        m = Mesh(n)
        f = sample(m, lambda x, y: np.sin(np.pi * x) * np.sin(np.pi * y))
        lap = div(grad(f)).values
        errs.append(np.max(np.abs(lap + 2 * np.pi**2 * f.values)))
    rates = np.log2(np.array(errs[:-1]) / np.array(errs[1:]))
    assert np.all(rates > 1.8), rates


@given(seeds)
def test_grad_div_adjoint(seed):
    m = Mesh(16)
    f = random_scalar(m, seed, trace=False)  # zero trace: wall faces do not couple
    u = random_vector(m, seed + 7)
    assert abs(vinner(grad(f), u) + inner(f, div(u))) < 1e-12 * (1 + abs(vinner(grad(f), u)))


@given(seeds)
def test_laplacian_symmetric(seed):
    m = Mesh(16)
    f, g = random_scalar(m, seed), random_scalar(m, seed + 3)
    z = np.zeros((4, 16))
    lhs = inner(laplace_dirichlet(f, z), g)
    rhs = inner(f, laplace_dirichlet(g, z))
    assert abs(lhs - rhs) < 1e-12 * max(1.0, abs(lhs))


def test_laplacian_matches_dense_oracle(mesh16):
    f = random_scalar(mesh16, 11)
    ours = laplace_dirichlet(f, np.zeros((4, 16))).values.ravel()
    ref = dense_dirichlet_laplacian(16) @ f.values.ravel()
    assert np.max(np.abs(ours - ref)) < 1e-9
    assert np.all(np.linalg.eigvalsh(dense_dirichlet_laplacian(16)) < 0)


def test_laplacian_mesh_mismatch(mesh16, mesh32):
    with pytest.raises(MeshMismatchError):
        laplace_dirichlet(ScalarField.zeros(mesh16), ScalarField.zeros(mesh32))
    with pytest.raises(MeshMismatchError):
        inner(ScalarField.zeros(mesh16), ScalarField.zeros(mesh32))


def test_harmonic_extension_constants_and_linear(mesh32):
    E = harmonic_extension(ScalarField.constant(mesh32, 1.7))
    assert np.max(np.abs(E.values - 1.7)) < 1e-12
    lin = sample(mesh32, lambda x, y: x - 0.5)
    E = harmonic_extension(lin)
    assert np.max(np.abs(E.values - lin.values)) < 1e-11


def test_harmonic_extension_saddle_second_order():
    errs = []
    for n in (16, 32, 64):
        s = sample(Mesh(n), lambda x, y: x * x - y * y)
        errs.append(np.max(np.abs(harmonic_extension(s).values - s.values)))
    rates = np.log2(np.array(errs[:-1]) / np.array(errs[1:]))
    assert errs[-1] < 1e-4
    assert np.all(rates > 1.9), rates


def test_harmonic_extension_residual(mesh32):
    g = random_scalar(mesh32, 5)
    E = harmonic_extension(g)
    assert np.max(np.abs(laplace_dirichlet(E, g.trace).values)) <= 1e-10 * np.max(np.abs(g.trace))


@pytest.mark.parametrize("kind", ["x", "y", "saddle"])
def test_potential_presets_pass(mesh32, kind):
    assert validate_potential(potential(mesh32, kind)).passed


def test_potential_failures(mesh32):
    rep = validate_potential(ScalarField.constant(mesh32, 1.0))
    assert not rep.passed and rep.mean == pytest.approx(1.0)
    rep = validate_potential(sample(mesh32, lambda x, y: x * x))
    assert not rep.passed and rep.interior_residual == pytest.approx(2.0, rel=1e-8)


@given(seeds)
def test_advection_skew_for_solenoidal_flow(seed):
    from nlboussinesq.stokes import build_basis, reconstruct

    m = Mesh(32)
    b = build_basis(m, 16)
    rng = np.random.default_rng(seed)
    v = reconstruct(rng.standard_normal(16), b)
    f = random_scalar(m, seed, trace=False)
    assert is_solenoidal(v)
    assert abs(inner(advect(v, f), f)) < 1e-11 * max(1.0, inner(f, f) * v.max_abs())
    w = random_vector(m, seed + 1)
    w = VectorField(m, w.ux, w.uy)
    assert abs(vinner(convect(v, w), w)) < 1e-10 * max(1.0, vinner(w, w) * v.max_abs() / m.h)
