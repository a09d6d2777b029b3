import numpy as np
from hypothesis import strategies as st

from nlboussinesq.mesh import ScalarField, VectorField

seeds = st.integers(min_value=0, max_value=2**32 - 1)


def random_scalar(mesh, seed, trace=True):
    rng = np.random.default_rng(seed)
    n = mesh.n
    tr = rng.standard_normal((4, n)) if trace else None
    return ScalarField(mesh, rng.standard_normal((n, n)), tr)


def random_vector(mesh, seed, no_flux=True):
    rng = np.random.default_rng(seed)
    n = mesh.n
    ux = rng.standard_normal((n + 1, n))
    uy = rng.standard_normal((n, n + 1))
    if no_flux:
        ux[0] = ux[-1] = 0.0
        uy[:, 0] = uy[:, -1] = 0.0
    return VectorField(mesh, ux, uy)
