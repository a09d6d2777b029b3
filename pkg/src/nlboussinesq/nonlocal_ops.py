"""Algebra of the non-local boundary condition.

With ``beta = lambda / (1 + lambda)`` and ``A f = avint(f)`` (an idempotent,
self-adjoint rank-one map), the mass operator under the time derivative of the
lifted temperature is ``L = I - beta A``. Its inverse is ``I + lambda A``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import PreconditionError
from .mesh import ScalarField, avint, inner, validate_potential


@dataclass(frozen=True)
class NonlocalParams:
    lam: float
    kappa: float
    mu: float
    a: float = 0.0

    def __post_init__(self):
        if not self.lam > 0:
            raise PreconditionError(f"lambda must be > 0, got {self.lam}")
        if not self.kappa > 0:
            raise PreconditionError(f"kappa must be > 0, got {self.kappa}")
        if not self.mu > 0:
            raise PreconditionError(f"mu must be > 0, got {self.mu}")
        if not np.isfinite(self.a):
            raise PreconditionError("a must be finite")

    @property
    def beta(self) -> float:
        return self.lam / (1.0 + self.lam)


def _check_lambda(lam: float):
    if not lam > 0:
        raise PreconditionError(f"lambda must be > 0, got {lam}")


def apply_L(V: ScalarField, lam: float) -> ScalarField:
    """``V - lambda/(1+lambda) avint(V)``."""
    _check_lambda(lam)
    return V - (lam / (1.0 + lam)) * avint(V)


def invert_mass(f: ScalarField, lam: float) -> ScalarField:
    """Solve ``apply_L(V) = f`` in closed form: ``V = f + lambda avint(f)``."""
    _check_lambda(lam)
    return f + lam * avint(f)


def theta_to_V(theta: ScalarField, lam: float) -> ScalarField:
    _check_lambda(lam)
    return theta + lam * avint(theta)


def V_to_theta(V: ScalarField, lam: float) -> ScalarField:
    _check_lambda(lam)
    mean_theta = avint(V) / (1.0 + lam)
    return V - lam * mean_theta


def weighted_norm(V: ScalarField, lam: float) -> float:
    """Uniqueness quadratic form ``avint(V^2) - lambda/(1+lambda) avint(V)^2``.

    Equals ``<L V, V>`` on the unit square and is bounded below by
    ``avint(V^2) / (1 + lambda)``.
    """
    _check_lambda(lam)
    m = avint(V)
    return inner(V, V) / V.mesh.area - (lam / (1.0 + lam)) * m * m


def _require_potential(G: ScalarField):
    report = validate_potential(G)
    if not report.passed:
        raise PreconditionError("invalid potential: " + "; ".join(report.reasons))


def shift_reduce(theta: ScalarField, theta_B: ScalarField, G: ScalarField, a: float):
    """Absorb the ``a div(G v)`` term: returns ``(theta + a G, theta_B + a G)``.

    ``theta_B`` contributes only its trace; the shifted boundary data are the
    trace of ``theta_B + a G``.
    """
    _require_potential(G)
    return theta + a * G, theta_B + a * G


def shift_restore(theta: ScalarField, theta_B: ScalarField, G: ScalarField, a: float):
    """Inverse of :func:`shift_reduce`."""
    _require_potential(G)
    return theta - a * G, theta_B - a * G
