"""Temperature-dependent material coefficients.

Each layer carries four coefficient functions of temperature: density,
specific heat capacity, thermal conductivity and a volumetric source.  They
are configured as polynomials (coefficient lists, constant term first),
which covers constant and piecewise-linear equations and keeps evaluation
exact when fed rational temperatures.  Arbitrary callables are a library
extension point, not part of the configuration format.

Conductivity at a cell midpoint is always the conductivity OF the mean
temperature, lambda((u_i + u_j)/2), never the mean of two conductivities.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence


class MaterialDomainError(ValueError):
    """Temperature outside the declared validity range, or a coefficient
    evaluated to a non-physical (non-positive) value."""


class Polynomial:
    """Polynomial in the temperature, evaluated by Horner's rule.

    Coefficients are stored constant-term first.  Evaluation preserves the
    arithmetic of its inputs: Fraction coefficients at Fraction temperatures
    stay exact.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Sequence):
        coeffs = tuple(coeffs)
        while len(coeffs) > 1 and coeffs[-1] == 0:
            coeffs = coeffs[:-1]
        if not coeffs:
            coeffs = (0,)
        self.coeffs = coeffs

    def __call__(self, u):
        acc = self.coeffs[-1]
        for c in reversed(self.coeffs[:-1]):
            acc = acc * u + c
        return acc

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def is_constant(self) -> bool:
        return self.degree == 0

    def __repr__(self) -> str:
        return f"Polynomial({list(self.coeffs)!r})"

    def __eq__(self, other) -> bool:
        return isinstance(other, Polynomial) and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)


def _as_polynomial(p) -> Polynomial:
    return p if isinstance(p, Polynomial) else Polynomial(p)


@dataclass(frozen=True)
class MaterialModel:
    """Coefficient functions of one layer plus their validity range.

    rho, cv and conductivity must stay positive over the validity range;
    evaluating any coefficient outside the range raises MaterialDomainError.
    valid_range=None means unbounded.
    """

    rho: Polynomial
    cv: Polynomial
    conductivity: Polynomial
    source: Polynomial = Polynomial((0,))
    valid_range: tuple | None = None

    def __post_init__(self):
        object.__setattr__(self, "rho", _as_polynomial(self.rho))
        object.__setattr__(self, "cv", _as_polynomial(self.cv))
        object.__setattr__(self, "conductivity", _as_polynomial(self.conductivity))
        object.__setattr__(self, "source", _as_polynomial(self.source))
        if self.valid_range is not None:
            lo, hi = self.valid_range
            if not lo < hi:
                raise ValueError(f"empty validity range ({lo}, {hi})")

    def check_temperature(self, u):
        if self.valid_range is None:
            return
        lo, hi = self.valid_range
        if not (lo <= u <= hi):
            raise MaterialDomainError(
                f"temperature {u} outside validity range [{lo}, {hi}]"
            )

    def rho_c(self, u):
        """rho(u) * cv(u), range- and positivity-checked."""
        self.check_temperature(u)
        rho = self.rho(u)
        cv = self.cv(u)
        if not rho > 0:
            raise MaterialDomainError(f"rho({u}) = {rho} is not positive")
        if not cv > 0:
            raise MaterialDomainError(f"cv({u}) = {cv} is not positive")
        return rho * cv

    def conductivity_at(self, u):
        """lambda(u), range- and positivity-checked."""
        self.check_temperature(u)
        lam = self.conductivity(u)
        if not lam > 0:
            raise MaterialDomainError(f"conductivity({u}) = {lam} is not positive")
        return lam

    def source_at(self, u):
        self.check_temperature(u)
        return self.source(u)

    @property
    def constant_coefficients(self) -> bool:
        """True when the equation this material produces is linear: rho, cv
        and conductivity constant and the source independent of temperature."""
        return (
            self.rho.is_constant
            and self.cv.is_constant
            and self.conductivity.is_constant
            and self.source.is_constant
        )


@dataclass(frozen=True)
class CoefficientSample:
    """Stencil-time coefficient values at one node.

    lambda_minus / lambda_plus are the conductivities at the two adjacent
    cell-mean temperatures; rho_c and phi are evaluated at the node itself.
    Built from a MaterialModel via sample(); degenerate values (e.g. zero
    conductivity) may be constructed directly for testing.
    """

    rho_c: object
    lambda_minus: object
    lambda_plus: object
    phi: object


def sample(model: MaterialModel, u_i, u_im1, u_ip1) -> CoefficientSample:
    """Evaluate one node's stencil coefficients at the given temperatures.

    The half-point conductivities are evaluated at the arithmetic mean of
    the endpoint temperatures.  All three temperatures must lie inside the
    model's validity range.
    """
    for u in (u_i, u_im1, u_ip1):
        model.check_temperature(u)
    return CoefficientSample(
        rho_c=model.rho_c(u_i),
        lambda_minus=model.conductivity_at((u_i + u_im1) / 2),
        lambda_plus=model.conductivity_at((u_i + u_ip1) / 2),
        phi=model.source(u_i),
    )
