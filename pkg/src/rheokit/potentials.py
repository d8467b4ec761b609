"""Closed-form dissipation potentials and their conjugates.

All potentials are radial: they are functions of the magnitude of the
strain rate (or, for conjugate-side objects, of the stress), with the
vector law recovered by the caller as ``sigma = mu_eff(|eps|) eps``.
Every variant is normalized to vanish at zero rate.

Catalog
-------
Dashpot(D)             0.5 * D * r**2                     (linear viscosity)
PerfectPlastic(a)      a * r                              (dry friction, yield a)
PowerLaw(D, n)         n/(n+1) * D * r**(1 + 1/n)         (creep exponent n)
Huber(a, D)            0.5*D*r**2 below a/D, affine above (serial creep+slip)
QuadPlusBall(q, a)     0.5*q*s**2 on [0, a], +inf outside (conjugate-side)
Sampled(f)             grid data, numeric fallbacks
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Union

import numpy as np

from . import convex_core as cc
from .convex_core import SampledFunction, SubdiffInterval
from .errors import InvalidInputError

__all__ = [
    "Dashpot",
    "PerfectPlastic",
    "PowerLaw",
    "Huber",
    "QuadPlusBall",
    "Sampled",
    "Potential",
    "value",
    "dvalue",
    "conjugate_analytic",
    "overstress_flow",
    "papanastasiou_stress",
    "casson_stress",
    "sample_potential",
]


def _check_positive(**kwargs):
    for name, x in kwargs.items():
        try:
            xf = float(x)
        except (TypeError, ValueError):
            raise InvalidInputError(f"{name} must be a number, got {x!r}") from None
        if not (math.isfinite(xf) and xf > 0):
            raise InvalidInputError(f"{name} must be a positive finite number, got {x!r}")


@dataclass(frozen=True)
class Dashpot:
    """Linear viscous element with modulus ``D`` in Pa*s."""

    D: float

    def __post_init__(self):
        _check_positive(D=self.D)


@dataclass(frozen=True)
class PerfectPlastic:
    """Rate-independent element with activation (yield) stress in Pa."""

    sigma_a: float

    def __post_init__(self):
        _check_positive(sigma_a=self.sigma_a)


@dataclass(frozen=True)
class PowerLaw:
    """Power-law creep element, stress law ``D * r**(1/n)``.

    ``D`` is in Pa*s^(1/n); ``n = 1`` is a linear dashpot, large ``n``
    approaches perfect plasticity with ``D`` in the role of the yield
    stress.
    """

    D: float
    n: float

    def __post_init__(self):
        _check_positive(D=self.D, n=self.n)


@dataclass(frozen=True)
class Huber:
    """Quadratic below ``sigma_a / D``, affine above.

    The serial combination of a yield element ``sigma_a`` and a dashpot
    ``D``: quadratic creep branch, then slip at constant slope
    ``sigma_a`` with offset ``-0.5 * sigma_a**2 / D``.
    """

    sigma_a: float
    D: float

    def __post_init__(self):
        _check_positive(sigma_a=self.sigma_a, D=self.D)


@dataclass(frozen=True)
class QuadPlusBall:
    """``0.5 * Dinv_quad * s**2`` on ``[0, sigma_a]``, +inf outside.

    Conjugate-side object (argument is a stress magnitude).  A zero
    quadratic part gives the plain ball indicator.
    """

    Dinv_quad: float
    sigma_a: float

    def __post_init__(self):
        try:
            q = float(self.Dinv_quad)
        except (TypeError, ValueError):
            raise InvalidInputError(
                f"Dinv_quad must be a number, got {self.Dinv_quad!r}"
            ) from None
        if not (math.isfinite(q) and q >= 0):
            raise InvalidInputError(f"Dinv_quad must be >= 0 and finite, got {q!r}")
        _check_positive(sigma_a=self.sigma_a)


@dataclass(frozen=True)
class Sampled:
    """Grid-sampled potential; shifted so the value at 0 is exactly 0."""

    f: SampledFunction = field()

    def __post_init__(self):
        f = self.f
        if f.values[0] != 0.0:
            shifted = SampledFunction(f.grid, f.values - f.values[0], f.finite_sup)
            object.__setattr__(self, "f", shifted)


Potential = Union[Dashpot, PerfectPlastic, PowerLaw, Huber, QuadPlusBall, Sampled]


def _maybe_scalar(x, scalar_in: bool):
    return float(x) if scalar_in else x


def value(p: Potential, r):
    """Potential density at rate (or stress) magnitude ``r >= 0``, in Pa/s.

    Evaluation past a finite support returns +inf, not an error.
    Accepts scalars or arrays.
    """
    scalar_in = np.isscalar(r) or np.ndim(r) == 0
    r = np.asarray(r, dtype=float)
    if np.any(r < 0):
        raise InvalidInputError("potential argument must be >= 0")
    if isinstance(p, Dashpot):
        out = 0.5 * p.D * r**2
    elif isinstance(p, PerfectPlastic):
        out = p.sigma_a * r
    elif isinstance(p, PowerLaw):
        out = p.n / (p.n + 1.0) * p.D * r ** (1.0 + 1.0 / p.n)
    elif isinstance(p, Huber):
        switch = p.sigma_a / p.D
        out = np.where(
            r <= switch,
            0.5 * p.D * r**2,
            p.sigma_a * r - 0.5 * p.sigma_a**2 / p.D,
        )
    elif isinstance(p, QuadPlusBall):
        out = np.where(r <= p.sigma_a, 0.5 * p.Dinv_quad * r**2, np.inf)
    elif isinstance(p, Sampled):
        f = p.f
        m = f.finite_sup
        out = np.interp(np.minimum(r, f.grid[m - 1]), f.grid[:m], f.values[:m])
        out = np.where(r > f.grid[m - 1] + 1e-12 * max(1.0, f.r_max), np.inf, out)
    else:
        raise InvalidInputError(f"unknown potential {p!r}")
    return _maybe_scalar(out, scalar_in)


def dvalue(p: Potential, r: float) -> SubdiffInterval:
    """Radial stress (sub)derivative at ``r >= 0``, as a magnitude interval.

    Single-valued except for the yield ball of PerfectPlastic at rest,
    reported as ``[0, sigma_a]``, and the normal cone at the support
    boundary of QuadPlusBall, reported with an upper end of +inf.
    """
    r = float(r)
    if r < 0:
        raise InvalidInputError("potential argument must be >= 0")
    if isinstance(p, Dashpot):
        s = p.D * r
        return SubdiffInterval(s, s)
    if isinstance(p, PerfectPlastic):
        if r == 0.0:
            return SubdiffInterval(0.0, p.sigma_a)
        return SubdiffInterval(p.sigma_a, p.sigma_a)
    if isinstance(p, PowerLaw):
        s = p.D * r ** (1.0 / p.n)
        return SubdiffInterval(s, s)
    if isinstance(p, Huber):
        s = min(p.D * r, p.sigma_a)
        return SubdiffInterval(s, s)
    if isinstance(p, QuadPlusBall):
        if r < p.sigma_a:
            s = p.Dinv_quad * r
            return SubdiffInterval(s, s)
        if r == p.sigma_a:
            return SubdiffInterval(p.Dinv_quad * p.sigma_a, float("inf"))
        return SubdiffInterval(float("inf"), float("inf"))
    if isinstance(p, Sampled):
        iv = cc.subdifferential(p.f, r)
        if r == 0.0:
            return SubdiffInterval(0.0, iv.hi)
        return iv
    raise InvalidInputError(f"unknown potential {p!r}")


def conjugate_analytic(p: Potential) -> Potential:
    """Convex conjugate of a catalog potential, again a catalog potential.

    Dashpot(D)        <-> Dashpot(1/D)          (quadratic of modulus 1/D)
    PerfectPlastic(a) <-> QuadPlusBall(0, a)    (indicator of [0, a])
    PowerLaw(D, n)    <-> PowerLaw(D**-n, 1/n)  (exponent 1+n, coeff 1/((1+n) D**n))
    Huber(a, D)       <-> QuadPlusBall(1/D, a)
    Sampled           ->  numeric transform fallback
    """
    if isinstance(p, Dashpot):
        return Dashpot(1.0 / p.D)
    if isinstance(p, PerfectPlastic):
        return QuadPlusBall(0.0, p.sigma_a)
    if isinstance(p, PowerLaw):
        return PowerLaw(p.D ** (-p.n), 1.0 / p.n)
    if isinstance(p, Huber):
        return QuadPlusBall(1.0 / p.D, p.sigma_a)
    if isinstance(p, QuadPlusBall):
        if p.Dinv_quad == 0.0:
            return PerfectPlastic(p.sigma_a)
        return Huber(p.sigma_a, 1.0 / p.Dinv_quad)
    if isinstance(p, Sampled):
        return Sampled(cc.legendre_transform(p.f))
    raise InvalidInputError(f"unknown potential {p!r}")


def overstress_flow(D: float, n_exp: float, sigma_a: float, sigma: float) -> float:
    """Strain rate of the overstress flow rule, in 1/s.

    Zero at or below the yield stress, ``(sigma - sigma_a)**n / D``
    above it: the conjugate derivative of the rate-dependent-plasticity
    potential written as a flow function of the overstress.
    """
    _check_positive(D=D, n_exp=n_exp)
    if sigma_a < 0 or sigma < 0:
        raise InvalidInputError("sigma_a and sigma must be >= 0")
    if sigma <= sigma_a:
        return 0.0
    return (sigma - sigma_a) ** n_exp / D


def papanastasiou_stress(sigma_a: float, c: float, n_exp: float, eps: float) -> float:
    """Regularized yield-stress law ``sigma_a * (1 + c * eps**n)**(1/n)``.

    Single-valued by design; at ``eps = 0`` the continuous limit
    ``sigma_a`` is returned.
    """
    _check_positive(sigma_a=sigma_a, n_exp=n_exp)
    if c < 0 or eps < 0:
        raise InvalidInputError("c and eps must be >= 0")
    if eps == 0.0:
        return float(sigma_a)
    return sigma_a * (1.0 + c * eps**n_exp) ** (1.0 / n_exp)


def casson_stress(sigma_a: float, c: float, eps: float) -> float:
    """Casson law ``sigma_a * (1 + c * eps)**(1/2)``; ``sigma_a`` at rest."""
    _check_positive(sigma_a=sigma_a)
    if c < 0 or eps < 0:
        raise InvalidInputError("c and eps must be >= 0")
    if eps == 0.0:
        return float(sigma_a)
    return sigma_a * math.sqrt(1.0 + c * eps)


def sample_potential(p: Potential, grid=None) -> SampledFunction:
    """Sample a catalog potential onto a grid (default uniform 2048 pts)."""
    if grid is None:
        grid = cc.uniform_grid()
    grid = np.asarray(grid, dtype=float)
    return SampledFunction.from_samples(grid, value(p, grid))
