"""Serial/parallel composition of potentials and effective viscosities.

A rheological network is a tree: leaves hold potentials, Parallel nodes
add potentials (stresses add at common rate), Serial nodes combine them
by infimal convolution (rates add at common stress).  Evaluating the
tree never forms the composed potential explicitly; instead the two
monotone maps

* ``strain_rate_of_stress`` (the conjugate derivative, rates summed
  across a Serial node), and
* ``stress_of_strain_rate`` (the primal derivative, stresses summed
  across a Parallel node)

invert each other by bracketed bisection where no closed form exists.
Set-valued points are carried as :class:`SubdiffInterval`; saturation
(stress beyond a composite's attainable range) is reported with a +inf
marker, not an error.

The module also provides the closed-form and empirical effective
viscosity family (min-formulas, harmonic-mean variants, diffusion +
dislocation creep in series), the two equivalent three-element models
and the parameter map between them, and closed-form stress solutions of
the serial diffusion/dislocation equation for exponents 1, 2, 3.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence, Union

import numpy as np

from . import convex_core as cc
from .convex_core import SampledFunction, SubdiffInterval
from .errors import InvalidInputError, NonConvergenceError, UnsupportedModeError
from .potentials import (
    Dashpot,
    Huber,
    PerfectPlastic,
    Potential,
    PowerLaw,
    QuadPlusBall,
    Sampled,
)

__all__ = [
    "Leaf",
    "Parallel",
    "Serial",
    "RheoExpr",
    "ThreeElementParams",
    "strain_rate_of_stress",
    "stress_of_strain_rate",
    "stress_curve",
    "mu_eff_curve",
    "mu_eff_rigorous",
    "three_element_stress",
    "map_serial_parallel_params",
    "Formula",
    "mu_eff_formula",
    "serial_dif_dsl_stress",
    "harmonic_mean_linear",
]

_BISECT_RTOL = 1e-14
_TINY = 1e-300
_MAX_BISECT = 200
_MAX_DOUBLINGS = 1024
# Doubling horizon for parallel inversion; targets still unbracketed at
# this scale are treated as saturated, not as solver failures.
_PARALLEL_DOUBLINGS = 64


# ---------------------------------------------------------------------------
# Expression trees
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Leaf:
    p: Potential

    def __post_init__(self):
        if not isinstance(
            self.p, (Dashpot, PerfectPlastic, PowerLaw, Huber, QuadPlusBall, Sampled)
        ):
            raise InvalidInputError(f"Leaf needs a Potential, got {self.p!r}")


@dataclass(frozen=True)
class Parallel:
    """Sum of potentials: children see a common strain rate."""

    children: tuple

    def __init__(self, children):
        object.__setattr__(self, "children", tuple(children))
        if not self.children:
            raise InvalidInputError("Parallel needs at least one child")
        for c in self.children:
            _check_expr(c)


@dataclass(frozen=True)
class Serial:
    """Infimal convolution of potentials: children see a common stress.

    At least one child must have a strictly increasing, unbounded
    conjugate derivative (a dashpot or power-law somewhere in it), which
    makes the stress solve well posed for every strain rate.
    """

    children: tuple

    def __init__(self, children):
        object.__setattr__(self, "children", tuple(children))
        if not self.children:
            raise InvalidInputError("Serial needs at least one child")
        for c in self.children:
            _check_expr(c)
        if not any(_strict_unbounded(c) for c in self.children):
            raise InvalidInputError(
                "Serial node needs at least one child with a strictly "
                "increasing, unbounded conjugate derivative (e.g. a dashpot "
                "or power-law element)"
            )


RheoExpr = Union[Leaf, Parallel, Serial]


def _check_expr(e):
    if not isinstance(e, (Leaf, Parallel, Serial)):
        raise InvalidInputError(f"expected a RheoExpr node, got {e!r}")


@dataclass(frozen=True)
class _Feat:
    """Features of a node's primal derivative graph on the half-line.

    sv: single-valued (no vertical segments inside the domain)
    nf: no flats (strictly increasing where defined)
    dom: domain is all of [0, inf)
    ub: range is unbounded
    Conjugation swaps sv<->nf and dom<->ub; Parallel sums primal graphs,
    Serial sums conjugate graphs.
    """

    sv: bool
    nf: bool
    dom: bool
    ub: bool


def _conj_feat(f: _Feat) -> _Feat:
    return _Feat(f.nf, f.sv, f.ub, f.dom)


def _sum_feats(fs) -> _Feat:
    return _Feat(
        all(f.sv for f in fs),
        any(f.nf for f in fs),
        all(f.dom for f in fs),
        any(f.ub for f in fs),
    )


def _leaf_feat(p: Potential) -> _Feat:
    if isinstance(p, (Dashpot, PowerLaw)):
        return _Feat(True, True, True, True)
    if isinstance(p, PerfectPlastic):
        return _Feat(False, False, True, False)
    if isinstance(p, Huber):
        return _Feat(True, False, True, False)
    if isinstance(p, QuadPlusBall):
        return _Feat(False, p.Dinv_quad > 0.0, False, True)
    # Sampled data: accept strictly convex, everywhere-finite samples as
    # strict and unbounded (growth beyond the window is not inferable).
    f = p.f
    allfin = f.finite_sup == f.grid.size
    slopes = np.diff(f.values[: f.finite_sup]) / np.diff(f.grid[: f.finite_sup])
    strict = slopes.size >= 1 and bool(np.all(np.diff(slopes) > 0.0))
    return _Feat(allfin, strict, allfin, strict and allfin)


def _feat(e) -> _Feat:
    if isinstance(e, Leaf):
        return _leaf_feat(e.p)
    if isinstance(e, Parallel):
        return _sum_feats([_feat(c) for c in e.children])
    return _conj_feat(_sum_feats([_conj_feat(_feat(c)) for c in e.children]))


def _strict_unbounded(e) -> bool:
    f = _feat(e)
    return f.sv and f.nf and f.dom and f.ub


# ---------------------------------------------------------------------------
# Vectorized interval evaluation
# ---------------------------------------------------------------------------


@lru_cache(maxsize=64)
def _sampled_conjugate(s: Sampled) -> SampledFunction:
    return cc.legendre_transform(s.f)


def _pl_deriv_lo_hi(f: SampledFunction, x: np.ndarray):
    """Piecewise-linear derivative bounds of sampled data, elementwise."""
    m = f.finite_sup
    gr = f.grid[:m]
    if m < 2:
        lo = np.where(x > 0, np.inf, 0.0)
        return lo, lo.copy()
    sl = np.diff(f.values[:m]) / np.diff(gr)
    idx_l = np.clip(np.searchsorted(gr, x, side="left") - 1, 0, m - 2)
    idx_r = np.clip(np.searchsorted(gr, x, side="right") - 1, 0, m - 2)
    lo = sl[idx_l]
    hi = sl[idx_r]
    cut = m < f.grid.size
    last = gr[-1]
    if cut:
        hi = np.where(x >= last, np.inf, hi)
        lo = np.where(x > last, np.inf, lo)
    else:
        hi = np.where(x > last, np.inf, hi)
        lo = np.where(x > last, np.inf, lo)
    return lo, hi


def _leaf_flow(p: Potential, sig: np.ndarray):
    """Strain rate interval of one element at stress magnitudes ``sig``."""
    if isinstance(p, Dashpot):
        x = sig / p.D
        return x, x.copy()
    if isinstance(p, PowerLaw):
        x = (sig / p.D) ** p.n
        return x, x.copy()
    if isinstance(p, PerfectPlastic):
        a = p.sigma_a
        lo = np.where(sig <= a, 0.0, np.inf)
        hi = np.where(sig < a, 0.0, np.inf)
        return lo, hi
    if isinstance(p, Huber):
        a = p.sigma_a
        lo = np.where(sig <= a, sig / p.D, np.inf)
        hi = np.where(sig < a, sig / p.D, np.inf)
        return lo, hi
    if isinstance(p, QuadPlusBall):
        if p.Dinv_quad == 0.0:
            x = np.where(sig > 0, p.sigma_a, 0.0)
            return x, x.copy()
        x = np.minimum(sig / p.Dinv_quad, p.sigma_a)
        return x, x.copy()
    lo, hi = _pl_deriv_lo_hi(_sampled_conjugate(p), sig)
    lo = np.where(sig == 0.0, 0.0, lo)
    hi = np.where(sig == 0.0, 0.0, hi)
    return lo, hi


def _leaf_stress(p: Potential, eps: np.ndarray):
    """Stress interval of one element at strain rates ``eps``."""
    if isinstance(p, Dashpot):
        x = p.D * eps
        return x, x.copy()
    if isinstance(p, PowerLaw):
        x = p.D * eps ** (1.0 / p.n)
        return x, x.copy()
    if isinstance(p, PerfectPlastic):
        a = p.sigma_a
        lo = np.where(eps > 0, a, 0.0)
        hi = np.full_like(eps, a)
        return lo, hi
    if isinstance(p, Huber):
        x = np.minimum(p.D * eps, p.sigma_a)
        return x, x.copy()
    if isinstance(p, QuadPlusBall):
        a = p.sigma_a
        lo = np.where(eps <= a, p.Dinv_quad * eps, np.inf)
        hi = np.where(eps < a, p.Dinv_quad * eps, np.inf)
        return lo, hi
    lo, hi = _pl_deriv_lo_hi(p.f, eps)
    lo = np.where(eps == 0.0, 0.0, lo)
    return lo, hi


def _plastic_dashpot_pattern(node: Parallel):
    """Yield offset and total viscosity of an all-leaf plastic/dashpot node."""
    offset = 0.0
    d_sum = 0.0
    for c in node.children:
        if isinstance(c, Leaf) and isinstance(c.p, PerfectPlastic):
            offset += c.p.sigma_a
        elif isinstance(c, Leaf) and isinstance(c.p, Dashpot):
            d_sum += c.p.D
        else:
            return None
    return offset, d_sum


def _stress_sup(e) -> float:
    """Supremum of attainable stress of a subtree (inf when unbounded)."""
    if isinstance(e, Leaf):
        p = e.p
        if isinstance(p, PerfectPlastic):
            return p.sigma_a
        if isinstance(p, Huber):
            return p.sigma_a
        if isinstance(p, Sampled):
            f = p.f
            if f.finite_sup < f.grid.size:
                return math.inf
            m = f.finite_sup
            if m < 2:
                return 0.0
            return float((f.values[m - 1] - f.values[m - 2]) / (f.grid[m - 1] - f.grid[m - 2]))
        return math.inf
    if isinstance(e, Parallel):
        return sum(_stress_sup(c) for c in e.children)
    return min(_stress_sup(c) for c in e.children)


def _flow_lo_hi(e, sig: np.ndarray):
    """Strain rate interval of a subtree at stress magnitudes ``sig``."""
    if isinstance(e, Leaf):
        return _leaf_flow(e.p, sig)
    if isinstance(e, Serial):
        lo = np.zeros_like(sig)
        hi = np.zeros_like(sig)
        for c in e.children:
            clo, chi = _flow_lo_hi(c, sig)
            lo = lo + clo
            hi = hi + chi
        return lo, hi
    pat = _plastic_dashpot_pattern(e)
    if pat is not None:
        offset, d_sum = pat
        if d_sum > 0.0:
            x = np.maximum(sig - offset, 0.0) / d_sum
            return x, x.copy()
        lo = np.where(sig <= offset, 0.0, np.inf)
        hi = np.where(sig < offset, 0.0, np.inf)
        return lo, hi
    return _parallel_flow_solve(e, sig)


def _sig_lo_hi(e, eps: np.ndarray):
    """Stress interval of a subtree at strain rates ``eps``."""
    if isinstance(e, Leaf):
        return _leaf_stress(e.p, eps)
    if isinstance(e, Parallel):
        lo = np.zeros_like(eps)
        hi = np.zeros_like(eps)
        for c in e.children:
            clo, chi = _sig_lo_hi(c, eps)
            lo = lo + clo
            hi = hi + chi
        return lo, hi
    x = _serial_stress_solve(e, eps)
    return x, x.copy()


def _flow_hi(e, sig):
    return _flow_lo_hi(e, sig)[1]


def _sig_hi(e, eps):
    return _sig_lo_hi(e, eps)[1]


def _serial_stress_solve(node: Serial, eps: np.ndarray) -> np.ndarray:
    """Invert the summed conjugate derivative of a Serial node.

    Bracketed bisection on the monotone strain-rate response, bracket
    grown by doubling from [0, 1]; relative tolerance 1e-14.
    """
    out = np.zeros_like(eps)
    act = eps > 0
    if not act.any():
        return out
    e = eps[act]
    b = np.ones_like(e)
    for _ in range(_MAX_DOUBLINGS):
        need = _flow_hi(node, b) < e
        if not need.any():
            break
        b = np.where(need, 2.0 * b, b)
    else:
        raise NonConvergenceError(
            "serial stress solve: bracket expansion failed after "
            f"{_MAX_DOUBLINGS} doublings (ill-posed composite?)"
        )
    a = np.zeros_like(e)
    for _ in range(_MAX_BISECT):
        if np.all(b - a <= _BISECT_RTOL * np.maximum(b, _TINY)):
            break
        mid = 0.5 * (a + b)
        pred = _flow_hi(node, mid) < e
        a = np.where(pred, mid, a)
        b = np.where(pred, b, mid)
    out[act] = 0.5 * (a + b)
    return out


def _parallel_flow_solve(node: Parallel, sig: np.ndarray):
    """Invert the summed stress of a Parallel node (generic path).

    Stresses beyond the node's attainable supremum saturate to a +inf
    marker instead of failing.
    """
    lo = np.zeros_like(sig)
    hi = np.zeros_like(sig)
    act = sig > 0
    if not act.any():
        return lo, hi
    s = sig[act]
    sup = _stress_sup(node)
    sat = s > sup * (1.0 + 1e-12) if math.isfinite(sup) else np.zeros_like(s, dtype=bool)

    res = np.full_like(s, np.inf)
    solve = ~sat
    if solve.any():
        t = s[solve]
        b = np.ones_like(t)
        for _ in range(_PARALLEL_DOUBLINGS):
            need = _sig_hi(node, b) < t
            if not need.any():
                break
            b = np.where(need, 2.0 * b, b)
        unbracketed = _sig_hi(node, b) < t
        a = np.zeros_like(t)
        for _ in range(_MAX_BISECT):
            if np.all(b - a <= _BISECT_RTOL * np.maximum(b, _TINY)):
                break
            mid = 0.5 * (a + b)
            pred = _sig_hi(node, mid) < t
            a = np.where(pred, mid, a)
            b = np.where(pred, b, mid)
        pt = 0.5 * (a + b)
        pt = np.where(unbracketed, np.inf, pt)
        res[solve] = pt
    lo[act] = res
    hi[act] = res
    return lo, hi


# ---------------------------------------------------------------------------
# Public evaluation
# ---------------------------------------------------------------------------


def _check_scalar_nonneg(x, name):
    x = float(x)
    if not math.isfinite(x) or x < 0:
        raise InvalidInputError(f"{name} must be finite and >= 0, got {x}")
    return x


def strain_rate_of_stress(e: RheoExpr, sigma: float) -> SubdiffInterval:
    """Strain-rate response at stress magnitude ``sigma``, in 1/s.

    Sum of conjugate derivatives across a Serial node; monotone root
    solve across a Parallel node.  Stress beyond a yield cap returns a
    saturated interval with +inf ends.
    """
    _check_expr(e)
    sigma = _check_scalar_nonneg(sigma, "sigma")
    lo, hi = _flow_lo_hi(e, np.array([sigma]))
    return SubdiffInterval(float(lo[0]), float(hi[0]))


def stress_of_strain_rate(e: RheoExpr, eps: float) -> SubdiffInterval:
    """Stress response at strain-rate magnitude ``eps``, in Pa."""
    _check_expr(e)
    eps = _check_scalar_nonneg(eps, "eps")
    lo, hi = _sig_lo_hi(e, np.array([eps]))
    return SubdiffInterval(float(lo[0]), float(hi[0]))


def stress_curve(e: RheoExpr, eps) -> np.ndarray:
    """Stress (interval midpoints) over an array of strain rates."""
    _check_expr(e)
    eps = np.asarray(eps, dtype=float)
    if np.any(eps < 0) or not np.all(np.isfinite(eps)):
        raise InvalidInputError("strain rates must be finite and >= 0")
    lo, hi = _sig_lo_hi(e, eps)
    return 0.5 * (lo + hi)


def mu_eff_curve(e: RheoExpr, eps) -> np.ndarray:
    """Effective viscosity ``stress / eps`` over strictly positive rates."""
    eps = np.asarray(eps, dtype=float)
    if np.any(eps <= 0):
        raise InvalidInputError("mu_eff_curve needs strictly positive rates")
    return stress_curve(e, eps) / eps


def mu_eff_rigorous(e: RheoExpr, eps: float, limit: bool = False) -> float:
    """Effective viscosity from the rigorous stress solve, in Pa*s.

    ``stress_of_strain_rate(e, eps).midpoint / eps`` for ``eps > 0``.
    At ``eps = 0`` the value is defined only by continuity: pass
    ``limit=True`` to get the limit, which is +inf when the model
    carries a yield offset at rest and finite otherwise.
    """
    _check_expr(e)
    eps = _check_scalar_nonneg(eps, "eps")
    if eps > 0:
        return stress_of_strain_rate(e, eps).midpoint / eps
    if not limit:
        raise InvalidInputError("mu_eff at eps = 0 requires limit=True")
    rest = stress_of_strain_rate(e, 0.0)
    if rest.hi > 0:
        return math.inf
    probe = 1e-8
    return stress_of_strain_rate(e, probe).midpoint / probe


# ---------------------------------------------------------------------------
# Three-element models
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ThreeElementParams:
    """Yield stress plus two viscosities of the bi-viscous plastic models."""

    sigma_a: float
    D2: float
    D3: float

    def __post_init__(self):
        for name in ("sigma_a", "D2", "D3"):
            x = float(getattr(self, name))
            if not (math.isfinite(x) and x > 0):
                raise InvalidInputError(f"{name} must be positive, got {x}")


def three_element_stress(p: ThreeElementParams, eps):
    """Stress of the bi-viscous plastic model, piecewise closed form.

    ``(D2 + D3) * eps`` below the switch rate ``sigma_a / D2``, and
    ``sigma_a + D3 * eps`` above it; continuous at the switch.
    """
    scalar_in = np.isscalar(eps) or np.ndim(eps) == 0
    eps = np.asarray(eps, dtype=float)
    if np.any(eps < 0):
        raise InvalidInputError("eps must be >= 0")
    out = np.where(
        eps <= p.sigma_a / p.D2,
        (p.D2 + p.D3) * eps,
        p.sigma_a + p.D3 * eps,
    )
    return float(out) if scalar_in else out


def map_serial_parallel_params(sigma_a: float, D2: float, D3: float) -> ThreeElementParams:
    """Parameters of the serial-parallel variant equivalent to (sigma_a, D2, D3).

    sigma_a~ = sigma_a (1 + D3/D2),  D2~ = D2 + D3,  D3~ = D3 (1 + D3/D2).
    """
    base = ThreeElementParams(sigma_a, D2, D3)
    ratio = 1.0 + base.D3 / base.D2
    return ThreeElementParams(base.sigma_a * ratio, base.D2 + base.D3, base.D3 * ratio)


def three_element_parallel_serial(p: ThreeElementParams) -> RheoExpr:
    """Tree of the parallel-serial variant: (plastic [] dashpot) + dashpot."""
    return Parallel(
        [
            Serial([Leaf(PerfectPlastic(p.sigma_a)), Leaf(Dashpot(p.D2))]),
            Leaf(Dashpot(p.D3)),
        ]
    )


def three_element_serial_parallel(p: ThreeElementParams) -> RheoExpr:
    """Tree of the serial-parallel variant: (plastic + dashpot) [] dashpot."""
    return Serial(
        [
            Parallel([Leaf(PerfectPlastic(p.sigma_a)), Leaf(Dashpot(p.D3))]),
            Leaf(Dashpot(p.D2)),
        ]
    )


# ---------------------------------------------------------------------------
# Closed-form / empirical effective viscosities
# ---------------------------------------------------------------------------


class Formula(enum.Enum):
    """Closed-form and empirical effective-viscosity laws."""

    VP_MIN = "vp_min"
    BINGHAM_SUM = "bingham_sum"
    THREE_ELEMENT = "three_element"
    MULTI_ELEMENT = "multi_element"
    EMP_VAR1 = "emp_var1"
    EMP_VAR2 = "emp_var2"
    HB_MIN = "hb_min"
    EMP_DIF_DSL = "emp_dif_dsl"
    EMP_HARMONIC_GENERAL = "emp_harmonic_general"


_FORMULA_ARITY = {
    Formula.VP_MIN: 2,
    Formula.BINGHAM_SUM: 2,
    Formula.THREE_ELEMENT: 3,
    Formula.MULTI_ELEMENT: 3,
    Formula.EMP_VAR1: 3,
    Formula.EMP_VAR2: 3,
    Formula.HB_MIN: 3,
    Formula.EMP_DIF_DSL: 3,
    Formula.EMP_HARMONIC_GENERAL: 1,
}


def mu_eff_formula(formula, params: Sequence, eps):
    """Evaluate one of the closed-form / empirical viscosity laws.

    Parameters
    ----------
    formula : Formula or str
    params : tuple matching the formula arity
        VP_MIN(sigma_a, D):            min(D, sigma_a/|eps|)
        BINGHAM_SUM(sigma_a, D):       D + sigma_a/|eps|
        THREE_ELEMENT(sigma_a, D2, D3): min(sigma_a/|eps|, D2) + D3
        MULTI_ELEMENT(sigma_a_i, D2_i, D3): sum_i min(...) + D3
        EMP_VAR1(sigma_a, D2, D3):     (|eps|/sigma_a + 1/D2)^-1 + D3
        EMP_VAR2(sa~, D2~, D3~):       (1/(sa~/|eps| + D3~) + 1/D2~)^-1
        HB_MIN(sigma_a, D, n):         min(sigma_a/|eps|, D/|eps|^(1-1/n))
        EMP_DIF_DSL(D_dif, D_dsl, n):  1/(1/D_dif + |eps|^(1-1/n)/D_dsl)
        EMP_HARMONIC_GENERAL(mus):     (sum_i mu_i(|eps|)^-1)^-1
    eps : positive scalar or array
    """
    if isinstance(formula, str):
        try:
            formula = Formula(formula.lower())
        except ValueError:
            raise InvalidInputError(f"unknown formula id {formula!r}") from None
    if formula not in _FORMULA_ARITY:
        raise InvalidInputError(f"unknown formula id {formula!r}")
    params = tuple(params)
    if len(params) != _FORMULA_ARITY[formula]:
        raise InvalidInputError(
            f"{formula.name} takes {_FORMULA_ARITY[formula]} parameters, got {len(params)}"
        )
    scalar_in = np.isscalar(eps) or np.ndim(eps) == 0
    eps = np.asarray(eps, dtype=float)
    if np.any(eps <= 0):
        raise InvalidInputError("mu_eff_formula needs strictly positive eps")

    if formula is Formula.VP_MIN:
        sigma_a, d = params
        out = np.minimum(d, sigma_a / eps)
    elif formula is Formula.BINGHAM_SUM:
        sigma_a, d = params
        out = d + sigma_a / eps
    elif formula is Formula.THREE_ELEMENT:
        sigma_a, d2, d3 = params
        out = np.minimum(sigma_a / eps, d2) + d3
    elif formula is Formula.MULTI_ELEMENT:
        sig_list, d2_list, d3 = params
        sig_list = np.asarray(sig_list, dtype=float)
        d2_list = np.asarray(d2_list, dtype=float)
        if sig_list.size == 0 or sig_list.shape != d2_list.shape:
            raise InvalidInputError(
                "MULTI_ELEMENT needs matching nonempty sigma_a and D2 lists"
            )
        out = np.minimum(sig_list[:, None] / eps[None, ...].reshape(1, -1), d2_list[:, None])
        out = out.sum(axis=0).reshape(eps.shape) + d3
    elif formula is Formula.EMP_VAR1:
        sigma_a, d2, d3 = params
        out = 1.0 / (eps / sigma_a + 1.0 / d2) + d3
    elif formula is Formula.EMP_VAR2:
        sigma_a, d2, d3 = params
        out = 1.0 / (1.0 / (sigma_a / eps + d3) + 1.0 / d2)
    elif formula is Formula.HB_MIN:
        sigma_a, d, n = params
        out = np.minimum(sigma_a / eps, d / eps ** (1.0 - 1.0 / n))
    elif formula is Formula.EMP_DIF_DSL:
        d_dif, d_dsl, n = params
        out = 1.0 / (1.0 / d_dif + eps ** (1.0 - 1.0 / n) / d_dsl)
    else:  # EMP_HARMONIC_GENERAL
        (mus,) = params
        if not mus:
            raise InvalidInputError("EMP_HARMONIC_GENERAL needs at least one viscosity")
        inv = np.zeros_like(eps)
        for mu in mus:
            inv = inv + 1.0 / np.asarray(mu(eps), dtype=float)
        out = 1.0 / inv
    return float(out) if scalar_in else out


# ---------------------------------------------------------------------------
# Serial diffusion + dislocation creep
# ---------------------------------------------------------------------------


def _signed_cbrt(x):
    return np.sign(x) * np.abs(x) ** (1.0 / 3.0)


def serial_dif_dsl_stress(
    D_dif: float, D_dsl: float, n: float, eps, mode: str = "closed"
):
    """Stress of a dashpot in series with a power-law element.

    Solves ``(sigma/D_dsl)**n + sigma/D_dif = eps`` for ``sigma >= 0``.
    Closed mode covers n in {1, 2, 3} (linear harmonic mean, quadratic
    formula, depressed-cubic real root); numeric mode bisects the
    monotone residual for any n > 0.  The two agree to 1e-9 relative.
    """
    for name, x in (("D_dif", D_dif), ("D_dsl", D_dsl), ("n", n)):
        if not (math.isfinite(float(x)) and float(x) > 0):
            raise InvalidInputError(f"{name} must be positive and finite, got {x}")
    scalar_in = np.isscalar(eps) or np.ndim(eps) == 0
    eps = np.asarray(eps, dtype=float)
    if np.any(eps < 0):
        raise InvalidInputError("eps must be >= 0")

    if mode == "closed":
        if n == 1:
            out = eps / (1.0 / D_dif + 1.0 / D_dsl)
        elif n == 2:
            c = D_dsl**2 / (2.0 * D_dif)
            # sqrt(c^2 + eps D^2) - c, rationalized to avoid cancellation
            out = eps * D_dsl**2 / (np.sqrt(c**2 + eps * D_dsl**2) + c)
        elif n == 3:
            # Depressed cubic x^3 + p x = q with p = D_dsl^3/D_dif and
            # q = eps D_dsl^3; real root by the two signed cube roots,
            # evaluated as q/(A^2 - A B + B^2) so the near-cancelling
            # sum A + B never forms.
            p_ = D_dsl**3 / D_dif
            q_ = eps * D_dsl**3
            disc = q_**2 / 4.0 + p_**3 / 27.0
            root = np.sqrt(disc)
            u1 = q_ / 2.0 + root
            u2 = -(p_**3 / 27.0) / u1
            a_ = _signed_cbrt(u1)
            b_ = _signed_cbrt(u2)
            denom = a_**2 - a_ * b_ + b_**2
            out = q_ / denom
        else:
            raise UnsupportedModeError(
                f"closed mode covers n in {{1, 2, 3}}, got n = {n}"
            )
    elif mode == "numeric":
        out = _dif_dsl_bisect(D_dif, D_dsl, n, eps)
    else:
        raise InvalidInputError(f"mode must be 'closed' or 'numeric', got {mode!r}")
    return float(out) if scalar_in else out


def _dif_dsl_bisect(D_dif, D_dsl, n, eps):
    out = np.zeros_like(eps)
    act = eps > 0
    if not act.any():
        return out
    e = eps[act]
    b = np.ones_like(e)
    for _ in range(_MAX_DOUBLINGS):
        need = (b / D_dsl) ** n + b / D_dif < e
        if not need.any():
            break
        b = np.where(need, 2.0 * b, b)
    else:
        raise NonConvergenceError("dif/dsl bisection: bracket expansion failed")
    a = np.zeros_like(e)
    for _ in range(_MAX_BISECT):
        if np.all(b - a <= _BISECT_RTOL * np.maximum(b, _TINY)):
            break
        mid = 0.5 * (a + b)
        pred = (mid / D_dsl) ** n + mid / D_dif < e
        a = np.where(pred, mid, a)
        b = np.where(pred, b, mid)
    out[act] = 0.5 * (a + b)
    return out


def harmonic_mean_linear(D_list: Sequence[float]) -> float:
    """Modulus of serially arranged linear dashpots: ``1 / sum(1/D_i)``."""
    ds = [float(d) for d in D_list]
    if not ds:
        raise InvalidInputError("harmonic_mean_linear needs a nonempty list")
    if any(not math.isfinite(d) or d <= 0 for d in ds):
        raise InvalidInputError("all moduli must be positive and finite")
    return 1.0 / sum(1.0 / d for d in ds)
