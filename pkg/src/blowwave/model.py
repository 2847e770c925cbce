"""Model parameters, equilibria, birth nonlinearity, and wave-frame residual.

The population model is a diffusive Nicholson blowflies equation whose
diffusion term carries its own discrete delay.  In the wave frame (speed
``c``, coordinate ``t``) a profile ``phi`` solves

    phi''(t) - c phi'(t + r1) - delta phi(t + r1) + g(phi(t + r1 - r2)) = 0,

where ``g(u) = p u exp(-a u)`` is the birth function and ``r1 = c tau1``,
``r2 = c tau2`` are the delays scaled into the wave frame.  Splitting off a
monotonization term ``beta`` rewrites the reaction as the order-preserving
operator ``H(phi)(t) = g(phi(t + r1 - r2)) + beta phi(t + r1)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, NumericsError

__all__ = [
    "ModelParams",
    "Equilibria",
    "validate_params",
    "equilibria",
    "birth",
    "birth_prime",
    "beta_floor",
    "h_operator",
    "wave_residual",
]


@dataclass(frozen=True)
class ModelParams:
    """Physical parameters plus wave-frame constants.

    p      birth impact rate (> 0)
    delta  death rate (> 0)
    a      crowding coefficient (> 0)
    tau1   diffusion delay in time units (>= 0)
    tau2   birth delay in time units (>= 0)
    c      wave speed (> 0)
    beta   monotonization constant (>= 0)
    """

    p: float
    delta: float
    a: float
    tau1: float
    tau2: float
    c: float
    beta: float = 0.0

    @property
    def r1(self) -> float:
        """Diffusion delay in the wave frame, ``c * tau1``."""
        return self.c * self.tau1

    @property
    def r2(self) -> float:
        """Birth delay in the wave frame, ``c * tau2``."""
        return self.c * self.tau2

    @classmethod
    def from_rates(cls, p, delta, a, r1, r2, c, beta=0.0) -> "ModelParams":
        """Build params from wave-frame delays instead of time delays."""
        return cls(p=p, delta=delta, a=a, tau1=r1 / c, tau2=r2 / c, c=c, beta=beta)


@dataclass(frozen=True)
class Equilibria:
    u0: float
    ue: float


def validate_params(params: ModelParams) -> list[str]:
    """Check the standing assumptions; return one message per violation.

    An empty list means the parameter set supports the full construction,
    including the quasi upper solution (which additionally needs
    ``c > 2 sqrt(p)``).
    """
    v = []
    if not params.p > 0:
        v.append("p > 0 fails")
    if not params.delta > 0:
        v.append("delta > 0 fails")
    if not params.a > 0:
        v.append("a > 0 fails")
    if params.tau1 < 0:
        v.append("tau1 >= 0 fails")
    if params.tau2 < 0:
        v.append("tau2 >= 0 fails")
    if not params.c > 0:
        v.append("c > 0 fails")
    if params.beta < 0:
        v.append("beta >= 0 fails")
    if params.p > 0 and params.delta > 0:
        ratio = params.p / params.delta
        if not ratio > 1:
            v.append("1 < p/delta fails")
        elif ratio > math.e:
            v.append("p/delta <= e fails")
    if params.c > 0 and params.delta > 0:
        if not params.c > 2 * math.sqrt(params.delta):
            v.append("c > 2*sqrt(delta) violated"
                     + (" (equality)" if params.c == 2 * math.sqrt(params.delta) else ""))
    if params.c > 0 and params.p > 0:
        if not params.c > 2 * math.sqrt(params.p):
            v.append("c > 2*sqrt(p) violated"
                     + (" (equality)" if params.c == 2 * math.sqrt(params.p) else ""))
    return v


def equilibria(params: ModelParams) -> Equilibria:
    """Return the two constant states, 0 and ``ln(p/delta)/a``."""
    ratio = params.p / params.delta
    if not (1.0 < ratio <= math.e):
        raise DomainError(f"p/delta = {ratio} outside (1, e]; no positive equilibrium")
    return Equilibria(u0=0.0, ue=math.log(ratio) / params.a)


def birth(u, params: ModelParams):
    """Birth nonlinearity ``g(u) = p u exp(-a u)``.

    Inputs slightly below zero (round-off from quadrature) are clamped to 0;
    the theory confines profiles to [0, ue].
    """
    u = np.maximum(np.asarray(u, dtype=float), 0.0)
    out = params.p * u * np.exp(-params.a * u)
    return out if out.ndim else float(out)


def birth_prime(u, params: ModelParams):
    """Derivative ``g'(u) = p (1 - a u) exp(-a u)``."""
    u = np.asarray(u, dtype=float)
    out = params.p * (1.0 - params.a * u) * np.exp(-params.a * u)
    return out if out.ndim else float(out)


def beta_floor(params: ModelParams) -> float:
    """Least ``beta`` making ``u -> g(u) + beta u`` nondecreasing on [0, ue].

    ``g'`` decreases on [0, 2/a] and increases after, so its minimum over
    [0, ue] sits at ``min(ue, 2/a)``; the floor is ``max(0, -g'(min))``.
    Under the standing assumption ``p/delta <= e`` we have ``a ue <= 1`` and
    the floor is 0.
    """
    ue = equilibria(params).ue
    u_min = min(ue, 2.0 / params.a)
    return max(0.0, -birth_prime(u_min, params))


def h_operator(phi, t, params: ModelParams):
    """Monotone reaction ``H(phi)(t) = g(phi(t + r1 - r2)) + beta phi(t + r1)``.

    ``phi`` must expose ``value(t)`` (profiles do).  Monotone in ``phi`` for
    ``beta >= beta_floor`` and ``0 <= phi <= ue``.
    """
    t = np.asarray(t, dtype=float)
    out = birth(phi.value(t + (params.r1 - params.r2)), params)
    if params.beta != 0.0:
        out = out + params.beta * phi.value(t + params.r1)
    return out


def wave_residual(phi, t, params: ModelParams):
    """Signed residual of the wave equation at ``t``.

    ``phi`` must expose ``value``, ``d1`` and ``d2`` evaluators.  A quasi
    upper solution gives residual <= 0 almost everywhere, a quasi lower
    solution >= 0.
    """
    t = np.asarray(t, dtype=float)
    r = (
        phi.d2(t)
        - params.c * phi.d1(t + params.r1)
        - params.delta * phi.value(t + params.r1)
        + birth(phi.value(t + (params.r1 - params.r2)), params)
    )
    if not np.all(np.isfinite(r)):
        raise NumericsError("wave residual is non-finite")
    return r if np.ndim(r) else float(r)
