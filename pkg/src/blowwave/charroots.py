"""Roots of the quadratic and quasi-polynomial characteristic equations.

Two exponential polynomials govern the linear decay rates of the wave
construction:

    CE  :  z^2 - c z e^{r1 z} - delta e^{r1 z} = 0
    CE1 :  z^2 - c z e^{r1 z} + p     e^{r1 z} = 0

At ``r1 = 0`` they reduce to quadratics with closed-form roots.  For small
``r1 > 0`` the roots of interest are continued from the quadratic roots by a
homotopy in ``r1`` with Newton polishing, and root counts inside rectangles
are certified by the argument principle (winding number of the boundary
image).
"""

from __future__ import annotations

import cmath
import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    AmbiguityError,
    BoundaryProximityError,
    ContinuationError,
    DomainError,
    NumericsError,
)
from .model import ModelParams

__all__ = [
    "CharKind",
    "RootResult",
    "StripQuery",
    "quadratic_roots_lambda",
    "quadratic_roots_mu",
    "char_eval",
    "char_deriv",
    "count_roots_rect",
    "imaginary_axis_clear",
    "continue_root",
    "continue_roots",
    "eta1",
    "eta2",
]

RESIDUAL_CAP = 1e-10       # certificate: |Delta(root)| <= cap * max(1, |root|^2)
NEWTON_MAX_STEPS = 50
COLLISION_TOL = 1e-8


class CharKind(enum.Enum):
    CE = "CE"
    CE1 = "CE1"


@dataclass(frozen=True)
class RootResult:
    """A certified root with its residual and continuation provenance."""

    value: complex
    residual: float
    kind: CharKind
    seed: complex
    path_steps: int

    @property
    def is_real(self) -> bool:
        return abs(self.value.imag) <= 1e-10

    @property
    def real(self) -> float:
        return self.value.real


@dataclass(frozen=True)
class StripQuery:
    """Axis-aligned rectangle in the complex plane for root counting."""

    re_min: float
    re_max: float
    im_min: float
    im_max: float
    boundary_samples: int = 400

    def __post_init__(self):
        if not (self.re_min < self.re_max and self.im_min < self.im_max):
            raise DomainError("degenerate rectangle")
        if self.boundary_samples < 16:
            raise DomainError("boundary_samples must be >= 16")


def quadratic_roots_lambda(c: float, delta: float) -> tuple[float, float]:
    """Roots of ``z^2 - c z - delta``, sorted; one negative, one positive."""
    if not (c > 0 and delta > 0):
        raise DomainError("quadratic_roots_lambda needs c > 0 and delta > 0")
    s = math.sqrt(c * c + 4.0 * delta)
    return (c - s) / 2.0, (c + s) / 2.0


def quadratic_roots_mu(c: float, p: float) -> tuple[float, float]:
    """Roots of ``z^2 - c z + p`` sorted ascending; both positive.

    Requires the strict inequality ``c > 2 sqrt(p)`` so the discriminant is
    positive.
    """
    disc = c * c - 4.0 * p
    if disc <= 0:
        raise DomainError(
            f"c > 2*sqrt(p) required for real mu roots; got c={c}, 2*sqrt(p)={2*math.sqrt(p)}"
        )
    s = math.sqrt(disc)
    return (c - s) / 2.0, (c + s) / 2.0


def _coeff(kind: CharKind, params: ModelParams) -> float:
    # CE couples the death rate, CE1 the birth impact rate with flipped sign.
    return params.delta if kind is CharKind.CE else -params.p


def char_eval(kind: CharKind, z, params: ModelParams, r1: float | None = None):
    """Evaluate the characteristic function at ``z`` (vectorized)."""
    if r1 is None:
        r1 = params.r1
    z = np.asarray(z, dtype=complex)
    k = _coeff(kind, params)
    with np.errstate(over="ignore", invalid="ignore"):
        out = z * z - (params.c * z + k) * np.exp(r1 * z)
    return out if out.ndim else complex(out)


def char_deriv(kind: CharKind, z, params: ModelParams, r1: float | None = None):
    """Analytic derivative of the characteristic function."""
    if r1 is None:
        r1 = params.r1
    z = np.asarray(z, dtype=complex)
    k = _coeff(kind, params)
    out = 2.0 * z - (params.c + r1 * (params.c * z + k)) * np.exp(r1 * z)
    return out if out.ndim else complex(out)


def _rect_boundary(query: StripQuery, n_per_side: int) -> np.ndarray:
    """Positively oriented rectangle boundary, corners included once."""
    a, b = query.re_min, query.re_max
    lo, hi = query.im_min, query.im_max
    bottom = a + np.linspace(0.0, 1.0, n_per_side, endpoint=False) * (b - a) + 1j * lo
    right = b + 1j * (lo + np.linspace(0.0, 1.0, n_per_side, endpoint=False) * (hi - lo))
    top = b + np.linspace(0.0, 1.0, n_per_side, endpoint=False) * (a - b) + 1j * hi
    left = a + 1j * (hi + np.linspace(0.0, 1.0, n_per_side, endpoint=False) * (lo - hi))
    return np.concatenate([bottom, right, top, left])


def count_roots_rect(
    kind: CharKind,
    query: StripQuery,
    params: ModelParams,
    r1: float | None = None,
    max_samples: int = 2_000_000,
) -> int:
    """Number of roots inside the rectangle, via the argument principle.

    Accumulates argument increments of the boundary image and refines any
    segment whose increment reaches pi/2 until all are below it.  Raises
    ``BoundaryProximityError`` if the image passes within 1e-8 of the origin
    (a root on or near the boundary) and ``NumericsError`` if refinement
    exceeds ``max_samples`` points.
    """
    pts = list(_rect_boundary(query, max(query.boundary_samples // 4, 8)))
    pts.append(pts[0])
    vals = [complex(char_eval(kind, z, params, r1)) for z in pts]

    min_abs = min(abs(v) for v in vals)
    if min_abs <= 1e-8:
        raise BoundaryProximityError(
            f"|Delta| = {min_abs:.3e} on the rectangle boundary; move the rectangle"
        )

    i = 0
    while i < len(pts) - 1:
        v0, v1 = vals[i], vals[i + 1]
        if not (np.isfinite(v0.real) and np.isfinite(v1.real)):
            raise NumericsError("characteristic function overflowed on the boundary")
        dphi = cmath.phase(v1 / v0)
        if abs(dphi) < math.pi / 2:
            i += 1
            continue
        if len(pts) >= max_samples:
            raise NumericsError("argument-principle refinement exceeded the sample cap")
        zm = 0.5 * (pts[i] + pts[i + 1])
        vm = complex(char_eval(kind, zm, params, r1))
        if abs(vm) <= 1e-8:
            raise BoundaryProximityError(
                f"|Delta| = {abs(vm):.3e} at refined boundary point {zm}"
            )
        pts.insert(i + 1, zm)
        vals.insert(i + 1, vm)

    total = 0.0
    for i in range(len(pts) - 1):
        total += cmath.phase(vals[i + 1] / vals[i])
    winding = total / (2.0 * math.pi)
    count = int(round(winding))
    if abs(winding - count) > 0.25:
        raise NumericsError(f"winding number {winding} did not settle on an integer")
    return count


def dominance_radius(kind: CharKind, params: ModelParams, re_max: float,
                     r1: float | None = None) -> float:
    """Height above which ``|Delta(z)| >= |z|^2 / 2`` throughout the strip.

    For ``Re z <= re_max`` the exponential factor is bounded by
    ``e^{r1 re_max}``, so quadratic dominance holds once
    ``|z|^2 / 2 >= (c |z| + |k|) e^{r1 re_max}``.
    """
    if r1 is None:
        r1 = params.r1
    k = abs(_coeff(kind, params))
    amp = math.exp(max(r1, 0.0) * max(re_max, 0.0))
    ce = params.c * amp
    return ce + math.sqrt(ce * ce + 2.0 * k * amp)


def imaginary_axis_clear(
    kind: CharKind,
    params: ModelParams,
    xi_max: float | None = None,
    samples: int = 200_001,
    r1: float | None = None,
) -> tuple[bool, float]:
    """Whether ``|Delta(i xi)|`` stays above 1e-6 on the sampled axis.

    ``xi_max`` defaults to twice the quadratic-dominance height, beyond which
    ``|Delta| >= xi^2 / 2`` and no axis root can hide.
    """
    if r1 is None:
        r1 = params.r1
    needed = dominance_radius(kind, params, 0.0, r1)
    if xi_max is None:
        xi_max = max(50.0, 2.0 * needed)
    elif xi_max < needed:
        raise DomainError(
            f"xi_max={xi_max} below the quadratic-dominance height {needed:.3f}"
        )
    xi = np.linspace(-xi_max, xi_max, samples)
    vals = np.abs(char_eval(kind, 1j * xi, params, r1))
    min_abs = float(np.min(vals))
    return min_abs > 1e-6, min_abs


def _newton_polish(kind: CharKind, z: complex, params: ModelParams, r1: float) -> tuple[complex, int]:
    for it in range(1, NEWTON_MAX_STEPS + 1):
        f = complex(char_eval(kind, z, params, r1))
        if not np.isfinite(f.real) or not np.isfinite(f.imag):
            raise NumericsError(f"characteristic function overflowed at z={z}")
        fp = complex(char_deriv(kind, z, params, r1))
        if fp == 0:
            break
        dz = f / fp
        z = z - dz
        if abs(dz) <= 1e-14 * max(1.0, abs(z)):
            return z, it
    f = complex(char_eval(kind, z, params, r1))
    if abs(f) <= RESIDUAL_CAP * max(1.0, abs(z) ** 2):
        return z, NEWTON_MAX_STEPS
    raise ContinuationError(
        f"Newton did not converge at r1={r1} from seed near {z}", last_good_r1=None
    )


def default_continuation_steps(r1_target: float) -> int:
    """Step count keeping each Newton start inside its basin."""
    return max(10, int(math.ceil(abs(r1_target) / 0.005)))


def continue_roots(
    kind: CharKind,
    seeds,
    r1_target: float,
    params: ModelParams,
    steps: int | None = None,
) -> list[RootResult]:
    """Continue several roots of one equation simultaneously in ``r1``.

    Paths are polished at every increment; if two of them come within 1e-8
    of each other the continuation is ambiguous and aborts.
    """
    if steps is None:
        steps = default_continuation_steps(r1_target)
    if steps < 1:
        raise DomainError("steps must be >= 1")
    seeds = [complex(s) for s in seeds]
    zs = list(seeds)
    last_good = 0.0
    for i in range(1, steps + 1):
        r1 = r1_target * i / steps
        new = []
        for z in zs:
            try:
                zn, _ = _newton_polish(kind, z, params, r1)
            except ContinuationError as exc:
                raise ContinuationError(
                    f"continuation of {kind.value} stalled at r1={r1}", last_good_r1=last_good
                ) from exc
            new.append(zn)
        for j in range(len(new)):
            for k in range(j + 1, len(new)):
                if abs(new[j] - new[k]) < COLLISION_TOL:
                    raise AmbiguityError(
                        f"root paths collided at r1={r1}: {new[j]} vs {new[k]}"
                    )
        zs = new
        last_good = r1
    out = []
    for seed, z in zip(seeds, zs):
        res = abs(complex(char_eval(kind, z, params, r1_target)))
        if res > RESIDUAL_CAP * max(1.0, abs(z) ** 2):
            raise ContinuationError(
                f"final residual {res:.3e} exceeds certificate at r1={r1_target}",
                last_good_r1=last_good,
            )
        out.append(RootResult(value=z, residual=res, kind=kind, seed=seed, path_steps=steps))
    return out


def continue_root(
    kind: CharKind,
    seed: complex,
    r1_target: float,
    params: ModelParams,
    steps: int | None = None,
) -> RootResult:
    """Homotopy in ``r1`` from a quadratic root at ``r1 = 0``."""
    if r1_target == 0.0:
        res = abs(complex(char_eval(kind, seed, params, 0.0)))
        return RootResult(value=complex(seed), residual=res, kind=kind,
                          seed=complex(seed), path_steps=0)
    return continue_roots(kind, [seed], r1_target, params, steps)[0]


def eta1(params: ModelParams, steps: int | None = None) -> RootResult:
    """Positive real root of CE at ``r1``, continued from the quadratic root.

    Used by the quasi lower solution; the left-strip root near the negative
    quadratic root remains reachable through ``continue_root`` directly.
    """
    _, lam2 = quadratic_roots_lambda(params.c, params.delta)
    root = continue_root(CharKind.CE, lam2, params.r1, params, steps)
    _require_real_positive(root, "eta1")
    return root


def eta2(params: ModelParams, steps: int | None = None) -> RootResult:
    """Real root of CE1 at ``r1`` continued from the larger quadratic root."""
    _, mu2 = quadratic_roots_mu(params.c, params.p)
    root = continue_root(CharKind.CE1, mu2, params.r1, params, steps)
    _require_real_positive(root, "eta2")
    return root


def _require_real_positive(root: RootResult, name: str) -> None:
    if not root.is_real:
        raise ContinuationError(
            f"continuation failure: {name} drifted off the real axis: {root.value}")
    if root.value.real <= 0:
        raise ContinuationError(
            f"continuation failure: {name} = {root.value.real} is not positive; "
            "r1 outside the small-delay regime"
        )
