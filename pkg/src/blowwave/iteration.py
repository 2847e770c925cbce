"""Convolution operator F and the monotone fixed-point driver.

``F(phi)(t) = int G(t - s) H(phi)(s) ds`` maps a candidate profile to the
unique bounded solution of the linearized wave equation with reaction
``H(phi)``.  On the grid the integral is a trapezoid sum accelerated by FFT
convolution, plus three corrections: an Euler-Maclaurin term for the kink
of ``G'`` at lag zero, and analytic tail terms for the constant extensions
of ``H`` beyond the grid.

The driver iterates ``phi_{n+1} = F(phi_n)`` from the quasi upper solution
and records, per step, the sup-norm update, a monotone-descent flag and an
order flag against the lower profile.  An optional clamp projects each
iterate into ``[max(lower, 0), min(previous, ue)]`` nodewise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.signal import fftconvolve

from .errors import ConfigError, DivergenceError, DomainError, NumericsError
from .model import ModelParams, birth, equilibria, wave_residual
from .profiles import Grid, PairResult, Profile, paired_profiles
from .quadrature import KernelTable, tail_truncation_radius

__all__ = [
    "IterationConfig",
    "IterationReport",
    "apply_F",
    "iterate",
    "wave_to_pde",
]


@dataclass
class IterationConfig:
    """Numerical controls for the fixed-point run."""

    grid: Grid
    kernel: KernelTable
    tol: float = 1e-6
    max_iter: int = 200
    clamp: bool = False
    tail_mode: bool = True
    kink_correction: bool = True
    mono_eps: float = 1e-9      # roundoff slack for the descent flag
    order_eps: float = 1e-5     # 10x the convolution quadrature tolerance
    pre_check: bool = True
    quasi_tol: float = 1e-8
    T_bridge: float = 8.0
    lower_placement: str = "auto"

    def __post_init__(self):
        if self.tol <= 0:
            raise DomainError("tol must be positive")
        if self.max_iter < 1:
            raise DomainError("max_iter must be >= 1")


@dataclass
class IterationReport:
    """Per-step diagnostics and the convergence verdict."""

    deltas: list = field(default_factory=list)
    monotone_ok: list = field(default_factory=list)
    order_ok: list = field(default_factory=list)
    clamp_steps: list = field(default_factory=list)
    clamp_events: int = 0
    g_clamps: int = 0
    converged: bool = False
    steps: int = 0
    final_residual: float = math.nan
    boundary_errors: tuple = (math.nan, math.nan)
    lower_placement: str = ""
    lower_shift: float = math.nan
    quasi_attempts: list = field(default_factory=list)
    notes: list = field(default_factory=list)


def _check_kernel(config: IterationConfig, params: ModelParams) -> None:
    k = config.kernel
    if not k.matches(params):
        raise ConfigError("kernel table was built for different parameters")
    needed = tail_truncation_radius(k, config.tol / 10.0)
    if k.T_ker < needed:
        raise ConfigError(
            f"kernel half-width {k.T_ker} below truncation radius {needed:.2f} "
            f"for tol {config.tol}"
        )


def _h_values(phi: Profile, s: np.ndarray, params: ModelParams) -> tuple[np.ndarray, int]:
    """H(phi) on the quadrature nodes, counting negative-input clamps."""
    u = np.asarray(phi.value(s + (params.r1 - params.r2)))
    clamps = int(np.count_nonzero(u < 0.0))
    out = birth(u, params)
    if params.beta != 0.0:
        out = out + params.beta * np.asarray(phi.value(s + params.r1))
    return out, clamps


def _h_constant(level: float, params: ModelParams) -> float:
    return float(birth(level, params)) + params.beta * level


def apply_F(phi: Profile, config: IterationConfig, params: ModelParams) -> Profile:
    """One application of the convolution operator on the grid.

    The result keeps the equilibrium limits (0, ue) as its extensions.
    """
    _check_kernel(config, params)
    out, _ = _apply_F_raw(phi, config, params)
    return out


def _apply_F_raw(phi: Profile, config: IterationConfig, params: ModelParams):
    grid, kernel = config.grid, config.kernel
    h = grid.step
    t = grid.nodes()
    L = grid.half_width
    if kernel.T_ker < 2 * L - 1e-9:
        raise ConfigError("kernel table must cover lags up to twice the grid half-width")

    hs, clamps = _h_values(phi, t, params)
    if not np.all(np.isfinite(hs)):
        raise NumericsError("reaction values non-finite")

    if abs(kernel.h_ker - h) <= 1e-12:
        gvals = kernel.values
        goff = round(kernel.T_ker / h)
    else:
        # resample the kernel onto the grid's lag spacing
        lags = np.arange(-round(2 * L / h), round(2 * L / h) + 1) * h
        gvals = kernel.value(lags)
        goff = round(2 * L / h)

    w = np.ones(len(t))
    w[0] = 0.5
    w[-1] = 0.5
    conv = fftconvolve(hs * w, gvals)
    vals = h * conv[goff:goff + len(t)]

    if config.kink_correction:
        # trapezoid over the G' jump at lag 0 overestimates by (h^2/12) H(t)
        vals = vals - (h * h / 12.0) * hs

    if config.tail_mode:
        h_right = _h_constant(phi.right_limit, params)
        h_left = _h_constant(phi.left_limit, params)
        if h_right != 0.0:
            vals = vals + h_right * kernel.cumulative(t - L)
        if h_left != 0.0:
            vals = vals + h_left * (kernel.mass - kernel.cumulative(t + L))

    if not np.all(np.isfinite(vals)):
        raise NumericsError("operator output non-finite")
    ue = equilibria(params).ue
    return Profile(grid=grid, values=vals, left_limit=0.0, right_limit=ue), clamps


def _deltas_diverging(deltas, window: int = 5) -> bool:
    if len(deltas) < window + 1:
        return False
    tail = deltas[-(window + 1):]
    return all(tail[i + 1] > tail[i] for i in range(window))


def iterate(
    config: IterationConfig,
    params: ModelParams,
    pair: PairResult | None = None,
) -> tuple[Profile, IterationReport]:
    """Run ``phi_n = F(phi_{n-1})`` from the quasi upper solution.

    A prepared profile pair may be passed in; otherwise one is built with
    ``config.T_bridge`` and ``config.lower_placement``.  With
    ``config.pre_check`` set, both quasi certificates must pass or the run
    refuses.  Raises ``DivergenceError`` when the sup-norm updates grow for
    five consecutive steps; exhausting ``max_iter`` just returns a
    non-converged report.
    """
    _check_kernel(config, params)
    if pair is None:
        pair = paired_profiles(params, config.grid, config.T_bridge,
                               placement=config.lower_placement, tol=config.quasi_tol)
    report = IterationReport()
    report.lower_placement = pair.placement
    report.lower_shift = pair.shift
    report.quasi_attempts = list(pair.attempts)
    if config.pre_check:
        problems = []
        if not pair.upper_report.passed:
            problems.append(
                f"upper certificate failed (worst {pair.upper_report.worst_value:.3e} "
                f"at t={pair.upper_report.worst_t})")
        if not pair.lower_report.passed:
            problems.append(
                f"lower certificate failed (worst {pair.lower_report.worst_value:.3e} "
                f"at t={pair.lower_report.worst_t})")
        if not pair.ordered:
            problems.append("ordering lower <= upper failed on the grid")
        if problems:
            raise DomainError("quasi-solution pre-check refused: " + "; ".join(problems))

    grid = config.grid
    t = grid.nodes()
    ue = equilibria(params).ue
    lower_vals = np.asarray(pair.lower.value(t))
    prev = pair.upper
    prev_vals = np.asarray(prev.value(t))

    for _ in range(config.max_iter):
        nxt, clamps = _apply_F_raw(prev, config, params)
        report.g_clamps += clamps
        vals = nxt.values
        step_clamps = 0
        if config.clamp:
            lo = np.maximum(lower_vals, 0.0)
            hi = np.minimum(prev_vals, ue)
            projected = np.clip(vals, lo, hi)
            step_clamps = int(np.count_nonzero(projected != vals))
            vals = projected
            nxt = Profile(grid=grid, values=vals, left_limit=0.0, right_limit=ue)
        report.clamp_steps.append(step_clamps)
        report.clamp_events += step_clamps
        delta = float(np.max(np.abs(vals - prev_vals)))
        report.deltas.append(delta)
        report.monotone_ok.append(bool(np.max(vals - prev_vals) <= config.mono_eps))
        report.order_ok.append(bool(np.min(vals - lower_vals) >= -config.order_eps))
        prev, prev_vals = nxt, vals
        report.steps += 1
        if delta < config.tol:
            report.converged = True
            break
        if _deltas_diverging(report.deltas):
            report.notes.append("sup-norm updates grew for 5 consecutive steps")
            raise DivergenceError("fixed-point iteration diverging", report=report)

    report.boundary_errors = (float(abs(prev_vals[0])), float(abs(prev_vals[-1] - ue)))
    report.final_residual = _profile_residual_sup(prev, params)
    return prev, report


def _profile_residual_sup(phi: Profile, params: ModelParams) -> float:
    """Sup of |wave residual| over interior nodes with full stencil support."""
    grid = phi.grid
    t = grid.nodes()
    margin = 2 * grid.step + max(params.r1, params.r1 - params.r2, 0.0)
    keep = (t >= t[0] + 2 * grid.step) & (t <= t[-1] - margin)
    for kink in phi.kink_points():
        keep &= np.abs(t - kink) > grid.step + 1e-12
    res = np.asarray(wave_residual(phi, t[keep], params))
    return float(np.max(np.abs(res)))


def wave_to_pde(phi: Profile, c: float, x_values, t_values) -> np.ndarray:
    """Sample the traveling front ``u(t, x) = phi(x + c t)`` in lab frame.

    Returns an array of shape ``(len(t_values), len(x_values))``.
    """
    x = np.asarray(x_values, dtype=float)
    ts = np.asarray(t_values, dtype=float)
    return np.asarray(phi.value(x[None, :] + c * ts[:, None]))
