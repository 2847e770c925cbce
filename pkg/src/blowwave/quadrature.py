"""Composite Simpson quadrature, Green's kernel tables, and decay fits.

The kernel of the wave-frame integral operator is the Fourier integral

    G(t, r1) = -(1/2pi) * int_{-N}^{N} e^{i xi t} / D(i xi) d xi,
    D(z) = z^2 - (c z + delta + beta) e^{r1 z},

truncated at a configurable frequency radius ``N`` and discretized by a
composite Simpson rule.  Tables of G on uniform ``t`` grids are evaluated by
a chirp-z transform, which computes exactly the same weighted sums as the
direct formula (a unit test pins the two paths together).  The table's tail
is certified by fitting an exponential envelope ``M1 exp(-delta1 |t|)``.

``kappa_table`` reproduces a contour-shifted magnitude estimate in two
modes: the integrand exactly as printed in the source material (documented
to be dimensionally inconsistent) and an internally consistent variant that
evaluates the characteristic function on the shifted line.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.signal import czt

from .charroots import CharKind, char_eval
from .errors import ContourSingularityError, DomainError, KernelQualityError, NumericsError
from .model import ModelParams

__all__ = [
    "SimpsonPlan",
    "simpson",
    "default_n_freq",
    "green_value",
    "KernelTable",
    "build_kernel_table",
    "fit_decay",
    "tail_truncation_radius",
    "kappa_table",
]

CZT_CHUNK = 65536  # bounds the chirp phase so its rounding stays below 1e-9


@dataclass(frozen=True)
class SimpsonPlan:
    """Uniform composite-Simpson discretization of ``[lower, upper]``."""

    lower: float
    upper: float
    n: int

    def __post_init__(self):
        if self.n < 2 or self.n % 2 != 0:
            raise DomainError(f"Simpson needs an even n >= 2, got {self.n}")
        if not self.upper > self.lower:
            raise DomainError("empty integration interval")

    @property
    def h(self) -> float:
        return (self.upper - self.lower) / self.n

    def nodes(self) -> np.ndarray:
        return self.lower + np.arange(self.n + 1) * self.h

    def weights(self) -> np.ndarray:
        w = np.ones(self.n + 1)
        w[1:-1:2] = 4.0
        w[2:-1:2] = 2.0
        return w * (self.h / 3.0)


def simpson(integrand, plan: SimpsonPlan) -> complex:
    """Composite Simpson sum of ``integrand`` over the plan's nodes.

    The integrand may be scalar or vectorized over a node array.
    """
    xs = plan.nodes()
    try:
        vals = np.asarray(integrand(xs), dtype=complex)
        if vals.shape != xs.shape:
            raise TypeError
    except TypeError:
        vals = np.array([integrand(x) for x in xs], dtype=complex)
    bad = ~np.isfinite(vals.real) | ~np.isfinite(vals.imag)
    if np.any(bad):
        raise NumericsError(f"integrand non-finite at node x={xs[np.argmax(bad)]}")
    return complex(np.sum(plan.weights() * vals))


def default_n_freq(N: float, t_max: float) -> int:
    """Even subinterval count giving >= 20 Simpson nodes per oscillation.

    The factor e^{i xi t} has period ``2 pi / |t|`` in xi; resolving the
    fastest oscillation at ``|t| = t_max`` with 40 points per period keeps
    the rule deep in its convergent regime.
    """
    n = max(20000, int(math.ceil(40.0 * N * max(t_max, 1.0) / math.pi)))
    return n + (n % 2)


def _green_denominator(xi: np.ndarray, params: ModelParams) -> np.ndarray:
    # The linear operator carries delta + beta once the reaction is split
    # into the monotone H; beta = 0 recovers the plain characteristic
    # function on the imaginary axis.
    z = 1j * np.asarray(xi, dtype=float)
    return z * z - (params.c * z + params.delta + params.beta) * np.exp(params.r1 * z)


def green_value(
    t: float,
    params: ModelParams,
    N: float = 50.0,
    n_freq: int | None = None,
) -> tuple[float, float]:
    """Kernel value ``G(t)`` by direct Simpson; returns (real part, |imag|).

    The imaginary part is a discretization diagnostic: the exact integral is
    real by Hermitian symmetry of the integrand.
    """
    if n_freq is None:
        n_freq = default_n_freq(N, abs(t))
    plan = SimpsonPlan(-N, N, n_freq)
    xi = plan.nodes()
    den = _green_denominator(xi, params)
    small = np.abs(den) < 1e-12
    if np.any(small):
        raise ContourSingularityError(
            f"kernel denominator ~ 0 at xi={xi[np.argmax(small)]}"
        )
    vals = np.exp(1j * xi * t) / den
    total = complex(np.sum(plan.weights() * vals)) * (-1.0 / (2.0 * math.pi))
    return total.real, abs(total.imag)


@dataclass
class KernelTable:
    """Sampled Green's kernel on a symmetric uniform grid.

    ``values[j]`` holds ``G(-T_ker + j h_ker)``.  ``decay_m1``/``decay_delta1``
    give the fitted tail envelope ``|G(t)| <= decay_m1 e^{-decay_delta1 |t|}``
    valid on the fitted region up to the recorded ``fit_tol`` headroom.
    """

    T_ker: float
    h_ker: float
    values: np.ndarray
    r1: float
    N: float
    n_freq: int
    decay_m1: float
    decay_delta1: float
    fit_tol: float
    max_imag: float
    c: float
    delta: float
    beta: float
    _cum: np.ndarray | None = field(default=None, repr=False)

    @property
    def t_grid(self) -> np.ndarray:
        return -self.T_ker + np.arange(len(self.values)) * self.h_ker

    def value(self, t) -> np.ndarray:
        """Linear interpolation; 0 beyond the table (below the envelope)."""
        return np.interp(np.asarray(t, dtype=float), self.t_grid, self.values,
                         left=0.0, right=0.0)

    def cumulative(self, x) -> np.ndarray:
        """Trapezoid integral from the table's left edge up to ``x``."""
        if self._cum is None:
            inc = 0.5 * (self.values[1:] + self.values[:-1]) * self.h_ker
            self._cum = np.concatenate([[0.0], np.cumsum(inc)])
        return np.interp(np.asarray(x, dtype=float), self.t_grid, self._cum,
                         left=0.0, right=self._cum[-1])

    @property
    def mass(self) -> float:
        """Trapezoid integral over the whole table (target 1/(delta+beta))."""
        return float(self.cumulative(self.T_ker))

    def matches(self, params: ModelParams) -> bool:
        return (
            self.c == params.c
            and self.delta == params.delta
            and self.beta == params.beta
            and abs(self.r1 - params.r1) <= 1e-15
        )


def _kernel_samples_czt(t0: float, h_t: float, m: int, d: np.ndarray,
                        xi: np.ndarray, dxi: float) -> np.ndarray:
    """Sum ``d_k exp(i xi_k (t0 + j h_t))`` for j = 0..m-1 via chirp-z blocks.

    Splitting the frequency axis into blocks caps the chirp phase k^2/2 *
    (dxi * h_t), keeping its floating-point rounding (and hence the spurious
    imaginary part of the result) far below the realness certificate.
    ``dxi`` must be the exact node spacing, not a recomputed difference.
    """
    out = np.zeros(m, dtype=complex)
    j = np.arange(m)
    w = np.exp(1j * dxi * h_t)
    for s in range(0, len(d), CZT_CHUNK):
        e = min(s + CZT_CHUNK, len(d))
        y = d[s:e] * np.exp(1j * (t0 * xi[s] + t0 * dxi * np.arange(e - s)))
        out += czt(y, m=m, w=w, a=1.0) * np.exp(1j * xi[s] * j * h_t)
    return out


def build_kernel_table(
    params: ModelParams,
    T_ker: float = 20.0,
    h_ker: float = 0.01,
    N: float = 50.0,
    n_freq: int | None = None,
) -> KernelTable:
    """Sample G on ``[-T_ker, T_ker]`` and certify its decay envelope."""
    if T_ker <= 0 or h_ker <= 0:
        raise DomainError("T_ker and h_ker must be positive")
    m_half = round(T_ker / h_ker)
    if abs(m_half * h_ker - T_ker) > 1e-9 * T_ker:
        raise DomainError("h_ker must divide T_ker")
    if n_freq is None:
        n_freq = default_n_freq(N, T_ker)
    plan = SimpsonPlan(-N, N, n_freq)
    xi = plan.nodes()
    den = _green_denominator(xi, params)
    small = np.abs(den) < 1e-12
    if np.any(small):
        raise ContourSingularityError(
            f"kernel denominator ~ 0 at xi={xi[np.argmax(small)]}"
        )
    d = plan.weights() / den
    m = 2 * m_half + 1
    raw = _kernel_samples_czt(-T_ker, h_ker, m, d, xi, plan.h) * (-1.0 / (2.0 * math.pi))
    values = np.ascontiguousarray(raw.real)
    max_imag = float(np.max(np.abs(raw.imag)))
    max_abs = float(np.max(np.abs(values)))
    if max_abs > 0 and max_imag >= 1e-8 * max_abs:
        raise KernelQualityError(
            f"kernel not real within tolerance: max|imag| = {max_imag:.3e}"
        )
    m1, d1, fit_tol = _fit_decay_envelope(values, T_ker, h_ker)
    return KernelTable(
        T_ker=T_ker, h_ker=h_ker, values=values, r1=params.r1, N=N,
        n_freq=n_freq, decay_m1=m1, decay_delta1=d1, fit_tol=fit_tol,
        max_imag=max_imag, c=params.c, delta=params.delta, beta=params.beta,
    )


def _fit_decay_envelope(values: np.ndarray, T_ker: float, h_ker: float):
    """Log-linear regression of the two-sided tail envelope.

    Samples at +-tau are reduced to their maximum so the slower tail governs
    the fitted rate, matching the one-envelope bound the table certifies.
    """
    center = len(values) // 2
    k_lo = int(math.ceil((T_ker / 2.0) / h_ker))
    ks = np.arange(k_lo, center + 1)
    if len(ks) < 8:
        raise KernelQualityError("fewer than 8 tail samples; enlarge T_ker")
    taus = ks * h_ker
    env = np.maximum(np.abs(values[center + ks]), np.abs(values[center - ks]))
    keep = env > 0
    if np.count_nonzero(keep) < 8:
        raise KernelQualityError("tail envelope vanishes; cannot fit decay")
    A = np.vstack([np.ones(np.count_nonzero(keep)), taus[keep]]).T
    coef, *_ = np.linalg.lstsq(A, np.log(env[keep]), rcond=None)
    delta1 = -float(coef[1])
    if delta1 <= 0:
        raise KernelQualityError(
            f"kernel tail not decaying (fitted rate {delta1}); "
            "parameters outside the small-delay regime"
        )
    m1 = math.exp(float(coef[0])) * 1.1  # 10% headroom
    bound = m1 * np.exp(-delta1 * taus[keep])
    fit_tol = max(0.0, float(np.max(env[keep] / bound)) - 1.0)
    return m1, delta1, fit_tol


def fit_decay(table: KernelTable) -> tuple[float, float]:
    """Envelope constants ``(M1, delta1)`` for a built table."""
    m1, d1, _ = _fit_decay_envelope(table.values, table.T_ker, table.h_ker)
    return m1, d1


def tail_truncation_radius(table: KernelTable, eps: float) -> float:
    """Radius beyond which the fitted envelope puts the kernel below eps/2."""
    if eps <= 0:
        raise DomainError("eps must be positive")
    return max(0.0, math.log(2.0 * table.decay_m1 / eps) / table.decay_delta1)


def _printed_reciprocal(w: np.ndarray) -> np.ndarray:
    """1 / [w^2 + (2 i w + 1) e^w], stable for large Re(w).

    Beyond Re(w) ~ 300 the direct e^w would eventually overflow; rewriting
    with e^{-w} saturates those contributions to 0 gracefully.
    """
    w = np.asarray(w, dtype=complex)
    out = np.empty(w.shape, dtype=complex)
    big = w.real > 300.0
    ws = w[~big]
    out[~big] = 1.0 / (ws * ws + (2j * ws + 1.0) * np.exp(ws))
    wb = w[big]
    emw = np.exp(-wb)
    out[big] = emw / (wb * wb * emw + (2j * wb + 1.0))
    return out


def kappa_table(
    params: ModelParams,
    lambda1_abs: float,
    step_sizes,
    lower: float = -50.0,
    upper: float = 50.0,
) -> list[tuple[int, float, float, float]]:
    """Contour-shifted Simpson magnitudes for a list of step sizes.

    Each row is ``(n, h, |I_n| printed mode, |I_n| consistent mode)`` on the
    shifted line ``w = xi + i*lambda1_abs``.  Printed mode evaluates the
    denominator ``w^2 + (2 i w + 1) e^w`` exactly as typeset; consistent
    mode evaluates the CE characteristic function at ``i w``.
    """
    rows = []
    length = upper - lower
    for hstep in step_sizes:
        if hstep <= 0:
            raise DomainError("step sizes must be positive")
        n = int(round(length / hstep))
        if n % 2 or n < 2:
            raise DomainError(f"step {hstep} gives odd or tiny n={n}")
        plan = SimpsonPlan(lower, upper, n)
        xs = plan.nodes()
        w = xs + 1j * lambda1_abs
        f_printed = _printed_reciprocal(w) / (2.0 * math.pi)
        f_consistent = (1.0 / char_eval(CharKind.CE, 1j * w, params)) / (2.0 * math.pi)
        wts = plan.weights()
        rows.append((
            n,
            plan.h,
            abs(complex(np.sum(wts * f_printed))),
            abs(complex(np.sum(wts * f_consistent))),
        ))
    return rows
