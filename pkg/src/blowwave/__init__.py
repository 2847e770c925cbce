"""Traveling-wave fronts for a Nicholson blowflies model with delayed diffusion.

The library builds the wave-frame Green's kernel from its Fourier
representation, locates the characteristic roots that drive the quasi
upper/lower solution pair, certifies the pair's residual signs on a grid,
and runs the monotone convolution iteration.  A CLI (``blowwave``) surfaces
each stage and writes CSV tables plus figures.
"""

from .charroots import (
    CharKind,
    RootResult,
    StripQuery,
    char_eval,
    continue_root,
    count_roots_rect,
    eta1,
    eta2,
    imaginary_axis_clear,
    quadratic_roots_lambda,
    quadratic_roots_mu,
)
from .config import RunConfig, load_config, paper_config, save_config
from .errors import BlowwaveError
from .iteration import IterationConfig, IterationReport, apply_F, iterate, wave_to_pde
from .model import (
    Equilibria,
    ModelParams,
    beta_floor,
    birth,
    birth_prime,
    equilibria,
    h_operator,
    validate_params,
    wave_residual,
)
from .profiles import (
    BridgeCubic,
    Grid,
    Profile,
    bridge_coeffs,
    paired_profiles,
    quasi_lower,
    quasi_upper,
    verify_quasi,
)
from .quadrature import (
    KernelTable,
    SimpsonPlan,
    build_kernel_table,
    fit_decay,
    green_value,
    kappa_table,
    simpson,
    tail_truncation_radius,
)

__version__ = "0.1.0"
