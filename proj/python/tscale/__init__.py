"""Optimal scaling of random walk Metropolis chains started out of equilibrium.

Thin Python layer over the C++ core. Functions return plain floats, lists
and dicts; tuning functions return a dict with keys ``ell``, ``objective``,
``iterations`` and ``converged``.
"""

from ._tscale import (
    __version__,
    acceptance_curve,
    acceptance_rate,
    asymptotic_star_ratio,
    diffusion_coefficient,
    drift_coefficient,
    ell_alpha,
    ell_alpha_ab,
    ell_ent_gaussian,
    ell_star,
    ell_star_ab,
    entropy_rate,
    entropy_rate_unit,
    equilibrium_values,
    experiment_preset,
    gaussian_entropy,
    integrate_gaussian_ode,
    mala_ar1_limit,
    matched_alpha,
    normal_cdf,
    normal_quantile,
    relative_loss_surface,
    run_chain,
    square_bias_sweep,
    validate,
)

__all__ = [name for name in dir() if not name.startswith("_")] + ["__version__"]
