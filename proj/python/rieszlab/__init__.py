"""Pseudo-spectral workbench for expanding-gas dynamics on the periodic torus.

Everything lives in the compiled core; this package just re-exports it.  The
main entry points are:

- ``Grid`` / ``ScalarField`` / ``VectorField`` with numpy-backed ``values``
- spectral operators: ``fractional_laplacian``, ``riesz_force``,
  ``gradient``, ``divergence``, ``dealias``, ``sobolev_seminorm``,
  ``lp_norm``
- the rescaled solver: ``ModelParams``, ``make_initial_state``,
  ``SolverConfig``, ``simulate``
- trajectory diagnostics and decay-rate reports: ``rescaled_norm``,
  ``mass``, ``compute_X`` / ``compute_Z``, ``theorem_exponent``,
  ``fit_exponent``, ``decay_report``
- envelope certification: ``GronwallParams``, ``integrate_inequality``,
  ``verify_lemma``, ``find_threshold_M``
- inequality ensembles: ``make_ensemble``, ``run_ensemble``
- expanding background flows: ``InitialFlow``, ``compute_K``,
  ``verify_background``
- the config pipeline: ``parse_sim_job``, ``run_sim_job``,
  ``norm_series_csv``

Exceptions mirror the command-line exit taxonomy: ``ConfigError`` (bad
configuration), ``BlowupError`` (solution breakdown), ``NumericError``
(internal numeric trouble).
"""

from rieszlab._core import *  # noqa: F401,F403
from rieszlab._core import __version__  # noqa: F401
