"""
arcspec: discrete spectra of three-dimensional singular interactions
supported on open arcs, and their one-dimensional comparison operators.
"""

from .asymptotics import (
    AsymptoticsReport,
    CouplingPoint,
    coupling_point,
    counting_report,
    expansion_report,
    tube_width,
    xi_alpha,
    zeta_alpha,
)
from .birman_schwinger import (
    PSI1,
    BSMatrix,
    HEigenpair,
    assemble_Q,
    bs_eigenvalues,
    count_eigenvalues,
    eigenfunction,
    green_kernel,
    regularized_diagonal,
    solve_kappa,
    verify_bc,
)
from .curves import (
    ArcCurve,
    CurveError,
    CurveSpec,
    build_curve,
    effective_potential,
    extend_curve,
    frenet_frame,
    injectivity_check,
    shifted_curve,
    tube_metric,
)
from .io import ExperimentConfig, parse_config, write_report
from .operator1d import (
    BC,
    Grid1D,
    Spectrum1D,
    assemble_1d,
    bracketing_table,
    eigenvalues_1d,
    extended_rescaled_spectrum,
    spectrum_1d,
)

__version__ = "0.1.0"
