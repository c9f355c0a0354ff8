"""qstrip: split higher-order finite-difference solver for the time-dependent
Schrödinger equation on an n-dimensional strip, with discrete transparent
boundary conditions on the unbounded axis.

The building blocks:

- :mod:`qstrip.grid_core`     meshes, physical constants, potentials, packets.
- :mod:`qstrip.spectral`      eigenvalues of the averaged difference operators.
- :mod:`qstrip.transforms`    fast sine transforms and axis-1 stencils.
- :mod:`qstrip.tbc`           transparent-boundary kernel and boundary rows.
- :mod:`qstrip.stepper`       the time-stepping schemes themselves.
- :mod:`qstrip.diagnostics`   norms, energies, conservation identities.
- :mod:`qstrip.cli_app`       configuration files, presets, and the CLI.
"""

from .diagnostics import (ObservableSeries, convergence_ratios,
                          difference_norms, energies, mass2, norm_tilde)
from .errors import ConfigError, NumericalError, QstripError
from .grid_core import (DIRICHLET, TRANSPARENT, GridSpec, NoPotential,
                        PhysicalConstants, PoschlTellerPotential,
                        PotentialField, RectangularPotential, WaveField,
                        axis_coords, build_grid, extend_axis1,
                        gaussian_packet, sample_potential)
from .spectral import EigenReport, eigen_report, spectral_survey
from .stepper import (COMPARISON_DIRICHLET, DOUBLE_SPLIT_DIRICHLET,
                      DOUBLE_SPLIT_TBC, VARIANTS, SolverPlan, SolverState,
                      initial_state, make_plan, run, step)
from .tbc import (KernelCoeffs, KernelTable, kernel_coefficients,
                  kernel_extend, kernel_matrix, kernel_table)
from .transforms import dst_forward, dst_inverse, mode_analyze, mode_synthesize

__version__ = "0.1.0"

__all__ = [
    "COMPARISON_DIRICHLET", "ConfigError", "DIRICHLET",
    "DOUBLE_SPLIT_DIRICHLET", "DOUBLE_SPLIT_TBC", "EigenReport", "GridSpec",
    "KernelCoeffs", "KernelTable", "NoPotential", "NumericalError",
    "ObservableSeries", "PhysicalConstants", "PoschlTellerPotential",
    "PotentialField", "TRANSPARENT",
    "QstripError", "RectangularPotential", "SolverPlan", "SolverState",
    "VARIANTS", "WaveField", "axis_coords", "build_grid",
    "convergence_ratios", "difference_norms", "dst_forward", "dst_inverse",
    "eigen_report", "energies", "extend_axis1", "gaussian_packet",
    "initial_state", "kernel_coefficients", "kernel_extend", "kernel_matrix",
    "kernel_table", "make_plan", "mass2", "mode_analyze", "mode_synthesize",
    "norm_tilde", "run", "sample_potential", "spectral_survey", "step",
    "__version__",
]
