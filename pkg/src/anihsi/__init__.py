"""Anisotropic hypersingular integrals, their Fourier symbols and inverse
potentials, computed on desk-scale grids."""

from .errors import (AnihsiError, ConvergenceDiagnostic, InputError, NumericalError,
                     QuadratureConfigError, SolverError, UnsupportedBranchError)
from .profile import AdmissibilityReport, AnisotropyProfile, check_admissibility, derive_profile
from .distance import DistanceSolverConfig, dilate, rho, rho_lam
from .field import (Field, GridFunction, GridSpec, bump_1d, constant, gaussian, polynomial,
                    sample, separable, tensor_bump, zero_mass_gaussian)
from .mixednorm import interpolation_check, mixed_norm
from .finitediff import centered_diff, diff_bound_probe, noncentered_diff
from .spectral import (SymbolTable, apply_symbol, dft, inverse_dft, liouville_table,
                       multiplier_ratio_table, rho_power_table, space_norm)
from .hsi import (DEFAULT_CONFIG, HsiQuadratureConfig, annulus_integral, full_symbol,
                  full_symbol_table, hsi_limit, symbol_consistency, truncated_hsi,
                  truncated_symbol, truncated_symbol_table)
from .potentials import (KernelSynthesisConfig, PotentialKernel, convolve, inversion_residual,
                         kernel_q, kernel_table, sobolev_exponents, sobolev_probe,
                         spectral_inversion_residual)
from .approx import ApproximationSchedule, cutoff, denseness_study, mollify, truncate
from .lemmasuite import (BoundProbeReport, ProbeThresholds, probe_diff_norm_bound, probe_I_decay,
                         probe_moment_inequality, probe_pointwise_bound)

__version__ = "0.1.0"
