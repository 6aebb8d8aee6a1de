"""Fair sparse regression with a hidden binary group attribute.

The response model is ``y = X w* + gamma z* + e`` with an s-sparse w*
and an unobserved per-sample attribute z* in {-1, +1}. The combinatorial
estimator (jointly over w and the sign assignment) is relaxed to an
invex program over the elliptope and solved by alternating minimization;
the package also ships exact small-instance oracles, witness-based
optimality diagnostics, and a seeded experiment harness.
"""

from .altopt import FitConfig, Solution, debias, fit, solution_from_json
from .diagnostics import (AssumptionReport, InvexityReport, KktReport,
                          SpectrumReport, WitnessReport, build_witness,
                          check_assumptions, check_kkt, invexity_probe,
                          lambda_spectrum)
from .errors import (ConfigError, ConvergenceError, DataError, DimensionError,
                     FairsparseError, NumericError, SingularMatrixError)
from .fairlasso import (LassoFit, SolverConfig, lambda_default,
                        soft_threshold, solve_weighted_lasso)
from .harness import (CurvePoint, ExperimentGrid, RealDataReport, RunRecord,
                      cell_sample_count, run_assumption_sweep,
                      run_gamma_sensitivity, run_real_data,
                      run_recovery_experiment)
from .metrics import metric_exact_z, metric_exact_z_aligned, metric_jaccard
from .numkit import (EigenDecomposition, SplitMix64, cholesky_solve,
                     gaussian_sample, substream_seed, sym_eig)
from .synthgen import (Dataset, GenerativeConfig, GroundTruth,
                       generate_dataset, make_ground_truth, make_instance,
                       response)
from .zstep import (MiqpResult, OracleConfig, assemble_M,
                    combinatorial_objective, elliptope_sdp_oracle,
                    miqp_brute_force, rank_one_sign_z, sdp_objective,
                    solve_z_step, z_feasibility)

__version__ = "0.1.0"
