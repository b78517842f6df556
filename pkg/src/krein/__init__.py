"""Rank-one perturbations of self-adjoint operators through the Krein spectral shift."""

from .matrix_oracle import (Discrepancy, OracleError, OracleModel, OracleSpectrum, compare_with_formula,
                            measure_to_model, model_to_measure, oracle_spectrum, perturb_spectrum,
                            strictly_interlaced)
from .measures import AtomicMeasure, Atom, IntervalSet, MeasureError, combine, norm, restrict, validate
from .phase_shift import (CriterionResult, MeasurePair, atom_criterion_mu, atom_criterion_nu, compare_shifts,
                          exact_shift_from_measure, exp_K_shift, identity_residual, pair_from_shift,
                          pair_is_valid, pole_coefficients, shift_from_pair, singular_support_test,
                          singularity_region_test)
from .rank_one import (AtomTestConfig, CharFunction, CircleParam, SpectralVerdict, atom_test_nontangential,
                       char_function_eval, circle_to_coupling, clark_member_poisson, clark_member_transform,
                       classify_points, coupling_to_circle, perturbed_atoms, perturbed_cauchy)
from .shifts import PhaseShift, StepFunction
from .transforms import (BoundaryLimitResult, LimitConfig, PvConfig, PvResult, UndecidedError, cauchy,
                         cauchy_of_shift, conj_poisson, hilbert_correction_check, nontangential_limit,
                         poisson, poisson_of_shift, pv_integral, stieltjes_atom, verify_clark_limit)
