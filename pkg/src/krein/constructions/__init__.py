"""Explicit constructions: well-mixed spectra, interval selection, porosity,
staged refinement and fat Cantor sets."""

from .cantor import (CantorSpec, CantorTree, ClaimReport, DensityReport, SpecCertificate, SpectralReport,
                     SweepAtom, cantor_build, cantor_shift, certify, claim_6_1_check, classify_lambda_sweep,
                     density_chain, nested_point, sample_points)
from .porosity import (GradedIntervals, PorousResult, T55Result, cantor_points_periodic,
                       middle_thirds_complement, porous_embed, theorem_5_5_check)
from .selection import (Anchor, RefineResult, SelectionCertificate, SelectionError, lemma_4_2_select,
                        lemma_4_3_refine, one_sided_terms)
from .staged import AtomDrift, StagedRun, StageResult, run_stages, theorem_4_1_stage
from .wellmixed import (Example52Result, MixCheck, WellMixedPair, build_interleaved_shift, example_5_2,
                        example_5_2_bound, example_5_2_points, example_5_2_zero_set, interleaved_pair,
                        is_well_mixed)
