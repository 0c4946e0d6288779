"""Conditional probability on orthospaces.

Event algebras (finite Boolean and finite-dimensional quantum), states,
compression conditioning, statistical predictability, compatibility,
interference decompositions, a deterministic chain sampler, a randomized
axiom checker, and a JSON scenario layer with a command line front end.
"""

from .errors import (AlgebraMismatch, DegenerateDenominator, DimensionMismatch,
                     EmptyChain, EmptyInput, ImpossibleSequence, NotAtom,
                     NonUniqueConditioningWarning, NotOrthogonal,
                     NotPredictable, OrthoprobError, ParseError,
                     ValidationError, ZeroEvent, ZeroProbabilityCondition)
from .events import (AxiomReport, BooleanAlgebra, BooleanEvent, Event,
                     EventAlgebra, QuantumAlgebra, QuantumEvent, SampleSpace,
                     below, complement, events_equal, is_atom, oplus,
                     orthogonal, verify_orthospace_axioms)
from .interference import (InterferenceReport, interference_decomposition,
                           two_slit)
from .linalg import (HermitianOperator, Projection, StateVector,
                     jordan_product, projector_from_span, quadratic_triple,
                     triple_product)
from .presets import half_transition_pair, order_dependence_example
from .sampler import (ChainResult, SamplerConfig, StateIndependenceReport,
                      sample_chain, state_independence_check)
from .scenario import (Scenario, parse_scenario, run_query,
                       scenario_from_jsonable, scenario_to_jsonable,
                       serialize_scenario)
from .states import (ClassicalState, DensityState, PredictabilityResult,
                     QubitNonUniquenessReport, State, TableState, atom_state,
                     atom_symmetry_check, compatibility_residuals, compatible,
                     condition, condition_seq, conditioning_contract_violations,
                     is_dispersion_free, predictability, predictability_seq,
                     prob, qubit_nonuniqueness_demo, rank_one_transition)

__version__ = "0.1.0"

__all__ = [
    "AlgebraMismatch", "AxiomReport", "BooleanAlgebra", "BooleanEvent",
    "ChainResult", "ClassicalState", "DegenerateDenominator", "DensityState",
    "DimensionMismatch", "EmptyChain", "EmptyInput", "Event", "EventAlgebra",
    "HermitianOperator", "ImpossibleSequence", "InterferenceReport",
    "NonUniqueConditioningWarning", "NotAtom", "NotOrthogonal",
    "NotPredictable", "OrthoprobError", "ParseError", "PredictabilityResult",
    "Projection", "QuantumAlgebra", "QuantumEvent", "QubitNonUniquenessReport",
    "SampleSpace", "SamplerConfig", "Scenario", "State",
    "StateIndependenceReport", "StateVector", "TableState", "ValidationError",
    "ZeroEvent", "ZeroProbabilityCondition", "atom_state",
    "atom_symmetry_check", "below", "compatibility_residuals", "compatible",
    "complement", "condition", "condition_seq",
    "conditioning_contract_violations", "events_equal",
    "half_transition_pair", "interference_decomposition", "is_atom",
    "is_dispersion_free", "jordan_product", "oplus",
    "order_dependence_example", "orthogonal", "parse_scenario",
    "predictability", "predictability_seq", "prob", "projector_from_span",
    "quadratic_triple", "qubit_nonuniqueness_demo", "rank_one_transition",
    "run_query", "sample_chain", "scenario_from_jsonable",
    "scenario_to_jsonable", "serialize_scenario", "state_independence_check",
    "triple_product", "two_slit", "verify_orthospace_axioms",
]
