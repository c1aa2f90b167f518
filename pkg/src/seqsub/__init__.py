"""Greedy maximization of sequence-submodular objectives.

A sequence of distinct vertices is scored through the hyperedges it induces
(those whose vertices appear in order), under a monotone submodular utility
of that edge set.
"""
from .errors import (ConfigError, InputError, InvariantError, LogFormatError, OracleSizeError,
                     SeqSubError, UndefinedMetricError, UnknownEdgeError)
from .evaluate import (EvalReport, ExperimentConfig, course_value, ordered_pairs, run_experiment,
                       tau_accuracy)
from .hypergraph import DegreeTable, DirectedHypergraph, Hyperedge, degrees, induced_edges
from .ingest import (Corpus, InteractionLog, ModelTrainer, TrainConfig, TrainedModel, build_model,
                     count_subsequences, extract_user_sequences, read_log, split_folds, train)
from .io import HypergraphFile, load, read_json, write_json
from .oracle import OracleResult, RatioVerdict, brute_force_opt, verify_ratio
from .solvers import (SolveConfig, SolveReport, approx_bound, asymptotic_bound, best_of_both,
                      classical_greedy, frequency_baseline, hyper_sequence_greedy_backward,
                      hyper_sequence_greedy_forward, sequence_greedy_backward,
                      sequence_greedy_forward, solve)
from .utility import CoverageUtility, ModularUtility, UtilityFunction, make_utility

__version__ = "0.1.0"

__all__ = [
    "ConfigError", "InputError", "InvariantError", "LogFormatError", "OracleSizeError",
    "SeqSubError", "UndefinedMetricError", "UnknownEdgeError",
    "EvalReport", "ExperimentConfig", "course_value", "ordered_pairs", "run_experiment",
    "tau_accuracy",
    "DegreeTable", "DirectedHypergraph", "Hyperedge", "degrees", "induced_edges",
    "Corpus", "InteractionLog", "ModelTrainer", "TrainConfig", "TrainedModel", "build_model",
    "count_subsequences", "extract_user_sequences", "read_log", "split_folds", "train",
    "HypergraphFile", "load", "read_json", "write_json",
    "OracleResult", "RatioVerdict", "brute_force_opt", "verify_ratio",
    "SolveConfig", "SolveReport", "approx_bound", "asymptotic_bound", "best_of_both",
    "classical_greedy", "frequency_baseline", "hyper_sequence_greedy_backward",
    "hyper_sequence_greedy_forward", "sequence_greedy_backward", "sequence_greedy_forward",
    "solve",
    "CoverageUtility", "ModularUtility", "UtilityFunction", "make_utility",
]
