from .baselines import kmeans, spectral_clustering
from .criterion import decompose, edge_weight, jcdc_criterion, marginal_criterion, penalized_objective
from .errors import (
    ConfigurationError, DegenerateLaplacian, DimensionMismatch, InitializationFailed, InvalidGraph, OracleTooLarge,
    ParseError, TetherError, VerificationFailed,
)
from .features import SimilaritySet, build_similarities, expand_categorical, generate_features, read_features
from .graph import drop_isolated, generate_dcsbm, read_edge_list
from .harness import emit_heatmap_data, run_grid
from .metrics import check_conditions, g_functional, misclassification_distance, nmi, population_criterion
from .optimizer import exact_switch_preference, exhaustive_oracle, fit, optimize_betas, tabu_label_search
from .policy import BaseInitializer, BaseWeightFunction, FitPolicy, Initializer, WeightFunction
from .types import (
    AscentConfig, BetaSet, BlockModelSpec, ColumnKind, FeatureGenConfig, FeatureTable, FitConfig, FitResult, Graph,
    GridResult, GridSpec, Partition, SbmConfig, Similarity, SpectralConfig, TabuConfig, VerifyConfig,
)
from .verify import run_verification

__all__ = [
    'Graph',
    'Partition',
    'BetaSet',
    'FeatureTable',
    'ColumnKind',
    'Similarity',
    'SimilaritySet',

    'SbmConfig',
    'FeatureGenConfig',
    'FitConfig',
    'TabuConfig',
    'AscentConfig',
    'SpectralConfig',
    'BlockModelSpec',
    'GridSpec',
    'VerifyConfig',
    'FitResult',
    'GridResult',

    'TetherError',
    'ConfigurationError',
    'InvalidGraph',
    'ParseError',
    'DimensionMismatch',
    'DegenerateLaplacian',
    'OracleTooLarge',
    'InitializationFailed',
    'VerificationFailed',

    'FitPolicy',
    'BaseInitializer',
    'Initializer',
    'BaseWeightFunction',
    'WeightFunction',

    'generate_dcsbm',
    'read_edge_list',
    'drop_isolated',
    'generate_features',
    'read_features',
    'expand_categorical',
    'build_similarities',
    'edge_weight',
    'marginal_criterion',
    'jcdc_criterion',
    'decompose',
    'penalized_objective',
    'exact_switch_preference',
    'tabu_label_search',
    'optimize_betas',
    'exhaustive_oracle',
    'fit',
    'spectral_clustering',
    'kmeans',
    'nmi',
    'misclassification_distance',
    'g_functional',
    'population_criterion',
    'check_conditions',
    'run_grid',
    'emit_heatmap_data',
    'run_verification',
]

__version__ = '0.1.0'
