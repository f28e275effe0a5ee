from ._betas import beta_gradient, beta_similarity_correlation, fit_betas, optimize_betas
from ._fit import fit, fit_similarities
from ._labels import approx_switch_preference, exact_switch_preference, repair_sizes, search_labels, tabu_label_search
from ._oracle import exhaustive_oracle
from .base import NeighborTable, SwitchState

__all__ = [
    'NeighborTable',
    'SwitchState',
    'approx_switch_preference',
    'beta_gradient',
    'beta_similarity_correlation',
    'exact_switch_preference',
    'exhaustive_oracle',
    'fit',
    'fit_betas',
    'fit_similarities',
    'optimize_betas',
    'repair_sizes',
    'search_labels',
    'tabu_label_search',
]
