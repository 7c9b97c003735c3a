"""Learned multi-stage search-space pruning for maximum clique enumeration."""

from .decomposition import (Coloring, CoreDecomposition, core_numbers, greedy_coloring,
                            omega_oracle_prune)
from .features import (FeatureMatrix, chi_square_scores, edge_chromatic_rule, edge_features,
                       eigencentrality, lcc_all, local_chromatic_density, vertex_features)
from .graph import (EmptyGraphError, Graph, GraphFormatError, edge_density, induced_subgraph,
                    load_graph, write_graph)
from .learn import (Hyperparams, StageModel, TrainingSet, balance, build_training_set,
                    load_model, predict_proba, save_model, train_logistic)
from .pipeline import (PruneReport, StageConfig, evaluate_pruning, generate_corpus, grid_search,
                       multi_stage_prune, multi_stage_train, run_stage)
from .solver import (BudgetExceeded, CliqueSet, brute_force_enumerate, enumerate_max_cliques,
                     is_clique)

__version__ = "0.1.0"
