"""Statistically efficient covariate-adjustment sets in causal graphs."""

from .adjustment import (ForbiddenProjection, NotAmenableError, amenable,
                         adjustment_set_exists, canonical_adjustment_set,
                         causal_nodes, forbidden_projection, forbidden_set,
                         is_valid_adjustment_set, latent_projection, o_set,
                         o_star_set, reduce_outcomes)
from .fixtures import FIXTURE_NAMES, Fixture, get_fixture
from .graph import (ADMG, BIDIRECTED, CPDAG, DAG, DIRECTED, MAXPDAG,
                    UNDIRECTED, Graph, GraphError, Path, ancestors, children,
                    descendants, is_definite_status, is_possibly_causal,
                    parents, possible_ancestors, possible_descendants,
                    siblings, topological_order)
from .graphio import (ParseError, format_graph, load_graph, parse_graph,
                      read_dataset_csv, save_graph, write_dataset_csv)
from .ida import (ZERO, EffectMultiset, IdaEntry, optimal_ida,
                  population_ida, possible_o_sets, semi_local_ida)
from .meek import (close_under_meek, consistent_extension, construct_max_pdag,
                   dag_in_class, dag_to_cpdag, enumerate_class_dags,
                   v_structures)
from .scm import (CovarianceMatrix, Dataset, LinearScm, RankError,
                  derived_seed, implied_covariance, ols_adjusted,
                  partial_variance, population_avar, random_dag, random_scm,
                  simulate, true_total_effect)
from .separation import connecting_path, is_blocked, separated
from .simharness import (DensityRow, RmseRecord, RmseSummary, ScenarioConfig,
                         ScenarioDraw, density_experiment,
                         draw_scenario_graph, run_rmse_scenario)
from .varselect import (IndependenceOracle, alpha_for_criterion,
                        backward_select, backward_select_with_trace,
                        oracle_backward_select, partial_correlation)

__version__ = "0.1.0"
