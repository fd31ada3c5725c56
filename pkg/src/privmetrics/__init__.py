"""Privacy measured as an attacker's estimation error.

The package models a privacy mechanism as a prior, a channel and loss
functions, scores it by the optimal attacker's expected loss, and derives
the familiar disclosure metrics (entropy family, k-anonymity, l-diversity,
t-closeness, delta-disclosure, mutual-information risk, max-log-ratio
epsilon) from that single quantity.  A Blahut-Arimoto solver traces the
privacy-utility frontier, and two scenario engines (anonymous forwarding,
location grids) exercise the whole pipeline.
"""

from ._kernels import backend as kernel_backend
from .bayes import (LossMatrix, PrivacyReduction, PrivacyReport, Scenario,
                    bayes_estimate, conditional_privacy,
                    delta_conditional_privacy, map_estimate,
                    min_entropy_identity, privacy_report)
from .errors import (ConvergenceError, InvalidArgumentError, PrivmetricsError,
                     ResourceLimitError, UnobservableEvidenceError)
from .information import (TypicalSet, entropy_ordering,
                          jointly_typical_fraction, kl_divergence,
                          mutual_information, pinsker_bound, renyi_entropy,
                          total_variation, typical_set)
from .microdata import (EquivalenceClass, MicrodataTable, SdcReport,
                        delta_disclosure, empirical_prior,
                        epsilon_max_log_ratio, induced_joint, k_anonymity,
                        l_diversity, partition, privacy_risk, sdc_report,
                        t_closeness, table_from_csv)
from .probability import (Alphabet, Channel, JointPmf, Pmf, compose,
                          joint_from, make_uniform, marginals, posterior)
from .scenarios import (CrowdsConfig, LbsGrid, crowds_posterior,
                        crowds_privacy, crowds_simulate,
                        gaussian_noise_channel, grid_alphabet, lbs_privacy,
                        make_grid, posterior_z_scores)
from .tradeoff import (FrontierPoint, TradeoffCurve, binary_example,
                       blahut_arimoto, frontier, grid_search_oracle)

__version__ = "0.1.0"

__all__ = [
    "Alphabet", "Channel", "ConvergenceError", "CrowdsConfig",
    "EquivalenceClass", "FrontierPoint", "InvalidArgumentError", "JointPmf",
    "LbsGrid", "LossMatrix", "MicrodataTable", "Pmf", "PrivacyReduction",
    "PrivacyReport", "PrivmetricsError", "ResourceLimitError", "Scenario",
    "SdcReport", "TradeoffCurve", "TypicalSet", "UnobservableEvidenceError",
    "bayes_estimate", "binary_example", "blahut_arimoto", "compose",
    "conditional_privacy", "crowds_posterior", "crowds_privacy",
    "crowds_simulate", "delta_conditional_privacy", "delta_disclosure",
    "empirical_prior", "entropy_ordering", "epsilon_max_log_ratio",
    "frontier", "gaussian_noise_channel", "grid_alphabet",
    "grid_search_oracle", "induced_joint", "joint_from",
    "jointly_typical_fraction", "k_anonymity", "kernel_backend",
    "kl_divergence", "l_diversity", "lbs_privacy", "make_grid",
    "make_uniform", "map_estimate", "marginals", "min_entropy_identity",
    "mutual_information", "partition", "pinsker_bound", "posterior",
    "posterior_z_scores",
    "privacy_report", "privacy_risk", "renyi_entropy", "sdc_report",
    "t_closeness", "table_from_csv", "total_variation", "typical_set",
]
