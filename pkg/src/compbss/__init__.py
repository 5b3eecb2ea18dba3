"""Downlink cellular simulator for base-station switching with CoMP.

Builds the 49-site wraparound network, computes SINRs and link rates,
applies the closed-form alpha-fair scheduler to CoMP virtual clusters,
selects sleep patterns under a rate constraint, and drives Monte-Carlo
trade-off campaigns.
"""

__version__ = "0.1.0"

from .bss import (BssPattern, HeuristicResult, all_patterns, default_pattern_list,
                  evaluate_pattern, exhaustive_oracle, heuristic_select)
from .channel import (ChannelParams, GainMatrix, McsTable, build_gain_matrix,
                      channel_gain, directivity_gain_db, link_rate_bps,
                      mcs_efficiency, path_loss_db, per_subchannel_power_w,
                      received_power_w, sinr_comp, sinr_matrix, sinr_single)
from .clusters import CompConfiguration, comp_config_from_file, preset, resolve_comp_config
from .geometry import (LayoutConfig, NetworkLayout, UserDrop, build_layout, drop_users,
                       export_positions_csv, layout_from_file, user_sector_geometry)
from .metrics import (RealizationStats, aggregate, alpha_fair_throughput,
                      rate_coverage, sinr_coverage, summarize)
from .scheduler import (SchedulerParams, SchedulingSolution, SystemModel,
                        alpha_fair_utility, associate_max_sinr, build_system_model,
                        center_cluster_users, classify_comp, optimal_comp_share,
                        optimal_time_fractions, schedule)

__all__ = [
    "BssPattern", "ChannelParams", "CompConfiguration", "GainMatrix",
    "HeuristicResult", "LayoutConfig", "McsTable", "NetworkLayout",
    "RealizationStats", "SchedulerParams", "SchedulingSolution", "SystemModel",
    "UserDrop", "aggregate", "all_patterns", "alpha_fair_throughput",
    "alpha_fair_utility", "associate_max_sinr", "build_gain_matrix",
    "build_layout", "build_system_model", "center_cluster_users", "channel_gain",
    "classify_comp", "comp_config_from_file", "default_pattern_list",
    "directivity_gain_db", "drop_users", "evaluate_pattern", "exhaustive_oracle",
    "export_positions_csv", "heuristic_select", "layout_from_file",
    "link_rate_bps", "mcs_efficiency", "optimal_comp_share",
    "optimal_time_fractions", "path_loss_db", "per_subchannel_power_w", "preset",
    "rate_coverage", "received_power_w", "resolve_comp_config", "schedule",
    "sinr_comp", "sinr_coverage", "sinr_matrix", "sinr_single", "summarize",
    "user_sector_geometry",
]
