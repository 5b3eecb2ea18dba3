"""Monte-Carlo campaign driver: sweeps, deterministic seeding, CSV export.

A campaign walks the sweep grid (density x CoMP configuration x BSS pattern
x CoMP threshold x fairness x rate threshold), reusing each realization's
user drop and channel gains across the whole grid.  Substreams are derived
from the master seed with counter-based spawn keys, so results do not depend
on execution order and identical (config, seed) pairs reproduce the output
byte for byte.
"""

from __future__ import annotations

import csv
import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np
import yaml

from . import __version__
from .bss import (default_pattern_list, evaluate_pattern, heuristic_select,
                  patterns_from_file, realization_stats, validate_pattern_list)
from .channel import ChannelParams, McsTable, build_gain_matrix, received_power_w
from .clusters import resolve_comp_config
from .geometry import LayoutConfig, build_layout, drop_users
from .metrics import aggregate
from .scheduler import (DEFAULT_GAMMA_D_RANGE_DB, SchedulerParams, build_system_model,
                        center_cluster_users)


class ConfigError(ValueError):
    """Invalid campaign configuration (CLI exit code 1)."""


@dataclass
class CampaignConfig:
    """Sweep axes, realization counts, and output settings."""

    densities_per_km2: list = field(default_factory=lambda: [60.0])
    n_drops: int = 500
    n_fading: int = 50
    alphas: list = field(default_factory=lambda: [1.0])
    gamma_ds_db: list = field(default_factory=lambda: [-1.0])
    rate_thresholds_bps: list = field(default_factory=lambda: [0.2e6])
    comp_configs: list = field(default_factory=lambda: ["C3"])
    pattern_file: str | None = None
    master_seed: int = 1
    gamma_d_range_db: tuple = DEFAULT_GAMMA_D_RANGE_DB
    inter_site_distance_m: float = 500.0
    mcs_file: str | None = None
    traffic_profile: list | None = None
    output: str = "results/campaign.csv"
    format: str = "csv"

    def __post_init__(self):
        for name in ("densities_per_km2", "alphas", "gamma_ds_db",
                     "rate_thresholds_bps", "comp_configs"):
            if not getattr(self, name):
                raise ConfigError(f"sweep list {name} must be non-empty")
        if self.n_drops < 1 or self.n_fading < 1:
            raise ConfigError("n_drops and n_fading must be >= 1")
        if self.format not in ("csv", "json"):
            raise ConfigError(f"unknown output format {self.format!r}")
        lo, hi = self.gamma_d_range_db
        for g in self.gamma_ds_db:
            if not lo <= g <= hi:
                raise ConfigError(
                    f"gamma_d_db={g} outside the permitted range [{lo}, {hi}]")

    @classmethod
    def from_dict(cls, raw: dict, source: str = "<config>") -> "CampaignConfig":
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(raw) - known
        if unknown:
            raise ConfigError(f"{source}: unknown config keys {sorted(unknown)}")
        try:
            cfg = cls(**raw)
        except TypeError as exc:
            raise ConfigError(f"{source}: {exc}") from exc
        if isinstance(cfg.gamma_d_range_db, list):
            cfg.gamma_d_range_db = tuple(cfg.gamma_d_range_db)
        return cfg

    @classmethod
    def from_file(cls, path) -> "CampaignConfig":
        try:
            with open(path) as f:
                raw = yaml.safe_load(f) or {}
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        except yaml.YAMLError as exc:
            raise ConfigError(f"{path}: malformed config: {exc}") from exc
        if not isinstance(raw, dict):
            raise ConfigError(f"{path}: expected a mapping of config keys")
        return cls.from_dict(raw, source=str(path))


RESULT_COLUMNS = (
    "config", "pattern", "bs_off", "mu_per_km2", "gamma_d_db", "alpha",
    "rate_threshold_bps", "n_realizations",
    "t_alpha_mean_bps", "t_alpha_std_bps", "t_alpha_ci95_bps",
    "sinr_coverage_mean", "sinr_coverage_std", "sinr_coverage_ci95",
    "rate_coverage_mean", "rate_coverage_std", "rate_coverage_ci95",
    "theta_mean", "theta_std", "theta_ci95",
    "energy_saving_pct", "n_users_mean", "n_outage_mean",
)

TRAFFIC_COLUMNS = ("t", "mu_per_km2", "pattern", "bs_off", "a1", "energy_pct",
                   "t_alpha_bps", "min_rate_bps", "feasible")


def _seed_key(master_seed: int, *key) -> np.random.SeedSequence:
    return np.random.SeedSequence(master_seed, spawn_key=tuple(int(k) for k in key))


def _mu_key(mu: float) -> int:
    return int(round(mu * 1000.0))


@dataclass(eq=False)
class _Context:
    """Derived immutable campaign state, rebuilt once per worker process."""

    cfg: CampaignConfig
    layout: object
    params: ChannelParams
    mcs: McsTable
    patterns: list
    models: dict            # config name -> (SystemModel, multi_vc_ids)
    center_sector_idx: np.ndarray
    cluster_bs_idx: np.ndarray


def build_context(cfg: CampaignConfig) -> _Context:
    layout = build_layout(LayoutConfig(inter_site_distance_m=cfg.inter_site_distance_m))
    params = ChannelParams()
    mcs = McsTable.from_csv(cfg.mcs_file) if cfg.mcs_file else McsTable.default()
    if cfg.pattern_file:
        patterns = patterns_from_file(cfg.pattern_file)
    else:
        patterns = default_pattern_list()
    validate_pattern_list(patterns)
    models = {}
    for choice in cfg.comp_configs:
        comp = resolve_comp_config(str(choice), layout)
        model = build_system_model(layout, comp, params.noise_w, mcs,
                                   params.rate_per_bits_symbol)
        models[str(choice)] = (model, model.multi_vc_ids)
    center_sector_idx = layout.center_cluster_sector_ids - 1
    cluster_bs_idx = layout.center_cluster_bs_ids - 1
    return _Context(cfg=cfg, layout=layout, params=params, mcs=mcs,
                    patterns=patterns, models=models,
                    center_sector_idx=center_sector_idx,
                    cluster_bs_idx=cluster_bs_idx)


def _drop_records(ctx: _Context, mu: float, d: int):
    """All (combo key -> RealizationStats) records of one user drop.

    Returns (records, n_skipped); records are ordered by fading index first,
    then the sweep grid, which keeps aggregation order deterministic.
    """
    cfg = ctx.cfg
    drop = drop_users(ctx.layout, mu, _seed_key(cfg.master_seed, 0, _mu_key(mu), d))
    records = []
    skipped = 0
    if drop.is_empty:
        return records, cfg.n_fading
    for f_idx in range(cfg.n_fading):
        gains = build_gain_matrix(
            ctx.layout, drop, ctx.params,
            _seed_key(cfg.master_seed, 1, _mu_key(mu), d, f_idx))
        rx_w = received_power_w(gains, ctx.params)
        first_model = next(iter(ctx.models.values()))[0]
        vq = center_cluster_users(first_model, rx_w, ctx.center_sector_idx)
        if not vq.any():
            skipped += 1
            continue
        for config_name, (model, multi_ids) in ctx.models.items():
            for pattern in ctx.patterns:
                for gamma_d in cfg.gamma_ds_db:
                    for alpha in cfg.alphas:
                        params = SchedulerParams(
                            alpha=alpha, gamma_d_db=gamma_d,
                            gamma_d_range_db=tuple(cfg.gamma_d_range_db))
                        ev = evaluate_pattern(model, rx_w, vq, ctx.cluster_bs_idx,
                                              pattern, params,
                                              rate_threshold_bps=0.0)
                        for r_thr in cfg.rate_thresholds_bps:
                            key = (config_name, pattern.label,
                                   "+".join(map(str, pattern.off_bs_ids)),
                                   mu, gamma_d, alpha, r_thr)
                            records.append((key, realization_stats(
                                ev, vq, multi_ids, r_thr, alpha)))
    return records, skipped


def _worker(args):
    cfg_json, mu, d = args
    ctx = _worker_cache.get(cfg_json)
    if ctx is None:
        ctx = build_context(CampaignConfig.from_dict(json.loads(cfg_json)))
        _worker_cache[cfg_json] = ctx
    return _drop_records(ctx, mu, d)


_worker_cache: dict = {}


@dataclass(eq=False)
class CampaignResult:
    rows: list          # list of dicts, one per sweep point
    manifest: dict


def run_campaign(cfg: CampaignConfig, jobs: int = 1) -> CampaignResult:
    """Run the full sweep and aggregate per-realization metrics.

    Workers process whole user drops; the fold into summaries is serialized
    and ordered, so the result is independent of the worker count.
    """
    ctx = build_context(cfg)
    tasks = [(mu, d) for mu in cfg.densities_per_km2 for d in range(cfg.n_drops)]
    per_combo: dict[tuple, list] = {}
    n_skipped = 0
    if jobs > 1:
        cfg_json = json.dumps(asdict(cfg), sort_keys=True)
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_worker, [(cfg_json, mu, d) for mu, d in tasks]))
    else:
        results = [_drop_records(ctx, mu, d) for mu, d in tasks]
    for records, skipped in results:
        n_skipped += skipped
        for key, stats in records:
            per_combo.setdefault(key, []).append(stats)

    rows = []
    for key in _combo_order(ctx):
        stats = per_combo.get(key)
        if not stats:
            continue
        summ = aggregate(stats)
        config_name, label, bs_off, mu, gamma_d, alpha, r_thr = key
        rows.append({
            "config": config_name, "pattern": label, "bs_off": bs_off,
            "mu_per_km2": mu, "gamma_d_db": gamma_d, "alpha": alpha,
            "rate_threshold_bps": r_thr, "n_realizations": summ["t_alpha_bps"].n,
            "t_alpha_mean_bps": summ["t_alpha_bps"].mean,
            "t_alpha_std_bps": summ["t_alpha_bps"].std,
            "t_alpha_ci95_bps": summ["t_alpha_bps"].ci95,
            "sinr_coverage_mean": summ["sinr_coverage"].mean,
            "sinr_coverage_std": summ["sinr_coverage"].std,
            "sinr_coverage_ci95": summ["sinr_coverage"].ci95,
            "rate_coverage_mean": summ["rate_coverage"].mean,
            "rate_coverage_std": summ["rate_coverage"].std,
            "rate_coverage_ci95": summ["rate_coverage"].ci95,
            "theta_mean": summ["theta_mean"].mean,
            "theta_std": summ["theta_mean"].std,
            "theta_ci95": summ["theta_mean"].ci95,
            "energy_saving_pct": summ["energy_saving_pct"].mean,
            "n_users_mean": summ["n_users"].mean,
            "n_outage_mean": summ["n_outage"].mean,
        })
    manifest = {
        "config": asdict(cfg),
        "master_seed": cfg.master_seed,
        "versions": {"compbss": __version__, "numpy": np.__version__},
        "n_rows": len(rows),
        "n_realizations_skipped": n_skipped,
    }
    return CampaignResult(rows=rows, manifest=manifest)


def _combo_order(ctx: _Context):
    cfg = ctx.cfg
    for config_name in ctx.models:
        for pattern in ctx.patterns:
            for mu in cfg.densities_per_km2:
                for gamma_d in cfg.gamma_ds_db:
                    for alpha in cfg.alphas:
                        for r_thr in cfg.rate_thresholds_bps:
                            yield (config_name, pattern.label,
                                   "+".join(map(str, pattern.off_bs_ids)),
                                   mu, gamma_d, alpha, r_thr)


def run_traffic_profile(cfg: CampaignConfig) -> CampaignResult:
    """Per-time-step heuristic selection over a density profile (fig11)."""
    if not cfg.traffic_profile:
        raise ConfigError("traffic_profile is required for the fig11 campaign")
    ctx = build_context(cfg)
    alpha = cfg.alphas[0]
    gamma_d = cfg.gamma_ds_db[0]
    r_thr = cfg.rate_thresholds_bps[0]
    params = SchedulerParams(alpha=alpha, gamma_d_db=gamma_d,
                             gamma_d_range_db=tuple(cfg.gamma_d_range_db))
    config_name = str(cfg.comp_configs[0])
    model, multi_ids = ctx.models[config_name]
    rows = []
    for t, mu in enumerate(cfg.traffic_profile):
        drop = drop_users(ctx.layout, float(mu),
                          _seed_key(cfg.master_seed, 2, _mu_key(float(mu)), t))
        if drop.is_empty:
            continue
        gains = build_gain_matrix(ctx.layout, drop, ctx.params,
                                  _seed_key(cfg.master_seed, 3, _mu_key(float(mu)), t))
        rx_w = received_power_w(gains, ctx.params)
        vq = center_cluster_users(model, rx_w, ctx.center_sector_idx)
        if not vq.any():
            continue
        res = heuristic_select(model, rx_w, vq, ctx.cluster_bs_idx, ctx.patterns,
                               params, r_thr)
        stats = realization_stats(res, vq, multi_ids, r_thr, alpha)
        rows.append({
            "t": t, "mu_per_km2": float(mu), "pattern": res.pattern.label,
            "bs_off": "+".join(map(str, res.pattern.off_bs_ids)),
            "a1": res.pattern.a1, "energy_pct": res.pattern.energy_saving_pct,
            "t_alpha_bps": stats.t_alpha_bps, "min_rate_bps": res.min_rate_bps,
            "feasible": int(res.feasible),
        })
    manifest = {
        "config": asdict(cfg),
        "master_seed": cfg.master_seed,
        "versions": {"compbss": __version__, "numpy": np.__version__},
        "n_rows": len(rows),
        "mode": "traffic_profile",
    }
    return CampaignResult(rows=rows, manifest=manifest)


FIGURE_LAYOUTS = {
    "fig4": ("gamma_d_db", "alpha", "theta_star_mean"),
    "fig5": ("gamma_d_db", "pattern", "config", "t_alpha_bps"),
    "fig6": ("config", "pattern", "coverage", "t_alpha_bps", "energy_pct"),
    "fig7": ("config", "pattern", "coverage", "t_alpha_bps", "energy_pct"),
    "fig8": ("config", "pattern", "coverage", "t_alpha_bps", "energy_pct"),
    "fig9": ("rate_threshold_bps", "pattern", "rate_coverage"),
    "fig10": ("rate_threshold_bps", "alpha", "rate_coverage"),
    "fig11": ("t", "a1", "energy_pct", "t_alpha_bps"),
}

_FIGURE_SOURCES = {
    "theta_star_mean": "theta_mean",
    "t_alpha_bps": "t_alpha_mean_bps",
    "coverage": "sinr_coverage_mean",
    "rate_coverage": "rate_coverage_mean",
    "energy_pct": "energy_saving_pct",
}


class MissingAxisError(ValueError):
    """A figure request lacks a required sweep axis."""


def emit_figure_data(rows: list, figure: str):
    """Project campaign rows onto one figure's column layout.

    Collapsed sweep axes must be constant-valued; otherwise the request is
    ambiguous and an error names the offending axis.
    """
    if figure not in FIGURE_LAYOUTS:
        raise MissingAxisError(
            f"unknown figure tag {figure!r} (expected {sorted(FIGURE_LAYOUTS)})")
    columns = FIGURE_LAYOUTS[figure]
    if figure == "fig11":
        if not rows or "t" not in rows[0]:
            raise MissingAxisError(
                "figure fig11 requires axis 't' (run the traffic-profile campaign)")
        return columns, [{c: r[c] for c in columns} for r in rows]
    if not rows:
        raise MissingAxisError(f"figure {figure} has no input rows")
    for c in columns:
        src = _FIGURE_SOURCES.get(c, c)
        if src not in rows[0]:
            raise MissingAxisError(f"figure {figure} requires axis {src!r}")
    if figure == "fig4" and len({r["pattern"] for r in rows}) > 1:
        # the joint-transmission share is a benchmark (all-on) quantity
        rows = [r for r in rows if r["energy_saving_pct"] == 0.0]
        if not rows:
            raise MissingAxisError(
                "figure fig4 requires the all-on pattern in the results")

    key_cols = [c for c in columns if c not in _FIGURE_SOURCES]
    seen: dict[tuple, dict] = {}
    for r in rows:
        key = tuple(r[_FIGURE_SOURCES.get(c, c)] for c in key_cols)
        rec = {c: r[_FIGURE_SOURCES.get(c, c)] for c in columns}
        if key in seen:
            for c in columns:
                if seen[key][c] != rec[c]:
                    collapsed = [ax for ax in ("config", "pattern", "mu_per_km2",
                                               "gamma_d_db", "alpha",
                                               "rate_threshold_bps")
                                 if ax not in key_cols]
                    raise MissingAxisError(
                        f"figure {figure} is ambiguous: rows differ in {c!r} for the "
                        f"same {key_cols}; restrict the collapsed axes {collapsed}")
        else:
            seen[key] = rec
    return columns, list(seen.values())


def _fmt(value) -> str:
    if isinstance(value, float):
        return f"{value:.12g}"
    return str(value)


def write_rows_csv(rows: list, columns, path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(columns)
        for r in rows:
            w.writerow([_fmt(r[c]) for c in columns])


def write_rows_json(rows: list, path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as f:
        json.dump(rows, f, indent=2, sort_keys=True)
        f.write("\n")


def write_manifest(manifest: dict, path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as f:
        json.dump(manifest, f, indent=2, sort_keys=True)
        f.write("\n")
