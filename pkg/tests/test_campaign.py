import hashlib
import json

import pytest

from compbss.campaign import (CampaignConfig, ConfigError, MissingAxisError,
                              RESULT_COLUMNS, TRAFFIC_COLUMNS, emit_figure_data,
                              run_campaign, run_traffic_profile, write_rows_csv)
from compbss.cli import main as cli_main


def tiny_config(**kw):
    base = dict(
        densities_per_km2=[60.0], n_drops=2, n_fading=1, alphas=[1.0],
        gamma_ds_db=[-1.0], rate_thresholds_bps=[2e5], comp_configs=["C3"],
        master_seed=11, output="unused.csv",
    )
    base.update(kw)
    return CampaignConfig(**base)


class TestConfig:
    def test_rejects_unknown_keys(self):
        with pytest.raises(ConfigError, match="bogus"):
            CampaignConfig.from_dict({"bogus": 1}, source="test.yaml")

    def test_rejects_empty_sweeps(self):
        with pytest.raises(ConfigError):
            tiny_config(alphas=[])

    def test_rejects_bad_counts(self):
        with pytest.raises(ConfigError):
            tiny_config(n_drops=0)

    def test_rejects_gamma_outside_range(self):
        with pytest.raises(ConfigError, match="gamma_d"):
            tiny_config(gamma_ds_db=[50.0])
        tiny_config(gamma_ds_db=[50.0], gamma_d_range_db=(-10, 60))

    def test_from_file(self, tmp_path):
        p = tmp_path / "c.yaml"
        p.write_text("n_drops: 3\nn_fading: 2\ncomp_configs: [C1]\n")
        cfg = CampaignConfig.from_file(p)
        assert cfg.n_drops == 3 and cfg.comp_configs == ["C1"]

    def test_from_file_names_unknown_key_location(self, tmp_path):
        p = tmp_path / "c.yaml"
        p.write_text("no_such_key: 3\n")
        with pytest.raises(ConfigError, match="c.yaml"):
            CampaignConfig.from_file(p)


class TestRun:
    def test_realization_count(self):
        res = run_campaign(tiny_config(n_drops=2, n_fading=1,
                                       densities_per_km2=[20.0]))
        assert all(r["n_realizations"] == 2 for r in res.rows)

    def test_row_grid_size(self):
        res = run_campaign(tiny_config(alphas=[1.0, 2.0], gamma_ds_db=[-2.0, 0.0]))
        # 5 default patterns x 2 alphas x 2 gammas x 1 R x 1 config x 1 mu
        assert len(res.rows) == 20
        assert set(res.rows[0]) == set(RESULT_COLUMNS)

    def test_deterministic_csv(self, tmp_path):
        hashes = []
        for run in range(2):
            res = run_campaign(tiny_config())
            path = tmp_path / f"out{run}.csv"
            write_rows_csv(res.rows, RESULT_COLUMNS, path)
            hashes.append(hashlib.sha256(path.read_bytes()).hexdigest())
        assert hashes[0] == hashes[1]

    def test_seed_changes_output(self):
        r1 = run_campaign(tiny_config(master_seed=1))
        r2 = run_campaign(tiny_config(master_seed=2))
        assert r1.rows[0]["t_alpha_mean_bps"] != r2.rows[0]["t_alpha_mean_bps"]

    def test_sweep_point_independence(self):
        full = run_campaign(tiny_config(gamma_ds_db=[-4.0, 0.0]))
        part = run_campaign(tiny_config(gamma_ds_db=[-4.0]))
        full_at = {(r["pattern"], r["gamma_d_db"]): r for r in full.rows}
        for r in part.rows:
            ref = full_at[(r["pattern"], r["gamma_d_db"])]
            assert r == ref

    def test_parallel_matches_serial(self):
        cfg = tiny_config(n_drops=3)
        serial = run_campaign(cfg, jobs=1)
        parallel = run_campaign(cfg, jobs=2)
        assert serial.rows == parallel.rows

    def test_manifest_contents(self):
        res = run_campaign(tiny_config())
        assert res.manifest["master_seed"] == 11
        assert "compbss" in res.manifest["versions"]
        assert res.manifest["n_rows"] == len(res.rows)

    def test_theta_trend_visible_in_sweep_output(self):
        """Desk-scale rerun of the share-vs-threshold sweep keeps the trend."""
        cfg = tiny_config(n_drops=10, comp_configs=["C1"],
                          gamma_ds_db=[-4.0, 0.0, 4.0])
        rows = [r for r in run_campaign(cfg).rows if r["pattern"] == "Z0/7"]
        thetas = [r["theta_mean"] for r in sorted(rows, key=lambda r: r["gamma_d_db"])]
        assert thetas == sorted(thetas)


class TestTraffic:
    def test_profile_rows(self):
        cfg = tiny_config(traffic_profile=[20.0, 120.0])
        res = run_traffic_profile(cfg)
        assert [r["t"] for r in res.rows] == [0, 1]
        assert set(res.rows[0]) == set(TRAFFIC_COLUMNS)
        # heuristic sleeps more at low load
        assert res.rows[0]["a1"] >= res.rows[1]["a1"]

    def test_requires_profile(self):
        with pytest.raises(ConfigError):
            run_traffic_profile(tiny_config())


@pytest.fixture(scope="module")
def sweep_rows():
    cfg = tiny_config(alphas=[1.0, 2.0], gamma_ds_db=[-2.0, 0.0],
                      rate_thresholds_bps=[1e5, 5e5],
                      comp_configs=["none", "C3"])
    return run_campaign(cfg).rows


class TestFigures:
    def test_fig4_layout(self, sweep_rows):
        rows = [r for r in sweep_rows if r["config"] == "C3"]
        cols, data = emit_figure_data(rows, "fig4")
        assert cols == ("gamma_d_db", "alpha", "theta_star_mean")
        assert len(data) == 4  # 2 gammas x 2 alphas

    def test_fig5_layout(self, sweep_rows):
        rows = [r for r in sweep_rows if r["alpha"] == 1.0]
        cols, data = emit_figure_data(rows, "fig5")
        assert cols == ("gamma_d_db", "pattern", "config", "t_alpha_bps")
        assert len(data) == 2 * 5 * 2

    def test_fig8_layout(self, sweep_rows):
        rows = [r for r in sweep_rows
                if r["alpha"] == 1.0 and r["gamma_d_db"] == 0.0]
        cols, data = emit_figure_data(rows, "fig8")
        assert cols == ("config", "pattern", "coverage", "t_alpha_bps", "energy_pct")
        assert {d["config"] for d in data} == {"none", "C3"}

    def test_fig9_layout(self, sweep_rows):
        rows = [r for r in sweep_rows
                if r["alpha"] == 1.0 and r["gamma_d_db"] == 0.0
                and r["config"] == "C3"]
        cols, data = emit_figure_data(rows, "fig9")
        assert cols == ("rate_threshold_bps", "pattern", "rate_coverage")
        assert len(data) == 2 * 5

    def test_fig10_requires_single_pattern(self, sweep_rows):
        rows = [r for r in sweep_rows
                if r["gamma_d_db"] == 0.0 and r["config"] == "C3"]
        with pytest.raises(MissingAxisError, match="ambiguous"):
            emit_figure_data(rows, "fig10")
        one = [r for r in rows if r["pattern"] == "Z2/7"]
        cols, data = emit_figure_data(one, "fig10")
        assert cols == ("rate_threshold_bps", "alpha", "rate_coverage")
        assert len(data) == 2 * 2

    def test_fig11_requires_traffic_rows(self, sweep_rows):
        with pytest.raises(MissingAxisError, match="t"):
            emit_figure_data(sweep_rows, "fig11")

    def test_unknown_figure(self, sweep_rows):
        with pytest.raises(MissingAxisError):
            emit_figure_data(sweep_rows, "fig99")


class TestCli:
    def test_end_to_end_csv_and_manifest(self, tmp_path):
        out = tmp_path / "res.csv"
        rc = cli_main(["--drops", "1", "--fading", "1", "--seed", "3",
                       "--out", str(out), "--comp", "C3"])
        assert rc == 0
        assert out.exists()
        manifest = json.loads((tmp_path / "res_manifest.json").read_text())
        assert manifest["master_seed"] == 3

    def test_reproducible_output_bytes(self, tmp_path):
        outs = []
        for name in ("a.csv", "b.csv"):
            out = tmp_path / name
            rc = cli_main(["--drops", "1", "--fading", "1", "--seed", "9",
                           "--out", str(out)])
            assert rc == 0
            outs.append(out.read_bytes())
        assert outs[0] == outs[1]

    def test_missing_config_is_exit_1(self, tmp_path):
        assert cli_main(["--config", str(tmp_path / "nope.yaml")]) == 1

    def test_bad_key_is_exit_1(self, tmp_path):
        p = tmp_path / "c.yaml"
        p.write_text("whatever: 2\n")
        assert cli_main(["--config", str(p)]) == 1

    def test_unwritable_output_is_exit_1(self):
        assert cli_main(["--drops", "1", "--fading", "1",
                         "--out", "/proc/nope/x.csv"]) == 1

    def test_figure_flag_writes_companion_csv(self, tmp_path):
        cfgp = tmp_path / "c.yaml"
        cfgp.write_text(
            "n_drops: 1\nn_fading: 1\nalphas: [1]\ngamma_ds_db: [-2, 0]\n"
            f"comp_configs: [C1]\noutput: {tmp_path / 'f.csv'}\nmaster_seed: 2\n")
        rc = cli_main(["--config", str(cfgp), "--figure", "fig4"])
        assert rc == 0
        fig = (tmp_path / "f_fig4.csv").read_text().splitlines()
        assert fig[0] == "gamma_d_db,alpha,theta_star_mean"
        assert len(fig) == 3

    def test_patterns_file_flag(self, tmp_path):
        pf = tmp_path / "pats.csv"
        pf.write_text("0,0,1,0,0,0,0,Zcustom\n0,0,0,0,0,0,0,Zall\n")
        out = tmp_path / "r.csv"
        rc = cli_main(["--drops", "1", "--fading", "1", "--out", str(out),
                       "--patterns", str(pf)])
        assert rc == 0
        body = out.read_text()
        assert "Zcustom" in body and "Zall" in body
