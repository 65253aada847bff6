import json
import math
import os

import numpy as np
import pytest

from diracpairs import (HelicityRelation, NumericsParams, RunConfig,
                        SweepSpec, UnitarityError, WindowParams,
                        config_from_dict, config_to_dict, field_from_si,
                        figure_configs, run_once, run_sweep, with_plateau)
from diracpairs.cli import (csv_header, csv_row, main, row_from_dict,
                            row_to_dict)


def desk_config(plateau=1, n_cut=1, steps=64, n_sector_max=2, field=None):
    return RunConfig(
        field=field or field_from_si(4.9e17, 0.746, 0.2 * math.pi / 4,
                                     HelicityRelation.SAME),
        window=WindowParams(ramp_cycles=1, plateau_cycles=plateau),
        numerics=NumericsParams(n_cut=n_cut, steps_per_cycle=steps,
                                n_sector_max=n_sector_max))


class TestFigureConfigs:
    def test_fig2_published_values(self):
        config, meta = figure_configs()["fig2"]
        assert config.field.omega == 0.746
        assert config.field.e_peak == pytest.approx(4.9e17 / 1.3e18)
        assert config.field.alpha_plus == pytest.approx(0.2 * math.pi / 4)
        assert config.field.helicity_relation is HelicityRelation.SAME
        assert config.field.alpha_minus == pytest.approx(
            math.pi / 2 - 0.2 * math.pi / 4)
        assert meta["field.omega"] == "published setup"

    def test_fig4_published_values(self):
        config, _ = figure_configs()["fig4"]
        assert config.field.omega == 0.4715
        assert config.field.e_peak == pytest.approx(3.1e17 / 1.3e18)
        assert config.field.alpha_minus == pytest.approx(0.7 * math.pi / 4)
        assert config.field.alpha_plus == config.field.alpha_minus
        assert config.field.helicity_relation is HelicityRelation.OPPOSITE

    def test_fig3_shares_fig2_field(self):
        presets = figure_configs()
        assert presets["fig3"][0].field == presets["fig2"][0].field

    def test_artifact_defaults_are_flagged(self):
        config, meta = figure_configs()["fig2"]
        assert config.window.ramp_cycles == 5
        assert meta["window.ramp_cycles"] == "artifact-default"
        assert all(meta[k] == "artifact-default"
                   for k in meta if k.startswith("numerics."))


class TestRunOnce:
    def test_zero_field_row(self):
        from dataclasses import replace
        config = desk_config()
        config = replace(config, field=replace(config.field, e_peak=0.0))
        row = run_once(config)
        assert row.cv_abs2 == pytest.approx(1.0, abs=1e-12)
        assert all(c == 0.0 for c in row.c[1:])
        assert row.top_pairs == []

    def test_determinism_bit_identical_rows(self):
        config = desk_config()
        k = config.numerics.n_sector_max
        r1 = csv_row(run_once(config), k)
        r2 = csv_row(run_once(config), k)
        assert r1 == r2

    def test_row_round_trip(self):
        row = run_once(desk_config())
        again = row_from_dict(json.loads(json.dumps(row_to_dict(row))))
        assert csv_row(again, 2) == csv_row(row, 2)

    def test_csv_schema_depends_only_on_sector_max(self):
        header = csv_header(3)
        cols = header.split(",")
        assert cols.count("c_1") == 1 and "c_3" in cols and "c_4" not in cols
        assert "s_plus_2" in cols and "h_minus_3" in cols
        assert cols[-1] == "error"


class TestSweep:
    def test_plateau_singleton_matches_run_once(self, tmp_path):
        config = desk_config(plateau=0)
        spec = SweepSpec(base=config, sweep_axis="plateau_cycles", values=[0],
                         outputs=str(tmp_path))
        paths = run_sweep(spec)
        with open(paths["json"]) as fh:
            data = json.load(fh)
        row = row_from_dict(data["rows"][0])
        direct = run_once(with_plateau(config, 0), sweep_value=0.0)
        assert row.cv_abs2 == pytest.approx(direct.cv_abs2, abs=1e-12)
        assert np.allclose(row.c, direct.c, atol=1e-12)

    def test_resumability_reuses_points(self, tmp_path):
        config = desk_config()
        spec = SweepSpec(base=config, sweep_axis="plateau_cycles",
                         values=[0, 1, 2], outputs=str(tmp_path))
        paths = run_sweep(spec)
        with open(paths["csv"]) as fh:
            first = fh.read()
        points = sorted(os.listdir(tmp_path / "points"))
        stamps = {p: os.path.getmtime(tmp_path / "points" / p) for p in points}
        paths = run_sweep(spec)
        with open(paths["csv"]) as fh:
            second = fh.read()
        assert first == second
        for p in points:
            assert os.path.getmtime(tmp_path / "points" / p) == stamps[p]

    def test_alpha_sweep_spin_selection(self, tmp_path):
        # opposite helicity: zero average spin exactly at linear polarization,
        # nonzero away from it
        field = field_from_si(3.1e17, 0.4715, 0.3, HelicityRelation.OPPOSITE)
        config = desk_config(plateau=2, n_cut=1, steps=64, n_sector_max=1,
                             field=field)
        spec = SweepSpec(base=config, sweep_axis="alpha_plus",
                         values=[0.0, math.pi / 8, math.pi / 4],
                         outputs=str(tmp_path))
        paths = run_sweep(spec)
        with open(paths["json"]) as fh:
            rows = [row_from_dict(r) for r in json.load(fh)["rows"]]
        by_alpha = {round(r.sweep_value, 6): r for r in rows}
        linear = by_alpha[round(math.pi / 4, 6)]
        assert abs(linear.s_plus[1]) < 1e-8
        assert abs(linear.s_minus[1]) < 1e-8
        elliptic = [by_alpha[round(a, 6)] for a in (0.0, math.pi / 8)]
        assert any(abs(r.s_plus.get(1, 0.0)) > 1e-6 for r in elliptic)

    def test_partial_failure_records_error(self, tmp_path):
        config = desk_config()
        spec = SweepSpec(base=config, sweep_axis="plateau_cycles",
                         values=[0, -3], outputs=str(tmp_path))
        paths = run_sweep(spec)
        with open(paths["json"]) as fh:
            rows = json.load(fh)["rows"]
        assert rows[0]["error"] == ""
        assert "ValidationError" in rows[1]["error"]

    def test_k0_sweep_changes_subspace(self, tmp_path):
        config = desk_config(plateau=1)
        spec = SweepSpec(base=config, sweep_axis="k0_z", values=[0.0, 0.1],
                         outputs=str(tmp_path))
        paths = run_sweep(spec)
        with open(paths["json"]) as fh:
            rows = [row_from_dict(r) for r in json.load(fh)["rows"]]
        assert all(r.error == "" for r in rows)
        # moving the subspace origin changes the pair content
        assert rows[0].cv_abs2 != rows[1].cv_abs2

    def test_emit_flags_control_outputs(self, tmp_path):
        config = desk_config(plateau=1)
        spec = SweepSpec(base=config, sweep_axis="plateau_cycles", values=[1],
                         outputs=str(tmp_path),
                         emit={"sectors": False, "pairs": False, "gdump": True})
        paths = run_sweep(spec)
        with open(paths["json"]) as fh:
            row = json.load(fh)["rows"][0]
        assert row["pair_list"] == []
        assert row["c"][1] is None  # sectors skipped -> NaN -> null
        dumped = [f for f in os.listdir(tmp_path / "points")
                  if f.endswith(".bin")]
        assert {f.rsplit("-", 1)[1] for f in dumped} == \
            {"u.bin", "gpm.bin", "gmm.bin"}
        from diracpairs import load_complex_matrix
        u_file = next(f for f in dumped if f.endswith("u.bin"))
        m = load_complex_matrix(tmp_path / "points" / u_file)
        assert m.shape == (12, 12)

    def test_outdir_env_override(self, tmp_path, monkeypatch):
        override = tmp_path / "elsewhere"
        monkeypatch.setenv("DIRACPAIRS_OUTDIR", str(override))
        spec = SweepSpec(base=desk_config(plateau=0),
                         sweep_axis="plateau_cycles", values=[0],
                         outputs=str(tmp_path / "ignored"))
        paths = run_sweep(spec)
        assert str(override) in paths["csv"]
        assert not (tmp_path / "ignored").exists()


class TestCommandLine:
    def write_config(self, tmp_path, config):
        path = tmp_path / "config.json"
        path.write_text(json.dumps(config_to_dict(config)))
        return str(path)

    def test_preset_emit_and_reload(self, tmp_path, capsys):
        out = tmp_path / "fig2.json"
        assert main(["preset", "--name", "fig2", "--emit-config",
                     "--out", str(out)]) == 0
        data = json.loads(out.read_text())
        assert "_meta" in data
        config = config_from_dict(data)
        assert config.field.omega == 0.746

    def test_preset_unknown_name_exit_2(self, capsys):
        assert main(["preset", "--name", "fig9", "--emit-config"]) == 2

    def test_run_writes_outputs(self, tmp_path, monkeypatch):
        monkeypatch.setenv("DIRACPAIRS_OUTDIR", str(tmp_path / "out"))
        cfg_path = self.write_config(tmp_path, desk_config())
        assert main(["run", "--config", cfg_path]) == 0
        files = os.listdir(tmp_path / "out")
        assert any(f.endswith(".csv") for f in files)
        assert any(f.endswith(".json") for f in files)

    def test_validation_error_exit_2(self, tmp_path):
        bad = desk_config()
        data = config_to_dict(bad)
        data["numerics"]["n_cut"] = 0
        path = tmp_path / "bad.json"
        path.write_text(json.dumps(data))
        assert main(["run", "--config", str(path)]) == 2

    def test_tolerance_failure_exit_3(self, tmp_path, monkeypatch):
        cfg_path = self.write_config(tmp_path, desk_config())
        import diracpairs.cli as cli_mod

        def boom(config, sweep_value=None, with_sectors=True):
            raise UnitarityError("synthetic defect")

        monkeypatch.setattr(cli_mod, "run_once", boom)
        assert main(["run", "--config", cfg_path]) == 3

    def test_oracle_check_passes_on_small_run(self, tmp_path):
        cfg_path = self.write_config(tmp_path, desk_config())
        table = tmp_path / "amps.csv"
        assert main(["oracle-check", "--config", cfg_path, "--nmax", "1",
                     "--dump-amplitudes", str(table)]) == 0
        lines = table.read_text().splitlines()
        assert lines[0] == "N,electrons,positrons,re,im"
        assert len(lines) > 100  # all charge-zero sectors of the 6+6 basis

    def test_dump_basis_columns(self, tmp_path):
        cfg_path = self.write_config(tmp_path, desk_config())
        out = tmp_path / "basis.csv"
        assert main(["dump-basis", "--config", cfg_path, "--out", str(out)]) == 0
        lines = out.read_text().splitlines()
        assert lines[0] == "index,n,band,spin,energy,spin_z,helicity"
        assert len(lines) == 13

    def test_dump_field_columns(self, tmp_path):
        cfg_path = self.write_config(tmp_path, desk_config())
        out = tmp_path / "field.csv"
        assert main(["dump-field", "--config", cfg_path, "--out", str(out),
                     "--per-cycle", "8"]) == 0
        lines = out.read_text().splitlines()
        assert lines[0] == "t_cycles,Ax,Ay,Az,Ex,Ey,Ez"
        # window is 1+1+1 cycles at 8 samples per cycle, plus the endpoint
        assert len(lines) == 3 * 8 + 2
