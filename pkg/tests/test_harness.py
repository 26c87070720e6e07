import csv
import io
import json
import math

import numpy as np
import pytest

from diracsplit.harness.cli import main
from diracsplit.harness.config import RunConfig, m_from_h
from diracsplit.harness.references import ReferenceStore, compute_reference, reference_key
from diracsplit.harness.report import CSV_COLUMNS, emit_report, load_report_json, report_to_csv, report_to_json
from diracsplit.harness.studies import (StudyReport, StudyRow, convergence_study, long_time_study,
                                        observed_rates, onset_index, regime_config)
from diracsplit.harness.tables import TABLES, paper_1d_config, benchmark_value

SMALL = dict(a=-16, b=16, M=256, T_final=1.0, tau=0.1, ref_tau=1e-3)


@pytest.fixture
def store(tmp_path):
    return ReferenceStore(tmp_path / "refs")


class TestConfig:
    def test_defaults(self):
        c = RunConfig()
        assert c.h == 1 / 16 and c.scheme == "S4c" and c.reference_M == 1024

    def test_replace_h(self):
        c = RunConfig().replace(h=0.25, ref_h=1 / 32)
        assert c.M == 256 and c.ref_M == 2048

    def test_m_from_h(self):
        assert m_from_h(-10, 10, 1 / 32) == 640
        with pytest.raises(ValueError):
            m_from_h(0, 1, 0.3)
        with pytest.raises(ValueError):
            m_from_h(0, 3, 1)

    def test_rejects(self):
        with pytest.raises(ValueError):
            RunConfig(reference="maybe")
        with pytest.raises(ValueError):
            RunConfig(tau=0)
        with pytest.raises(ValueError):
            RunConfig(scheme="S3")
        with pytest.raises(ValueError):
            RunConfig(epsilon=2)

    def test_ini_round_trip(self, tmp_path):
        c = RunConfig(a=-10, b=10, M=64, dim=2, potential="honeycomb-2d", tau=1 / 3, ref_M=128, nu=0.5)
        path = tmp_path / "run.ini"
        c.save(path)
        assert RunConfig.load(path) == c
        assert RunConfig.from_dict(json.loads(json.dumps(c.to_dict()))) == c

    def test_ini_text(self):
        text = """
[grid]
a = -8
b = 8
h = 1/8          ; mesh size instead of M
[scheme]
name = s2
tau = 1/64
[study]
ref_M =
"""
        c = RunConfig.loads(text)
        assert c.M == 128 and c.scheme == "S2" and c.tau == 1 / 64 and c.ref_M is None

    def test_ini_unknown(self):
        with pytest.raises(ValueError, match="section"):
            RunConfig.loads("[nope]\nx = 1\n")
        with pytest.raises(ValueError, match="key"):
            RunConfig.loads("[grid]\nN = 1\n")

    def test_hash(self):
        assert RunConfig().config_hash() == RunConfig().config_hash()
        assert RunConfig().config_hash() != RunConfig(nu=0.5).config_hash()


class TestRates:
    def test_observed_rates(self):
        r = observed_rates([1.0, 0.25, 1 / 16], [0.5, 0.25, 0.125])
        assert r[0] is None and r[1:] == pytest.approx([2, 2])

    def test_zero_error_rate(self):
        assert math.isnan(observed_rates([1.0, 0.0], [1, 0.5])[1])

    def test_single_point(self):
        assert observed_rates([0.1], [0.5]) == [None]

    def test_onset(self):
        assert onset_index([None, 1.0, 3.6, 4.0]) == 2
        assert onset_index([None, 1.0, float("nan")]) is None


class TestReferences:
    def test_store_round_trip(self, store):
        a = np.arange(6, dtype=complex).reshape(2, 3) * (1 + 2j)
        store.save("k", a, {"x": 1})
        b, meta = store.load("k")
        assert np.array_equal(a, b) and meta["shape"] == [2, 3] and meta["x"] == 1
        assert store.load("missing") is None

    def test_generate_then_hit(self, store):
        cfg = RunConfig(**SMALL)
        a = store.get(cfg)
        assert (store.hits, store.misses) == (0, 1)
        b = store.get(cfg.replace(tau=0.05, scheme="S2"))   # same reference run
        assert (store.hits, store.misses) == (1, 1)
        assert np.array_equal(a, b)
        assert np.array_equal(a, compute_reference(cfg.reference_config()))

    def test_load_policy(self, store):
        with pytest.raises(FileNotFoundError):
            store.get(RunConfig(**SMALL, reference="load"))

    def test_key_depends_on_times(self):
        c = RunConfig(**SMALL).reference_config()
        assert reference_key(c) != reference_key(c, (0.0, 0.5, 1.0))

    def test_trajectory(self, store):
        cfg = RunConfig(**SMALL)
        frames = store.get(cfg, (0.0, 0.5, 1.0))
        assert frames.shape == (3, 2, 256)
        assert np.allclose(frames[-1], store.get(cfg), atol=1e-13)
        with pytest.raises(ValueError):
            store.get(cfg, (0.0, 0.3, 1.0))

    def test_analytic(self, store):
        cfg = RunConfig(a=0, b=2 * math.pi, M=16, potential="constant(0.5, 0.8)", initial="plane-wave(2)",
                        reference="analytic", T_final=1.0, tau=0.05)
        rep = convergence_study(cfg, "time", [0.05, 0.025, 0.0125], ["S2", "S4c"], store=store)
        assert rep.column("rate", scheme="S2")[1:] == pytest.approx([2, 2], abs=0.1)
        assert rep.column("rate", scheme="S4c")[1:] == pytest.approx([4, 4], abs=0.15)
        with pytest.raises(ValueError):
            convergence_study(cfg, "space", [1.0, 0.5], store=store)
        with pytest.raises(ValueError, match="plane-wave"):
            store.get(cfg.replace(initial="gaussian"))


class TestStudies:
    def test_time_ladder(self, store):
        cfg = RunConfig(**SMALL)
        rep = convergence_study(cfg, "time", [0.1, 0.05, 0.025], ["S2", "S4c"], store=store)
        assert len(rep.rows) == 6
        assert rep.column("tau", scheme="S2") == [0.1, 0.05, 0.025]
        assert rep.column("rate", scheme="S2")[1:] == pytest.approx([2, 2], abs=0.2)
        assert rep.column("rate", scheme="S4c")[1:] == pytest.approx([4, 4], abs=0.1)
        assert rep.metadata["config_hash"] == cfg.config_hash()

    def test_rerun_identical(self, store):
        cfg = RunConfig(**SMALL)
        a = convergence_study(cfg, "time", [0.1, 0.05], ["S4"], store=store)
        b = convergence_study(cfg, "time", [0.1, 0.05], ["S4"], store=store)
        assert a.column("e_phi") == b.column("e_phi") and store.hits == 1
        a.metadata["timestamp"] = b.metadata["timestamp"]
        assert report_to_csv(a) == report_to_csv(b)

    def test_space_ladder(self, store):
        cfg = RunConfig(**SMALL, ref_M=512).replace(tau=0.01, ref_tau=0.01)
        rep = convergence_study(cfg, "space", [1.0, 0.5, 0.25], store=store)
        assert [r.h for r in rep.rows] == [1.0, 0.5, 0.25]
        e = rep.column("e_phi")
        assert e[0] > e[1] > e[2]

    def test_relative(self, store):
        cfg = RunConfig(**SMALL)
        a = convergence_study(cfg, "time", [0.1], store=store).rows[0]
        r = convergence_study(cfg, "time", [0.1], relative=True, store=store).rows[0]
        assert r.e_phi < a.e_phi and r.rate is None

    def test_ladder_validation(self, store):
        cfg = RunConfig(**SMALL)
        for bad in ([], [0.1, 0.2], [0.1, 0.03], [0.1, 0.1]):
            with pytest.raises(ValueError):
                convergence_study(cfg, "time", bad, store=store)
        with pytest.raises(ValueError, match="finer"):
            convergence_study(cfg.replace(ref_tau=0.05), "time", [0.1, 0.05], store=store)
        with pytest.raises(ValueError, match="finer"):
            convergence_study(cfg, "space", [0.125], store=store)
        with pytest.raises(ValueError):
            convergence_study(cfg, "diagonal", [0.1], store=store)

    def test_workers_agree(self, store):
        cfg = RunConfig(**SMALL)
        a = convergence_study(cfg, "time", [0.1, 0.05, 0.025], store=store)
        b = convergence_study(cfg, "time", [0.1, 0.05, 0.025], store=store, workers=3)
        assert a.column("e_phi") == b.column("e_phi")

    def test_regime_config(self):
        c = regime_config("nr", 0.25)
        assert c.epsilon == 0.25 and c.delta == 1 and c.M == 1024 and c.T_final == 6
        s = regime_config("sc", 0.5)
        assert s.delta == 0.5 and s.initial == "wkb" and s.M == 4096
        m = regime_config("nrml", 0.5, RunConfig(**SMALL))
        assert (m.epsilon, m.nu, m.M) == (0.5, 0.5, 256)

    def test_long_time(self, store):
        cfg = paper_1d_config(M=256, ref_M=None, tau=0.1, ref_tau=1e-3)
        rep = long_time_study(cfg, ["S2", "S4", "S4c", "S4RK"], T=50, sample_dt=0.5, store=store)
        final = {s: rep.select(scheme=s)[-1] for s in ("S2", "S4", "S4c", "S4RK")}
        assert all(r.t == pytest.approx(50) for r in final.values())
        assert min(final, key=lambda s: final[s].e_phi) == "S4RK"
        for s in ("S4", "S4c", "S4RK"):
            rows = rep.select(scheme=s)
            e10 = next(r.e_phi for r in rows if abs(r.t - 10) < 1e-9)
            assert final[s].e_phi / e10 <= 10
        assert rep.select(scheme="S4c")[0].e_phi < 1e-13
        with pytest.raises(ValueError):
            long_time_study(cfg, ["S2"], T=1, sample_dt=0.25, store=store)


class TestReport:
    def _report(self):
        rows = [StudyRow("S2", 0.5, 0.1, 1e-3, 2e-3, 3e-3, None),
                StudyRow("S2", 0.5, 0.05, 2.5e-4, 5e-4, 7.5e-4, 2.0, onset=True)]
        return StudyReport(rows, {"config_hash": "abc"}, RunConfig(**SMALL))

    def test_csv_rfc4180(self):
        text = report_to_csv(self._report())
        assert text.endswith("\r\n") and text.count("\r\n") == 3
        rows = list(csv.reader(io.StringIO(text)))
        assert rows[0][: len(CSV_COLUMNS)] == list(CSV_COLUMNS) and "wall_s" not in rows[0]
        d = dict(zip(rows[0], rows[2]))
        assert d["rate"] == "2" and d["onset"] == "1" and d["e_phi_full"] == "0.00025"
        assert dict(zip(rows[0], rows[1]))["rate"] == ""
        assert "wall_s" in report_to_csv(self._report(), timings=True).splitlines()[0]

    def test_empty_csv(self):
        lines = report_to_csv(StudyReport()).split("\r\n")
        assert len(lines) == 2 and lines[1] == ""

    def test_json_round_trip(self, tmp_path):
        rep = self._report()
        back = load_report_json(report_to_json(rep))
        assert back.rows == rep.rows and back.config == rep.config and back.metadata == rep.metadata
        path = emit_report(rep, "json", tmp_path / "o" / "r.json")
        assert load_report_json(path.read_text()).rows == rep.rows
        with pytest.raises(ValueError):
            emit_report(rep, "xml", tmp_path / "r.xml")


class TestTables:
    def test_presets_present(self):
        assert sorted(TABLES, key=lambda n: int(n[5:])) == [f"table{k}" for k in range(2, 14)]

    def test_benchmark_lookup(self):
        p = TABLES["table3"]
        row = StudyRow("S4c", 1 / 16, 1 / 16, 0, 0, 0)
        assert benchmark_value(p, row) == 3.68e-6
        assert benchmark_value(p, StudyRow("S4c", 1 / 16, 1 / 3, 0, 0, 0)) is None
        assert benchmark_value(TABLES["table2"], StudyRow("S1", 0.125, 1e-5, 0, 0, 0)) is None

    def test_normalization(self):
        assert TABLES["table5"].relative and not TABLES["table4"].relative


class TestCli:
    def test_run_csv(self, capsys):
        assert main(["run", "--a", "-16", "--b", "16", "--M", "128", "--tau", "1/10", "--T", "1"]) == 0
        rows = list(csv.reader(io.StringIO(capsys.readouterr().out)))
        assert rows[0] == ["t", "mass", "energy"] and len(rows) == 12
        m = [float(r[1]) for r in rows[1:]]
        assert max(m) - min(m) <= 1e-12 * m[0]

    def test_run_json_and_config(self, tmp_path, capsys):
        ini = tmp_path / "c.ini"
        RunConfig(**SMALL).save(ini)
        out = tmp_path / "run.json"
        assert main(["run", "--config", str(ini), "--set", "tau=1/5", "--format", "json", "--out", str(out)]) == 0
        d = json.loads(out.read_text())
        assert d["config"]["scheme"]["tau"] == 0.2 and len(d["t"]) == 6

    def test_converge(self, tmp_path, capsys):
        args = ["converge", "--a", "-16", "--b", "16", "--M", "128", "--T", "1", "--ref-tau", "1e-3",
                "--cache-dir", str(tmp_path), "--axis", "time", "--scheme", "S2,S4c", "--ladder", "1/10,1/20"]
        assert main(args) == 0
        rows = list(csv.DictReader(io.StringIO(capsys.readouterr().out)))
        assert [r["scheme"] for r in rows] == ["S2", "S2", "S4c", "S4c"]
        assert float(rows[1]["rate"]) == pytest.approx(2, abs=0.2)

    def test_commutator_check(self, capsys):
        assert main(["commutator-check", "--dim", "1"]) == 0
        assert capsys.readouterr().out.startswith("PASS")
        assert main(["commutator-check", "--dim", "2", "--variant", "uncorrected"]) == 1
        assert capsys.readouterr().out.startswith("FAIL")

    def test_errors_exit_2(self, tmp_path, capsys):
        assert main(["run", "--M", "7"]) == 2
        assert "error" in capsys.readouterr().err
        assert main(["converge", "--axis", "time", "--ladder", "1/10", "--reference", "load",
                     "--cache-dir", str(tmp_path), "--M", "64", "--T", "1"]) == 2

    def test_bad_number(self):
        with pytest.raises(SystemExit):
            main(["run", "--tau", "fast"])
