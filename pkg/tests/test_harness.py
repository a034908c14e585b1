import json
import os

import numpy as np
import pytest

from ancbench import harness, metrics
from ancbench.cli import cli_main
from ancbench.filters import FilterConfig
from ancbench.noisegen import ChannelSpec, NoiseSpec

SHORT = 3000


def spec(algo="rls", **kw):
    kw.setdefault("n_samples", SHORT)
    return harness.ExperimentSpec(filter_cfg=FilterConfig(algorithm=algo, order=8), **kw)


class TestSpec:
    def test_channel_longer_than_filter(self):
        with pytest.raises(ValueError, match="channel length"):
            spec(channel="random:9").validate()

    def test_gal_counts_ladder_taps(self):
        spec("gal", channel="random:9").validate()

    def test_too_short(self):
        with pytest.raises(ValueError):
            spec(n_samples=999).validate()

    def test_bad_channel_string(self):
        with pytest.raises(ValueError):
            spec(channel="fixed:3").validate()

    def test_resolve_draws_channel(self):
        r = harness.resolve(spec(seed=3))
        assert isinstance(r.channel, ChannelSpec) and len(r.channel) == 4
        assert r == harness.resolve(spec(seed=3))
        assert r.noise.seed != harness.resolve(spec(seed=4)).noise.seed


class TestRunExperiment:
    def test_nothing_to_cancel(self):
        rec = harness.run_experiment(spec(input_snr_db=float("inf")))
        assert rec.report.corr_coeff >= 0.999

    def test_gal_improves_snr(self):
        rec = harness.run_experiment(harness.ExperimentSpec(
            filter_cfg=FilterConfig(algorithm="gal"), input_snr_db=10.0))
        assert rec.report.output_snr_db > rec.report.input_snr_db

    @pytest.mark.parametrize("algo", ["rls", "ftf", "gal"])
    def test_deterministic(self, algo):
        a = harness.run_experiment(spec(algo, seed=11))
        b = harness.run_experiment(spec(algo, seed=11))
        for k in "dxye":
            assert np.array_equal(a.traces[k], b.traces[k])
        sa, sb = a.report.scalars(), b.report.scalars()
        sa.pop("convergence_seconds"), sb.pop("convergence_seconds")
        assert sa == sb and a.report.mse_curve == b.report.mse_curve

    def test_input_snr_is_exact(self):
        r = harness.resolve(spec(input_snr_db=-10.0, seed=2))
        s, d, x, scale = harness.build_inputs(r)
        v0 = d.samples - s.samples
        assert 10 * np.log10(np.mean(s.samples ** 2) / np.mean(v0 ** 2)) == pytest.approx(-10, abs=1e-6)
        np.testing.assert_allclose(v0, np.convolve(x.samples, r.channel.taps)[:SHORT], atol=1e-12)

    @pytest.mark.parametrize("noise", ["pink", "burst"])
    def test_other_noise(self, noise):
        rec = harness.run_experiment(spec(noise=NoiseSpec(kind=noise), n_samples=4000))
        assert np.isfinite(rec.report.output_snr_db)

    def test_metrics_match_traces(self):
        rec = harness.run_experiment(spec("gal", seed=5))
        s = harness.build_inputs(rec.spec)[0]
        e = rec.traces["e"]
        assert metrics.correlation_coefficient(s, e) == pytest.approx(rec.report.corr_coeff, abs=1e-9)
        assert metrics.output_snr(s, e) == pytest.approx(rec.report.output_snr_db, abs=1e-9)
        np.testing.assert_array_equal(rec.traces["e"], rec.traces["d"] - rec.traces["y"])

    def test_audio(self, speech_wav):
        sig = harness.SignalSpec(kind="audio", path=str(speech_wav))
        rec = harness.run_experiment(spec(signal=sig, n_samples=20000))
        assert rec.spec.n_samples == 4000
        assert len(rec.traces["e"]) == 4000

    @staticmethod
    def identity_residual_ratio(snr_db, n=4000):
        cfg = FilterConfig(order=4, forgetting_factor=1.0, init_delta=1e-6)
        rec = harness.run_experiment(harness.ExperimentSpec(
            channel=ChannelSpec((1.0,)), filter_cfg=cfg, n_samples=n, input_snr_db=snr_db))
        s = harness.build_inputs(rec.spec)[0].samples
        interference = rec.traces["d"] - s
        curve = [v for _, v in metrics.mse_curve(rec.traces["e"] - s, 100)]
        return np.median(curve[-len(curve) // 10:]) / np.mean(interference ** 2)

    def test_identity_channel_cancels_weak_signal(self):
        assert self.identity_residual_ratio(-40.0) <= 1e-4

    def test_identity_channel_residual_scales_with_signal_power(self):
        # with lambda = 1 the clean signal perturbs the weights like
        # measurement noise, so the residual is proportional to its power
        ratio = self.identity_residual_ratio(10.0) / self.identity_residual_ratio(-10.0)
        assert ratio == pytest.approx(100.0, rel=0.01)


class TestComparisonAndSweep:
    def test_shared_inputs(self):
        recs = harness.run_comparison(spec(signal=harness.SignalSpec("chirp")))
        assert [r.spec.algorithm for r in recs] == ["rls", "ftf", "gal"]
        for r in recs[1:]:
            assert np.array_equal(r.traces["d"], recs[0].traces["d"])
            assert np.array_equal(r.traces["x"], recs[0].traces["x"])

    def test_parallel_matches_serial(self):
        serial = harness.run_comparison(spec(seed=1))
        parallel = harness.run_comparison(spec(seed=1), jobs=3)
        for a, b in zip(serial, parallel):
            assert np.array_equal(a.traces["e"], b.traces["e"])

    def test_lambda_sweep(self):
        recs = harness.run_sweep(spec(), "lambda", [0.99, 0.995, 1.0])
        base = recs[0].spec.to_dict()
        for r, lam in zip(recs, [0.99, 0.995, 1.0]):
            d = r.spec.to_dict()
            assert d["filter"].pop("forgetting_factor") == lam
            assert {**d, "filter": None} == {**base, "filter": None}
            assert d["filter"] == {k: v for k, v in base["filter"].items()
                                   if k != "forgetting_factor"}

    def test_snr_sweep(self):
        recs = harness.run_sweep(spec(), "snr", [30, 10, -10], keep_traces=False)
        assert [r.report.input_snr_db for r in recs] == [30.0, 10.0, -10.0]

    def test_unknown_param(self):
        with pytest.raises(ValueError):
            harness.run_sweep(spec(), "beta", [0.5])

    def test_invalid_value(self):
        with pytest.raises(ValueError):
            harness.run_sweep(spec(), "lambda", [1.5])


def tiny_record():
    rep = metrics.MetricsReport(mse_curve=[(1, 0.5), (2, 0.25)], convergence_samples=1,
                                convergence_seconds=0.001, corr_coeff=0.5,
                                output_snr_db=3.0, input_snr_db=10.0)
    traces = {"d": np.array([1.0, 0.1, 1 / 3]), "x": np.array([0.5, -0.5, 0.0]),
              "y": np.array([0.0, 0.2, 0.3]), "e": np.array([1.0, -0.1, 1 / 3 - 0.3])}
    return harness.RunRecord(harness.resolve(spec()), rep, traces)


class TestPersistence:
    def test_three_sample_csv(self, tmp_path):
        harness.write_csv(tiny_record(), tmp_path / "t.csv")
        lines = (tmp_path / "t.csv").read_text().splitlines()
        assert len(lines) == 4
        assert lines[0] == "n,d,x,y,e,mse_windowed"
        assert lines[1].endswith(",")

    def test_csv_round_trip(self, tmp_path):
        rec = harness.run_experiment(spec("ftf", seed=9))
        harness.write_csv(rec, tmp_path / "r.csv")
        back = harness.read_csv(tmp_path / "r.csv")
        for k in "dxye":
            assert np.array_equal(back[k], rec.traces[k])
        curve = metrics.mse_curve(back["e"], rec.spec.mse_window)
        w = rec.spec.mse_window
        assert np.all(np.isnan(back["mse_windowed"][: w - 1]))
        assert back["mse_windowed"][w - 1:].tolist() == [v for _, v in curve]

    def test_empty_summary(self, tmp_path):
        harness.write_summary([], tmp_path / "s.json")
        assert harness.read_summary(tmp_path / "s.json") == {"records": []}

    def test_summary_matches_reports(self, tmp_path):
        recs = harness.run_comparison(spec(seed=4))
        harness.write_summary(recs, tmp_path / "s.json")
        doc = harness.read_summary(tmp_path / "s.json")["records"]
        assert len(doc) == 3
        for entry, rec in zip(doc, recs):
            expected = rec.report.scalars()
            expected.pop("convergence_seconds")
            assert entry["metrics"] == expected
            assert entry["spec"]["signal"] == doc[0]["spec"]["signal"]
            assert entry["spec"]["noise"] == doc[0]["spec"]["noise"]
        assert doc[1]["ftf_rescues"] == recs[1].rescues

    def test_timing_opt_in(self, tmp_path):
        harness.write_summary([tiny_record()], tmp_path / "s.json", include_timing=True)
        entry = harness.read_summary(tmp_path / "s.json")["records"][0]
        assert entry["metrics"]["convergence_seconds"] == 0.001

    def test_unwritable(self, tmp_path):
        with pytest.raises(OSError):
            harness.write_summary([], tmp_path / "missing" / "s.json")


class TestTables:
    def test_grid_shape(self):
        base = spec()
        layout = {t: harness.table_specs(base, t) for t in harness.TABLES}
        assert set(layout) == {1, 3, 4, 5}
        for t, rows in layout.items():
            assert list(rows) == ["chirp", "sinusoid", "sawtooth", "audio"]
            assert rows["audio"] is None
            for specs in list(rows.values())[:3]:
                assert [s.algorithm for s in specs] == ["rls", "ftf", "gal"]
                assert {s.input_snr_db for s in specs} == {harness.TABLES[t]}


class TestCli:
    def run(self, tmp_path, *args):
        return cli_main([*args, "--out-dir", str(tmp_path), "--samples", "2000", "--order", "8"])

    def test_run(self, tmp_path):
        code = self.run(tmp_path, "run", "--signal", "sinusoid", "--noise", "white",
                        "--algo", "gal", "--snr-db", "10", "--seed", "7", "--traces")
        assert code == 0
        doc = harness.read_summary(tmp_path / "summary.json")
        assert doc["records"][0]["spec"]["algorithm"] == "gal"
        assert os.path.exists(tmp_path / "sinusoid_white_gal_snr10_seed7.csv")

    def test_compare(self, tmp_path):
        assert self.run(tmp_path, "compare", "--signal", "chirp", "--seed", "7") == 0
        recs = harness.read_summary(tmp_path / "summary.json")["records"]
        assert [r["spec"]["algorithm"] for r in recs] == ["rls", "ftf", "gal"]

    def test_sweep(self, tmp_path):
        assert self.run(tmp_path, "sweep", "--param", "order", "--values", "2", "4", "8",
                        "--channel-len", "2") == 0
        recs = harness.read_summary(tmp_path / "summary.json")["records"]
        assert [r["spec"]["filter"]["order"] for r in recs] == [2, 4, 8]

    def test_tables(self, tmp_path, speech_wav):
        assert self.run(tmp_path, "tables", "--seed", "7", "--audio", str(speech_wav)) == 0
        for t in (1, 3, 4, 5):
            doc = json.loads((tmp_path / f"table{t}.json").read_text())
            assert [r["signal"] for r in doc["rows"]] == ["chirp", "sinusoid", "sawtooth", "audio"]
            assert len(doc["records"]) == 12

    def test_tables_without_audio_skips(self, tmp_path):
        assert self.run(tmp_path, "tables") == 0
        doc = json.loads((tmp_path / "table3.json").read_text())
        assert doc["rows"][-1]["status"] == "skipped"
        assert len(doc["records"]) == 9

    @pytest.mark.parametrize("args", [
        ["run", "--bogus"],
        ["run", "--audio", "x.wav"],
        ["run", "--signal", "audio"],
        ["run", "--channel-len", "20"],
        ["run", "--lambda", "1.5"],
        ["sweep", "--param", "order"],
        [],
    ])
    def test_invalid(self, tmp_path, args, capsys):
        assert cli_main([*args, "--out-dir", str(tmp_path)] if args else []) == 1
        assert "ancbench" in capsys.readouterr().err

    def test_missing_audio_file(self, tmp_path):
        assert self.run(tmp_path, "run", "--signal", "audio",
                        "--audio", str(tmp_path / "none.wav")) == 2

    def test_unwritable_out_dir(self, tmp_path):
        blocker = tmp_path / "file"
        blocker.write_text("")
        assert cli_main(["run", "--samples", "2000", "--out-dir", str(blocker / "sub")]) == 2
