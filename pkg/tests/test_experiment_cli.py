import numpy as np
import pytest

from baglearn.cli import main
from baglearn.core import ParameterError
from baglearn.datagen import SyntheticConfig
from baglearn.experiment import (
    ExperimentConfig,
    build_small_bags,
    format_rows_csv,
    format_summary,
    run_experiment,
)
from baglearn.oracles import TrainConfig
from baglearn.textio import read_collection


def tiny_config(**kw):
    base = dict(
        dataset_kind="synthetic",
        synthetic=SyntheticConfig(n_bags=30, q=3, d=4, n_test=50, seed=0),
        q=3, t=4, s=300,
        train=TrainConfig(epochs=15),
        repetitions=2, base_seed=0,
    )
    base.update(kw)
    return ExperimentConfig(**base)


class TestExperiment:
    def test_runs_and_reports(self):
        rep = run_experiment(tiny_config())
        assert rep.t == 4 and rep.s == 300
        assert [r.run for r in rep.rows] == [1, 2]
        assert [r.seed for r in rep.rows] == [1, 2]  # base_seed + i
        for r in rep.rows:
            assert 0.0 <= r.large_pct <= 100.0
            assert 0.0 <= r.small_pct <= 100.0
            assert 0.0 <= r.test_pct <= 100.0

    def test_aggregate_recomputable(self):
        rep = run_experiment(tiny_config(repetitions=3))
        agg = rep.aggregate()
        small = np.array([r.small_pct for r in rep.rows])
        assert agg["small_pct"][0] == pytest.approx(small.mean())
        assert agg["small_pct"][1] == pytest.approx(small.std(ddof=1))
        assert not agg["single_run"]

    def test_single_run_flag(self):
        rep = run_experiment(tiny_config(repetitions=1))
        agg = rep.aggregate()
        assert agg["single_run"] and agg["test_pct"][1] == 0.0
        assert "single-run" in format_summary(rep)

    def test_reports_reproducible(self):
        r1 = run_experiment(tiny_config())
        r2 = run_experiment(tiny_config())
        assert format_rows_csv(r1) == format_rows_csv(r2)
        assert format_summary(r1) == format_summary(r2)

    def test_csv_layout(self):
        rep = run_experiment(tiny_config(repetitions=1))
        lines = format_rows_csv(rep).strip().splitlines()
        assert lines[0] == "run,seed,large_pct,small_pct,test_pct,met_contract"
        assert len(lines) == 2 and lines[1].startswith("1,1,")

    def test_exactly_one_of_t(self):
        with pytest.raises(ParameterError):
            tiny_config(t=4, epsilon=0.3, alpha=0.5).resolved_t()
        with pytest.raises(ParameterError):
            tiny_config(t=None).resolved_t()

    def test_exactly_one_of_s(self):
        cfg = tiny_config(s=100, delta=0.1)
        with pytest.raises(ParameterError):
            cfg.resolved_s(10)

    def test_derived_t_and_s(self):
        cfg = tiny_config(t=None, s=None, epsilon=0.5, alpha=1.0, c0=1.0, delta=0.5)
        assert cfg.resolved_t() == 64
        assert cfg.resolved_s(10) > 0

    def test_tabular_requires_schema(self):
        cfg = tiny_config(dataset_kind="tabular", synthetic=None)
        with pytest.raises(ParameterError):
            build_small_bags(cfg)


RUN_YAML = """\
dataset:
  kind: synthetic
  mode: random
  n_bags: 30
  d: 4
  n_test: 50
q: 3
t: 4
s: 300
train:
  epochs: 10
repetitions: 1
base_seed: 0
"""


class TestCli:
    def test_run_with_config(self, tmp_path, capsys):
        cfg = tmp_path / "exp.yaml"
        cfg.write_text(RUN_YAML)
        out = tmp_path / "rep"
        rc = main(["run", "--config", str(cfg), "--output", str(out)])
        assert rc == 0
        assert (tmp_path / "rep.csv").exists()
        assert (tmp_path / "rep.summary.txt").exists()
        text = (tmp_path / "rep.summary.txt").read_text()
        assert "t: 4" in text and "s: 300" in text
        assert "small:" in capsys.readouterr().out

    def test_run_flag_overrides_config(self, tmp_path):
        cfg = tmp_path / "exp.yaml"
        cfg.write_text(RUN_YAML)
        out = tmp_path / "rep2"
        rc = main(["run", "--config", str(cfg), "--s", "200", "--output", str(out)])
        assert rc == 0
        assert "s: 200" in (tmp_path / "rep2.summary.txt").read_text()

    def test_run_conflicting_params_exit_2(self, tmp_path):
        cfg = tmp_path / "exp.yaml"
        cfg.write_text(RUN_YAML)
        rc = main(["run", "--config", str(cfg), "--epsilon", "0.3",
                   "--alpha", "0.5", "--output", str(tmp_path / "x")])
        assert rc == 2

    def test_run_missing_config_exit_3(self, tmp_path):
        rc = main(["run", "--config", str(tmp_path / "absent.yaml")])
        assert rc == 3

    def test_verify_mil_ok(self, capsys):
        rc = main(["verify", "mil", "--alpha", "3/4", "--T", "8", "--n-dirs", "64"])
        out = capsys.readouterr().out
        assert rc == 0
        assert "no_strong_optimum: 0.625000" in out
        assert "weak_exists_holds: True" in out
        assert "trivial_accuracy: 0.5" in out

    def test_verify_llp_ok(self, capsys):
        rc = main(["verify", "llp", "--alpha", "0.75", "--n-pairs", "8",
                   "--halfspace-draws", "500"])
        out = capsys.readouterr().out
        assert rc == 0
        assert "best_labeling_exact: True" in out

    def test_verify_bad_params_exit_2(self):
        rc = main(["verify", "mil", "--alpha", "2/3", "--T", "8"])
        assert rc == 2

    def test_gen_and_convert_round_trip(self, tmp_path, capsys):
        milfile = tmp_path / "mil.txt"
        rc = main(["gen", "mil-construction", str(milfile),
                   "--alpha", "3/4", "--T", "8"])
        assert rc == 0 and milfile.exists()
        coll = read_collection(milfile)
        assert len(coll) == 32 and coll.is_weighted

        outfile = tmp_path / "mil_unweighted.txt"
        rc = main(["convert", str(milfile), str(outfile), "--T", "5"])
        out = capsys.readouterr().out
        assert rc == 0
        assert "1/(T-1) = 0.25" in out
        back = read_collection(outfile)
        assert not back.is_weighted
        assert 4 * 32 <= len(back) <= 5 * 32

    def test_convert_unweighted_input_exit_2(self, tmp_path):
        f = tmp_path / "r.txt"
        rc = main(["gen", "random", str(f), "--n-bags", "5", "--q", "2", "--d", "3"])
        assert rc == 0
        rc = main(["convert", str(f), str(tmp_path / "o.txt"), "--T", "5"])
        assert rc == 2

    def test_convert_missing_input_exit_3(self, tmp_path):
        rc = main(["convert", str(tmp_path / "nope.txt"),
                   str(tmp_path / "o.txt"), "--T", "5"])
        assert rc == 3

    def test_gen_llp_construction(self, tmp_path):
        f = tmp_path / "llp.txt"
        rc = main(["gen", "llp-construction", str(f), "--alpha", "0.7",
                   "--n-pairs", "20", "--d", "3"])
        assert rc == 0
        coll = read_collection(f)
        assert len(coll) == 20
        assert all(b.agg_label == 1 for b in coll.bags)
