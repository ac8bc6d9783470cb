import numpy as np
import pytest

from blockbp.code import LABEL_ORDER, Syndrome, build_code, pure_error
from blockbp.cosetnet import coset_prob_exact
from blockbp.decoders import DecoderParams, decode_exact
from blockbp.harness import (
    CSV_COLUMNS,
    ExperimentConfig,
    RunStats,
    bench_scaling,
    run_experiment,
    shot_rng,
    stats_row,
    write_results,
)
from blockbp.noise import depolarizing, sample_error


def small_cfg(**overrides):
    base = dict(
        decoder="exact",
        d=2,
        epsilon=0.05,
        params=DecoderParams(),
        shots=50,
        max_failures=1,
        seed=7,
    )
    base.update(overrides)
    return ExperimentConfig(**base)


class TestRunExperiment:
    def test_zero_noise_no_failures(self):
        cfg = small_cfg(epsilon=0.0, shots=20, hard_cap_factor=1)
        stats = run_experiment(cfg)
        assert stats.failures == 0
        assert stats.p_hat == 0.0
        assert stats.shots == 20  # hard cap: failure target unreachable

    def test_stops_once_both_targets_met(self):
        cfg = small_cfg(epsilon=0.3, shots=10, max_failures=3)
        stats = run_experiment(cfg)
        assert stats.shots >= 10
        assert stats.failures >= 3

    def test_deterministic_across_thread_counts(self):
        ref = None
        for threads in (1, 2):
            cfg = small_cfg(epsilon=0.15, shots=40, max_failures=2, threads=threads)
            stats, records = run_experiment(cfg, keep_records=True)
            summary = (
                stats.shots,
                stats.failures,
                [(r.shot, r.error_weight, r.success, r.fallback_used) for r in records],
            )
            if ref is None:
                ref = summary
            else:
                assert summary == ref

    def test_per_shot_streams_are_stable(self):
        model = depolarizing(0.2, 13)
        a = sample_error(model, shot_rng(3, 17))
        b = sample_error(model, shot_rng(3, 17))
        c = sample_error(model, shot_rng(3, 18))
        assert a == b
        assert a != c

    def test_exact_decoder_matches_exhaustive_failure_probability(self):
        # the d=2 failure probability can be summed exactly over all 16
        # syndromes: P_fail = 1 - sum_s pi(f_s * chosen(s) * G)
        d, eps = 2, 0.1
        code = build_code(d)
        model = depolarizing(eps, code.n)
        p_fail = 1.0
        for s_int in range(1 << code.m):
            bits = (s_int >> np.arange(code.m)) & 1
            s = Syndrome(bits.astype(np.uint8))
            chosen = decode_exact(code, model, s).chosen
            f = pure_error(code, s)
            p_fail -= float(coset_prob_exact(code, model, f, chosen))
        cfg = small_cfg(epsilon=eps, shots=4000, max_failures=1, seed=11)
        stats = run_experiment(cfg)
        sigma = max(stats.stderr, 1e-9)
        assert abs(stats.p_hat - p_fail) < 3 * sigma


class TestCsv:
    def test_header_only_for_empty_list(self, tmp_path):
        path = tmp_path / "out.csv"
        write_results([], str(path))
        lines = path.read_text().strip().splitlines()
        assert lines == [",".join(CSV_COLUMNS)]

    def test_roundtrip_and_single_header(self, tmp_path):
        import csv as csvmod

        path = tmp_path / "out.csv"
        cfg = small_cfg(epsilon=0.1, shots=5, hard_cap_factor=2)
        stats = run_experiment(cfg)
        write_results([stats], str(path))
        write_results([stats], str(path))
        text = path.read_text().strip().splitlines()
        assert sum(1 for line in text if line.startswith("decoder")) == 1
        with open(path) as fh:
            rows = list(csvmod.DictReader(fh))
        assert len(rows) == 2
        for row in rows:
            assert float(row["p_l"]) == stats.p_hat
            assert float(row["stderr"]) == stats.stderr
            assert int(row["shots"]) == stats.shots

    def test_float_fields_survive_17_digits(self, tmp_path):
        import csv as csvmod

        path = tmp_path / "x.csv"
        cfg = small_cfg(epsilon=0.1234567890123456)
        stats = RunStats(
            config=cfg,
            shots=3,
            failures=1,
            p_hat=1 / 3,
            stderr=0.2721655269759087,
            fallback_rate=0.1,
            mean_rounds=7.123456789012345,
            wall_time_s=0.0,
        )
        write_results([stats], str(path))
        with open(path) as fh:
            row = next(csvmod.DictReader(fh))
        assert float(row["p_l"]) == stats.p_hat
        assert float(row["epsilon"]) == cfg.epsilon
        assert float(row["mean_rounds"]) == stats.mean_rounds


class TestBenchScaling:
    def test_reps_zero_empty(self):
        assert bench_scaling([3], [2], [8], 0) == []

    def test_rows_schema(self):
        rows = bench_scaling([3], [2], [8], 1, max_iter=2)
        assert len(rows) == 1
        row = rows[0]
        assert row["d"] == 3 and row["k"] == 2 and row["chi"] == 8
        assert row["serial_s"] > 0 and row["parallel_s"] > 0
        assert row["mean_rounds"] == 2.0  # early exit disabled
