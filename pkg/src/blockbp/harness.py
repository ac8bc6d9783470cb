"""Monte-Carlo logical-error-rate experiments with seeded reproducibility.

Every shot draws its RNG stream from (seed, shot index), so shot-level
parallelism cannot change any sampled error.  Early stopping is evaluated
by scanning shot results in index order, which makes the stopping point a
pure function of the configuration as well.
"""

from __future__ import annotations

import csv
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .code import SurfaceCode, build_code, syndrome_of
from .decoders import (
    DecoderParams,
    decode_blockbp,
    decode_bmps,
    decode_exact,
    is_success,
)
from .noise import depolarizing, sample_error

CSV_COLUMNS = [
    "decoder", "d", "k", "chi", "epsilon", "max_iter", "delta0", "delta1",
    "damping", "shots", "failures", "p_l", "stderr", "fallback_rate",
    "mean_rounds", "seed", "wall_time_s",
]

_BATCH = 128  # fixed work unit; independent of worker count


@dataclass(frozen=True)
class ExperimentConfig:
    decoder: str  # blockbp | bmps | exact
    d: int
    epsilon: float
    params: DecoderParams = field(default_factory=DecoderParams)
    shots: int = 30_000
    max_failures: int = 100
    seed: int = 0
    threads: int = 1
    hard_cap_factor: int = 10
    out_path: str | None = None

    def __post_init__(self):
        if self.decoder not in ("blockbp", "bmps", "exact"):
            raise ValueError(f"unknown decoder {self.decoder!r}")
        if self.shots < 1 or self.max_failures < 1:
            raise ValueError("shots and max_failures must be >= 1")
        if self.d < 2:
            raise ValueError("d must be >= 2")
        if self.threads < 1:
            raise ValueError("threads must be >= 1")

    @property
    def hard_cap(self) -> int:
        return self.hard_cap_factor * self.shots


@dataclass(frozen=True)
class ShotRecord:
    shot: int
    error_weight: int
    success: bool
    fallback_used: bool
    rounds: tuple[int, int, int, int]
    wall_time_s: float


@dataclass
class RunStats:
    config: ExperimentConfig
    shots: int
    failures: int
    p_hat: float
    stderr: float
    fallback_rate: float
    mean_rounds: float
    wall_time_s: float


def shot_rng(seed: int, shot: int) -> np.random.Generator:
    """Per-shot stream: entropy is the (seed, shot index) pair."""
    return np.random.default_rng([seed, shot])


def run_shot(code: SurfaceCode, model, cfg: ExperimentConfig, shot: int) -> ShotRecord:
    rng = shot_rng(cfg.seed, shot)
    error = sample_error(model, rng)
    s = syndrome_of(code, error)
    t0 = time.perf_counter()
    if cfg.decoder == "blockbp":
        result = decode_blockbp(code, model, s, cfg.params)
    elif cfg.decoder == "bmps":
        result = decode_bmps(code, model, s, cfg.params.chi)
    else:
        result = decode_exact(code, model, s)
    elapsed = time.perf_counter() - t0
    return ShotRecord(
        shot=shot,
        error_weight=error.weight(),
        success=is_success(code, error, result),
        fallback_used=result.fallback_used,
        rounds=tuple(est.rounds for est in result.estimates),
        wall_time_s=elapsed,
    )


_WORKER_CACHE: dict = {}


def _run_batch(cfg: ExperimentConfig, start: int, stop: int) -> list[ShotRecord]:
    key = (cfg.d, cfg.epsilon)
    if _WORKER_CACHE.get("key") != key:
        code = build_code(cfg.d)
        _WORKER_CACHE["key"] = key
        _WORKER_CACHE["code"] = code
        _WORKER_CACHE["model"] = depolarizing(cfg.epsilon, code.n)
    code = _WORKER_CACHE["code"]
    model = _WORKER_CACHE["model"]
    return [run_shot(code, model, cfg, shot) for shot in range(start, stop)]


def _stop_index(flags: list[bool], cfg: ExperimentConfig) -> int | None:
    """First shot count at which the stopping rule fires, scanning in order.

    Stops once both the shot target and the failure target are met, or at
    the hard cap.  Returns None if more shots are needed.
    """
    failures = 0
    for i, success in enumerate(flags):
        n = i + 1
        failures += not success
        if n >= cfg.shots and failures >= cfg.max_failures:
            return n
        if n >= cfg.hard_cap:
            return n
    return None


def run_experiment(cfg: ExperimentConfig, keep_records: bool = False):
    """Sample, decode and aggregate until the stopping rule fires.

    Returns RunStats, or (RunStats, [ShotRecord]) with ``keep_records``.
    Deterministic for a fixed config and seed regardless of thread count.
    """
    t_start = time.perf_counter()
    records: list[ShotRecord] = []
    stop_at: int | None = None
    next_shot = 0
    pool = ProcessPoolExecutor(max_workers=cfg.threads) if cfg.threads > 1 else None
    try:
        while stop_at is None:
            n_batches = max(1, cfg.threads)
            spans = []
            for _ in range(n_batches):
                if next_shot >= cfg.hard_cap:
                    break
                stop = min(next_shot + _BATCH, cfg.hard_cap)
                spans.append((next_shot, stop))
                next_shot = stop
            if not spans:
                break
            if pool is not None:
                chunks = list(pool.map(_run_batch, [cfg] * len(spans),
                                       [a for a, _ in spans], [b for _, b in spans]))
            else:
                chunks = [_run_batch(cfg, a, b) for a, b in spans]
            for chunk in chunks:
                records.extend(chunk)
            stop_at = _stop_index([r.success for r in records], cfg)
    finally:
        if pool is not None:
            pool.shutdown()
    records = records[:stop_at] if stop_at is not None else records
    shots = len(records)
    failures = sum(not r.success for r in records)
    p_hat = failures / shots
    stats = RunStats(
        config=cfg,
        shots=shots,
        failures=failures,
        p_hat=p_hat,
        stderr=float(np.sqrt(p_hat * (1.0 - p_hat) / shots)),
        fallback_rate=sum(r.fallback_used for r in records) / shots,
        mean_rounds=float(np.mean([np.mean(r.rounds) for r in records])),
        wall_time_s=time.perf_counter() - t_start,
    )
    if keep_records:
        return stats, records
    return stats


def stats_row(stats: RunStats) -> dict:
    cfg = stats.config
    p = cfg.params
    return {
        "decoder": cfg.decoder,
        "d": cfg.d,
        "k": p.k,
        "chi": p.chi,
        "epsilon": repr(cfg.epsilon),
        "max_iter": p.max_iter,
        "delta0": repr(p.delta0),
        "delta1": repr(p.delta1),
        "damping": repr(p.damping),
        "shots": stats.shots,
        "failures": stats.failures,
        "p_l": repr(stats.p_hat),
        "stderr": repr(stats.stderr),
        "fallback_rate": repr(stats.fallback_rate),
        "mean_rounds": repr(stats.mean_rounds),
        "seed": cfg.seed,
        "wall_time_s": repr(stats.wall_time_s),
    }


def write_results(stats_list: list[RunStats], path: str) -> None:
    """Append CSV rows (header written once; floats via repr round-trip)."""
    need_header = not os.path.exists(path) or os.path.getsize(path) == 0
    with open(path, "a", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=CSV_COLUMNS)
        if need_header:
            writer.writeheader()
        for stats in stats_list:
            writer.writerow(stats_row(stats))


def bench_scaling(
    d_list: list[int],
    k_list: list[int],
    chi_list: list[int],
    reps: int,
    epsilon: float = 0.1,
    seed: int = 0,
    max_iter: int = 4,
    mode: str | None = None,
) -> list[dict]:
    """Wall-time table of block-BP decodes over a (d, k, chi) parameter grid.

    Each decode runs a fixed number of BP rounds (early exit disabled;
    ``delta0 = 0``) so the per-round cost is well defined.  Serial time runs
    the four cosets one after the other; parallel time runs them in a
    4-thread pool.  ``reps = 0`` yields an empty table.
    """
    rows = []
    for d in d_list:
        code = build_code(d)
        model = depolarizing(epsilon, code.n)
        for k in k_list:
            for chi in chi_list:
                overrides = dict(chi=chi, max_iter=max_iter, delta0=0.0, delta1=1e308)
                if mode is not None:
                    overrides["mode"] = mode
                params = DecoderParams.for_block_size(k, **overrides)
                serial, parallel, rounds = [], [], []
                for rep in range(reps):
                    rng = shot_rng(seed, rep)
                    s = syndrome_of(code, sample_error(model, rng))
                    t0 = time.perf_counter()
                    result = decode_blockbp(code, model, s, params)
                    serial.append(time.perf_counter() - t0)
                    rounds.append(float(np.mean([est.rounds for est in result.estimates])))
                    t0 = time.perf_counter()
                    decode_blockbp(code, model, s, params, coset_workers=4)
                    parallel.append(time.perf_counter() - t0)
                if reps:
                    mean_serial = float(np.median(serial))
                    mean_rounds = float(np.mean(rounds))
                    rows.append(
                        {
                            "d": d,
                            "k": k,
                            "chi": chi,
                            "mode": params.mode,
                            "reps": reps,
                            "serial_s": mean_serial,
                            "parallel_s": float(np.median(parallel)),
                            "mean_rounds": mean_rounds,
                            "per_round_s": mean_serial / (4.0 * mean_rounds),
                        }
                    )
    return rows
