"""Monte Carlo sweep harness: runs seeded recovery trials over a noise grid
and accumulates per-symbol detection error rates into deterministic CSV rows.

Noise points are given on the Figure-style axis -10*log10(sigma2) in dB. Each
trial derives its own random substream from (master_seed, point index, trial
index), so results do not depend on execution order and trials can run in any
order or in parallel.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass

import numpy as np

from . import amp_discrete, baselines
from .measurement import (MatrixKind, MeasurementMatrix, load_matrix,
                          make_rademacher, make_random_demodulator)
from .signal_model import Alphabet, SparseSignal, draw_signal, make_prior, observe

__all__ = [
    "ExperimentConfig",
    "SweepRecord",
    "detection_error_rate",
    "run_sweep",
    "write_csv",
    "load_config",
    "KNOWN_ALGORITHMS",
]

KNOWN_ALGORITHMS = ("amp_discrete", "amp_bpdn_k_largest", "amp_bpdn_threshold")

DECISION_RULES = {
    "amp_discrete": "map",
    "amp_bpdn_k_largest": "k_largest",
    "amp_bpdn_threshold": "threshold",
}

CSV_COLUMNS = ("matrix_kind", "algorithm", "decision_rule", "W", "R", "K", "T",
               "sigma2_db", "trials", "symbols_total", "symbol_errors",
               "error_rate", "master_seed")


@dataclass
class ExperimentConfig:
    """One Monte Carlo experiment: matrix ensemble, dimensions, noise grid."""

    matrix_kind: str                      # rademacher | random_demodulator | external
    W: int
    R: int
    K: int
    sigma2_grid_db: list[float]
    trials_per_point: int
    master_seed: int
    Rprime: int | None = None
    alphabet: tuple[float, ...] = (-1.0, 1.0)
    T: int = 50
    algorithms: tuple[str, ...] = ("amp_discrete", "amp_bpdn_k_largest")
    stop_tol: float | None = 1e-8
    kappa: float = baselines.KAPPA_DEFAULT
    threshold_alpha: float = 0.5          # used by amp_bpdn_threshold only
    fresh_matrix_per_trial: bool = True
    external_matrix_path: str | None = None

    def __post_init__(self):
        if self.matrix_kind not in ("rademacher", "random_demodulator", "external"):
            raise ValueError(f"unknown matrix kind {self.matrix_kind!r}")
        if self.matrix_kind == "random_demodulator":
            if self.Rprime is None or self.R != 2 * self.Rprime:
                raise ValueError("random demodulator requires R = 2 * Rprime")
        if self.matrix_kind == "external" and not self.external_matrix_path:
            raise ValueError("external matrix kind requires external_matrix_path")
        if self.trials_per_point < 1:
            raise ValueError("need at least one trial per point")
        if not self.sigma2_grid_db:
            raise ValueError("noise grid must be nonempty")
        for algo in self.algorithms:
            if algo not in KNOWN_ALGORITHMS:
                raise ValueError(f"unknown algorithm {algo!r}")


@dataclass(frozen=True)
class SweepRecord:
    """One CSV row: error counts for one (noise point, algorithm) pair."""

    matrix_kind: str
    algorithm: str
    decision_rule: str
    W: int
    R: int
    K: int
    T: int
    sigma2_db: float
    trials: int
    symbols_total: int
    symbol_errors: int
    error_rate: float
    master_seed: int


def detection_error_rate(truth: SparseSignal | np.ndarray,
                         estimate: np.ndarray) -> tuple[int, int]:
    """Count exact symbol mismatches; returns (errors, total)."""
    b = truth.entries if isinstance(truth, SparseSignal) else np.asarray(truth)
    est = np.asarray(estimate)
    if b.shape != est.shape:
        raise ValueError(f"length mismatch: {b.shape} vs {est.shape}")
    return int(np.count_nonzero(b != est)), int(b.size)


def _trial_rng(master_seed: int, point: int, trial: int) -> np.random.Generator:
    return np.random.default_rng([master_seed, point, trial])


def _draw_matrix(config: ExperimentConfig, rng,
                 fixed: MeasurementMatrix | None) -> MeasurementMatrix:
    if fixed is not None:
        return fixed
    if config.matrix_kind == "rademacher":
        return make_rademacher(config.W, config.R, rng)
    return make_random_demodulator(config.W, config.Rprime, rng)


def _run_trial(config: ExperimentConfig, point: int, trial: int,
               sigma2: float, fixed: MeasurementMatrix | None) -> dict[str, int]:
    """Run one seeded instance through every configured algorithm; returns
    symbol-error counts keyed by algorithm."""
    rng = _trial_rng(config.master_seed, point, trial)
    alphabet = Alphabet(config.alphabet)
    prior = make_prior(alphabet, config.K, config.W)
    matrix = _draw_matrix(config, rng, fixed)
    signal = draw_signal(alphabet, config.K, config.W, rng)
    obs = observe(matrix, signal, sigma2, rng)

    errors: dict[str, int] = {}
    bpdn_estimate = None
    for algo in config.algorithms:
        if algo == "amp_discrete":
            result = amp_discrete.run(matrix, obs.samples, sigma2, prior,
                                      T=config.T, stop_tol=config.stop_tol)
            decided = result.estimate
        else:
            if bpdn_estimate is None:
                bpdn_estimate = baselines.amp_bpdn_recover(
                    matrix, obs.samples, sigma2, config.T, kappa=config.kappa)
            if algo == "amp_bpdn_k_largest":
                decided = baselines.decide_k_largest(bpdn_estimate, config.K)
            else:
                decided = baselines.decide_threshold(bpdn_estimate,
                                                     config.threshold_alpha)
        n_err, _ = detection_error_rate(signal, decided)
        errors[algo] = n_err
    return errors


def run_sweep(config: ExperimentConfig,
              trial_order: list[int] | None = None) -> list[SweepRecord]:
    """Run the full sweep and return one record per (noise point, algorithm).

    ``trial_order`` permutes trial execution within each point (testing hook);
    the records are identical for any permutation because substreams are keyed
    by trial index.
    """
    fixed = None
    if config.matrix_kind == "external":
        fixed = load_matrix(config.external_matrix_path)
        if fixed.entries.shape != (config.R, config.W):
            raise ValueError("external matrix does not match configured R x W")
    elif not config.fresh_matrix_per_trial:
        fixed = _draw_matrix(
            config, _trial_rng(config.master_seed, 2 ** 32 - 1, 0), None)

    order = trial_order if trial_order is not None \
        else list(range(config.trials_per_point))
    if sorted(order) != list(range(config.trials_per_point)):
        raise ValueError("trial_order must be a permutation of the trial indices")

    records = []
    for point, db in enumerate(config.sigma2_grid_db):
        sigma2 = 10.0 ** (-db / 10.0)
        counts = {algo: np.zeros(config.trials_per_point, dtype=np.int64)
                  for algo in config.algorithms}
        for trial in order:
            try:
                trial_errors = _run_trial(config, point, trial, sigma2, fixed)
            except Exception as exc:
                raise RuntimeError(
                    f"trial {trial} at grid point {point} ({db} dB) failed: {exc}"
                ) from exc
            for algo, n_err in trial_errors.items():
                counts[algo][trial] = n_err
        total = config.trials_per_point * config.W
        for algo in config.algorithms:
            n_err = int(counts[algo].sum())
            records.append(SweepRecord(
                matrix_kind=config.matrix_kind, algorithm=algo,
                decision_rule=DECISION_RULES[algo], W=config.W, R=config.R,
                K=config.K, T=config.T, sigma2_db=float(db),
                trials=config.trials_per_point, symbols_total=total,
                symbol_errors=n_err, error_rate=n_err / total,
                master_seed=config.master_seed))
    return records


def _format_field(value) -> str:
    if isinstance(value, float):
        return f"{value:.17g}"
    return str(value)


def write_csv(records: list[SweepRecord], path) -> None:
    """Frozen CSV schema: header then one row per record, floats at 17
    significant digits."""
    with open(path, "w", newline="\n") as fh:
        fh.write(",".join(CSV_COLUMNS) + "\n")
        for rec in records:
            row = asdict(rec)
            fh.write(",".join(_format_field(row[c]) for c in CSV_COLUMNS) + "\n")


def load_config(path) -> ExperimentConfig:
    """Read an ExperimentConfig from a JSON file whose keys mirror the
    dataclass fields."""
    with open(path) as fh:
        raw = json.load(fh)
    if "alphabet" in raw:
        raw["alphabet"] = tuple(raw["alphabet"])
    if "algorithms" in raw:
        raw["algorithms"] = tuple(raw["algorithms"])
    return ExperimentConfig(**raw)
