"""Experiment harness: seeded sweeps, fault studies and constant tables.

A sweep walks a schedule of (outlier fraction, placement) settings, runs
the configured methods for a number of repetitions and reports one CSV
detail row per run plus one summary row (mean and standard deviation over
repetitions) per setting and method.  Dataset seeds are derived from
(master_seed, schedule index, repetition) only, so adding repetitions or
methods never changes existing rows, and a fixed config reproduces the
file byte for byte (the elapsed-time column aside).
"""

from __future__ import annotations

import csv
import io
import time
from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np
import yaml

from .estimates import Estimate, estimate_to_csv_row, norm, serialized_size
from .framework import (
    Aggregation,
    BreakdownFault,
    CommErrorFault,
    DrlRun,
    FaultModel,
    LatencyFault,
    run_distributed_pca,
    run_distributed_regression,
)
from .geometric_median import coordinate_mean
from .metrics import projection_error, regression_error
from .regression import least_squares, trimmed_regression
from .rpca import projection_from_basis, robust_pca, standard_pca
from .synth import (
    Dataset,
    LrScenario,
    PcaScenario,
    Placement,
    gen_lr,
    gen_pca,
    half_split_fractions,
)
from .theory import (
    effective_outlier_fraction,
    pca_error_bound,
    regression_error_bound,
    tolerance_table,
)

__all__ = [
    "ConfigError",
    "Diagnostics",
    "ExperimentConfig",
    "derive_seed",
    "run_sweep",
    "run_fault_study",
    "table_rows",
    "write_csv",
    "DETAIL_HEADER",
    "trim_level",
]

METHODS = ("drl", "div_avg", "centralized", "standard")

DETAIL_HEADER = [
    "task", "method", "lambda", "placement", "fault", "repetition",
    "relative_error", "lambda_prime", "bound_value", "comm_bytes",
    "elapsed_ms", "error_std", "status",
]

# Ground-truth spectrum of the synthetic PCA generator: signal eigenvalues
# 1 + sigma_e^2, noise floor sigma_e^2, hence a unit gap at d.
_TRUTH_EIGENGAP = 1.0


def trim_level(outlier_fraction: float) -> float:
    """Trim level the harness hands to the learners: min(fraction, 1/2).

    Trimming a majority of the samples is degenerate (the retained minority
    no longer pins down the clean model), so past one half the harness keeps
    the unknown-fraction default of 0.5 instead of tracking the schedule.
    """
    return min(float(outlier_fraction), 0.5)


class ConfigError(ValueError):
    """Invalid experiment configuration."""


def derive_seed(*key: int) -> int:
    """Stable 64-bit seed for a hierarchical key such as (master, step, rep)."""
    ss = np.random.SeedSequence(tuple(int(x) for x in key))
    return int(ss.generate_state(1, np.uint64)[0])


@dataclass(frozen=True)
class Diagnostics:
    """Knobs for the reported (never asserted) error-bound diagnostics."""

    gamma: float = 0.1
    alpha: float = 0.22
    constant: float = 1.0


@dataclass(frozen=True)
class ExperimentConfig:
    task: str  # "pca" | "lr"
    p: int
    n_total: int
    k: int
    d: int | None = None  # PCA only
    sigma_e: float = 1.0
    sigma_o: float = 10.0
    lambda_schedule: tuple[tuple[float, Placement], ...] = ((0.0, Placement.uniform()),)
    methods: tuple[str, ...] = ("drl", "div_avg", "centralized", "standard")
    faults: FaultModel | None = None
    repetitions: int = 10
    master_seed: int = 0
    output_path: str | None = None
    diagnostics: Diagnostics = Diagnostics()

    def __post_init__(self) -> None:
        if self.task not in ("pca", "lr"):
            raise ConfigError(f"task must be 'pca' or 'lr', got {self.task!r}")
        if self.task == "pca" and self.d is None:
            raise ConfigError("PCA experiments need a subspace dimension d")
        if self.repetitions < 1:
            raise ConfigError("repetitions must be at least 1")
        if not self.lambda_schedule:
            raise ConfigError("lambda_schedule must not be empty")
        bad = [m for m in self.methods if m not in METHODS]
        if bad:
            raise ConfigError(f"unknown methods {bad}; choose from {METHODS}")
        if not self.methods:
            raise ConfigError("need at least one method")

    @classmethod
    def from_dict(cls, raw: dict) -> "ExperimentConfig":
        data = dict(raw)
        try:
            task = data.pop("task")
            p = int(data.pop("p"))
            n_total = int(data.pop("n_total"))
            k = int(data.pop("k"))
        except KeyError as exc:
            raise ConfigError(f"missing required config field {exc}") from None
        d = data.pop("d", None)
        schedule = tuple(
            (float(entry["lambda"]), _parse_placement(entry.get("placement"), k))
            for entry in data.pop("lambda_schedule", [{"lambda": 0.0}])
        )
        faults = _parse_faults(data.pop("faults", None))
        diag_raw = data.pop("diagnostics", {}) or {}
        diagnostics = Diagnostics(
            gamma=float(diag_raw.get("gamma", 0.1)),
            alpha=float(diag_raw.get("alpha", 0.22)),
            constant=float(diag_raw.get("constant", 1.0)),
        )
        known = {
            "sigma_e": float, "sigma_o": float, "repetitions": int,
            "master_seed": int, "output_path": str,
        }
        kwargs = {}
        for name, cast in known.items():
            if name in data:
                kwargs[name] = cast(data.pop(name))
        methods = data.pop("methods", None)
        if methods is not None:
            kwargs["methods"] = tuple(str(m) for m in methods)
        if data:
            raise ConfigError(f"unknown config fields: {sorted(data)}")
        return cls(
            task=task, p=p, n_total=n_total, k=k,
            d=int(d) if d is not None else None,
            lambda_schedule=schedule, faults=faults,
            diagnostics=diagnostics, **kwargs,
        )

    @classmethod
    def from_file(cls, path) -> "ExperimentConfig":
        with open(path) as fh:
            raw = yaml.safe_load(fh)
        if not isinstance(raw, dict):
            raise ConfigError(f"config file {path} must hold a mapping")
        return cls.from_dict(raw)


def _parse_placement(raw, k: int) -> Placement:
    if raw is None:
        return Placement.uniform()
    if not isinstance(raw, dict) or "kind" not in raw:
        raise ConfigError(f"placement must be a mapping with a 'kind', got {raw!r}")
    kind = raw["kind"]
    if kind == "uniform":
        return Placement.uniform()
    if kind == "single_node":
        return Placement.single_node()
    if kind == "favorable_half":
        return Placement.favorable_half()
    if kind == "per_node":
        return Placement.per_node(raw["fractions"])
    if kind == "half_split":
        return Placement.per_node(
            half_split_fractions(k, float(raw["high"]), float(raw["low"]))
        )
    raise ConfigError(f"unknown placement kind {kind!r}")


def _parse_faults(raw) -> FaultModel | None:
    if raw is None:
        return None
    if not isinstance(raw, dict):
        raise ConfigError("faults must be a mapping")
    latency = comm = breakdown = None
    if "latency" in raw:
        latency = LatencyFault(**{k: float(v) for k, v in (raw["latency"] or {}).items()})
    if "comm_error" in raw:
        comm = CommErrorFault(**{k: float(v) for k, v in (raw["comm_error"] or {}).items()})
    if "breakdown" in raw:
        b = raw["breakdown"] or {}
        breakdown = BreakdownFault(
            node_indices=frozenset(int(i) for i in b.get("node_indices", ())),
            replacement_magnitude=float(b.get("replacement_magnitude", 1e6)),
        )
    extra = set(raw) - {"latency", "comm_error", "breakdown"}
    if extra:
        raise ConfigError(f"unknown fault fields: {sorted(extra)}")
    return FaultModel(latency=latency, comm_error=comm, breakdown=breakdown)


def _generate(config: ExperimentConfig, lam: float, placement: Placement, seed: int) -> Dataset:
    if config.task == "pca":
        scenario = PcaScenario(
            p=config.p, d=config.d, n_total=config.n_total, outlier_fraction=lam,
            sigma_e=config.sigma_e, sigma_o=config.sigma_o,
            placement=placement, seed=seed,
        )
        return gen_pca(scenario, config.k)
    scenario = LrScenario(
        p=config.p, n_total=config.n_total, outlier_fraction=lam,
        sigma_e=config.sigma_e, sigma_o=config.sigma_o,
        placement=placement, seed=seed,
    )
    return gen_lr(scenario, config.k)


def _error(config: ExperimentConfig, dataset: Dataset, estimate: Estimate) -> float:
    if config.task == "pca":
        return projection_error(estimate, dataset.truth_projection)
    return regression_error(estimate, dataset.truth)


def _bound(config: ExperimentConfig, dataset: Dataset, lambda_prime: float) -> float:
    if config.task == "pca":
        return pca_error_bound(
            _TRUTH_EIGENGAP, lambda_prime, 1.0 + config.sigma_e**2,
            config.p, config.diagnostics.alpha,
        )
    return regression_error_bound(
        norm(dataset.truth), config.sigma_e, lambda_prime,
        config.p, config.diagnostics.constant,
    )


def _run_distributed(config: ExperimentConfig, dataset: Dataset, lam: float, seed: int) -> DrlRun:
    if config.task == "pca":
        return run_distributed_pca(
            dataset, config.k, config.d, trim_level(lam), Aggregation.GEOMETRIC_MEDIAN,
            config.faults, seed,
        )
    return run_distributed_regression(
        dataset, config.k, trim_level(lam), Aggregation.GEOMETRIC_MEDIAN,
        config.faults, seed,
    )


def _centralized(config: ExperimentConfig, dataset: Dataset, lam: float) -> Estimate:
    if config.task == "pca":
        return projection_from_basis(robust_pca(dataset.X, config.d, trim_level(lam)))
    return trimmed_regression(dataset.X, dataset.y, trim_level(lam)).theta


def _standard(config: ExperimentConfig, dataset: Dataset) -> Estimate:
    if config.task == "pca":
        return projection_from_basis(standard_pca(dataset.X, config.d))
    return least_squares(dataset.X, dataset.y).theta


def _fault_token(faults: FaultModel | None) -> str:
    if faults is None or faults.is_empty:
        return "none"
    parts = []
    if faults.latency is not None:
        parts.append("latency")
    if faults.comm_error is not None:
        parts.append("comm_error")
    if faults.breakdown is not None:
        parts.append("breakdown")
    return "+".join(parts)


def _fmt(x: float) -> str:
    return repr(float(x))


class _MethodOutcome:
    __slots__ = ("error", "lambda_prime", "bound", "comm", "elapsed", "status")

    def __init__(self, error=None, lambda_prime=None, bound=None, comm=None,
                 elapsed=0.0, status="ok"):
        self.error = error
        self.lambda_prime = lambda_prime
        self.bound = bound
        self.comm = comm
        self.elapsed = elapsed
        self.status = status


def _run_method(
    config: ExperimentConfig,
    method: str,
    dataset: Dataset,
    lam: float,
    seed: int,
    run_cache: dict,
    estimate_sink: list | None,
    sink_key: tuple,
) -> _MethodOutcome:
    t0 = time.perf_counter()
    try:
        if method in ("drl", "div_avg"):
            # One distributed execution serves both aggregations; the
            # average of the same faulted estimates is bit-identical to an
            # independent average-aggregation run.
            run = run_cache.get("run")
            if run is None:
                run = _run_distributed(config, dataset, lam, seed)
                run_cache["run"] = run
                if estimate_sink is not None:
                    for node, est in enumerate(run.faulted_estimates):
                        estimate_sink.append(
                            [_fmt(sink_key[0]), str(sink_key[1]), str(node)]
                            + estimate_to_csv_row(est).split(",")
                        )
            aggregate = (
                run.aggregate if method == "drl"
                else coordinate_mean(run.faulted_estimates)
            )
            lp = effective_outlier_fraction(run.per_node_lambda, config.diagnostics.gamma)
            return _MethodOutcome(
                error=_error(config, dataset, aggregate),
                lambda_prime=lp,
                bound=_bound(config, dataset, lp),
                comm=run.comm_bytes,
                elapsed=time.perf_counter() - t0,
            )
        if method == "centralized":
            est = _centralized(config, dataset, lam)
        elif method == "standard":
            est = _standard(config, dataset)
        else:  # pragma: no cover - guarded by config validation
            raise ConfigError(f"unknown method {method!r}")
        lp = dataset.overall_outlier_fraction
        return _MethodOutcome(
            error=_error(config, dataset, est),
            lambda_prime=lp,
            bound=_bound(config, dataset, lp) if method == "centralized" else None,
            comm=serialized_size(est),
            elapsed=time.perf_counter() - t0,
        )
    except Exception as exc:  # per-run failures become rows, not aborts
        return _MethodOutcome(
            elapsed=time.perf_counter() - t0, status=f"error:{type(exc).__name__}"
        )


def run_sweep(config: ExperimentConfig, estimate_sink: list | None = None) -> list[list[str]]:
    """Execute the schedule and return CSV rows (header included).

    When ``estimate_sink`` is a list, the per-node estimates communicated in
    each distributed run are appended to it as serialized rows.
    """
    rows = [list(DETAIL_HEADER)]
    fault_token = _fault_token(config.faults)

    for li, (lam, placement) in enumerate(config.lambda_schedule):
        datasets = {}
        run_caches = [dict() for _ in range(config.repetitions)]
        for method in config.methods:
            errors = []
            for rep in range(config.repetitions):
                seed = derive_seed(config.master_seed, li, rep)
                if rep not in datasets:
                    datasets[rep] = _generate(config, lam, placement, seed)
                outcome = _run_method(
                    config, method, datasets[rep], lam, seed,
                    run_caches[rep], estimate_sink, (lam, rep),
                )
                if outcome.error is not None:
                    errors.append(outcome.error)
                rows.append([
                    config.task, method, _fmt(lam), placement.kind.value,
                    fault_token, str(rep),
                    _fmt(outcome.error) if outcome.error is not None else "",
                    _fmt(outcome.lambda_prime) if outcome.lambda_prime is not None else "",
                    _fmt(outcome.bound) if outcome.bound is not None else "",
                    str(outcome.comm) if outcome.comm is not None else "",
                    f"{outcome.elapsed * 1e3:.3f}", "", outcome.status,
                ])
            mean = float(np.mean(errors)) if errors else float("nan")
            std = float(np.std(errors)) if errors else float("nan")
            rows.append([
                config.task, method, _fmt(lam), placement.kind.value,
                fault_token, "summary", _fmt(mean), "", "", "", "",
                _fmt(std), "ok" if errors else "error:NoSuccessfulRuns",
            ])
    return rows


def run_fault_study(config: ExperimentConfig) -> list[list[str]]:
    """Compare median and average fusion under each configured fault type.

    Uses the first schedule entry; one row per fault variant with mean and
    standard deviation over repetitions for both aggregations.
    """
    if config.faults is None or config.faults.is_empty:
        raise ConfigError("fault study needs a fault model with at least one entry")
    variants: list[tuple[str, FaultModel]] = []
    if config.faults.latency is not None:
        variants.append(("latency", FaultModel(latency=config.faults.latency)))
    if config.faults.comm_error is not None:
        variants.append(("comm_error", FaultModel(comm_error=config.faults.comm_error)))
    if config.faults.breakdown is not None:
        variants.append(("breakdown", FaultModel(breakdown=config.faults.breakdown)))

    lam, placement = config.lambda_schedule[0]
    rows = [["fault", "drl_mean", "drl_std", "div_avg_mean", "div_avg_std"]]
    for vi, (name, fault) in enumerate(variants):
        sub = replace(config, faults=fault)
        med_errors, avg_errors = [], []
        for rep in range(config.repetitions):
            # Namespaced away from the sweep's (master, index, rep) keys.
            seed = derive_seed(config.master_seed, 1_000_003 + vi, rep)
            dataset = _generate(config, lam, placement, seed)
            run = _run_distributed(sub, dataset, lam, seed)
            med_errors.append(_error(config, dataset, run.aggregate))
            avg_errors.append(
                _error(config, dataset, coordinate_mean(run.faulted_estimates))
            )
        rows.append([
            name,
            _fmt(np.mean(med_errors)), _fmt(np.std(med_errors)),
            _fmt(np.mean(avg_errors)), _fmt(np.std(avg_errors)),
        ])
    return rows


def table_rows() -> list[list[str]]:
    """The reproduced robustness-constants table as CSV rows."""
    rows = [["beta_star", "alpha", "c_alpha"]]
    for point in tolerance_table():
        rows.append([_fmt(point.beta_star), _fmt(point.alpha), _fmt(point.c_alpha)])
    return rows


def write_csv(rows: Sequence[Sequence[str]], path=None) -> str:
    """Write rows as CSV; returns the text (to ``path`` when given)."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerows(rows)
    text = buf.getvalue()
    if path is not None:
        with open(path, "w", newline="") as fh:
            fh.write(text)
    return text
