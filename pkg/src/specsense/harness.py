"""Seeded Monte Carlo experiments: false alarm, detection, baseline comparison
and GITC threshold design.

Every trial draws a fresh channel, noise block and symbol stream from its own
generator, seeded from ``(master_seed, crc32(experiment_id), trial_index)``.
Trials return raw statistics; thresholds and decisions are applied afterwards,
so results do not depend on how trials are spread over worker processes.
"""
from __future__ import annotations

import csv
import io
import json
import logging
import math
import zlib
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from . import analytics
from .baselines import Baseline, BaselineKind, baseline_statistic, quantile_threshold
from .errors import ConfigError, DomainError, SpecSenseError
from .itc import (Criterion, criterion_threshold, log_gitc_statistic,
                  oitc_estimate)
from .model import (Hypothesis, Mode, ModelDims, correlation_sqrt, exponential_acf,
                    generate_observations, raised_cosine_acf, sample_channel, whiten,
                    whitening_matrix)
from .spectrum import block_spectrum

log = logging.getLogger(__name__)

SCHEMA_VERSION = 1
CSV_HEADER = ["detector", "hypothesis", "snr_db", "trials", "decisions_h1",
              "p_hat", "std_err", "analytic"]
SEED_SCHEME = "numpy SeedSequence([master_seed, crc32(experiment_id), trial_index])"


# ---------------------------------------------------------------- detectors

@dataclass(frozen=True)
class DetectorSpec:
    family: str  # sitc | oitc | gitc | baseline
    criterion: Criterion | None = None
    gamma: float | None = None
    baseline: Baseline | None = None
    threshold: float | None = None

    @property
    def name(self) -> str:
        if self.family in ("sitc", "oitc"):
            return f"{self.family}-{self.criterion.value.lower()}"
        if self.family == "gitc":
            return f"gitc:{self.gamma!r}"
        base = self.baseline.name.lower()
        return base if self.threshold is None else f"{base}@{self.threshold:.17g}"

    @property
    def is_itc(self) -> bool:
        return self.family != "baseline"

    def itc_gamma(self, p: int, N: int) -> float | None:
        if self.family == "gitc":
            return self.gamma
        if self.family in ("sitc", "oitc"):
            return criterion_threshold(self.criterion, p, N)
        return None

    def overlay_key(self) -> str | None:
        """Key of the analytic P_d overlay this detector uses, if any."""
        if self.family in ("sitc", "oitc"):
            return self.criterion.value
        if self.family == "gitc":
            return f"gamma:{self.gamma!r}"
        return None


_BASELINE_NAMES = {
    "ed": BaselineKind.ED, "ev-mme": BaselineKind.EV_MME, "ev-eme": BaselineKind.EV_EME,
    "ev-bced": BaselineKind.EV_BCED, "ev-agm": BaselineKind.EV_AGM,
}


def parse_detector(text: str) -> DetectorSpec:
    """Parse ``sitc-aic``, ``oitc-mdl``, ``gitc:1.0372``, ``ev-agm``, ``ed-unc:1.5``, ...

    Baselines accept a fixed threshold suffix ``@value``.
    """
    raw = text.strip().lower()
    if raw in ("sitc-aic", "sitc-mdl", "oitc-aic", "oitc-mdl"):
        fam, crit = raw.split("-")
        return DetectorSpec(fam, criterion=Criterion(crit.upper()))
    if raw.startswith("gitc:"):
        try:
            gamma = float(raw[5:])
        except ValueError:
            raise ConfigError(f"detectors: bad GITC threshold in {text!r}") from None
        if not gamma >= 1.0:
            raise ConfigError(f"detectors: GITC gamma must be >= 1 in {text!r}")
        return DetectorSpec("gitc", gamma=gamma)
    body, _, thr = raw.partition("@")
    threshold = None
    if thr:
        try:
            threshold = float(thr)
        except ValueError:
            raise ConfigError(f"detectors: bad threshold in {text!r}") from None
    if body in _BASELINE_NAMES:
        return DetectorSpec("baseline", baseline=Baseline(_BASELINE_NAMES[body]), threshold=threshold)
    if body.startswith("ed-unc:"):
        try:
            x_db = float(body[7:])
        except ValueError:
            raise ConfigError(f"detectors: bad noise uncertainty in {text!r}") from None
        if x_db < 0:
            raise ConfigError(f"detectors: noise uncertainty must be >= 0 in {text!r}")
        return DetectorSpec("baseline", baseline=Baseline(BaselineKind.ED_UNCERTAIN, x_db),
                            threshold=threshold)
    raise ConfigError(f"detectors: unknown detector {text!r}")


# ------------------------------------------------------------------- config

_CONFIG_KEYS = {
    "schema", "M", "K", "L", "N", "snr_db", "trials", "detectors", "seed", "mode",
    "filter", "whiten", "baseline_pf", "calibration_trials", "analytic_bias", "targets",
    "workers", "overlays", "out", "format",
}


def parse_snr_grid(value: Any) -> list[float]:
    """A list of numbers, a single number, or ``start:step:stop`` (inclusive)."""
    if isinstance(value, str):
        parts = value.split(":")
        try:
            nums = [float(x) for x in parts]
        except ValueError:
            raise ConfigError(f"snr_db: cannot parse {value!r}") from None
        if len(nums) == 1:
            return nums
        if len(nums) != 3 or nums[1] == 0:
            raise ConfigError(f"snr_db: expected start:step:stop, got {value!r}")
        start, step, stop = nums
        count = int(math.floor((stop - start) / step + 1e-9)) + 1
        if count < 1:
            raise ConfigError(f"snr_db: empty range {value!r}")
        return [round(start + i * step, 10) for i in range(count)]
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return [float(value)]
    if isinstance(value, list) and value:
        try:
            return [float(x) for x in value]
        except (TypeError, ValueError):
            raise ConfigError(f"snr_db: non-numeric entry in {value!r}") from None
    raise ConfigError(f"snr_db: expected list, number or start:step:stop, got {value!r}")


@dataclass
class ExperimentConfig:
    M: int = 5
    K: int = 4
    L: int = 10
    N: int = 10000
    snr_db: list = field(default_factory=lambda: [0.0])
    trials: int = 1000
    detectors: list = field(default_factory=lambda: ["sitc-aic", "sitc-mdl", "oitc-aic", "oitc-mdl"])
    seed: int = 0
    mode: str = Mode.MULTI_ANTENNA.value
    filter: dict = field(default_factory=lambda: {"kind": "exponential", "corr_time": 0.5})
    whiten: bool = True
    baseline_pf: float | None = None
    calibration_trials: int | None = None
    analytic_bias: float = 0.02
    targets: list = field(default_factory=lambda: [0.1, 0.05, 0.01])
    workers: int = 1
    overlays: bool = True
    out: str | None = None
    format: str = "csv"

    def __post_init__(self):
        self.validate()

    def validate(self) -> None:
        for key in ("M", "K", "L", "N", "trials", "workers"):
            v = getattr(self, key)
            if isinstance(v, bool) or not isinstance(v, int) or v < 1:
                raise ConfigError(f"{key}: must be a positive integer, got {v!r}")
        if isinstance(self.seed, bool) or not isinstance(self.seed, int) or not 0 <= self.seed < 2**64:
            raise ConfigError(f"seed: must be an integer in [0, 2^64), got {self.seed!r}")
        self.snr_db = parse_snr_grid(self.snr_db)
        if not all(math.isfinite(x) for x in self.snr_db):
            raise ConfigError("snr_db: values must be finite")
        if not isinstance(self.detectors, list) or not self.detectors:
            raise ConfigError("detectors: must be a non-empty list")
        self.detector_specs = [parse_detector(str(d)) for d in self.detectors]
        try:
            Mode(self.mode)
        except ValueError:
            raise ConfigError(f"mode: unknown mode {self.mode!r}") from None
        if not isinstance(self.filter, dict) or self.filter.get("kind") not in ("exponential", "raised-cosine"):
            raise ConfigError(f"filter: kind must be 'exponential' or 'raised-cosine', got {self.filter!r}")
        if self.baseline_pf is not None and not 0 < self.baseline_pf < 1:
            raise ConfigError(f"baseline_pf: must lie in (0, 1), got {self.baseline_pf!r}")
        if self.calibration_trials is not None and (
                not isinstance(self.calibration_trials, int) or self.calibration_trials < 1):
            raise ConfigError(f"calibration_trials: must be a positive integer, got {self.calibration_trials!r}")
        if not 0 <= self.analytic_bias < 1:
            raise ConfigError(f"analytic_bias: must lie in [0, 1), got {self.analytic_bias!r}")
        if not self.targets or not all(0 < t < 1 for t in self.targets):
            raise ConfigError(f"targets: probabilities in (0, 1) required, got {self.targets!r}")
        if self.format not in ("csv", "json"):
            raise ConfigError(f"format: must be 'csv' or 'json', got {self.format!r}")
        try:
            self.dims
        except SpecSenseError as exc:
            raise ConfigError(f"M/K/L: {exc}") from None

    @property
    def dims(self) -> ModelDims:
        return ModelDims(self.M, self.K, self.L, self.N)

    def to_dict(self) -> dict:
        d = asdict(self)
        d.pop("detector_specs", None)
        return {"schema": SCHEMA_VERSION, **d}

    @classmethod
    def from_dict(cls, obj: dict) -> "ExperimentConfig":
        if not isinstance(obj, dict):
            raise ConfigError("config: top level must be a JSON object")
        unknown = sorted(set(obj) - _CONFIG_KEYS)
        if unknown:
            raise ConfigError(f"{unknown[0]}: unknown config key")
        schema = obj.get("schema", SCHEMA_VERSION)
        if schema != SCHEMA_VERSION:
            raise ConfigError(f"schema: unsupported version {schema!r}")
        kwargs = {k: v for k, v in obj.items() if k != "schema"}
        try:
            return cls(**kwargs)
        except TypeError as exc:
            raise ConfigError(f"config: {exc}") from None

    @classmethod
    def from_json_file(cls, path: str | Path) -> "ExperimentConfig":
        path = Path(path)
        try:
            text = path.read_text()
        except OSError as exc:
            raise ConfigError(f"config file {path}: {exc.strerror or exc}") from None
        try:
            obj = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config file {path}: invalid JSON ({exc})") from None
        return cls.from_dict(obj)

    def replace(self, **changes) -> "ExperimentConfig":
        d = self.to_dict()
        d.update(changes)
        return ExperimentConfig.from_dict(d)


# ------------------------------------------------------------------- trials

def trial_rng(master_seed: int, experiment_id: str, trial_index: int) -> np.random.Generator:
    tag = zlib.crc32(experiment_id.encode("utf-8"))
    return np.random.default_rng(np.random.SeedSequence([master_seed, tag, trial_index]))


@dataclass
class TrialStats:
    log_t: float
    sigma2: float
    k_hat: dict = field(default_factory=dict)
    baseline: dict = field(default_factory=dict)
    unc_factor: dict = field(default_factory=dict)
    overlay: dict = field(default_factory=dict)


@dataclass(frozen=True)
class _Job:
    cfg: ExperimentConfig
    experiment_id: str
    snr_db: float
    hypothesis: Hypothesis
    overlay_gammas: tuple  # ((key, criterion-or-gamma), ...)


def _noise_filter(cfg: ExperimentConfig, dims: ModelDims):
    spec = dict(cfg.filter)
    kind = spec.pop("kind")
    acf = exponential_acf(dims, **spec) if kind == "exponential" else raised_cosine_acf(dims, **spec)
    return correlation_sqrt(acf, dims), whitening_matrix(acf, dims)


def _run_one(job: _Job, index: int, filt) -> TrialStats:
    cfg = job.cfg
    dims = cfg.dims
    mode = Mode(cfg.mode)
    rng = trial_rng(cfg.seed, job.experiment_id, index)
    ch = sample_channel(dims, rng, mode)
    shaping = filt[0] if filt is not None else None
    block = generate_observations(ch, dims, job.snr_db, job.hypothesis, rng, shaping)
    if filt is not None and cfg.whiten:
        block = whiten(block, filt[1])
    spec = block_spectrum(block)
    stats = TrialStats(log_gitc_statistic(spec), block.noise_power)
    specs = cfg.detector_specs
    for d in specs:
        if d.family == "oitc" and d.criterion.value not in stats.k_hat:
            stats.k_hat[d.criterion.value] = oitc_estimate(spec, d.criterion)
    energy = block.energy
    for d in specs:
        if d.family != "baseline":
            continue
        kind = d.baseline.kind
        key = BaselineKind.ED.value if kind is BaselineKind.ED_UNCERTAIN else kind.value
        if key not in stats.baseline:
            stats.baseline[key] = baseline_statistic(BaselineKind(key), spec, energy,
                                                     block.noise_power)
    for d in specs:
        if d.family == "baseline" and d.baseline.kind is BaselineKind.ED_UNCERTAIN:
            x_db = d.baseline.x_db
            if x_db not in stats.unc_factor:
                stats.unc_factor[x_db] = 10.0 ** (rng.uniform(-x_db, x_db) / 10.0) if x_db > 0 else 1.0
    if job.hypothesis is Hypothesis.H1 and mode is Mode.MULTI_ANTENNA:
        for key, arg in job.overlay_gammas:
            est = analytics.pd_conditional(ch, dims, block.noise_power, arg)
            stats.overlay[key] = (est.estimate, est.lower, est.upper)
    return stats


def _run_chunk(job: _Job, indices: range) -> list[TrialStats]:
    filt = _noise_filter(job.cfg, job.cfg.dims) if Mode(job.cfg.mode) is Mode.OVER_SAMPLING else None
    return [_run_one(job, i, filt) for i in indices]


def simulate(cfg: ExperimentConfig, experiment_id: str, snr_db: float,
             hypothesis: Hypothesis, trials: int | None = None,
             overlays: bool = False) -> list[TrialStats]:
    """Run ``trials`` independent trials, in order of trial index."""
    trials = cfg.trials if trials is None else trials
    overlay_gammas = ()
    if overlays and cfg.overlays:
        seen = {}
        for d in cfg.detector_specs:
            key = d.overlay_key()
            if key is not None and key not in seen:
                seen[key] = d.criterion if d.family != "gitc" else d.gamma
        overlay_gammas = tuple(seen.items())
    job = _Job(cfg, experiment_id, float(snr_db), Hypothesis(hypothesis), overlay_gammas)
    workers = max(1, min(cfg.workers, trials))
    if workers == 1:
        return _run_chunk(job, range(trials))
    bounds = np.linspace(0, trials, workers + 1).astype(int)
    chunks = [range(bounds[i], bounds[i + 1]) for i in range(workers)]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        parts = list(pool.map(_run_chunk, [job] * workers, chunks))
    return [s for part in parts for s in part]


# ---------------------------------------------------------------- decisions

def decisions(d: DetectorSpec, stats: list[TrialStats], p: int, N: int,
              thresholds: dict) -> np.ndarray:
    """Boolean H1 decisions of detector ``d`` over a list of trials."""
    if d.family == "oitc":
        return np.array([s.k_hat[d.criterion.value] > 0 for s in stats], dtype=bool)
    if d.family in ("sitc", "gitc"):
        log_gamma = math.log(d.itc_gamma(p, N))
        return np.array([s.log_t > log_gamma for s in stats], dtype=bool)
    thr = thresholds[d.name]
    kind = d.baseline.kind
    if kind is BaselineKind.ED_UNCERTAIN:
        x = d.baseline.x_db
        return np.array([s.baseline["ED"] * s.unc_factor[x] > thr for s in stats], dtype=bool)
    return np.array([s.baseline[kind.value] > thr for s in stats], dtype=bool)


def std_error(p_hat: float, n: int) -> float:
    return math.sqrt(max(p_hat * (1.0 - p_hat), 0.0) / n) if n > 0 else float("nan")


@dataclass
class ResultRow:
    detector: str
    hypothesis: str
    snr_db: str
    trials: int
    decisions_h1: int
    analytic: float | None = None
    lower: float | None = None
    upper: float | None = None

    @property
    def p_hat(self) -> float:
        return self.decisions_h1 / self.trials

    @property
    def std_err(self) -> float:
        return std_error(self.p_hat, self.trials)

    def csv_fields(self) -> list[str]:
        analytic = "" if self.analytic is None else repr(float(self.analytic))
        return [self.detector, self.hypothesis, self.snr_db, str(self.trials),
                str(self.decisions_h1), repr(self.p_hat), repr(self.std_err), analytic]

    def to_json(self) -> dict:
        d = dict(zip(CSV_HEADER, [self.detector, self.hypothesis, self.snr_db, self.trials,
                                  self.decisions_h1, self.p_hat, self.std_err, self.analytic]))
        if self.lower is not None:
            d["analytic_lower"], d["analytic_upper"] = self.lower, self.upper
        return d


@dataclass
class ExperimentReport:
    experiment: str
    config: ExperimentConfig
    rows: list = field(default_factory=list)
    extra: dict = field(default_factory=dict)
    experiment_ids: list = field(default_factory=list)

    def row(self, detector: str, hypothesis: str = None, snr_db=None) -> ResultRow:
        for r in self.rows:
            if r.detector != detector:
                continue
            if hypothesis is not None and r.hypothesis != hypothesis:
                continue
            if snr_db is not None and r.snr_db != _snr_label(snr_db):
                continue
            return r
        raise KeyError((detector, hypothesis, snr_db))

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for r in self.rows:
            writer.writerow(r.csv_fields())
        return buf.getvalue()

    def to_json(self) -> str:
        obj = {
            "schema": SCHEMA_VERSION,
            "experiment": self.experiment,
            "config": self.config.to_dict(),
            "rows": [r.to_json() for r in self.rows],
            "extra": self.extra,
            "seeding": {"scheme": SEED_SCHEME, "master_seed": self.config.seed,
                        "experiment_ids": self.experiment_ids},
        }
        return json.dumps(obj, indent=2, sort_keys=True, default=_json_default)

    def write(self, path: str | Path | None = None, fmt: str | None = None) -> str:
        fmt = fmt or self.config.format
        text = self.to_csv() if fmt == "csv" else self.to_json()
        if path is not None:
            Path(path).write_text(text)
        return text


def _json_default(obj):
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    raise TypeError(f"not JSON serialisable: {type(obj).__name__}")


def _snr_label(snr) -> str:
    return snr if isinstance(snr, str) else repr(float(snr))


def _count_row(d: DetectorSpec, hyp: Hypothesis, snr, stats, cfg, thresholds,
               analytic=None) -> ResultRow:
    dec = decisions(d, stats, cfg.dims.p, cfg.N, thresholds)
    row = ResultRow(d.name, hyp.value, _snr_label(snr), len(stats), int(dec.sum()))
    if analytic is not None:
        row.analytic = analytic
    return row


def _pf_overlay(d: DetectorSpec, cfg: ExperimentConfig) -> float | None:
    gamma = d.itc_gamma(cfg.dims.p, cfg.N)
    return None if gamma is None else analytics.pf_analytic(cfg.dims.p, cfg.N, gamma)


def _pd_overlay(d: DetectorSpec, stats: list[TrialStats]):
    key = d.overlay_key()
    if key is None or not stats or key not in stats[0].overlay:
        return None
    arr = np.array([s.overlay[key] for s in stats])
    est, lo, hi = arr.mean(axis=0)
    return float(est), float(lo), float(hi)


def _fixed_thresholds(cfg: ExperimentConfig) -> dict:
    return {d.name: d.threshold for d in cfg.detector_specs
            if d.family == "baseline" and d.threshold is not None}


def _calibration_stats(cfg: ExperimentConfig, report: ExperimentReport) -> list[TrialStats]:
    report.experiment_ids.append("calibration")
    return simulate(cfg, "calibration", cfg.snr_db[0], Hypothesis.H0,
                    cfg.calibration_trials or cfg.trials)


def _calibrate_baselines(cfg: ExperimentConfig, target: float, report: ExperimentReport,
                         thresholds: dict, stats: list[TrialStats] | None = None) -> dict:
    """Empirical thresholds for baselines lacking one; ED-UNC shares ED's."""
    need = [d for d in cfg.detector_specs if d.family == "baseline" and d.name not in thresholds]
    if not need:
        return thresholds
    n_cal = cfg.calibration_trials or cfg.trials
    if n_cal < math.ceil(20.0 / target):
        raise DomainError(
            f"calibration infeasible: {n_cal} trials cannot resolve P_f={target:g} "
            f"(need {math.ceil(20.0 / target)})"
        )
    if stats is None:
        stats = _calibration_stats(cfg, report)
    out = dict(thresholds)
    for d in need:
        kind = d.baseline.kind
        key = BaselineKind.ED.value if kind is BaselineKind.ED_UNCERTAIN else kind.value
        # equal nominal threshold: the uncertain detector reuses plain ED's
        out[d.name] = quantile_threshold(np.array([s.baseline[key] for s in stats]), target)
    report.extra["calibration"] = {"target_pf": target, "trials": n_cal,
                                   "thresholds": {k: out[k] for k in sorted(out)}}
    return out


# -------------------------------------------------------------- experiments

def run_pf_experiment(cfg: ExperimentConfig) -> ExperimentReport:
    """False-alarm rates on noise-only trials, one row per detector and SNR."""
    report = ExperimentReport("pf", cfg)
    thresholds = _fixed_thresholds(cfg)
    if any(d.family == "baseline" and d.name not in thresholds for d in cfg.detector_specs):
        thresholds = _calibrate_baselines(cfg, cfg.baseline_pf or 0.05, report, thresholds)
    all_stats = []
    for snr in cfg.snr_db:
        exp_id = f"pf/snr={snr!r}"
        report.experiment_ids.append(exp_id)
        stats = simulate(cfg, exp_id, snr, Hypothesis.H0)
        all_stats.extend(stats)
        for d in cfg.detector_specs:
            report.rows.append(_count_row(d, Hypothesis.H0, snr, stats, cfg, thresholds,
                                          _pf_overlay(d, cfg)))
    if len(cfg.snr_db) > 1:
        for d in cfg.detector_specs:
            report.rows.append(_count_row(d, Hypothesis.H0, "all", all_stats, cfg, thresholds,
                                          _pf_overlay(d, cfg)))
    report.extra["agreement"] = _agreement(cfg, all_stats)
    return report


def _agreement(cfg: ExperimentConfig, stats: list[TrialStats]) -> dict:
    """SITC vs OITC decision agreement per criterion (when both are configured)."""
    names = {d.name: d for d in cfg.detector_specs}
    out = {}
    for crit in ("aic", "mdl"):
        s, o = names.get(f"sitc-{crit}"), names.get(f"oitc-{crit}")
        if s is None or o is None or not stats:
            continue
        a = decisions(s, stats, cfg.dims.p, cfg.N, {})
        b = decisions(o, stats, cfg.dims.p, cfg.N, {})
        out[crit.upper()] = {"agree": int(np.sum(a == b)), "trials": len(stats)}
    return out


def run_pd_experiment(cfg: ExperimentConfig) -> ExperimentReport:
    """Detection rates on signal-present trials across the SNR grid."""
    report = ExperimentReport("pd", cfg)
    thresholds = _fixed_thresholds(cfg)
    if any(d.family == "baseline" and d.name not in thresholds for d in cfg.detector_specs):
        thresholds = _calibrate_baselines(cfg, cfg.baseline_pf or 0.05, report, thresholds)
    agreement_stats = []
    for snr in cfg.snr_db:
        exp_id = f"pd/snr={snr!r}"
        report.experiment_ids.append(exp_id)
        stats = simulate(cfg, exp_id, snr, Hypothesis.H1, overlays=True)
        agreement_stats.extend(stats)
        for d in cfg.detector_specs:
            row = _count_row(d, Hypothesis.H1, snr, stats, cfg, thresholds)
            ov = _pd_overlay(d, stats)
            if ov is not None:
                row.analytic, row.lower, row.upper = ov
            report.rows.append(row)
    report.extra["agreement"] = _agreement(cfg, agreement_stats)
    return report


def _ensure(cfg: ExperimentConfig, names: list[str]) -> ExperimentConfig:
    present = [d.name for d in cfg.detector_specs]
    missing = [n for n in names if parse_detector(n).name not in present]
    return cfg.replace(detectors=list(cfg.detectors) + missing) if missing else cfg


def run_comparison(cfg: ExperimentConfig) -> ExperimentReport:
    """Joint P_f / P_d table of ITC and baseline detectors at matched P_f.

    Baselines without a fixed threshold are calibrated on a separate
    noise-only stream at SITC-AIC's empirical false-alarm rate on that stream.
    """
    cfg = _ensure(cfg, ["sitc-aic"])
    report = ExperimentReport("compare", cfg)
    thresholds = _fixed_thresholds(cfg)
    if any(d.family == "baseline" and d.name not in thresholds for d in cfg.detector_specs):
        cal = _calibration_stats(cfg, report)
        sitc = parse_detector("sitc-aic")
        target = float(decisions(sitc, cal, cfg.dims.p, cfg.N, {}).mean())
        if target <= 0.0:
            raise DomainError("calibration infeasible: SITC-AIC produced no false alarms "
                              f"in {len(cal)} calibration trials")
        report.extra["sitc_aic_calibration_pf"] = target
        thresholds = _calibrate_baselines(cfg, target, report, thresholds, cal)
    report.experiment_ids.append("compare/H0")
    h0 = simulate(cfg, "compare/H0", cfg.snr_db[0], Hypothesis.H0)
    for d in cfg.detector_specs:
        report.rows.append(_count_row(d, Hypothesis.H0, "all", h0, cfg, thresholds,
                                      _pf_overlay(d, cfg)))
    for snr in cfg.snr_db:
        exp_id = f"compare/H1/snr={snr!r}"
        report.experiment_ids.append(exp_id)
        stats = simulate(cfg, exp_id, snr, Hypothesis.H1, overlays=True)
        for d in cfg.detector_specs:
            row = _count_row(d, Hypothesis.H1, snr, stats, cfg, thresholds)
            ov = _pd_overlay(d, stats)
            if ov is not None:
                row.analytic, row.lower, row.upper = ov
            report.rows.append(row)
    return report


def gitc_gammas(cfg: ExperimentConfig, targets=None) -> dict:
    """Analytic GITC thresholds per target, inflated by ``analytic_bias``."""
    targets = cfg.targets if targets is None else targets
    p, N = cfg.dims.p, cfg.N
    return {t: analytics.calibrate_gamma(min(t + cfg.analytic_bias, 1 - 1e-9), p, N)
            for t in targets}


def run_gitc_threshold_experiment(cfg: ExperimentConfig, targets=None) -> ExperimentReport:
    """GITC at thresholds designed for each P_f target: empirical P_f and P_d curves."""
    targets = list(cfg.targets if targets is None else targets)
    gammas = gitc_gammas(cfg, targets)
    dets = [f"gitc:{gammas[t]!r}" for t in targets]
    run_cfg = cfg.replace(detectors=dets, targets=targets)
    report = ExperimentReport("gitc", run_cfg)
    report.extra["gammas"] = {repr(t): gammas[t] for t in targets}
    report.extra["analytic_bias"] = cfg.analytic_bias
    report.experiment_ids.append("gitc/H0")
    h0 = simulate(run_cfg, "gitc/H0", run_cfg.snr_db[0], Hypothesis.H0)
    for d in run_cfg.detector_specs:
        report.rows.append(_count_row(d, Hypothesis.H0, "all", h0, run_cfg, {},
                                      _pf_overlay(d, run_cfg)))
    for snr in run_cfg.snr_db:
        exp_id = f"gitc/H1/snr={snr!r}"
        report.experiment_ids.append(exp_id)
        stats = simulate(run_cfg, exp_id, snr, Hypothesis.H1, overlays=True)
        for d in run_cfg.detector_specs:
            row = _count_row(d, Hypothesis.H1, snr, stats, run_cfg, {})
            ov = _pd_overlay(d, stats)
            if ov is not None:
                row.analytic, row.lower, row.upper = ov
            report.rows.append(row)
    return report
