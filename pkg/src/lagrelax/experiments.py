"""Config-driven rate experiments with exact excess risks.

Each trial derives an independent seed from (master_seed, learner, s, N,
trial) via an 8-byte blake2b digest, samples N objective vectors from the
hard family, runs the learner, and scores it against the family's closed
form — excess dual risk R(pi*) - R(pi_learned) for sga/erm (dual-lb
variant) or squared distance to the population mean for the warm start
(warmstart-lb variant). No Monte Carlo test sets anywhere, so rate fits
see only learning noise.

Records sort by (learner, s, N, trial) before writing; together with the
per-trial seeds this makes the CSV independent of the worker count.
"""

from __future__ import annotations

import hashlib
import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .bounds import erm_excess_bound, sga_bound, warmstart_bound
from .errors import ConfigError
from .hardfamily import (
    HardFamilySpec,
    max_population_risk,
    objective_variance,
    optimal_warmstart,
    population_risk,
    sample_objectives,
)
from .learners import (
    SgaConfig,
    erm_learn_restricted,
    sga_learn_restricted,
    warmstart_learn_restricted,
)

LEARNERS = ("sga", "erm", "warmstart")
V_PATTERNS = ("zeros", "ones", "alternating")
CSV_HEADER = "learner,s,N,trial,seed,excess_risk,theory_bound,runtime_ms"


def derive_trial_seed(master_seed: int, learner: str, s: int, n: int, trial: int) -> int:
    """64-bit per-trial seed: blake2b-8 of "master|learner|s|N|trial"."""
    msg = f"{master_seed}|{learner}|{s}|{n}|{trial}".encode()
    return int.from_bytes(hashlib.blake2b(msg, digest_size=8).digest(), "little")


def trial_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


@dataclass(frozen=True)
class FamilyConfig:
    variant: str = "dual-lb"
    mu: float = 1.0
    sigma: float = 1.0
    epsilon: float = 0.2
    pi_max: float = 3.0
    B: float = 1.0
    v_pattern: str = "alternating"
    v: tuple | None = None  # explicit bit vector; only with a single-s grid

    def __post_init__(self):
        if self.v_pattern not in V_PATTERNS:
            raise ConfigError(f"v_pattern must be one of {V_PATTERNS}")
        if self.v is not None:
            object.__setattr__(self, "v", tuple(int(x) for x in self.v))

    def bit_vector(self, s: int) -> tuple:
        if self.v is not None:
            if len(self.v) != s:
                raise ConfigError(f"explicit v has length {len(self.v)}, grid wants s = {s}")
            return self.v
        if self.v_pattern == "zeros":
            return (0,) * s
        if self.v_pattern == "ones":
            return (1,) * s
        return tuple(k % 2 for k in range(s))

    def spec_for(self, s: int) -> HardFamilySpec:
        return HardFamilySpec(
            s=s,
            mu=self.mu,
            sigma=self.sigma,
            epsilon=self.epsilon,
            v=self.bit_vector(s),
            pi_max=self.pi_max,
            variant=self.variant,
            B=self.B,
        )


@dataclass(frozen=True)
class ExperimentConfig:
    family: FamilyConfig
    learners: tuple
    s_grid: tuple
    n_grid: tuple
    trials: int
    master_seed: int
    erm_iterations: int | None = None
    out: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "learners", tuple(self.learners))
        object.__setattr__(self, "s_grid", tuple(int(s) for s in self.s_grid))
        object.__setattr__(self, "n_grid", tuple(int(n) for n in self.n_grid))
        if not self.learners:
            raise ConfigError("learners must be non-empty")
        for lr in self.learners:
            if lr not in LEARNERS:
                raise ConfigError(f"unknown learner {lr!r}")
            needed = "warmstart-lb" if lr == "warmstart" else "dual-lb"
            if self.family.variant != needed:
                raise ConfigError(
                    f"learner {lr!r} needs the {needed} family variant, "
                    f"config has {self.family.variant!r}"
                )
        if not self.s_grid:
            raise ConfigError("s_grid must be non-empty")
        if len(set(self.n_grid)) < 2:
            raise ConfigError("n_grid needs at least 2 distinct values (slope fitting)")
        if any(n < 1 for n in self.n_grid):
            raise ConfigError("all N values must be >= 1")
        if self.trials < 1:
            raise ConfigError("trials must be >= 1")
        if self.family.v is not None and len(self.s_grid) > 1:
            raise ConfigError("explicit v requires a single-entry s_grid")
        if self.erm_iterations is not None and self.erm_iterations < 1:
            raise ConfigError("erm_iterations must be >= 1")
        for s in self.s_grid:
            self.family.spec_for(s)  # surfaces family domain errors before any run

    @staticmethod
    def from_dict(data: dict) -> "ExperimentConfig":
        fam = data.get("family", {})
        known = {"variant", "mu", "sigma", "epsilon", "pi_max", "B", "v_pattern", "v"}
        extra = set(fam) - known
        if extra:
            raise ConfigError(f"unknown family keys: {sorted(extra)}")
        family = FamilyConfig(**{k: tuple(v) if k == "v" else v for k, v in fam.items()})
        try:
            return ExperimentConfig(
                family=family,
                learners=tuple(data["learners"]),
                s_grid=tuple(data["s_grid"]),
                n_grid=tuple(data["n_grid"]),
                trials=int(data["trials"]),
                master_seed=int(data["master_seed"]),
                erm_iterations=data.get("erm_iterations"),
                out=data.get("out"),
            )
        except KeyError as exc:
            raise ConfigError(f"config is missing key {exc}") from exc

    @staticmethod
    def from_json_file(path) -> "ExperimentConfig":
        with open(path, "r", encoding="utf-8") as fh:
            return ExperimentConfig.from_dict(json.load(fh))


@dataclass(frozen=True)
class TrialRecord:
    learner: str
    s: int
    n: int
    trial: int
    seed: int
    excess_risk: float  # clipped at 0 (what the CSV carries)
    theory_bound: float
    runtime_ms: float
    excess_risk_raw: float = float("nan")  # pre-clip value, >= -1e-9 always

    def __post_init__(self):
        if math.isnan(self.excess_risk_raw):
            object.__setattr__(self, "excess_risk_raw", self.excess_risk)


def run_trial(cfg: ExperimentConfig, learner: str, s: int, n: int, trial: int) -> TrialRecord:
    seed = derive_trial_seed(cfg.master_seed, learner, s, n, trial)
    rng = trial_rng(seed)
    spec = cfg.family.spec_for(s)
    c_matrix = sample_objectives(spec, rng, n)
    t0 = time.perf_counter()
    if learner == "sga":
        learned = sga_learn_restricted(
            c_matrix, SgaConfig(n_instances=n, pi_max=spec.pi_max, B=spec.B, seed=seed)
        )
        raw = max_population_risk(spec) - population_risk(spec, learned.pi)
        bound = sga_bound(s, n, spec.B, spec.pi_max)
    elif learner == "erm":
        learned = erm_learn_restricted(
            c_matrix, spec.bounds, iterations=cfg.erm_iterations, seed=seed
        )
        raw = max_population_risk(spec) - population_risk(spec, learned.pi)
        bound = erm_excess_bound(s, n, spec.B, spec.pi_max)
    elif learner == "warmstart":
        learned = warmstart_learn_restricted(c_matrix, spec.bounds)
        diff = learned.pi.values - optimal_warmstart(spec)
        raw = float(diff @ diff)
        bound = warmstart_bound(s, n, spec.pi_max)
    else:
        raise ConfigError(f"unknown learner {learner!r}")
    runtime_ms = (time.perf_counter() - t0) * 1e3
    if raw < -1e-9:
        raise RuntimeError(f"excess risk {raw} below the numerical-noise floor -1e-9")
    return TrialRecord(
        learner=learner,
        s=s,
        n=n,
        trial=trial,
        seed=seed,
        excess_risk=max(0.0, raw),
        theory_bound=bound,
        runtime_ms=runtime_ms,
        excess_risk_raw=raw,
    )


def _run_trial_star(args) -> TrialRecord:
    return run_trial(*args)


def sort_records(records) -> list[TrialRecord]:
    return sorted(records, key=lambda r: (r.learner, r.s, r.n, r.trial))


def run_rate_experiment(cfg: ExperimentConfig, workers: int = 1) -> list[TrialRecord]:
    """All (learner, s, N, trial) cells of the config; any worker count
    yields the same records (trials are seed-isolated, output is sorted)."""
    tasks = [
        (cfg, learner, s, n, trial)
        for learner in cfg.learners
        for s in cfg.s_grid
        for n in cfg.n_grid
        for trial in range(cfg.trials)
    ]
    if workers <= 1:
        records = [run_trial(*t) for t in tasks]
    else:
        chunk = max(1, len(tasks) // (workers * 4))
        with ProcessPoolExecutor(max_workers=workers) as pool:
            records = list(pool.map(_run_trial_star, tasks, chunksize=chunk))
    return sort_records(records)


def write_records_csv(records, path, timing: bool = True) -> None:
    """Fixed-column CSV; timing=False zeroes runtime_ms so repeated runs
    are byte-identical (wall time is the one nondeterministic column)."""
    lines = [CSV_HEADER]
    for r in sort_records(records):
        rt = f"{r.runtime_ms:.3f}" if timing else "0.000"
        lines.append(
            f"{r.learner},{r.s},{r.n},{r.trial},{r.seed},{r.excess_risk!r},{r.theory_bound!r},{rt}"
        )
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_records_csv(path) -> list[TrialRecord]:
    text = Path(path).read_text(encoding="utf-8").strip().splitlines()
    if not text or text[0] != CSV_HEADER:
        raise ConfigError(f"unexpected CSV header (want {CSV_HEADER!r})")
    records = []
    for line in text[1:]:
        parts = line.split(",")
        if len(parts) != 8:
            raise ConfigError(f"malformed CSV row: {line!r}")
        records.append(
            TrialRecord(
                learner=parts[0],
                s=int(parts[1]),
                n=int(parts[2]),
                trial=int(parts[3]),
                seed=int(parts[4]),
                excess_risk=float(parts[5]),
                theory_bound=float(parts[6]),
                runtime_ms=float(parts[7]),
            )
        )
    return records


@dataclass(frozen=True)
class SlopeFit:
    slope: float
    intercept: float
    r_squared: float
    cell_means: tuple  # ((N, mean excess), ...) for the cells used
    skipped_cells: tuple  # N values whose mean excess was <= 0


def fit_loglog_slope(records, learner: str, s: int | None = None) -> SlopeFit:
    """OLS of ln(mean excess) on ln N over the learner's cells."""
    recs = [r for r in records if r.learner == learner and (s is None or r.s == s)]
    if not recs:
        raise ConfigError(f"no records for learner {learner!r}")
    s_values = sorted({r.s for r in recs})
    if len(s_values) > 1:
        raise ConfigError(f"records mix s values {s_values}; pass s= to choose one")
    cells: dict[int, list[float]] = {}
    for r in recs:
        cells.setdefault(r.n, []).append(r.excess_risk)
    if len(cells) < 2:
        raise ConfigError("need at least 2 distinct N values")
    low = [n for n, xs in cells.items() if len(xs) < 10]
    if low:
        raise ConfigError(f"need >= 10 trials per N cell; short cells: {sorted(low)}")
    means = {n: float(np.mean(xs)) for n, xs in cells.items()}
    skipped = tuple(sorted(n for n, m in means.items() if m <= 0.0))
    used = sorted(n for n, m in means.items() if m > 0.0)
    if len(used) < 2:
        raise ConfigError(f"slope undefined: only {len(used)} cells with positive mean excess")
    x = np.log(np.array(used, dtype=np.float64))
    y = np.log(np.array([means[n] for n in used]))
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    ss_res = float(resid @ resid)
    ss_tot = float(((y - y.mean()) @ (y - y.mean())))
    r_squared = 1.0 if ss_tot == 0.0 and ss_res < 1e-20 else 1.0 - ss_res / max(ss_tot, 1e-300)
    return SlopeFit(
        slope=float(slope),
        intercept=float(intercept),
        r_squared=float(r_squared),
        cell_means=tuple((n, means[n]) for n in used),
        skipped_cells=skipped,
    )


def expected_warmstart_excess(spec: HardFamilySpec, n: int) -> float:
    """Analytic mean of the warm-start excess: sum_k Var(c_k) / N."""
    return float(objective_variance(spec).sum()) / n
