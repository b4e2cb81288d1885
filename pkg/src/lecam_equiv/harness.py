"""Batch study driver: configs, seed streams, CSV emission, verdicts.

A study is described by a flat key=value file with a single [study]
section.  The driver resolves the family and function descriptors,
derives one deterministic seed per (n, replicate) cell from the master
seed, fans the per-n workloads out to a worker pool, and writes two
CSV artifacts into the output directory: a row file with one record
per batch/replicate and a summary with per-n medians plus trend
verdicts.  Reruns with the same config and master seed reproduce both
files byte for byte; the only line that may move between releases is
the versioned header.

Shift handling: the configured shift descriptor is a shape.  The
local studies rescale it per n by c_rate/sqrt(n) * L/(2 pi + 1) so it
stays inside the localization ball; the homoscedastic check rescales
it to the localization rate c_rate * (log n / n)^(beta/(2 beta + 1)).
"""

from __future__ import annotations

import configparser
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.special import ndtr

from . import __version__
from .coupling import CouplingPlan, audit_cc_conditions, build_coupled_draw
from .distances import mc_hellinger_coupled
from .errors import ArgumentError, ConfigError, NumericError
from .experiments import design_grid, sample_original
from .families import check_regularity, get_family
from .function_space import RegressionFunction, parse_function, rate_gamma_bar
from .globalization import (
    gaussianize,
    homoscedastic_transform_check,
    risk_transfer_demo,
)

STUDY_KINDS = (
    "local-hellinger",
    "cc-audit",
    "globalize",
    "risk-transfer",
    "condition-audit",
    "homoscedastic-check",
)

OUTPUT_DIR_ENV = "LECAM_EQUIV_OUT"

_MASK64 = (1 << 64) - 1


# ---------------------------------------------------------------------------
# seed derivation
# ---------------------------------------------------------------------------


def _splitmix64(z: int) -> int:
    """One splitmix64 step; the documented mixing primitive."""
    z = (z + 0x9E3779B97F4A7C15) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return (z ^ (z >> 31)) & _MASK64

def derive_seed(master: int, n: int, replicate: int) -> int:
    """Deterministic 64-bit stream seed for one (n, replicate) cell.

    Three chained splitmix64 steps: mix the master, fold in n, fold in
    the replicate index.  Each fold is a bijection of the previous
    state, so seeds never collide within a fixed (master, n) pair and
    collide across cells only at the birthday-bound rate.
    """
    s = _splitmix64(master & _MASK64)
    s = _splitmix64(s ^ (int(n) & _MASK64))
    s = _splitmix64(s ^ (int(replicate) & _MASK64))
    return s


def stream_rng(seed: int) -> np.random.Generator:
    """Counter-based generator pinned to the Philox algorithm."""
    return np.random.Generator(np.random.Philox(key=seed & _MASK64))


# ---------------------------------------------------------------------------
# configuration
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class StudyConfig:
    """Resolved description of one batch study."""

    kind: str
    family: str
    f_desc: str
    h_desc: str = "sinusoid(1.0, 1.0)"
    beta: float = 1.0
    L: float = 1.0
    c_rate: float = 1.0
    q: float = 0.25
    alpha: float = 0.75
    n_grid: tuple = (256, 1024, 4096)
    replicates: int = 100
    batches: int = 20
    master_seed: int = 0
    out_dir: str = "."
    table_path: str = ""
    loss_caps: tuple = (0.25, 1.0)
    coupling_grid: int = 1 << 16
    epsilon: float = 0.05
    grid_points: int = 25
    audit_eps: float = 0.5
    audit_threshold: float = 0.25
    gap_constant: float = 1.0
    ks_pass_fraction: float = 0.9

    def __post_init__(self):
        if self.kind not in STUDY_KINDS:
            raise ConfigError(
                f"unknown study kind {self.kind!r}; expected one of {', '.join(STUDY_KINDS)}"
            )
        grid = tuple(int(n) for n in self.n_grid)
        object.__setattr__(self, "n_grid", grid)
        if len(grid) == 0 or any(n < 2 for n in grid):
            raise ConfigError("n_grid must list integers >= 2")
        if any(b <= a for a, b in zip(grid, grid[1:])):
            raise ConfigError("n_grid must be strictly increasing")
        if self.replicates < 10:
            raise ConfigError("replicates must be at least 10")
        if self.batches < 1:
            raise ConfigError("batches must be at least 1")
        if not self.beta > 0.5:
            raise ConfigError("beta must exceed 1/2")
        if self.L <= 0 or self.c_rate <= 0:
            raise ConfigError("L and c_rate must be positive")
        if not 0.0 < self.q <= 0.25:
            raise ConfigError("q must lie in (0, 1/4]")
        if not 0.0 < self.alpha < 1.0:
            raise ConfigError("alpha must lie in (0, 1)")
        caps = tuple(float(c) for c in self.loss_caps)
        object.__setattr__(self, "loss_caps", caps)
        if len(caps) == 0 or any(c <= 0 for c in caps):
            raise ConfigError("loss_caps must list positive values")
        if any(b <= a for a, b in zip(caps, caps[1:])):
            raise ConfigError("loss_caps must be strictly increasing")
        g = self.coupling_grid
        if g < 256 or (g & (g - 1)) != 0:
            raise ConfigError("coupling_grid must be a power of two, at least 256")
        if self.epsilon < 0:
            raise ConfigError("epsilon must be nonnegative")
        if self.grid_points < 3:
            raise ConfigError("grid_points must be at least 3")
        if self.audit_eps <= 0 or self.gap_constant <= 0:
            raise ConfigError("audit_eps and gap_constant must be positive")
        if not 0.0 < self.audit_threshold <= 1.0:
            raise ConfigError("audit_threshold must lie in (0, 1]")
        if not 0.0 < self.ks_pass_fraction <= 1.0:
            raise ConfigError("ks_pass_fraction must lie in (0, 1]")
        # resolve descriptors now so malformed configs fail before any work
        self.resolve_family()
        self.resolve_f()
        self.resolve_h()

    def resolve_family(self):
        try:
            if self.table_path:
                return get_family(self.family, table_path=self.table_path)
            return get_family(self.family)
        except ArgumentError as exc:
            raise ConfigError(f"cannot resolve family {self.family!r}: {exc}") from exc

    def resolve_f(self) -> RegressionFunction:
        try:
            return parse_function(self.f_desc, beta=self.beta, L=self.L)
        except ArgumentError as exc:
            raise ConfigError(f"cannot resolve f descriptor: {exc}") from exc

    def resolve_h(self) -> RegressionFunction:
        try:
            return parse_function(self.h_desc, beta=self.beta, L=self.L)
        except ArgumentError as exc:
            raise ConfigError(f"cannot resolve h descriptor: {exc}") from exc


_CONFIG_KEYS = {
    "kind": str,
    "family": str,
    "f": str,
    "h": str,
    "beta": float,
    "L": float,
    "c_rate": float,
    "q": float,
    "alpha": float,
    "n_grid": "int_list",
    "replicates": int,
    "batches": int,
    "seed": int,
    "out": str,
    "table": str,
    "loss_caps": "float_list",
    "coupling_grid": int,
    "epsilon": float,
    "grid_points": int,
    "audit_eps": float,
    "audit_threshold": float,
    "gap_constant": float,
    "ks_pass_fraction": float,
}

_KEY_TO_FIELD = {
    "f": "f_desc",
    "h": "h_desc",
    "seed": "master_seed",
    "out": "out_dir",
    "table": "table_path",
}


def parse_config(path) -> StudyConfig:
    """Read a flat key=value study file with a single [study] section."""
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    parser.optionxform = str  # keep keys case-sensitive (L vs l)
    try:
        with open(path, "r", encoding="utf-8") as fh:
            parser.read_file(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path!r}: {exc}") from exc
    except configparser.Error as exc:
        raise ConfigError(f"malformed config file {path!r}: {exc}") from exc
    if parser.sections() != ["study"]:
        raise ConfigError("config must contain exactly one [study] section")
    values = {}
    for key, raw in parser.items("study"):
        if key not in _CONFIG_KEYS:
            raise ConfigError(f"unknown config key {key!r}")
        caster = _CONFIG_KEYS[key]
        try:
            if caster == "int_list":
                value = tuple(int(v) for v in raw.split(","))
            elif caster == "float_list":
                value = tuple(float(v) for v in raw.split(","))
            else:
                value = caster(raw)
        except ValueError as exc:
            raise ConfigError(f"bad value for config key {key!r}: {raw!r}") from exc
        values[_KEY_TO_FIELD.get(key, key)] = value
    for required in ("kind", "family", "f_desc"):
        if required not in values:
            key = {v: k for k, v in _KEY_TO_FIELD.items()}.get(required, required)
            raise ConfigError(f"config is missing required key {key!r}")
    if "out_dir" not in values:
        values["out_dir"] = os.environ.get(OUTPUT_DIR_ENV, ".")
    return StudyConfig(**values)


# ---------------------------------------------------------------------------
# shared helpers
# ---------------------------------------------------------------------------


def _scaled_shape(shape: RegressionFunction, scale: float) -> RegressionFunction:
    """Multiply a closed-form function by a scalar, kind by kind."""
    kw = dict(beta=shape.beta, L=shape.L, range_interval=shape.range_interval)
    p = shape.params
    if shape.kind == "constant":
        return RegressionFunction("constant", (p[0] * scale,), **kw)
    if shape.kind == "affine":
        return RegressionFunction("affine", (p[0] * scale, p[1] * scale), **kw)
    if shape.kind == "sinusoid":
        return RegressionFunction("sinusoid", (p[0] * scale,) + p[1:], **kw)
    if shape.kind == "spline":
        scaled = tuple(v * scale if i % 2 else v for i, v in enumerate(p))
        return RegressionFunction("spline", scaled, **kw)
    raise ConfigError(f"cannot rescale function kind {shape.kind!r}")


def _local_shift(config: StudyConfig, n: int) -> RegressionFunction:
    amp = (config.c_rate / math.sqrt(n)) * config.L / (2.0 * math.pi + 1.0)
    return _scaled_shape(config.resolve_h(), amp)


def _ks_statistic_normal(values: np.ndarray) -> float:
    """One-sample Kolmogorov statistic against the standard normal."""
    u = np.sort(ndtr(np.asarray(values, dtype=float)))
    k = np.arange(1, u.size + 1, dtype=float)
    return float(max(np.max(k / u.size - u), np.max(u - (k - 1.0) / u.size)))


def _decreasing(values, tol: float = 1e-12) -> bool:
    """Strictly-decreasing check; shortfalls below tol count as ties."""
    return all(b < a + tol for a, b in zip(values, values[1:]))


def _fmt(x) -> str:
    return repr(float(x))


class _StudyNumericError(NumericError):
    pass


def _numeric_context(exc: Exception, n: int, replicate: int, seed: int):
    raise _StudyNumericError(
        f"numeric failure at n={n}, replicate={replicate}, seed={seed}: {exc}"
    ) from exc


# ---------------------------------------------------------------------------
# per-kind pipelines (each returns rows plus per-n statistics)
# ---------------------------------------------------------------------------


def _run_local_hellinger(config: StudyConfig, n: int):
    family = config.resolve_family()
    f = config.resolve_f()
    h = _local_shift(config, n)
    plan = CouplingPlan(
        family, f, h, n, config.alpha,
        c_rate=config.c_rate, grid_size=config.coupling_grid,
    )
    rows = []
    estimates = []
    for batch in range(config.batches):
        draws = []
        for r in range(config.replicates):
            idx = batch * config.replicates + r
            seed = derive_seed(config.master_seed, n, idx)
            try:
                draws.append(
                    build_coupled_draw(
                        family, f, h, n, config.alpha, stream_rng(seed),
                        plan=plan, seed=idx, c_rate=config.c_rate,
                    )
                )
            except NumericError as exc:
                _numeric_context(exc, n, idx, seed)
        report = mc_hellinger_coupled(
            draws, n=n, family=family.name,
            f_desc=config.f_desc, h_desc=h.descriptor,
            seed=derive_seed(config.master_seed, n, batch * config.replicates),
        )
        estimates.append(report.value)
        rows.append(
            f"{n}, {batch}, {_fmt(report.value)}, {_fmt(report.mc_stderr)}, "
            f"{config.replicates}, {report.seed}"
        )
    return rows, {"h2_median": float(np.median(estimates))}


def _run_cc_audit(config: StudyConfig, n: int):
    family = config.resolve_family()
    f = config.resolve_f()
    h = _local_shift(config, n)
    plan = CouplingPlan(
        family, f, h, n, config.alpha,
        c_rate=config.c_rate, grid_size=config.coupling_grid,
    )
    draws = []
    for r in range(config.replicates):
        seed = derive_seed(config.master_seed, n, r)
        try:
            draws.append(
                build_coupled_draw(
                    family, f, h, n, config.alpha, stream_rng(seed),
                    plan=plan, seed=r, c_rate=config.c_rate,
                )
            )
        except NumericError as exc:
            _numeric_context(exc, n, r, seed)
    report = audit_cc_conditions(
        draws, plan.r_n, config.alpha, config.audit_eps,
        gap_constant=config.gap_constant,
    )
    row = (
        f"{n}, {_fmt(report.gap_freq)}, {_fmt(report.gap_stderr)}, "
        f"{_fmt(report.orig_tail_freq)}, {_fmt(report.orig_tail_stderr)}, "
        f"{_fmt(report.gauss_tail_freq)}, {_fmt(report.gauss_tail_stderr)}, "
        f"{_fmt(report.effective_sample_size)}, {int(report.reliable)}, "
        f"{config.replicates}"
    )
    stats = {
        "gap_freq": report.gap_freq,
        "orig_tail_freq": report.orig_tail_freq,
        "gauss_tail_freq": report.gauss_tail_freq,
        "reliable": bool(report.reliable),
    }
    return [row], stats


def _run_globalize(config: StudyConfig, n: int, batch: int):
    family = config.resolve_family()
    f = config.resolve_f()
    t = design_grid(n)
    target = np.asarray(family.gamma(np.asarray(f(t), dtype=float)), dtype=float)
    crit = 1.628 / math.sqrt(n)
    lo = batch * config.replicates // config.batches
    hi = (batch + 1) * config.replicates // config.batches
    rows = []
    stats = []
    for r in range(lo, hi):
        seed = derive_seed(config.master_seed, n, r)
        try:
            draw = sample_original(family, f, n, stream_rng(seed), seed=r)
            out = gaussianize(
                family, draw, config.beta, config.L,
                stream_rng(derive_seed(config.master_seed, n, r + (1 << 32))),
                q=config.q,
            )
        except NumericError as exc:
            _numeric_context(exc, n, r, seed)
        ks = _ks_statistic_normal(out.draw.observations - target)
        ok = ks < crit
        rows.append(f"{n}, {r}, {_fmt(ks)}, {_fmt(crit)}, {int(ok)}, {seed}")
        stats.append((ks, ok))
    return rows, stats


def _run_risk_transfer(config: StudyConfig, n: int, batch: int):
    family = config.resolve_family()
    f = config.resolve_f()
    seed = derive_seed(config.master_seed, n, batch)
    try:
        table = risk_transfer_demo(
            family, f, n, config.loss_caps, stream_rng(seed),
            R=config.replicates, beta=config.beta, L=config.L, q=config.q,
        )
    except NumericError as exc:
        _numeric_context(exc, n, batch, seed)
    rows = []
    for i, cap in enumerate(table.loss_caps):
        margin = abs(float(table.transferred_risk[i] - table.direct_risk[i]))
        rows.append(
            f"{n}, {batch}, {_fmt(cap)}, {_fmt(table.direct_risk[i])}, "
            f"{_fmt(table.direct_stderr[i])}, {_fmt(table.transferred_risk[i])}, "
            f"{_fmt(table.transferred_stderr[i])}, {_fmt(margin)}, {seed}"
        )
    last_margin = abs(float(table.transferred_risk[-1] - table.direct_risk[-1]))
    return rows, last_margin


def _run_condition_audit(config: StudyConfig):
    family = config.resolve_family()
    lo, hi = family.working_interval
    grid = np.linspace(lo, hi, config.grid_points)
    try:
        report = check_regularity(
            family, grid, config.epsilon, config.beta
        )
    except NumericError as exc:
        _numeric_context(exc, 0, 0, config.master_seed)
    row = (
        f"{family.name}, {_fmt(report.r1_sup_estimate)}, "
        f"{_fmt(report.r2_sup_estimate)}, {_fmt(report.r3_bounds[0])}, "
        f"{_fmt(report.r3_bounds[1])}, {report.pair_count}, "
        f"{int(report.all_pass())}"
    )
    stats = {
        "r1_sup": report.r1_sup_estimate,
        "r2_sup": report.r2_sup_estimate,
        "r3_min": report.r3_bounds[0],
        "r3_max": report.r3_bounds[1],
        "all_pass": report.all_pass(),
    }
    return [row], stats


def _run_homoscedastic(config: StudyConfig, n: int):
    family = config.resolve_family()
    f = config.resolve_f()
    amp = rate_gamma_bar(n, config.beta, config.c_rate)
    h = _scaled_shape(config.resolve_h(), amp)
    report = homoscedastic_transform_check(family, f, h, n)
    row = f"{n}, {_fmt(amp)}, {_fmt(report.value)}"
    return [row], {"h2": report.value}


_COLUMN_HEADERS = {
    "local-hellinger": "n, batch, h2, stderr, replicates, seed",
    "cc-audit": (
        "n, gap_freq, gap_stderr, orig_tail_freq, orig_tail_stderr, "
        "gauss_tail_freq, gauss_tail_stderr, ess, reliable, replicates"
    ),
    "globalize": "n, replicate, ks_stat, ks_crit, pass, seed",
    "risk-transfer": (
        "n, batch, cap, direct_risk, direct_stderr, transferred_risk, "
        "transferred_stderr, margin, seed"
    ),
    "condition-audit": "family, r1_sup, r2_sup, r3_min, r3_max, pairs, all_pass",
    "homoscedastic-check": "n, amplitude, h2",
}


def _study_unit(args):
    """Top-level worker entry so the process pool can pickle it."""
    config, kind, unit = args
    if kind == "local-hellinger":
        return _run_local_hellinger(config, unit)
    if kind == "cc-audit":
        return _run_cc_audit(config, unit)
    if kind == "globalize":
        return _run_globalize(config, unit[0], unit[1])
    if kind == "risk-transfer":
        return _run_risk_transfer(config, unit[0], unit[1])
    if kind == "condition-audit":
        return _run_condition_audit(config)
    if kind == "homoscedastic-check":
        return _run_homoscedastic(config, unit)
    raise ConfigError(f"unknown study kind {kind!r}")


# ---------------------------------------------------------------------------
# the driver
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class StudyResult:
    """Artifacts and verdicts from one run_study call."""

    kind: str
    csv_path: str
    summary_path: str
    medians: dict
    verdicts: dict
    passed: bool


def _units_for(config: StudyConfig):
    if config.kind in ("local-hellinger", "cc-audit", "homoscedastic-check"):
        return list(config.n_grid)
    if config.kind in ("globalize", "risk-transfer"):
        return [(n, b) for n in config.n_grid for b in range(config.batches)]
    return [None]  # condition-audit runs once


def _header_lines(config: StudyConfig) -> list:
    return [
        f"# lecam-equiv {__version__} study={config.kind}",
        (
            f"# family={config.family} f={config.f_desc} h={config.h_desc} "
            f"beta={config.beta} L={config.L} c_rate={config.c_rate} "
            f"q={config.q} alpha={config.alpha}"
        ),
        (
            f"# n_grid={','.join(str(n) for n in config.n_grid)} "
            f"replicates={config.replicates} batches={config.batches} "
            f"seed={config.master_seed}"
        ),
    ]


def _assemble(config: StudyConfig, unit_results):
    """Fold per-unit outputs into rows, per-n medians, and verdicts."""
    kind = config.kind
    rows = []
    medians = {}
    verdicts = {}
    if kind == "local-hellinger":
        values = []
        for (unit, (unit_rows, stats)) in unit_results:
            rows.extend(unit_rows)
            values.append((unit, stats["h2_median"]))
        medians["h2_median"] = values
        verdicts["decreasing_h2_medians"] = _decreasing([v for _, v in values])
    elif kind == "cc-audit":
        freq_names = ("gap_freq", "orig_tail_freq", "gauss_tail_freq")
        reliable = []
        small = []
        for name in freq_names:
            medians[name] = []
        for (unit, (unit_rows, stats)) in unit_results:
            rows.extend(unit_rows)
            reliable.append(stats["reliable"])
            for name in freq_names:
                medians[name].append((unit, stats[name]))
                small.append(stats[name] <= config.audit_threshold)
        verdicts["audits_reliable"] = all(reliable)
        verdicts["frequencies_at_most_threshold"] = all(small)
    elif kind == "globalize":
        per_n = {n: [] for n in config.n_grid}
        for ((n, _batch), (unit_rows, stats)) in unit_results:
            rows.extend(unit_rows)
            per_n[n].extend(stats)
        medians["ks_stat_median"] = [
            (n, float(np.median([ks for ks, _ in per_n[n]]))) for n in config.n_grid
        ]
        fractions = [
            (n, sum(ok for _, ok in per_n[n]) / len(per_n[n])) for n in config.n_grid
        ]
        medians["ks_pass_fraction"] = fractions
        verdicts["ks_pass_fraction_met"] = all(
            frac >= config.ks_pass_fraction for _, frac in fractions
        )
    elif kind == "risk-transfer":
        per_n = {n: [] for n in config.n_grid}
        for ((n, _batch), (unit_rows, margin)) in unit_results:
            rows.extend(unit_rows)
            per_n[n].append(margin)
        values = [(n, float(np.median(per_n[n]))) for n in config.n_grid]
        medians["margin_median"] = values
        verdicts["shrinking_risk_margin"] = _decreasing([v for _, v in values])
    elif kind == "condition-audit":
        (_unit, (unit_rows, stats)) = unit_results[0]
        rows.extend(unit_rows)
        for name in ("r1_sup", "r2_sup", "r3_min", "r3_max"):
            medians[name] = [("", stats[name])]
        verdicts["regularity_all_pass"] = bool(stats["all_pass"])
    elif kind == "homoscedastic-check":
        values = []
        for (unit, (unit_rows, stats)) in unit_results:
            rows.extend(unit_rows)
            values.append((unit, stats["h2"]))
        medians["h2"] = values
        verdicts["decreasing_h2"] = _decreasing([v for _, v in values])
        verdicts["final_h2_below_0.01"] = values[-1][1] < 0.01
    return rows, medians, verdicts


def run_study(config: StudyConfig, jobs: int = 1) -> StudyResult:
    """Execute one study and write its row CSV and summary CSV.

    Returns the artifact paths and the verdict map; passed is True iff
    every configured verdict holds.  Numeric failures raise
    NumericError tagged with the failing (n, replicate, seed) triple.
    """
    if jobs < 1:
        raise ArgumentError("jobs must be at least 1")
    units = _units_for(config)
    tasks = [(config, config.kind, u) for u in units]
    if jobs == 1 or len(units) == 1:
        outputs = [_study_unit(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=min(jobs, len(units))) as pool:
            outputs = list(pool.map(_study_unit, tasks))
    unit_results = list(zip(units, outputs))
    rows, medians, verdicts = _assemble(config, unit_results)
    passed = all(verdicts.values())

    os.makedirs(config.out_dir, exist_ok=True)
    csv_path = os.path.join(config.out_dir, f"{config.kind}.csv")
    summary_path = os.path.join(config.out_dir, f"{config.kind}_summary.csv")
    header = _header_lines(config)
    with open(csv_path, "w", encoding="utf-8") as fh:
        for line in header:
            fh.write(line + "\n")
        fh.write(_COLUMN_HEADERS[config.kind] + "\n")
        for row in rows:
            fh.write(row + "\n")
    with open(summary_path, "w", encoding="utf-8") as fh:
        fh.write(header[0] + " summary\n")
        for line in header[1:]:
            fh.write(line + "\n")
        fh.write("metric, n, value\n")
        for name, pairs in medians.items():
            for n, value in pairs:
                fh.write(f"{name}, {n}, {_fmt(value)}\n")
        for name, ok in verdicts.items():
            fh.write(f"verdict:{name}, , {'pass' if ok else 'fail'}\n")
        fh.write(f"overall, , {'pass' if passed else 'fail'}\n")
    return StudyResult(
        kind=config.kind,
        csv_path=csv_path,
        summary_path=summary_path,
        medians=medians,
        verdicts=verdicts,
        passed=passed,
    )
