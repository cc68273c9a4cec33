"""Experiment orchestration: Monte Carlo sweeps, CSV persistence, property suite.

Every run is deterministic in (config, seed): each trial derives its RNG
streams from ``(seed, purpose, trial, grid_index)``, is computed entirely
inside one worker, and rows are merged in trial order, so the output CSV is
byte-identical for any worker count.

CSV schema (exact header)::

    experiment,scheme,receiver,K,M,N,L,S,n_f,snr_db,trial,metric,value

One row per (grid point, trial, metric); values carry 10 significant
digits; UTF-8 with LF line endings.
"""

from __future__ import annotations

import functools
import multiprocessing
import os
from dataclasses import dataclass

import numpy as np

from . import streams
from .analysis import cross_leakage_sum, empirical_tail_exponent, sum_lif
from .channel import Scenario, draw_channel_set, draw_reference_bases
from .codebook import (
    Codebook,
    build_codebook,
    gen_grassmannian_codebook,
    gen_random_codebook,
    min_chordal_distance,
    packing_bound,
    quantize,
    residual_distance_cdf,
)
from .oia import (
    cell_user_states,
    lemma1_bound,
    run_cell_pipeline,
    run_max_snr_pipeline,
)
from .receivers import (
    aligned_interference_instance,
    capacity_ic,
    effective_channel,
    evaluate_cell,
    gmi_itheta,
    gmi_med,
    interference_covariance,
    logdet_pd,
)

SCHEMES = ("svd_oia", "gc_oia", "rc_oia", "max_snr")
RECEIVERS = ("zf", "med_gmi", "capacity")
CSV_HEADER = "experiment,scheme,receiver,K,M,N,L,S,n_f,snr_db,trial,metric,value"


class ConfigError(ValueError):
    """Invalid run configuration (maps to exit code 1)."""


@dataclass(frozen=True)
class ExperimentRecord:
    experiment: str
    scheme: str
    receiver: str        # "" for metrics without a receiver (sum-LIF)
    K: int
    M: int
    N: int
    L: int
    S: int
    n_f: int
    snr_db: float
    trial: int
    metric: str
    value: float

    def to_row(self) -> str:
        if not np.isfinite(self.value):
            raise ValueError(f"non-finite metric value in {self}")
        return ",".join(
            [
                self.experiment,
                self.scheme,
                self.receiver,
                str(self.K),
                str(self.M),
                str(self.N),
                str(self.L),
                str(self.S),
                str(self.n_f),
                format(self.snr_db, ".10g"),
                str(self.trial),
                self.metric,
                format(self.value, ".10g"),
            ]
        )

    @classmethod
    def from_row(cls, row: str) -> "ExperimentRecord":
        parts = row.rstrip("\n").split(",")
        if len(parts) != 13:
            raise ValueError(f"expected 13 CSV fields, got {len(parts)}: {row!r}")
        return cls(
            experiment=parts[0],
            scheme=parts[1],
            receiver=parts[2],
            K=int(parts[3]),
            M=int(parts[4]),
            N=int(parts[5]),
            L=int(parts[6]),
            S=int(parts[7]),
            n_f=int(parts[8]),
            snr_db=float(parts[9]),
            trial=int(parts[10]),
            metric=parts[11],
            value=float(parts[12]),
        )


@dataclass(frozen=True)
class RunConfig:
    """Scenario fields plus sweep axis, scheme/receiver lists, and output."""

    K: int = 2
    M: int = 3
    N: int = 100
    L: int = 2
    S: int = 2
    n_f: int = 4
    snr_db: float = 20.0
    n_grid: tuple[int, ...] | None = None
    nf_grid: tuple[int, ...] | None = None
    snr_grid: tuple[float, ...] | None = None
    nf_series: tuple[int, ...] = ()       # per-curve n_f values for sumlif-vs-n
    schemes: tuple[str, ...] = ("svd_oia", "gc_oia", "rc_oia", "max_snr")
    receivers: tuple[str, ...] = ("zf", "med_gmi", "capacity")
    trials: int = 500
    seed: int = 42
    workers: int = 1
    out: str = "results.csv"
    summary: bool = False
    codebook_dir: str | None = None

    def __post_init__(self):
        for name in ("K", "M", "N", "L", "S", "trials"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be >= 1")
        if self.n_f < 0:
            raise ConfigError("n_f must be >= 0")
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")
        if self.S > self.M:
            raise ConfigError(f"need S <= M, got S={self.S}, M={self.M}")
        smallest_n = min(self.n_grid) if self.n_grid else self.N
        if smallest_n < self.S:
            raise ConfigError(f"need N >= S at every grid point, got N={smallest_n}, S={self.S}")
        bad = set(self.schemes) - set(SCHEMES)
        if bad:
            raise ConfigError(f"unknown schemes: {sorted(bad)}")
        bad = set(self.receivers) - set(RECEIVERS)
        if bad:
            raise ConfigError(f"unknown receivers: {sorted(bad)}")
        for grid in (self.n_grid, self.nf_grid, self.snr_grid):
            if grid is not None and any(b <= a for a, b in zip(grid, grid[1:])):
                raise ConfigError(f"grids must be strictly increasing, got {grid}")
        if self.nf_grid and min(self.nf_grid) < 0:
            raise ConfigError("nf_grid values must be >= 0")
        if any(n < 0 for n in self.nf_series):
            raise ConfigError("nf_series values must be >= 0")

    def sweep_axis(self) -> str:
        axes = [
            name
            for name, grid in (
                ("n", self.n_grid),
                ("nf", self.nf_grid),
                ("snr", self.snr_grid),
            )
            if grid is not None
        ]
        if len(axes) != 1:
            raise ConfigError(f"exactly one sweep axis required, got {axes or 'none'}")
        return axes[0]


def _require_axis(config: RunConfig, axis: str) -> None:
    if config.sweep_axis() != axis:
        raise ConfigError(f"this experiment sweeps the {axis} axis")


def _scenario(config: RunConfig, n: int | None = None, n_f: int | None = None) -> Scenario:
    return Scenario(
        K=config.K,
        M=config.M,
        N=config.N if n is None else n,
        L=config.L,
        S=config.S,
        snr_db=(config.snr_db,),
        codebook_kind="random",
        n_f=config.n_f if n_f is None else n_f,
        trials=config.trials,
        seed=config.seed,
    )


_KIND_ID = {"random": 0, "grassmannian": 1}


def _build_codebooks(config: RunConfig, nf_values) -> dict[tuple[str, int], Codebook]:
    """One codebook per (kind, n_f), fixed across trials and grid points."""
    books: dict[tuple[str, int], Codebook] = {}
    kinds = []
    if "gc_oia" in config.schemes:
        kinds.append("grassmannian")
    if "rc_oia" in config.schemes:
        kinds.append("random")
    for kind in kinds:
        for n_f in nf_values:
            rng = streams.substream(config.seed, streams.CODEBOOK, _KIND_ID[kind], n_f)
            books[(kind, n_f)] = build_codebook(
                kind, config.L, n_f, rng, seed_tag=config.seed, cache_dir=config.codebook_dir
            )
    return books


def _scheme_selections(scheme, ch, bases, scen, books, n_f):
    if scheme == "svd_oia":
        return run_cell_pipeline(ch, bases, None, scen)
    if scheme == "gc_oia":
        return run_cell_pipeline(ch, bases, books[("grassmannian", n_f)], scen)
    if scheme == "rc_oia":
        return run_cell_pipeline(ch, bases, books[("random", n_f)], scen)
    if scheme == "max_snr":
        return run_max_snr_pipeline(ch, bases, scen)
    raise ConfigError(f"unknown scheme {scheme!r}")


@dataclass(frozen=True)
class _TrialCtx:
    experiment: str
    config: RunConfig
    books: dict


def _trial_records(ctx: _TrialCtx, trial: int) -> list[ExperimentRecord]:
    kernel = _KERNELS[ctx.experiment]
    return kernel(ctx.config, ctx.books, trial)


def _run_trials(ctx: _TrialCtx, config: RunConfig) -> list[ExperimentRecord]:
    worker = functools.partial(_trial_records, ctx)
    trials = range(config.trials)
    if config.workers <= 1:
        chunks = [worker(t) for t in trials]
    else:
        with multiprocessing.Pool(config.workers) as pool:
            chunks = pool.map(worker, trials, chunksize=max(1, config.trials // (4 * config.workers)))
    return [rec for chunk in chunks for rec in chunk]


# --- per-trial kernels ------------------------------------------------------

def _sumlif_vs_n_trial(config: RunConfig, books, trial: int) -> list[ExperimentRecord]:
    rows = []
    nf_series = config.nf_series or (config.n_f,)
    for gi, n in enumerate(config.n_grid):
        scen = _scenario(config, n=n)
        ch = draw_channel_set(scen, streams.substream(config.seed, streams.CHANNEL, trial, gi))
        bases = draw_reference_bases(scen, streams.substream(config.seed, streams.BASES, trial, gi))
        for scheme in config.schemes:
            for n_f in nf_series:
                sels = _scheme_selections(scheme, ch, bases, scen, books, n_f)
                rows.append(
                    ExperimentRecord(
                        "sumlif_vs_n", scheme, "", scen.K, scen.M, n, scen.L, scen.S,
                        n_f, config.snr_db, trial, "sum_lif", sum_lif(sels),
                    )
                )
    return rows


def _sumlif_vs_nf_trial(config: RunConfig, books, trial: int) -> list[ExperimentRecord]:
    rows = []
    scen = _scenario(config)
    ch = draw_channel_set(scen, streams.substream(config.seed, streams.CHANNEL, trial, 0))
    bases = draw_reference_bases(scen, streams.substream(config.seed, streams.BASES, trial, 0))
    cache: dict[tuple[str, int], float] = {}
    for n_f in config.nf_grid:
        for scheme in config.schemes:
            key = (scheme, n_f if scheme in ("gc_oia", "rc_oia") else -1)
            if key not in cache:
                sels = _scheme_selections(scheme, ch, bases, scen, books, n_f)
                cache[key] = sum_lif(sels)
            rows.append(
                ExperimentRecord(
                    "sumlif_vs_nf", scheme, "", scen.K, scen.M, scen.N, scen.L, scen.S,
                    n_f, config.snr_db, trial, "sum_lif", cache[key],
                )
            )
    return rows


def _rate_rows(experiment, config, scen, ch, bases, sels, scheme, n_f, snr_db, trial):
    n0 = scen.noise_power(snr_db)
    rows = []
    sums = {"zf": 0.0, "med_gmi": 0.0, "capacity": 0.0}
    outage = False
    for cell in range(1, scen.K + 1):
        eff = effective_channel(ch, bases, sels, cell)
        ev = evaluate_cell(eff, n0, want=tuple(config.receivers))
        if "zf" in config.receivers:
            sums["zf"] += float(np.sum(ev.zf_rates))
            outage = outage or ev.outage
        if "med_gmi" in config.receivers:
            sums["med_gmi"] += ev.med_rate
        if "capacity" in config.receivers:
            sums["capacity"] += ev.capacity
    for receiver in config.receivers:
        rows.append(
            ExperimentRecord(
                experiment, scheme, receiver, scen.K, scen.M, scen.N, scen.L, scen.S,
                n_f, snr_db, trial, "sum_rate", sums[receiver],
            )
        )
        if receiver == "zf" and outage:
            rows.append(
                ExperimentRecord(
                    experiment, scheme, receiver, scen.K, scen.M, scen.N, scen.L, scen.S,
                    n_f, snr_db, trial, "outage", 1.0,
                )
            )
    return rows


def _rate_vs_snr_trial(config: RunConfig, books, trial: int) -> list[ExperimentRecord]:
    rows = []
    scen = _scenario(config)
    ch = draw_channel_set(scen, streams.substream(config.seed, streams.CHANNEL, trial, 0))
    bases = draw_reference_bases(scen, streams.substream(config.seed, streams.BASES, trial, 0))
    sels_by_scheme = {
        scheme: _scheme_selections(scheme, ch, bases, scen, books, config.n_f)
        for scheme in config.schemes
    }
    for snr_db in config.snr_grid:
        for scheme in config.schemes:
            rows.extend(
                _rate_rows(
                    "rate_vs_snr", config, scen, ch, bases, sels_by_scheme[scheme],
                    scheme, config.n_f, snr_db, trial,
                )
            )
    return rows


def _rate_vs_n_trial(config: RunConfig, books, trial: int) -> list[ExperimentRecord]:
    rows = []
    for gi, n in enumerate(config.n_grid):
        scen = _scenario(config, n=n)
        ch = draw_channel_set(scen, streams.substream(config.seed, streams.CHANNEL, trial, gi))
        bases = draw_reference_bases(scen, streams.substream(config.seed, streams.BASES, trial, gi))
        for scheme in config.schemes:
            sels = _scheme_selections(scheme, ch, bases, scen, books, config.n_f)
            rows.extend(
                _rate_rows(
                    "rate_vs_n", config, scen, ch, bases, sels,
                    scheme, config.n_f, config.snr_db, trial,
                )
            )
    return rows


_KERNELS = {
    "sumlif_vs_n": _sumlif_vs_n_trial,
    "sumlif_vs_nf": _sumlif_vs_nf_trial,
    "rate_vs_snr": _rate_vs_snr_trial,
    "rate_vs_n": _rate_vs_n_trial,
}


# --- experiment entry points ------------------------------------------------

def run_sumlif_vs_n(config: RunConfig) -> list[ExperimentRecord]:
    _require_axis(config, "n")
    nf_series = config.nf_series or (config.n_f,)
    books = _build_codebooks(config, nf_series)
    records = _run_trials(_TrialCtx("sumlif_vs_n", config, books), config)
    _write_output(config, records)
    return records


def run_sumlif_vs_nf(config: RunConfig) -> list[ExperimentRecord]:
    _require_axis(config, "nf")
    books = _build_codebooks(config, config.nf_grid)
    records = _run_trials(_TrialCtx("sumlif_vs_nf", config, books), config)
    _write_output(config, records)
    return records


def run_rate_vs_snr(config: RunConfig) -> list[ExperimentRecord]:
    _require_axis(config, "snr")
    books = _build_codebooks(config, (config.n_f,))
    records = _run_trials(_TrialCtx("rate_vs_snr", config, books), config)
    _write_output(config, records)
    return records


def run_rate_vs_n(config: RunConfig) -> list[ExperimentRecord]:
    _require_axis(config, "n")
    books = _build_codebooks(config, (config.n_f,))
    records = _run_trials(_TrialCtx("rate_vs_n", config, books), config)
    _write_output(config, records)
    return records


# --- CSV --------------------------------------------------------------------

def write_records(path, records) -> None:
    try:
        parent = os.path.dirname(str(path))
        if parent:
            os.makedirs(parent, exist_ok=True)
        with open(path, "w", encoding="utf-8", newline="\n") as f:
            f.write(CSV_HEADER + "\n")
            for rec in records:
                f.write(rec.to_row() + "\n")
    except OSError as e:
        raise OSError(f"cannot write results to {path}: {e}") from e


def read_records(path) -> list[ExperimentRecord]:
    try:
        with open(path, "r", encoding="utf-8") as f:
            lines = f.read().splitlines()
    except OSError as e:
        raise OSError(f"cannot read results from {path}: {e}") from e
    if not lines or lines[0] != CSV_HEADER:
        raise ValueError(f"{path} does not carry the expected header {CSV_HEADER!r}")
    return [ExperimentRecord.from_row(ln) for ln in lines[1:] if ln]


def summarize(records) -> list[ExperimentRecord]:
    """Mean of each metric over trials; summary rows carry trial = -1."""
    groups: dict[tuple, list[float]] = {}
    order: list[tuple] = []
    for r in records:
        key = (r.experiment, r.scheme, r.receiver, r.K, r.M, r.N, r.L, r.S, r.n_f, r.snr_db, r.metric)
        if key not in groups:
            groups[key] = []
            order.append(key)
        groups[key].append(r.value)
    out = []
    for key in order:
        exp, scheme, receiver, K, M, N, L, S, n_f, snr_db, metric = key
        out.append(
            ExperimentRecord(
                exp, scheme, receiver, K, M, N, L, S, n_f, snr_db, -1,
                "mean_" + metric, float(np.mean(groups[key])),
            )
        )
    return out


def summary_path(out: str) -> str:
    root, ext = os.path.splitext(str(out))
    return root + ".summary" + (ext or ".csv")


def _write_output(config: RunConfig, records) -> None:
    write_records(config.out, records)
    if config.summary:
        write_records(summary_path(config.out), summarize(records))


# --- config files -----------------------------------------------------------

_LIST_KEYS = {"n_grid", "nf_grid", "snr_grid", "nf_series", "schemes", "receivers"}
_INT_KEYS = {"K", "M", "N", "L", "S", "n_f", "trials", "seed", "workers"}
_FLOAT_KEYS = {"snr_db"}
_BOOL_KEYS = {"summary"}


def parse_config_file(path) -> dict:
    """Plain-text ``key = value`` lines; ``#`` starts a comment."""
    try:
        with open(path, "r", encoding="utf-8") as f:
            text = f.read()
    except OSError as e:
        raise OSError(f"cannot read config file {path}: {e}") from e
    out: dict = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        out[key] = _coerce_config_value(key, value, f"{path}:{lineno}")
    return out


def _coerce_config_value(key: str, value: str, where: str):
    try:
        if key in _LIST_KEYS:
            items = [v.strip() for v in value.split(",") if v.strip()]
            if key in ("schemes", "receivers"):
                return tuple(items)
            if key == "snr_grid":
                return tuple(float(v) for v in items)
            return tuple(int(v) for v in items)
        if key in _INT_KEYS:
            return int(value)
        if key in _FLOAT_KEYS:
            return float(value)
        if key in _BOOL_KEYS:
            if value.lower() in ("1", "true", "yes", "on"):
                return True
            if value.lower() in ("0", "false", "no", "off"):
                return False
            raise ValueError(value)
        return value
    except ValueError as e:
        raise ConfigError(f"{where}: bad value for {key}: {value!r}") from e


# --- property suite ---------------------------------------------------------

@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str


def run_property_suite(
    config: RunConfig | None = None,
    cov_fn=interference_covariance,
) -> list[CheckResult]:
    """Aggregate invariant checks of all modules; see the CLI ``props`` command.

    ``cov_fn`` exists so tests can inject a broken covariance and confirm
    the matched-decoder check trips.
    """
    seed = 42 if config is None else config.seed
    results = [
        _prop_channel_moment(seed),
        _prop_bases_orthonormal(seed),
        _prop_lif_identity(seed),
        _prop_sigma_sandwich(seed),
        _prop_lemma1(seed),
        _prop_rc_cdf(seed),
        _prop_grassmannian(seed),
        _prop_matched_decoder(seed, cov_fn),
        _prop_gmi_vs_capacity(seed, cov_fn),
        _prop_theorem3_gap(seed),
        _prop_selection_dominance(seed),
        _prop_nf_monotonic(seed),
        _prop_tail_exponent(seed),
        _prop_csv_roundtrip(seed),
    ]
    return results


def _prop_channel_moment(seed) -> CheckResult:
    scen = Scenario(K=2, M=3, N=100, L=2, S=2, seed=seed)
    rng = streams.substream(seed, streams.PROBE, 0)
    total, count = 0.0, 0
    while count < 1_000_000:
        h = draw_channel_set(scen, rng).h
        total += float(np.sum(np.abs(h) ** 2))
        count += h.size
    mean = total / count
    ok = abs(mean - 1.0 / scen.L) <= 0.02 * (1.0 / scen.L)
    return CheckResult("channel_entry_second_moment", ok, f"mean |h|^2 = {mean:.5f}, expect 0.5 +- 2%")

def _prop_bases_orthonormal(seed) -> CheckResult:
    scen = Scenario(K=3, M=4, N=4, L=2, S=2, seed=seed)
    worst = 0.0
    for t in range(200):
        b = draw_reference_bases(scen, streams.substream(seed, streams.PROBE, 1, t))
        for k in range(scen.K):
            u, q = b.u[k], b.q[k]
            worst = max(
                worst,
                float(np.linalg.norm(u.conj().T @ u - np.eye(scen.S))),
                float(np.linalg.norm(u.conj().T @ q)),
            )
    return CheckResult("reference_basis_orthonormal", worst <= 1e-10, f"max defect {worst:.2e}")

def _prop_lif_identity(seed) -> CheckResult:
    worst = 0.0
    for t in range(100):
        for K in (2, 3):
            scen = Scenario(K=K, M=4, N=6, L=2, S=2, seed=seed)
            rng_c = streams.substream(seed, streams.PROBE, 2, t, K)
            ch = draw_channel_set(scen, rng_c)
            bases = draw_reference_bases(scen, rng_c)
            sels = run_cell_pipeline(ch, bases, None, scen)
            a, b = sum_lif(sels), cross_leakage_sum(ch, bases, sels)
            worst = max(worst, abs(a - b) / max(a, 1e-30))
    return CheckResult("network_lif_identity", worst <= 1e-8, f"max rel err {worst:.2e}")

def _prop_sigma_sandwich(seed) -> CheckResult:
    scen = Scenario(K=2, M=3, N=40, L=2, S=2, seed=seed)
    rng = streams.substream(seed, streams.PROBE, 3)
    cb = gen_random_codebook(2, 3, rng)
    worst = 0.0
    for t in range(50):
        ch = draw_channel_set(scen, rng)
        bases = draw_reference_bases(scen, rng)
        for cell in (1, 2):
            for st in cell_user_states(ch, bases, cb, cell):
                lo, hi = st.sigma[-1] ** 2, st.sigma[0] ** 2
                worst = max(worst, lo - st.eta, st.eta - hi)
    return CheckResult("rayleigh_sandwich", worst <= 1e-9, f"max violation {worst:.2e}")

def _prop_lemma1(seed) -> CheckResult:
    scen = Scenario(K=2, M=3, N=40, L=2, S=2, seed=seed)
    rng = streams.substream(seed, streams.PROBE, 4)
    cb = gen_random_codebook(2, 4, rng)
    worst = -np.inf
    for t in range(50):
        ch = draw_channel_set(scen, rng)
        bases = draw_reference_bases(scen, rng)
        for cell in (1, 2):
            for st in cell_user_states(ch, bases, cb, cell):
                bound = lemma1_bound(st.sigma[0], st.sigma[-1], st.d_sq)
                worst = max(worst, st.eta - bound)
    return CheckResult("quantized_leakage_bound", worst <= 1e-9, f"max excess {worst:.2e}")

def _prop_rc_cdf(seed) -> CheckResult:
    rng = streams.substream(seed, streams.PROBE, 5)
    n, n_f = 10_000, 4
    d = np.empty(n)
    for i in range(n):
        cb = gen_random_codebook(2, n_f, rng)
        v = rng.standard_normal(2) + 1j * rng.standard_normal(2)
        v /= np.linalg.norm(v)
        d[i] = quantize(v, cb).d_sq
    zs = np.sort(d)
    emp = np.arange(1, n + 1) / n
    theo = np.array([residual_distance_cdf(2, 2 ** n_f, z) for z in zs])
    sup = float(np.max(np.abs(emp - theo)))
    return CheckResult("random_codebook_distance_law", sup < 0.02, f"sup CDF deviation {sup:.4f}")

def _prop_grassmannian(seed) -> CheckResult:
    rng = streams.substream(seed, streams.PROBE, 6)
    pair = gen_grassmannian_codebook(2, 1, rng)
    four = gen_grassmannian_codebook(2, 2, rng)
    d2 = min_chordal_distance(pair)
    d4 = min_chordal_distance(four)
    ok = d2 >= 0.999 and 0.6 * packing_bound(2, 4) <= d4 <= 0.5 + 1e-6
    return CheckResult(
        "grassmannian_packing", ok, f"min d^2: size2 {d2:.4f}, size4 {d4:.4f}"
    )

def _prop_matched_decoder(seed, cov_fn) -> CheckResult:
    from .channel import complex_gaussian

    rng = streams.substream(seed, streams.PROBE, 7)
    worst = 0.0
    for _ in range(20):
        m, s, n0 = 4, 2, 0.5
        u_full, r_ = np.linalg.qr(complex_gaussian(rng, (m, m)))
        u = u_full[:, :s]
        cross = complex_gaussian(rng, (3, m))
        h_t = complex_gaussian(rng, (s, s))
        r_impl = cov_fn(cross, u, n0)
        # independent oracle for the same covariance
        r_oracle = n0 * np.eye(s, dtype=complex)
        for v in cross:
            x = u.conj().T @ v
            r_oracle += np.outer(x, x.conj())
        val = gmi_itheta(h_t, r_impl, r_impl, 1.0)
        # det(I + R^-1 H H^H) = det(I + H^H R^-1 H), the right side is Hermitian
        ref = logdet_pd(np.eye(s) + h_t.conj().T @ np.linalg.solve(r_oracle, h_t))
        worst = max(worst, abs(val - ref) / max(abs(ref), 1e-12))
    return CheckResult("matched_decoder_identity", worst <= 1e-9, f"max rel err {worst:.2e}")

def _prop_gmi_vs_capacity(seed, cov_fn) -> CheckResult:
    from .channel import complex_gaussian

    rng = streams.substream(seed, streams.PROBE, 8)
    worst = -np.inf
    for _ in range(50):
        m, s, n0 = 3, 2, 0.2
        u_full, _ = np.linalg.qr(complex_gaussian(rng, (m, m)))
        u = u_full[:, :s]
        cross = complex_gaussian(rng, (2, m), var=0.5)
        h_c = complex_gaussian(rng, (m, s))
        h_t = u.conj().T @ h_c
        r = cov_fn(cross, u, n0)
        _, gmi = gmi_med(h_t, r, n0)
        cap = capacity_ic(h_c, cross, n0)
        worst = max(worst, gmi - cap)
    return CheckResult("gmi_below_capacity", worst <= 1e-6, f"max gmi - capacity = {worst:.2e}")

def _prop_theorem3_gap(seed) -> CheckResult:
    snrs = (0.0, 10.0, 20.0, 30.0, 40.0)
    gaps = theorem3_gap_curve(seed, snrs, instances=200)
    decreasing = all(b < a for a, b in zip(gaps, gaps[1:]))
    ok = all(g > 0 for g in gaps) and decreasing and gaps[-1] < 0.05
    detail = ", ".join(f"{snr:.0f}dB: {g:.4f}" for snr, g in zip(snrs, gaps))
    return CheckResult("aligned_gmi_capacity_gap", ok, f"mean I_C - I_GMI bits [{detail}]")

def _prop_selection_dominance(seed) -> CheckResult:
    scen = Scenario(K=2, M=3, N=50, L=2, S=2, seed=seed)
    rng = streams.substream(seed, streams.PROBE, 9)
    cb = gen_grassmannian_codebook(2, 4, rng)
    ok = True
    for t in range(100):
        ch = draw_channel_set(scen, rng)
        bases = draw_reference_bases(scen, rng)
        svd_sels = run_cell_pipeline(ch, bases, None, scen)
        gc_sels = run_cell_pipeline(ch, bases, cb, scen)
        gc_bound = 0.0
        for cell in (1, 2):
            states = cell_user_states(ch, bases, cb, cell)
            for j in gc_sels[cell - 1].selected:
                st = states[j - 1]
                gc_bound += lemma1_bound(st.sigma[0], st.sigma[-1], st.d_sq)
        ok = ok and sum_lif(svd_sels) <= sum_lif(gc_sels) + 1e-12 <= gc_bound + 1e-9
    return CheckResult("scheme_dominance", ok, "svd <= codebook <= bound per trial")

def _prop_nf_monotonic(seed) -> CheckResult:
    scen = Scenario(K=2, M=3, N=50, L=2, S=2, seed=seed)
    nfs = (2, 4, 6, 8)
    books = {
        n_f: gen_random_codebook(2, n_f, streams.substream(seed, streams.CODEBOOK, 0, n_f))
        for n_f in nfs
    }
    means = {n_f: 0.0 for n_f in nfs}
    trials = 500
    for t in range(trials):
        ch = draw_channel_set(scen, streams.substream(seed, streams.CHANNEL, t, 0))
        bases = draw_reference_bases(scen, streams.substream(seed, streams.BASES, t, 0))
        for n_f in nfs:
            means[n_f] += sum_lif(run_cell_pipeline(ch, bases, books[n_f], scen)) / trials
    vals = [means[n_f] for n_f in nfs]
    ok = all(b <= a for a, b in zip(vals, vals[1:]))
    return CheckResult(
        "leakage_monotone_in_nf", ok, ", ".join(f"nf={n}: {v:.4f}" for n, v in zip(nfs, vals))
    )

def _prop_tail_exponent(seed) -> CheckResult:
    rng = streams.substream(seed, streams.PROBE, 10)
    u = rng.random(20_000)
    pareto = u ** (-0.5)          # Pr{X > x} = x^-2
    fit = empirical_tail_exponent(pareto, 0.9, 0.999, tail="upper")
    ok = abs(fit.exponent + 2.0) <= 0.1
    return CheckResult("tail_fit_oracle", ok, f"fitted exponent {fit.exponent:.3f}, expect -2")

def _prop_csv_roundtrip(seed) -> CheckResult:
    rec = ExperimentRecord(
        "rate_vs_snr", "gc_oia", "zf", 2, 3, 20, 2, 2, 6, 12.5, 7, "sum_rate", 3.25
    )
    ok = ExperimentRecord.from_row(rec.to_row()) == rec
    return CheckResult("csv_record_roundtrip", ok, rec.to_row())


def theorem3_gap_curve(seed: int, snrs, instances: int = 200) -> list[float]:
    """Mean I_C - I_GMI over aligned-interference instances, per SNR point."""
    gaps = []
    for si, snr in enumerate(snrs):
        n0 = 10.0 ** (-snr / 10.0)
        total = 0.0
        for t in range(instances):
            rng = streams.substream(seed, streams.PROBE, 11, t)
            h_c, h_t, cross, u = aligned_interference_instance(rng, m=3, s=2, n_cross=2, cross_var=1.5)
            r = interference_covariance(cross, u, n0)
            _, gmi = gmi_med(h_t, r, n0)
            cap = capacity_ic(h_c, cross, n0)
            total += cap - gmi
        gaps.append(total / instances)
    return gaps
