"""Monte Carlo sweeps, report tables, and deterministic CSV/JSON emission.

A sweep is a grid of (height, drop-probability) cells; each cell runs a fixed
number of seeded trials (one sampled fan per trial, keyed by master_seed and
the trial index alone) and aggregates them into a single summary row.  Trial
RNG streams never depend on worker count or scheduling, and rows are emitted
in grid order with a canonical number format, so a sweep's output is
byte-identical across runs and thread pools.

Report builders for the deterministic tables (blowdown exports, ratio
tables, first-quadrant shells) live here too, sharing the same emission
path.
"""

from __future__ import annotations

import json
import math
import os
import tempfile
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .blowdown import BlowdownTable, blowdown_table, conjectured_ratio
from .errors import ValidationError
from .fans import delta_k
from .lattice import MAX_H
from .sampling import SampleConfig, sample_fan

FORMATS = ("csv", "json")

#: Two-sided 99% normal quantile, fixed for the Wilson interval columns.
_Z99 = 2.5758293035489004

_UINT64_BOUND = 2**64


@dataclass(frozen=True)
class PowerSchedule:
    """Drop-probability schedule value c * h**(-alpha), clamped to [0, 1]."""

    c: float
    alpha: float

    def value(self, h: int) -> float:
        return min(1.0, self.c * float(h) ** -self.alpha)


@dataclass
class ExperimentSpec:
    """Configuration of one seeded sweep.

    q_schedule is either a PowerSchedule or an explicit list of values
    aligned with h_values; values are clamped to [0, 1].  regime selects
    whether the schedule value drives the drop probability q directly
    ("q-small") or its complement 1 - q ("q-large", the almost-everything-
    dropped end).  output, when set, is {"path": ..., "format": "csv"|"json"}.
    """

    h_values: list[int]
    q_schedule: "PowerSchedule | list[float]"
    regime: str = "q-small"
    trials: int = 200
    k_list: list[int] = field(default_factory=lambda: [2])
    c_density: float = 0.01
    master_seed: int = 0
    output: dict | None = None

    def __post_init__(self):
        if not self.h_values:
            raise ValidationError("h_values must be non-empty")
        for h in self.h_values:
            if not isinstance(h, (int, np.integer)) or not 1 <= h <= MAX_H:
                raise ValidationError(f"every height must be an integer in [1, {MAX_H}], got {h!r}")
        if isinstance(self.q_schedule, PowerSchedule):
            if not (self.q_schedule.c > 0 and math.isfinite(self.q_schedule.c)):
                raise ValidationError(f"schedule coefficient must be finite and > 0, got {self.q_schedule.c!r}")
            if not math.isfinite(self.q_schedule.alpha):
                raise ValidationError(f"schedule exponent must be finite, got {self.q_schedule.alpha!r}")
        else:
            if len(self.q_schedule) != len(self.h_values):
                raise ValidationError(
                    f"explicit q_schedule has {len(self.q_schedule)} values for {len(self.h_values)} heights"
                )
            for v in self.q_schedule:
                if not isinstance(v, (int, float)) or not math.isfinite(v) or v < 0:
                    raise ValidationError(f"schedule values must be finite and >= 0, got {v!r}")
        if self.regime not in ("q-small", "q-large"):
            raise ValidationError(f"regime must be 'q-small' or 'q-large', got {self.regime!r}")
        if not isinstance(self.trials, (int, np.integer)) or self.trials < 1:
            raise ValidationError(f"trials must be a positive integer, got {self.trials!r}")
        if not self.k_list or any(not isinstance(k, (int, np.integer)) or k < 1 for k in self.k_list):
            raise ValidationError(f"k_list must be non-empty integers >= 1, got {self.k_list!r}")
        if not isinstance(self.c_density, (int, float)) or not 0 < self.c_density < 1:
            raise ValidationError(f"c_density must lie in (0, 1), got {self.c_density!r}")
        if not isinstance(self.master_seed, (int, np.integer)) or not 0 <= self.master_seed < _UINT64_BOUND:
            raise ValidationError(f"master_seed must be an unsigned 64-bit integer, got {self.master_seed!r}")
        if self.output is not None:
            if (
                not isinstance(self.output, dict)
                or set(self.output) != {"path", "format"}
                or self.output["format"] not in FORMATS
            ):
                raise ValidationError("output must be {'path': ..., 'format': 'csv'|'json'}")

    def q_values(self) -> list[float]:
        """Drop probability per height: schedule value or its complement."""
        if isinstance(self.q_schedule, PowerSchedule):
            vals = [self.q_schedule.value(h) for h in self.h_values]
        else:
            vals = [min(1.0, float(v)) for v in self.q_schedule]
        return vals if self.regime == "q-small" else [1.0 - v for v in vals]


_SPEC_FIELDS = (
    "h_values", "q_schedule", "regime", "trials", "k_list",
    "c_density", "master_seed", "output",
)


def spec_from_dict(doc) -> ExperimentSpec:
    """Build a spec from a plain document whose keys match the field names."""
    if not isinstance(doc, dict):
        raise ValidationError("experiment spec must be a mapping")
    unknown = set(doc) - set(_SPEC_FIELDS)
    if unknown:
        raise ValidationError(f"unknown spec fields: {sorted(unknown)}")
    if "h_values" not in doc or "q_schedule" not in doc:
        raise ValidationError("spec needs at least h_values and q_schedule")
    sched = doc["q_schedule"]
    if isinstance(sched, dict):
        if set(sched) != {"c", "alpha"}:
            raise ValidationError("power-law q_schedule must be {'c': ..., 'alpha': ...}")
        schedule: "PowerSchedule | list[float]" = PowerSchedule(float(sched["c"]), float(sched["alpha"]))
    elif isinstance(sched, list):
        schedule = [float(v) for v in sched]
    else:
        raise ValidationError("q_schedule must be a list or {'c', 'alpha'}")
    kwargs = {k: doc[k] for k in _SPEC_FIELDS[2:] if k in doc}
    return ExperimentSpec(h_values=[int(h) for h in doc["h_values"]], q_schedule=schedule, **kwargs)


def spec_from_file(path) -> ExperimentSpec:
    """Load a JSON experiment spec; parse errors become validation errors."""
    with open(path, encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except ValueError as exc:
            raise ValidationError(f"{path} is not valid JSON: {exc}") from exc
    return spec_from_dict(doc)


@dataclass(frozen=True)
class TrialRecord:
    """Outcome of a single seeded draw, before aggregation."""

    h: int
    q: float
    trial_index: int
    n_rays_drawn: int
    n_cones: int
    smooth: bool
    max_index: int  # 0 for a fan with no cones
    delta_k: dict

    def __post_init__(self):
        if self.smooth != (self.max_index <= 1):
            raise ValidationError("smooth flag contradicts max_index")


@dataclass(frozen=True)
class SweepRow:
    """Aggregated summary of all trials of one (h, q) grid cell."""

    h: int
    q: float
    trials: int
    frac_smooth: float
    frac_singular: float
    wilson_ci_low: float
    wilson_ci_high: float
    n_no_cones: int
    max_index_p50: int
    max_index_p90: int
    mean_delta: dict
    frac_delta_above_c: dict


def run_trial(h: int, q: float, master_seed: int, trial_index: int, k_list) -> TrialRecord:
    """One draw at drop probability q, classified and measured."""
    cfg = SampleConfig(h=h, p=1.0 - q, master_seed=master_seed, trial_index=trial_index)
    fan = sample_fan(cfg)
    m = fan.n_cones
    max_index = int(fan.cone_indices.max()) if m else 0
    deltas = {int(k): delta_k(fan, int(k)) for k in k_list}
    return TrialRecord(
        h=h, q=q, trial_index=trial_index, n_rays_drawn=fan.n_rays,
        n_cones=m, smooth=max_index <= 1, max_index=max_index, delta_k=deltas,
    )


def wilson_interval(successes: int, trials: int, z: float = _Z99) -> tuple[float, float]:
    """Wilson score interval for a binomial proportion (99% two-sided default)."""
    if trials < 1 or not 0 <= successes <= trials:
        raise ValidationError(f"need 0 <= successes <= trials, got {successes}/{trials}")
    phat = successes / trials
    z2 = z * z
    denom = 1.0 + z2 / trials
    center = (phat + z2 / (2.0 * trials)) / denom
    half = z * math.sqrt(phat * (1.0 - phat) / trials + z2 / (4.0 * trials * trials)) / denom
    return max(0.0, center - half), min(1.0, center + half)


def _nearest_rank(sorted_vals, frac: float):
    return sorted_vals[max(0, math.ceil(frac * len(sorted_vals)) - 1)]


def _aggregate(h, q, records, k_list, c_density) -> SweepRow:
    t = len(records)
    n_smooth = sum(1 for r in records if r.smooth)
    ci_low, ci_high = wilson_interval(n_smooth, t)
    by_max = sorted(r.max_index for r in records)
    mean_delta = {}
    frac_above = {}
    for k in k_list:
        k = int(k)
        defined = [r.delta_k[k] for r in records if r.delta_k[k] is not None]
        # exact Fraction mean, floated once at the end
        mean_delta[k] = float(sum(defined) / len(defined)) if defined else None
        above = sum(1 for r in records if r.delta_k[k] is not None and r.delta_k[k] > c_density)
        frac_above[k] = above / t
    frac_smooth = n_smooth / t
    return SweepRow(
        h=h, q=q, trials=t,
        frac_smooth=frac_smooth, frac_singular=1.0 - frac_smooth,
        wilson_ci_low=ci_low, wilson_ci_high=ci_high,
        n_no_cones=sum(1 for r in records if r.n_cones == 0),
        max_index_p50=int(_nearest_rank(by_max, 0.5)),
        max_index_p90=int(_nearest_rank(by_max, 0.9)),
        mean_delta=mean_delta, frac_delta_above_c=frac_above,
    )


def _sweep(spec: ExperimentSpec, workers: int) -> list[SweepRow]:
    if not isinstance(workers, int) or workers < 1:
        raise ValidationError(f"workers must be a positive integer, got {workers!r}")
    rows = []
    for h, q in zip(spec.h_values, spec.q_values()):
        def one_trial(t: int, h=h, q=q) -> TrialRecord:
            return run_trial(int(h), q, int(spec.master_seed), t, spec.k_list)

        if workers == 1:
            records = [one_trial(t) for t in range(spec.trials)]
        else:
            # map() preserves submission order; streams are keyed by trial
            # index, so scheduling cannot leak into the records
            with ThreadPoolExecutor(max_workers=workers) as pool:
                records = list(pool.map(one_trial, range(spec.trials)))
        rows.append(_aggregate(int(h), q, records, spec.k_list, spec.c_density))
    return rows


def run_threshold_sweep(spec: ExperimentSpec, *, workers: int = 1) -> list[SweepRow]:
    """Smooth/singular classification rates across the experiment spec's (h, q) grid."""
    return _sweep(spec, workers)


def run_density_sweep(spec: ExperimentSpec, *, workers: int = 1) -> list[SweepRow]:
    """Singular-cone density statistics across the experiment spec's (h, q) grid.

    Per cell and per k, the row reports the mean of the defined densities
    delta_k and the fraction of trials whose density exceeds c_density;
    cone-free trials count as failures there and are tallied in n_no_cones.
    """
    return _sweep(spec, workers)


SWEEP_BASE_COLUMNS = (
    "h", "q", "trials", "frac_smooth", "frac_singular",
    "wilson_ci_low", "wilson_ci_high", "n_no_cones",
    "max_index_p50", "max_index_p90",
)


def sweep_columns(k_list) -> list[str]:
    """Column order for sweep emission: base summary, then per-k pairs."""
    cols = list(SWEEP_BASE_COLUMNS)
    for k in k_list:
        cols.append(f"mean_delta_{int(k)}")
        cols.append(f"frac_delta_{int(k)}_above_c")
    return cols


def sweep_rows_as_dicts(rows, k_list) -> list[dict]:
    """Flatten SweepRows into emit()-ready dicts matching sweep_columns()."""
    out = []
    for r in rows:
        d = {c: getattr(r, c) for c in SWEEP_BASE_COLUMNS}
        for k in k_list:
            k = int(k)
            d[f"mean_delta_{k}"] = r.mean_delta[k]
            d[f"frac_delta_{k}_above_c"] = r.frac_delta_above_c[k]
        out.append(d)
    return out


BLOWDOWN_COLUMNS = ("x", "y", "norm", "k")


def blowdown_rows(table: BlowdownTable) -> list[dict]:
    """Full blowdown-table export: one row per ray in canonical order."""
    c, k = table.coords, table.k_values
    norms = np.maximum(np.abs(c[:, 0]), np.abs(c[:, 1]))
    return [
        {"x": int(x), "y": int(y), "norm": int(n), "k": int(kk)}
        for (x, y), n, kk in zip(c, norms, k)
    ]


RATIO_COLUMNS = ("h", "k", "count_geq", "n_h", "ratio", "conjectured")


def conjecture_report(h_values, k_max: int) -> list[dict]:
    """Long-form ratio table: measured fraction of rays with blowdown index
    >= k next to the conjectured limit 2/T_k, for k = 2..k_max per height."""
    if k_max < 2:
        raise ValidationError(f"k_max must be >= 2, got {k_max}")
    rows = []
    for h in h_values:
        table = blowdown_table(int(h))
        n = len(table)
        for k in range(2, k_max + 1):
            rows.append({
                "h": int(h), "k": k, "count_geq": table.count_geq(k), "n_h": n,
                "ratio": float(table.ratio_geq(k)),
                "conjectured": float(conjectured_ratio(k)),
            })
    return rows


SPACE_COLUMNS = ("x", "y", "k")


def space_report(h: int) -> list[dict]:
    """Blowdown index of every ray in the closed first quadrant, in angular
    order; the raw material for shell scatter plots."""
    table = blowdown_table(h)
    c, k = table.coords, table.k_values
    sel = (c[:, 0] >= 0) & (c[:, 1] >= 0)
    return [{"x": int(x), "y": int(y), "k": int(kk)} for (x, y), kk in zip(c[sel], k[sel])]


def format_cell(value) -> str:
    """Canonical CSV cell: floats at 6 significant digits, lowercase booleans,
    'null' for missing values, integers verbatim."""
    if value is None:
        return "null"
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating, Fraction)):
        return format(float(value), ".6g")
    return str(value)


def _json_value(value):
    if value is None or isinstance(value, (bool, str)):
        return value
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating, Fraction)):
        return float(value)
    return value


def render(rows, format: str, *, columns) -> str:
    """Render rows to canonical text: CSV (header + LF lines) or a JSON list."""
    if format not in FORMATS:
        raise ValidationError(f"format must be one of {FORMATS}, got {format!r}")
    columns = list(columns)
    if format == "csv":
        lines = [",".join(columns)]
        for row in rows:
            lines.append(",".join(format_cell(row[c]) for c in columns))
        return "\n".join(lines) + "\n"
    docs = [{c: _json_value(row[c]) for c in columns} for row in rows]
    return json.dumps(docs, indent=2, ensure_ascii=False) + "\n"


def write_text(path, text: str) -> None:
    """Atomic UTF-8 write: temp file in the target directory, then rename.

    Interrupted or failed writes never leave a partial file at the target
    path, and the temp file is removed on failure.
    """
    path = os.fspath(path)
    directory = os.path.dirname(os.path.abspath(path)) or "."
    tmp = None
    try:
        fd, tmp = tempfile.mkstemp(dir=directory, prefix=".emit-", suffix=".part")
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
        tmp = None
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc}") from exc
    finally:
        if tmp is not None:
            try:
                os.unlink(tmp)
            except OSError:
                pass


def emit(rows, format: str, path, *, columns) -> None:
    """Render rows and write them atomically.

    Equal inputs produce byte-identical files: fixed column order, canonical
    cell formatting, LF newlines, UTF-8, and a header-only file for an empty
    row list.
    """
    write_text(path, render(rows, format, columns=columns))
