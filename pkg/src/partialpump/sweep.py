"""Two-axis parameter sweeps: configuration, parallel evaluation and output files."""
from __future__ import annotations

import csv
import io
import json
import math
import os
import tempfile
import traceback
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

import numpy as np
import yaml

from .liouvillian import ModelSpec
from .observables import evaluate
from .regimes import EPS_C, label
from .spectrum import analyze_emission, default_grid
from .steady import solve_steady_state

CSV_COLUMNS = ("axis1", "axis2", "Sz", "intensity", "g2", "g3", "linewidth", "peak_shift",
               "peak_structure", "statistics", "width", "method", "condition", "residual")
AXIS_PARAMS = ("w", "phi", "V", "kappa")
FORMATS = ("csv", "json", "svg")
ENV_OUTPUT = "PARTIALPUMP_OUTPUT_DIR"
ENV_WORKERS = "PARTIALPUMP_WORKERS"


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class Axis:
    name: str
    min: float
    max: float
    count: int
    scale: str = "linear"

    def __post_init__(self):
        if self.name not in AXIS_PARAMS:
            raise ConfigError(f"axis parameter must be one of {AXIS_PARAMS}, got {self.name!r}")
        if self.scale not in ("linear", "log"):
            raise ConfigError(f"axis scale must be 'linear' or 'log', got {self.scale!r}")
        if self.count < 2:
            raise ConfigError("axis count must be >= 2")
        if self.scale == "log" and self.min <= 0:
            raise ConfigError("log axis needs min > 0")

    def values(self) -> np.ndarray:
        if self.scale == "log":
            return np.geomspace(self.min, self.max, self.count)
        return np.linspace(self.min, self.max, self.count)


@dataclass(frozen=True)
class SpectrumOptions:
    points: int = 2001
    refine: bool = True
    min_points: int = 100


@dataclass(frozen=True)
class OutputOptions:
    directory: str = "results"
    formats: tuple = ("csv", "json")
    stem: str = "sweep"

    def __post_init__(self):
        bad = set(self.formats) - set(FORMATS)
        if bad:
            raise ConfigError(f"unknown output formats {sorted(bad)}")


@dataclass(frozen=True)
class SweepConfig:
    model: dict
    axis1: Axis
    axis2: Axis
    k_max: int = 3
    eps_c: float = EPS_C
    spectrum: SpectrumOptions = field(default_factory=SpectrumOptions)
    output: OutputOptions = field(default_factory=OutputOptions)
    workers: int = 1

    def __post_init__(self):
        if self.axis1.name == self.axis2.name:
            raise ConfigError("axis parameters must differ")
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")
        # the corners catch both a bad template and an axis the model does not allow
        for a in (self.axis1.min, self.axis1.max):
            for b in (self.axis2.min, self.axis2.max):
                self.spec_at(a, b)

    def spec_at(self, a1: float, a2: float) -> ModelSpec:
        params = dict(self.model)
        params[self.axis1.name] = float(a1)
        params[self.axis2.name] = float(a2)
        try:
            return ModelSpec(**params)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"invalid model point {params}: {exc}") from exc

    def grid(self) -> list[tuple[float, float]]:
        """Row-major: axis1 outer, axis2 inner."""
        return [(float(a), float(b)) for a in self.axis1.values() for b in self.axis2.values()]


def _strict(cls, data, where: str):
    if not isinstance(data, dict):
        raise ConfigError(f"{where}: expected a mapping")
    known = {f.name for f in fields(cls)}
    unknown = set(data) - known
    if unknown:
        raise ConfigError(f"{where}: unknown keys {sorted(unknown)}")
    return data


MODEL_KEYS = {"model", "N", "w", "phi", "V", "kappa", "basis", "n_cut"}


def config_from_dict(data: dict, env: dict | None = None) -> SweepConfig:
    """Build a config, rejecting unknown keys at every level.

    Only the output directory and the worker count may be overridden from
    the environment.
    """
    env = os.environ if env is None else env
    data = dict(_strict(SweepConfig, data, "config"))
    for key in ("model", "axis1", "axis2"):
        if key not in data:
            raise ConfigError(f"config: missing {key!r}")
    model = data["model"]
    if not isinstance(model, dict) or set(model) - MODEL_KEYS:
        raise ConfigError(f"model: unknown keys {sorted(set(model) - MODEL_KEYS)}")
    try:
        data["axis1"] = Axis(**_strict(Axis, data["axis1"], "axis1"))
        data["axis2"] = Axis(**_strict(Axis, data["axis2"], "axis2"))
        data["spectrum"] = SpectrumOptions(**_strict(SpectrumOptions, data.get("spectrum", {}), "spectrum"))
        out = dict(_strict(OutputOptions, data.get("output", {}), "output"))
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc
    if "formats" in out:
        out["formats"] = tuple(out["formats"])
    if env.get(ENV_OUTPUT):
        out["directory"] = env[ENV_OUTPUT]
    data["output"] = OutputOptions(**out)
    if env.get(ENV_WORKERS):
        try:
            data["workers"] = int(env[ENV_WORKERS])
        except ValueError as exc:
            raise ConfigError(f"{ENV_WORKERS} must be an integer") from exc
    return SweepConfig(**data)


def load_config(path, env: dict | None = None) -> SweepConfig:
    with open(path) as fh:
        try:
            data = yaml.safe_load(fh)
        except yaml.YAMLError as exc:
            raise ConfigError(f"{path}: {exc}") from exc
    return config_from_dict(data or {}, env)


def evaluate_point(spec: ModelSpec, k_max: int = 3, eps_c: float = EPS_C,
                   spectrum: SpectrumOptions = SpectrumOptions()) -> dict:
    """Everything one CSV row needs; failures are caught and recorded."""
    rec = {c: math.nan for c in CSV_COLUMNS[2:]}
    rec.update(peak_structure="", statistics="", width="", method="", N=spec.N, error="")
    try:
        from .liouvillian import assemble
        L = assemble(spec)
        state = solve_steady_state(L, spec)
        obs = evaluate(state, k_max)
        rec.update(Sz=obs.Sz, intensity=obs.intensity, g2=obs.g2, g3=obs.g3, residual=state.residual_norm)
        an = analyze_emission(spec, default_grid(spec, spectrum.points), refine=spectrum.refine,
                              L=L, state=state, min_points=spectrum.min_points)
        sr = an.spectrum
        rec.update(linewidth=sr.linewidth, peak_shift=sr.peak_shift, method=sr.method,
                   condition=sr.meta.get("condition", math.nan),
                   peak_structure=sr.peak_structure.value if sr.peak_structure else "")
        if "error" in sr.meta:
            rec["error"] = sr.meta["error"]
        lab = label(math.nan if obs.underflow else obs.g2, sr.linewidth, spec.N, eps_c)
        rec.update(statistics=lab.statistics.value, width=lab.width.value)
    except Exception as exc:  # recorded per point, the sweep carries on
        rec["error"] = f"{type(exc).__name__}: {exc}"
        rec["hard_failure"] = True
        rec["traceback"] = traceback.format_exc(limit=3)
    return rec


def _task(args):
    spec, k_max, eps_c, spectrum = args
    return evaluate_point(spec, k_max, eps_c, spectrum)


@dataclass
class SweepResult:
    config: SweepConfig
    records: list

    @property
    def failures(self) -> list:
        return [r for r in self.records if r.get("hard_failure")]


def run_sweep(config: SweepConfig) -> SweepResult:
    grid = config.grid()
    tasks = [(config.spec_at(a, b), config.k_max, config.eps_c, config.spectrum) for a, b in grid]
    if config.workers == 1:
        results = [_task(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            results = list(pool.map(_task, tasks, chunksize=max(1, len(tasks) // (8 * config.workers))))
    records = []
    for (a, b), rec in zip(grid, results):
        records.append({"axis1": a, "axis2": b, **rec})
    return SweepResult(config, records)


def fmt(x) -> str:
    if isinstance(x, str):
        return x
    if x is None:
        return ""
    return f"{float(x):.17g}"


def csv_text(records) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for rec in records:
        writer.writerow([fmt(rec[c]) for c in CSV_COLUMNS])
    return buf.getvalue()


def _json_safe(x):
    if isinstance(x, float):
        return fmt(x) if not math.isfinite(x) else float(fmt(x))
    if isinstance(x, dict):
        return {k: _json_safe(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_json_safe(v) for v in x]
    return x


def config_as_dict(config: SweepConfig) -> dict:
    d = asdict(config)
    d["output"]["formats"] = list(config.output.formats)
    return d


def json_text(result: SweepResult) -> str:
    recs = [{k: v for k, v in r.items() if k != "traceback"} for r in result.records]
    payload = {"config": config_as_dict(result.config), "records": recs}
    return json.dumps(_json_safe(payload), indent=1, sort_keys=True) + "\n"


def atomic_write(path, text: str):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_outputs(result: SweepResult) -> dict:
    out = result.config.output
    base = Path(out.directory)
    written = {}
    csv_path = base / f"{out.stem}.csv"
    if "csv" in out.formats or "svg" in out.formats:
        atomic_write(csv_path, csv_text(result.records))
        written["csv"] = csv_path
    if "json" in out.formats:
        written["json"] = base / f"{out.stem}.json"
        atomic_write(written["json"], json_text(result))
    if "svg" in out.formats:
        written["svg"] = plot_sweep_csv(csv_path, base / f"{out.stem}.svg",
                                        result.config.axis1, result.config.axis2)
    return written


def read_csv(path) -> list[dict]:
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    if not rows or tuple(rows[0].keys()) != CSV_COLUMNS:
        raise ConfigError(f"{path}: not a sweep CSV")
    return rows


def plot_sweep_csv(csv_path, svg_path, axis1: Axis | None = None, axis2: Axis | None = None,
                   quantities=("Sz", "intensity", "g2", "g3", "linewidth", "peak_shift")):
    """Heatmaps of a sweep, read back from its CSV only."""
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    rows = read_csv(csv_path)
    a1 = np.array(sorted({float(r["axis1"]) for r in rows}))
    a2 = np.array(sorted({float(r["axis2"]) for r in rows}))
    fig, axes = plt.subplots(2, 3, figsize=(12, 7), constrained_layout=True)
    for ax, q in zip(axes.ravel(), quantities):
        Z = np.full((a1.size, a2.size), np.nan)
        for r in rows:
            i = np.searchsorted(a1, float(r["axis1"]))
            j = np.searchsorted(a2, float(r["axis2"]))
            Z[i, j] = float(r[q]) if r[q] else np.nan
        log_like = q in ("intensity", "g2", "g3", "linewidth") and np.nanmin(Z) > 0
        mesh = ax.pcolormesh(a2, a1, np.log10(Z) if log_like else Z, shading="nearest")
        fig.colorbar(mesh, ax=ax, label=f"log10 {q}" if log_like else q)
        if axis2 is not None and axis2.scale == "log":
            ax.set_xscale("log")
        if axis1 is not None and axis1.scale == "log":
            ax.set_yscale("log")
        ax.set_xlabel(axis2.name if axis2 else "axis2")
        ax.set_ylabel(axis1.name if axis1 else "axis1")
    fig.savefig(svg_path, format="svg", metadata={"Date": None})
    plt.close(fig)
    return Path(svg_path)


def plot_spectrum_csv(csv_path, svg_path):
    """Line plot of a spectrum table (first column omega, the rest curves)."""
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    with open(csv_path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        data = np.array([[float(x) for x in row] for row in reader])
    fig, ax = plt.subplots(figsize=(6, 4), constrained_layout=True)
    for k, name in enumerate(header[1:], start=1):
        ax.plot(data[:, 0], data[:, k], lw=1.5 if k == 1 else 0.8, label=name)
    ax.axhline(0, color="k", lw=0.4)
    ax.set_xlabel("omega")
    ax.set_ylabel("S(omega)")
    ax.legend(fontsize=7)
    fig.savefig(svg_path, format="svg", metadata={"Date": None})
    plt.close(fig)
    return Path(svg_path)


def relabel(records: list[dict], eps_c: float) -> list[dict]:
    """New regime labels from stored g2 and linewidth; no solver involved."""
    out = []
    for r in records:
        r = dict(r)
        g2 = float(r["g2"]) if r.get("g2") not in (None, "") else math.nan
        lw = float(r["linewidth"]) if r.get("linewidth") not in (None, "") else math.nan
        lab = label(g2, lw, int(r["N"]), eps_c)
        r["statistics"], r["width"] = lab.statistics.value, lab.width.value
        out.append(r)
    return out
