"""Parameter sweeps and figure presets producing plain CSV / JSON-lines tables.

Rows always come out in grid order (tau outer, alpha inner), whatever the
worker count, and floats are written as their shortest round-trip decimal so
identical configs give identical bytes.
"""

from __future__ import annotations

import json
import math
import os
import sys
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace

from . import __version__
from .beamsplitter import make_config
from .entanglement import JacobiConvergenceError, entropy_of_state
from .model import DeformedOscillator, PerturbativeRangeWarning
from .states import (
    DEFAULT_TAIL_TOL,
    Family,
    StateSpec,
    TruncationWarning,
    ZeroVectorError,
    build_state,
    converge_truncation,
)

WORKERS_ENV = "NCSQUEEZE_WORKERS"
AUTO_N_START = 8
AUTO_N_MAX = 128

CSV_COLUMNS = (
    "alpha", "tau", "zeta_re", "zeta_im", "theta", "levels",
    "linear_entropy", "purity", "converged", "tail_mass",
)
OVERLAY_COLUMNS = (
    "alpha", "tau", "zeta_re", "zeta_im", "theta", "levels",
    "S_nc", "S_ho", "converged_nc", "converged_ho", "tail_mass_nc", "tail_mass_ho",
)


def grid_range(start: float, stop: float, step: float) -> tuple[float, ...]:
    """Inclusive arithmetic grid, rounded to 12 decimals to keep gridlines clean."""
    if step <= 0:
        raise ValueError(f"grid step must be positive, got {step}")
    count = int(math.floor((stop - start) / step + 1e-9)) + 1
    if count < 1:
        raise ValueError(f"empty grid {start}:{stop}:{step}")
    return tuple(round(start + i * step, 12) + 0.0 for i in range(count))


def parse_complex(text) -> complex:
    if isinstance(text, (list, tuple)):
        re, im = text
        return complex(float(re), float(im))
    if isinstance(text, (int, float, complex)):
        return complex(text)
    s = str(text).strip().replace(" ", "").replace("i", "j")
    try:
        return complex(s)
    except ValueError:
        raise ValueError(f"cannot parse {text!r} as a complex number") from None


def parse_grid(text, *, complex_values: bool = False) -> tuple:
    """``"a:b:step"`` (inclusive), ``"x,y,z"`` or a JSON list."""
    conv = parse_complex if complex_values else float
    if isinstance(text, (list, tuple)):
        values = tuple(conv(v) for v in text)
    elif isinstance(text, (int, float)):
        values = (conv(text),)
    else:
        s = str(text).strip()
        if s.count(":") == 2:
            start, stop, step = (float(x) for x in s.split(":"))
            values = tuple(conv(v) for v in grid_range(start, stop, step))
        else:
            values = tuple(conv(v) for v in s.split(",") if v.strip())
    if not values:
        raise ValueError(f"empty grid {text!r}")
    return values


def parse_levels(value) -> int | str:
    if isinstance(value, str) and value.strip().lower() == "auto":
        return "auto"
    n = int(value)
    if n < 8:
        raise ValueError(f"levels must be >= 8 or 'auto', got {n}")
    return n


@dataclass(frozen=True)
class SweepConfig:
    family: Family = Family.NC_SQUEEZED
    alpha_grid: tuple = (1.0,)
    zeta: complex = 0j
    tau_grid: tuple = (0.0,)
    theta: float = math.pi / 2
    phi: float = 0.0
    levels: int | str = "auto"
    tail_tol: float = DEFAULT_TAIL_TOL
    output_path: str | None = None
    output_format: str = "csv"

    def __post_init__(self):
        object.__setattr__(self, "family", Family.parse(self.family))
        object.__setattr__(self, "alpha_grid", parse_grid(self.alpha_grid, complex_values=True))
        object.__setattr__(self, "tau_grid", parse_grid(self.tau_grid))
        object.__setattr__(self, "zeta", parse_complex(self.zeta))
        object.__setattr__(self, "levels", parse_levels(self.levels))
        if self.output_format not in ("csv", "json"):
            raise ValueError(f"output format must be csv or json, got {self.output_format!r}")
        # validates the family / zeta combination once, up front
        StateSpec(self.family, self.alpha_grid[0], self.zeta, DeformedOscillator(0.0))

    @classmethod
    def from_dict(cls, data: dict) -> "SweepConfig":
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown config keys: {', '.join(sorted(unknown))}")
        return cls(**data)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["family"] = self.family.value
        d["alpha_grid"] = [[a.real, a.imag] for a in self.alpha_grid]
        d["zeta"] = [self.zeta.real, self.zeta.imag]
        d["tau_grid"] = list(self.tau_grid)
        return d

    def points(self) -> list[tuple[complex, float]]:
        return [(a, t) for t in self.tau_grid for a in self.alpha_grid]


@dataclass(frozen=True)
class FigurePreset:
    name: str
    config: SweepConfig
    kind: str  # "curves", "surface" or "overlay"
    description: str = ""
    compare_family: Family | None = field(default=None)


def _presets() -> dict[str, FigurePreset]:
    alpha_fine = grid_range(0.0, 3.0, 0.05)
    alpha_coarse = grid_range(0.0, 3.0, 0.1)
    tau_surface = grid_range(0.0, 1.0, 0.05)
    half_pi = math.pi / 2
    return {
        "fig1a": FigurePreset(
            "fig1a",
            SweepConfig(Family.NC_COHERENT, alpha_fine, 0j, (0.0, 0.1, 0.2, 0.3, 0.5), half_pi, 0.0, 20),
            "curves", "coherent-state input: S vs alpha for several tau, 20 levels",
        ),
        "fig1b": FigurePreset(
            "fig1b",
            SweepConfig(Family.NC_COHERENT, alpha_coarse, 0j, tau_surface, half_pi, 0.0, 20),
            "surface", "coherent-state input: S over (alpha, tau), 20 levels",
        ),
        "fig2a": FigurePreset(
            "fig2a",
            SweepConfig(Family.NC_SQUEEZED, alpha_fine, 0.75, (0.5,), half_pi, 0.0, 40),
            "overlay", "deformed vs ordinary squeezed input, tau=0.5, zeta=0.75, 40 levels",
            Family.HO_SQUEEZED,
        ),
        "fig2b": FigurePreset(
            "fig2b",
            SweepConfig(Family.NC_SQUEEZED, alpha_fine, 0.25, (0.5,), half_pi, 0.0, 40),
            "overlay", "deformed vs ordinary squeezed input, tau=0.5, zeta=0.25, 40 levels",
            Family.HO_SQUEEZED,
        ),
        "fig3": FigurePreset(
            "fig3",
            SweepConfig(Family.NC_SQUEEZED, alpha_coarse, 0.5, tau_surface, half_pi, 0.0, 10),
            "surface", "squeezed input: S over (alpha, tau), zeta=0.5, 10 levels",
        ),
    }


PRESETS = _presets()


def evaluate_point(family, alpha, zeta, tau, theta, phi, levels, tail_tol,
                   von_neumann: bool = False) -> dict:
    """Build, mix, reduce and measure one grid point.

    Numeric failures come back as a row with NaN entropies and ``error`` set.
    """
    family = Family.parse(family)
    row = {
        "family": family.value,
        "alpha": complex(alpha),
        "zeta": complex(zeta),
        "tau": float(tau) if family.deformed else 0.0,
        "theta": float(theta),
        "phi": float(phi),
        "levels": levels if levels != "auto" else None,
        "linear_entropy": math.nan,
        "purity": math.nan,
        "von_neumann": None,
        "converged": False,
        "tail_mass": math.nan,
        "error": None,
    }
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", TruncationWarning)
            warnings.simplefilter("ignore", PerturbativeRangeWarning)
            spec = StateSpec(family, alpha, zeta, DeformedOscillator(tau))
            if levels == "auto":
                vec, converged = converge_truncation(spec, tail_tol, AUTO_N_START, AUTO_N_MAX)
            else:
                vec = build_state(spec, int(levels))
                converged = vec.tail_mass < tail_tol
        res = entropy_of_state(vec, make_config(theta, phi), von_neumann=von_neumann,
                               converged=converged)
    except (ZeroVectorError, JacobiConvergenceError, FloatingPointError, OverflowError) as exc:
        row["error"] = f"{type(exc).__name__}: {exc}"
        return row
    row.update(
        levels=res.truncation,
        linear_entropy=res.linear_entropy,
        purity=res.purity,
        von_neumann=res.von_neumann,
        converged=res.converged,
        tail_mass=res.tail_mass,
    )
    return row


def _evaluate_args(args):
    return evaluate_point(*args)


def resolve_workers(workers: int | None = None) -> int:
    if workers is None:
        env = os.environ.get(WORKERS_ENV, "").strip()
        workers = int(env) if env else 1
    return max(1, int(workers))


def _run(tasks: list[tuple], workers: int) -> list[dict]:
    if workers <= 1 or len(tasks) < 2:
        return [_evaluate_args(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        # map preserves submission order
        return list(pool.map(_evaluate_args, tasks, chunksize=max(1, len(tasks) // (4 * workers))))


def run_sweep(config: SweepConfig, workers: int | None = None) -> list[dict]:
    tasks = [
        (config.family, a, config.zeta, t, config.theta, config.phi, config.levels, config.tail_tol)
        for a, t in config.points()
    ]
    return _run(tasks, resolve_workers(workers))


def run_overlay(preset: FigurePreset, workers: int | None = None) -> list[dict]:
    """Deformed and ordinary families on the same alpha grid, joined row-wise."""
    cfg = preset.config
    fams = (cfg.family, preset.compare_family)
    tasks = [
        (fam, a, cfg.zeta, t, cfg.theta, cfg.phi, cfg.levels, cfg.tail_tol)
        for t in cfg.tau_grid for a in cfg.alpha_grid for fam in fams
    ]
    done = _run(tasks, resolve_workers(workers))
    rows = []
    for nc, ho in zip(done[0::2], done[1::2]):
        rows.append({
            "alpha": nc["alpha"],
            "tau": nc["tau"],
            "zeta": nc["zeta"],
            "theta": nc["theta"],
            "levels": nc["levels"],
            "S_nc": nc["linear_entropy"],
            "S_ho": ho["linear_entropy"],
            "converged_nc": nc["converged"],
            "converged_ho": ho["converged"],
            "tail_mass_nc": nc["tail_mass"],
            "tail_mass_ho": ho["tail_mass"],
            "error": nc["error"] or ho["error"],
        })
    return rows


def run_figure(name: str, workers: int | None = None) -> tuple[FigurePreset, list[dict]]:
    try:
        preset = PRESETS[name]
    except KeyError:
        raise ValueError(f"unknown figure preset {name!r} (choose from {', '.join(PRESETS)})") from None
    if preset.kind == "overlay":
        return preset, run_overlay(preset, workers)
    return preset, run_sweep(preset.config, workers)


def fmt(value) -> str:
    """Deterministic cell text: shortest round-trip floats, lowercase bools."""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, complex):
        if value.imag == 0:
            return fmt(value.real)
        return f"{fmt(value.real)}{'+' if value.imag >= 0 else '-'}{fmt(abs(value.imag))}j"
    if isinstance(value, float):
        if value == 0:
            return "0.0"
        return repr(value)
    if value is None:
        return ""
    return str(value)


def _flatten(row: dict) -> dict:
    flat = dict(row)
    z = flat.pop("zeta")
    flat["zeta_re"], flat["zeta_im"] = z.real, z.imag
    return flat


def to_csv(rows: list[dict], columns=CSV_COLUMNS) -> str:
    lines = [",".join(columns)]
    for row in rows:
        flat = _flatten(row)
        lines.append(",".join(fmt(flat[c]) for c in columns))
    return "\n".join(lines) + "\n"


def _json_num(x):
    if isinstance(x, float) and not math.isfinite(x):
        return None
    return x


def to_json_lines(rows: list[dict]) -> str:
    out = []
    for row in rows:
        rec = {
            "alpha_re": row["alpha"].real,
            "alpha_im": row["alpha"].imag,
            "zeta_re": row["zeta"].real,
            "zeta_im": row["zeta"].imag,
            "tau": row["tau"],
            "theta": row["theta"],
            "levels": row["levels"],
        }
        if "S_nc" in row:
            for key in ("S_nc", "S_ho", "converged_nc", "converged_ho", "tail_mass_nc", "tail_mass_ho"):
                rec[key] = _json_num(row[key])
        else:
            for key in ("linear_entropy", "purity", "von_neumann", "converged", "tail_mass"):
                rec[key] = _json_num(row[key])
        if row.get("error"):
            rec["error"] = row["error"]
        out.append(json.dumps(rec))
    return "\n".join(out) + "\n"


def render(rows: list[dict], output_format: str, overlay: bool = False) -> str:
    if output_format == "json":
        return to_json_lines(rows)
    return to_csv(rows, OVERLAY_COLUMNS if overlay else CSV_COLUMNS)


def metadata(config: SweepConfig, *, preset: FigurePreset | None = None, rows: list[dict]) -> dict:
    meta = {
        "artifact": "ncsqueeze",
        "version": __version__,
        "config": config.to_dict(),
        "rows": len(rows),
        "unconverged": sum(1 for r in rows if not _row_converged(r)),
        "failed": sum(1 for r in rows if r.get("error")),
    }
    if preset is not None:
        meta["preset"] = {"name": preset.name, "kind": preset.kind, "description": preset.description}
        if preset.compare_family is not None:
            meta["preset"]["compare_family"] = preset.compare_family.value
    return meta


def _row_converged(row: dict) -> bool:
    if "converged" in row:
        return bool(row["converged"])
    return bool(row["converged_nc"] and row["converged_ho"])


def write_output(text: str, path: str | None, meta: dict) -> None:
    """Write ``text`` to ``path`` (stdout when None) plus ``<path>.meta.json``."""
    if path is None:
        sys.stdout.write(text)
        return
    with open(path, "w", newline="") as fh:
        fh.write(text)
    with open(f"{path}.meta.json", "w") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True)
        fh.write("\n")


def exit_status(rows: list[dict]) -> int:
    if any(r.get("error") for r in rows):
        return 4
    if not all(_row_converged(r) for r in rows):
        return 3
    return 0


def with_overrides(config: SweepConfig, **changes) -> SweepConfig:
    return replace(config, **{k: v for k, v in changes.items() if v is not None})
