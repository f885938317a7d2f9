"""Instance files, sweep specs and result serialization.

Instances and summaries are JSON; trajectories and sweep tables are CSV
with a leading ``# schema_version=N`` comment line.  Complex numbers are
always written as ``{"re": x, "im": y}`` objects or as paired columns.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Iterable

import numpy as np

from .core import SearchInstance, Tolerances, validate_instance
from .distributions import DistributionSpec, Kind
from .errors import GalError, ParseError, ValidationError
from .statevector import SimConfig

SCHEMA_VERSION = 1

TRAJECTORY_COLUMNS = (
    "t",
    "p_analytic",
    "p_sim",
    "k_bar_analytic_re",
    "k_bar_analytic_im",
    "l_bar_analytic_re",
    "l_bar_analytic_im",
    "k_bar_sim_re",
    "k_bar_sim_im",
    "l_bar_sim_re",
    "l_bar_sim_im",
    "norm_drift",
)

SWEEP_COLUMNS = (
    "noise_sigma",
    "seeds",
    "sigma_l_sq_mean",
    "sigma_l_sq_std",
    "p_max_pred_mean",
    "p_max_pred_std",
    "p_best_sim_mean",
    "p_best_sim_std",
    "p_best_int_mean",
    "t_star_mean",
    "agree",
)


def complex_to_json(z) -> dict[str, float] | None:
    if z is None:
        return None
    z = complex(z)
    return {"re": z.real, "im": z.imag}


def complex_from_json(obj) -> complex:
    if isinstance(obj, dict) and set(obj) == {"re", "im"}:
        return complex(float(obj["re"]), float(obj["im"]))
    if isinstance(obj, (int, float)):
        return complex(obj)
    raise ValidationError(f"expected a {{re, im}} object, got {obj!r}")


@dataclass(frozen=True)
class InstanceFile:
    instance: SearchInstance
    init: DistributionSpec
    sim: SimConfig | None = None
    tolerances: dict[str, float] = field(default_factory=dict)

    def tol(self) -> Tolerances:
        return Tolerances().updated(self.tolerances)

    def to_dict(self) -> dict[str, Any]:
        params = dict(self.init.params)
        if self.init.kind is Kind.EXPLICIT:
            params["amplitudes"] = [complex_to_json(a) for a in params["amplitudes"]]
        out: dict[str, Any] = {
            "schema_version": SCHEMA_VERSION,
            "n": self.instance.n,
            "marked": list(self.instance.marked),
            "init": {"kind": self.init.kind.value, "params": params, "seed": int(self.init.seed)},
        }
        if self.sim is not None:
            out["sim"] = {
                "diffusion_method": self.sim.diffusion_method.value,
                "norm_check_every": self.sim.norm_check_every,
            }
        if self.tolerances:
            out["tolerances"] = dict(self.tolerances)
        return out

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "InstanceFile":
        if not isinstance(data, dict):
            raise ParseError("instance file must hold a JSON object")
        try:
            n = int(_field(data, "n"))
        except (TypeError, ValueError) as exc:
            raise ParseError(f"field 'n': {exc}") from None
        if "marked" in data:
            marked = data["marked"]
            if not isinstance(marked, list):
                raise ParseError("field 'marked': expected a list of indices")
        elif "r" in data:
            r = int(data["r"])
            marked = list(range(n - r, n))
        else:
            raise ParseError("one of 'marked' or 'r' is required")
        instance = _with_field("marked", validate_instance, n, marked)

        init = _field(data, "init")
        if not isinstance(init, dict):
            raise ParseError("field 'init': expected an object")
        params = dict(init.get("params") or {})
        if "amplitudes" in params:
            params["amplitudes"] = np.array(
                [_with_field("init.params.amplitudes", complex_from_json, a) for a in params["amplitudes"]]
            )
        spec = _with_field("init", DistributionSpec, init.get("kind", ""), params, int(init.get("seed", 0)))

        sim = None
        if data.get("sim") is not None:
            sim = _with_field("sim", lambda d: SimConfig(**d), data["sim"])
        tolerances = dict(data.get("tolerances") or {})
        _with_field("tolerances", Tolerances().updated, tolerances)
        return cls(instance, spec, sim, tolerances)

    def __eq__(self, other):
        if not isinstance(other, InstanceFile):
            return NotImplemented
        return json.dumps(self.to_dict(), sort_keys=True) == json.dumps(other.to_dict(), sort_keys=True)


@dataclass(frozen=True)
class SweepSpec:
    n: int
    r: int
    noise_levels: tuple[float, ...]
    seeds_per_level: int = 50
    base_seed: int = 0

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "SweepSpec":
        try:
            levels = tuple(float(x) for x in _field(data, "noise_levels"))
            spec = cls(int(_field(data, "n")), int(_field(data, "r")), levels,
                       int(data.get("seeds_per_level", 50)), int(data.get("base_seed", 0)))
        except (TypeError, ValueError) as exc:
            raise ParseError(f"sweep spec: {exc}") from None
        if any(x < 0 for x in spec.noise_levels) or spec.seeds_per_level < 1:
            raise ValidationError("noise levels must be >= 0 and seeds_per_level >= 1")
        return spec


def _field(data: dict, name: str):
    if name not in data:
        raise ParseError(f"missing required field '{name}'")
    return data[name]


def _with_field(name: str, fn, *args):
    try:
        return fn(*args)
    except GalError as exc:
        raise type(exc)(f"field '{name}': {exc}") from None
    except (TypeError, ValueError) as exc:
        raise ParseError(f"field '{name}': {exc}") from None


def parse_json_text(text: str, source: str = "<input>") -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{source}:{exc.lineno}:{exc.colno}: {exc.msg}") from None


def load_instance(path: str | Path) -> InstanceFile:
    path = Path(path)
    return InstanceFile.from_dict(parse_json_text(path.read_text(encoding="utf-8"), str(path)))


def load_sweep(path: str | Path) -> SweepSpec:
    path = Path(path)
    return SweepSpec.from_dict(parse_json_text(path.read_text(encoding="utf-8"), str(path)))


def format_float(x: float) -> str:
    if x is None or (isinstance(x, float) and math.isnan(x)):
        return "nan"
    return f"{float(x):.15e}"


def format_cell(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "1" if x else "0"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return format_float(x)


def write_csv(columns: Iterable[str], rows: Iterable[Iterable[Any]]) -> str:
    lines = [f"# schema_version={SCHEMA_VERSION}", ",".join(columns)]
    lines.extend(",".join(format_cell(v) for v in row) for row in rows)
    return "\n".join(lines) + "\n"


def _finite(obj: Any) -> Any:
    if isinstance(obj, float):
        return obj if math.isfinite(obj) else None
    if isinstance(obj, dict):
        return {k: _finite(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_finite(v) for v in obj]
    return obj


def dump_json(obj: Any) -> str:
    """Strict JSON: non-finite floats become ``null``."""
    return json.dumps(_finite(obj), indent=2, allow_nan=False) + "\n"
