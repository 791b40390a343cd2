"""Single-document JSON run configuration with strict validation.

Unknown keys are rejected everywhere: a config either round-trips exactly or
fails loudly before any compute starts.  The schema is documented in the
README; reproducibility beats convenience here.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .grids import Grid1D
from .profile import ModelParams

_MODEL_KEYS = {"p", "lam", "epsilon", "delta", "horizon_fraction", "horizon", "profile"}
_GRID_KEYS = {"half_width", "n_points"}
_SOLVER_KEYS = {
    "dt_initial",
    "dt_floor",
    "amp_blowup_factor",
    "tau_scale",
    "t_end",
    "record_times",
}
_SWEEP_KEYS = {"eps_ladder"}
_RESIDUAL_KEYS = {"eps_ladder", "nodes_per_region"}
_TOP_KEYS = {"schema_version", "model", "grid", "solver", "sweep", "residual", "seed"}


def _reject_unknown(section: dict, allowed: set, where: str) -> None:
    unknown = sorted(set(section) - allowed)
    if unknown:
        raise ValueError(f"unknown {where} keys: {unknown}; allowed: {sorted(allowed)}")


def _as_complex(value) -> complex:
    if isinstance(value, (int, float)):
        return complex(value)
    if isinstance(value, (list, tuple)) and len(value) == 2:
        return complex(float(value[0]), float(value[1]))
    raise ValueError(f"lam must be a number or [re, im], got {value!r}")


@dataclass(frozen=True)
class RunConfig:
    model: ModelParams
    grid: Grid1D | None = None
    solver: dict = field(default_factory=dict)
    sweep_ladder: tuple = (0.5, 0.4, 0.3, 0.25, 0.2)
    residual_ladder: tuple = (0.4, 0.3, 0.25, 0.2)
    residual_nodes: int = 200
    seed: int = 0


def parse_config(doc: dict) -> RunConfig:
    """Validate a parsed JSON document and build the run configuration."""
    if not isinstance(doc, dict):
        raise ValueError("config root must be a JSON object")
    _reject_unknown(doc, _TOP_KEYS, "top-level")
    version = doc.get("schema_version", 1)
    if version != 1:
        raise ValueError(f"unsupported schema_version {version}")

    model_doc = dict(doc.get("model", {}))
    _reject_unknown(model_doc, _MODEL_KEYS, "model")
    if "lam" in model_doc:
        model_doc["lam"] = _as_complex(model_doc["lam"])
    model = ModelParams(
        p=float(model_doc.get("p", 2.0)),
        lam=model_doc.get("lam", 1.0j),
        epsilon=float(model_doc.get("epsilon", 0.3)),
        delta=model_doc.get("delta"),
        horizon_fraction=float(model_doc.get("horizon_fraction", 0.9)),
        horizon=model_doc.get("horizon"),
        profile=model_doc.get("profile", "gaussian"),
    )

    grid = None
    if "grid" in doc:
        grid_doc = dict(doc["grid"])
        _reject_unknown(grid_doc, _GRID_KEYS, "grid")
        grid = Grid1D(
            half_width=float(grid_doc.get("half_width", 32.0)),
            n_points=int(grid_doc.get("n_points", 2048)),
        )

    solver_doc = dict(doc.get("solver", {}))
    _reject_unknown(solver_doc, _SOLVER_KEYS, "solver")
    if "record_times" in solver_doc:
        solver_doc["record_times"] = tuple(float(t) for t in solver_doc["record_times"])

    sweep_doc = dict(doc.get("sweep", {}))
    _reject_unknown(sweep_doc, _SWEEP_KEYS, "sweep")
    sweep_ladder = tuple(float(e) for e in sweep_doc.get("eps_ladder", (0.5, 0.4, 0.3, 0.25, 0.2)))

    residual_doc = dict(doc.get("residual", {}))
    _reject_unknown(residual_doc, _RESIDUAL_KEYS, "residual")
    residual_ladder = tuple(float(e) for e in residual_doc.get("eps_ladder", (0.4, 0.3, 0.25, 0.2)))
    residual_nodes = int(residual_doc.get("nodes_per_region", 200))

    return RunConfig(
        model=model,
        grid=grid,
        solver=solver_doc,
        sweep_ladder=sweep_ladder,
        residual_ladder=residual_ladder,
        residual_nodes=residual_nodes,
        seed=int(doc.get("seed", 0)),
    )


def load_config(path: str) -> RunConfig:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_config(json.load(fh))
