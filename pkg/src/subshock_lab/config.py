"""Run configuration: a single JSON file validated before any computation.

The schema is strict: unknown keys are rejected at every nesting level so a
typo cannot silently fall back to a default.  The parsed object carries the
original dictionary for echoing into reports.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Mapping, Optional, Tuple

from .errors import ValidationError
from .model import LinearCoupling, ModelSpec, PowerPlusLinearCoupling, QuadraticFlux

FLUX_KINDS = ("quadratic",)
COUPLING_KINDS = ("linear", "power_plus_linear")


@dataclass(frozen=True)
class PdeConfig:
    n_cells: int
    t_final: float
    snapshot_every: float


@dataclass(frozen=True)
class BifurcConfig:
    delta: float


@dataclass(frozen=True)
class RunConfig:
    """Validated run parameters plus the raw dictionary they came from."""

    model: ModelSpec
    u_minus: float
    u_plus: float
    epsilon: Optional[float]
    eps_list: Optional[Tuple[float, ...]]
    L: Optional[float]
    mesh_size: int
    pde: Optional[PdeConfig]
    bifurc: Optional[BifurcConfig]
    output_dir: Optional[str]
    raw: Mapping[str, Any]


def _require_keys(block: Mapping[str, Any], allowed: set, where: str) -> None:
    if not isinstance(block, Mapping):
        raise ValidationError(f"{where} must be a JSON object, got {type(block).__name__}")
    unknown = set(block) - allowed
    if unknown:
        raise ValidationError(f"unknown keys in {where}: {', '.join(sorted(unknown))}")


def _number(block: Mapping[str, Any], key: str, where: str) -> float:
    value = block[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ValidationError(f"{where}.{key} must be a number, got {value!r}")
    return float(value)


def _parse_model(block: Mapping[str, Any]) -> ModelSpec:
    _require_keys(
        block, {"flux_kind", "flux_params", "coupling_kind", "coupling_params"}, "model"
    )
    flux_kind = block.get("flux_kind", "quadratic")
    if flux_kind not in FLUX_KINDS:
        raise ValidationError(f"model.flux_kind must be one of {FLUX_KINDS}, got {flux_kind!r}")
    fp = block.get("flux_params", {})
    _require_keys(fp, {"a", "b"}, "model.flux_params")
    flux = QuadraticFlux(
        a=_number(fp, "a", "model.flux_params") if "a" in fp else 1.0,
        b=_number(fp, "b", "model.flux_params") if "b" in fp else 0.0,
    )

    coupling_kind = block.get("coupling_kind", "linear")
    cp = block.get("coupling_params", {})
    if coupling_kind == "linear":
        _require_keys(cp, {"slope"}, "model.coupling_params")
        coupling = LinearCoupling(
            slope=_number(cp, "slope", "model.coupling_params") if "slope" in cp else 1.0
        )
    elif coupling_kind == "power_plus_linear":
        _require_keys(cp, {"kappa", "m"}, "model.coupling_params")
        if "kappa" not in cp or "m" not in cp:
            raise ValidationError("model.coupling_params needs kappa and m")
        m = cp["m"]
        if isinstance(m, bool) or not isinstance(m, int):
            raise ValidationError(f"model.coupling_params.m must be an integer, got {m!r}")
        coupling = PowerPlusLinearCoupling(
            kappa=_number(cp, "kappa", "model.coupling_params"), m=m
        )
    else:
        raise ValidationError(
            f"model.coupling_kind must be one of {COUPLING_KINDS}, got {coupling_kind!r}"
        )
    return ModelSpec(flux, coupling)


def parse_config(data: Mapping[str, Any]) -> RunConfig:
    """Validate a configuration dictionary into a RunConfig.

    End states must satisfy u_minus > u_plus; a reversed pair is rejected
    here because no admissible front exists for it (the Lax condition
    df(u_plus) < c < df(u_minus) fails).
    """
    _require_keys(
        data,
        {
            "model",
            "end_states",
            "epsilon",
            "eps_list",
            "domain",
            "pde",
            "bifurc",
            "output_dir",
        },
        "config",
    )
    model = _parse_model(data.get("model", {}))

    if "end_states" not in data:
        raise ValidationError("config needs an end_states block")
    es = data["end_states"]
    _require_keys(es, {"u_minus", "u_plus"}, "end_states")
    if "u_minus" not in es or "u_plus" not in es:
        raise ValidationError("end_states needs u_minus and u_plus")
    u_minus = _number(es, "u_minus", "end_states")
    u_plus = _number(es, "u_plus", "end_states")
    if u_minus <= u_plus:
        raise ValidationError(
            f"end states u_minus = {u_minus:g}, u_plus = {u_plus:g} violate the "
            "Lax condition df(u_plus) < c < df(u_minus): a compressive front "
            "needs u_minus > u_plus"
        )

    if "epsilon" in data and "eps_list" in data:
        raise ValidationError("give either epsilon or eps_list, not both")
    epsilon = None
    if "epsilon" in data:
        epsilon = _number(data, "epsilon", "config")
        if epsilon <= 0.0:
            raise ValidationError(f"epsilon must be positive, got {epsilon:g}")
    eps_list = None
    if "eps_list" in data:
        seq = data["eps_list"]
        if not isinstance(seq, list) or not seq:
            raise ValidationError("eps_list must be a non-empty array")
        vals = []
        for k, value in enumerate(seq):
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                raise ValidationError(f"eps_list[{k}] must be a number, got {value!r}")
            vals.append(float(value))
        eps_list = tuple(vals)

    L = None
    mesh_size = 2000
    if "domain" in data:
        dom = data["domain"]
        _require_keys(dom, {"L", "mesh_size"}, "domain")
        if "L" in dom:
            L = _number(dom, "L", "domain")
            if L <= 0.0:
                raise ValidationError(f"domain.L must be positive, got {L:g}")
        if "mesh_size" in dom:
            ms = dom["mesh_size"]
            if isinstance(ms, bool) or not isinstance(ms, int) or ms < 100:
                raise ValidationError(f"domain.mesh_size must be an integer >= 100, got {ms!r}")
            mesh_size = ms

    pde = None
    if "pde" in data:
        pd = data["pde"]
        _require_keys(pd, {"n_cells", "t_final", "snapshot_every"}, "pde")
        for key in ("n_cells", "t_final", "snapshot_every"):
            if key not in pd:
                raise ValidationError(f"pde block needs {key}")
        nc = pd["n_cells"]
        if isinstance(nc, bool) or not isinstance(nc, int):
            raise ValidationError(f"pde.n_cells must be an integer, got {nc!r}")
        t_final = _number(pd, "t_final", "pde")
        snapshot_every = _number(pd, "snapshot_every", "pde")
        if t_final <= 0.0 or snapshot_every <= 0.0:
            raise ValidationError("pde.t_final and pde.snapshot_every must be positive")
        n_snaps = t_final / snapshot_every
        if abs(n_snaps - round(n_snaps)) > 1e-9:
            raise ValidationError(
                f"pde.snapshot_every = {snapshot_every:g} does not divide "
                f"t_final = {t_final:g}"
            )
        pde = PdeConfig(n_cells=nc, t_final=t_final, snapshot_every=snapshot_every)

    bifurc = None
    if "bifurc" in data:
        bf = data["bifurc"]
        _require_keys(bf, {"delta"}, "bifurc")
        if "delta" not in bf:
            raise ValidationError("bifurc block needs delta")
        delta = _number(bf, "delta", "bifurc")
        if abs((u_plus - u_minus) - delta) > 1e-12:
            raise ValidationError(
                f"bifurc.delta = {delta:g} is inconsistent with the end states "
                f"(u_plus - u_minus = {u_plus - u_minus:g})"
            )
        bifurc = BifurcConfig(delta=delta)

    output_dir = None
    if "output_dir" in data:
        od = data["output_dir"]
        if not isinstance(od, str) or not od:
            raise ValidationError(f"output_dir must be a non-empty string, got {od!r}")
        output_dir = od

    return RunConfig(
        model=model,
        u_minus=u_minus,
        u_plus=u_plus,
        epsilon=epsilon,
        eps_list=eps_list,
        L=L,
        mesh_size=mesh_size,
        pde=pde,
        bifurc=bifurc,
        output_dir=output_dir,
        raw=dict(data),
    )


def load_config(path) -> RunConfig:
    """Read and validate a JSON configuration file."""
    p = Path(path)
    if not p.is_file():
        raise ValidationError(f"config file not found: {p}")
    try:
        data = json.loads(p.read_text())
    except json.JSONDecodeError as exc:
        raise ValidationError(f"config is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise ValidationError("config root must be a JSON object")
    return parse_config(data)
