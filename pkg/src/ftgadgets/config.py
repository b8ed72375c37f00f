"""Run configuration files and environment overrides.

Precedence, highest first: command-line flag, ``FTGADGET_*`` environment
variable, config file value, built-in default.
"""

from __future__ import annotations

import json
import os
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path
from typing import Any, Mapping

from .codes import code_to_dict, load_code
from .faults import FaultKind, FaultModel
from .gadgets import Architecture, GadgetConfig, GadgetKind, TCorrection

RUN_SCHEMA = "ftgadgets.run/1"
ENV_PREFIX = "FTGADGET_"
BACKENDS = ("auto", "statevector", "tableau")


class ConfigError(ValueError):
    pass


@dataclass
class GadgetSpec:
    kind: str = "S"
    architecture: str = "fig1"
    data_code: str = "builtin:steane"
    ancilla_code: str | None = None
    reduced_support: bool = False
    interleave_ec: bool = False
    t_correction_mode: str = TCorrection.CHAIN.value


@dataclass
class ModelSpec:
    kind: str = FaultKind.DEPOLARIZING.value
    includes_measurement_flips: bool = True


@dataclass
class CriterionSpec:
    max_residual_weight: int | None = None
    require_logical_exact: bool = True


@dataclass
class RunConfig:
    gadget: GadgetSpec = field(default_factory=GadgetSpec)
    model: ModelSpec = field(default_factory=ModelSpec)
    criterion: CriterionSpec = field(default_factory=CriterionSpec)
    backend: str = "auto"
    seed: int = 2024
    n_random: int = 8
    workers: int = 0  # 0: one per available CPU
    max_counterexamples: int = 10
    out: str | None = None  # JSON report path; a .txt sibling holds the text report
    base_dir: str | None = field(default=None, repr=False, compare=False)

    def to_dict(self) -> dict:
        d = asdict(self)
        d.pop("base_dir")
        d.pop("workers")  # worker count never changes results
        d["schema"] = RUN_SCHEMA
        return d

    def echo(self) -> dict:
        """Report echo: everything that determines the results (no output path)."""
        d = self.to_dict()
        d.pop("out")
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2) + "\n"

    @classmethod
    def from_dict(cls, doc: Mapping[str, Any], base_dir: str | None = None) -> RunConfig:
        doc = dict(doc)
        schema = doc.pop("schema", RUN_SCHEMA)
        if schema != RUN_SCHEMA:
            raise ConfigError(f"unsupported run schema {schema!r}")
        try:
            cfg = cls(
                gadget=GadgetSpec(**doc.pop("gadget", {})),
                model=ModelSpec(**doc.pop("model", {})),
                criterion=CriterionSpec(**doc.pop("criterion", {})),
                base_dir=base_dir,
                **doc,
            )
        except TypeError as exc:
            raise ConfigError(f"bad run config: {exc}") from exc
        cfg.check()
        return cfg

    def check(self) -> None:
        if self.backend not in BACKENDS:
            raise ConfigError(f"backend must be one of {BACKENDS}, got {self.backend!r}")
        try:
            GadgetKind(self.gadget.kind)
            Architecture(self.gadget.architecture)
            TCorrection(self.gadget.t_correction_mode)
            FaultKind(self.model.kind)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        if not 0 <= int(self.seed) < 2**64:
            raise ConfigError("seed must be a 64-bit unsigned integer")

    def gadget_config(self) -> GadgetConfig:
        g = self.gadget
        base = Path(self.base_dir) if self.base_dir else None
        data = load_code(g.data_code, base)
        anc = load_code(g.ancilla_code, base) if g.ancilla_code else None
        return GadgetConfig(
            kind=g.kind, architecture=g.architecture, data_code=data, ancilla_outer=anc,
            reduced_support=g.reduced_support, interleave_ec=g.interleave_ec,
            t_correction_mode=g.t_correction_mode,
        )

    def fault_model(self) -> FaultModel:
        return FaultModel(FaultKind(self.model.kind), self.model.includes_measurement_flips)

    def ft_criterion(self):
        from .verifier import FtCriterion

        return FtCriterion(self.criterion.max_residual_weight, self.criterion.require_logical_exact)


def load_run_config(path: str | Path) -> RunConfig:
    p = Path(path)
    try:
        doc = json.loads(p.read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{p}: not valid JSON ({exc})") from exc
    return RunConfig.from_dict(doc, base_dir=str(p.parent))


_ENV_FIELDS = {
    "BACKEND": ("backend", str),
    "WORKERS": ("workers", int),
    "SEED": ("seed", int),
    "MAX_COUNTEREXAMPLES": ("max_counterexamples", int),
    "OUT": ("out", str),
    "N_RANDOM": ("n_random", int),
}


def apply_overrides(cfg: RunConfig, flags: Mapping[str, Any], environ: Mapping[str, str] | None = None) -> RunConfig:
    """Layer environment variables, then non-None flags, over ``cfg``."""
    environ = os.environ if environ is None else environ
    updates: dict[str, Any] = {}
    for suffix, (name, conv) in _ENV_FIELDS.items():
        raw = environ.get(ENV_PREFIX + suffix)
        if raw is not None and raw != "":
            try:
                updates[name] = conv(raw)
            except ValueError as exc:
                raise ConfigError(f"{ENV_PREFIX}{suffix}={raw!r}: {exc}") from exc
    for name, value in flags.items():
        if value is not None:
            updates[name] = value
    out = replace(cfg, **updates)
    out.check()
    return out


def gadget_config_to_dict(cfg: GadgetConfig) -> dict:
    """Self-contained echo of a GadgetConfig (codes embedded)."""
    return {
        "kind": cfg.kind.value,
        "architecture": cfg.architecture.value,
        "data_code": code_to_dict(cfg.data_code),
        "ancilla_code": None if cfg.ancilla_outer is None else code_to_dict(cfg.ancilla_outer),
        "reduced_support": cfg.reduced_support,
        "interleave_ec": cfg.interleave_ec,
        "t_correction_mode": cfg.t_correction_mode.value,
    }


def effective_workers(requested: int) -> int:
    if requested and requested > 0:
        return requested
    return max(1, len(os.sched_getaffinity(0)) if hasattr(os, "sched_getaffinity") else (os.cpu_count() or 1))
