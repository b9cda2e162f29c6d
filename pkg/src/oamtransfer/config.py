"""Scenario configuration schema.

A scenario is one YAML (or JSON) mapping. Unknown keys are rejected at every
level. Precedence, lowest first: built-in defaults, the ``OAMTRANSFER_SEED``
environment variable (seed only), the config file, command-line flags.
"""

from __future__ import annotations

from pathlib import Path
from typing import Literal

import yaml
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from .hom import HALF_WIDTH_MM, SCAN_POINTS, SCAN_RANGE_MM, DelayModel
from .qubits import POLE_ALIASES, POLE_VECTORS, InputQubit
from .seeding import default_seed
from .teleport import NoiseConfig
from .tomography import MAX_ITER

Experiment = Literal["hom-scan", "source-verify", "bsm-verify", "teleport", "tomo", "calibrate"]

DEFAULT_BASIS_PAIRS = (
    ("D", "D"), ("D", "A"), ("A", "D"), ("A", "A"),
    ("R", "R"), ("R", "L"), ("L", "R"), ("L", "L"),
)


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid")


def _check_pole(name: str) -> str:
    if POLE_ALIASES.get(name, name) not in POLE_VECTORS:
        raise ValueError(f"unknown state {name!r}; use one of 0, 1, D, A, R, L, plus, minus")
    return name


class NoiseSettings(_Strict):
    depolarizing_p: float = Field(0.0, ge=0.0, le=1.0)
    source_delay_mm: float = 0.0
    feedforward_flip_prob: float = Field(0.0, ge=0.0, le=1.0)

    def build(self) -> NoiseConfig:
        return NoiseConfig(self.depolarizing_p, self.source_delay_mm, self.feedforward_flip_prob)


class DelaySettings(_Strict):
    half_width_mm: float | None = Field(None, gt=0)
    sigma_mm: float | None = Field(None, gt=0)

    @model_validator(mode="after")
    def _one_scale(self):
        if self.half_width_mm is not None and self.sigma_mm is not None:
            raise ValueError("give either half_width_mm or sigma_mm, not both")
        return self

    def build(self) -> DelayModel:
        if self.sigma_mm is not None:
            return DelayModel(self.sigma_mm)
        return DelayModel.from_half_width(self.half_width_mm or HALF_WIDTH_MM)


class InputSpec(_Strict):
    """Either a named pole or explicit ``alpha``/``beta`` as ``[re, im]``."""

    pole: str | None = None
    alpha: tuple[float, float] | None = None
    beta: tuple[float, float] | None = None

    @field_validator("pole")
    @classmethod
    def _pole(cls, v):
        return None if v is None else _check_pole(v)

    @model_validator(mode="after")
    def _exclusive(self):
        explicit = self.alpha is not None or self.beta is not None
        if self.pole is not None and explicit:
            raise ValueError("give either pole or alpha/beta, not both")
        if self.pole is None and not (self.alpha is not None and self.beta is not None):
            raise ValueError("explicit input needs both alpha and beta")
        if explicit:
            norm2 = sum(x * x for x in self.alpha) + sum(x * x for x in self.beta)
            if abs(norm2 - 1) > 1e-9:
                raise ValueError(f"|alpha|^2 + |beta|^2 = {norm2}, expected 1")
        return self

    def build(self) -> InputQubit:
        if self.pole is not None:
            return InputQubit.pole(self.pole)
        return InputQubit(complex(*self.alpha), complex(*self.beta), "custom")


class HomScanSettings(_Strict):
    bases: list[tuple[str, str]] = Field(default_factory=lambda: list(DEFAULT_BASIS_PAIRS))
    start_mm: float = SCAN_RANGE_MM[0]
    stop_mm: float = SCAN_RANGE_MM[1]
    points: int = Field(SCAN_POINTS, ge=2)

    @field_validator("bases")
    @classmethod
    def _bases(cls, v):
        for a, b in v:
            _check_pole(a)
            _check_pole(b)
        return v


class TomoSettings(_Strict):
    shots_per_basis: int = Field(10_000, ge=1)
    poisson: bool = True
    bootstrap: int = Field(200, ge=0)
    teleport_shots: int | None = Field(None, ge=1)
    max_iter: int = Field(MAX_ITER, ge=1)
    strict: bool = True


class CalibrateSettings(_Strict):
    target_source_fidelity: float | None = 0.9255
    target_avg_fidelity: float | None = 0.918


class OutputSettings(_Strict):
    json_path: str | None = None
    csv_path: str | None = None


class ScenarioConfig(_Strict):
    experiment: Experiment
    seed: int = Field(default_factory=default_seed, ge=0)
    shots: int | None = Field(None, ge=1)
    ell0: int = Field(1, ge=1)
    mode: Literal["apply", "verify"] = "apply"
    input: InputSpec | None = None
    ports: dict[str, Literal["A", "B", "C", "D"]] | None = None
    noise: NoiseSettings = Field(default_factory=NoiseSettings)
    delay: DelaySettings = Field(default_factory=DelaySettings)
    hom_scan: HomScanSettings = Field(default_factory=HomScanSettings)
    tomo: TomoSettings = Field(default_factory=TomoSettings)
    calibrate: CalibrateSettings = Field(default_factory=CalibrateSettings)
    output: OutputSettings = Field(default_factory=OutputSettings)

    @field_validator("ports")
    @classmethod
    def _ports(cls, v):
        if v is None:
            return v
        from .bsm import BellState

        parsed = {BellState.parse(k).value: p for k, p in v.items()}
        if len(parsed) != 4 or len(set(parsed.values())) != 4:
            raise ValueError("ports must map the four Bell states one-to-one onto A-D")
        return parsed


def load_file(path: str | Path) -> dict:
    text = Path(path).read_text()
    data = yaml.safe_load(text) or {}
    if not isinstance(data, dict):
        raise ValueError(f"{path}: top level must be a mapping")
    return data


def merge(base: dict, override: dict) -> dict:
    """Recursive dict merge; ``override`` wins, ``None`` values are ignored."""
    out = dict(base)
    for key, val in override.items():
        if val is None:
            continue
        if isinstance(val, dict):
            base_val = out.get(key)
            out[key] = merge(base_val if isinstance(base_val, dict) else {}, val)
        else:
            out[key] = val
    return out
