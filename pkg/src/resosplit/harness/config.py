"""Experiment configuration: TOML files and their validated in-memory form.

Grammar (all keys optional unless marked)::

    equation = "cubic"          # required: "linear" or "cubic"
    sigma = 1                   # cubic only, +1 or -1
    K = 4                       # required: even, >= 4
    n_steps = 100               # required
    seed = 0

    [step]                      # required: either p/q/power or tau
    p = 1
    q = 2
    power = 1                   # 1 or 2
    # tau = 0.7                 # a float step (classified non-resonant)

    [initial]                   # required; a function spec
    kind = "fourier"
    coeffs = { "0" = 1.0, "-2" = 0.5 }     # complex values as [re, im]

    [potential]                 # linear only; a function spec (must be real)
    kind = "cosine"
    mode = 2

    [outputs]                   # file names, placed under --out-dir
    csv = "trajectory.csv"
    json = "summary.json"
    report = "report.json"      # verify
    sweep = "sweep.csv"         # sweep
    bounds = "bounds.json"      # bounds

    [tolerances]                # overrides of DEFAULT_TOLERANCES
    l2_conservation = 1e-11

    [sweep]                     # `sweep` subcommand only: lists of values
    q = [4, 8, 16]
    kappa = [2]                 # K = kappa*q for each run (else use K)

Function specs (``kind``): ``fourier`` (``coeffs``), ``constant``
(``value``), ``cosine`` / ``sine`` / ``plane_wave`` (``mode``,
``amplitude``), ``resonant_pair`` (``base + amplitude*exp(i*multiple*q*x)``
with q taken from the step; ``multiple`` defaults to -1), ``values``
(``re`` and optional ``im`` lists of length K) and ``random`` (seeded complex
Gaussian, optionally projected on W_q with ``project = true``). Any spec may
set ``allow_alias = true``.
"""

from __future__ import annotations

import copy
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping

import numpy as np

from ..models import Cubic, Linear, ModelSpec, ResonantStep, Step
from ..resonance import project_W
from ..spectral import (
    FourierSeries,
    Grid,
    PhysicalState,
    constant,
    cosine,
    make_grid,
    plane_wave,
    sample_function,
    sine,
)

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib


DEFAULT_TOLERANCES = {
    "l2_conservation": 1e-11,
    "closed_form": 1e-10,
    "drift_bound": 1e-9,
    "energy_bound": 1e-9,
    "energy_fit_residual": 0.05,
    "commutator": 1e-12,
    "commutator_positive": 1e-2,
    "free_flow_identity": 1e-13,
    "dft_roundtrip": 1e-12,
    "parseval": 1e-12,
    "norm_equivalence": 1e-12,
    "cfl_drift_factor": 5.0,
    "control_growth": 1.5,
    "gn_stability": 0.10,
}


class ConfigError(ValueError):
    """Invalid experiment configuration; the message names the offending field."""


@dataclass
class ExperimentConfig:
    equation: str
    K: int
    n_steps: int
    step: dict
    initial: dict
    potential: dict | None = None
    sigma: int = 1
    seed: int = 0
    outputs: dict = field(default_factory=dict)
    tolerances: dict = field(default_factory=dict)
    sweep: dict | None = None

    def __post_init__(self):
        self.validate()

    # -- validation -------------------------------------------------------

    def validate(self) -> None:
        if self.equation not in ("linear", "cubic"):
            raise ConfigError(f"equation: expected 'linear' or 'cubic', got {self.equation!r}")
        if self.equation == "cubic" and self.sigma not in (1, -1):
            raise ConfigError(f"sigma: expected +1 or -1, got {self.sigma!r}")
        if self.equation == "linear" and self.potential is None:
            raise ConfigError("potential: required for equation = 'linear'")
        if not isinstance(self.K, int) or self.K < 4 or self.K % 2:
            raise ConfigError(f"K: expected an even integer >= 4, got {self.K!r}")
        if not isinstance(self.n_steps, int) or self.n_steps < 0:
            raise ConfigError(f"n_steps: expected a non-negative integer, got {self.n_steps!r}")
        if not isinstance(self.step, Mapping):
            raise ConfigError("step: expected a table with p/q/power or tau")
        if "tau" in self.step:
            extra = set(self.step) - {"tau"}
            if extra:
                raise ConfigError(f"step: 'tau' cannot be combined with {sorted(extra)}")
            if not float(self.step["tau"]) > 0:
                raise ConfigError(f"step.tau: expected a positive number, got {self.step['tau']!r}")
        else:
            for key in ("p", "q"):
                if not isinstance(self.step.get(key), int) or self.step[key] <= 0:
                    raise ConfigError(f"step.{key}: expected a positive integer, got {self.step.get(key)!r}")
            if self.step.get("power", 1) not in (1, 2):
                raise ConfigError(f"step.power: expected 1 or 2, got {self.step.get('power')!r}")
        unknown = set(self.tolerances) - set(DEFAULT_TOLERANCES)
        if unknown:
            raise ConfigError(f"tolerances: unknown names {sorted(unknown)}")
        for name, spec in (("initial", self.initial), ("potential", self.potential)):
            if spec is not None:
                _check_spec(name, spec)
        self.resonant_step_or_error()

    def resonant_step_or_error(self) -> None:
        """Reject resonant-looking configs whose grid breaks ``K = kappa*q``.

        A rational step only needs the divisibility contract when the data
        asks for the resonant subspace (``resonant_pair`` or projected
        ``random`` specs); otherwise it simply runs as a non-resonant step.
        """
        step = self.time_step()
        needs_w = any(
            spec is not None
            and (spec.get("kind") == "resonant_pair" or (spec.get("kind") == "random" and spec.get("project")))
            for spec in (self.initial, self.potential)
        )
        if not needs_w:
            return
        if not isinstance(step, ResonantStep):
            raise ConfigError("step: resonant_pair / projected specs need a rational step p/q")
        if self.K % step.q or (self.K // step.q) % 2:
            raise ConfigError(
                f"K: {self.K} is not kappa*q with kappa even for q={step.q} "
                "(required by the resonant initial/potential spec)"
            )

    # -- derived objects --------------------------------------------------

    @property
    def tolerance(self) -> dict:
        return {**DEFAULT_TOLERANCES, **self.tolerances}

    def grid(self) -> Grid:
        return make_grid(self.K)

    def time_step(self) -> Step:
        if "tau" in self.step:
            return float(self.step["tau"])
        return ResonantStep(self.step["p"], self.step["q"], self.step.get("power", 1))

    def initial_state(self) -> PhysicalState:
        return build_state(self.initial, self.grid(), self.time_step(), self.seed)

    def model(self) -> ModelSpec:
        if self.equation == "cubic":
            return Cubic(self.sigma)
        V = build_state(self.potential, self.grid(), self.time_step(), self.seed + 1)
        try:
            return Linear(V)
        except ValueError as exc:
            raise ConfigError(f"potential: {exc}") from None

    # -- (de)serialisation -----------------------------------------------

    def to_dict(self) -> dict:
        d = {
            "equation": self.equation,
            "K": self.K,
            "n_steps": self.n_steps,
            "seed": self.seed,
            "step": dict(self.step),
            "initial": copy.deepcopy(self.initial),
            "outputs": dict(self.outputs),
            "tolerances": dict(self.tolerances),
        }
        if self.equation == "cubic":
            d["sigma"] = self.sigma
        if self.potential is not None:
            d["potential"] = copy.deepcopy(self.potential)
        if self.sweep is not None:
            d["sweep"] = copy.deepcopy(self.sweep)
        return d

    def replace(self, **changes) -> "ExperimentConfig":
        d = self.to_dict()
        d.update(changes)
        return config_from_dict(d)


_FIELDS = {
    "equation", "K", "n_steps", "step", "initial", "potential",
    "sigma", "seed", "outputs", "tolerances", "sweep",
}


def config_from_dict(data: Mapping[str, Any]) -> ExperimentConfig:
    unknown = set(data) - _FIELDS
    if unknown:
        raise ConfigError(f"unknown top-level keys {sorted(unknown)}")
    for key in ("equation", "K", "n_steps", "step", "initial"):
        if key not in data:
            raise ConfigError(f"{key}: missing required key")
    kwargs = {k: copy.deepcopy(v) for k, v in data.items()}
    return ExperimentConfig(**kwargs)


def load_config(path: str | Path) -> ExperimentConfig:
    with open(path, "rb") as fh:
        try:
            data = tomllib.load(fh)
        except tomllib.TOMLDecodeError as exc:
            raise ConfigError(f"{path}: {exc}") from None
    return config_from_dict(data)


# --- function specs ---------------------------------------------------------

_SPEC_KINDS = {"fourier", "constant", "cosine", "sine", "plane_wave", "resonant_pair", "values", "random"}


def _check_spec(name: str, spec: Mapping) -> None:
    if not isinstance(spec, Mapping):
        raise ConfigError(f"{name}: expected a table")
    kind = spec.get("kind")
    if kind not in _SPEC_KINDS:
        raise ConfigError(f"{name}.kind: expected one of {sorted(_SPEC_KINDS)}, got {kind!r}")
    if kind == "fourier" and not isinstance(spec.get("coeffs"), Mapping):
        raise ConfigError(f"{name}.coeffs: expected a table mapping modes to coefficients")
    if kind in ("cosine", "sine", "plane_wave") and not isinstance(spec.get("mode"), int):
        raise ConfigError(f"{name}.mode: expected an integer")
    if kind == "values" and not isinstance(spec.get("re"), list):
        raise ConfigError(f"{name}.re: expected a list of numbers")


def _complex(v) -> complex:
    if isinstance(v, (list, tuple)):
        if len(v) != 2:
            raise ConfigError(f"complex coefficient must be [re, im], got {v!r}")
        return complex(float(v[0]), float(v[1]))
    return complex(v)


def function_series(spec: Mapping, step: Step) -> FourierSeries | None:
    """The Fourier series a spec describes, or None for ``values``/``random``."""
    kind = spec["kind"]
    amp = _complex(spec.get("amplitude", 1.0))
    if kind == "fourier":
        try:
            return FourierSeries({int(m): _complex(c) for m, c in spec["coeffs"].items()})
        except ValueError as exc:
            raise ConfigError(f"coeffs: {exc}") from None
    if kind == "constant":
        return constant(_complex(spec.get("value", 1.0)))
    if kind == "cosine":
        return cosine(spec["mode"], amp.real)
    if kind == "sine":
        return sine(spec["mode"], amp.real)
    if kind == "plane_wave":
        return plane_wave(spec["mode"], amp)
    if kind == "resonant_pair":
        q = step.q if isinstance(step, ResonantStep) else 1
        m = int(spec.get("multiple", -1)) * q
        base = _complex(spec.get("base", 1.0))
        return FourierSeries({0: base}) + FourierSeries({m: _complex(spec.get("amplitude", 0.125))})
    return None


def build_state(spec: Mapping, grid: Grid, step: Step, seed: int) -> PhysicalState:
    series = function_series(spec, step)
    if series is not None:
        try:
            return sample_function(series, grid, allow_alias=bool(spec.get("allow_alias", False)))
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
    if spec["kind"] == "values":
        re = np.asarray(spec["re"], dtype=float)
        im = np.asarray(spec.get("im", np.zeros_like(re)), dtype=float)
        if re.shape != (grid.K,) or im.shape != (grid.K,):
            raise ConfigError(f"values: expected {grid.K} entries")
        return PhysicalState(grid, re + 1j * im)
    rng = np.random.default_rng(seed)
    scale = float(spec.get("scale", 1.0))
    v = scale * (rng.standard_normal(grid.K) + 1j * rng.standard_normal(grid.K))
    if spec.get("real", False):
        v = v.real
    U = PhysicalState(grid, v)
    if spec.get("project", False):
        if not isinstance(step, ResonantStep):
            raise ConfigError("random.project: needs a rational step")
        U = project_W(U, step.q)
    return U
