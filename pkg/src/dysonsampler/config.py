"""Flat ``key = value`` experiment files.

Blank lines and ``#`` comments are ignored. Unknown keys are errors.
Numbers may be written as fractions (``dt = 1/5000``). Lists are
comma-separated; ``snapshot_times`` additionally accepts ``start:stop:count``
for evenly spaced times.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np

from .coulomb import CoulombMethod
from .dbm import CoulombScaling, SchemeParams, SimulationConfig
from .initcond import InitSpec
from .potential import QuarticPotential


class ConfigError(ValueError):
    pass


def _num(text: str) -> float:
    try:
        return float(Fraction(text.strip()))
    except (ValueError, ZeroDivisionError) as exc:
        raise ConfigError(f"not a number: {text!r}") from exc


def _int(text: str) -> int:
    v = _num(text)
    if v != int(v):
        raise ConfigError(f"not an integer: {text!r}")
    return int(v)


def _list(text: str) -> tuple:
    return tuple(_num(t) for t in text.split(",") if t.strip())


def _times(text: str) -> tuple:
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ConfigError("range syntax is start:stop:count")
        a, b, k = _num(parts[0]), _num(parts[1]), _int(parts[2])
        return tuple(float(t) for t in np.linspace(a, b, k))
    return _list(text)


def _choice(*options):
    def parse(text):
        t = text.strip()
        if t not in options:
            raise ConfigError(f"expected one of {options}, got {t!r}")
        return t
    return parse


KEYS = {
    "potential.q": _num,
    "potential.g": _num,
    "n": _int,
    "beta": _num,
    "dt": _num,
    "t_end": _num,
    "trials": _int,
    "init": _choice("gaussian_spectrum", "iid", "explicit"),
    "init.width": _num,
    "init.values": _list,
    "coulomb": _choice("naive", "treecode"),
    "coulomb.theta": _num,
    "coulomb.order": _int,
    "coulomb.leaf_size": _int,
    "coulomb.scaling": _choice("sde_consistent", "paper_literal"),
    "snapshot_times": _times,
    "seed": _int,
    "output_dir": str.strip,
    "reference": _choice("auto", "finite", "limiting"),
    "gap.thetas": _list,
    "gap.quad_order": _int,
    "table.points": _int,
}

DEFAULTS = {
    "potential.q": 1.0,
    "potential.g": 0.0,
    "beta": 2.0,
    "trials": 1,
    "init": "gaussian_spectrum",
    "init.width": 1.0,
    "init.values": (),
    "coulomb": "naive",
    "coulomb.theta": 0.5,
    "coulomb.order": 30,
    "coulomb.leaf_size": 16,
    "coulomb.scaling": "sde_consistent",
    "snapshot_times": (),
    "seed": 0,
    "output_dir": ".",
    "reference": "auto",
    "gap.thetas": (),
    "gap.quad_order": 64,
    "table.points": 401,
}

# largest N for which the finite-N kernel is used as the reference law
EXACT_KERNEL_MAX_N = 30


def parse_text(text: str) -> dict:
    values = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value'")
        key, val = (s.strip() for s in line.split("=", 1))
        if key not in KEYS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if key in values:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        try:
            values[key] = KEYS[key](val)
        except ConfigError as exc:
            raise ConfigError(f"line {lineno} ({key}): {exc}") from None
    return values


@dataclass
class ExperimentFile:
    values: dict = field(default_factory=dict)

    @classmethod
    def load(cls, path) -> "ExperimentFile":
        return cls(parse_text(Path(path).read_text()))

    @classmethod
    def from_text(cls, text: str) -> "ExperimentFile":
        return cls(parse_text(text))

    def get(self, key):
        if key in self.values:
            return self.values[key]
        if key in DEFAULTS:
            return DEFAULTS[key]
        raise ConfigError(f"missing required key {key!r}")

    def resolved(self) -> dict:
        """Every knob with defaults filled in (required keys only if present)."""
        out = dict(DEFAULTS)
        out.update(self.values)
        return {k: list(v) if isinstance(v, tuple) else v for k, v in sorted(out.items())}

    def potential(self) -> QuarticPotential:
        try:
            return QuarticPotential(self.get("potential.q"), self.get("potential.g"))
        except ValueError as exc:
            raise ConfigError(str(exc)) from None

    def coulomb_method(self) -> CoulombMethod:
        try:
            return CoulombMethod(self.get("coulomb"), self.get("coulomb.theta"),
                                 self.get("coulomb.order"), self.get("coulomb.leaf_size"))
        except ValueError as exc:
            raise ConfigError(str(exc)) from None

    def init_spec(self) -> InitSpec:
        try:
            return InitSpec(self.get("init"), self.get("init.width"), tuple(self.get("init.values")))
        except ValueError as exc:
            raise ConfigError(str(exc)) from None

    def simulation(self) -> SimulationConfig:
        try:
            scheme = SchemeParams(dt=self.get("dt"), beta=self.get("beta"),
                                  coulomb_scaling=CoulombScaling(self.get("coulomb.scaling")),
                                  method=self.coulomb_method())
            return SimulationConfig(
                n=self.get("n"), potential=self.potential(), scheme=scheme, t_end=self.get("t_end"),
                trials=self.get("trials"), init=self.init_spec(),
                snapshot_times=self.get("snapshot_times"), master_seed=self.get("seed"))
        except ConfigError:
            raise
        except ValueError as exc:
            raise ConfigError(str(exc)) from None

    def use_finite_reference(self) -> bool:
        mode = self.get("reference")
        if mode == "auto":
            return self.get("n") <= EXACT_KERNEL_MAX_N
        return mode == "finite"
