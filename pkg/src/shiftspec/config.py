"""INI-style run configuration: domain spec, sweep grids, bound constants.

Vectors are comma-separated, matrices use ";" between rows, and mixture
components are "weight : matrix" items joined with "|". Floats are written
with repr so a dump/parse round trip reproduces every value exactly.
"""

from __future__ import annotations

import configparser
import io
from dataclasses import dataclass, field

import numpy as np

from .conditions import DEFAULT_RELIANCE_GRID
from .core import (BoundParams, DomainSpec, IdentityShift, LinearShift, Mask,
                   MixtureShift, ShiftSpec)

DEFAULT_MIXTURE_FACTORS = (1.5, 0.5, -0.5, -1.5)


@dataclass(frozen=True)
class OptimizerConfig:
    tol: float = 1e-8
    max_iters: int = 10_000
    l2: float = 1e-3
    mask: Mask = Mask.FULL
    bias: bool = False


@dataclass(frozen=True)
class SweepConfig:
    n_shifts: int = 50
    shift_scale: float = 2.0
    n_per_domain: int = 1000
    ood_mode: str = "random"  # random | interpolation
    base_components: tuple = ()
    reliance_grid: tuple[float, ...] = DEFAULT_RELIANCE_GRID
    sweep_seeds: int = 3
    eps_grid: tuple[float, ...] = (0.0, 0.5, 1.0, 1.5, 2.0)
    trials: int = 500

    def components_or_default(self, l: int) -> list[np.ndarray]:
        if self.base_components:
            return [np.asarray(m, dtype=np.float64) for m in self.base_components]
        return [f * np.eye(l) for f in DEFAULT_MIXTURE_FACTORS]


@dataclass(frozen=True)
class RunConfig:
    domain: DomainSpec
    bounds: BoundParams = field(default_factory=BoundParams)
    optimizer: OptimizerConfig = field(default_factory=OptimizerConfig)
    sweep: SweepConfig = field(default_factory=SweepConfig)


def format_vector(v: np.ndarray) -> str:
    return ", ".join(repr(float(x)) for x in np.asarray(v).ravel())


def format_matrix(m: np.ndarray) -> str:
    return "; ".join(", ".join(repr(float(x)) for x in row)
                     for row in np.asarray(m))


def parse_vector(text: str) -> np.ndarray:
    return np.array([float(tok) for tok in text.split(",")], dtype=np.float64)


def parse_matrix(text: str) -> np.ndarray:
    rows = [r for r in (row.strip() for row in text.split(";")) if r]
    return np.array([[float(tok) for tok in row.split(",")] for row in rows],
                    dtype=np.float64)


def _format_shift(shift: ShiftSpec) -> dict[str, str]:
    if isinstance(shift, IdentityShift):
        return {"variant": "identity"}
    if isinstance(shift, LinearShift):
        return {"variant": "linear", "matrix": format_matrix(shift.m)}
    parts = [f"{repr(float(w))} : {format_matrix(m)}"
             for w, m in shift.components]
    return {"variant": "mixture", "components": " | ".join(parts)}


def _parse_shift(section) -> ShiftSpec:
    variant = section.get("variant", "identity").strip().lower()
    if variant == "identity":
        return IdentityShift()
    if variant == "linear":
        return LinearShift(parse_matrix(section["matrix"]))
    if variant == "mixture":
        comps = []
        for item in section["components"].split("|"):
            weight_text, matrix_text = item.split(":", 1)
            comps.append((float(weight_text), parse_matrix(matrix_text)))
        return MixtureShift(tuple(comps))
    raise ValueError(f"unknown shift variant {variant!r}")


def dumps_config(cfg: RunConfig) -> str:
    cp = configparser.ConfigParser()
    cp.optionxform = str
    spec = cfg.domain
    cp["domain"] = {
        "k": str(spec.k),
        "l": str(spec.l),
        "mu_c": format_vector(spec.mu_c),
        "sigma_c": format_matrix(spec.sigma_c),
        "mu_e": format_vector(spec.mu_e),
        "sigma_e": format_matrix(spec.sigma_e),
        "label_prior": repr(float(spec.label_prior)),
    }
    cp["domain.shift"] = _format_shift(spec.shift)
    b = cfg.bounds
    cp["bounds"] = {name: repr(float(getattr(b, name)))
                    for name in ("kappa", "l_phi", "delta", "tsybakov_b",
                                 "lemma_c", "slope_a", "clip_alpha",
                                 "eps1", "eps2", "gamma")}
    o = cfg.optimizer
    cp["optimizer"] = {
        "tol": repr(float(o.tol)),
        "max_iters": str(o.max_iters),
        "l2": repr(float(o.l2)),
        "mask": o.mask.value,
        "bias": str(o.bias).lower(),
    }
    s = cfg.sweep
    sweep_section = {
        "n_shifts": str(s.n_shifts),
        "shift_scale": repr(float(s.shift_scale)),
        "n_per_domain": str(s.n_per_domain),
        "ood_mode": s.ood_mode,
        "reliance_grid": format_vector(np.array(s.reliance_grid)),
        "sweep_seeds": str(s.sweep_seeds),
        "eps_grid": format_vector(np.array(s.eps_grid)),
        "trials": str(s.trials),
    }
    if s.base_components:
        parts = [format_matrix(m) for m in s.base_components]
        sweep_section["base_components"] = " | ".join(parts)
    cp["sweep"] = sweep_section
    out = io.StringIO()
    cp.write(out)
    return out.getvalue()


def parse_config(text: str) -> RunConfig:
    cp = configparser.ConfigParser()
    cp.optionxform = str
    cp.read_string(text)
    if "domain" not in cp:
        raise ValueError("config must have a [domain] section")
    dom = cp["domain"]
    k = dom.getint("k")
    l = dom.getint("l")
    shift = _parse_shift(cp["domain.shift"]) if "domain.shift" in cp else IdentityShift()
    spec = DomainSpec(
        k=k, l=l,
        mu_c=parse_vector(dom["mu_c"]),
        sigma_c=parse_matrix(dom["sigma_c"]),
        mu_e=parse_vector(dom["mu_e"]),
        sigma_e=parse_matrix(dom["sigma_e"]),
        label_prior=dom.getfloat("label_prior", 0.5),
        shift=shift,
    )

    bounds = BoundParams()
    if "bounds" in cp:
        sec = cp["bounds"]
        bounds = BoundParams(**{name: sec.getfloat(name, getattr(BoundParams, name))
                                for name in ("kappa", "l_phi", "delta",
                                             "tsybakov_b", "lemma_c", "slope_a",
                                             "clip_alpha", "eps1", "eps2",
                                             "gamma")})

    optimizer = OptimizerConfig()
    if "optimizer" in cp:
        sec = cp["optimizer"]
        optimizer = OptimizerConfig(
            tol=sec.getfloat("tol", OptimizerConfig.tol),
            max_iters=sec.getint("max_iters", OptimizerConfig.max_iters),
            l2=sec.getfloat("l2", OptimizerConfig.l2),
            mask=Mask(sec.get("mask", "full")),
            bias=sec.getboolean("bias", False),
        )

    sweep = SweepConfig()
    if "sweep" in cp:
        sec = cp["sweep"]
        base = ()
        if "base_components" in sec:
            base = tuple(parse_matrix(part) for part in sec["base_components"].split("|"))
        sweep = SweepConfig(
            n_shifts=sec.getint("n_shifts", SweepConfig.n_shifts),
            shift_scale=sec.getfloat("shift_scale", SweepConfig.shift_scale),
            n_per_domain=sec.getint("n_per_domain", SweepConfig.n_per_domain),
            ood_mode=sec.get("ood_mode", SweepConfig.ood_mode),
            base_components=base,
            reliance_grid=tuple(parse_vector(sec["reliance_grid"]))
            if "reliance_grid" in sec else SweepConfig.reliance_grid,
            sweep_seeds=sec.getint("sweep_seeds", SweepConfig.sweep_seeds),
            eps_grid=tuple(parse_vector(sec["eps_grid"]))
            if "eps_grid" in sec else SweepConfig.eps_grid,
            trials=sec.getint("trials", SweepConfig.trials),
        )
    if sweep.ood_mode not in ("random", "interpolation"):
        raise ValueError("ood_mode must be 'random' or 'interpolation'")
    return RunConfig(domain=spec, bounds=bounds, optimizer=optimizer, sweep=sweep)


def load_config(path) -> RunConfig:
    from pathlib import Path
    return parse_config(Path(path).read_text(encoding="utf-8"))


def default_config() -> RunConfig:
    from .core import default_spec
    # delta = 0.5 keeps the sufficient-condition region populated at the
    # default 50-shift budget; smaller deltas certify almost no random shift.
    return RunConfig(domain=default_spec(),
                     bounds=BoundParams(delta=0.5))
