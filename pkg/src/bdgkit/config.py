"""Run configuration: one JSON document with a section per suite.

Values missing from the document fall back to :data:`DEFAULTS`; unknown keys
and out-of-range values raise :class:`ConfigInvalid`.
"""
from __future__ import annotations

import copy
import json
import os
from pathlib import Path

from .errors import ConfigInvalid

SCHEMA_VERSION = 1
OUTPUT_ENV = "BDGKIT_OUTPUT_DIR"

DEFAULTS: dict = {
    "schema_version": SCHEMA_VERSION,
    "output_dir": "bdgkit_out",
    "profile": {"n_nodes": 512, "tol": 1e-10},
    "coords": {"n_samples": 10000, "seed": 12345, "h_fd": 1e-4, "rmin": 1.0, "rmax": 1000.0,
               "roundtrip_tol": 1e-8, "orth_tol": 1e-5},
    "curvature": {"sigma": 0.2, "amp": 10.0, "kinds": ["tilde_F0", "const", "tanh"],
                  "rmax": 500.0, "n_r": 24, "n_theta": 16,
                  "minimality_rmin": 5.0, "minimality_rmax": 200.0, "minimality_n": 80,
                  "minimality_tol": 1e-8, "minimality_stability": 0.1, "appendix_tol": 1e-6},
    "graph": {"R": 20.0, "nr": 200, "ntheta": 200, "tol": 1e-9, "sigma": 0.2, "grading": 1.5,
              "correction": "f0", "R0": 2.0, "max_iterations": 15},
    "geometry": {"rho0": 10.0, "n_random": 100, "seed": 2024, "sphere_tol": 1e-8,
                 "envelope_rmin": 10.0, "envelope_rmax": 200.0, "sigma1": 0.5},
    "ansatz": {"alphas": [0.2, 0.1, 0.05], "with_w1": False, "weights": [[3.0, 1.0], [2.0, 0.5]],
               "R": 60.0, "nr": 200, "ntheta": 100, "radii": [30.0, 35.0, 40.0],
               "thetas": [1.0, 1.2, 1.4], "n_z": 33, "h_fd": 0.02, "theta0": 0.25, "delta": 0.05,
               "projection_alpha": 0.1, "projection_r": 30.0, "projection_samples": 10,
               "slope_range": [1.8, 2.2], "ratio_range": [0.8, 1.2]},
    "jacobi": {"sigma": -0.5, "sigma1": 0.5, "rmin": 20.0, "rmax": 500.0, "R0": 2.0,
               "R_values": [50.0, 100.0, 200.0], "R": 100.0, "rhs": "decay", "ntheta": 80,
               "points_per_decade": 60, "tol": 1e-10, "manufactured_tol": 1e-6,
               "ratio_tol": 0.2, "kernel_R": 10.0, "kernel_sizes": [100, 200, 400],
               "kernel_window": [0.5, 8.0], "kernel_min_order": 1.8},
}

SUITES = ("profile", "coords", "curvature", "graph", "geometry", "ansatz", "jacobi")


def _merge(base: dict, over: dict, path: str) -> dict:
    out = copy.deepcopy(base)
    for k, v in over.items():
        if k not in base:
            raise ConfigInvalid(f"unknown config key {path}{k}")
        if isinstance(base[k], dict):
            if not isinstance(v, dict):
                raise ConfigInvalid(f"{path}{k} must be an object")
            out[k] = _merge(base[k], v, f"{path}{k}.")
        else:
            out[k] = v
    return out


def _positive(section: str, cfg: dict, keys):
    for k in keys:
        v = cfg[k]
        if not isinstance(v, (int, float)) or isinstance(v, bool) or not v > 0:
            raise ConfigInvalid(f"{section}.{k} must be a positive number, got {v!r}")


def validate(cfg: dict) -> dict:
    """Check the invariants of a merged configuration and return it."""
    if cfg.get("schema_version") != SCHEMA_VERSION:
        raise ConfigInvalid(f"unsupported schema_version {cfg.get('schema_version')!r}")
    for name in SUITES:
        sec = cfg[name]
        tol_keys = [k for k in sec if k.endswith("tol") or k.endswith("_tol")]
        _positive(name, sec, tol_keys)
    _positive("profile", cfg["profile"], ["n_nodes"])
    if cfg["profile"]["n_nodes"] < 64:
        raise ConfigInvalid("profile.n_nodes must be at least 64")
    _positive("coords", cfg["coords"], ["n_samples", "h_fd", "rmin", "rmax"])
    _positive("curvature", cfg["curvature"], ["amp", "rmax", "n_r", "n_theta", "minimality_n"])
    _positive("graph", cfg["graph"], ["R", "nr", "ntheta", "grading"])
    _positive("geometry", cfg["geometry"], ["rho0", "n_random"])
    _positive("ansatz", cfg["ansatz"], ["R", "nr", "ntheta", "n_z", "h_fd", "theta0", "delta"])
    _positive("jacobi", cfg["jacobi"], ["rmin", "rmax", "R", "ntheta", "points_per_decade"])
    if not cfg["curvature"]["kinds"]:
        raise ConfigInvalid("curvature.kinds must be nonempty")
    a = cfg["ansatz"]
    for key in ("alphas", "radii", "thetas", "weights"):
        if not a[key]:
            raise ConfigInvalid(f"ansatz.{key} must be nonempty")
    if any(not 0 < x < 1 for x in a["alphas"] + [a["projection_alpha"]]):
        raise ConfigInvalid("alpha values must lie in (0, 1)")
    if not 4 * a["delta"] < a["theta0"]:
        raise ConfigInvalid("ansatz needs 4·delta < theta0")
    j = cfg["jacobi"]
    if not j["R_values"] or not j["kernel_sizes"]:
        raise ConfigInvalid("jacobi grids must be nonempty")
    if j["rhs"] not in ("zero", "manufactured", "decay"):
        raise ConfigInvalid(f"jacobi.rhs must be zero, manufactured or decay, got {j['rhs']!r}")
    if cfg["graph"]["correction"] not in ("f0", "smooth", "none"):
        raise ConfigInvalid("graph.correction must be f0, smooth or none")
    return cfg


def load_config(path: str | os.PathLike | None = None, overrides: dict | None = None) -> dict:
    """Defaults ⊕ JSON file ⊕ overrides, validated.

    The output directory is taken from ``$BDGKIT_OUTPUT_DIR`` when set.
    """
    cfg = copy.deepcopy(DEFAULTS)
    if path is not None:
        try:
            doc = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigInvalid(f"cannot read config {path}: {exc}") from exc
        if not isinstance(doc, dict):
            raise ConfigInvalid("config document must be a JSON object")
        cfg = _merge(cfg, doc, "")
    if overrides:
        cfg = _merge(cfg, overrides, "")
    env = os.environ.get(OUTPUT_ENV)
    if env:
        cfg["output_dir"] = env
    return validate(cfg)
