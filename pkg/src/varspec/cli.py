"""Config-driven runs: build a family, run checks, write CSV/JSON artifacts.

    varspec run config.json [--output-dir D] [--parallel N]
    varspec list-families
    varspec version

The config is one JSON document; complex numbers are ``[re, im]`` pairs.
Every check is computed in memory first and files are only written once all
checks have finished, so an invalid config or a numerical failure leaves the
output directory untouched. Each file is written to a temporary name and
renamed into place.

Exit codes: 0 all checks pass or skip, 1 some check fails, 2 invalid config,
3 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import tempfile
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .convergence import (
    FAIL,
    PASS,
    LimitProblem,
    Thresholds,
    condition_report,
    default_probes,
    verify_forward_nodes,
    verify_reverse_bound,
    verify_strong_variant,
)
from .families import (
    GalerkinSpec,
    PerforatedSpec,
    ShiftFamilySpec,
    ThinStripSpec,
    make_galerkin_family,
    make_perforated_family,
    make_shift_family,
    make_thin_strip_family,
)
from .operators import DiscreteOperator, NumericalFailure, SpectralWindow, resolvent_norm
from .resolvent_engine import pseudospectrum
from .spectra import (
    certify_inclusion_bounded_resolvent,
    certify_isolated_eigenvalue,
    certify_no_pollution,
    circle_nodes,
    polyline_samples,
    segment_nodes,
    spectral_set,
    windowed_hausdorff_run,
)

ENV_OUTPUT_DIR = "VARSPEC_OUTPUT_DIR"
DEFAULT_OUTPUT_DIR = "varspec-out"

EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_NUMERICAL = 0, 1, 2, 3

CHECKS = ("conditions", "lemma_forward", "lemma_reverse", "strong_variant", "no_pollution",
          "inclusion", "isolated", "hausdorff", "pseudospectrum")

FAMILIES = {
    "shift": {
        "about": "shifted weighted shift counterexample: norm convergence without spectral inclusion",
        "fields": {"n_list": "[2, 5, 10, 100]", "window_N": "128", "wrap": "false"},
        "z0": "[2, 0]",
    },
    "galerkin": {
        "about": "projection onto subspaces: compressions onto the first m coordinates",
        "fields": {"base": '{"diag": 40} or {"entries": [[...]]}', "dims": "[5, 10, 20, 40]"},
        "z0": "1 + i (1 + ||A||), searched off all spectra",
    },
    "perforated": {
        "about": "perforated domains: Neumann Laplacian on (0, 1) minus shrinking holes",
        "fields": {"n_cells": "200", "hole_centers": "[0.3, 0.7]", "hole_scale": "0.5",
                   "eps_list": "[0.2, 0.1, 0.05]", "closure": '"bridge" | "neumann"'},
        "z0": "[-1, 0]",
    },
    "thin_strip": {
        "about": "dimensional reduction: Neumann Laplacian on a thin strip reducing to an interval",
        "fields": {"eps_list": "[0.5, 0.25, 0.125]", "nx": "24", "nt": "24", "normalized_measure": "true"},
        "z0": "[-1, 0]",
    },
}

HEADERS = {
    "conditions": ["eps", "cond_i_lower", "cond_i_upper", "cond_ii", "cond_iii_M", "cond_iv", "verdict"],
    "lemma_forward": ["eps", "re", "im", "L_forward", "resolvent_norm", "status", "reason"],
    "lemma_reverse": ["eps", "re", "im", "L_reverse_safe", "L_reverse_stated", "resolvent_norm",
                      "holds_stated", "status", "reason"],
    "strong_variant": ["eps", "re", "im", "probe", "residual", "bound", "status", "reason"],
    "hausdorff": ["eps", "d_forward", "d_backward", "d_H"],
    "pseudospectrum": ["re", "im", "sigma_min", "resolvent_norm"],
    "certificate": ["kind", "verdict", "witness_count", "detail_file"],
}


class ConfigError(ValueError):
    """Invalid run configuration; the message names the offending field."""


# --------------------------------------------------------------------------- parsing helpers

def _complex(value, where: str) -> complex:
    if isinstance(value, bool):
        raise ConfigError(f"{where}: expected a number or [re, im], got {value!r}")
    if isinstance(value, (int, float)):
        return complex(value)
    if isinstance(value, list) and len(value) == 2 and all(
            isinstance(v, (int, float)) and not isinstance(v, bool) for v in value):
        return complex(value[0], value[1])
    raise ConfigError(f"{where}: expected [re, im], got {value!r}")


def _number(value, where: str, positive: bool = False) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
        raise ConfigError(f"{where}: expected a finite number, got {value!r}")
    if positive and not value > 0:
        raise ConfigError(f"{where}: must be positive, got {value!r}")
    return float(value)


def _integer(value, where: str, minimum: int = 1) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"{where}: expected an integer, got {value!r}")
    if value < minimum:
        raise ConfigError(f"{where}: must be >= {minimum}, got {value}")
    return value


def _list(value, where: str) -> list:
    if not isinstance(value, list) or not value:
        raise ConfigError(f"{where}: expected a non-empty list")
    return value


def _object(value, where: str) -> dict:
    if not isinstance(value, dict):
        raise ConfigError(f"{where}: expected an object")
    return value


def _reject_unknown(obj: dict, allowed, where: str):
    extra = sorted(set(obj) - set(allowed))
    if extra:
        raise ConfigError(f"{where}: unknown field(s) {', '.join(extra)}")


# --------------------------------------------------------------------------- config

@dataclass
class RunConfig:
    family_name: str
    limit: LimitProblem
    members: list
    checks: list[str]
    window: SpectralWindow | None
    probe_count: int
    probe_seed: int
    tolerances: dict
    K_nodes: list[complex] | None
    path: list[complex] | None
    lam: complex | None
    delta: float | None
    l: float | None
    r: float | None
    resolution: tuple[int, int]
    pseudo_target: str
    output_dir: str | None
    echo: dict = field(default_factory=dict)


TOP_LEVEL = {"family", "z0", "window", "probes", "checks", "tolerances", "K", "path", "lambda",
             "delta", "l", "r", "pseudospectrum", "output_dir"}
TOLERANCE_KEYS = {"cond_i", "cond_ii", "cond_iii", "cond_iv", "hausdorff", "L_threshold", "per_segment"}


def _build_family(spec: dict, z0):
    spec = _object(spec, "family")
    name = spec.get("name")
    if name not in FAMILIES:
        raise ConfigError(f"family.name: unknown family {name!r}; choose from {', '.join(FAMILIES)}")
    fields = {k: v for k, v in spec.items() if k != "name"}
    try:
        if name == "shift":
            _reject_unknown(fields, {"n_list", "window_N", "wrap"}, "family")
            kw = {}
            if "n_list" in fields:
                kw["n_list"] = tuple(_integer(n, "family.n_list[]") for n in _list(fields["n_list"], "family.n_list"))
            if "window_N" in fields:
                kw["window_N"] = _integer(fields["window_N"], "family.window_N")
            if "wrap" in fields:
                if not isinstance(fields["wrap"], bool):
                    raise ConfigError("family.wrap: expected true or false")
                kw["wrap"] = fields["wrap"]
            limit, members = make_shift_family(ShiftFamilySpec(**kw))
        elif name == "galerkin":
            _reject_unknown(fields, {"base", "dims"}, "family")
            base = _object(fields.get("base"), "family.base")
            if set(base) == {"diag"}:
                n = _integer(base["diag"], "family.base.diag")
                A = np.diag(np.arange(1.0, n + 1.0))
            elif set(base) == {"entries"}:
                rows = _list(base["entries"], "family.base.entries")
                A = np.array([[_complex(v, f"family.base.entries[{i}][{j}]")
                               for j, v in enumerate(_list(row, f"family.base.entries[{i}]"))]
                              for i, row in enumerate(rows)])
            else:
                raise ConfigError('family.base: expected {"diag": n} or {"entries": [[...]]}')
            dims = tuple(_integer(m, "family.dims[]") for m in _list(fields.get("dims"), "family.dims"))
            limit, members = make_galerkin_family(GalerkinSpec(DiscreteOperator(A, label="base"), dims, z0))
        elif name == "perforated":
            _reject_unknown(fields, {"n_cells", "hole_centers", "hole_scale", "eps_list", "closure"}, "family")
            kw = {}
            if "n_cells" in fields:
                kw["n_cells"] = _integer(fields["n_cells"], "family.n_cells", 3)
            if "hole_centers" in fields:
                kw["hole_centers"] = tuple(_number(c, "family.hole_centers[]")
                                           for c in _list(fields["hole_centers"], "family.hole_centers"))
            if "hole_scale" in fields:
                kw["hole_scale"] = _number(fields["hole_scale"], "family.hole_scale", positive=True)
            if "eps_list" in fields:
                kw["eps_list"] = tuple(_number(e, "family.eps_list[]", positive=True)
                                       for e in _list(fields["eps_list"], "family.eps_list"))
            if "closure" in fields:
                kw["closure"] = fields["closure"]
            if z0 is not None:
                kw["z0"] = z0
            limit, members = make_perforated_family(PerforatedSpec(**kw))
        else:
            _reject_unknown(fields, {"eps_list", "nx", "nt", "normalized_measure"}, "family")
            kw = {}
            if "eps_list" in fields:
                kw["eps_list"] = tuple(_number(e, "family.eps_list[]", positive=True)
                                       for e in _list(fields["eps_list"], "family.eps_list"))
            for key in ("nx", "nt"):
                if key in fields:
                    kw[key] = _integer(fields[key], f"family.{key}", 3)
            if "normalized_measure" in fields:
                if not isinstance(fields["normalized_measure"], bool):
                    raise ConfigError("family.normalized_measure: expected true or false")
                kw["normalized_measure"] = fields["normalized_measure"]
            if z0 is not None:
                kw["z0"] = z0
            limit, members = make_thin_strip_family(ThinStripSpec(**kw))
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(f"family: {exc}") from exc
    if name == "shift" and z0 is not None:
        try:
            limit = LimitProblem(limit.A, z0)
        except ValueError as exc:
            raise ConfigError(f"z0: {exc}") from exc
    return name, limit, members


def _nodes(spec, where: str) -> list[complex]:
    spec = _object(spec, where)
    kind = spec.get("kind")
    if kind == "circle":
        _reject_unknown(spec, {"kind", "center", "radius", "count"}, where)
        return circle_nodes(_complex(spec.get("center", 0), f"{where}.center"),
                            _number(spec.get("radius"), f"{where}.radius", positive=True),
                            _integer(spec.get("count", 16), f"{where}.count"))
    if kind == "segment":
        _reject_unknown(spec, {"kind", "start", "end", "count"}, where)
        return segment_nodes(_complex(spec.get("start"), f"{where}.start"),
                             _complex(spec.get("end"), f"{where}.end"),
                             _integer(spec.get("count", 16), f"{where}.count"))
    if kind == "points":
        _reject_unknown(spec, {"kind", "points"}, where)
        return [_complex(p, f"{where}.points[{i}]") for i, p in enumerate(_list(spec.get("points"), f"{where}.points"))]
    raise ConfigError(f"{where}.kind: expected 'circle', 'segment' or 'points', got {kind!r}")


DEFAULT_K = {
    "shift": {"kind": "circle", "center": [0, 0], "radius": 1.5, "count": 16},
    "galerkin": None,
    "perforated": {"kind": "segment", "start": [-3, 0], "end": [-1.5, 0], "count": 16},
    "thin_strip": {"kind": "circle", "center": [-1, 0], "radius": 0.5, "count": 16},
}


def _default_isolated(limit: LimitProblem):
    vals = np.sort(spectral_set(limit.A).as_array().real)
    nonzero = vals[vals > 1e-9]
    if nonzero.size == 0:
        return None, None
    lam = float(nonzero[0])
    others = np.abs(vals - lam)
    others = others[others > 1e-8 * (1.0 + lam)]
    return complex(lam), float(0.5 * others.min())


def parse_config(doc: dict) -> RunConfig:
    """Validate a decoded JSON document and build the family it names."""
    doc = _object(doc, "config")
    _reject_unknown(doc, TOP_LEVEL, "config")
    if "family" not in doc:
        raise ConfigError("family: missing")
    checks = _list(doc.get("checks"), "checks")
    for i, c in enumerate(checks):
        if c not in CHECKS:
            raise ConfigError(f"checks[{i}]: unknown check {c!r}; choose from {', '.join(CHECKS)}")
    if len(set(checks)) != len(checks):
        raise ConfigError("checks: each check may appear once")
    z0 = _complex(doc["z0"], "z0") if "z0" in doc else None
    name, limit, members = _build_family(doc["family"], z0)

    window = None
    if "window" in doc:
        w = _object(doc["window"], "window")
        _reject_unknown(w, {"center", "radius"}, "window")
        try:
            window = SpectralWindow(_complex(w.get("center", 0), "window.center"),
                                    _number(w.get("radius"), "window.radius", positive=True))
        except ValueError as exc:
            raise ConfigError(f"window: {exc}") from exc

    probes = _object(doc.get("probes", {}), "probes")
    _reject_unknown(probes, {"count", "seed"}, "probes")
    probe_count = _integer(probes.get("count", 20), "probes.count", 0)
    probe_seed = _integer(probes.get("seed", 0), "probes.seed", 0)

    tolerances = _object(doc.get("tolerances", {}), "tolerances")
    _reject_unknown(tolerances, TOLERANCE_KEYS, "tolerances")
    for k, v in tolerances.items():
        _number(v, f"tolerances.{k}", positive=True)

    K_spec = doc.get("K", DEFAULT_K[name])
    K_nodes = _nodes(K_spec, "K") if K_spec is not None else None
    path = None
    if "path" in doc:
        path = [_complex(p, f"path[{i}]") for i, p in enumerate(_list(doc["path"], "path"))]
    lam = _complex(doc["lambda"], "lambda") if "lambda" in doc else None
    delta = _number(doc["delta"], "delta", positive=True) if "delta" in doc else None
    l = _number(doc["l"], "l", positive=True) if "l" in doc else None
    r = _number(doc["r"], "r", positive=True) if "r" in doc else None

    ps = _object(doc.get("pseudospectrum", {}), "pseudospectrum")
    _reject_unknown(ps, {"resolution", "target"}, "pseudospectrum")
    res = ps.get("resolution", [41, 41])
    if not isinstance(res, list) or len(res) != 2:
        raise ConfigError("pseudospectrum.resolution: expected [nx, ny]")
    resolution = (_integer(res[0], "pseudospectrum.resolution[0]", 2),
                  _integer(res[1], "pseudospectrum.resolution[1]", 2))
    target = ps.get("target", "limit")
    if target not in ("limit", "final"):
        raise ConfigError("pseudospectrum.target: expected 'limit' or 'final'")

    needs_K = {"lemma_forward", "lemma_reverse", "strong_variant", "no_pollution", "inclusion"} & set(checks)
    if needs_K and K_nodes is None:
        raise ConfigError(f"K: required by {', '.join(sorted(needs_K))} for the {name} family")
    if {"hausdorff", "pseudospectrum"} & set(checks) and window is None:
        raise ConfigError("window: required by the hausdorff and pseudospectrum checks")
    if "isolated" in checks:
        if lam is None:
            lam, default_delta = _default_isolated(limit)
            if lam is None:
                raise ConfigError("lambda: required by the isolated check")
            delta = delta or default_delta
        if delta is None:
            raise ConfigError("delta: required by the isolated check when lambda is given")
    if K_nodes is not None and needs_K:
        for z in K_nodes:
            if resolvent_norm(limit.A, z).is_singular or any(resolvent_norm(m.A_eps, z).is_singular for m in members):
                raise ConfigError(f"K: node {z} lies in a spectrum")
    if path is not None and abs(path[-1] - limit.z0) > 1e-12 * (1.0 + abs(limit.z0)):
        raise ConfigError(f"path: must end at z0 = [{limit.z0.real}, {limit.z0.imag}]")

    out = doc.get("output_dir")
    if out is not None and not isinstance(out, str):
        raise ConfigError("output_dir: expected a string")

    return RunConfig(family_name=name, limit=limit, members=members, checks=list(checks), window=window,
                     probe_count=probe_count, probe_seed=probe_seed, tolerances=dict(tolerances),
                     K_nodes=K_nodes, path=path, lam=lam, delta=delta, l=l, r=r, resolution=resolution,
                     pseudo_target=target, output_dir=out, echo=doc)


def load_config(path: str) -> RunConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc.strerror}") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    return parse_config(doc)


# --------------------------------------------------------------------------- checks

def _fmt(x) -> str:
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, (int, float, np.floating, np.integer)):
        return format(float(x), ".17g")
    return str(x)


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, complex):
        return [_jsonable(obj.real), _jsonable(obj.imag)]
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return x if math.isfinite(x) else str(x)
    if isinstance(obj, np.integer):
        return int(obj)
    if hasattr(obj, "value"):
        return obj.value
    return obj


@dataclass
class CheckResult:
    name: str
    status: str  # pass | fail | skipped | report
    files: dict  # file name -> text
    reason: str = ""


def _probes(cfg: RunConfig):
    return default_probes(cfg.limit.dim, n_random=cfg.probe_count, seed=cfg.probe_seed)


def _measured_l_limit(cfg):
    return max(resolvent_norm(cfg.limit.A, z).resolvent_norm for z in cfg.K_nodes)


def _measured_l_family(cfg):
    return max(resolvent_norm(m.A_eps, z).resolvent_norm for m in cfg.members for z in cfg.K_nodes)


def _measured_r(cfg):
    return max(abs(z) for z in cfg.K_nodes) + 1.0


def _family_M(cfg):
    return max(m.M for m in cfg.members)


def run_conditions(cfg: RunConfig) -> CheckResult:
    t = cfg.tolerances
    thresholds = Thresholds(t.get("cond_i"), t.get("cond_ii"), t.get("cond_iii"), t.get("cond_iv"))
    probes = _probes(cfg)
    rows, verdict = [], "unchecked"
    for m in cfg.members:
        rep = condition_report(m, cfg.limit, probes=probes, thresholds=thresholds)
        verdict = {True: PASS, False: FAIL, None: "unchecked"}[rep.passed]
        rows.append([m.eps, rep.cond_i[0], rep.cond_i[1], rep.cond_ii, rep.cond_iii_M, rep.cond_iv, verdict])
    status = {"unchecked": "report"}.get(verdict, verdict)
    return CheckResult("conditions", status, {"conditions.csv": _csv_text(HEADERS["conditions"], rows)})


def _status_of(statuses) -> str:
    statuses = list(statuses)
    if FAIL in statuses:
        return FAIL
    if PASS in statuses:
        return PASS
    return "skipped"


def run_lemma_forward(cfg: RunConfig) -> CheckResult:
    l = cfg.l or _measured_l_limit(cfg)
    r = cfg.r or _measured_r(cfg)
    rows = []
    for m in cfg.members:
        for c in verify_forward_nodes(m, cfg.limit, cfg.K_nodes, l, r):
            rows.append([m.eps, c.z.real, c.z.imag, c.L, c.observed, c.status, c.reason])
    return CheckResult("lemma_forward", _status_of(row[5] for row in rows),
                       {"lemma_forward.csv": _csv_text(HEADERS["lemma_forward"], rows)})


def run_lemma_reverse(cfg: RunConfig) -> CheckResult:
    l = cfg.l or _measured_l_family(cfg)
    r = cfg.r or _measured_r(cfg)
    rows = []
    for m in cfg.members:
        for c in verify_reverse_bound(m, cfg.limit, cfg.K_nodes, l, r):
            rows.append([m.eps, c.z.real, c.z.imag, c.L_safe, c.L_stated, c.observed, c.holds_stated,
                         c.status, c.reason])
    return CheckResult("lemma_reverse", _status_of(row[7] for row in rows),
                       {"lemma_reverse.csv": _csv_text(HEADERS["lemma_reverse"], rows)})


def run_strong_variant(cfg: RunConfig) -> CheckResult:
    l = cfg.l or _measured_l_family(cfg)
    probes = _probes(cfg)
    rows = []
    for m in cfg.members:
        for z in cfg.K_nodes:
            for k, c in enumerate(verify_strong_variant(m, cfg.limit, probes, z, l)):
                rows.append([m.eps, z.real, z.imag, k, c.residual, c.bound, c.status, c.reason])
    return CheckResult("strong_variant", _status_of(row[6] for row in rows),
                       {"strong_variant.csv": _csv_text(HEADERS["strong_variant"], rows)})


def _certificate(name: str, outcome) -> CheckResult:
    detail = f"{name}_detail.json"
    row = [outcome.kind.value, outcome.verdict, outcome.witness_count, detail]
    payload = {"kind": outcome.kind.value, "verdict": outcome.verdict,
               "witnesses": _jsonable(outcome.witnesses), "tolerances": _jsonable(outcome.tolerances)}
    files = {f"{name}.csv": _csv_text(HEADERS["certificate"], [row]),
             detail: json.dumps(payload, indent=2, sort_keys=True) + "\n"}
    return CheckResult(name, outcome.verdict, files)


def run_no_pollution(cfg: RunConfig) -> CheckResult:
    return _certificate("no_pollution", certify_no_pollution(cfg.members, cfg.limit, cfg.K_nodes,
                                                             cfg.tolerances.get("L_threshold")))


def run_inclusion(cfg: RunConfig) -> CheckResult:
    path = cfg.path or [cfg.K_nodes[0], cfg.limit.z0]
    per_segment = int(cfg.tolerances.get("per_segment", 8))
    l = cfg.l
    if l is None:
        # smallest l for which the hypotheses can hold on the sampled K and path
        pts = list(cfg.K_nodes) + polyline_samples(path, per_segment)
        l = max(resolvent_norm(m.A_eps, z).resolvent_norm for m in cfg.members for z in pts) * (1.0 + 1e-9)
    return _certificate("inclusion", certify_inclusion_bounded_resolvent(
        cfg.members, cfg.limit, cfg.K_nodes, path, l, per_segment=per_segment, r=cfg.r))


def run_isolated(cfg: RunConfig) -> CheckResult:
    return _certificate("isolated", certify_isolated_eigenvalue(cfg.members, cfg.limit, cfg.lam, cfg.delta))


def run_hausdorff(cfg: RunConfig) -> CheckResult:
    tol = cfg.tolerances.get("hausdorff", 1e-8)
    rows = [[eps, h.d_forward, h.d_backward, h.d_H]
            for eps, h in windowed_hausdorff_run(cfg.members, cfg.limit, cfg.window, tol=tol)]
    return CheckResult("hausdorff", "report", {"hausdorff.csv": _csv_text(HEADERS["hausdorff"], rows)})


def run_pseudospectrum(cfg: RunConfig) -> CheckResult:
    A = cfg.limit.A if cfg.pseudo_target == "limit" else cfg.members[-1].A_eps
    grid = pseudospectrum(A, cfg.window, cfg.resolution)
    rows = []
    for i, x in enumerate(grid.re):
        for j, y in enumerate(grid.im):
            s = grid.samples[i, j]
            rows.append([x, y, s.sigma_min, s.resolvent_norm])
    return CheckResult("pseudospectrum", "report",
                       {"pseudospectrum.csv": _csv_text(HEADERS["pseudospectrum"], rows)})


RUNNERS = {
    "conditions": run_conditions,
    "lemma_forward": run_lemma_forward,
    "lemma_reverse": run_lemma_reverse,
    "strong_variant": run_strong_variant,
    "no_pollution": run_no_pollution,
    "inclusion": run_inclusion,
    "isolated": run_isolated,
    "hausdorff": run_hausdorff,
    "pseudospectrum": run_pseudospectrum,
}


# --------------------------------------------------------------------------- orchestration

@dataclass
class RunManifest:
    config: dict
    outputs: dict
    verdict: str
    timings: dict

    def to_json(self) -> str:
        return json.dumps({"config": self.config, "outputs": self.outputs, "verdict": self.verdict,
                           "timings": self.timings, "version": __version__}, indent=2) + "\n"


def _write_atomic(directory: str, name: str, text: str):
    fd, tmp = tempfile.mkstemp(prefix=f".{name}.", dir=directory)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, os.path.join(directory, name))
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _timed(name, cfg):
    start = time.perf_counter()
    result = RUNNERS[name](cfg)
    return result, time.perf_counter() - start


def run(cfg: RunConfig, output_dir: str, parallel: int = 1) -> RunManifest:
    """Execute the checks in declared order, then write every artifact and the manifest."""
    if parallel > 1:
        with ThreadPoolExecutor(max_workers=parallel) as pool:
            futures = [pool.submit(_timed, name, cfg) for name in cfg.checks]
            done = [f.result() for f in futures]
    else:
        done = [_timed(name, cfg) for name in cfg.checks]

    os.makedirs(output_dir, exist_ok=True)
    outputs, timings = {}, {}
    for result, seconds in done:
        for fname, text in result.files.items():
            _write_atomic(output_dir, fname, text)
        entry = {"status": result.status, "files": sorted(result.files)}
        if result.status == "skipped":
            entry["reason"] = result.reason or "no node satisfied the hypotheses"
        outputs[result.name] = entry
        timings[result.name] = round(seconds, 6)
    statuses = [r.status for r, _ in done]
    verdict = FAIL if FAIL in statuses else PASS
    manifest = RunManifest(config=cfg.echo, outputs=outputs, verdict=verdict, timings=timings)
    _write_atomic(output_dir, "manifest.json", manifest.to_json())
    return manifest


def list_families() -> str:
    lines = []
    for name, info in FAMILIES.items():
        lines.append(f"{name}: {info['about']}")
        for key, default in info["fields"].items():
            lines.append(f"  {key} = {default}")
        lines.append(f"  z0 = {info['z0']}")
    return "\n".join(lines) + "\n"


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="varspec", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    r = sub.add_parser("run", help="run the checks of a JSON config")
    r.add_argument("config")
    r.add_argument("--output-dir", default=None,
                   help=f"output directory (default: config output_dir, ${ENV_OUTPUT_DIR}, ./{DEFAULT_OUTPUT_DIR})")
    r.add_argument("--parallel", type=int, default=1, help="run up to N checks concurrently")
    sub.add_parser("list-families", help="describe the built-in families")
    sub.add_parser("version", help="print the version")
    return p


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    if args.command == "version":
        print(f"varspec {__version__}")
        return EXIT_OK
    if args.command == "list-families":
        sys.stdout.write(list_families())
        return EXIT_OK
    if args.parallel < 1:
        print("error: --parallel must be >= 1", file=sys.stderr)
        return EXIT_CONFIG
    try:
        cfg = load_config(args.config)
    except ConfigError as exc:
        print(f"invalid config: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalFailure as exc:
        print(f"numerical failure while building the family: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    out = args.output_dir or cfg.output_dir or os.environ.get(ENV_OUTPUT_DIR) or DEFAULT_OUTPUT_DIR
    try:
        manifest = run(cfg, out, parallel=args.parallel)
    except NumericalFailure as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except ValueError as exc:
        print(f"invalid config: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    for name, entry in manifest.outputs.items():
        print(f"{name}: {entry['status']}")
    print(f"verdict: {manifest.verdict} ({out})")
    return EXIT_FAIL if manifest.verdict == FAIL else EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
