"""Experiment runner: validates a JSON config, executes a named study, and
persists trajectories and diagnostic tables.

Output formats
--------------
snapshots.jsonl   one record {"t": ..., "samples": [...]} per line
run_meta.json     grid, flow, study, seed, schema version
*.csv             headered tables; conserved series use columns
                  (t, quantity, kappa, value) with kappa empty for the
                  polynomial functionals, local-smoothing reports use
                  (z, kappa, ls_value)

Identical config and seed produce byte-identical CSV output.  The
KDV5_OUTPUT_DIR environment variable overrides output.directory.

Exit codes: 0 all invariants pass, 1 validation failure, 2 numerical abort,
3 invariant failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from dataclasses import dataclass, field

import numpy as np

from .spectral import Field, Grid, sobolev_norm
from .fields import cosine_field, gaussian_field, random_field, soliton_field
from .hamiltonians import energy_fifth, energy_kdv, momentum
from .schrodinger import (
    NearSingularOperatorError,
    NewtonConvergenceError,
    SeriesDivergenceError,
    alpha_of,
    diffeo_forward,
    diffeo_inverse,
)
from .flows import (
    FlowSpec,
    IntegratorConfig,
    NumericalAbortError,
    StabilityError,
    integrate,
)
from .diagnostics import identity_check, kappa_convergence_study, ls_norm, microscopic_residual

SCHEMA_VERSION = 1
ENV_OUTPUT_DIR = "KDV5_OUTPUT_DIR"

NUMERICAL_ERRORS = (
    NumericalAbortError,
    StabilityError,
    NearSingularOperatorError,
    SeriesDivergenceError,
    NewtonConvergenceError,
)


class ConfigError(ValueError):
    def __init__(self, field_path: str, message: str):
        super().__init__(f"{field_path}: {message}")
        self.field_path = field_path
        self.detail = message


def _fmt(x) -> str:
    """Shortest-roundtrip float formatting; byte-stable for a fixed toolchain."""
    if isinstance(x, float) or isinstance(x, np.floating):
        return repr(float(x))
    return str(x)


# ---------------------------------------------------------------------------
# config schema
# ---------------------------------------------------------------------------

_DEFAULTS = {
    "seed": 1234,
    "grid": {"L": 50.0, "N": 512},
    "initial_data": {"kind": "gaussian", "amplitude": 0.05, "width": 1.5, "center": 0.0},
    "flow": {"kind": "fifth", "kappa": None, "green_route": "direct", "series_ell_max": 6},
    "integrator": {
        "dt": 2e-4,
        "t_end": 0.1,
        "scheme": "IFRK4",
        "conserved_sample_stride": 0,
        "snapshot_stride": 1,
        "stability_guard": 2.0,
    },
    "diagnostics": {},
    "output": {"directory": "kdv5_out", "formats": ["csv", "jsonl"]},
}

_SECTION_KEYS = {
    "grid": {"L", "N"},
    "initial_data": {"kind", "amplitude", "width", "center", "path", "target_hm1"},
    "flow": {"kind", "kappa", "green_route", "series_ell_max"},
    "integrator": {"dt", "t_end", "scheme", "conserved_sample_stride",
                   "snapshot_stride", "stability_guard"},
    "diagnostics": {"kappa_list", "center_spacing", "window", "drift_tolerance",
                    "num_fields", "target_hm1", "dt_halvings", "min_ratio",
                    "varkappa", "hkappa_dt", "dt_fifth", "snapshot_spacing",
                    "tolerance", "ell_max", "thresholds"},
    "output": {"directory", "formats"},
}

_TOP_KEYS = {"schema_version", "study", "seed"} | set(_SECTION_KEYS)


def _reject_unknown(obj: dict, allowed: set, path: str):
    for key in obj:
        if key not in allowed:
            raise ConfigError(f"{path}{key}" if path else key, "unknown key")


def _require_number(obj: dict, key: str, path: str, lo=None, hi=None, integer=False):
    if key not in obj:
        raise ConfigError(f"{path}{key}", "missing required key")
    v = obj[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigError(f"{path}{key}", f"expected a number, got {v!r}")
    if integer and int(v) != v:
        raise ConfigError(f"{path}{key}", f"expected an integer, got {v!r}")
    if lo is not None and v < lo:
        raise ConfigError(f"{path}{key}", f"must be >= {lo}, got {v}")
    if hi is not None and v > hi:
        raise ConfigError(f"{path}{key}", f"must be <= {hi}, got {v}")
    return v


def _merged(section: str, cfg: dict) -> dict:
    out = dict(_DEFAULTS.get(section, {}))
    out.update(cfg.get(section, {}))
    return out


def load_config(path: str) -> dict:
    try:
        with open(path) as fh:
            raw = json.load(fh)
    except OSError as exc:
        raise ConfigError("<file>", f"cannot read config: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError("<file>", f"invalid JSON: {exc}") from exc
    return validate_config(raw)


def validate_config(raw: dict) -> dict:
    if not isinstance(raw, dict):
        raise ConfigError("<root>", "config must be a JSON object")
    _reject_unknown(raw, _TOP_KEYS, "")
    version = raw.get("schema_version")
    if version != SCHEMA_VERSION:
        raise ConfigError("schema_version", f"expected {SCHEMA_VERSION}, got {version!r}")
    if raw.get("study") not in STUDIES:
        raise ConfigError("study", f"unknown study {raw.get('study')!r}; "
                                   f"choose from {sorted(STUDIES)}")
    for section, allowed in _SECTION_KEYS.items():
        if section in raw:
            if not isinstance(raw[section], dict):
                raise ConfigError(section, "must be an object")
            _reject_unknown(raw[section], allowed, f"{section}.")

    cfg = {
        "schema_version": SCHEMA_VERSION,
        "study": raw["study"],
        "seed": int(raw.get("seed", _DEFAULTS["seed"])),
    }
    for section in _SECTION_KEYS:
        cfg[section] = _merged(section, raw)

    g = cfg["grid"]
    _require_number(g, "L", "grid.", lo=1e-8)
    N = _require_number(g, "N", "grid.", lo=8, integer=True)
    if int(N) % 2 != 0:
        raise ConfigError("grid.N", f"must be even, got {int(N)}")

    ini = cfg["initial_data"]
    kinds = ("gaussian", "cosine", "soliton", "file", "zero")
    if ini.get("kind") not in kinds:
        raise ConfigError("initial_data.kind", f"must be one of {kinds}")
    if ini["kind"] == "file" and not isinstance(ini.get("path"), str):
        raise ConfigError("initial_data.path", "file kind requires a path string")

    fl = cfg["flow"]
    try:
        build_flow(fl)
    except ValueError as exc:
        raise ConfigError("flow", str(exc)) from exc

    it = cfg["integrator"]
    _require_number(it, "dt", "integrator.", lo=1e-12)
    _require_number(it, "t_end", "integrator.")
    if it.get("scheme") != "IFRK4":
        raise ConfigError("integrator.scheme", f"unsupported scheme {it.get('scheme')!r}")

    out = cfg["output"]
    if not isinstance(out.get("directory"), str):
        raise ConfigError("output.directory", "must be a string")
    formats = out.get("formats")
    if not isinstance(formats, list) or not set(formats) <= {"csv", "jsonl"}:
        raise ConfigError("output.formats", "must be a subset of ['csv', 'jsonl']")

    dg = cfg["diagnostics"]
    if "kappa_list" in dg:
        ks = dg["kappa_list"]
        if not isinstance(ks, list) or any(
                isinstance(k, bool) or not isinstance(k, (int, float)) or k < 1.0 for k in ks):
            raise ConfigError("diagnostics.kappa_list", "must be a list of numbers >= 1")
    return cfg


# ---------------------------------------------------------------------------
# object builders
# ---------------------------------------------------------------------------

def build_grid(cfg: dict) -> Grid:
    return Grid(float(cfg["grid"]["L"]), int(cfg["grid"]["N"]))


def build_flow(flow_cfg: dict) -> FlowSpec:
    kappa = flow_cfg.get("kappa")
    return FlowSpec(
        kind=flow_cfg.get("kind", "fifth"),
        kappa=None if kappa is None else float(kappa),
        green_route=flow_cfg.get("green_route", "direct"),
        series_ell_max=int(flow_cfg.get("series_ell_max", 6)),
    )


def build_integrator(cfg: dict, kappa_list=()) -> IntegratorConfig:
    it = cfg["integrator"]
    return IntegratorConfig(
        dt=float(it["dt"]),
        t_end=float(it["t_end"]),
        scheme=it["scheme"],
        conserved_sample_stride=int(it["conserved_sample_stride"]),
        snapshot_stride=int(it["snapshot_stride"]),
        conserved_kappas=tuple(float(k) for k in kappa_list),
        stability_guard=float(it["stability_guard"]),
    )


def build_initial_data(cfg: dict, grid: Grid) -> Field:
    ini = cfg["initial_data"]
    kind = ini["kind"]
    if kind == "zero":
        return Field.zero(grid)
    if kind == "gaussian":
        q = gaussian_field(grid, float(ini["amplitude"]), float(ini["width"]),
                           float(ini.get("center", 0.0)))
    elif kind == "cosine":
        q = cosine_field(grid, float(ini["amplitude"]), float(ini["width"]),
                         float(ini.get("center", 0.0)))
    elif kind == "soliton":
        q = soliton_field(grid, float(ini["amplitude"]), float(ini.get("center", 0.0)))
    elif kind == "file":
        with open(ini["path"]) as fh:
            data = json.load(fh)
        q = Field(grid, np.asarray(data["samples"], dtype=float))
    else:
        raise ConfigError("initial_data.kind", f"unhandled kind {kind!r}")
    target = ini.get("target_hm1")
    if target is not None:
        norm = sobolev_norm(q, -1.0, 1.0)
        if norm > 0:
            q = q * (float(target) / norm)
    return q


# ---------------------------------------------------------------------------
# output writers
# ---------------------------------------------------------------------------

def _write_csv(path: str, header: list[str], rows: list[list]):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(x) for x in row])


def _write_snapshots(path: str, record):
    with open(path, "w") as fh:
        for t, f in record.snapshots:
            fh.write(json.dumps({"t": float(t), "samples": [float(v) for v in f.values]}))
            fh.write("\n")


def _write_meta(path: str, cfg: dict, grid: Grid):
    meta = {
        "schema_version": SCHEMA_VERSION,
        "study": cfg["study"],
        "seed": cfg["seed"],
        "grid": {"L": grid.L, "N": grid.N, "x0": float(grid.x[0]), "dx": grid.dx},
        "flow": cfg["flow"],
    }
    with open(path, "w") as fh:
        json.dump(meta, fh, indent=1, sort_keys=True)
        fh.write("\n")


def _conserved_rows(reports) -> list[list]:
    rows = []
    for rep in reports:
        for name in ("M", "P", "H_KdV", "H_5th"):
            rows.append([rep.t, name, "", getattr(rep, name)])
        for k, a in rep.alpha_samples:
            rows.append([rep.t, "alpha", k, a])
    return rows


# ---------------------------------------------------------------------------
# studies
# ---------------------------------------------------------------------------

@dataclass
class StudyResult:
    checks: list[tuple[bool, str]] = field(default_factory=list)
    outputs: list[str] = field(default_factory=list)

    def check(self, ok: bool, message: str):
        self.checks.append((bool(ok), message))

    @property
    def passed(self) -> bool:
        return all(ok for ok, _ in self.checks)


def study_evolve(cfg: dict, outdir: str) -> StudyResult:
    res = StudyResult()
    grid = build_grid(cfg)
    q0 = build_initial_data(cfg, grid)
    kappas = cfg["diagnostics"].get("kappa_list", [2.0, 4.0, 8.0])
    record = integrate(q0, build_flow(cfg["flow"]), build_integrator(cfg, kappas))
    if "jsonl" in cfg["output"]["formats"]:
        path = os.path.join(outdir, "snapshots.jsonl")
        _write_snapshots(path, record)
        res.outputs.append(path)
    if "csv" in cfg["output"]["formats"] and record.conserved:
        path = os.path.join(outdir, "conserved.csv")
        _write_csv(path, ["t", "quantity", "kappa", "value"], _conserved_rows(record.conserved))
        res.outputs.append(path)
    _write_meta(os.path.join(outdir, "run_meta.json"), cfg, grid)
    res.outputs.append(os.path.join(outdir, "run_meta.json"))
    res.check(np.all(np.isfinite(record.final.values)), "evolve: final state finite")
    return res


def study_conserve(cfg: dict, outdir: str) -> StudyResult:
    res = StudyResult()
    grid = build_grid(cfg)
    q0 = build_initial_data(cfg, grid)
    dgn = cfg["diagnostics"]
    kappas = dgn.get("kappa_list", [2.0, 4.0, 8.0])
    tol = float(dgn.get("drift_tolerance", 1e-6))
    it = dict(cfg["integrator"])
    if it.get("conserved_sample_stride", 0) <= 0:
        it["conserved_sample_stride"] = max(1, int(round(abs(it["t_end"]) / it["dt"])) // 4)
    cfg2 = dict(cfg)
    cfg2["integrator"] = it
    record = integrate(q0, build_flow(cfg["flow"]), build_integrator(cfg2, kappas))
    base = record.conserved[0].as_dict()
    drift = {}
    for rep in record.conserved[1:]:
        for name, value in rep.as_dict().items():
            ref = abs(base[name]) if abs(base[name]) > 1e-12 else 1.0
            drift[name] = max(drift.get(name, 0.0), abs(value - base[name]) / ref)
    if not drift:  # single sample (e.g. t_end equal to dt)
        drift = {name: 0.0 for name in base}
    if "csv" in cfg["output"]["formats"]:
        path = os.path.join(outdir, "conserved.csv")
        _write_csv(path, ["t", "quantity", "kappa", "value"], _conserved_rows(record.conserved))
        res.outputs.append(path)
        path = os.path.join(outdir, "drift.csv")
        _write_csv(path, ["quantity", "relative_drift"],
                   [[name, drift[name]] for name in sorted(drift)])
        res.outputs.append(path)
    _write_meta(os.path.join(outdir, "run_meta.json"), cfg, grid)
    for name in sorted(drift):
        res.check(drift[name] < tol, f"conserve: {name} drift {drift[name]:.3e} < {tol:g}")
    return res


def study_microscopic(cfg: dict, outdir: str) -> StudyResult:
    res = StudyResult()
    grid = build_grid(cfg)
    q0 = build_initial_data(cfg, grid)
    dgn = cfg["diagnostics"]
    varkappa = float(dgn.get("varkappa", 2.0))
    halvings = int(dgn.get("dt_halvings", 3))
    min_ratio = float(dgn.get("min_ratio", 3.5))
    flow = build_flow(cfg["flow"])
    base = cfg["integrator"]
    T = float(base["t_end"])
    rows = []
    residuals = []
    for level in range(halvings + 1):
        dt = float(base["dt"]) / (2 ** level)
        it = IntegratorConfig(dt=dt, t_end=T, snapshot_stride=int(base["snapshot_stride"]),
                              stability_guard=float(base["stability_guard"]))
        record = integrate(q0, flow, it)
        r = microscopic_residual(record, varkappa, (0.0, T))
        residuals.append(r)
        rows.append([dt, varkappa, r])
    if "csv" in cfg["output"]["formats"]:
        path = os.path.join(outdir, "microscopic.csv")
        _write_csv(path, ["dt", "varkappa", "residual"], rows)
        res.outputs.append(path)
    _write_meta(os.path.join(outdir, "run_meta.json"), cfg, grid)
    for i in range(len(residuals) - 1):
        ratio = residuals[i] / residuals[i + 1] if residuals[i + 1] > 0 else np.inf
        res.check(ratio >= min_ratio,
                  f"microscopic: halving {i + 1} ratio {ratio:.2f} >= {min_ratio}")
    return res


def study_ls(cfg: dict, outdir: str) -> StudyResult:
    res = StudyResult()
    grid = build_grid(cfg)
    q0 = build_initial_data(cfg, grid)
    dgn = cfg["diagnostics"]
    kappas = dgn.get("kappa_list", [2.0, 4.0, 8.0])
    spacing = float(dgn.get("center_spacing", 1.0))
    record = integrate(q0, build_flow(cfg["flow"]), build_integrator(cfg))
    window = dgn.get("window")
    window = tuple(window) if window else None
    half = grid.L / 2.0 - spacing
    centers = np.arange(-half, half + spacing / 2, spacing)
    rows = []
    for kappa in kappas:
        report = ls_norm(record, float(kappa), centers, window)
        for z, v in zip(report.centers, report.values):
            rows.append([z, kappa, v])
        res.check(np.isfinite(report.supremum),
                  f"ls: supremum {report.supremum:.3e} finite at kappa={kappa:g}")
    if "csv" in cfg["output"]["formats"]:
        path = os.path.join(outdir, "ls.csv")
        _write_csv(path, ["z", "kappa", "ls_value"], rows)
        res.outputs.append(path)
    _write_meta(os.path.join(outdir, "run_meta.json"), cfg, grid)
    return res


def study_kappa_convergence(cfg: dict, outdir: str) -> StudyResult:
    res = StudyResult()
    grid = build_grid(cfg)
    q0 = build_initial_data(cfg, grid)
    dgn = cfg["diagnostics"]
    kappas = [float(k) for k in dgn.get("kappa_list", [4.0, 8.0, 16.0])]
    dt_fifth = float(dgn.get("dt_fifth", cfg["integrator"]["dt"]))
    hk = dgn.get("hkappa_dt", 1e-3)
    dt_hk = {float(k): float(v) for k, v in hk.items()} if isinstance(hk, dict) else float(hk)
    spacing = float(dgn.get("snapshot_spacing", 5e-3))
    varkappa = float(dgn.get("varkappa", 2.0))
    rows = kappa_convergence_study(
        q0, kappas, float(cfg["integrator"]["t_end"]), dt_fifth, dt_hk, spacing,
        varkappa=varkappa, green_route=cfg["flow"].get("green_route", "direct"))
    if "csv" in cfg["output"]["formats"]:
        path = os.path.join(outdir, "kappa_convergence.csv")
        _write_csv(path, ["kappa", "sup_distance", "proxy"],
                   [[r.kappa, r.sup_distance_hm1, r.green_pairing_proxy] for r in rows])
        res.outputs.append(path)
    _write_meta(os.path.join(outdir, "run_meta.json"), cfg, grid)
    dists = [r.sup_distance_hm1 for r in rows]
    proxies = [r.green_pairing_proxy for r in rows]
    res.check(all(b < a for a, b in zip(dists, dists[1:])),
              "kappa-convergence: sup distances strictly decreasing "
              + "[" + ", ".join(f"{d:.3e}" for d in dists) + "]")
    res.check(all(b < a for a, b in zip(proxies, proxies[1:])),
              "kappa-convergence: pairing proxy strictly decreasing "
              + "[" + ", ".join(f"{p:.3e}" for p in proxies) + "]")
    return res


def study_identities(cfg: dict, outdir: str) -> StudyResult:
    res = StudyResult()
    grid = build_grid(cfg)
    dgn = cfg["diagnostics"]
    kappas = [float(k) for k in dgn.get("kappa_list", [1.0, 3.0, 10.0, 30.0])]
    num = int(dgn.get("num_fields", 100))
    target = float(dgn.get("target_hm1", 0.05))
    thresholds = dgn.get("thresholds", [1e-10, 1e-8])
    rng = np.random.default_rng(cfg["seed"])
    rows = []
    worst = [0.0, 0.0]
    for i in range(num):
        q = random_field(grid, rng, target)
        for kappa in kappas:
            out = identity_check(q, kappa)
            rows.append([i, kappa, out.linear, out.quadratic])
            worst[0] = max(worst[0], out.linear)
            worst[1] = max(worst[1], out.quadratic)
    if "csv" in cfg["output"]["formats"]:
        path = os.path.join(outdir, "identities.csv")
        _write_csv(path, ["field_index", "kappa", "res_linear", "res_quadratic"], rows)
        res.outputs.append(path)
    _write_meta(os.path.join(outdir, "run_meta.json"), cfg, grid)
    res.check(worst[0] < float(thresholds[0]),
              f"identities: linear residual {worst[0]:.3e} < {thresholds[0]:g}")
    res.check(worst[1] < float(thresholds[1]),
              f"identities: quadratic residual {worst[1]:.3e} < {thresholds[1]:g}")
    return res


def study_diffeo_roundtrip(cfg: dict, outdir: str) -> StudyResult:
    res = StudyResult()
    grid = build_grid(cfg)
    dgn = cfg["diagnostics"]
    kappas = [float(k) for k in dgn.get("kappa_list", [1.0, 4.0])]
    num = int(dgn.get("num_fields", 50))
    target = float(dgn.get("target_hm1", 0.05))
    tol = float(dgn.get("tolerance", 1e-8))
    rng = np.random.default_rng(cfg["seed"])
    rows = []
    worst = 0.0
    for i in range(num):
        q = random_field(grid, rng, target)
        for kappa in kappas:
            w = diffeo_forward(q, kappa)
            back = diffeo_inverse(w, kappa, tol=tol * 1e-2)
            err = sobolev_norm(back - q, -1.0, 1.0)
            rows.append([i, kappa, err])
            worst = max(worst, err)
    if "csv" in cfg["output"]["formats"]:
        path = os.path.join(outdir, "diffeo.csv")
        _write_csv(path, ["field_index", "kappa", "roundtrip_error"], rows)
        res.outputs.append(path)
    _write_meta(os.path.join(outdir, "run_meta.json"), cfg, grid)
    res.check(worst < tol, f"diffeo-roundtrip: worst error {worst:.3e} < {tol:g}")
    return res


def study_alpha_expansion(cfg: dict, outdir: str) -> StudyResult:
    """Remainder of the large-kappa expansion of alpha against P, H_KdV, H_5th."""
    res = StudyResult()
    grid = build_grid(cfg)
    q = build_initial_data(cfg, grid)
    dgn = cfg["diagnostics"]
    kappas = [float(k) for k in dgn.get("kappa_list", [4.0, 5.6, 8.0, 11.0, 16.0, 22.0, 32.0])]
    P = momentum(q)
    HK = energy_kdv(q)
    H5 = energy_fifth(q)
    rows = []
    rem = []
    for kappa in kappas:
        a = alpha_of(q, kappa, route=cfg["flow"].get("green_route", "direct"))
        r = a - P / (4 * kappa ** 3) + HK / (16 * kappa ** 5) - H5 / (64 * kappa ** 7)
        rows.append([kappa, a, abs(r)])
        rem.append(abs(r))
    slope = float(np.polyfit(np.log(kappas), np.log(rem), 1)[0])
    if "csv" in cfg["output"]["formats"]:
        path = os.path.join(outdir, "alpha_expansion.csv")
        _write_csv(path, ["kappa", "alpha", "remainder"], rows)
        res.outputs.append(path)
    _write_meta(os.path.join(outdir, "run_meta.json"), cfg, grid)
    res.check(abs(slope + 9.0) <= 0.5,
              f"alpha-expansion: log-log slope {slope:.3f} within -9 +/- 0.5")
    return res


STUDIES = {
    "evolve": (study_evolve, "integrate a flow, write snapshots and conserved series"),
    "conserve": (study_conserve, "integrate and check relative drift of the invariants"),
    "microscopic": (study_microscopic, "dt-refinement of the density/current residual"),
    "ls": (study_ls, "local-smoothing norm scan over centers and kappas"),
    "kappa-convergence": (study_kappa_convergence,
                          "distance between regularized and full flows vs kappa"),
    "identities": (study_identities, "exact series-term identity residuals on random fields"),
    "diffeo-roundtrip": (study_diffeo_roundtrip, "invert the Green change of variables"),
    "alpha-expansion": (study_alpha_expansion, "large-kappa expansion remainder slope"),
}


# ---------------------------------------------------------------------------
# entry points
# ---------------------------------------------------------------------------

def _error_record(outdir, code: int, stage: str, message: str, field_path: str = ""):
    record = {"code": code, "stage": stage, "message": message}
    if field_path:
        record["field"] = field_path
    sys.stderr.write(json.dumps(record) + "\n")
    if outdir and os.path.isdir(outdir):
        with open(os.path.join(outdir, "error.json"), "w") as fh:
            json.dump(record, fh, indent=1)
            fh.write("\n")


def run(config_path: str) -> int:
    outdir = None
    try:
        cfg = load_config(config_path)
    except ConfigError as exc:
        _error_record(outdir, 1, "validation", exc.detail, exc.field_path)
        return 1
    outdir = os.environ.get(ENV_OUTPUT_DIR) or cfg["output"]["directory"]
    os.makedirs(outdir, exist_ok=True)
    fn, _ = STUDIES[cfg["study"]]
    try:
        result = fn(cfg, outdir)
    except ConfigError as exc:
        _error_record(outdir, 1, "validation", exc.detail, exc.field_path)
        return 1
    except NUMERICAL_ERRORS as exc:
        _error_record(outdir, 2, "numerical", str(exc))
        return 2
    for ok, message in result.checks:
        print(("PASS " if ok else "FAIL ") + message)
    for path in result.outputs:
        print(f"wrote {path}")
    return 0 if result.passed else 3


def validate(config_path: str) -> int:
    try:
        load_config(config_path)
    except ConfigError as exc:
        _error_record(None, 1, "validation", exc.detail, exc.field_path)
        return 1
    print("OK")
    return 0


def list_studies() -> int:
    for name in sorted(STUDIES):
        print(f"{name:20s} {STUDIES[name][1]}")
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="kdv5", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    p_run = sub.add_parser("run", help="execute a study from a config file")
    p_run.add_argument("config")
    p_val = sub.add_parser("validate", help="validate a config file")
    p_val.add_argument("config")
    sub.add_parser("list-studies", help="list available studies")
    args = parser.parse_args(argv)
    if args.command == "run":
        return run(args.config)
    if args.command == "validate":
        return validate(args.config)
    return list_studies()


if __name__ == "__main__":
    sys.exit(main())
