"""Batch front end: ``floquet-lab <config> [--output DIR] [--format csv|json] [--threads N] [--seed N]``.

Every run writes its tables plus a metadata record (resolved configuration,
library version, truncation diagnostics, flags) into the output directory.
CSV runs write one ``<table>.csv`` per table and ``meta.json``; JSON runs
write a single ``results.json`` holding ``{"meta": ..., "tables": ...}``.
Failures write ``error.json`` and return a nonzero exit status.
"""

import argparse
import json
import math
import os
import sys
import traceback
from pathlib import Path

import numpy as np
from threadpoolctl import threadpool_limits

from . import __version__
from .analytic import (
    E2Element,
    e2_compose,
    e2_power,
    e2_representation,
    linear_echo_closed_form,
    linear_propagator_closed_form,
    linear_rotor_element,
    linear_wigner_closed_form,
)
from .classical import ensemble_second_moment
from .config import ConfigError, parse_config
from .diagnostics import (
    autocorr_series,
    energy_growth,
    loschmidt_echo_direct,
    loschmidt_echo_floquet,
    otoc_series,
    sff_series,
    wigner,
)
from .floquet import (
    ModelParams,
    band_margin,
    bessel_band_margin,
    build_floquet,
    grid_size,
    propagate,
    sample_kick_profile,
)
from .hilbert import BasisSpec, momentum_eigenstate
from .spectral import diagonalize

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_ERROR = 2
ORACLE_TOL = 1e-8


class Table:
    """Named columns of equal length; ``j``-indexed series put ``j`` first."""

    def __init__(self, name, columns, method=None, flags=()):
        self.name = name
        self.columns = {k: list(v) for k, v in columns.items()}
        self.method = method
        self.flags = tuple(flags)

    def rows(self):
        return zip(*self.columns.values())

    def as_json(self):
        out = {"columns": self.columns, "flags": list(self.flags)}
        if self.method:
            out["method"] = self.method
        return out


def _cell(value):
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return "%.17g" % value
    return str(value)


def _jsonable(value):
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return [_jsonable(v) for v in value.tolist()]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        v = float(value)
        return v if math.isfinite(v) else repr(v)
    return value


def _dump_json(obj):
    return json.dumps(_jsonable(obj), sort_keys=True, indent=2) + "\n"


# -- model set-up -------------------------------------------------------------------


def _model(values, basis):
    kind = values["kind"]
    if kind == "generic":
        k = values["k_kick"]
        cos_c = values.get("kick_cos", [])
        sin_c = values.get("kick_sin", [])

        def v(theta):
            out = np.zeros_like(theta)
            for q, c in enumerate(cos_c, start=1):
                out += c * np.cos(q * theta)
            for q, c in enumerate(sin_c, start=1):
                out += c * np.sin(q * theta)
            return k * out

        profile = sample_kick_profile(v, grid_size(basis))
        return ModelParams("generic", k, values["tau_free"], kick_profile=profile,
                           phase_sign=values["phase_sign"])
    return ModelParams(kind, values["k_kick"], values.get("tau_free"), values.get("phi_free"),
                       phase_sign=values["phase_sign"])


def _truncation(U):
    dev = U.column_norm_deviation()
    return {
        "cutoff": U.basis.cutoff,
        "dim": U.basis.dim,
        "band_margin": U.band_margin,
        "interior_columns": int(U.interior_columns().sum()),
        "interior_unitarity_error": U.interior_unitarity_error(),
        "max_column_norm_deviation": float(dev.max()),
    }


def _eigen_meta(es):
    return {
        "residual": es.residual,
        "orthonormality_error": es.orthonormality_error,
        "edge_deviation": es.edge_deviation,
    }


def _series_table(name, series, column):
    vals = series.values
    if np.iscomplexobj(vals):
        cols = {"j": series.times, f"{column}_re": vals.real, f"{column}_im": vals.imag}
    else:
        cols = {"j": series.times, column: vals}
    return Table(name, cols, series.method, series.flags)


# -- tasks --------------------------------------------------------------------------


def _task_spectrum(values, params, basis, meta):
    U = build_floquet(params, basis)
    es = diagonalize(U)
    meta["truncation"] = _truncation(U) | _eigen_meta(es)
    cols = {
        "index": np.arange(es.dim),
        "mu_re": es.eigenvalues.real,
        "mu_im": es.eigenvalues.imag,
        "quasi_energy": es.quasi_energies,
    }
    return [Table("spectrum", cols, "eigensystem")]


def _task_echo(values, params, basis, meta):
    psi0 = momentum_eigenstate(basis, values["initial_n"])
    dk = values["delta_k"]
    U = build_floquet(params, basis)
    meta["truncation"] = _truncation(U)
    tables = []
    method = values["method"]
    if method in ("direct", "both"):
        s = loschmidt_echo_direct(params, dk, psi0, values["j_max"])
        tables.append(_series_table("echo_direct" if method == "both" else "echo", s, "L"))
    if method in ("eigensystem", "both"):
        es = diagonalize(U)
        es_p = diagonalize(build_floquet(params.with_kick(params.k_kick + dk), basis))
        meta["truncation"] |= _eigen_meta(es)
        s = loschmidt_echo_floquet(es, es_p, psi0, values["j_max"])
        tables.append(_series_table("echo_eigensystem" if method == "both" else "echo", s, "L"))
    if method == "both":
        a, b = (np.asarray(t.columns["L"]) for t in tables)
        n = min(a.size, b.size)
        meta["route_max_deviation"] = float(np.abs(a[:n] - b[:n]).max())
    return tables


def _wigner_tables(grid, meta, name="wigner"):
    th, p = np.meshgrid(grid.theta, grid.p_labels, indexing="ij")
    cols = {"theta": th.ravel(), "p_l": p.ravel(), "W": grid.values.ravel()}
    sidecar = {
        "j": grid.j,
        "n_theta": int(grid.theta.size),
        "theta_start": 0.0,
        "theta_step": 2 * math.pi / grid.theta.size,
        "p_min": int(grid.p_labels[0]),
        "p_max": int(grid.p_labels[-1]),
        "imag_residue": grid.imag_residue,
        "layout": "long form, theta outer, p_l inner",
    }
    meta[name + "_grid"] = sidecar
    return Table(name, cols)


def _task_wigner(values, params, basis, meta):
    U = build_floquet(params, basis)
    meta["truncation"] = _truncation(U)
    psi = propagate(U, momentum_eigenstate(basis, values["initial_n"]), values["wigner_j"])
    meta["truncation"]["final_edge_weight"] = psi.edge_weight(U.band_margin)
    return [_wigner_tables(wigner(psi, values["n_theta"], values["wigner_j"]), meta)]


def _eigensystem(params, basis, meta):
    U = build_floquet(params, basis)
    es = diagonalize(U)
    meta["truncation"] = _truncation(U) | _eigen_meta(es)
    return es


def _task_otoc(values, params, basis, meta):
    es = _eigensystem(params, basis, meta)
    s = otoc_series(es, momentum_eigenstate(basis, values["initial_n"]), values["j_max"])
    return [_series_table("otoc", s, "C")]


def _task_autocorr(values, params, basis, meta):
    es = _eigensystem(params, basis, meta)
    return [_series_table("autocorr", autocorr_series(es, values["j_max"]), "A")]


def _task_sff(values, params, basis, meta):
    es = _eigensystem(params, basis, meta)
    return [_series_table("sff", sff_series(es, values["j_max"]), "S")]


def _classical_table(values, name):
    hbar = values["hbar_eff"]
    # P = hbar n, so the classical kick is K = k hbar and the period T = tau / hbar
    s = ensemble_second_moment(values["k_kick"] * hbar, values["tau_free"] / hbar,
                               values["n_points"], values["seed"], values["j_max"])
    return _series_table(name, s, "P2")


def _task_localization(values, params, basis, meta):
    psi0 = momentum_eigenstate(basis, values["initial_n"])
    s = energy_growth(params, psi0, values["j_max"])
    meta["truncation"] = {"cutoff": basis.cutoff, "dim": basis.dim, "band_margin": band_margin(params),
                          "kicks_completed": int(s.times[-1])}
    tables = [_series_table("localization_quantum", s, "P2")]
    if values["classical"]:
        if values["kind"] != "standard":
            raise ValueError("the classical ensemble models the standard (cosine) kick only")
        tables.append(_classical_table(values, "localization_classical"))
    return tables


def _task_classical(values, params, basis, meta):
    if values["kind"] != "standard":
        raise ValueError("the classical ensemble models the standard (cosine) kick only")
    return [_classical_table(values, "classical")]


def oracle_checks(params, basis, j_max, delta_k, n_init, n_theta, tol=ORACLE_TOL):
    """Closed-form versus numeric comparisons for the linear rotor.

    Returns rows ``(check, max_deviation, tolerance, passed)``. Matrix
    comparisons use the interior block ``|n| <= cutoff - 2 * margin`` where
    ``margin`` is the Bessel band margin at the largest effective kick.
    """
    half = abs(math.sin(params.phi_free / 2.0))
    k_eff = params.k_kick / half if half > 1e-12 else params.k_kick * max(j_max, 1)
    margin = bessel_band_margin(k_eff)
    inner = np.abs(basis.labels) <= basis.cutoff - 2 * margin
    if not inner.any():
        raise ValueError(f"cutoff {basis.cutoff} leaves no interior block (margin {margin}); enlarge it")
    rows = []

    U = build_floquet(params, basis)
    power = np.eye(basis.dim, dtype=complex)
    dev = 0.0
    for j in range(1, j_max + 1):
        power = U.entries @ power
        closed = linear_propagator_closed_form(params, j, basis).entries
        dev = max(dev, float(np.abs((closed - power)[np.ix_(inner, inner)]).max()))
    rows.append(("propagator", dev))

    psi0 = momentum_eigenstate(basis, n_init)
    numeric = loschmidt_echo_direct(params, delta_k, psi0, j_max)
    closed = [linear_echo_closed_form(delta_k, params.phi_free, j) for j in numeric.times]
    rows.append(("echo", float(np.abs(numeric.values - closed).max())))
    if numeric.flags:
        rows.append(("echo_kicks_completed", float(j_max - numeric.times[-1])))

    labels = basis.labels[inner]
    dev = 0.0
    for j in range(0, min(j_max, 10) + 1):
        psi = propagate(U, psi0, j)
        grid = wigner(psi, n_theta, j)
        for p in labels:
            ref = linear_wigner_closed_form(n_init, params, j, grid.theta, int(p), basis)
            dev = max(dev, float(np.abs(grid.values[:, basis.index(p)] - ref).max()))
    rows.append(("wigner", dev))

    g = linear_rotor_element(params)
    dev = 0.0
    acc = E2Element()
    for j in range(1, j_max + 1):
        acc = e2_compose(g, acc)
        ref = e2_power(g, j)
        dev = max(dev, float(np.abs(acc.homogeneous() - ref.homogeneous()).max()))
    rows.append(("e2_power", dev))

    g2 = e2_power(g, 2)
    rep = e2_representation(g, basis) @ e2_representation(g2, basis)
    direct = e2_representation(e2_compose(g, g2), basis)
    rows.append(("representation", float(np.abs((rep - direct)[np.ix_(inner, inner)]).max())))

    out = []
    for name, dev in rows:
        limit = 0.0 if name == "echo_kicks_completed" else tol
        out.append((name, dev, limit, bool(dev <= limit)))
    return out


def _task_oracle(values, params, basis, meta):
    rows = oracle_checks(params, basis, values["j_max"], values["delta_k"], values["initial_n"],
                         values["n_theta"])
    meta["all_passed"] = all(r[3] for r in rows)
    cols = {k: [r[i] for r in rows] for i, k in enumerate(("check", "max_deviation", "tolerance", "passed"))}
    return [Table("oracle_report", cols, "closed-form")]


TASKS = {
    "spectrum": _task_spectrum,
    "echo": _task_echo,
    "wigner": _task_wigner,
    "otoc": _task_otoc,
    "autocorr": _task_autocorr,
    "sff": _task_sff,
    "localization": _task_localization,
    "classical": _task_classical,
    "oracle-check": _task_oracle,
}


# -- output -------------------------------------------------------------------------


def _write_csv(table, path):
    with open(path, "w", newline="\n", encoding="utf-8") as fh:
        fh.write(",".join(table.columns) + "\n")
        for row in table.rows():
            fh.write(",".join(_cell(v) for v in row) + "\n")


def _write_outputs(tables, meta, out_dir, fmt):
    out_dir.mkdir(parents=True, exist_ok=True)
    meta["flags"] = sorted({f for t in tables for f in t.flags})
    meta["tables"] = {t.name: {"method": t.method, "flags": list(t.flags), "rows": len(t.columns["j"])
                               if "j" in t.columns else len(next(iter(t.columns.values())))}
                      for t in tables}
    written = []
    if fmt == "json":
        body = {"meta": meta, "tables": {t.name: t.as_json() for t in tables}}
        (out_dir / "results.json").write_text(_dump_json(body), encoding="utf-8")
        return ["results.json"]
    for t in tables:
        _write_csv(t, out_dir / f"{t.name}.csv")
        written.append(f"{t.name}.csv")
        if f"{t.name}_grid" in meta:
            (out_dir / f"{t.name}_grid.json").write_text(_dump_json(meta[f"{t.name}_grid"]), encoding="utf-8")
            written.append(f"{t.name}_grid.json")
    (out_dir / "meta.json").write_text(_dump_json(meta), encoding="utf-8")
    return written + ["meta.json"]


def _write_error(out_dir, exc, task=None):
    record = {
        "error": type(exc).__name__,
        "message": str(exc),
        "task": task,
        "version": __version__,
    }
    if isinstance(exc, ConfigError):
        record["key"] = exc.key
        record["line"] = exc.line
    else:
        record["traceback"] = traceback.format_exception_only(type(exc), exc)
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "error.json").write_text(_dump_json(record), encoding="utf-8")


def run(config, output_dir=None, fmt=None, seed=None):
    """Execute one configured task; returns the process exit status.

    ``output_dir``, ``fmt`` and ``seed`` override the configuration values.
    Oracle checks that exceed tolerance still write their report but return
    a nonzero status.
    """
    values = dict(config.values)
    if fmt is not None:
        values["format"] = fmt
    if seed is not None:
        values["seed"] = int(seed)
    out_dir = Path(output_dir if output_dir is not None else values["output"])
    values["output"] = str(out_dir)
    # the output location does not affect results, so it stays out of the metadata
    echoed = {sec: {k: values[k] for k in keys if k != "output"} for sec, keys in config.resolved().items()}
    meta = {
        "config": echoed,
        "version": __version__,
        "task": values["task"],
    }
    try:
        basis = BasisSpec(values["cutoff"], values["hbar_eff"])
        params = _model(values, basis)
        tables = TASKS[values["task"]](values, params, basis, meta)
        _write_outputs(tables, meta, out_dir, values["format"])
    except Exception as exc:  # every failure becomes a machine-readable record
        _write_error(out_dir, exc, values["task"])
        return EXIT_ERROR
    if meta.get("all_passed") is False:
        return EXIT_CHECK_FAILED
    return EXIT_OK


def _threads(arg):
    if arg is not None:
        return arg
    env = os.environ.get("FLOQUET_LAB_THREADS")
    return int(env) if env else None


def main(argv=None):
    ap = argparse.ArgumentParser(prog="floquet-lab", description="Kicked-rotor Floquet computations.")
    ap.add_argument("config", help="path to a key = value configuration file")
    ap.add_argument("--output", help="output directory (overrides the config)")
    ap.add_argument("--format", choices=("csv", "json"), help="output format (overrides the config)")
    ap.add_argument("--threads", type=int, help="BLAS thread count (default: $FLOQUET_LAB_THREADS)")
    ap.add_argument("--seed", type=int, help="random seed for ensembles (overrides the config)")
    args = ap.parse_args(argv)

    try:
        text = Path(args.config).read_text(encoding="utf-8")
        config = parse_config(text)
    except (OSError, ConfigError) as exc:
        _write_error(Path(args.output or "floquet_out"), exc)
        print(f"floquet-lab: {exc}", file=sys.stderr)
        return EXIT_ERROR

    threads = _threads(args.threads)
    if threads is not None:
        with threadpool_limits(limits=threads):
            status = run(config, args.output, args.format, args.seed)
    else:
        status = run(config, args.output, args.format, args.seed)
    if status == EXIT_ERROR:
        out = Path(args.output or config["output"])
        err = json.loads((out / "error.json").read_text(encoding="utf-8"))
        print(f"floquet-lab: {err['error']}: {err['message']}", file=sys.stderr)
    return status


if __name__ == "__main__":
    sys.exit(main())
