"""Command-line front end: JSON experiment configs in, CSV/JSON series out.

Verbs:
  decaylab run <config.json>     execute one experiment, write its artifact
  decaylab verify <suite>        run a named acceptance bundle, emit JSON
  decaylab list-suites           print the available bundle names

Exit codes: 0 success, 2 validation error, 3 numerical failure (the message
names the failing operation and the achieved tolerance).  Identical configs
produce bitwise-identical output files; every CSV starts with a comment line
carrying the sha256 hash of the canonicalized config.

The environment variable DECAYLAB_THREADS caps sweep concurrency (default:
machine parallelism).
"""

from __future__ import annotations

import argparse
import hashlib
import io
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import agbr, decomposition as dc, finite, spectral, suites, zeno
from .errors import NumericalError, ValidationError

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_NUMERICAL = 3

_KINDS = ("zeno", "survival", "spectral", "agbr", "sweep")


def config_hash(config: dict) -> str:
    canon = json.dumps(config, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canon.encode()).hexdigest()


def _require(cond: bool, message: str) -> None:
    if not cond:
        raise ValidationError(message)


def _known_fields(d: dict, allowed: set[str], where: str) -> None:
    extra = set(d) - allowed
    _require(not extra, f"unknown fields in {where}: {sorted(extra)}")


def _time_grid(spec: dict) -> np.ndarray:
    _known_fields(spec, {"start", "stop", "num", "spacing"}, "times")
    start, stop = float(spec["start"]), float(spec["stop"])
    num = int(spec.get("num", 100))
    spacing = spec.get("spacing", "linear")
    if spacing == "linear":
        return np.linspace(start, stop, num)
    if spacing == "log":
        _require(start > 0, "log spacing needs start > 0")
        return np.geomspace(start, stop, num)
    raise ValidationError(f"unknown spacing {spacing!r}")


def _fmt(x) -> str:
    return f"{x:.17g}"


def _csv_table(header: list[str], rows, hash_: str) -> str:
    buf = io.StringIO()
    buf.write(f"# config_hash={hash_}\r\n")
    buf.write(",".join(header) + "\r\n")
    for row in rows:
        buf.write(",".join(_fmt(v) if isinstance(v, float) else str(v)
                           for v in row) + "\r\n")
    return buf.getvalue()


def _run_zeno(params: dict, hash_: str) -> tuple[str, str]:
    _known_fields(params, {"omega", "n_values", "n_min", "n_max", "matching_m"},
                  "zeno parameters")
    m = int(params.get("matching_m", 0))
    if "n_values" in params:
        ns = [int(n) for n in params["n_values"]]
    else:
        n_min = int(params.get("n_min", 1))
        n_max = int(params.get("n_max", 1024))
        _require(1 <= n_min <= n_max, "need 1 <= n_min <= n_max")
        ns = sorted(set(np.geomspace(n_min, n_max, 200).astype(int)))
    rows = [(float(n), zeno.neutron_survival_closed_form(n, m=m)) for n in ns]
    summary = f"zeno sweep: P({ns[0]}) = {rows[0][1]:.6g}, " \
              f"P({ns[-1]}) = {rows[-1][1]:.6g}"
    return _csv_table(["n_measurements", "survival"], rows, hash_), summary


def _run_survival(params: dict, hash_: str) -> tuple[str, str]:
    _known_fields(params, {"model", "times", "convention"},
                  "survival parameters")
    model = finite.FiniteModel.from_dict(params["model"])
    times = _time_grid(params["times"])
    series = finite.survival_exact(model, times,
                                   params.get("convention", "interaction"))
    coeff = finite.short_time_coefficients(model)
    tau = coeff.tau_gaussian
    summary = (f"survival: dim={model.dim}, tau_G="
               f"{tau:.6g}" if tau else "survival: eigenstate (no decay)")
    body = series.to_csv().split("\r\n", 1)
    return f"# config_hash={hash_}\r\n" + series.to_csv(), summary


def _run_spectral(params: dict, hash_: str) -> tuple[str, str]:
    _known_fields(params, {"model", "task", "times", "route"},
                  "spectral parameters")
    model = spectral.SpectralModel.from_dict(params["model"])
    task = params.get("task", "decompose")
    gamma_rate = spectral.golden_rule_rate(model)
    if task == "pole":
        sol = spectral.pole_solve(model)
        payload = {"gamma": sol.gamma, "delta_e": sol.delta_e,
                   "residue_re": sol.residue_z.real,
                   "residue_im": sol.residue_z.imag,
                   "golden_rule": gamma_rate,
                   "iterations": sol.iterations, "residual": sol.residual}
        rows = [tuple(payload.values())]
        table = _csv_table(list(payload), rows, hash_)
        summary = (f"pole: Gamma={gamma_rate:.6g} gamma={sol.gamma:.6g} "
                   f"dE={sol.delta_e:.6g}")
        return table, summary
    times = _time_grid(params["times"])
    if task == "decompose":
        dec = dc.decompose_amplitude(model, times)
        rows = [(float(t), d.real, d.imag, p.real, p.imag, c.real, c.imag,
                 abs(d), abs(p), abs(c))
                for t, d, p, c in zip(dec.times, dec.direct, dec.pole,
                                      dec.cut)]
        table = _csv_table(
            ["t", "re_direct", "im_direct", "re_pole", "im_pole", "re_cut",
             "im_cut", "abs_direct", "abs_pole", "abs_cut"], rows, hash_)
        summary = (f"decompose: gamma={dec.pole_data.gamma:.6g} "
                   f"dE={dec.pole_data.delta_e:.6g} "
                   f"max_rel_dev={dec.max_rel_deviation:.3g}")
        return table, summary
    if task == "survival":
        series = dc.survival_direct(model, times)
        summary = f"spectral survival: Gamma={gamma_rate:.6g}"
        return f"# config_hash={hash_}\r\n" + series.to_csv(), summary
    if task == "tail":
        route = params.get("route", "laplace")
        gamma = spectral.pole_solve(model).gamma
        start = dc.tail_window_start(model, gamma)
        _require(times.min() > 0, "tail task needs strictly positive times")
        cut = dc.branch_cut_amplitude(model, times, route=route)
        fit = dc.fit_tail_exponent(cut, expected=1 + model.delta,
                                   window_start=min(start, times[-1] / 2))
        rows = [(float(t), a.real, a.imag, abs(a))
                for t, a in zip(times, cut.amplitudes)]
        table = _csv_table(["t", "re_cut", "im_cut", "abs_cut"], rows, hash_)
        summary = (f"tail: exponent={fit.exponent:.4f} "
                   f"expected={fit.expected:.4f} r2={fit.r_squared:.6f}")
        return table, summary
    raise ValidationError(f"unknown spectral task {task!r}")


def _run_agbr(params: dict, hash_: str) -> tuple[str, str]:
    _known_fields(params, {"config", "task", "times", "width"},
                  "agbr parameters")
    cfg = agbr.AgBrConfig.from_dict(params["config"])
    task = params.get("task", "delta")
    if task == "statistics":
        stats = agbr.final_state(cfg)
        payload = {"q": cfg.q, "n_bar": cfg.n_bar,
                   "visibility": stats.visibility,
                   "mean_energy": stats.mean_energy,
                   "energy_fluctuation": stats.energy_fluctuation}
        table = _csv_table(list(payload), [tuple(payload.values())], hash_)
        return table, (f"agbr statistics: n_bar={cfg.n_bar:.6g} "
                       f"visibility={stats.visibility:.6g}")
    times = _time_grid(params["times"])
    if task == "delta":
        prop = [agbr.exact_propagator_delta(cfg, t) for t in times]
    elif task == "wavepacket":
        prop = [agbr.wavepacket_propagator(cfg, t) for t in times]
    elif task == "square":
        width = float(params.get("width", cfg.spacing / 4))
        prop = [agbr.square_potential_propagator(cfg, width, t)
                for t in times]
    else:
        raise ValidationError(f"unknown agbr task {task!r}")
    rows = [(float(t), g.real, g.imag, abs(g), agbr.regime_label(cfg, t))
            for t, g in zip(times, prop)]
    table = _csv_table(["t", "re_G", "im_G", "abs_G", "regime_label"],
                       rows, hash_)
    return table, f"agbr {task}: n_bar={cfg.n_bar:.6g} N={cfg.n_spins}"


def _set_by_path(d: dict, path: str, value) -> None:
    keys = path.split(".")
    node = d
    for k in keys[:-1]:
        _require(isinstance(node, dict) and k in node,
                 f"sweep path {path!r} not found")
        node = node[k]
    _require(isinstance(node, dict) and keys[-1] in node,
             f"sweep path {path!r} not found")
    node[keys[-1]] = value


def _run_sweep(params: dict, hash_: str) -> tuple[str, str]:
    _known_fields(params, {"kind", "parameters", "sweep_path", "values"},
                  "sweep parameters")
    kind = params["kind"]
    _require(kind in ("zeno", "survival", "spectral", "agbr"),
             "sweep kind must be a non-sweep kind")
    values = params["values"]
    _require(isinstance(values, list) and values, "sweep needs values")

    def one(value):
        inner = json.loads(json.dumps(params["parameters"]))
        _set_by_path(inner, params["sweep_path"], value)
        _, summary = _RUNNERS[kind](inner, hash_)
        return summary

    max_workers = int(os.environ.get("DECAYLAB_THREADS",
                                     os.cpu_count() or 1))
    _require(max_workers >= 1, "DECAYLAB_THREADS must be >= 1")
    with ThreadPoolExecutor(max_workers=max_workers) as pool:
        summaries = list(pool.map(one, values))
    rows = [(float(v), s) for v, s in zip(values, summaries)]
    buf = io.StringIO()
    buf.write(f"# config_hash={hash_}\r\n")
    buf.write("value,summary\r\n")
    for v, s in rows:
        escaped = '"' + s.replace('"', '""') + '"'
        buf.write(f"{_fmt(v)},{escaped}\r\n")
    return buf.getvalue(), f"sweep over {params['sweep_path']}: " \
                           f"{len(values)} points"


_RUNNERS = {
    "zeno": _run_zeno,
    "survival": _run_survival,
    "spectral": _run_spectral,
    "agbr": _run_agbr,
    "sweep": _run_sweep,
}


def run_config(config: dict) -> tuple[str, str, str]:
    """Validate and execute a config; returns (artifact, out_path, summary)."""
    _require(isinstance(config, dict), "config must be a JSON object")
    _known_fields(config, {"kind", "parameters", "output", "seed"}, "config")
    kind = config.get("kind")
    _require(kind in _KINDS, f"kind must be one of {_KINDS}")
    params = config.get("parameters")
    _require(isinstance(params, dict), "parameters must be an object")
    output = config.get("output", {})
    _known_fields(output, {"path", "format"}, "output")
    out_path = output.get("path")
    out_format = output.get("format", "csv")
    _require(out_format in ("csv", "json"), "format must be csv or json")
    if "seed" in config:
        _require(isinstance(config["seed"], int),
                 "seed must be an integer (reserved; computations are "
                 "deterministic)")
    h = config_hash(config)
    artifact, summary = _RUNNERS[kind](params, h)
    if out_format == "json":
        lines = artifact.split("\r\n")
        header = lines[1].split(",")
        rows = [ln.split(",") for ln in lines[2:] if ln]
        artifact = json.dumps({"config_hash": h, "columns": header,
                               "rows": rows}, indent=1)
    return artifact, out_path, summary


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="decaylab",
        description="survival-probability laboratory: Zeno curves, "
                    "pole/branch-cut decompositions, spin-array propagators")
    sub = parser.add_subparsers(dest="verb", required=True)
    p_run = sub.add_parser("run", help="execute an experiment config")
    p_run.add_argument("config", help="path to a JSON experiment config")
    p_ver = sub.add_parser("verify", help="run a named acceptance bundle")
    p_ver.add_argument("suite", help="bundle name (see list-suites)")
    p_ver.add_argument("--output", help="write the JSON report here",
                       default=None)
    sub.add_parser("list-suites", help="print available bundle names")
    args = parser.parse_args(argv)

    if args.verb == "list-suites":
        for name in suites.list_suites():
            print(name)
        return EXIT_OK

    if args.verb == "verify":
        try:
            report = suites.run_suite(args.suite)
        except KeyError:
            print(f"unknown suite {args.suite!r}; available: "
                  f"{', '.join(suites.list_suites())}", file=sys.stderr)
            return EXIT_VALIDATION
        except NumericalError as exc:
            print(f"numerical failure in suite {args.suite}: {exc}",
                  file=sys.stderr)
            return EXIT_NUMERICAL
        text = json.dumps(report, indent=1, default=_json_default)
        if args.output:
            with open(args.output, "w") as fh:
                fh.write(text + "\n")
        print(text)
        return EXIT_OK

    # run
    try:
        with open(args.config) as fh:
            raw = fh.read()
        try:
            config = json.loads(raw)
        except json.JSONDecodeError as exc:
            print(f"malformed JSON at line {exc.lineno}, column {exc.colno}: "
                  f"{exc.msg}", file=sys.stderr)
            return EXIT_VALIDATION
        artifact, out_path, summary = run_config(config)
    except (ValidationError, FileNotFoundError, KeyError, TypeError) as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    if out_path:
        with open(out_path, "w", newline="") as fh:
            fh.write(artifact)
    else:
        sys.stdout.write(artifact)
    print(summary)
    return EXIT_OK


def _json_default(obj):
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"not JSON serializable: {type(obj)}")


if __name__ == "__main__":
    sys.exit(main())
