"""Batch front end: ``wgm classify|sweep|modes|convergence --config FILE``.

Config is a JSON object::

    {
      "profile": {"family": "ilchenko", "R": 1.0, "n0": 1.5, "delta": 2.0},
      "p": [1, -1],                    # or "polarizations"
      "m": [20, 30, 40],               # or {"start": 20, "stop": 60, "step": 5}
      "j": [0, 1],
      "engines": ["asym", "modal", "fd"],
      "order": null,                   # asymptotic coefficients, default per case
      "fd": {"N": 4000, "levels": 3, "theta": 0.5, "pml_start": 1.5, "r_max": 3.0},
      "grid": {"r_min": 0.01, "r_max": 2.0, "points": 2001},
      "modes": {"engine": "modal"},
      "convergence": {"oracle": "modal", "terms": [1, 3, 6]}
    }

"profile" may also be a list of profiles (sweeps then loop over them).
Radii in "fd" and "grid" are in units of R.

CSV columns of ``sweep``: profile, m, j, p, k_asym, re_k_modal, im_k_modal,
re_k_fd, im_k_fd, abs_err_re, log10_im_fd, q_factor, wkb_log10_im, error.

Exit codes: 0 success, 2 config error, 3 solver non-convergence,
4 precondition violation.  WGM_LOG sets the log level.
"""

from __future__ import annotations

import csv
import json
import logging
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import click
import numpy as np

from .cavity import classify, effective_potential, profile_from_dict, wkb_action
from .errors import ConfigError, ConvergenceError, InsufficientOracleData, PreconditionError, WGMError

log = logging.getLogger("wgm")

ENGINES = ("asym", "modal", "fd")
EXIT_OK, EXIT_CONFIG, EXIT_SOLVER, EXIT_PRECONDITION = 0, 2, 3, 4
M_LIMITS = (1, 200)


# ---------------------------------------------------------------------------
# config


def _int_list(value, name):
    if isinstance(value, dict):
        try:
            start, stop = int(value["start"]), int(value["stop"])
        except KeyError as exc:
            raise ConfigError(f"field {name!r}: range needs {exc.args[0]!r}") from None
        return list(range(start, stop + 1, int(value.get("step", 1))))
    if isinstance(value, int):
        return [value]
    if not isinstance(value, list) or not all(isinstance(v, int) for v in value):
        raise ConfigError(f"field {name!r}: expected an integer, a list of integers or a range object")
    return list(value)


def load_config(path) -> dict:
    """Read and validate a run config; raises ConfigError with field/line context."""
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    if not isinstance(raw, dict):
        raise ConfigError(f"{path}: top level must be an object")
    if "profile" not in raw:
        raise ConfigError("field 'profile': missing")
    profiles = raw["profile"] if isinstance(raw["profile"], list) else [raw["profile"]]
    for i, p in enumerate(profiles):
        if not isinstance(p, dict) or "family" not in p:
            raise ConfigError(f"field 'profile[{i}]': needs a 'family' entry")
    cfg = {
        "profiles": profiles,
        "p": _int_list(raw.get("p", raw.get("polarizations", [1])), "p"),
        "m": _int_list(raw.get("m", []), "m"),
        "j": _int_list(raw.get("j", [0]), "j"),
        "engines": raw.get("engines", ["asym"]),
        "order": raw.get("order"),
        "fd": dict(raw.get("fd", {})),
        "grid": dict(raw.get("grid", {})),
        "modes": dict(raw.get("modes", {})),
        "convergence": dict(raw.get("convergence", {})),
    }
    if any(p not in (1, -1) for p in cfg["p"]):
        raise ConfigError("field 'p': polarisations must be 1 (TM) or -1 (TE)")
    if any(not M_LIMITS[0] <= m <= M_LIMITS[1] for m in cfg["m"]):
        raise ConfigError(f"field 'm': values must lie in [{M_LIMITS[0]}, {M_LIMITS[1]}]")
    if any(j < 0 for j in cfg["j"]):
        raise ConfigError("field 'j': radial indices must be non-negative")
    if not isinstance(cfg["engines"], list) or any(e not in ENGINES for e in cfg["engines"]):
        raise ConfigError(f"field 'engines': choose from {ENGINES}")
    if "modal" in cfg["engines"] and any(p["family"] != "constant" for p in profiles):
        bad = [p for p in profiles if not (p["family"] == "ilchenko" and p.get("delta", 0) == 0)]
        if bad:
            raise ConfigError("field 'engines': the modal engine needs a constant-index profile")
    return cfg


def _label(pd):
    return ",".join(f"{k}={pd[k]}" for k in sorted(pd) if k not in ("r", "n"))


# ---------------------------------------------------------------------------
# engines, all picklable for the worker pool


def _asym(pd, p, m, j, order):
    from .asymptotics import expansion

    return expansion(profile_from_dict(pd), p, j, order)(m)


def _modal(pd, p, m, j):
    from .modal import find_mode

    prof = profile_from_dict(pd)
    return find_mode(p, prof.n0, prof.R, m, j).k


def _fd(pd, p, m, j, fdcfg, seed):
    from .fdpml import make_grid, refine_extrapolated

    prof = profile_from_dict(pd)
    R = prof.R
    grid = make_grid(R, int(fdcfg.get("N", 4000)), fdcfg.get("r_max", 3.0) * R,
                     fdcfg.get("pml_start", 1.5) * R, float(fdcfg.get("theta", 0.5)))
    return refine_extrapolated(prof, p, m, seed, grid, int(fdcfg.get("levels", 3)), j).resonance.k


def _row_task(args):
    pd, p, m, j, engines, order, fdcfg = args
    row = {"profile": _label(pd), "m": m, "j": j, "p": p}
    errors = []
    k_asym = k_modal = k_fd = None
    try:
        if "asym" in engines or "fd" in engines:
            k_asym = _asym(pd, p, m, j, order)
        if "modal" in engines:
            k_modal = _modal(pd, p, m, j)
        if "fd" in engines:
            k_fd = _fd(pd, p, m, j, fdcfg, k_modal if k_modal is not None else k_asym)
    except WGMError as exc:
        errors.append((type(exc).__name__, str(exc), isinstance(exc, ConvergenceError)))
    oracle = k_modal if k_modal is not None else k_fd
    S0, _ = wkb_action(profile_from_dict(pd).n0)
    row.update({
        "k_asym": k_asym if "asym" in engines else None,
        "re_k_modal": None if k_modal is None else k_modal.real,
        "im_k_modal": None if k_modal is None else k_modal.imag,
        "re_k_fd": None if k_fd is None else k_fd.real,
        "im_k_fd": None if k_fd is None else k_fd.imag,
        "abs_err_re": None if (oracle is None or "asym" not in engines or k_asym is None)
        else abs(k_asym - oracle.real),
        "log10_im_fd": None if k_fd is None or k_fd.imag == 0 else math.log10(abs(k_fd.imag)),
        "q_factor": None if oracle is None or oracle.imag == 0 else oracle.real / abs(oracle.imag),
        "wkb_log10_im": -2 * S0 * m / math.log(10),
        "error": "; ".join(f"{n}: {msg}" for n, msg, _ in errors) or None,
    })
    row["_convergence_failure"] = any(c for *_, c in errors)
    return row


def _map(fn, tasks, jobs):
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(fn, tasks))
    return [fn(t) for t in tasks]


# ---------------------------------------------------------------------------
# output


SWEEP_COLUMNS = ("profile", "m", "j", "p", "k_asym", "re_k_modal", "im_k_modal", "re_k_fd", "im_k_fd",
                 "abs_err_re", "log10_im_fd", "q_factor", "wkb_log10_im", "error")


def _cell(x):
    # repr keeps 17 significant digits, so CSV and JSON round-trip exactly
    if x is None:
        return ""
    if isinstance(x, float):
        return repr(x)
    return str(x)


def _write_csv(path, columns, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(columns)
        for row in rows:
            w.writerow([_cell(row.get(c)) for c in columns])


def _jsonable(x):
    if isinstance(x, complex):
        return {"re": x.real, "im": x.imag}
    if isinstance(x, (np.floating, np.integer)):
        return x.item()
    if isinstance(x, dict):
        return {k: _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, float) and not math.isfinite(x):
        return None
    return x


def _emit(out, name, payload):
    text = json.dumps(_jsonable(payload), indent=2)
    if out is None:
        click.echo(text)
    else:
        (out / f"{name}.json").write_text(text + "\n")


# ---------------------------------------------------------------------------
# commands


def run_classify(cfg, out):
    reports = []
    for pd in cfg["profiles"]:
        prof = profile_from_dict(pd)
        cls = classify(prof)
        g = cfg["grid"]
        r = np.linspace(g.get("r_min", 0.05) * prof.R, g.get("r_max", 2.0) * prof.R, int(g.get("points", 801)))
        W = effective_potential(prof, r)
        rep = {"profile": _label(pd), **cls.to_dict()}
        reports.append(rep)
        if cls.case == "C":
            line = (f"case C, R0={cls.R0:.6g}, mu0={cls.mu0_breve:.6g}, eta3={cls.eta3:.6g}, "
                    f"eta4={cls.eta4:.6g}, W0={cls.W0:.6g}")
        else:
            line = f"case {cls.case}, kappa={cls.kappa_breve:.6g}, mu={cls.mu_breve:.6g}, W0={cls.W0:.6g}"
        click.echo(f"{_label(pd)}: {line}", err=out is None)
        if out is not None:
            _write_csv(out / f"potential_{len(reports) - 1}.csv", ("r", "W"),
                       [{"r": float(a), "W": float(b)} for a, b in zip(r, W)])
    _emit(out, "classify", reports)
    return EXIT_OK


def run_sweep(cfg, out, jobs, keep_going):
    tasks = [(pd, p, m, j, cfg["engines"], cfg["order"], cfg["fd"])
             for pd in cfg["profiles"] for p in cfg["p"] for j in cfg["j"] for m in cfg["m"]]
    rows = _map(_row_task, tasks, jobs)
    rows.sort(key=lambda r: (r["profile"], r["p"], r["j"], r["m"]))
    failed = [r for r in rows if r["error"]]
    clean = [{k: v for k, v in r.items() if not k.startswith("_")} for r in rows]
    if out is not None:
        _write_csv(out / "sweep.csv", SWEEP_COLUMNS, clean)
    _emit(out, "sweep", clean)
    if failed and not keep_going:
        for r in failed:
            log.error("row m=%s j=%s p=%s failed: %s", r["m"], r["j"], r["p"], r["error"])
        return EXIT_SOLVER if any(r["_convergence_failure"] for r in failed) else EXIT_PRECONDITION
    return EXIT_OK


def run_modes(cfg, out):
    from .asymptotics import expansion, quasimode_profile
    from .fdpml import assemble, fd_mode_profile, make_grid, refine_extrapolated, solve_near
    from .modal import find_mode, mode_field, radial_index

    engine = cfg["modes"].get("engine", cfg["engines"][0])
    if engine not in ENGINES:
        raise ConfigError(f"field 'modes.engine': choose from {ENGINES}")
    summary = []
    for pd in cfg["profiles"]:
        prof = profile_from_dict(pd)
        R = prof.R
        g = cfg["grid"]
        r = np.linspace(g.get("r_min", 0.01) * R, g.get("r_max", 1.5) * R, int(g.get("points", 3001)))
        for p in cfg["p"]:
            for j in cfg["j"]:
                for m in cfg["m"]:
                    if engine == "modal":
                        k = find_mode(p, prof.n0, R, m, j).k
                        w = mode_field(p, prof.n0, R, m, k, r)
                        w = w / w[np.argmax(np.abs(w))]
                    elif engine == "asym":
                        k = complex(expansion(prof, p, j, cfg["order"])(m))
                        w = quasimode_profile(prof, m, p, j, r).astype(complex)
                        # the correction's polynomial tail can cross zero far from the well
                        lead = quasimode_profile(prof, m, p, j, r, correction=False)
                    else:
                        fdc = cfg["fd"]
                        grid = make_grid(R, int(fdc.get("N", 4000)), fdc.get("r_max", 3.0) * R,
                                         fdc.get("pml_start", 1.5) * R, float(fdc.get("theta", 0.5)))
                        seed = expansion(prof, p, j, cfg["order"])(m)
                        k = refine_extrapolated(prof, p, m, seed, grid, int(fdc.get("levels", 3)), j).resonance.k
                        _, vec = solve_near(assemble(prof, p, m, grid), k * k, 1)[0]
                        rr, re, _ = fd_mode_profile(vec, grid)
                        w = np.interp(r, rr, re) + 0j
                    inside = r < R
                    try:
                        nodal = radial_index((lead if engine == "asym" else w)[inside])
                    except PreconditionError:
                        nodal = None
                    peak = float(r[np.argmax(np.abs(w.real))])
                    name = f"mode_{engine}_p{p:+d}_m{m}_j{j}"
                    if out is not None:
                        _write_csv(out / f"{name}.csv", ("r", "re_w", "im_w"),
                                   [{"r": float(a), "re_w": float(b.real), "im_w": float(b.imag)} for a, b in zip(r, w)])
                    summary.append({"profile": _label(pd), "engine": engine, "m": m, "j": j, "p": p, "k": k,
                                    "radial_index": nodal, "peak_r": peak})
    _emit(out, "modes", summary)
    return EXIT_OK


def convergence_table(ks_oracle, expansion_, ms, terms):
    """Relative errors per truncation and fitted power-law exponents (positive = decaying)."""
    ms = list(ms)
    if len(ms) < 4:
        raise InsufficientOracleData(f"need at least 4 m values, got {len(ms)}")
    rows, fits = [], {}
    for n in terms:
        errs = [abs(expansion_(m, n) - k.real) / k.real for m, k in zip(ms, ks_oracle)]
        for m, e in zip(ms, errs):
            rows.append({"terms": n, "m": m, "rel_err": e})
        good = [(m, e) for m, e in zip(ms, errs) if e > 0]
        fits[n] = -float(np.polyfit(np.log([m for m, _ in good]), np.log([e for _, e in good]), 1)[0]) \
            if len(good) >= 2 else math.nan
    return rows, fits


def run_convergence(cfg, out, jobs):
    from .asymptotics import expansion

    conv = cfg["convergence"]
    oracle = conv.get("oracle", "modal")
    if oracle not in ("modal", "fd"):
        raise ConfigError("field 'convergence.oracle': choose 'modal' or 'fd'")
    if len(cfg["m"]) < 4:
        raise InsufficientOracleData(f"need at least 4 m values, got {len(cfg['m'])}")
    report = []
    for pd in cfg["profiles"]:
        prof = profile_from_dict(pd)
        for p in cfg["p"]:
            for j in cfg["j"]:
                e = expansion(prof, p, j, cfg["order"])
                terms = [int(t) for t in conv.get("terms", range(1, e.order + 1)) if int(t) <= e.order]
                if oracle == "modal":
                    ks = _map(_modal_args, [(pd, p, m, j) for m in cfg["m"]], jobs)
                else:
                    ks = _map(_fd_args, [(pd, p, m, j, cfg["fd"], e(m)) for m in cfg["m"]], jobs)
                rows, fits = convergence_table(ks, e, cfg["m"], terms)
                label = _label(pd)
                for row in rows:
                    row.update(profile=label, p=p, j=j)
                report.append({"profile": label, "p": p, "j": j, "oracle": oracle, "rows": rows,
                               "exponents": {str(k): v for k, v in fits.items()}})
                for n, s in fits.items():
                    click.echo(f"{label} p={p:+d} j={j} terms={n}: exponent {s:.3f}", err=out is None)
    if out is not None:
        flat = [dict(r) for rep in report for r in rep["rows"]]
        _write_csv(out / "convergence.csv", ("profile", "p", "j", "terms", "m", "rel_err"), flat)
    _emit(out, "convergence", report)
    return EXIT_OK


def _modal_args(a):
    return _modal(*a)


def _fd_args(a):
    return _fd(*a)


# ---------------------------------------------------------------------------
# click plumbing


def _setup_logging():
    level = os.environ.get("WGM_LOG", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING),
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)


def _guarded(fn, *args):
    try:
        return fn(*args)
    except ConfigError as exc:
        click.echo(f"config error: {exc}", err=True)
        return EXIT_CONFIG
    except ConvergenceError as exc:
        click.echo(f"solver did not converge: {exc}", err=True)
        return EXIT_SOLVER
    except PreconditionError as exc:
        click.echo(f"precondition violated: {type(exc).__name__}: {exc}", err=True)
        return EXIT_PRECONDITION


def _common(f):
    f = click.option("--config", "config", required=True, type=click.Path(dir_okay=False),
                     help="JSON run configuration.")(f)
    f = click.option("--jobs", default=1, show_default=True, type=click.IntRange(1), help="Worker processes.")(f)
    f = click.option("--keep-going", is_flag=True, help="Exit 0 even if some rows fail.")(f)
    f = click.option("--out", type=click.Path(file_okay=False), default=None,
                     help="Directory for CSV/JSON output; stdout JSON if omitted.")(f)
    return f


def _prepare(config, out):
    cfg = load_config(config)
    outdir = None
    if out is not None:
        outdir = Path(out)
        outdir.mkdir(parents=True, exist_ok=True)
    return cfg, outdir


@click.group(context_settings={"help_option_names": ["-h", "--help"]})
def cli():
    """Whispering-gallery resonances of radially graded disks."""
    _setup_logging()


@cli.command("classify")
@_common
def classify_cmd(config, jobs, keep_going, out):
    """Well type and effective-potential samples (CSV columns r, W)."""
    sys.exit(_guarded(lambda: run_classify(*_prepare(config, out))))


@cli.command("sweep")
@_common
def sweep_cmd(config, jobs, keep_going, out):
    """One comparison row per (m, j, p) and engine set."""
    sys.exit(_guarded(lambda: run_sweep(*_prepare(config, out), jobs, keep_going)))


@cli.command("modes")
@_common
def modes_cmd(config, jobs, keep_going, out):
    """Radial mode profiles (CSV columns r, re_w, im_w)."""
    sys.exit(_guarded(lambda: run_modes(*_prepare(config, out))))


@cli.command("convergence")
@_common
def convergence_cmd(config, jobs, keep_going, out):
    """Relative error of truncated expansions against an oracle, with fitted exponents."""
    sys.exit(_guarded(lambda: run_convergence(*_prepare(config, out), jobs)))


def main(argv=None):
    try:
        cli.main(args=argv, prog_name="wgm", standalone_mode=True)
    except SystemExit as exc:
        return exc.code
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
