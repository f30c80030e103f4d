"""Batch front-end: config-driven experiments emitting CSV plus manifest.

Each invocation reads one JSON config, runs one experiment, and writes a
result table next to a ``.manifest.txt`` sidecar that echoes the full
config, the mesh, the package version, the seed, and the wall time; a
result file is reproducible from its manifest alone.  Unknown config
keys are rejected, since a silently ignored typo would invalidate an
experiment.

Exit status separates outcomes from failures: 0 means the verdict holds
or the solve succeeded, 2 means a clean negative outcome (inequality
fails, no eigenvalue in the window, residual above threshold), and 1
means the run itself could not proceed (parse error, violated
precondition).

Commands and their CSV columns:

* verify-hardy: nu,c,kappa,mu1,holds (one row per channel)
* estimate-c:   nu,value,capped,bracket_lo,bracket_hi,channels
* solve-eigen:  nu,kappa,k,N,E,E_oracle,rel_err,gamma_lo,gamma_hi,mu_at_root,flag
* resolvent-check: gamma,count,max_rel_residual,ok
* domain-diagnostics: cutoff,truncated_r_inv,interval_slope
  (scalar indicators go to the manifest)
* sweep: axis-dependent; see _run_sweep

Sweep points are independent and may run concurrently; the worker count
is capped by the DIRAC_HARDY_THREADS environment variable.  Rows are
always emitted in axis order and floats are formatted by shortest
round-trip repr, so identical config and seed give bit-identical CSV
regardless of thread count.
"""

import argparse
import json
import math
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__
from .errors import (ConfigError, DiracHardyError, NoEigenvalueError,
                     PreconditionError, SingularResolventError)
from .extension import apply_hamiltonian, domain_diagnostics, solve_resolvent
from .forms import (DEFAULT_CHANNELS, DEFAULT_VERDICT_TOL, assemble_form,
                    estimate_hardy_constant, lowest_eigenvalues, verify_hardy)
from .grids import (DEFAULT_N, DEFAULT_R_MAX, DEFAULT_R_MIN, DEFAULT_SCHEME,
                    build_grid)
from .potentials import make_bounded_perturbed_coulomb, make_coulomb
from .spectrum import (DEFAULT_TOL_GAMMA, DEFAULT_TOL_MU, dirac_coulomb_energy,
                       find_eigenvalue)

COMMANDS = ("verify-hardy", "estimate-c", "solve-eigen", "resolvent-check",
            "domain-diagnostics", "sweep")

_COMMON_KEYS = {"command", "potential", "grid", "tolerances", "output_path"}
_KEYS_BY_COMMAND = {
    "verify-hardy": _COMMON_KEYS | {"channels", "c"},
    "estimate-c": _COMMON_KEYS | {"channels"},
    "solve-eigen": _COMMON_KEYS | {"kappa", "k", "window"},
    "resolvent-check": _COMMON_KEYS | {"kappa", "gamma", "seed", "count"},
    "domain-diagnostics": _COMMON_KEYS | {"kappa", "k", "gamma", "cutoffs"},
    "sweep": _COMMON_KEYS | {"sweep", "kappa", "k", "channels"},
}
_TOLERANCE_KEYS = {"tol_gamma", "tol_mu", "verdict_tol", "estimate_tol"}
_SWEEP_AXES = ("N", "nu", "gamma", "c")


def _reject_unknown(mapping: dict, allowed: set, context: str) -> None:
    unknown = sorted(set(mapping) - allowed)
    if unknown:
        raise ConfigError(f"unknown {context} key(s): {', '.join(unknown)}")


def _expect(config: dict, key: str, kind, context: str):
    if key not in config:
        raise ConfigError(f"missing required {context} key: {key}")
    value = config[key]
    if kind is float and isinstance(value, (int, float)) and not isinstance(value, bool):
        return float(value)
    if kind is int and isinstance(value, int) and not isinstance(value, bool):
        return int(value)
    if isinstance(value, kind) and not isinstance(value, bool):
        return value
    raise ConfigError(f"{context} key {key} has wrong type: expected "
                      f"{getattr(kind, '__name__', kind)}, got {value!r}")


def _parse_potential(obj) -> tuple:
    if not isinstance(obj, dict):
        raise ConfigError("potential must be an object")
    kind = _expect(obj, "type", str, "potential")
    if kind == "coulomb":
        _reject_unknown(obj, {"type", "nu"}, "potential")
        return make_coulomb(_expect(obj, "nu", float, "potential"))
    if kind == "perturbed-coulomb":
        _reject_unknown(obj, {"type", "nu", "c1", "gamma_cap"}, "potential")
        return make_bounded_perturbed_coulomb(
            _expect(obj, "nu", float, "potential"),
            _expect(obj, "c1", float, "potential"),
            _expect(obj, "gamma_cap", float, "potential"))
    raise ConfigError(f"potential type must be coulomb or perturbed-coulomb, got {kind!r}")


def _parse_grid(obj):
    if obj is None:
        obj = {}
    if not isinstance(obj, dict):
        raise ConfigError("grid must be an object")
    _reject_unknown(obj, {"r_min", "r_max", "N", "scheme"}, "grid")
    r_min = float(obj.get("r_min", DEFAULT_R_MIN))
    r_max = float(obj.get("r_max", DEFAULT_R_MAX))
    n = obj.get("N", DEFAULT_N)
    if not isinstance(n, int) or isinstance(n, bool):
        raise ConfigError(f"grid key N must be an integer, got {n!r}")
    scheme = obj.get("scheme", DEFAULT_SCHEME)
    return build_grid(r_min, r_max, n, scheme)


def _parse_tolerances(obj) -> dict:
    if obj is None:
        obj = {}
    if not isinstance(obj, dict):
        raise ConfigError("tolerances must be an object")
    _reject_unknown(obj, _TOLERANCE_KEYS, "tolerances")
    out = {"tol_gamma": DEFAULT_TOL_GAMMA, "tol_mu": DEFAULT_TOL_MU,
           "verdict_tol": DEFAULT_VERDICT_TOL, "estimate_tol": 1e-4}
    for key, value in obj.items():
        if not isinstance(value, (int, float)) or isinstance(value, bool):
            raise ConfigError(f"tolerances key {key} must be a number, got {value!r}")
        out[key] = float(value)
    return out


def _parse_channels(config: dict) -> tuple:
    channels = config.get("channels", list(DEFAULT_CHANNELS))
    if (not isinstance(channels, list) or not channels
            or not all(isinstance(ch, int) and not isinstance(ch, bool) and ch != 0
                       for ch in channels)):
        raise ConfigError("channels must be a nonempty list of nonzero integers")
    return tuple(channels)


def _load_config(path: str, command: str) -> dict:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    try:
        config = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from exc
    if not isinstance(config, dict):
        raise ConfigError("config root must be a JSON object")
    if "command" in config and config["command"] != command:
        raise ConfigError(f"config key command = {config['command']!r} does not "
                          f"match the invoked command {command!r}")
    _reject_unknown(config, _KEYS_BY_COMMAND[command], "config")
    if "potential" not in config:
        raise ConfigError("missing required config key: potential")
    return config


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _write_csv(path: Path, header: list, rows: list) -> None:
    lines = [",".join(header)]
    lines.extend(",".join(_fmt(cell) for cell in row) for row in rows)
    path.write_text("\n".join(lines) + "\n")


def _write_manifest(path: Path, command: str, config: dict, grid, wall: float,
                    n_rows: int, outcome: str, extra: dict) -> None:
    lines = [
        f"command: {command}",
        f"version: {__version__}",
        f"outcome: {outcome}",
        f"rows: {n_rows}",
        f"wall_time_s: {wall:.3f}",
        f"grid: {grid.metadata()}",
        f"seed: {config.get('seed', '')}",
    ]
    for key in sorted(extra):
        lines.append(f"{key}: {_fmt(extra[key])}")
    lines.append("config:")
    lines.extend("  " + ln for ln in
                 json.dumps(config, indent=2, sort_keys=True).splitlines())
    path.write_text("\n".join(lines) + "\n")


def _thread_count() -> int:
    raw = os.environ.get("DIRAC_HARDY_THREADS")
    if raw is None:
        return min(8, os.cpu_count() or 1)
    try:
        count = int(raw)
    except ValueError as exc:
        raise ConfigError(f"DIRAC_HARDY_THREADS must be an integer, got {raw!r}") from exc
    if count < 1:
        raise ConfigError(f"DIRAC_HARDY_THREADS must be positive, got {count}")
    return count


def _oracle_columns(potential, kappa: int, k: int, energy) -> tuple:
    if potential.params.get("type") != "coulomb" or energy is None:
        return None, None
    exact = dirac_coulomb_energy(potential.nu, kappa, k)
    return exact, abs(energy - exact) / abs(exact)


def _run_verify(config, potential, grid, tols):
    c = _expect(config, "c", float, "config")
    channels = _parse_channels(config)
    report = verify_hardy(potential, c, grid=grid, channels=channels,
                          tol=tols["verdict_tol"])
    rows = [(potential.nu, c, ch, report.mu1[ch],
             report.mu1[ch] >= -tols["verdict_tol"]) for ch in channels]
    code = 0 if report.verdict == "holds" else 2
    return code, ["nu", "c", "kappa", "mu1", "holds"], rows, {
        "verdict": report.verdict, "min_mu1": report.min_mu1}


def _run_estimate(config, potential, grid, tols):
    channels = _parse_channels(config)
    est = estimate_hardy_constant(potential, grid, channels=channels,
                                  tol=tols["estimate_tol"],
                                  verdict_tol=tols["verdict_tol"])
    rows = [(potential.nu, est.value, est.capped, est.bracket[0], est.bracket[1],
             " ".join(str(ch) for ch in channels))]
    header = ["nu", "value", "capped", "bracket_lo", "bracket_hi", "channels"]
    return 0, header, rows, {"capped": est.capped}


def _run_solve(config, potential, grid, tols):
    kappa = _expect(config, "kappa", int, "config")
    k = _expect(config, "k", int, "config")
    window = config.get("window")
    if window is not None:
        if (not isinstance(window, list) or len(window) != 2
                or not all(isinstance(x, (int, float)) and not isinstance(x, bool)
                           for x in window)):
            raise ConfigError("window must be a two-number list [lo, hi]")
        window = (float(window[0]), float(window[1]))
    header = ["nu", "kappa", "k", "N", "E", "E_oracle", "rel_err",
              "gamma_lo", "gamma_hi", "mu_at_root", "flag"]
    try:
        res = find_eigenvalue(potential, kappa, k, grid=grid,
                              tol_gamma=tols["tol_gamma"], tol_mu=tols["tol_mu"],
                              window=window)
    except NoEigenvalueError as exc:
        row = (potential.nu, kappa, k, grid.n, None, None, None, None, None,
               exc.margin, "no-eigenvalue")
        return 2, header, [row], {"margin": exc.margin}
    exact, rel = _oracle_columns(potential, kappa, k, res.E)
    row = (potential.nu, kappa, k, grid.n, res.E, exact, rel,
           res.bracket[0], res.bracket[1], res.mu_at_root, res.flag)
    return 0, header, [row], {"gamma_star": res.gamma_star, "flag": res.flag}


def _run_resolvent(config, potential, grid, tols):
    kappa = _expect(config, "kappa", int, "config")
    gammas = config.get("gamma")
    if isinstance(gammas, (int, float)) and not isinstance(gammas, bool):
        gammas = [float(gammas)]
    elif (isinstance(gammas, list) and gammas
          and all(isinstance(x, (int, float)) and not isinstance(x, bool)
                  for x in gammas)):
        gammas = [float(x) for x in gammas]
    else:
        raise ConfigError("resolvent-check needs gamma: a number or a "
                          "nonempty list of numbers")
    seed = config.get("seed", 0)
    count = config.get("count", 100)
    if not isinstance(seed, int) or isinstance(seed, bool):
        raise ConfigError(f"seed must be an integer, got {seed!r}")
    if not isinstance(count, int) or isinstance(count, bool) or count < 1:
        raise ConfigError(f"count must be a positive integer, got {count!r}")

    w = grid.weights
    mw = grid.staggered()[1]
    rows = []
    worst_overall = 0.0
    singular = []
    for gamma in gammas:
        rng = np.random.default_rng(seed)
        worst = 0.0
        try:
            for _ in range(count):
                f1 = rng.standard_normal(grid.n)
                f2 = rng.standard_normal(grid.n + 1)
                pair = solve_resolvent(f1, f2, potential, gamma, kappa, grid,
                                       residual_warn=math.inf)
                g1, g2 = apply_hamiltonian(pair, potential)
                r1 = g1 + (1.0 - gamma) * pair.phi - f1
                r2 = g2 + (1.0 - gamma) * pair.chi - f2
                num = math.sqrt(float(np.dot(r1, w * r1) + np.dot(r2, mw * r2)))
                den = math.sqrt(float(np.dot(f1, w * f1) + np.dot(f2, mw * f2)))
                worst = max(worst, num / den)
        except SingularResolventError:
            rows.append((gamma, count, None, False))
            singular.append(gamma)
            continue
        rows.append((gamma, count, worst, worst <= 1e-8))
        worst_overall = max(worst_overall, worst)
    ok = not singular and worst_overall <= 1e-8
    extra = {"max_rel_residual": worst_overall,
             "singular_gammas": " ".join(repr(g) for g in singular)}
    return (0 if ok else 2), ["gamma", "count", "max_rel_residual", "ok"], rows, extra


def _run_diagnostics(config, potential, grid, tols):
    kappa = _expect(config, "kappa", int, "config")
    k = config.get("k", 1)
    if not isinstance(k, int) or isinstance(k, bool):
        raise ConfigError(f"k must be an integer, got {k!r}")
    header = ["cutoff", "truncated_r_inv", "interval_slope"]
    try:
        res = find_eigenvalue(potential, kappa, k, grid=grid,
                              tol_gamma=tols["tol_gamma"], tol_mu=tols["tol_mu"])
    except NoEigenvalueError as exc:
        return 2, header, [], {"margin": exc.margin, "flag": "no-eigenvalue"}
    gamma = config.get("gamma", min(potential.nu, res.gamma_star))
    if not isinstance(gamma, (int, float)) or isinstance(gamma, bool):
        raise ConfigError(f"gamma must be a number, got {gamma!r}")
    cutoffs = config.get("cutoffs")
    if cutoffs is not None:
        if (not isinstance(cutoffs, list) or len(cutoffs) < 2
                or not all(isinstance(x, (int, float)) and not isinstance(x, bool)
                           for x in cutoffs)):
            raise ConfigError("cutoffs must be a list of at least two numbers")
        cutoffs = np.asarray([float(x) for x in cutoffs])
    diag = domain_diagnostics(res.pair, potential, float(gamma), cutoffs=cutoffs)
    rows = [(cut, integral, slope) for (cut, integral), (_, slope)
            in zip(diag.r_inv_truncated[1:], diag.log_slope_points)]
    rows.insert(0, (diag.r_inv_truncated[0][0], diag.r_inv_truncated[0][1], None))
    chain_bad = diag.chain_applicable and diag.chain_margin < 0.0
    extra = {
        "E": res.E, "flag": res.flag, "b_gamma": diag.b_gamma_value,
        "r_inv_total": diag.r_inv_integral, "schur_defect": diag.schur_defect,
        "residual_phi": diag.residual_norms[0],
        "residual_chi": diag.residual_norms[1], "log_slope": diag.log_slope,
        "chain_lhs": diag.chain_lhs, "chain_rhs": diag.chain_rhs,
        "chain_applicable": diag.chain_applicable,
    }
    return (2 if chain_bad else 0), header, rows, extra


def _sweep_values(obj) -> tuple:
    if not isinstance(obj, dict):
        raise ConfigError("sweep must be an object")
    _reject_unknown(obj, {"axis", "values"}, "sweep")
    axis = _expect(obj, "axis", str, "sweep")
    if axis not in _SWEEP_AXES:
        raise ConfigError(f"sweep axis must be one of {_SWEEP_AXES}, got {axis!r}")
    values = obj.get("values")
    if not isinstance(values, list) or not values:
        raise ConfigError("sweep values must be a nonempty list")
    if not all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in values):
        raise ConfigError("sweep values must be numbers")
    return axis, values


def _run_sweep(config, potential, grid, tols):
    """Axis-bound sweeps; one row per value, rows in axis order.

    axis = N:     solve-eigen per mesh size; columns include the error
                  contraction ratio between consecutive rows.
    axis = nu:    solve-eigen per coupling (potential.nu is replaced).
    axis = gamma: mu_1 of the form per shift.
    axis = c:     verify-hardy verdict per shift constant.
    """
    axis, values = _sweep_values(_expect(config, "sweep", dict, "config"))
    threads = _thread_count()

    if axis in ("N", "nu"):
        kappa = _expect(config, "kappa", int, "config")
        k = _expect(config, "k", int, "config")

    if axis == "N":
        for value in values:
            if not (isinstance(value, int) and value >= 16):
                raise ConfigError(f"sweep over N needs integers >= 16, got {value!r}")

        def point(n):
            g = build_grid(grid.r_min, grid.r_max, n, grid.scheme)
            try:
                res = find_eigenvalue(potential, kappa, k, grid=g,
                                      tol_gamma=tols["tol_gamma"],
                                      tol_mu=tols["tol_mu"])
            except NoEigenvalueError:
                return None, None, None, "no-eigenvalue"
            exact, rel = _oracle_columns(potential, kappa, k, res.E)
            return res.E, exact, rel, res.flag

        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(point, values))
        rows = []
        prev_rel = None
        for n, (energy, exact, rel, flag) in zip(values, results):
            ratio = (prev_rel / rel) if (rel not in (None, 0.0)
                                         and prev_rel is not None) else None
            rows.append((n, energy, exact, rel, ratio, flag))
            prev_rel = rel
        header = ["N", "E", "E_oracle", "rel_err", "ratio", "flag"]
        code = 2 if any(r[1] is None for r in rows) else 0
        return code, header, rows, {}

    if axis == "nu":
        base = config["potential"]

        def point(nu):
            if base["type"] == "coulomb":
                pot = make_coulomb(nu)
            else:
                pot = make_bounded_perturbed_coulomb(nu, base.get("c1", 0.0),
                                                     base.get("gamma_cap", 0.0))
            try:
                res = find_eigenvalue(pot, kappa, k, grid=grid,
                                      tol_gamma=tols["tol_gamma"],
                                      tol_mu=tols["tol_mu"])
            except NoEigenvalueError as exc:
                return None, None, None, exc.margin
            exact, rel = _oracle_columns(pot, kappa, k, res.E)
            return res.E, exact, rel, res.flag

        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(point, [float(v) for v in values]))
        rows = [(nu, e, exact, rel, flag)
                for nu, (e, exact, rel, flag) in zip(values, results)]
        header = ["nu", "E", "E_oracle", "rel_err", "flag"]
        code = 2 if any(r[1] is None for r in rows) else 0
        return code, header, rows, {}

    if axis == "gamma":
        kappa = _expect(config, "kappa", int, "config")

        def point(gamma):
            return lowest_eigenvalues(assemble_form(potential, gamma, kappa, grid), 1)[0]

        with ThreadPoolExecutor(max_workers=threads) as pool:
            mus = list(pool.map(point, [float(v) for v in values]))
        rows = list(zip(values, mus))
        return 0, ["gamma", "mu1"], rows, {}

    channels = _parse_channels(config)

    def point(c):
        report = verify_hardy(potential, c, grid=grid, channels=channels,
                              tol=tols["verdict_tol"])
        return report.verdict, report.min_mu1

    with ThreadPoolExecutor(max_workers=threads) as pool:
        results = list(pool.map(point, [float(v) for v in values]))
    rows = [(c, verdict, mu) for c, (verdict, mu) in zip(values, results)]
    code = 0 if all(r[1] == "holds" for r in rows) else 2
    return code, ["c", "verdict", "min_mu1"], rows, {}


_RUNNERS = {
    "verify-hardy": _run_verify,
    "estimate-c": _run_estimate,
    "solve-eigen": _run_solve,
    "resolvent-check": _run_resolvent,
    "domain-diagnostics": _run_diagnostics,
    "sweep": _run_sweep,
}


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="dirac-hardy",
        description="Config-driven experiments on radial Dirac-Coulomb "
                    "channels: Hardy-form verification, bound-state solves, "
                    "resolvent checks, and parameter sweeps.")
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--config", required=True, help="path to a JSON config")
    parser.add_argument("--out", default=".", help="output directory")
    args = parser.parse_args(argv)

    start = time.perf_counter()
    try:
        config = _load_config(args.config, args.command)
        potential = _parse_potential(config["potential"])
        grid = _parse_grid(config.get("grid"))
        tols = _parse_tolerances(config.get("tolerances"))
        code, header, rows, extra = _RUNNERS[args.command](config, potential,
                                                           grid, tols)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except (PreconditionError, DiracHardyError) as exc:
        print(f"precondition violated: {exc}", file=sys.stderr)
        return 1

    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    name = config.get("output_path", f"{args.command}.csv")
    if not isinstance(name, str) or not name:
        print("config error: output_path must be a nonempty string",
              file=sys.stderr)
        return 1
    csv_path = out_dir / name
    outcome = {0: "ok", 2: "negative"}[code]
    _write_csv(csv_path, header, rows)
    _write_manifest(csv_path.with_suffix(csv_path.suffix + ".manifest.txt"),
                    args.command, config, grid,
                    time.perf_counter() - start, len(rows), outcome, extra)
    print(f"{outcome}: {len(rows)} row(s) -> {csv_path}")
    return code


if __name__ == "__main__":
    raise SystemExit(main())
