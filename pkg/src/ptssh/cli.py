"""``ptssh`` command line: figure-data experiments written as CSV.

Every CSV starts with ``#`` comment lines holding the tool version and the
resolved experiment config (execution options such as ``out`` and
``threads`` excluded), so re-running with the header's config reproduces
the file byte for byte.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import io
import json
import logging
import os
import sys
import tempfile
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import __version__
from .bulk import band_gap, pt_phase, winding_number
from .config import (
    COMMANDS,
    FIELD_NAMES,
    ConfigError,
    ExperimentConfig,
    emit_config,
    load_config,
    parse_value,
)
from .edge import ansatz_states, effective_model, gamma_bar
from .eig import TrackingAmbiguity, eig_dense, track_pair
from .ep import EPError, LatticeFamily, edge_eigenpairs, ep_sweep, find_ep, identify_edge_pair
from .model import LatticeError, build_hamiltonian, normalize_kind, read_profile_file

log = logging.getLogger("ptssh")

EXIT_OK = 0
EXIT_ROW_FAILURES = 1
EXIT_CONFIG = 2


def fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, (bool, np.bool_)):
        return "1" if x else "0"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return format(float(x), ".17g")
    return str(x)


@dataclasses.dataclass
class Table:
    columns: list[str]
    rows: list[list] = dataclasses.field(default_factory=list)
    errors: list[str] = dataclasses.field(default_factory=list)
    summary: str = ""


# ---------------------------------------------------------------- helpers


def _family(cfg: ExperimentConfig) -> LatticeFamily:
    """Chain family in units of w (w = 1, v = 1/u)."""
    kind = normalize_kind(cfg.profile)
    custom = None
    if kind == "custom":
        prof = read_profile_file(cfg.profile_file, cfg.M)
        # custom magnitudes are absolute; the family sweeps a multiplier of them in units of w
        custom = prof.scaled(1.0 / cfg.w)
    seed = cfg.seed if kind == "random" else None
    return LatticeFamily.from_u(cfg.M, cfg.ratio, kind, seed, w=1.0, custom=custom)


def _amplitude_scale(cfg: ExperimentConfig, family: LatticeFamily) -> float:
    """Factor taking config gamma values to the family's swept amplitude."""
    if cfg.gamma_relative:
        return family.analytic_critical()
    if family.kind == "custom":
        return 1.0  # a multiplier of the file's magnitudes
    return 1.0 / cfg.w


def _gamma_grid(cfg: ExperimentConfig, family: LatticeFamily) -> np.ndarray:
    scale = _amplitude_scale(cfg, family)
    grid = np.linspace(cfg.gamma_min, cfg.gamma_max, cfg.gamma_points) * scale
    if cfg.refine_points:
        crit = family.analytic_critical()
        grid = np.concatenate([grid, np.linspace(0.9 * crit, 1.1 * crit, cfg.refine_points)])
    return np.unique(grid)


def _pmap(fn, items, threads: int):
    if threads > 1 and len(items) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(fn, items))
    return [fn(x) for x in items]


# ---------------------------------------------------------------- commands


def cmd_spectrum_sweep(cfg: ExperimentConfig) -> Table:
    family = _family(cfg)
    table = Table(["gamma", "index", "re_E", "im_E", "edge_flag"])
    grid = _gamma_grid(cfg, family)
    if grid.size == 0:
        return table
    spectra = _pmap(lambda g: eig_dense(build_hamiltonian(family.at(g))), list(grid), cfg.threads)

    flags = np.zeros((grid.size, cfg.M), dtype=bool)
    if family.u > 1:
        try:
            seed_idx = identify_edge_pair(spectra[0], family.ansatz())
            for k, pair in enumerate(track_pair(spectra, seed_idx)):
                flags[k, list(pair.indices)] = True
        except (EPError, TrackingAmbiguity) as exc:
            log.warning("edge pair not tracked: %s", exc)

    for gi, (g, S) in enumerate(zip(grid, spectra)):
        for i, E in enumerate(S.eigenvalues):
            table.rows.append([g, i, E.real, E.imag, bool(flags[gi, i])])
    table.summary = f"{grid.size} gain values x {cfg.M} levels"
    return table


EP_COLUMNS = [
    "M",
    "u",
    "profile",
    "seed",
    "gamma_cr_numeric",
    "gamma_cr_analytic",
    "relative_error",
    "U_cr_numeric",
    "U_cr_analytic",
    "status",
]


def _ep_row(M, u, profile, seed, result, error) -> list:
    if result is None:
        return [M, u, profile, seed, None, None, None, None, None, error]
    return [
        M,
        u,
        profile,
        seed,
        result.gamma_bar_numeric,
        result.gamma_bar_analytic,
        result.relative_error,
        result.gamma_cr_numeric,
        result.gamma_cr_analytic,
        "ok",
    ]


def cmd_ep_find(cfg: ExperimentConfig) -> Table:
    table = Table(list(EP_COLUMNS))
    family = _family(cfg)
    try:
        res = find_ep(family, tol=cfg.tol)
        table.rows.append(_ep_row(cfg.M, cfg.ratio, family.kind, family.seed, res, None))
        table.summary = f"critical {family.parameter} = {res.gamma_cr_numeric:.8g} (analytic {res.gamma_cr_analytic:.8g})"
    except (EPError, ValueError) as exc:
        msg = f"{type(exc).__name__}: {exc}"
        table.rows.append(_ep_row(cfg.M, cfg.ratio, family.kind, family.seed, None, msg))
        table.errors.append(msg)
    return table


def cmd_ep_sweep(cfg: ExperimentConfig) -> Table:
    table = Table(list(EP_COLUMNS))
    kind = normalize_kind(cfg.profile)
    rows = ep_sweep(cfg.M_list, cfg.u_list, kind, seed=cfg.seed, tol=cfg.tol, w=1.0, threads=cfg.threads)
    for r in rows:
        table.rows.append(_ep_row(r.M, r.u, r.profile, r.seed, r.result, r.error))
        if r.error:
            table.errors.append(f"M={r.M} u={r.u}: {r.error}")
    table.summary = f"{len(rows)} rows, {len(table.errors)} failed"
    return table


def cmd_bulk_phase(cfg: ExperimentConfig) -> Table:
    table = Table(["u", "gamma", "phase", "winding", "gap"])
    gammas = np.linspace(cfg.gamma_min, cfg.gamma_max, cfg.gamma_points) / cfg.w
    for u in cfg.u_list:
        v, w = 1.0 / u, 1.0
        gap = band_gap(v, w)
        winding = winding_number(v, w, cfg.Nk).value if gap > 1e-9 else None
        for g in gammas:
            table.rows.append([u, g, str(pt_phase(v, w, g)), winding, gap])
    table.summary = f"{len(cfg.u_list)} x {gammas.size} phase points"
    return table


def cmd_ansatz_profile(cfg: ExperimentConfig) -> Table:
    ans = ansatz_states(cfg.M, cfg.ratio)
    table = Table(["m", "L", "R", "abs_L", "abs_R"])
    for m in range(cfg.M):
        table.rows.append([m + 1, ans.cL[m], ans.cR[m], abs(ans.cL[m]), abs(ans.cR[m])])
    table.summary = f"c_L = {ans.c_norm:.6f}, xi = {ans.xi:.6f}, C = {ans.C:.6g}"
    return table


def cmd_wavefunction_compare(cfg: ExperimentConfig) -> Table:
    family = _family(cfg)
    lam = cfg.gamma * _amplitude_scale(cfg, family)
    spec = family.at(lam)
    ansatz = family.ansatz()
    model = effective_model(gamma_bar(spec.profile, family.u), ansatz.C)
    if model.at_ep:
        raise ConfigError(
            "gamma: sits on the analytic exceptional point where the effective eigenvectors coalesce; "
            "offset gamma (e.g. gamma_relative = true, gamma = 0.5 or 2)"
        )
    S, (i, j) = edge_eigenpairs(family, lam, ansatz)
    E_plus_state, _ = model.state_energies()
    k = i if abs(S.eigenvalues[i] - E_plus_state) <= abs(S.eigenvalues[j] - E_plus_state) else j
    exact = S.eigenvectors[:, k]
    predicted = model.site_state(ansatz, "+")
    overlap = abs(np.vdot(predicted, exact))

    table = Table(["m", "abs_exact", "abs_effective", "abs_L", "abs_R"])
    for m in range(cfg.M):
        table.rows.append([m + 1, abs(exact[m]), abs(predicted[m]), abs(ansatz.cL[m]), abs(ansatz.cR[m])])
    table.summary = f"|<effective|exact>| = {overlap:.6f} (E_exact = {S.eigenvalues[k]:.6g})"
    return table


HANDLERS = {
    "spectrum-sweep": cmd_spectrum_sweep,
    "ep-find": cmd_ep_find,
    "ep-sweep": cmd_ep_sweep,
    "bulk-phase": cmd_bulk_phase,
    "ansatz-profile": cmd_ansatz_profile,
    "wavefunction-compare": cmd_wavefunction_compare,
}


# ---------------------------------------------------------------- output


def render_csv(cfg: ExperimentConfig, table: Table) -> str:
    buf = io.StringIO()
    buf.write(f"# ptssh {__version__} {cfg.command}\n")
    for line in emit_config(cfg, include_runtime=False).splitlines():
        buf.write(f"# {line}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(table.columns)
    for row in table.rows:
        writer.writerow([fmt(x) for x in row])
    return buf.getvalue()


def write_atomic(path: str, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".ptssh-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def run(cfg: ExperimentConfig) -> tuple[str, Table]:
    """Validate, execute and render one experiment; no file output."""
    cfg.validate()
    table = HANDLERS[cfg.command](cfg)
    return render_csv(cfg, table), table


# ---------------------------------------------------------------- argparse


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ptssh", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"ptssh {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", help="key = value config file")
        for field in FIELD_NAMES:
            if field == "command":
                continue
            flag = "--" + field.replace("_", "-")
            aliases = [flag] if field == flag[2:] else [flag, "--" + field]
            p.add_argument(*aliases, dest=field, metavar=field.upper(), default=None)
    return parser


def resolve_config(args: argparse.Namespace) -> ExperimentConfig:
    base = ExperimentConfig(command=args.command)
    if args.config:
        base = load_config(args.config, base=base)
        base = dataclasses.replace(base, command=args.command)
    overrides = {}
    for field in FIELD_NAMES:
        if field == "command":
            continue
        raw = getattr(args, field, None)
        if raw is not None:
            overrides[field] = parse_value(field, raw)
    return dataclasses.replace(base, **overrides)


def _error_summary(kind: str, errors: list[str]) -> str:
    return json.dumps({"status": "error", "kind": kind, "count": len(errors), "errors": errors}, sort_keys=True)


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        cfg = resolve_config(args)
        text, table = run(cfg)
    except (ConfigError, LatticeError, OSError) as exc:
        print(_error_summary("config", [str(exc)]), file=sys.stderr)
        return EXIT_CONFIG
    except (EPError, ValueError, ArithmeticError) as exc:
        print(_error_summary("run", [f"{type(exc).__name__}: {exc}"]), file=sys.stderr)
        return EXIT_ROW_FAILURES

    if cfg.out:
        write_atomic(cfg.out, text)
    else:
        sys.stdout.write(text)
    if cfg.plot:
        from .plot import render

        render(cfg, table, cfg.plot)
    if table.summary:
        print(table.summary, file=sys.stderr)
    if table.errors:
        print(_error_summary("rows", table.errors), file=sys.stderr)
        return EXIT_ROW_FAILURES
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
