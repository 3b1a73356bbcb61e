"""Command-line front end.

    bogospec <command> --config <path> [--out <dir>] [--format csv|json|both]

Exit codes: 0 ok, 1 failed verification, 2 bad config, 66 missing config.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import platform
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import scipy

from . import __version__
from .bogoliubov import bdg_spectrum, compute_E, predict_ground_energy
from .config import EXIT_CONFIG, EXIT_NOINPUT, EXIT_OK, EXIT_VERIFY, ConfigError, RunConfig, load_config
from .domain import validate_positive_type
from .fock import compute_tensors, verify_point
from .hartree import HartreeError, solve_hartree
from .onebody import assemble_onebody, compute_symplectic
from .torus import torus_spectrum

log = logging.getLogger("bogospec")

COMMANDS = ("validate", "hartree", "spectrum", "bdg", "torus-oracle", "ed-compare", "sweep")
FLOAT_FMT = "%.12e"
BDG_RTOL = 1e-8
BDG_LEVELS = 10
ADEQUACY_FACTOR = 50.0

ED_COLUMNS = ("N", "E0_ed", "E0_bog", "delta0", "delta0_sqrtN", "gap1_ed", "gap1_bog", "depletion",
              "TH_expect", "overlap_sq", "lemma1_lower_ok", "lemma1_upper_ok", "lemma3_ok")
ED_EXTRA = ("dim", "bare_overlap_sq", "lemma1_expect_ok", "lemma1_lower_slack", "lemma1_upper_slack",
            "lemma3_min_slack")


def _fmt(x: float) -> str:
    return FLOAT_FMT % x


def canonical(value):
    """Round floats to the serialized precision so files re-read bit-for-bit."""
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        return float(_fmt(float(value)))
    if isinstance(value, dict):
        return {str(k): canonical(v) for k, v in value.items()}
    if isinstance(value, (list, tuple, np.ndarray)):
        return [canonical(v) for v in value]
    return value


@dataclass
class ResultBundle:
    """Tables produced by one command; ``tables[command]`` is the main one."""

    command: str
    metadata: dict
    tables: dict = field(default_factory=dict)
    failures: list = field(default_factory=list)

    def add(self, name: str, rows: list[dict]):
        self.tables[name] = [canonical(r) for r in rows]

    @property
    def stem(self) -> str:
        return self.command.replace("-", "_")

    def table_filename(self, name: str) -> str:
        return f"{self.stem}.csv" if name == self.command else f"{self.stem}_{name.replace('-', '_')}.csv"


# --- serialization -----------------------------------------------------------

def _json_value(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float):
        return _fmt(v) if math.isfinite(v) else ("NaN" if math.isnan(v) else ("Infinity" if v > 0 else "-Infinity"))
    if v is None:
        return "null"
    if isinstance(v, str):
        return json.dumps(v)
    if isinstance(v, list):
        return "[" + ", ".join(_json_value(x) for x in v) + "]"
    if isinstance(v, dict):
        return "{" + ", ".join(f"{json.dumps(k)}: {_json_value(x)}" for k, x in v.items()) + "}"
    raise TypeError(f"cannot serialize {type(v).__name__}")


def to_json(bundle: ResultBundle) -> str:
    doc = {"command": bundle.command, "metadata": bundle.metadata, "tables": bundle.tables}
    return _json_value(doc) + "\n"


def _csv_cell(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return _fmt(v)
    if isinstance(v, list):
        return ";".join(_csv_cell(x) for x in v)
    return str(v)


def to_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    if not rows:
        return ""
    writer = csv.writer(buf, lineterminator="\n")
    cols = list(rows[0])
    writer.writerow(cols)
    for r in rows:
        writer.writerow([_csv_cell(r[c]) for c in cols])
    return buf.getvalue()


def _parse_cell(text: str):
    if text in ("true", "false"):
        return text == "true"
    try:
        return int(text)
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError:
        return text


def read_csv(text: str) -> list[dict]:
    """Inverse of ``to_csv`` for scalar cells."""
    return [{k: _parse_cell(v) for k, v in row.items()} for row in csv.DictReader(io.StringIO(text))]


def read_json(text: str) -> dict:
    return json.loads(text)


def write_bundle(bundle: ResultBundle, out_dir: Path, fmt: str) -> list[Path]:
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    if fmt in ("csv", "both"):
        for name, rows in bundle.tables.items():
            path = out_dir / bundle.table_filename(name)
            path.write_text(to_csv(rows), encoding="utf-8")
            written.append(path)
    if fmt in ("json", "both"):
        path = out_dir / f"{bundle.stem}.json"
        path.write_text(to_json(bundle), encoding="utf-8")
        written.append(path)
    return written


# --- pipeline ----------------------------------------------------------------

def metadata(cfg: RunConfig) -> dict:
    # wall times go to the log only, so files stay deterministic
    return {
        "config": canonical(cfg.echo()),
        "versions": {"bogospec": __version__, "numpy": np.__version__, "scipy": scipy.__version__,
                     "python": platform.python_version()},
    }


def _hartree(cfg: RunConfig):
    return solve_hartree(cfg.grid, cfg.external, cfg.v, cfg.scf)


def _spectral(cfg: RunConfig, m: int):
    sol = _hartree(cfg)
    ob = assemble_onebody(sol, cfg.grid, cfg.external, cfg.v, m)
    return sol, ob, compute_E(ob)


def cmd_validate(cfg: RunConfig, bundle: ResultBundle):
    grid, v = cfg.grid, cfg.v
    rep = validate_positive_type(v, grid)
    rows = [{"check": "positive_type", "value": rep.min_coefficient, "threshold": -rep.tolerance,
             "ok": rep.passed, "advisory": False}]
    if not rep.passed:
        bundle.failures.append(f"positive_type: min vhat {rep.min_coefficient:.3e}")
    if not grid.periodic:
        # the box must be wide enough that V_ext at the wall dwarfs the expected eps0
        scale = (cfg.omega if cfg.potential == "harmonic" else 1.0) + abs(v.at_zero)
        wall = float(cfg.external(np.array([grid.length / 2]))[0])
        rows.append({"check": "box_adequacy", "value": wall, "threshold": ADEQUACY_FACTOR * scale,
                     "ok": wall >= ADEQUACY_FACTOR * scale, "advisory": True})
        if wall < ADEQUACY_FACTOR * scale:
            log.warning("V_ext at the box edge (%.3g) is below %g x expected eps0; consider a larger L",
                        wall, ADEQUACY_FACTOR)
    bundle.add("validate", rows)


def cmd_hartree(cfg: RunConfig, bundle: ResultBundle):
    sol = _hartree(cfg)
    bundle.add("hartree", [{
        "eps0": sol.eps0, "hartree_energy": sol.hartree_energy, "one_body_energy": sol.one_body_energy,
        "v0000": sol.v0000, "residual": sol.residual, "iterations": sol.iterations,
        "boundary_amplitude": sol.boundary_amplitude,
    }])
    bundle.add("phi0", [{"x": x, "phi0": p} for x, p in zip(cfg.grid.x, sol.phi0)])


def cmd_spectrum(cfg: RunConfig, bundle: ResultBundle):
    sol, ob, bog = _spectral(cfg, cfg.m_modes)
    bundle.add("spectrum", [{"index": i + 1, "e_i": e} for i, e in enumerate(bog.e)])
    a, b = bog.e0n_coefficients
    bundle.add("summary", [{"m_modes": ob.m, "eps0": sol.eps0, "gap": ob.gap, "trace_correction": bog.trace_correction,
                            "e0n_a": a, "e0n_b": b}])
    bundle.add("energies", [{"N": N, "E0_bog": predict_ground_energy(bog, sol, N)} for N in cfg.N_list])


def cmd_bdg(cfg: RunConfig, bundle: ResultBundle):
    _, ob, bog = _spectral(cfg, cfg.m_modes)
    w = bdg_spectrum(ob)
    rows = []
    for i, (e, om) in enumerate(zip(bog.e, w)):
        rel = abs(om - e) / abs(e)
        ok = rel <= BDG_RTOL or i >= BDG_LEVELS
        rows.append({"index": i + 1, "e_i": e, "omega_i": om, "rel_diff": rel, "ok": ok})
        if not ok:
            bundle.failures.append(f"bdg row index={i + 1}: rel_diff {rel:.3e} > {BDG_RTOL:g}")
    bundle.add("bdg", rows)


def cmd_torus_oracle(cfg: RunConfig, bundle: ResultBundle):
    if cfg.kind != "torus":
        raise ConfigError("model.kind: torus-oracle needs model.kind = torus")
    basis = cfg.mode_basis
    cont = torus_spectrum(basis, cfg.v)
    rows = cont.rows()
    if cfg.d == 1:
        sten = torus_spectrum(basis, cfg.v, n=cfg.n)
        for r, q, e in zip(rows, sten.p_squared, sten.e):
            r.update(p_squared_stencil=float(q), e_p_stencil=float(e))
    bundle.add("torus-oracle", rows)
    summary = {"trace_sum": cont.trace_sum}
    if cfg.d == 1:
        summary["trace_sum_stencil"] = sten.trace_sum
    bundle.add("summary", [summary])


def _ed_setup(cfg: RunConfig):
    m = cfg.M + 1
    sol, ob, bog = _spectral(cfg, m)
    tensors = compute_tensors(ob, cfg.grid, cfg.external, cfg.v)
    sym = compute_symplectic(ob.Dq, bog.E_matrix[1:, 1:])
    return sol, ob, bog, tensors, sym


def _ed_rows(cfg: RunConfig, jobs: int = 1):
    sol, ob, bog, tensors, sym = _ed_setup(cfg)
    ed = cfg.ed
    args = [(N, sol, ob, bog, tensors, sym.alpha, ed) for N in cfg.N_list]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(_verify_star, args))
    else:
        rows = [_verify_star(a) for a in args]
    return rows, sym.alpha_hs


def _verify_star(args):
    return verify_point(*args)


def _ed_table(rows) -> list[dict]:
    out = []
    for r in rows:
        d = {c: getattr(r, c) for c in ED_COLUMNS + ED_EXTRA}
        d["gap_errors"] = list(r.gap_errors)
        out.append(d)
    return out


def _ed_failures(rows) -> list[str]:
    failures = []
    for r in rows:
        for flag in ("lemma1_lower_ok", "lemma1_upper_ok", "lemma1_expect_ok", "lemma3_ok"):
            if not getattr(r, flag):
                failures.append(f"ed row N={r.N}: {flag} is false")
    return failures


def cmd_ed_compare(cfg: RunConfig, bundle: ResultBundle, jobs: int = 1):
    rows, alpha_hs = _ed_rows(cfg, jobs)
    bundle.add("ed-compare", _ed_table(rows))
    bundle.add("summary", [{"M": cfg.M, "alpha_hs": alpha_hs}])
    bundle.failures.extend(_ed_failures(rows))
    return rows


def trend_checks(rows) -> list[dict]:
    """Large-N trends of an ED sweep ordered by ascending N."""
    N = np.array([r.N for r in rows], dtype=float)
    d0 = np.array([r.delta0 for r in rows])
    gap_err = np.array([abs(r.gap1_ed - r.gap1_bog) for r in rows])
    ov = np.array([r.overlap_sq for r in rows])
    bare = np.array([r.bare_overlap_sq for r in rows])
    scaled = d0 * np.sqrt(N)
    C = (1.0 - ov) * np.sqrt(N)
    checks = [
        ("delta0_decreasing", float(np.min(-np.diff(d0), initial=np.inf)), 0.0, bool(np.all(np.diff(d0) < 0))),
        ("delta0_sqrtN_spread", float(scaled.max() / scaled.min()), 3.0, bool(scaled.max() / scaled.min() < 3.0)),
        ("gap_error_decreasing", float(np.min(-np.diff(gap_err), initial=np.inf)), 0.0,
         bool(np.all(np.diff(gap_err) < 0))),
        ("gap_error_rel_last", float(gap_err[-1] / rows[-1].gap1_bog), 0.05,
         bool(gap_err[-1] / rows[-1].gap1_bog < 0.05)),
        ("overlap_increasing", float(np.min(np.diff(ov), initial=np.inf)), 0.0, bool(np.all(np.diff(ov) > 0))),
        ("overlap_C_stability", float(abs(C[-1] / C[-2] - 1.0)) if len(C) > 1 else 0.0, 0.5,
         bool(len(C) < 2 or abs(C[-1] / C[-2] - 1.0) <= 0.5)),
        ("bare_below_overlap", float(np.min(ov - bare)), 0.0, bool(np.all(bare < ov))),
    ]
    return [{"check": c, "value": v, "threshold": t, "ok": ok} for c, v, t, ok in checks]


def cmd_sweep(cfg: RunConfig, bundle: ResultBundle, jobs: int = 1):
    rows = cmd_ed_compare(cfg, bundle, jobs)
    bundle.tables["sweep"] = bundle.tables.pop("ed-compare")
    trends = trend_checks(rows)
    bundle.add("trends", trends)
    for t in trends:
        if not t["ok"]:
            bundle.failures.append(f"trend {t['check']}: value {t['value']:.6g} vs threshold {t['threshold']:g}")


HANDLERS = {
    "validate": cmd_validate, "hartree": cmd_hartree, "spectrum": cmd_spectrum, "bdg": cmd_bdg,
    "torus-oracle": cmd_torus_oracle, "ed-compare": cmd_ed_compare, "sweep": cmd_sweep,
}


def run_command(command: str, cfg: RunConfig, jobs: int = 1) -> ResultBundle:
    if command not in HANDLERS:
        raise ValueError(f"unknown command {command!r}")
    bundle = ResultBundle(command=command, metadata=metadata(cfg))
    handler = HANDLERS[command]
    t0 = time.perf_counter()
    if command in ("ed-compare", "sweep"):
        handler(cfg, bundle, jobs)
    else:
        handler(cfg, bundle)
    log.info("%s finished in %.2f s", command, time.perf_counter() - t0)
    return bundle


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="bogospec", description="Bogoliubov spectra of trapped Bose gases.")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--config", required=True, help="path to a section.key = value config file")
    p.add_argument("--out", help="output directory (overrides output.dir)")
    p.add_argument("--format", choices=("csv", "json", "both"), help="output format (overrides output.format)")
    p.add_argument("--jobs", type=int, default=1, help="worker processes for sweep / ed-compare")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    try:
        cfg = load_config(args.config)
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NOINPUT
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if args.jobs < 1:
        print("config error: --jobs must be >= 1", file=sys.stderr)
        return EXIT_CONFIG

    try:
        bundle = run_command(args.command, cfg, args.jobs)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (HartreeError, ValueError, RuntimeError, OverflowError, MemoryError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VERIFY

    out_dir = Path(args.out or cfg.out_dir)
    for path in write_bundle(bundle, out_dir, args.format or cfg.format):
        log.info("wrote %s", path)
    for msg in bundle.failures:
        print(f"FAILED {msg}", file=sys.stderr)
    return EXIT_VERIFY if bundle.failures else EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
