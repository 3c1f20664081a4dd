"""``merminlab`` command-line interface.

Global options may appear before or after the subcommand. Precedence, lowest
to highest: built-in defaults, ``MERMINLAB_SEED`` (seed only), ``--config``
JSON file, explicit flags.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from pathlib import Path

from . import __version__
from .acceptance import verify_all
from .device import Chain, enumerate_chains, extend_violating_chains, load_reference_table, load_topology
from .experiment import (
    ExperimentConfig,
    emit_report,
    results_from_dict,
    results_to_dict,
    run_orthogonal_pair,
    sweep_phase,
)
from .mermin import build_recursive, canonical_operator, lhv_max_bruteforce, lr_bound, normalize
from .noise import NoiseSpec

DEFAULTS = {
    "seed": 0,
    "shots": 1024,
    "repeats": 5,
    "noise": None,
    "topology": None,
    "format": "csv",
    "out": None,
}


def _global_options(parser: argparse.ArgumentParser, suppress: bool) -> None:
    d = argparse.SUPPRESS if suppress else None
    g = parser.add_argument_group("global options")
    g.add_argument("--config", default=d, help="JSON file whose keys mirror the long flags")
    g.add_argument("--seed", type=int, default=d, help="master seed (fallback: $MERMINLAB_SEED, then 0)")
    g.add_argument("--shots", type=int, default=d, help="shots per measurement setting, i.e. per Pauli term (default 1024)")
    g.add_argument("--repeats", type=int, default=d, help="repeats per chain (default 5)")
    g.add_argument("--noise", default=d, help='NoiseSpec JSON file, e.g. {"theta": 0.7854, "depol_p": 0.01, "readout_eps": 0.02}')
    g.add_argument("--topology", default=d, help="edge-list file (default: bundled Rochester graph)")
    g.add_argument("--format", choices=("csv", "json"), default=d)
    g.add_argument("--out", default=d, help="write output here instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="merminlab", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"merminlab {__version__}")
    _global_options(p, suppress=False)
    sub = p.add_subparsers(dest="command", required=True)
    p.subcommand_parsers = sub.choices

    def add(name: str, help: str) -> argparse.ArgumentParser:
        sp = sub.add_parser(name, help=help)
        _global_options(sp, suppress=True)
        return sp

    sp = add("build-op", "print a Mermin operator as JSON")
    sp.add_argument("--n", type=int, help="qubit count (required; may come from --config)")
    sp.add_argument("--form", choices=("recursive", "canonical"), default="canonical")
    sp.add_argument("--which", choices=("m", "m_prime", "pair"), default="m")

    sp = add("sweep-phase", "<M_n>, <M'_n> over a phase grid")
    sp.add_argument("--n", type=int, help="qubit count (required; may come from --config)")
    sp.add_argument("--points", type=int, default=32, help="uniform grid on [0, 2 pi)")
    sp.add_argument("--phis", help="comma-separated phases in radians (overrides --points)")
    sp.add_argument("--mode", choices=("exact", "sampled"), default="exact")
    sp.add_argument("--trajectories", type=int, default=64)

    sp = add("run", "orthogonal (M, M') measurements over chains")
    sp.add_argument("--n", type=int, help="qubit count (required; may come from --config)")
    sp.add_argument("--chains", default="all", help="'all' or comma-separated chains like 29-36,33-34")
    sp.add_argument("--phi", type=float, help="phase (default phi_max(n))")
    sp.add_argument("--mode", choices=("exact", "sampled"), default="sampled")
    sp.add_argument("--trajectories", type=int, default=64)
    sp.add_argument("--reference", action="store_true", help="join the bundled reference table for n")
    sp.add_argument("--results-out", help="also write raw per-chain statistics as JSON (input for 'report')")

    sp = add("enumerate-chains", "list simple-path chains of a given length")
    sp.add_argument("--n", type=int, help="qubit count (required; may come from --config)")
    sp.add_argument("--extend-from", help="results JSON; grow chains whose normalized <M> exceeds --threshold")
    sp.add_argument("--threshold", type=float, default=1.0)

    sp = add("lhv-bound", "brute-force local-hidden-variable maximum")
    sp.add_argument("--n", type=int, help="qubit count (required; may come from --config)")

    sp = add("verify", "run the acceptance checks; nonzero exit on failure")
    sp.add_argument("--quick", action="store_true", help="skip the Monte-Carlo checks")

    sp = add("report", "ranked table from saved run results")
    sp.add_argument("--results", required=True, help="JSON written by 'run --results-out'")
    sp.add_argument("--reference", help="reference CSV, or an integer n for the bundled table")
    sp.add_argument("--circles", default="", help="comma-separated circle radii to annotate (JSON format)")
    return p


def apply_config(parser: argparse.ArgumentParser, cfg: dict) -> None:
    """Install config-file values as defaults so explicit flags still win."""
    cfg = {k.replace("-", "_"): v for k, v in cfg.items() if k != "config"}
    parser.set_defaults(**cfg)
    for sp in parser.subcommand_parsers.values():
        sp.set_defaults(**cfg)


def resolve_options(args: argparse.Namespace) -> dict:
    opts = dict(DEFAULTS)
    if "MERMINLAB_SEED" in os.environ:
        opts["seed"] = int(os.environ["MERMINLAB_SEED"])
    opts.update({k: v for k, v in vars(args).items() if v is not None})
    return opts


def _noise(opts: dict) -> NoiseSpec:
    src = opts.get("noise")
    if src is None:
        return NoiseSpec()
    if isinstance(src, dict):
        return NoiseSpec.from_dict(src)
    return NoiseSpec.from_json_file(src)


def _emit(text: str, opts: dict) -> None:
    if opts.get("out"):
        Path(opts["out"]).write_text(text)
    else:
        sys.stdout.write(text)


def _table(rows: list[dict], fmt: str) -> str:
    if fmt == "json":
        return json.dumps(rows, indent=2) + "\n"
    buf = io.StringIO()
    if rows:
        w = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
        w.writeheader()
        for r in rows:
            w.writerow({k: repr(v) if isinstance(v, float) else v for k, v in r.items()})
    return buf.getvalue()


def cmd_build_op(opts: dict) -> int:
    n = opts["n"]
    pair = build_recursive(n) if opts["form"] == "recursive" else canonical_operator(n)
    if opts["which"] == "m":
        text = pair.m.to_json()
    elif opts["which"] == "m_prime":
        text = pair.m_prime.to_json()
    else:
        text = json.dumps({"n": n, "form": opts["form"], "scale_factor": pair.scale_factor,
                           "m": pair.m.to_dict(), "m_prime": pair.m_prime.to_dict()})
    _emit(text + "\n", opts)
    return 0


def cmd_sweep_phase(opts: dict) -> int:
    if opts.get("phis"):
        phis = [float(x) for x in str(opts["phis"]).split(",") if x.strip()]
    else:
        k = int(opts["points"])
        phis = [2 * math.pi * i / k for i in range(k)]
    rows = sweep_phase(opts["n"], phis, opts["mode"], _noise(opts), shots=opts["shots"],
                       trajectories=opts["trajectories"], seed=opts["seed"])
    _emit(_table(rows, opts["format"]), opts)
    return 0


def _parse_chains(spec) -> list[Chain] | str:
    if spec in (None, "all"):
        return "all"
    if isinstance(spec, list):
        return [Chain(tuple(c)) for c in spec]
    return [Chain.parse(c) for c in str(spec).split(",") if c.strip()]


def cmd_run(opts: dict) -> int:
    graph = load_topology(opts.get("topology"))
    cfg = ExperimentConfig(
        n=opts["n"],
        chains=_parse_chains(opts.get("chains")),
        phi=opts.get("phi"),
        shots=opts["shots"],
        repeats=opts["repeats"],
        noise=_noise(opts),
        seed=opts["seed"],
        mode=opts["mode"],
        trajectories=opts["trajectories"],
    )
    results = run_orthogonal_pair(cfg, graph)
    if opts.get("results_out"):
        Path(opts["results_out"]).write_text(json.dumps(results_to_dict(results), indent=2) + "\n")
    reference = load_reference_table(n=cfg.n) if opts.get("reference") else None
    _emit(emit_report(results, reference, opts["format"], n=cfg.n), opts)
    return 0


def cmd_enumerate_chains(opts: dict) -> int:
    graph = load_topology(opts.get("topology"))
    if opts.get("extend_from"):
        results = results_from_dict(json.loads(Path(opts["extend_from"]).read_text()))
        prior = [(c, normalize(s.m_mean, s.n)) for c, s in results]
        chains = extend_violating_chains(prior, graph, opts["threshold"])
        chains = [c for c in chains if len(c) == opts["n"]]
    else:
        chains = enumerate_chains(graph, opts["n"])
    if opts["format"] == "json":
        text = json.dumps([list(c.qubits) for c in chains]) + "\n"
    else:
        text = "".join(c.label() + "\n" for c in chains)
    _emit(text, opts)
    return 0


def cmd_lhv_bound(opts: dict) -> int:
    n = opts["n"]
    found = lhv_max_bruteforce(canonical_operator(n))
    _emit(json.dumps({"n": n, "bruteforce_max": found, "lr_bound": lr_bound(n), "equal": found == lr_bound(n)}) + "\n", opts)
    return 0


def cmd_verify(opts: dict) -> int:
    verdicts = verify_all(quick=bool(opts.get("quick")))
    for v in verdicts:
        print(v.line(), file=sys.stderr)
    ok = all(v.passed for v in verdicts)
    payload = {"passed": ok, "checks": [v.to_dict() for v in verdicts]}
    _emit(json.dumps(payload, indent=2, sort_keys=True) + "\n", opts)
    return 0 if ok else 1


def cmd_report(opts: dict) -> int:
    results = results_from_dict(json.loads(Path(opts["results"]).read_text()))
    ref = opts.get("reference")
    reference = None
    if ref:
        reference = load_reference_table(n=int(ref)) if str(ref).isdigit() else load_reference_table(ref)
    circles = [float(x) for x in str(opts.get("circles") or "").split(",") if x.strip()]
    n = results[0][1].n if results else None
    _emit(emit_report(results, reference, opts["format"], n=n, circles=circles), opts)
    return 0


COMMANDS = {
    "build-op": cmd_build_op,
    "sweep-phase": cmd_sweep_phase,
    "run": cmd_run,
    "enumerate-chains": cmd_enumerate_chains,
    "lhv-bound": cmd_lhv_bound,
    "verify": cmd_verify,
    "report": cmd_report,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "config", None):
        apply_config(parser, json.loads(Path(args.config).read_text()))
        args = parser.parse_args(argv)
    opts = resolve_options(args)
    if args.command not in ("verify", "report") and opts.get("n") is None:
        parser.error(f"{args.command}: --n is required")
    try:
        return COMMANDS[args.command](opts)
    except (ValueError, OSError) as exc:
        print(f"merminlab: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
