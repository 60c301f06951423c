"""Command-line interface.

Every subcommand reads an instance (or report) file and writes plain files,
so stages can be chained or rerun independently.  Outputs go to ``--out``
/ ``--out-dir`` when given, otherwise to ``$CSPULSE_OUT`` (default: the
current directory).  Each output embeds the effective configuration and
seed.  Exit codes: 0 success, 1 stage failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path
from typing import Sequence

from . import contextual, grouping, io, subspace, tapering, vqe
from .errors import CSPulseError, StageError
from .pauli import ORACLE_LIMIT, PauliSum, exact_ground

OUT_ENV = "CSPULSE_OUT"
_PATH_KEYS = {"out", "out_dir", "config"}


def _out_dir(args) -> Path:
    return Path(args.out_dir or os.environ.get(OUT_ENV, "."))


def _out_file(args, default_name: str) -> Path:
    return Path(args.out) if args.out else _out_dir(args) / default_name


def effective_config(args) -> dict:
    """Arguments that affect results (output locations excluded)."""
    return {k: v for k, v in sorted(vars(args).items()) if k not in _PATH_KEYS and k != "func"}


def _emit(text: str) -> None:
    sys.stdout.write(text)


def _stage(name, fn, *a, **kw):
    try:
        return fn(*a, **kw)
    except StageError:
        raise
    except (CSPulseError, ValueError, ArithmeticError) as exc:
        raise StageError(name, exc) from exc


def _load(path: str) -> io.ProblemInstance:
    return _stage("load", io.load_instance, path)


def _derived_instance(inst: io.ProblemInstance, h: PauliSum, suffix: str, config: dict, reference=None,
                      **meta) -> io.ProblemInstance:
    md = {"derived_from": inst.name, "config": json.dumps(config, sort_keys=True)}
    md.update({k: str(v) for k, v in meta.items()})
    return io.ProblemInstance(f"{inst.name}{suffix}", h, reference, md)


# ----------------------------------------------------------------------------
# subcommands


def cmd_inspect(args) -> None:
    inst = _load(args.instance)
    h = inst.hamiltonian
    doc = {"config": effective_config(args), "name": inst.name, "n_qubits": h.n, "terms": len(h),
           "reference_energy": inst.reference_energy, "norm1": h.norm1(),
           "exact_ground": exact_ground(h)[0] if h.n <= ORACLE_LIMIT else None}
    _emit(f"name: {inst.name}\nqubits: {h.n}\nterms: {len(h)}\n")
    if doc["exact_ground"] is not None:
        _emit(f"exact ground: {doc['exact_ground']:.10f}\n")
    if inst.reference_energy is not None:
        _emit(f"reference: {inst.reference_energy:.10f}\n")
    if args.out:
        io._write_text(args.out, io.dumps(doc))


def cmd_taper(args) -> None:
    inst = _load(args.instance)
    cfg = effective_config(args)
    res = _stage("taper", tapering.taper_hamiltonian, inst.hamiltonian, args.sector)
    ref = inst.reference_energy if args.sector is None else None
    out = _derived_instance(inst, res.hamiltonian, "_tapered", cfg, ref, sector=list(res.sector),
                            symmetries=[g.label for g in res.basis.generators])
    path = _out_file(args, f"{out.name}.ham")
    io.save_instance(out, path)
    _emit(f"{inst.n} -> {res.hamiltonian.n} qubits, sector {list(res.sector)}: {path}\n")


def cmd_split(args) -> None:
    inst = _load(args.instance)
    cfg = effective_config(args)
    sp = _stage("split", contextual.split, inst.hamiltonian, args.strategy)
    st = _stage("noncontextual", contextual.decompose, list(sp.h_nc))
    sol = _stage("noncontextual", contextual.optimize_noncontextual, st, sp.h_nc, seed=args.seed)
    d = _out_dir(args)
    paths = {}
    for part, h in (("nc", sp.h_nc), ("c", sp.h_c)):
        if len(h):
            paths[part] = d / f"{inst.name}_{part}.ham"
            io.save_instance(_derived_instance(inst, h, f"_{part}", cfg), paths[part])
    summary = {"config": cfg, "seed": args.seed, "name": inst.name,
               "terms_noncontextual": len(sp.h_nc), "terms_contextual": len(sp.h_c),
               "generators": [g.label for g in st.generators], "classes": st.n_classes,
               "q": list(sol.assignment.q), "r": list(sol.assignment.r), "e_nc": sol.energy,
               "min_reachable_qubits": subspace.min_reachable_qubits(st, inst.n)}
    io._write_text(d / f"{inst.name}_split.json", io.dumps(summary))
    _emit(f"{len(sp.h_nc)} noncontextual / {len(sp.h_c)} contextual terms, E_nc = {sol.energy:.10f}\n")


def cmd_group(args) -> None:
    inst = _load(args.instance)
    modes = [args.mode] if args.mode else [grouping.QUBITWISE, grouping.GENERAL]
    rows = []
    for m in modes:
        r = _stage("group", grouping.grouping_report, inst.hamiltonian, m)
        rows.append([inst.name, r.mode, r.original_count, r.grouped_count])
        _emit(f"{r.mode}: {r.original_count} terms -> {r.grouped_count} groups\n")
    path = _out_file(args, f"{inst.name}_groups.csv")
    io.write_csv(path, ["name", "mode", "original_count", "grouped_count"], rows, effective_config(args))


def _options(args, n_target=None, oracle=None) -> vqe.PipelineOptions:
    return vqe.PipelineOptions(
        taper=not args.no_taper,
        split_strategy=args.strategy,
        n_target=n_target,
        grouping_mode=args.grouping,
        ansatz=getattr(args, "ansatz", "gate"),
        layers=getattr(args, "layers", 2),
        optimizer=vqe.OptimizerConfig(getattr(args, "optimizer", "nelder_mead"),
                                      getattr(args, "max_iterations", 100), seed=args.seed),
        shots=getattr(args, "shots", None),
        oracle=getattr(args, "oracle_vqe", False) if oracle is None else oracle,
        seed=args.seed,
    )


def _reduce_to(args, inst, prep, n_target: int, cfg: dict) -> dict:
    spec = _stage("project", subspace.choose_stabilizers, prep.solution, prep.structure, prep.correction,
                  n_target)
    red = _stage("project", subspace.project, prep.correction, subspace.build_u_w(spec))
    h = red.h_c_reduced + PauliSum.constant(red.constant_shift, red.n)
    frag = {"n_target": n_target, "terms_reduced": len(red.h_c_reduced), "constant_shift": red.constant_shift,
            "stabilizers": [[p.label, v] for p, v in spec.stabilizers], "file": None}
    if len(h) == 0:
        if not args.sweep:
            raise StageError("project", ValueError("the projected operator vanishes identically"))
        return frag
    out = _derived_instance(inst, h, f"_reduced{n_target}", cfg, e_nc=repr(prep.solution.energy),
                            stabilizers=frag["stabilizers"])
    path = _out_file(args, f"{out.name}.ham") if not args.sweep else _out_dir(args) / f"{out.name}.ham"
    io.save_instance(out, path)
    frag["file"] = path.name
    _emit(f"{prep.n} -> {red.n} qubits, {len(red.h_c_reduced)} terms, E_nc = {prep.solution.energy:.10f}: {path}\n")
    return frag


def cmd_reduce(args) -> None:
    inst = _load(args.instance)
    cfg = effective_config(args)
    prep = vqe.prepare(inst, _options(args, args.qubits, oracle=True))
    if not args.sweep:
        _reduce_to(args, inst, prep, args.qubits, cfg)
        return
    frags = [_reduce_to(args, inst, prep, k, cfg) for k in range(prep.min_qubits, prep.n + 1)]
    doc = {"config": cfg, "seed": args.seed, "name": inst.name, "e_nc": prep.solution.energy,
           "n_tapered": prep.n, "thresholds": frags}
    io._write_text(_out_dir(args) / f"{inst.name}_reduce_sweep.json", io.dumps(doc))


def cmd_solve(args) -> None:
    inst = _load(args.instance)
    cfg = effective_config(args)
    if args.sweep:
        results = vqe.run_sweep(inst, _options(args))
    else:
        results = [vqe.run_pipeline(inst, _options(args, args.qubits))]
    reports = [r.report for r in results]
    for r in reports:
        r.config = dict(cfg, pipeline=r.config)
    path = _out_file(args, f"{inst.name}_report.json")
    io.write_report(reports if args.sweep else reports[0], path)
    if args.sweep:
        io.write_csv(path.with_suffix(".csv"), io.SWEEP_COLUMNS, io.sweep_rows(reports), cfg)
    for r in reports:
        err = f", error {r.error:.3e}" if r.error is not None else ""
        _emit(f"{r.n_contextual} qubits: E = {r.e_csvqe:.10f}{err}\n")
    _emit(f"report: {path}\n")


def cmd_report(args) -> None:
    from . import plotting

    loaded = _stage("load", io.read_report, args.report)
    reports = loaded if isinstance(loaded, list) else [loaded]
    if not reports:
        raise StageError("report", ValueError("report file holds no runs"))
    cfg = {"source": effective_config(args), "runs": [r.config for r in reports]}
    d = _out_dir(args)
    stem = Path(args.report).stem
    written = [d / f"{stem}_sweep.csv", d / f"{stem}_groups.csv", d / f"{stem}_trace.csv"]
    io.write_csv(written[0], io.SWEEP_COLUMNS, io.sweep_rows(reports), cfg)
    full = max(reports, key=lambda r: r.n_contextual or 0)
    io.write_csv(written[1], io.GROUP_COLUMNS, io.group_rows(full), cfg)
    io.write_csv(written[2], ("n_target",) + io.TRACE_COLUMNS,
                 [[r.n_contextual, i, e] for r in reports for i, e in (r.trace or [])], cfg)
    if not args.no_figures:
        written.append(plotting.plot_error_curve(reports, d / f"{stem}_error.png", cfg))
        if full.groups:
            written.append(plotting.plot_grouping(full, d / f"{stem}_groups.png", cfg))
        if any(r.trace for r in reports):
            written.append(plotting.plot_convergence(reports, d / f"{stem}_convergence.png", cfg))
    for p in written:
        _emit(f"{p}\n")


# ----------------------------------------------------------------------------
# parser


def _sector(text: str) -> tuple[int, ...]:
    vals = tuple(int(v) for v in text.split(","))
    if any(v not in (1, -1) for v in vals):
        raise argparse.ArgumentTypeError("sector entries must be 1 or -1")
    return vals


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="cspulse", description=__doc__.splitlines()[0])
    p.add_argument("--config", help="JSON file of option defaults (explicit flags take precedence)")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, out_file=True, out_dir=False):
        sp.add_argument("--seed", type=int, default=0)
        if out_file:
            sp.add_argument("--out", help="output file")
        if out_dir:
            sp.add_argument("--out-dir", help=f"output directory (default ${OUT_ENV} or .)")
        else:
            sp.set_defaults(out_dir=None)

    def pipeline(sp):
        sp.add_argument("--no-taper", action="store_true", help="skip Z2 tapering")
        sp.add_argument("--strategy", choices=["greedy", "diagonal"], default="greedy",
                        help="noncontextual split strategy")
        sp.add_argument("--grouping", choices=[grouping.QUBITWISE, grouping.GENERAL], default=grouping.QUBITWISE)

    sp = sub.add_parser("inspect", help="qubit and term counts, exact ground energy")
    sp.add_argument("instance")
    common(sp)
    sp.set_defaults(func=cmd_inspect)

    sp = sub.add_parser("taper", help="remove qubits via Z2 symmetries")
    sp.add_argument("instance")
    sp.add_argument("--sector", type=_sector, help="comma-separated +-1 eigenvalues (default: lowest energy)")
    common(sp, out_dir=True)
    sp.set_defaults(func=cmd_taper)

    sp = sub.add_parser("split", help="noncontextual/contextual split and classical solve")
    sp.add_argument("instance")
    sp.add_argument("--strategy", choices=["greedy", "diagonal"], default="greedy")
    common(sp, out_file=False, out_dir=True)
    sp.set_defaults(func=cmd_split)

    sp = sub.add_parser("group", help="commuting measurement groups")
    sp.add_argument("instance")
    sp.add_argument("--mode", choices=[grouping.QUBITWISE, grouping.GENERAL])
    common(sp, out_dir=True)
    sp.set_defaults(func=cmd_group)

    sp = sub.add_parser("reduce", help="project onto a contextual subspace of the given size")
    sp.add_argument("instance")
    target = sp.add_mutually_exclusive_group(required=True)
    target.add_argument("--qubits", type=int)
    target.add_argument("--sweep", action="store_true", help="every reachable target qubit count")
    pipeline(sp)
    common(sp, out_dir=True)
    sp.set_defaults(func=cmd_reduce)

    sp = sub.add_parser("solve", help="full pipeline with VQE on the reduced problem")
    sp.add_argument("instance")
    target = sp.add_mutually_exclusive_group()
    target.add_argument("--qubits", type=int, help="target qubit count (default: full tapered size)")
    target.add_argument("--sweep", action="store_true", help="every reachable target qubit count")
    sp.add_argument("--ansatz", choices=["gate", "pulse"], default="gate")
    sp.add_argument("--layers", type=int, default=2)
    sp.add_argument("--shots", type=int, help="shots per measurement group (default: exact expectation)")
    sp.add_argument("--optimizer", choices=list(vqe.METHODS), default="nelder_mead")
    sp.add_argument("--max-iterations", type=int, default=100)
    sp.add_argument("--oracle-vqe", action="store_true", help="exact diagonalization instead of VQE")
    pipeline(sp)
    common(sp, out_dir=True)
    sp.set_defaults(func=cmd_solve)

    sp = sub.add_parser("report", help="CSV plot data and figures from a report file")
    sp.add_argument("report")
    sp.add_argument("--no-figures", action="store_true")
    common(sp, out_file=False, out_dir=True)
    sp.set_defaults(func=cmd_report)
    return p


def _apply_config(parser: argparse.ArgumentParser, argv: Sequence[str]) -> None:
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    if not known.config:
        return
    try:
        defaults = json.loads(Path(known.config).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        parser.error(f"cannot read config {known.config}: {exc}")
    if not isinstance(defaults, dict):
        parser.error("config file must hold a JSON object")
    for action in parser._subparsers._group_actions:
        for sp in action.choices.values():
            sp.set_defaults(**{k.replace("-", "_"): v for k, v in defaults.items()})


def main(argv: Sequence[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    _apply_config(parser, argv)
    args = parser.parse_args(argv)
    try:
        args.func(args)
    except StageError as exc:
        print(f"cspulse: stage '{exc.stage}' failed: {exc.cause}", file=sys.stderr)
        return 1
    except (CSPulseError, OSError, ValueError) as exc:
        print(f"cspulse: {args.command} failed: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
