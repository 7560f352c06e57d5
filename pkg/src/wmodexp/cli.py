"""Batch front end: ``wmodexp tables|simulate|cost|estimate``.

The subcommands wrap the library layers in reproduction plumbing. ``tables``
dumps the lookup tables a window pair needs, ``simulate`` builds a circuit
variant and checks it branch by branch against classical modular
exponentiation, ``cost`` prints closed-form cost rows, and ``estimate``
runs the physical-layout grid search and exports the frontier.

Every output embeds a run manifest recording the subcommand, all flag
values, the RNG seed, the configuration digest, and the package version.
Outputs are pure functions of their manifest, so two runs with the same
manifest produce the same bytes.

Exit codes: 0 on success, 1 when a verification step fails, 2 on bad input.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import random
import sys
from dataclasses import dataclass, replace
from pathlib import Path

from . import __version__
from .builders import (
    ModexpConfig,
    ModexpOptions,
    build_windowed_modexp,
    check_modexp_output,
    modexp_input_state,
)
from .circuit import tally
from .costs import VARIANTS, cost, exact_cost
from .estimator import (
    BudgetOverflow,
    EstimateRow,
    GridRanges,
    audit_row,
    grid_search,
    load_profile,
)
from .numerics import (
    ProblemInstance,
    WindowParams,
    build_direct_exp_table,
    build_mul_table,
    build_phase_fixup_table,
    build_pruned_table,
    dump_table,
    mod_pow,
)
from .sim import ContractViolation, extract, run

CIRCUIT_VARIANTS = ("original", "opt1", "opt2", "opt3", "opt4", "combined")

ESTIMATE_HEADER = (
    "n, n_e, gate err, L1, L2, d_off, g_mul, g_exp, g_sep, "
    "%, v.p.r, E[vol], Mqb, hrs, E[hrs], B Tofs"
)

COST_FIELDS = (
    "variant",
    "n",
    "n_e",
    "w_e",
    "w_m",
    "initial_bits",
    "reps",
    "adt_factor",
    "lookup_tofs",
    "add_tofs",
    "unlookup_tofs",
    "lookup_depth",
    "add_depth",
    "unlookup_depth",
    "total_tofs",
    "total_depth",
    "logical_qubits",
)


class UsageError(ValueError):
    """Bad command line input; reported on stderr with exit code 2."""


# ---------------------------------------------------------------------------
# Run manifest. Every subcommand builds one and stamps it on its output.


@dataclass(frozen=True)
class RunManifest:
    """Provenance record embedded in every output file.

    flags holds (name, rendered value) pairs in a fixed order covering the
    global flags and the subcommand's own, with defaults resolved. The
    output content is a function of this record alone.
    """

    subcommand: str
    flags: tuple[tuple[str, str], ...]
    seed: int
    config_digest: str
    version: str

    def lines(self) -> list[str]:
        return [
            f"# wmodexp {self.subcommand} v{self.version}",
            f"# seed = {self.seed}",
            f"# config sha256 = {self.config_digest}",
            "# flags: " + " ".join(f"{name}={value}" for name, value in self.flags),
        ]

    def as_dict(self) -> dict:
        return {
            "subcommand": self.subcommand,
            "flags": dict(self.flags),
            "seed": self.seed,
            "config_sha256": self.config_digest,
            "version": self.version,
        }


def _render_flag(value) -> str:
    if value is None:
        return "-"
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, (list, tuple)):
        return ",".join(_render_flag(v) for v in value)
    return str(value)


def _config_digest(path: str | None) -> str:
    if path is None:
        data = b""
    else:
        try:
            data = Path(path).read_bytes()
        except OSError as exc:
            raise UsageError(f"cannot read config file {path}: {exc}") from exc
    return hashlib.sha256(data).hexdigest()


def _manifest(args, flags: list[tuple[str, object]]) -> RunManifest:
    rendered = tuple((name, _render_flag(value)) for name, value in flags)
    return RunManifest(
        subcommand=args.subcommand,
        flags=rendered,
        seed=args.seed,
        config_digest=_config_digest(args.config),
        version=__version__,
    )


def _emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, encoding="utf-8", newline="\n")


def _num(value) -> str:
    """Full-fidelity cell rendering: ints verbatim, floats via repr."""
    if isinstance(value, float):
        return repr(value)
    return str(value)


# ---------------------------------------------------------------------------
# tables


def cmd_tables(args) -> int:
    inst = ProblemInstance(args.modulus, args.base, args.ne)
    wp = WindowParams(args.we, args.wm)
    mul = build_mul_table(inst, wp, args.exp_index, args.mul_index)
    pruned = build_pruned_table(inst, wp, args.exp_index, args.mul_index)
    low_bits = mul.addr_bits // 2 if args.low_bits is None else args.low_bits
    outcome = args.outcome
    if outcome is None:
        # The fixup table depends on an X-basis outcome; draw one from the
        # run seed so the dump stays reproducible.
        outcome = random.Random(args.seed).randrange(1 << mul.word_bits)
    fixup = build_phase_fixup_table(mul, outcome, low_bits)
    direct = build_direct_exp_table(inst, args.initial_bits)

    manifest = _manifest(
        args,
        [
            ("modulus", args.modulus),
            ("base", args.base),
            ("ne", args.ne),
            ("we", args.we),
            ("wm", args.wm),
            ("exp-index", args.exp_index),
            ("mul-index", args.mul_index),
            ("initial-bits", args.initial_bits),
            ("low-bits", low_bits),
            ("outcome", outcome),
        ],
    )
    header = "\n".join(manifest.lines()) + "\n"
    outdir = Path(args.out) if args.out is not None else Path(".")
    outdir.mkdir(parents=True, exist_ok=True)
    notes = []
    for name, table in (
        ("multiply.tbl", mul),
        ("pruned.tbl", pruned),
        ("phase_fixup.tbl", fixup),
        ("direct_exp.tbl", direct),
    ):
        path = outdir / name
        path.write_text(header + dump_table(table), encoding="utf-8", newline="\n")
        notes.append(
            f"wrote {path} ({table.kind}, {len(table)} entries, "
            f"{table.addr_bits} address bits)"
        )
    sys.stdout.write("\n".join(notes) + "\n")
    return 0


# ---------------------------------------------------------------------------
# simulate


def _variant_options(variant: str, nep: int) -> ModexpOptions:
    if variant == "original":
        return ModexpOptions()
    if variant == "opt1":
        return ModexpOptions(deferred_unlookup=True)
    if variant == "opt2":
        return ModexpOptions(selective_lookup=True)
    if variant == "opt3":
        return ModexpOptions(initial_lookup_bits=nep)
    if variant == "opt4":
        return ModexpOptions(lowdepth_unary=True)
    if variant == "combined":
        return ModexpOptions(
            deferred_unlookup=True,
            selective_lookup=True,
            initial_lookup_bits=nep,
            lowdepth_unary=True,
        )
    raise UsageError(
        f"variant {variant!r} has no circuit form; "
        f"choose one of {', '.join(CIRCUIT_VARIANTS)}, or all"
    )


def cmd_simulate(args) -> int:
    inst = ProblemInstance(args.modulus, args.base, args.ne)
    wp = WindowParams(args.we, args.wm)
    variants = CIRCUIT_VARIANTS if args.variant == "all" else (args.variant,)
    if args.variant != "all" and args.variant not in CIRCUIT_VARIANTS:
        raise UsageError(
            f"variant {args.variant!r} has no circuit form; "
            f"choose one of {', '.join(CIRCUIT_VARIANTS)}, or all"
        )

    manifest = _manifest(
        args,
        [
            ("modulus", args.modulus),
            ("base", args.base),
            ("ne", args.ne),
            ("we", args.we),
            ("wm", args.wm),
            ("nep", args.nep),
            ("variant", args.variant),
        ],
    )
    lines = manifest.lines()
    lines.append(
        f"instance: modulus={inst.modulus} base={inst.base} exp_bits={inst.exp_bits}"
    )
    failures = 0
    functional: dict[str, tuple] = {}
    for variant in variants:
        cfg = ModexpConfig(inst, wp, _variant_options(variant, args.nep))
        circuit = build_windowed_modexp(cfg)
        state = modexp_input_state(circuit, seed=args.seed)
        final = run(circuit, state)
        problems = check_modexp_output(circuit, inst, final)
        meter = tally(circuit)
        predicted = exact_cost(cfg)

        lines.append(f"variant {variant}")
        exp_qubits = circuit.register("exponent").qubits
        result_qubits = circuit.register(circuit.result_register).qubits
        outputs = []
        for key, phase in final.branches.items():
            x = extract(key, exp_qubits)
            value = extract(key, result_qubits)
            outputs.append((x, value, phase))
        outputs.sort()
        for x, value, phase in outputs:
            want = mod_pow(inst.base, x, inst.modulus)
            verdict = "ok" if value == want and phase == 1 else "MISMATCH"
            lines.append(
                f"  x={x} result={value} expected={want} phase={phase:+d} {verdict}"
            )
        functional[variant] = tuple((x, value) for x, value, _ in outputs)
        for problem in problems:
            lines.append(f"  problem: {problem}")

        meter_ok = (
            meter.toffoli_count == predicted.total_tofs
            and meter.qubit_highwater == predicted.qubits
        )
        lines.append(
            f"  meter: toffolis {meter.toffoli_count} "
            f"(predicted {predicted.total_tofs}), qubits {meter.qubit_highwater} "
            f"(predicted {predicted.qubits}) {'ok' if meter_ok else 'MISMATCH'}"
        )
        for slot in circuit.slots:
            lines.append(f"  outcome {slot} = {final.transcript[slot]:x}")
        if problems or not meter_ok:
            failures += 1

    if len(variants) > 1:
        agree = len(set(functional.values())) == 1
        lines.append(f"variants agree: {'yes' if agree else 'NO'}")
        if not agree:
            failures += 1
    lines.append("result: " + ("PASS" if not failures else f"FAIL ({failures})"))
    _emit("\n".join(lines) + "\n", args.out)
    return 0 if not failures else 1


# ---------------------------------------------------------------------------
# cost


def cmd_cost(args) -> int:
    if args.variant == "all":
        variants = VARIANTS
    elif args.variant in VARIANTS:
        variants = (args.variant,)
    else:
        raise UsageError(
            f"unknown variant {args.variant!r}; "
            f"choose one of {', '.join(VARIANTS)}, or all"
        )
    rows = []
    for variant in variants:
        initial = args.nep
        if args.variant == "all" and variant not in ("opt3", "combined"):
            initial = 0
        rows.append(cost(variant, args.n, args.ne, args.we, args.wm, initial))

    manifest = _manifest(
        args,
        [
            ("n", args.n),
            ("ne", args.ne),
            ("we", args.we),
            ("wm", args.wm),
            ("nep", args.nep),
            ("variant", args.variant),
        ],
    )
    lines = manifest.lines()
    lines.append(", ".join(COST_FIELDS))
    for row in rows:
        lines.append(", ".join(_num(getattr(row, field)) for field in COST_FIELDS))
    _emit("\n".join(lines) + "\n", args.out)
    return 0


# ---------------------------------------------------------------------------
# estimate


def _estimate_cells(row: EstimateRow) -> list[str]:
    point = row.point
    cells = [
        str(row.n),
        str(row.n_e),
        format(row.p_phys, ".6g"),
        str(point.L1),
        str(point.L2),
        str(point.d_off),
        str(point.g_mul),
        str(point.g_exp),
        str(point.g_sep),
    ]
    for value in (
        100.0 * row.retry_risk,
        row.vol_per_run,
        row.expected_vol,
        row.mqb,
        row.hours,
        row.expected_hours,
        row.b_tofs,
    ):
        cells.append(format(value, ".6g"))
    return cells


def _estimate_dict(row: EstimateRow) -> dict:
    keys = [key.strip() for key in ESTIMATE_HEADER.split(",")]
    values = [
        row.n,
        row.n_e,
        row.p_phys,
        row.point.L1,
        row.point.L2,
        row.point.d_off,
        row.point.g_mul,
        row.point.g_exp,
        row.point.g_sep,
        100.0 * row.retry_risk,
        row.vol_per_run,
        row.expected_vol,
        row.mqb,
        row.hours,
        row.expected_hours,
        row.b_tofs,
    ]
    payload = dict(zip(keys, values))
    payload["binding"] = row.binding
    return payload


def _parse_point(text: str) -> GridRanges:
    parts = text.split(",")
    if len(parts) != 6:
        raise UsageError("--point wants six integers: L1,L2,d_off,g_mul,g_exp,g_sep")
    try:
        l1, l2, d_off, g_mul, g_exp, g_sep = (int(part) for part in parts)
    except ValueError as exc:
        raise UsageError(f"bad --point value: {exc}") from exc
    return GridRanges(
        l1=(l1,),
        l2=(l2,),
        d_off=(d_off,),
        g_exp=(g_exp,),
        g_mul=(g_mul,),
        g_sep=(g_sep,),
    )


def cmd_estimate(args) -> int:
    if args.variant not in VARIANTS:
        raise UsageError(
            f"unknown variant {args.variant!r}; choose one of {', '.join(VARIANTS)}"
        )
    profile = load_profile(args.config)
    if args.perr is not None:
        profile = replace(profile, p_phys=args.perr)
    q = profile.q if args.q is None else args.q
    fmt = args.format
    if fmt is None:
        fmt = "json" if args.out is not None and args.out.endswith(".json") else "csv"
    ranges = _parse_point(args.point) if args.point else None

    kwargs = {"ranges": ranges}
    if args.budget_mqb:
        kwargs["budgets"] = tuple(args.budget_mqb)
    result = grid_search(args.n, args.ne, profile, args.variant, q, **kwargs)

    manifest = _manifest(
        args,
        [
            ("n", args.n),
            ("ne", args.ne),
            ("perr", profile.p_phys),
            ("variant", args.variant),
            ("q", q),
            ("budget-mqb", args.budget_mqb or None),
            ("point", args.point),
            ("format", fmt),
        ],
    )

    emitted: list[EstimateRow] = list(result.frontier)
    if args.budget_mqb:
        emitted = [row for _, row in result.by_budget if row is not None]
    for row in emitted:
        audit_row(row)

    if fmt == "json":
        payload = {
            "manifest": manifest.as_dict(),
            "best": _estimate_dict(result.best),
            "frontier": [_estimate_dict(row) for row in result.frontier],
        }
        if args.budget_mqb:
            payload["by_budget"] = [
                {
                    "budget_mqb": budget,
                    "row": _estimate_dict(row) if row is not None else None,
                }
                for budget, row in result.by_budget
            ]
        _emit(json.dumps(payload, indent=2) + "\n", args.out)
        return 0

    best = result.best
    lines = manifest.lines()
    lines.append(
        "# best: L1={} L2={} d_off={} g_mul={} g_exp={} g_sep={} "
        "E[hrs]={:.6g} Mqb={:.6g} binding={}".format(
            best.point.L1,
            best.point.L2,
            best.point.d_off,
            best.point.g_mul,
            best.point.g_exp,
            best.point.g_sep,
            best.expected_hours,
            best.mqb,
            best.binding,
        )
    )
    lines.append(ESTIMATE_HEADER)
    if args.budget_mqb:
        for budget, row in result.by_budget:
            if row is None:
                lines.append(f"# budget {budget:.6g} Mqb: no frontier row fits")
            else:
                lines.append(f"# budget {budget:.6g} Mqb")
                lines.append(", ".join(_estimate_cells(row)))
    else:
        for row in result.frontier:
            lines.append(", ".join(_estimate_cells(row)))
    _emit("\n".join(lines) + "\n", args.out)
    return 0


# ---------------------------------------------------------------------------
# Argument parsing and dispatch.


def _add_global_flags(parser: argparse.ArgumentParser, top: bool) -> None:
    # The same three flags are accepted before and after the subcommand.
    # The subparser copies default to SUPPRESS so they never overwrite a
    # value parsed at the top level.
    default = (lambda v: v) if top else (lambda v: argparse.SUPPRESS)
    parser.add_argument(
        "--seed", type=int, default=default(0), help="RNG seed recorded in the manifest"
    )
    parser.add_argument(
        "--config", default=default(None), help="calibration config file (key = value)"
    )
    parser.add_argument(
        "--out", default=default(None), help="output path (default: stdout)"
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="wmodexp",
        description="Windowed modular exponentiation toolkit",
    )
    _add_global_flags(parser, top=True)
    common = argparse.ArgumentParser(add_help=False)
    _add_global_flags(common, top=False)
    sub = parser.add_subparsers(dest="subcommand", required=True)

    t = sub.add_parser(
        "tables", parents=[common], help="dump lookup tables in the text format"
    )
    t.add_argument("--modulus", type=int, default=15)
    t.add_argument("--base", type=int, default=7)
    t.add_argument("--ne", type=int, default=4, help="exponent register bits")
    t.add_argument("--we", type=int, default=2, help="exponent window bits")
    t.add_argument("--wm", type=int, default=2, help="multiplicand window bits")
    t.add_argument("--exp-index", type=int, default=0)
    t.add_argument("--mul-index", type=int, default=0)
    t.add_argument("--initial-bits", type=int, default=2)
    t.add_argument(
        "--low-bits",
        type=int,
        default=None,
        help="fixup split (default: half the address bits)",
    )
    t.add_argument(
        "--outcome",
        type=int,
        default=None,
        help="fixup measurement outcome (default: drawn from the seed)",
    )
    t.set_defaults(func=cmd_tables)

    s = sub.add_parser(
        "simulate", parents=[common], help="build, simulate, and verify a variant"
    )
    s.add_argument("--modulus", type=int, default=15)
    s.add_argument("--base", type=int, default=7)
    s.add_argument("--ne", type=int, default=4)
    s.add_argument("--we", type=int, default=2)
    s.add_argument("--wm", type=int, default=2)
    s.add_argument("--nep", type=int, default=2, help="initial lookup bits (opt3)")
    s.add_argument("--variant", default="original")
    s.set_defaults(func=cmd_simulate)

    c = sub.add_parser("cost", parents=[common], help="closed-form cost rows as CSV")
    c.add_argument("--n", type=int, default=2048)
    c.add_argument("--ne", type=int, default=3029)
    c.add_argument("--we", type=int, default=5)
    c.add_argument("--wm", type=int, default=5)
    c.add_argument("--nep", type=int, default=0)
    c.add_argument("--variant", default="original")
    c.set_defaults(func=cmd_cost)

    e = sub.add_parser(
        "estimate", parents=[common], help="grid search and frontier export"
    )
    e.add_argument("--n", type=int, default=2048)
    e.add_argument("--ne", type=int, default=3029)
    e.add_argument("--perr", type=float, default=None, help="physical gate error rate")
    e.add_argument("--variant", default="original")
    e.add_argument("--q", type=float, default=None, help="skewed-volume exponent")
    e.add_argument(
        "--budget-mqb",
        type=float,
        action="append",
        help="emit the best row under this qubit budget (repeatable)",
    )
    e.add_argument(
        "--point",
        default=None,
        help="restrict the grid to one L1,L2,d_off,g_mul,g_exp,g_sep point",
    )
    e.add_argument("--format", choices=("csv", "json"), default=None)
    e.set_defaults(func=cmd_estimate)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ContractViolation as exc:
        print(f"verification failure: {exc}", file=sys.stderr)
        return 1
    except AssertionError as exc:
        print(f"verification failure: {exc}", file=sys.stderr)
        return 1
    except (ValueError, BudgetOverflow, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
