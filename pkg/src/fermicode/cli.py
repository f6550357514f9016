"""Command-line front end.

One executable, ``fermicode``, with a subcommand per batch task:

  params          derive and print a code parameter record
  codebook        list every elementary codeword of a code
  encode          stored-bit patterns -> codeword strings
  decode          codeword strings -> stored-bit patterns
  verify          run the codeword integrity checks
  synth-parity    gate program for one encoded parity operator
  synth-term      compile a fermionic Hamiltonian file term by term
  synth-hop       gate program for a hopping term exp(i phi (a+b + b+a))
  synth-mcphase   multi-controlled phase program on n qubits
  route           insert swaps for a linear-nearest-neighbor layout
  simulate        statevector amplitudes of a program on a basis state
  scan-hermite    interpolant minima scan over a size range (CSV + figure)
  scan-threshold  prime-gap slack scan (CSV + figure)
  estimate        simulation cost projection, or (M, Q) plot-data series
  compare         qubit/gate table across encodings (text, CSV, figure)

Every run is deterministic: given the same inputs, flags and config file,
outputs are byte-identical.  Numeric knobs (precision bits, simulation cap,
cost constants) come from ``config``, may be overridden by a flat
``key = value`` file passed as ``--config``, and individual flags win over
both.  Errors from any layer turn into a one-line diagnostic on stderr and
a nonzero exit status.

Bit patterns on the wire: a stored-bit pattern is an M-character 0/1 string
whose leftmost character is bit 0.  Codewords use the block form written by
the code serializer (L blocks of L' characters).  Angles accept either a
decimal string or the exact form ``N/D pi``.
"""

import argparse
import csv
import io
import multiprocessing
import sys
from pathlib import Path
from typing import List, Optional, Sequence

from . import config
from .circuits import (
    count_gates,
    parse_angle,
    parse_program,
    route_linear,
    serialize_program,
    simulate,
)
from .codes import (
    codebook,
    decode,
    derive_params,
    encode,
    format_codeword,
    params_record,
    parse_codeword,
    parse_params_record,
    validate_params,
    verify_code,
)
from .fenwick import PauliSupport
from .hermite import scan
from .qsp import synth_multi_ctrl_phase
from .resources import (
    compare_encodings,
    optimal_degree,
    qubit_series,
    rows_to_csv,
    rows_to_text,
    sim_cost,
    sim_cost_text,
    threshold_scan,
    threshold_to_csv,
)
from .synthesize import (
    compile_terms,
    encode_pauli,
    one_norm,
    parse_hamiltonian,
    synth_hop,
)


# ---------------------------------------------------------------------------
# Small shared plumbing


def _emit(path: Optional[str], text: str) -> None:
    """Write to a file, or stdout when no path (or '-') was given."""
    if not text.endswith("\n"):
        text += "\n"
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _read(path: str) -> str:
    return Path(path).read_text()


def _fmt_float(v) -> str:
    return "-" if v is None else repr(float(v))


def _bits_to_string(b: int, M: int) -> str:
    return "".join("1" if (b >> i) & 1 else "0" for i in range(M))


def _string_to_bits(text: str, M: int) -> int:
    text = text.strip()
    if len(text) != M or set(text) - {"0", "1"}:
        raise ValueError(
            f"stored pattern must be exactly {M} characters of 0/1, got {text!r}"
        )
    return sum(1 << i for i, ch in enumerate(text) if ch == "1")


def _add_code_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--modes", type=int, help="number of fermionic modes M")
    sub.add_argument(
        "--lprime",
        type=int,
        help="field size L'; without --modes, M = lprime**(degree+1)",
    )
    sub.add_argument(
        "--degree",
        default="auto",
        help="polynomial degree D, or 'auto' to minimize qubits (needs --fermions)",
    )
    sub.add_argument("--fermions", type=int, help="particle number F")
    sub.add_argument(
        "--raw-g", dest="raw_g", type=int, help="stored-weight cap G, bypassing F"
    )
    sub.add_argument(
        "--add-margin",
        action="store_true",
        help="use the F+4 weight margin instead of the bare bound",
    )
    sub.add_argument(
        "--params-file",
        help="read a previously written parameter record instead of deriving",
    )


def _build_params(args):
    if args.params_file:
        params = parse_params_record(_read(args.params_file))
        validate_params(params)
        return params
    degree = args.degree
    auto = degree == "auto"
    if not auto:
        degree = int(degree)
    if args.modes is not None:
        M = args.modes
    elif args.lprime is not None:
        if auto:
            raise ValueError("--lprime without --modes needs an explicit --degree")
        M = args.lprime ** (degree + 1)
    else:
        raise ValueError("give --modes, --lprime, or --params-file")
    if auto:
        if args.fermions is None:
            raise ValueError("--degree auto needs --fermions")
        if args.raw_g is not None:
            raise ValueError("--degree auto optimizes over F; drop --raw-g")
        degree, params = optimal_degree(M, args.fermions)
        if args.add_margin:
            params = derive_params(
                M, degree, F=args.fermions, add_four_margin=True
            )
    else:
        params = derive_params(
            M,
            degree,
            F=args.fermions,
            G=args.raw_g,
            add_four_margin=args.add_margin,
        )
    if args.lprime is not None and params.Lprime != args.lprime:
        raise ValueError(
            f"derived field size {params.Lprime} != requested {args.lprime}"
        )
    return params


# ---------------------------------------------------------------------------
# Subcommand handlers


def cmd_params(args) -> int:
    _emit(args.output, params_record(_build_params(args)))
    return 0


def cmd_codebook(args) -> int:
    params = _build_params(args)
    words = codebook(params)
    _emit(args.output, "\n".join(format_codeword(w, params) for w in words))
    return 0


def cmd_encode(args) -> int:
    params = _build_params(args)
    if (args.bits is None) == (args.input is None):
        raise ValueError("give exactly one of --bits or --input")
    lines = [args.bits] if args.bits else _read(args.input).splitlines()
    out = [
        format_codeword(encode(_string_to_bits(line, params.M), params), params)
        for line in lines
        if line.strip()
    ]
    _emit(args.output, "\n".join(out))
    return 0


def cmd_decode(args) -> int:
    params = _build_params(args)
    if (args.word is None) == (args.input is None):
        raise ValueError("give exactly one of --word or --input")
    lines = [args.word] if args.word else _read(args.input).splitlines()
    out = [
        _bits_to_string(decode(parse_codeword(line, params), params), params.M)
        for line in lines
        if line.strip()
    ]
    _emit(args.output, "\n".join(out))
    return 0


def cmd_verify(args) -> int:
    params = _build_params(args)
    mode = args.mode
    if mode == "auto":
        budget = params.Lprime ** (params.D + 1) <= 4096
        mode = "exhaustive" if budget else "sampled"
    report = verify_code(params, mode, trials=args.trials, seed=args.seed)
    lines = [
        f"mode {report.mode}",
        f"modes_checked {report.modes_checked}",
        f"weight_failures {report.weight_failures}",
        f"pairs_checked {report.pairs_checked}",
        f"max_overlap {report.max_overlap}",
        f"roundtrips_checked {report.roundtrips_checked}",
        f"roundtrip_failures {report.roundtrip_failures}",
        f"margins_checked {report.margins_checked}",
        f"margin_failures {report.margin_failures}",
        f"passed {'yes' if report.passed else 'no'}",
    ]
    _emit(args.output, "\n".join(lines))
    return 0 if report.passed else 1


def cmd_synth_parity(args) -> int:
    params = _build_params(args)
    prog = encode_pauli(
        PauliSupport(x_bits=frozenset(), z_bits=frozenset({args.bit})), params
    )
    _emit(args.output, serialize_program(prog))
    return 0


def cmd_synth_term(args) -> int:
    params = _build_params(args)
    terms = parse_hamiltonian(_read(args.hamiltonian), audit=args.audit)
    encoded = compile_terms(terms, params)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(
        [
            "index",
            "x_bits",
            "z_bits",
            "coefficient",
            "single_qubit",
            "controlled",
            "doubly_controlled",
            "swaps",
        ]
    )
    for k, term in enumerate(encoded):
        name = f"term_{k:03d}.prog"
        (out_dir / name).write_text(serialize_program(term.program))
        cost = count_gates(term.program)
        writer.writerow(
            [
                k,
                "+".join(map(str, sorted(term.pauli.x_bits))) or "-",
                "+".join(map(str, sorted(term.pauli.z_bits))) or "-",
                repr(term.coefficient),
                cost.single_qubit,
                cost.controlled,
                cost.doubly_controlled,
                cost.swaps,
            ]
        )
    (out_dir / "manifest.csv").write_text(buf.getvalue())
    sys.stdout.write(f"terms {len(encoded)}\n")
    sys.stdout.write(f"lambda {one_norm(encoded):.12g}\n")
    return 0


def cmd_synth_hop(args) -> int:
    params = _build_params(args)
    prog = synth_hop(args.mode_i, args.mode_j, parse_angle(args.phi), params)
    _emit(args.output, serialize_program(prog))
    return 0


def cmd_synth_mcphase(args) -> int:
    _emit(args.output, serialize_program(synth_multi_ctrl_phase(args.size)))
    return 0


def cmd_route(args) -> int:
    prog = parse_program(_read(args.program))
    order = None
    if args.order:
        order = tuple(int(tok) for tok in args.order.split(","))
    routed = route_linear(prog, order)
    _emit(args.output, serialize_program(routed))
    sys.stdout.write(f"swaps {count_gates(routed).swaps}\n")
    return 0


def cmd_simulate(args) -> int:
    prog = parse_program(_read(args.program))
    text = args.state.strip()
    if len(text) == prog.qubit_count and not set(text) - {"0", "1"}:
        initial = sum(1 << i for i, ch in enumerate(text) if ch == "1")
    else:
        initial = int(text, 0)
    cap = args.cap if args.cap is not None else config.SIM_QUBIT_CAP
    state = simulate(prog, initial, cap=cap)
    lines = [
        f"{idx} {amp.real:+.12e} {amp.imag:+.12e}"
        for idx, amp in enumerate(state)
        if abs(amp) > 1e-12
    ]
    _emit(args.output, "\n".join(lines))
    return 0


def _scan_worker(task):
    kind, size, bits = task
    row = scan(kind, [size], bits)[0]
    return (
        row.kind,
        row.size,
        row.degree,
        None if row.least_local_min is None else float(row.least_local_min),
        None if row.x_at_min is None else float(row.x_at_min),
        row.minima_count,
        row.precision_bits,
    )


def cmd_scan_hermite(args) -> int:
    kind = args.kind
    step = args.step
    if step is None:
        step = 2 if kind == "majority" else 1
    if kind == "majority" and args.start % 2 == 0:
        raise ValueError("majority sizes are odd; --from must be odd")
    sizes = list(range(args.start, args.stop + 1, step))
    if not sizes:
        raise ValueError("empty size range")
    bits = (
        args.precision_bits
        if args.precision_bits is not None
        else config.SCAN_PRECISION_BITS
    )
    tasks = [(kind, size, bits) for size in sizes]
    if args.jobs > 1:
        with multiprocessing.Pool(processes=args.jobs) as pool:
            results = pool.map(_scan_worker, tasks)
    else:
        results = [_scan_worker(t) for t in tasks]
    results.sort(key=lambda r: r[1])
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(
        [
            "kind",
            "size",
            "degree",
            "least_local_min",
            "x_at_min",
            "minima_count",
            "precision_bits",
        ]
    )
    for kind_, size, degree, least, x_at, count, bits_ in results:
        writer.writerow(
            [kind_, size, degree, _fmt_float(least), _fmt_float(x_at), count, bits_]
        )
    _emit(args.output, buf.getvalue())
    if args.figure:
        from .hermite import ScanRow
        from . import figures

        rows = [ScanRow(*r) for r in results if r[3] is not None]
        figures.save_scan_minima(rows, args.figure)
    return 0


def cmd_scan_threshold(args) -> int:
    rows = threshold_scan(args.l_max)
    _emit(args.output, threshold_to_csv(rows))
    if args.figure:
        from . import figures

        figures.save_threshold_ks(rows, args.figure)
    sys.stdout.write(f"max_k {max((r.k_max for r in rows), default=0)}\n")
    return 0


def cmd_estimate(args) -> int:
    if args.series:
        if args.fermions is None:
            raise ValueError("--series needs --fermions")
        values = sorted(int(tok) for tok in args.series.split(","))
        series = qubit_series(values, args.fermions)
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["encoding", "modes", "qubits"])
        for name in sorted(series):
            for m, q in series[name]:
                writer.writerow([name, m, q])
        _emit(args.output, buf.getvalue())
        if args.figure:
            from . import figures

            figures.save_qubit_series(series, args.figure, fermions=args.fermions)
        return 0
    if args.kind is None:
        raise ValueError("give --kind qdrift|rpe, or --series for plot data")
    if args.lam is None:
        raise ValueError("cost projection needs --lam")
    params = _build_params(args)
    if args.kind == "qdrift":
        if args.duration is None or args.epsilon is None:
            raise ValueError("qdrift needs --lam, --duration and --epsilon")
        c = sim_cost("qdrift", args.lam, args.duration, args.epsilon, params)
    else:
        if args.delta is None or args.eta is None:
            raise ValueError("rpe needs --lam, --delta and --eta")
        c = sim_cost("rpe", args.lam, args.delta, args.eta, params)
    _emit(args.output, sim_cost_text(c))
    return 0


def cmd_compare(args) -> int:
    rows = compare_encodings(args.modes, args.fermions)
    sys.stdout.write(rows_to_text(rows) + "\n")
    if args.output:
        _emit(args.output, rows_to_csv(rows))
    if args.figure:
        from . import figures

        figures.save_compare_bars(rows, args.figure)
    return 0


# ---------------------------------------------------------------------------
# Parser wiring


def _out_flag(sub, default_help="output file (default: stdout)"):
    sub.add_argument("--output", "-o", help=default_help)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fermicode",
        description="compile and cost fermionic operators in a polynomial code",
    )
    parser.add_argument(
        "--config", help="flat key = value file overriding package tunables"
    )
    subs = parser.add_subparsers(dest="subcommand", required=True)

    sub = subs.add_parser("params", help="derive a code parameter record")
    _add_code_flags(sub)
    _out_flag(sub)
    sub.set_defaults(handler=cmd_params)

    sub = subs.add_parser("codebook", help="list elementary codewords")
    _add_code_flags(sub)
    _out_flag(sub)
    sub.set_defaults(handler=cmd_codebook)

    sub = subs.add_parser("encode", help="stored-bit patterns to codewords")
    _add_code_flags(sub)
    sub.add_argument("--bits", help="one stored pattern given inline")
    sub.add_argument("--input", help="file with one stored pattern per line")
    _out_flag(sub)
    sub.set_defaults(handler=cmd_encode)

    sub = subs.add_parser("decode", help="codewords to stored-bit patterns")
    _add_code_flags(sub)
    sub.add_argument("--word", help="one codeword given inline")
    sub.add_argument("--input", help="file with one codeword per line")
    _out_flag(sub)
    sub.set_defaults(handler=cmd_decode)

    sub = subs.add_parser("verify", help="codeword integrity checks")
    _add_code_flags(sub)
    sub.add_argument(
        "--mode",
        choices=["auto", "exhaustive", "sampled"],
        default="auto",
        help="auto picks exhaustive when the codebook fits the budget",
    )
    sub.add_argument("--trials", type=int, default=10**4)
    sub.add_argument("--seed", type=int, default=0)
    _out_flag(sub)
    sub.set_defaults(handler=cmd_verify)

    sub = subs.add_parser("synth-parity", help="program for one encoded parity")
    _add_code_flags(sub)
    sub.add_argument("--bit", type=int, required=True, help="stored bit index")
    _out_flag(sub)
    sub.set_defaults(handler=cmd_synth_parity)

    sub = subs.add_parser("synth-term", help="compile a Hamiltonian file")
    _add_code_flags(sub)
    sub.add_argument("--hamiltonian", required=True, help="term file to compile")
    sub.add_argument(
        "--out-dir", required=True, help="directory for programs + manifest.csv"
    )
    sub.add_argument(
        "--audit", action="store_true", help="require an explicitly Hermitian file"
    )
    sub.set_defaults(handler=cmd_synth_term)

    sub = subs.add_parser("synth-hop", help="program for a hopping term")
    _add_code_flags(sub)
    sub.add_argument("--mode-i", dest="mode_i", type=int, required=True)
    sub.add_argument("--mode-j", dest="mode_j", type=int, required=True)
    sub.add_argument("--phi", required=True, help="angle: decimal or 'N/D pi'")
    _out_flag(sub)
    sub.set_defaults(handler=cmd_synth_hop)

    sub = subs.add_parser("synth-mcphase", help="multi-controlled phase program")
    sub.add_argument("--size", type=int, required=True, help="total qubits n")
    _out_flag(sub)
    sub.set_defaults(handler=cmd_synth_mcphase)

    sub = subs.add_parser("route", help="linear-nearest-neighbor routing")
    sub.add_argument("--program", required=True, help="program file to route")
    sub.add_argument("--order", help="initial wire order, e.g. 2,0,1")
    _out_flag(sub)
    sub.set_defaults(handler=cmd_route)

    sub = subs.add_parser("simulate", help="amplitudes on a basis state")
    sub.add_argument("--program", required=True)
    sub.add_argument(
        "--state", required=True, help="0/1 string (qubit 0 first) or integer"
    )
    sub.add_argument("--cap", type=int, help="qubit cap override")
    _out_flag(sub)
    sub.set_defaults(handler=cmd_simulate)

    sub = subs.add_parser("scan-hermite", help="interpolant minima scan")
    sub.add_argument(
        "--kind", choices=["majority", "ctrl_phase"], default="majority"
    )
    sub.add_argument("--from", dest="start", type=int, required=True)
    sub.add_argument("--to", dest="stop", type=int, required=True)
    sub.add_argument("--step", type=int, help="default: 2 for majority, else 1")
    sub.add_argument("--precision-bits", dest="precision_bits", type=int)
    sub.add_argument("--jobs", type=int, default=1)
    sub.add_argument("--figure", help="also render the minima plot to this file")
    _out_flag(sub, "CSV output file (default: stdout)")
    sub.set_defaults(handler=cmd_scan_hermite)

    sub = subs.add_parser("scan-threshold", help="prime-gap slack scan")
    sub.add_argument("--l-max", dest="l_max", type=int, required=True)
    sub.add_argument("--figure", help="also render the step plot to this file")
    _out_flag(sub, "CSV output file (default: stdout)")
    sub.set_defaults(handler=cmd_scan_threshold)

    sub = subs.add_parser("estimate", help="cost projection or plot-data series")
    _add_code_flags(sub)
    sub.add_argument("--kind", choices=["qdrift", "rpe"])
    sub.add_argument("--lam", type=float, help="Hamiltonian one-norm")
    sub.add_argument("--duration", type=float, help="evolution time (qdrift)")
    sub.add_argument("--epsilon", type=float, help="error budget (qdrift)")
    sub.add_argument("--delta", type=float, help="phase precision (rpe)")
    sub.add_argument("--eta", type=float, help="failure budget (rpe)")
    sub.add_argument(
        "--series", help="comma-separated mode counts: emit (M, Q) per encoding"
    )
    sub.add_argument("--figure", help="render the series plot to this file")
    _out_flag(sub)
    sub.set_defaults(handler=cmd_estimate)

    sub = subs.add_parser("compare", help="qubit/gate table across encodings")
    sub.add_argument("--modes", type=int, required=True)
    sub.add_argument("--fermions", type=int, required=True)
    sub.add_argument("--figure", help="render the bar chart to this file")
    _out_flag(sub, "CSV output file (text table always goes to stdout)")
    sub.set_defaults(handler=cmd_compare)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.config:
            config.apply_overrides(config.load_overrides(_read(args.config)))
        return args.handler(args)
    except (ValueError, RuntimeError, OSError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
