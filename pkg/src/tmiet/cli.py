"""Command line entry point ``tmiet``.

Exit codes: 0 success, 1 analysis failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import re
import sys

from . import acceptance
from .export import report_to_json, stepmap_to_csv, stepmap_to_svg
from .iet import (PipelineError, build_part_L, build_T_n, build_T_part_n, verify_theorem,
                  von_neumann_kakutani)
from .language import (SpecialKind, build_factor_table, special_factors,
                       trace_special_branches)
from .measure import DEFAULT_EPS_FREQ, default_window, estimate_frequencies
from .ordering import Extended, Verdict, check_consecutive, resolve
from .substitution import parse_substitution, thue_morse_substitution
from .words import format_word, parse_word

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


def _positive(kind):
    def convert(text):
        value = kind(text)
        if value <= 0:
            raise argparse.ArgumentTypeError(f"must be positive, got {text}")
        return value
    return convert


def _add_language(p: argparse.ArgumentParser, fixed_point: bool = True):
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--thue-morse", type=int, metavar="M",
                   help="generalized Thue-Morse substitution on M letters")
    g.add_argument("--subst", metavar="SPEC", help='explicit substitution, e.g. "0:01,1:12,2:20"')
    if fixed_point:
        p.add_argument("--fixed-point", type=int, metavar="K", default=None,
                       help="letter whose fixed point generates the language (default: smallest)")


def _add_output(p: argparse.ArgumentParser, formats, default):
    p.add_argument("--format", choices=formats, default=default)
    p.add_argument("--out", metavar="PATH", help="write to PATH instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="tmiet", description="Languages of substitutions and their "
                                               "infinite interval exchanges.")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND", parser_class=_Parser)
    sub.required = True

    p = sub.add_parser("factors", help="list Fact(n)")
    _add_language(p)
    p.add_argument("--len", type=_positive(int), required=True)
    _add_output(p, ("tsv", "json"), "tsv")

    p = sub.add_parser("special", help="special factors of a length with extension counts")
    _add_language(p)
    p.add_argument("--len", type=_positive(int), required=True)
    p.add_argument("--kind", choices=("left", "right", "bi"), default="bi")
    _add_output(p, ("tsv", "json"), "tsv")

    p = sub.add_parser("branches", help="infinite left special branches")
    _add_language(p)
    p.add_argument("--depth", type=_positive(int), required=True)
    _add_output(p, ("tsv", "json"), "tsv")

    p = sub.add_parser("consecutive", help="consecutivity verdict for two words")
    _add_language(p)
    p.add_argument("--branch", action="append", default=[], metavar="B",
                   help="K for the fixed point of K, or AwK for the letter A followed by it")
    p.add_argument("--word", action="append", default=[], metavar="W",
                   help="explicit word (digits, or dot-separated letters)")
    p.add_argument("--depth", type=_positive(int), default=acceptance.CERT_DEPTH)
    _add_output(p, ("json",), "json")

    p = sub.add_parser("measure", help="estimated factor frequencies")
    _add_language(p)
    p.add_argument("--resolution", type=_positive(int), required=True)
    p.add_argument("--len", type=_positive(int), default=None,
                   help="factor length to list (default: the resolution)")
    p.add_argument("--window", type=_positive(int), default=None,
                   help="prefix length to count in (default: $TMIET_WINDOW or 4194304)")
    _add_output(p, ("tsv", "json"), "tsv")

    p = sub.add_parser("iet", help="interval exchange approximations")
    isub = p.add_subparsers(dest="iet_command", metavar="ACTION", parser_class=_Parser)
    isub.required = True

    q = isub.add_parser("build", help="step map T_n (equal lengths) or T_part (measured)")
    _add_language(q)
    q.add_argument("--mode", choices=("tn", "part"), default="tn")
    q.add_argument("--len", type=_positive(int), required=True)
    q.add_argument("--window", type=_positive(int), default=None)
    q.add_argument("--eps-freq", type=_positive(float), default=DEFAULT_EPS_FREQ)
    _add_output(q, ("csv", "tsv", "svg"), "csv")

    q = isub.add_parser("verify", help="count and cluster the non-injectivity points")
    q.add_argument("--thue-morse", type=int, metavar="M", required=True)
    q.add_argument("--depth", type=_positive(int), default=acceptance.CERT_DEPTH)
    q.add_argument("--resolution", type=_positive(int), default=10)
    q.add_argument("--window", type=_positive(int), default=None)
    q.add_argument("--eps-cluster", type=_positive(float), default=acceptance.EPS_CLUSTER)
    q.add_argument("--json", metavar="PATH", help="also write the JSON report to PATH")
    _add_output(q, ("json", "svg"), "json")

    q = isub.add_parser("vnk", help="von Neumann-Kakutani map")
    q.add_argument("--base", type=int, default=2)
    q.add_argument("--levels", type=_positive(int), default=20)
    _add_output(q, ("csv", "tsv", "svg"), "csv")

    p = sub.add_parser("selftest", help="run the acceptance checks")
    p.add_argument("--seed", type=int, default=0, help="seed of the sampled checks")
    return parser


def _substitution(args):
    if args.thue_morse is not None:
        if not 2 <= args.thue_morse <= 255:
            raise UsageError(f"--thue-morse must lie in 2..255, got {args.thue_morse}")
        return thue_morse_substitution(args.thue_morse)
    try:
        return parse_substitution(args.subst)
    except ValueError as exc:
        raise UsageError(f"--subst: {exc}") from None


def _table(args, max_len):
    return build_factor_table(_substitution(args), max_len, getattr(args, "fixed_point", None))


def _emit(args, text: str):
    if getattr(args, "out", None):
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _json(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


def cmd_factors(args) -> int:
    t = _table(args, args.len)
    words = [format_word(v, t.m) for v in t.factors(args.len)]
    _emit(args, _json(words) if args.format == "json" else "".join(w + "\n" for w in words))
    return EXIT_OK


def cmd_special(args) -> int:
    t = _table(args, args.len + 2)
    kind = {"left": SpecialKind.LEFT, "right": SpecialKind.RIGHT, "bi": SpecialKind.BI}[args.kind]
    rows = [(format_word(p.factor, t.m), len(p.lext), len(p.rext), len(p.biext))
            for p in special_factors(t, args.len, kind)]
    if args.format == "json":
        _emit(args, _json([{"factor": f, "lext": a, "rext": b, "biext": c}
                           for f, a, b, c in rows]))
    else:
        _emit(args, "".join(f"{f}\t{a}\t{b}\t{c}\n" for f, a, b, c in rows))
    return EXIT_OK


def _branch_label(b, k):
    return f"w{b.seed}" if b.seed is not None else f"b{k}"


def cmd_branches(args) -> int:
    t = _table(args, 2 * args.depth + 1)
    branches = trace_special_branches(t, args.depth)
    rows = [(_branch_label(b, k), format_word(b.prefix, t.m), len(b.lext_letters))
            for k, b in enumerate(branches)]
    if args.format == "json":
        _emit(args, _json([{"branch": n, "prefix": p, "lext": c} for n, p, c in rows]))
    else:
        _emit(args, "".join(f"{n}\t{p}\t{c}\n" for n, p, c in rows))
    return EXIT_OK


_BRANCH = re.compile(r"^(?:(\d+)w)?(\d+)$")


def _word_specs(args, m):
    specs = []
    for text in args.branch:
        match = _BRANCH.match(text)
        if not match:
            raise UsageError(f"--branch expects K or AwK, got {text!r}")
        a, k = match.groups()
        specs.append(int(k) if a is None else Extended(int(a), int(k)))
    for text in args.word:
        try:
            specs.append(parse_word(text, m))
        except ValueError as exc:
            raise UsageError(f"--word: {exc}") from None
    if len(specs) != 2:
        raise UsageError("give exactly two words via --branch/--word")
    return specs


def cmd_consecutive(args) -> int:
    s = _substitution(args)
    specs = _word_specs(args, s.m)
    t = _table(args, args.depth + 1)
    lo, hi = sorted(specs, key=lambda spec: resolve(t, spec, args.depth))
    verdict = check_consecutive(t, lo, hi, args.depth)
    _emit(args, _json(verdict.to_json(t.m)))
    return EXIT_FAIL if verdict.verdict is Verdict.UNKNOWN else EXIT_OK


def cmd_measure(args) -> int:
    n = args.len or args.resolution
    if n > args.resolution:
        raise UsageError(f"--len {n} exceeds --resolution {args.resolution}")
    t = _table(args, args.resolution + 2)
    f = estimate_frequencies(t, args.resolution, args.window or default_window())
    rows = [(format_word(v, t.m), format(float(x), ".17g")) for v, x in f.items(n)]
    if args.format == "json":
        _emit(args, _json({w: float(x) for w, x in rows}))
    else:
        _emit(args, "".join(f"{w}\t{x}\n" for w, x in rows))
    return EXIT_OK


def _emit_map(args, mp, **svg):
    if args.format == "svg":
        _emit(args, stepmap_to_svg(mp, **svg))
    else:
        _emit(args, stepmap_to_csv(mp, "\t" if args.format == "tsv" else ","))


def cmd_iet_build(args) -> int:
    s = _substitution(args)
    if args.mode == "tn":
        if args.len < 2:
            raise UsageError("--len must be >= 2")
        mp = build_T_n(_table(args, args.len), args.len)
    else:
        t = _table(args, args.len + 2)
        f = estimate_frequencies(t, args.len, args.window or default_window())
        mp = build_T_part_n(t, f, build_part_L(t, f, args.len), args.eps_freq)
    _emit_map(args, mp, title=f"{s.describe()} {args.mode} n={args.len}")
    return EXIT_OK


def cmd_iet_verify(args) -> int:
    m = args.thue_morse
    if not 2 <= m <= 255:
        raise UsageError(f"--thue-morse must lie in 2..255, got {m}")
    window = args.window or default_window()
    report = verify_theorem(m, args.depth, args.resolution, window, args.eps_cluster)
    text = report_to_json(report)
    if args.json:
        with open(args.json, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    if args.format == "svg":
        t = build_factor_table(thue_morse_substitution(m), args.resolution + 2)
        f = estimate_frequencies(t, args.resolution, window)
        mp = build_T_part_n(t, f, build_part_L(t, f, args.resolution))
        _emit(args, stepmap_to_svg(mp, marks=[p.x for p in report.points],
                                   title=f"thue-morse-{m} part n={args.resolution}"))
    elif not args.json or args.out:
        _emit(args, text)
    return EXIT_OK if report.theorem_check else EXIT_FAIL


def cmd_iet_vnk(args) -> int:
    if args.base < 2:
        raise UsageError(f"--base must be >= 2, got {args.base}")
    _emit_map(args, von_neumann_kakutani(args.base, args.levels),
              title=f"von Neumann-Kakutani b={args.base}")
    return EXIT_OK


def cmd_selftest(args) -> int:
    ok = acceptance.run_selftest(args.seed, emit=lambda line: print(line, flush=True))
    return EXIT_OK if ok else EXIT_FAIL


COMMANDS = {"factors": cmd_factors, "special": cmd_special, "branches": cmd_branches,
            "consecutive": cmd_consecutive, "measure": cmd_measure, "selftest": cmd_selftest}
IET_COMMANDS = {"build": cmd_iet_build, "verify": cmd_iet_verify, "vnk": cmd_iet_vnk}


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        handler = IET_COMMANDS[args.iet_command] if args.command == "iet" \
            else COMMANDS[args.command]
        return handler(args)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:  # --help
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE
    except (PipelineError, ValueError, RuntimeError) as exc:
        print(f"tmiet: {exc}", file=sys.stderr)
        return EXIT_FAIL


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
