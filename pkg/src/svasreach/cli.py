"""Command-line front end.

Every subcommand prints its result on stdout and timing statistics on
stderr. Exit status: 0 for a positive verdict, 1 for a negative one
(unreachable, rejected, not satisfied, or a search that hit its limits),
2 for errors.
"""

from __future__ import annotations

import argparse
import sys
import time
from dataclasses import dataclass
from pathlib import Path

from .counterprog import bounded_halting, halts, parse_cp
from .execution import (
    ChoiceAnnotationTable,
    Inconclusive,
    Reachable,
    SearchLimits,
    accepting_tallies,
    count_events,
    format_trace,
    read_witness,
    replay,
    run_policy,
    search_reach,
    write_witness,
)
from .logic import (
    DecodeError,
    LeafDataForest,
    NotAccepted,
    data_matching_valid,
    decode_forest,
    emit_formula,
    encode_trace,
    evaluate,
    mutate_forest_described,
    to_sexpr,
)
from .logic.encoding import alphabet
from .svas import SvasError, parse_svas, serialize_svas
from .yardstick import (
    CompiledUnit,
    PairInvariant,
    compile_program,
    emit_dec_harness,
    emit_ztest_harness,
    tetration,
)

YES, NO, ERROR = 0, 1, 2


class CliError(Exception):
    pass


@dataclass
class CliConfig:
    subcommand: str
    inputs: list[str]
    output: str | None = None
    level: int | None = None
    max_configs: int = 1_000_000
    max_stack: int = 64
    max_counter: int = 1_000
    seed: int = 0
    max_steps: int = 1_000_000

    def __post_init__(self):
        for name in ("max_configs", "max_stack", "max_counter", "max_steps"):
            if getattr(self, name) <= 0:
                raise CliError(f"--{name.replace('_', '-')} must be positive")
        if self.level is not None and self.level < 1:
            raise CliError("level must be at least 1")

    @property
    def limits(self) -> SearchLimits:
        return SearchLimits(self.max_configs, self.max_stack, self.max_counter)


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc.strerror}") from None


def _write(path: str, text: str):
    try:
        Path(path).write_text(text)
    except OSError as exc:
        raise CliError(f"cannot write {path}: {exc.strerror}") from None


def _emit(text: str, path: str | None):
    if path is None:
        sys.stdout.write(text)
    else:
        _write(path, text)


def _stats(msg: str):
    print(msg, file=sys.stderr)


def _export_unit(unit: CompiledUnit, out: str | None):
    text = serialize_svas(unit.program) + "\n"
    if out is None:
        sys.stdout.write(text)
        return
    base = Path(out).with_suffix("")
    _write(out, text)
    _write(str(base) + ".ann", unit.annotations.to_text())
    _write(str(base) + ".map", unit.sourcemap_text())
    print(f"wrote {out} ({len(unit.program)} commands), {base}.ann, {base}.map")


def _search_report(res, witness_path: str | None) -> int:
    _stats(res.stats.footer())
    if isinstance(res, Reachable):
        print("Reachable")
        if witness_path is not None:
            _write(witness_path, write_witness(res.witness))
            print(f"witness: {witness_path} ({len(res.witness)} choices)")
        return YES
    if isinstance(res, Inconclusive):
        print(f"Inconclusive limit={res.limit}")
        return NO
    print("Unreachable")
    return NO


# ---------------------------------------------------------------- subcommands


def cmd_compile(cfg: CliConfig) -> int:
    cp = parse_cp(_read(cfg.inputs[0]))
    _export_unit(compile_program(cp, cfg.level), cfg.output)
    return YES


def cmd_run(cfg: CliConfig) -> int:
    path = cfg.inputs[0]
    p = parse_svas(_read(path))
    ann_path = cfg.inputs[1] if len(cfg.inputs) > 1 else str(Path(path).with_suffix(".ann"))
    ann = ChoiceAnnotationTable.from_text(_read(ann_path)) if Path(ann_path).exists() \
        else ChoiceAnnotationTable()
    missing = ann.missing(p)
    if missing:
        raise CliError(f"no annotation for two-way goto at {missing[0]}")
    t0 = time.perf_counter()
    t = run_policy(p, ann, cfg.max_steps, record=cfg.output is not None)
    _stats(f"seconds={time.perf_counter() - t0:.3f}")
    if cfg.output is not None:
        _write(cfg.output, format_trace(t))
    print(f"{t.outcome.value} reason={t.reason or '-'} steps={t.length}")
    for name in p.counters:
        inc, dec = t.inc_counts.get(name, 0), t.dec_counts.get(name, 0)
        if inc or dec:
            print(f"counter={name} inc={inc} dec={dec}")
    return YES if t.accepted else NO


def cmd_search(cfg: CliConfig) -> int:
    path = cfg.inputs[0]
    p = parse_svas(_read(path))
    res = search_reach(p, cfg.limits)
    return _search_report(res, cfg.output or str(Path(path).with_suffix(".wit")))


def cmd_replay(cfg: CliConfig) -> int:
    p = parse_svas(_read(cfg.inputs[0]))
    witness = read_witness(_read(cfg.inputs[1]))
    t = replay(p, witness, max_steps=cfg.max_steps)
    _emit(format_trace(t), cfg.output)
    return YES if t.accepted else NO


def cmd_dec_harness(cfg: CliConfig, exhaustive: bool) -> int:
    k = cfg.level
    unit = emit_dec_harness(k)
    want = tetration(2, k).value
    s = unit.levelmap[k].scratch[0]
    if cfg.output is not None:
        _export_unit(unit, cfg.output)
    if not exhaustive:
        t0 = time.perf_counter()
        t = run_policy(unit.program, unit.annotations, cfg.max_steps, record=False)
        _stats(f"seconds={time.perf_counter() - t0:.3f}")
        decs = count_events(t, s)[1]
        print(f"honest run: {t.outcome.value} steps={t.length}; {s} decrements: {decs}")
        return YES if t.accepted and decs == want else NO
    inv = PairInvariant(unit)
    ex = accepting_tallies(unit.program, s, unit.body(k), cfg.limits, visit=inv)
    _stats(ex.stats.footer())
    if not ex.closed:
        print(f"Inconclusive limit={ex.stats.limit}")
        return NO
    if not ex.tallies:
        print(f"accepting runs: 0; {s} decrements: -")
        return NO
    counts = sorted(ex.tallies)
    shown = f"always {counts[0]}" if len(counts) == 1 else "one of " + ",".join(map(str, counts))
    print(f"accepting runs: ≥1; {s} decrements: {shown}")
    print(f"invariant violations: {len(inv.violations)}")
    return YES if counts == [want] and not inv.violations else NO


def cmd_zt_harness(cfg: CliConfig, preload: int) -> int:
    unit = emit_ztest_harness(cfg.level, preload)
    if cfg.output is not None:
        _export_unit(unit, cfg.output)
    return _search_report(search_reach(unit.program, cfg.limits), None)


def cmd_oracle(cfg: CliConfig, bound: int | None) -> int:
    cp = parse_cp(_read(cfg.inputs[0]))
    if bound is None:
        if cfg.level is None:
            raise CliError("oracle needs --bound or -n")
        bound = tetration(2, cfg.level).value
    res = bounded_halting(cp, bound)
    fields = " ".join(f"{k}={v}" for k, v in vars(res).items())
    print(f"{type(res).__name__} {fields}".rstrip())
    return YES if halts(res) else NO


def _trace_for(p, witness_path: str):
    t = replay(p, read_witness(_read(witness_path)), max_steps=None)
    if not t.accepted:
        raise NotAccepted(f"witness does not give an accepting run ({t.outcome.value})")
    return t


def cmd_encode(cfg: CliConfig) -> int:
    p = parse_svas(_read(cfg.inputs[0]))
    try:
        t = _trace_for(p, cfg.inputs[1])
    except NotAccepted as exc:
        print(exc)
        return NO
    _emit(encode_trace(p, t).to_text(), cfg.output)
    return YES


def cmd_formula(cfg: CliConfig) -> int:
    p = parse_svas(_read(cfg.inputs[0]))
    _emit(to_sexpr(emit_formula(p)) + "\n", cfg.output)
    return YES


def cmd_check(cfg: CliConfig, witness: str | None, forest_path: str | None) -> int:
    p = parse_svas(_read(cfg.inputs[0]))
    if (witness is None) == (forest_path is None):
        raise CliError("check needs exactly one of --witness and --forest")
    original = None
    if witness is not None:
        try:
            original = _trace_for(p, witness)
        except NotAccepted as exc:
            print(exc)
            return NO
        forest = encode_trace(p, original)
    else:
        forest = LeafDataForest.from_text(_read(forest_path))
    t0 = time.perf_counter()
    sat = evaluate(emit_formula(p), forest)
    _stats(f"nodes={len(forest)} seconds={time.perf_counter() - t0:.3f}")
    try:
        decoded = decode_forest(p, forest)
        verdict, accepted = decoded.outcome.value, decoded.accepted
        if original is not None and decoded.command_indices != original.command_indices:
            raise CliError("decoded run differs from the encoded one")
    except DecodeError as exc:
        verdict, accepted = f"DecodeError ({exc})", False
    matching = data_matching_valid(p, forest)
    agree = sat == (accepted and matching)
    print(f"formula: {'satisfied' if sat else 'not satisfied'}")
    print(f"decode: {verdict}")
    print(f"data matching: {'valid' if matching else 'invalid'}")
    print(f"agreement: {'yes' if agree else 'NO'}")
    if not agree:
        raise CliError("formula and decoder disagree")
    return YES if sat else NO


def cmd_mutate(cfg: CliConfig, program: str | None) -> int:
    forest = LeafDataForest.from_text(_read(cfg.inputs[0]))
    letters = alphabet(parse_svas(_read(program))).letters if program else None
    out, _, what = mutate_forest_described(forest, cfg.seed, letters)
    _emit(f"# seed={cfg.seed} {what}\n" + out.to_text(), cfg.output)
    return YES


def cmd_sizes(cfg: CliConfig, lo: int, hi: int) -> int:
    if not 1 <= lo <= hi:
        raise CliError("need 1 <= --from <= --to")
    cp = parse_cp(_read(cfg.inputs[0]))
    sizes = [(n, len(compile_program(cp, n).program)) for n in range(lo, hi + 1)]
    for n, size in sizes:
        print(f"{n} {size}")
    steps = {b - a for (_, a), (_, b) in zip(sizes, sizes[1:])}
    if len(steps) <= 1:
        print(f"# affine: slope={steps.pop() if steps else 0}")
    else:
        print("# not affine")
    return YES


# ---------------------------------------------------------------- argument parsing


def _limits(p: argparse.ArgumentParser):
    p.add_argument("--max-configs", type=int, default=1_000_000)
    p.add_argument("--max-stack", type=int, default=64)
    p.add_argument("--max-counter", type=int, default=None,
                   help="default 1000; 2⇑k+1 for the harness subcommands")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="svasreach", description=__doc__.split("\n")[0])
    sub = ap.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("compile", help="compile a counter program to SVAS")
    p.add_argument("program")
    p.add_argument("-n", "--level", type=int, required=True)
    p.add_argument("-o", "--output", help="SVAS file; .ann and .map sidecars go next to it")

    p = sub.add_parser("run", help="deterministic run resolving choices by annotations")
    p.add_argument("program")
    p.add_argument("annotations", nargs="?", help="defaults to PROGRAM with suffix .ann")
    p.add_argument("--max-steps", type=int, default=1_000_000)
    p.add_argument("-o", "--output", help="write the step trace here")

    p = sub.add_parser("search", help="search for an accepting run")
    p.add_argument("program")
    _limits(p)
    p.add_argument("-o", "--output", help="witness file (default PROGRAM.wit)")

    p = sub.add_parser("replay", help="replay a witness and print the trace")
    p.add_argument("program")
    p.add_argument("witness")
    p.add_argument("--max-steps", type=int, default=1_000_000)
    p.add_argument("-o", "--output")

    p = sub.add_parser("dec-harness", help="check the decrement gadget of one level")
    p.add_argument("level", type=int)
    p.add_argument("--exhaustive", action="store_true",
                   help="explore every run instead of the annotated one")
    _limits(p)
    p.add_argument("--max-steps", type=int, default=1_000_000)
    p.add_argument("-o", "--output", help="also export the harness program")

    p = sub.add_parser("zt-harness", help="search the zero-test harness")
    p.add_argument("level", type=int)
    p.add_argument("preload", type=int)
    _limits(p)
    p.add_argument("-o", "--output", help="also export the harness program")

    p = sub.add_parser("oracle", help="bounded halting of a counter program")
    p.add_argument("program")
    p.add_argument("--bound", type=int)
    p.add_argument("-n", "--level", type=int, help="use the bound 2⇑n")

    p = sub.add_parser("encode", help="forest encoding of an accepting run")
    p.add_argument("program")
    p.add_argument("witness")
    p.add_argument("-o", "--output")

    p = sub.add_parser("formula", help="print the sentence defining accepting runs")
    p.add_argument("program")
    p.add_argument("-o", "--output")

    p = sub.add_parser("check", help="compare the sentence with the decoder on one forest")
    p.add_argument("program")
    p.add_argument("--witness")
    p.add_argument("--forest")

    p = sub.add_parser("mutate", help="apply one seeded edit to a forest")
    p.add_argument("forest")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--program", help="draw new letters from this program's alphabet")
    p.add_argument("-o", "--output")

    p = sub.add_parser("sizes", help="command counts of compiled programs by level")
    p.add_argument("program")
    p.add_argument("--from", dest="lo", type=int, default=1)
    p.add_argument("--to", dest="hi", type=int, default=10)
    return ap


def _counter_cap(ns) -> int:
    cap = getattr(ns, "max_counter", None)
    if cap is not None:
        return cap
    if ns.subcommand in ("dec-harness", "zt-harness") and 1 <= ns.level <= 4:
        # room for the transient overshoot of one pair update
        return tetration(2, ns.level).value + 1
    return 1_000


def _config(ns: argparse.Namespace) -> CliConfig:
    positional = {"run": ("program", "annotations"), "replay": ("program", "witness"),
                  "encode": ("program", "witness"), "mutate": ("forest",)}
    names = positional.get(ns.subcommand, ("program",))
    inputs = [getattr(ns, k) for k in names if getattr(ns, k, None) is not None]
    return CliConfig(
        subcommand=ns.subcommand,
        inputs=inputs,
        output=getattr(ns, "output", None),
        level=getattr(ns, "level", None),
        max_configs=getattr(ns, "max_configs", 1_000_000),
        max_stack=getattr(ns, "max_stack", 64),
        max_counter=_counter_cap(ns),
        seed=getattr(ns, "seed", 0),
        max_steps=getattr(ns, "max_steps", 1_000_000),
    )


def main(argv: list[str] | None = None) -> int:
    ns = build_parser().parse_args(argv)
    try:
        cfg = _config(ns)
        sc = ns.subcommand
        if sc == "compile":
            return cmd_compile(cfg)
        if sc == "run":
            return cmd_run(cfg)
        if sc == "search":
            return cmd_search(cfg)
        if sc == "replay":
            return cmd_replay(cfg)
        if sc == "dec-harness":
            return cmd_dec_harness(cfg, ns.exhaustive)
        if sc == "zt-harness":
            return cmd_zt_harness(cfg, ns.preload)
        if sc == "oracle":
            return cmd_oracle(cfg, ns.bound)
        if sc == "encode":
            return cmd_encode(cfg)
        if sc == "formula":
            return cmd_formula(cfg)
        if sc == "check":
            return cmd_check(cfg, ns.witness, ns.forest)
        if sc == "mutate":
            return cmd_mutate(cfg, ns.program)
        return cmd_sizes(cfg, ns.lo, ns.hi)
    except (CliError, SvasError, DecodeError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return ERROR


if __name__ == "__main__":
    sys.exit(main())
