"""Command-line driver: the continuous run loop and a micro-benchmark.

Exit statuses: 0 clean run, 1 oracle mismatch, 2 halted on an inconsistent
window, 3 unreadable input, 4 malformed input, 5 internal engine refusal
(budget or oracle cap).
"""

from __future__ import annotations

import argparse
import statistics
import sys
import time
from dataclasses import dataclass

from .errors import EngineError, ParseError, UnexpectedInconsistency
from .ontology import parse_tbox, unfold_negative_inclusions
from .oracle import cross_check
from .repair import add_abox_with_repair
from .stream import Timestamp, WindowSpec, parse_stream, window_extents
from .synth import bench_workload
from .window import WindowModel

EXIT_OK = 0
EXIT_ORACLE_MISMATCH = 1
EXIT_INCONSISTENT = 2
EXIT_IO = 3
EXIT_PARSE = 4
EXIT_ENGINE = 5


@dataclass
class RunConfig:
    tbox_path: str
    stream_path: str
    width: Timestamp
    slide: Timestamp
    origin: Timestamp
    repair: bool = False
    unfold_depth: int = 3
    emit: str = "window"
    check_oracle: bool = False
    skip_inconsistent: bool = False
    seed: int | None = None
    # benchmark knobs
    overlap: float = 90.0
    timestamps: int = 200
    atoms_per_tick: int = 20


def _build_window(extent, stream, tbox, ntbox, repair):
    """Materialize one extent from scratch; returns (model, removals)."""
    wm = WindowModel(extent)
    removals = []
    for box in stream:
        if not extent.contains(box.timestamp):
            continue
        if repair:
            _, rep = add_abox_with_repair(wm, box, tbox, ntbox)
            removals.extend(sorted(rep.removed, key=lambda o: o.sort_key))
        else:
            wm.add_abox(box, tbox)
    return wm, removals


def run(config, out=None, err=None):
    out = sys.stdout if out is None else out
    err = sys.stderr if err is None else err
    try:
        with open(config.tbox_path) as f:
            tbox_text = f.read()
        with open(config.stream_path) as f:
            stream_text = f.read()
    except OSError as e:
        print(f"error: {e}", file=err)
        return EXIT_IO
    try:
        tbox = parse_tbox(tbox_text)
        stream = parse_stream(stream_text)
        spec = WindowSpec(config.width, config.slide, config.origin)
        if config.unfold_depth < 0:
            raise ValueError("unfold depth must be nonnegative")
    except ParseError as e:
        print(f"parse error: {e}", file=err)
        return EXIT_PARSE
    except ValueError as e:
        print(f"error: {e}", file=err)
        return EXIT_PARSE

    try:
        ntbox = unfold_negative_inclusions(tbox, config.unfold_depth)
    except EngineError as e:
        print(f"error: {e}", file=err)
        return EXIT_ENGINE
    if config.repair and not ntbox.is_exact:
        print("WARNING: negative inclusion unfolding truncated at depth "
              f"{config.unfold_depth}; repairs are sound only up to that "
              "derivation depth", file=err)

    if not stream:
        return EXIT_OK
    horizon = stream[-1].timestamp
    extents = window_extents(spec, horizon) if horizon >= spec.origin else []

    wm = None
    prev_atoms = frozenset()
    try:
        for extent in extents:
            lines = [f"WINDOW {extent}"]
            try:
                if wm is None:
                    wm, removals = _build_window(
                        extent, stream, tbox, ntbox, config.repair)
                else:
                    hook = None
                    if config.repair:
                        def hook(model, box):
                            return add_abox_with_repair(model, box, tbox, ntbox)[1]
                    report = wm.slide(stream, extent, tbox, repair=hook)
                    removals = list(report.removals)
            except UnexpectedInconsistency as exc:
                lines.append("INCONSISTENT")
                print("\n".join(lines), file=out)
                print(file=out)
                wm = None
                if config.skip_inconsistent:
                    continue
                print(f"error: window {extent} is inconsistent: {exc}", file=err)
                return EXIT_INCONSISTENT

            if config.emit == "window":
                for att in wm.attributed_atoms():
                    homes = ",".join(str(t) for t in sorted(att.home_timestamps))
                    lines.append(f"{att.atom} @ {{{homes}}}")
                for occ in sorted(removals, key=lambda o: o.sort_key):
                    lines.append(f"REMOVED {occ.timestamp} {occ.atom}")
            else:
                atoms = frozenset(wm.window_interpretation().atoms())
                for a in sorted(prev_atoms - atoms, key=lambda a: a.sort_key):
                    lines.append(f"- {a}")
                for a in sorted(atoms - prev_atoms, key=lambda a: a.sort_key):
                    lines.append(f"+ {a}")
                prev_atoms = atoms
            print("\n".join(lines), file=out)
            print(file=out)

            if config.check_oracle:
                verdict = cross_check(wm, stream, extent, tbox, ntbox)
                if not verdict.match:
                    print(verdict.render(), file=err)
                    return EXIT_ORACLE_MISMATCH
    except EngineError as e:
        print(f"error: {e}", file=err)
        return EXIT_ENGINE
    return EXIT_OK


@dataclass
class BenchRow:
    window_end: Timestamp
    incr_micros: int
    scratch_micros: int


@dataclass
class BenchResult:
    rows: list[BenchRow]
    mismatches: int

    @property
    def median_incr(self):
        return statistics.median(r.incr_micros for r in self.rows)

    @property
    def median_scratch(self):
        return statistics.median(r.scratch_micros for r in self.rows)

    @property
    def ratio(self):
        return self.median_incr / self.median_scratch

    def render_csv(self):
        lines = ["window_end,incr_micros,scratch_micros"]
        lines.extend(f"{r.window_end},{r.incr_micros},{r.scratch_micros}"
                     for r in self.rows)
        lines.append(
            f"# windows={len(self.rows)} mismatches={self.mismatches} "
            f"median_incr_micros={self.median_incr:.0f} "
            f"median_scratch_micros={self.median_scratch:.0f} "
            f"ratio={self.ratio:.3f}")
        return "\n".join(lines)


def bench(config):
    """Time incremental slides against from-scratch rebuilds on a generated
    workload, also checking the two routes produce the same atoms."""
    if config.seed is None:
        raise ValueError("bench requires a seed")
    tbox, stream = bench_workload(config.seed, n_ticks=config.timestamps,
                                  atoms_per_tick=config.atoms_per_tick)
    width = Timestamp.of(max(1, config.timestamps // 4))
    slide_micros = max(1, round(width.micros * (1 - config.overlap / 100)))
    spec = WindowSpec(width, Timestamp(slide_micros), width)
    extents = window_extents(spec, stream[-1].timestamp)

    rows = []
    mismatches = 0
    wm = None
    for extent in extents:
        t0 = time.perf_counter_ns()
        if wm is None:
            wm, _ = _build_window(extent, stream, tbox, None, False)
        else:
            wm.slide(stream, extent, tbox)
        incr = (time.perf_counter_ns() - t0) // 1000

        t0 = time.perf_counter_ns()
        scratch, _ = _build_window(extent, stream, tbox, None, False)
        scr = (time.perf_counter_ns() - t0) // 1000

        rows.append(BenchRow(extent.end, incr, scr))
        if (frozenset(wm.window_interpretation().atoms())
                != frozenset(scratch.window_interpretation().atoms())):
            mismatches += 1
    return BenchResult(rows, mismatches)


def _timestamp_arg(text):
    try:
        return Timestamp.parse(text)
    except ParseError as e:
        raise argparse.ArgumentTypeError(str(e))


def main(argv=None):
    argv = list(sys.argv[1:] if argv is None else argv)
    if argv[:1] == ["bench"]:
        p = argparse.ArgumentParser(prog="rlwindow bench")
        p.add_argument("--seed", type=int, required=True)
        p.add_argument("--overlap", type=float, default=90.0,
                       help="window overlap as a percentage")
        p.add_argument("--timestamps", type=int, default=200)
        p.add_argument("--atoms-per-tick", type=int, default=20)
        a = p.parse_args(argv[1:])
        config = RunConfig(tbox_path="", stream_path="",
                           width=Timestamp.of(1), slide=Timestamp.of(1),
                           origin=Timestamp.of(0), seed=a.seed,
                           overlap=a.overlap, timestamps=a.timestamps,
                           atoms_per_tick=a.atoms_per_tick)
        print(bench(config).render_csv())
        return EXIT_OK

    p = argparse.ArgumentParser(prog="rlwindow")
    p.add_argument("--tbox", required=True)
    p.add_argument("--stream", required=True)
    p.add_argument("--width", type=_timestamp_arg, required=True)
    p.add_argument("--slide", type=_timestamp_arg, required=True)
    p.add_argument("--origin", type=_timestamp_arg, required=True)
    p.add_argument("--repair", action="store_true")
    p.add_argument("--unfold-depth", type=int, default=3)
    p.add_argument("--emit", choices=["window", "diff"], default="window")
    p.add_argument("--check-oracle", action="store_true")
    p.add_argument("--skip-inconsistent", action="store_true")
    a = p.parse_args(argv)
    config = RunConfig(tbox_path=a.tbox, stream_path=a.stream, width=a.width,
                       slide=a.slide, origin=a.origin, repair=a.repair,
                       unfold_depth=a.unfold_depth, emit=a.emit,
                       check_oracle=a.check_oracle,
                       skip_inconsistent=a.skip_inconsistent)
    return run(config)


if __name__ == "__main__":
    sys.exit(main())
