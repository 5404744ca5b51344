"""Command-line front end.

Usage:
    vilenkin verify lemma3 --m 2 --A 4
    vilenkin verify partition --m 2,3 --N 4
    vilenkin sweep --m 2 --p 0.3333 --phi powerlog --nk 3,4,5
    vilenkin calibrate eq4 --m 2 --nmax 512

Exit codes: 0 every check passed, 1 a verification failed, 2 bad usage.
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import asdict, dataclass, field
from fractions import Fraction

from . import calibration, experiments, fixtures
from .group import CapacityError, InvalidGeneratorError, VilenkinError, make_group
from .kernels import Convention

EXPERIMENTS = ("lemma2", "lemma3", "lemma4", "theorem1", "eq3", "eq4", "eq5", "partition")


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    """Everything that determines a run; embedded in every report."""

    command: str
    experiment: str
    m: str
    explicit: bool
    params: dict = field(default_factory=dict)
    convention: str = "both"
    out: str = "reports"
    seed: int | None = None
    calibrate: bool = False
    fixture_versions: dict = field(default_factory=dict)


def parse_m(text: str) -> tuple[list[int], bool]:
    """``2`` constant, ``2,3`` repeating pattern, ``2,3,4,2:explicit`` finite sequence."""
    explicit = text.endswith(":explicit")
    body = text[: -len(":explicit")] if explicit else text
    try:
        vals = [int(v) for v in body.split(",") if v.strip()]
    except ValueError as exc:
        raise UsageError(f"bad --m value {text!r}") from exc
    if not vals:
        raise UsageError("--m is empty")
    return vals, explicit


def parse_ints(text: str | None) -> list[int] | None:
    if text is None:
        return None
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise UsageError(f"expected comma-separated integers, got {text!r}") from exc


def parse_p(text: str) -> float:
    try:
        return float(Fraction(text))
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"bad exponent {text!r}") from exc


def parse_ps(text: str) -> list[float]:
    return [parse_p(v) for v in text.split(",") if v.strip()]


def _group(args, rank: int):
    m, explicit = parse_m(args.m)
    if explicit and rank > len(m):
        raise UsageError(f"explicit generator has {len(m)} entries, rank {rank} needed")
    try:
        return make_group(m, max(rank, 1))
    except (InvalidGeneratorError, CapacityError) as exc:
        raise UsageError(str(exc)) from exc


def _convs(args):
    if args.conv == "both":
        return experiments.BOTH
    return (Convention(args.conv),)


def _emit(report, cfg: RunConfig, stem: str) -> bool:
    report.write(cfg.out, stem, header=asdict(cfg))
    status = "PASS" if report.passed else "FAIL"
    print(f"{status} {stem} ({report.runtime:.2f}s)")
    for name, value in sorted(report.measured.items()):
        if isinstance(value, (int, float, str, bool)):
            print(f"  {name} = {value}")
    for note in report.notes:
        print(f"  note: {note}")
    for name in report.failures():
        print(f"  failed: {name}")
    return report.passed


def _fixture_versions(exp: str, g) -> dict:
    try:
        recs = fixtures.load_records(exp, g)
    except fixtures.FixtureMissingError:
        return {}
    return {r["constant_name"]: r["oracle_version"] for r in recs}


def cmd_verify(args) -> int:
    exp = args.experiment
    convs = _convs(args)
    Ns = parse_ints(args.N)
    As = parse_ints(args.A)
    fdir = args.fixture_dir
    reports = []
    if exp == "partition":
        Ns = Ns or [2, 3, 4, 5, 6]
        g = _group(args, max(Ns))
        reports.append(("partition", experiments.verify_partition(g, Ns)))
    elif exp == "eq3":
        top = max(Ns) if Ns else 8
        g = _group(args, top)
        reports.append(("eq3", experiments.verify_eq3(g, top)))
    elif exp == "eq4":
        nmax = args.nmax or experiments.EQ4_NMAX
        g = _group(args, _rank_for(args, nmax))
        reports.append(("eq4", experiments.verify_eq4(g, nmax, convs, fdir)))
    elif exp == "eq5":
        nmax = args.nmax or experiments.EQ5_NMAX
        rank = max(Ns) if Ns else experiments.EQ5_RANK
        g = _group(args, rank)
        if nmax > g.M[rank]:
            raise UsageError(f"--nmax {nmax} exceeds M_{rank}")
        reports.append(("eq5", experiments.verify_eq5(g, nmax, rank, convs, fdir)))
    elif exp == "lemma2":
        for A in As or [3, 4]:
            if A < 3:
                raise UsageError(f"lemma2 needs A >= 3, got {A}")
            g = _group(args, 2 * A)
            reports.append((f"lemma2_A{A}", experiments.verify_lemma2(g, A, convs)))
    elif exp == "lemma3":
        for A in As or [1, 2, 3, 4]:
            if A < 1:
                raise UsageError("lemma3 needs A >= 1")
            g = _group(args, A + 1)
            reports.append((f"lemma3_A{A}", experiments.verify_lemma3(g, A)))
    elif exp == "lemma4":
        Ns = Ns or list(experiments.LEMMA4_NS)
        if min(Ns) < 1:
            raise UsageError("lemma4 needs N >= 1")
        g = _group(args, max(Ns) + 1)
        reports.append(("lemma4", experiments.verify_lemma4(g, Ns, None, convs, fdir)))
    elif exp == "theorem1":
        Ns = Ns or list(experiments.THEOREM1_NS)
        g = _group(args, max(Ns) + experiments.THEOREM1_EXTRA)
        for p in parse_ps(args.p) if args.p else [1 / 3, 0.4]:
            if not 0 < p < 0.5:
                raise UsageError(f"theorem1 needs 0 < p < 1/2, got {p}")
            for conv in convs:
                rep = experiments.verify_theorem1(
                    g, p, Ns, args.atoms, conv=conv, seed=args.seed or experiments.THEOREM1_SEED, fixture_dir=fdir
                )
                reports.append((f"theorem1_{experiments._ptag(p)}_{Convention(conv).value}", rep))
    cfg = RunConfig(
        "verify",
        exp,
        args.m,
        parse_m(args.m)[1],
        {"N": Ns, "A": As, "nmax": args.nmax, "p": args.p, "atoms": args.atoms},
        args.conv,
        args.out,
        args.seed,
        fixture_versions=_fixture_versions(exp, g),
    )
    ok = True
    for stem, rep in reports:
        ok &= _emit(rep, cfg, stem)
    return 0 if ok else 1


def _rank_for(args, n: int) -> int:
    m, _ = parse_m(args.m)
    rank, size = 0, 1
    while size < n:
        size *= m[rank % len(m)]
        rank += 1
    return max(rank, 1)


def cmd_sweep(args) -> int:
    p = parse_p(args.p)
    if not 0 < p < 0.5:
        raise UsageError(f"sweep needs 0 < p < 1/2, got {p}")
    nks = parse_ints(args.nk) or [3, 4, 5]
    if min(nks) < 1:
        raise UsageError("n_k must be positive")
    g = _group(args, 2 * max(nks) + 2)
    conv = Convention(args.conv if args.conv != "both" else "paper")
    workers = args.workers if args.workers is not None else (os.cpu_count() or 1)
    rep = experiments.divergence_sweep(g, p, args.phi, nks, conv, workers=workers)
    cfg = RunConfig("sweep", "sweep", args.m, parse_m(args.m)[1], {"p": p, "phi": args.phi, "nk": nks}, conv.value, args.out)
    ok = _emit(rep, cfg, f"sweep_{args.phi}_{experiments._ptag(p)}")
    return 0 if ok else 1


def cmd_calibrate(args) -> int:
    exp = args.experiment
    if exp not in calibration.CALIBRATORS:
        raise UsageError(f"no calibrator for {exp!r}; choose from {sorted(calibration.CALIBRATORS)}")
    kwargs = {}
    Ns = parse_ints(args.N)
    if exp == "eq4":
        nmax = args.nmax or experiments.EQ4_NMAX
        kwargs["n_max"] = nmax
        g = _group(args, _rank_for(args, nmax))
    elif exp == "eq5":
        kwargs["n_max"] = args.nmax or experiments.EQ5_NMAX
        kwargs["N"] = max(Ns) if Ns else experiments.EQ5_RANK
        g = _group(args, kwargs["N"])
    elif exp == "lemma4":
        kwargs["N_list"] = tuple(Ns or experiments.LEMMA4_NS)
        g = _group(args, max(kwargs["N_list"]) + 1)
    else:
        kwargs["N_list"] = tuple(Ns or experiments.THEOREM1_NS)
        if args.p:
            kwargs["p_list"] = tuple(parse_ps(args.p))
        kwargs["atoms_per_N"] = args.atoms
        g = _group(args, max(kwargs["N_list"]) + experiments.THEOREM1_EXTRA)
    path, measured = calibration.calibrate(exp, g, args.fixture_dir, **kwargs)
    print(f"wrote {path}")
    for name, value in sorted(measured.items()):
        print(f"  {name} = {value!r}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="vilenkin", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--m", default="2", help="generator: 2 | 2,3 (repeating) | 2,3,4:explicit")
        sp.add_argument("--conv", choices=["paper", "classical", "both"], default="both")
        sp.add_argument("--out", default="reports", help="report directory")
        sp.add_argument("--fixture-dir", default=None, help=f"fixture directory (default: ${fixtures.ENV_VAR} or packaged)")

    v = sub.add_parser("verify", help="run one verification experiment")
    v.add_argument("experiment", choices=EXPERIMENTS)
    common(v)
    v.add_argument("--N", help="rank or comma-separated ranks")
    v.add_argument("--A", help="comma-separated A values")
    v.add_argument("--nmax", type=int)
    v.add_argument("--p", help="exponent(s), decimals or fractions such as 1/3")
    v.add_argument("--atoms", type=int, default=experiments.THEOREM1_ATOMS)
    v.add_argument("--seed", type=int)
    v.set_defaults(func=cmd_verify)

    s = sub.add_parser("sweep", help="divergence sweep of the counterexample")
    common(s)
    s.add_argument("--p", required=True)
    s.add_argument("--phi", choices=["const", "power", "powerlog", "logsq"], default="powerlog")
    s.add_argument("--nk", default="3,4,5")
    s.add_argument("--workers", type=int, default=None, help="worker processes (default: CPU count)")
    s.set_defaults(func=cmd_sweep)

    c = sub.add_parser("calibrate", help="measure constants with the brute-force oracle and freeze them")
    c.add_argument("experiment", choices=sorted(calibration.CALIBRATORS))
    common(c)
    c.add_argument("--N")
    c.add_argument("--nmax", type=int)
    c.add_argument("--p")
    c.add_argument("--atoms", type=int, default=experiments.THEOREM1_ATOMS)
    c.set_defaults(func=cmd_calibrate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, VilenkinError) as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
