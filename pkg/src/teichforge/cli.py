"""teichforge command line.

    teichforge construct --delta delta.json --seed 1 --out cert.json
    teichforge verify --cert cert.json --delta delta.json
    teichforge veech --origami o.txt
    teichforge decompose --delta delta.json
    teichforge selfnorm --delta delta.json --seed 1
    teichforge atlas
    teichforge lemmas [--suite lemma3] [--samples 12]
    teichforge export --pi14 | --cert cert.json

Exit codes: 0 success, 1 a check failed, 2 malformed input.
"""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import jsonschema
import numpy as np

from . import pipeline, suites, veech
from .surface_atlas import build_atlas


class InputError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    seed: int = 0
    budget: int = 10_000
    bound: int = 10_000
    toy_primes: tuple[int, ...] | None = None
    out: str | None = None
    verbose: bool = False


def schema(name: str) -> dict:
    text = resources.files("teichforge").joinpath("schemas", f"{name}.schema.json").read_text()
    return json.loads(text)


def validate(obj: dict, name: str) -> dict:
    jsonschema.validate(obj, schema(name))
    return obj


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def read_json(path: str, name: str | None = None) -> dict:
    try:
        obj = json.loads(Path(path).read_text())
    except OSError as e:
        raise InputError(f"cannot read {path}: {e.strerror}") from e
    except json.JSONDecodeError as e:
        raise InputError(f"{path}: invalid JSON at line {e.lineno} column {e.colno}: {e.msg}") from e
    if name is not None:
        try:
            validate(obj, name)
        except jsonschema.ValidationError as e:
            raise InputError(f"{path}: {e.message}") from e
    return obj


def read_delta(path: str) -> pipeline.DeltaSpec:
    try:
        return pipeline.DeltaSpec.from_json(read_json(path, "delta"))
    except ValueError as e:
        raise InputError(f"{path}: {e}") from e


def report(command: str, ok: bool, result, warnings=()) -> dict:
    status = "FAIL" if not ok else ("PASS-with-warning" if warnings else "PASS")
    return validate({"schema": "teichforge/report/v1", "command": command, "status": status,
                     "warnings": list(warnings), "result": result}, "report")


def emit(obj: dict, out: str | None) -> None:
    text = dumps(obj)
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


# --- commands -------------------------------------------------------------------

def cmd_construct(args, cfg: RunConfig) -> int:
    d = read_delta(args.delta)
    c = pipeline.construct(d, seed=cfg.seed, toy_primes=cfg.toy_primes, budget=cfg.budget)
    cert = validate(c.certificate(), "certificate")
    emit(cert, cfg.out)
    if c.toy:
        print("warning: toy primes; certificate is not faithful", file=sys.stderr)
    if d.index == 1:
        print("warning: Delta = Gamma(2); construction is degenerate", file=sys.stderr)
    return 0


def cmd_verify(args, cfg: RunConfig) -> int:
    cert = read_json(args.cert, "certificate")
    d = read_delta(args.delta)
    crep, lam = pipeline.verify_certificate(cert, d)
    warnings = []
    result = {"certificate": crep.to_json()}
    ok = crep.ok
    if ok:
        res = veech.stabilizer(lam, d.index)
        th = veech.verify_theorem(res, d, lam)
        result["stabilizer"] = res.to_json()
        result["theorem"] = th.to_json()
        if crep.toy:
            warnings.append("toy certificate: the theorem check is informational")
        else:
            ok = th.ok
        if th.degenerate:
            warnings.append("Delta = Gamma(2): the construction is degenerate")
    rep = report("verify", ok, result, warnings)
    first = crep.first_failure or (None if ok else (result.get("theorem") or {}).get("failures", [None])[0])
    print(f"{rep['status']}" + (f": {first}" if first else ""), file=sys.stderr)
    emit(rep, cfg.out)
    return 0 if ok else 1


def read_origami(path: str) -> veech.Origami:
    try:
        text = Path(path).read_text()
    except OSError as e:
        raise InputError(f"cannot read {path}: {e.strerror}") from e
    try:
        if text.lstrip().startswith("{"):
            obj = json.loads(text)
            validate(obj, "origami")
            return veech.Origami.from_json(obj)
        return veech.Origami.from_text(text)
    except json.JSONDecodeError as e:
        raise InputError(f"{path}: invalid JSON at line {e.lineno}: {e.msg}") from e
    except (ValueError, jsonschema.ValidationError) as e:
        raise InputError(f"{path}: {getattr(e, 'message', e)}") from e


def cmd_veech(args, cfg: RunConfig) -> int:
    o = read_origami(args.origami)
    res = veech.veech_of_origami(o)
    emit(report("veech", res.closed, {"origami": o.to_json(), "veech": res.to_json()}), cfg.out)
    return 0 if res.closed else 1


def cmd_decompose(args, cfg: RunConfig) -> int:
    d = read_delta(args.delta)
    pulls = pipeline.pullback_chain(pipeline.delta0_from_delta(d))
    reps = pipeline.alpha_classes(pulls.tilde)
    l3 = pipeline.lemma3(d, pulls)
    result = {"index": d.index, "k": len(reps), "representatives": [str(w) for w in reps],
              "class_perms": {"G1": list(l3.perms[0]), "G2": list(l3.perms[1])},
              "convention": l3.convention}
    emit(report("decompose", l3.ok, result), cfg.out)
    return 0 if l3.ok else 1


def cmd_selfnorm(args, cfg: RunConfig) -> int:
    d = read_delta(args.delta)
    d0 = pipeline.delta0_from_delta(d)
    r = pipeline.self_normalizing_refine(d0, np.random.default_rng(cfg.seed), cfg.budget)
    result = {"seed": cfg.seed, "subgroup": r.subgroup.to_json(), "candidates": r.candidates,
              "inner_degree": r.inner_degree}
    emit(report("selfnorm", True, result), cfg.out)
    return 0


def cmd_atlas(args, cfg: RunConfig) -> int:
    emit(build_atlas().dump(), cfg.out)
    return 0


def cmd_lemmas(args, cfg: RunConfig) -> int:
    names = args.suite or None
    for n in names or ():
        if n not in suites.SUITES:
            raise InputError(f"unknown suite {n!r}; choose from {', '.join(suites.SUITES)}")
    kw = {"seed": cfg.seed, "budget": cfg.budget}
    if args.samples is not None:
        kw["samples"] = args.samples
    results = suites.run_suites(names, **kw)
    ok = all(r.ok for r in results)
    warnings = [f"{r.name}: {r.warning}" for r in results if r.warning]
    for r in results:
        print(f"{'PASS' if r.ok else 'FAIL'} {r.name} ({r.seconds:.2f}s)", file=sys.stderr)
    rows = [r.to_json() for r in results]
    if not args.timings:
        for row in rows:
            row.pop("seconds")
    emit(report("lemmas", ok, rows, warnings), cfg.out)
    return 0 if ok else 1


def cmd_export(args, cfg: RunConfig) -> int:
    at = build_atlas()
    if args.pi14:
        table = at.F14_in_F11
    else:
        cert = read_json(args.cert, "certificate")
        lam = pipeline.LayeredSubgroup.from_json(cert["lambda"])
        table = veech.induce_to_pi11(veech.materialize(lam, cfg.bound))
    o = veech.origami_export(table, cfg.bound)
    if args.format == "text":
        text = o.to_text()
        if cfg.out:
            Path(cfg.out).write_text(text)
        else:
            sys.stdout.write(text)
    else:
        emit(validate(o.to_json(), "origami"), cfg.out)
    return 0


COMMANDS = {
    "construct": cmd_construct, "verify": cmd_verify, "veech": cmd_veech,
    "decompose": cmd_decompose, "selfnorm": cmd_selfnorm, "atlas": cmd_atlas,
    "lemmas": cmd_lemmas, "export": cmd_export,
}


def parse_primes(text: str) -> tuple[int, ...]:
    try:
        out = tuple(int(x) for x in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError("expected p1,p2,p3,ell")
    if len(out) != 4:
        raise argparse.ArgumentTypeError("expected four primes p1,p2,p3,ell")
    return out


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="teichforge", description=__doc__.split("\n")[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, seed=True, out=True):
        if seed:
            sp.add_argument("--seed", type=int, default=0)
            sp.add_argument("--budget", type=int, default=10_000, help="refinement candidates")
        if out:
            sp.add_argument("--out", help="output path (default: stdout)")
        return sp

    sp = common(sub.add_parser("construct", help="build Lambda and its certificate"))
    sp.add_argument("--delta", required=True)
    sp.add_argument("--toy-primes", type=parse_primes, help="p1,p2,p3,ell (not faithful)")

    sp = common(sub.add_parser("verify", help="re-check a certificate and the stabilizer"), seed=False)
    sp.add_argument("--cert", required=True)
    sp.add_argument("--delta", required=True)

    sp = common(sub.add_parser("veech", help="Veech group of an origami"), seed=False)
    sp.add_argument("--origami", required=True)

    sp = common(sub.add_parser("decompose", help="alpha classes and their Gamma(2) action"), seed=False)
    sp.add_argument("--delta", required=True)

    sp = common(sub.add_parser("selfnorm", help="self-normalizing refinement"))
    sp.add_argument("--delta", required=True)

    common(sub.add_parser("atlas", help="dump the groups, bases and puncture data"), seed=False)

    sp = common(sub.add_parser("lemmas", help="run the reproduction suites"))
    sp.add_argument("--suite", action="append", help="suite name (repeatable)")
    sp.add_argument("--samples", type=int)
    sp.add_argument("--timings", action="store_true", help="include timings (not deterministic)")

    sp = common(sub.add_parser("export", help="export a subgroup of pi11 as an origami"), seed=False)
    g = sp.add_mutually_exclusive_group(required=True)
    g.add_argument("--pi14", action="store_true")
    g.add_argument("--cert")
    sp.add_argument("--bound", type=int, default=10_000)
    sp.add_argument("--format", choices=("json", "text"), default="json")
    return p


def error(msg: str, kind: str) -> None:
    obj = {"schema": "teichforge/error/v1", "error": msg, "kind": kind}
    sys.stdout.write(dumps(validate(obj, "error")))


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    cfg = RunConfig(args.command, getattr(args, "seed", 0), getattr(args, "budget", 10_000),
                    getattr(args, "bound", 10_000), getattr(args, "toy_primes", None),
                    getattr(args, "out", None), args.verbose)
    try:
        return COMMANDS[args.command](args, cfg)
    except InputError as e:
        error(str(e), "parse" if "JSON" in str(e) else "input")
        return 2
    except pipeline.BudgetExhausted as e:
        error(str(e), "budget")
        return 1
    except pipeline.GuardViolation as e:
        error(str(e), "guard")
        return 1
    except veech.DegreeBoundExceeded as e:
        error(str(e), "bound")
        return 1
    except pipeline.PipelineError as e:
        error(str(e), "pipeline")
        return 1


if __name__ == "__main__":
    sys.exit(main())
