"""Command line entry point: ``python -m gl4whittaker {verify,table,omega,whittaker}``."""
from __future__ import annotations

import argparse
import json
import os
import sys

THREADS_ENV = "GL4W_THREADS"
DEFAULTS = {
    "q": 3,
    "flavor": "eq",
    "x": "0,1,1,0",
    "theta_c": 1,
    "sweep": False,
    "oracle_samples": 0,
    "out": None,
    "n": 2,
    "l": 2,
    "tower": None,
}


def _apply_threads() -> None:
    n = os.environ.get(THREADS_ENV)
    if n:
        for var in ("NUMBA_NUM_THREADS", "OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
            os.environ.setdefault(var, n)


def _parse_x(text) -> tuple[int, ...]:
    if isinstance(text, (list, tuple)):
        return tuple(int(v) for v in text)
    parts = tuple(int(v) for v in str(text).split(","))
    if len(parts) != 4:
        raise argparse.ArgumentTypeError("--x takes four comma-separated F_q indices a0,a1,a2,a3")
    return parts


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="gl4whittaker", description=__doc__)
    ap.add_argument("--config", help="JSON file whose keys mirror the flags (command line wins)")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, x=True, c=True):
        p.add_argument("--q", type=int)
        p.add_argument("--flavor", choices=["eq", "witt"])
        p.add_argument("--n", type=int, help="matrix size of the small group; only 2 is supported")
        p.add_argument("--l", type=int, help="ring length; only 2 is supported")
        p.add_argument("--out")
        if x:
            p.add_argument("--x", help="a0,a1,a2,a3 coordinates of x in the quartic tower")
        if c:
            p.add_argument("--theta-c", type=int, dest="theta_c")

    v = sub.add_parser("verify", help="compare pi_{N,psi} with the induced representation")
    common(v)
    v.add_argument("--sweep", action="store_true", default=None, help="deterministic sweep over x and c")
    v.add_argument("--oracle-samples", type=int, dest="oracle_samples")
    common(sub.add_parser("table", help="character table of GL_2(o2) as CSV"), x=False, c=False)
    common(sub.add_parser("omega", help="double coset representatives and their invariants"), c=False)
    w = sub.add_parser("whittaker", help="Whittaker side per coset, as JSON")
    common(w)
    w.add_argument("--oracle-samples", type=int, dest="oracle_samples")
    return ap


def resolve(args: argparse.Namespace) -> dict:
    opts = dict(DEFAULTS)
    if args.config:
        with open(args.config) as fh:
            cfg = json.load(fh)
        unknown = set(cfg) - set(DEFAULTS)
        if unknown:
            raise SystemExit(f"unknown config keys: {sorted(unknown)}")
        opts.update(cfg)
    for k, val in vars(args).items():
        if k in DEFAULTS and val is not None:
            opts[k] = val
    if opts["n"] != 2 or opts["l"] != 2:
        raise SystemExit("only n = 2 and l = 2 are implemented; refusing to extrapolate")
    opts["x"] = _parse_x(opts["x"])
    return opts


def _emit(payload: dict, out: str | None) -> None:
    text = json.dumps(payload, indent=2, default=str)
    if out:
        with open(out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _tower(opts):
    from .tower import TowerParams

    t = opts["tower"]
    if t is None:
        return None
    return TowerParams.from_json(json.dumps(t) if isinstance(t, dict) else t)


def cmd_verify(opts) -> int:
    from .verifier import DEFAULT_C, DEFAULT_X, verify

    kw = dict(oracle_samples=int(opts["oracle_samples"]), params=_tower(opts))
    if opts["sweep"]:
        runs = [verify(opts["q"], opts["flavor"], x, c, **kw) for x in DEFAULT_X for c in DEFAULT_C]
        payload = {
            "verdict": all(r.verdict for r in runs),
            "runs": [r.to_dict() for r in runs],
        }
        for r in runs:
            d = r.to_dict()
            p = d["params"]
            print(f"x={p['x']} c={p['theta_c']}: {'PASS' if r.verdict else 'FAIL ' + ','.join(d['failed'])}", file=sys.stderr)
    else:
        r = verify(opts["q"], opts["flavor"], opts["x"], int(opts["theta_c"]), **kw)
        payload = r.to_dict()
        print(f"verdict: {r.verdict}", file=sys.stderr)
    _emit(payload, opts["out"])
    return 0 if payload["verdict"] else 1


def cmd_table(opts) -> int:
    from .verifier import workbench

    wb = workbench(opts["q"], opts["flavor"], _tower(opts))
    out = opts["out"] or f"table_q{opts['q']}_{opts['flavor']}.csv"
    wb.chars.to_csv(out)
    summary = wb.chars.summary()
    with open(os.path.splitext(out)[0] + ".json", "w") as fh:
        json.dump(summary, fh, indent=2, default=str)
    print(json.dumps(summary, indent=2, default=str))
    return 0 if wb.chars.completeness()["complete"] else 1


def cmd_omega(opts) -> int:
    from .cosets import CosetGeometry
    from .verifier import workbench

    wb = workbench(opts["q"], opts["flavor"], _tower(opts))
    geom = CosetGeometry(wb.element(opts["x"]))
    rows = [
        {
            "coset": [d.u, d.v],
            "det_L": int(d.det_L),
            "calB": d.calB.tolist() if d.nonvanishing else None,
            "calB_type": d.calB_type if d.nonvanishing else None,
        }
        for d in geom.build_omega0()
    ]
    _emit({"q": wb.q, "flavor": wb.flavor.value, "x": list(opts["x"]), "omega0": rows}, opts["out"])
    return 0


def cmd_whittaker(opts) -> int:
    from .verifier import oracle_checks, workbench
    from .whittaker import WhittakerEngine

    wb = workbench(opts["q"], opts["flavor"], _tower(opts))
    theta = wb.theta(opts["x"], int(opts["theta_c"]))
    engine = WhittakerEngine(wb.classes, theta)
    payload = engine.assemble().to_dict()
    ok = True
    if opts["oracle_samples"]:
        chk = oracle_checks(wb, theta, engine, int(opts["oracle_samples"]))
        payload["oracle"] = chk
        ok = chk["ok"]
    _emit(payload, opts["out"])
    return 0 if ok else 1


COMMANDS = {"verify": cmd_verify, "table": cmd_table, "omega": cmd_omega, "whittaker": cmd_whittaker}


def main(argv=None) -> int:
    _apply_threads()
    args = build_parser().parse_args(argv)
    opts = resolve(args)
    return COMMANDS[args.command](opts)


if __name__ == "__main__":
    sys.exit(main())
