"""Command-line front end: config parsing, dispatch, JSON reports.

Exit codes: 0 all assertions pass, 2 an identity check failed, 3 invalid
input, 4 numerical breakdown on valid input.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import cohomology, homology, pairing, theta
from .config import ModuliConfig
from .errors import (INPUT_ERRORS, NUMERIC_ERRORS, InvariantViolation,
                     ParseError)
from .report import IdentityReport
from .symfield import SymMatrix, get_context
from .theta import SeriesPolicy, TorusParam

EXIT_OK = 0
EXIT_IDENTITY_FAILURE = 2
EXIT_INVALID_INPUT = 3
EXIT_NUMERIC_BREAKDOWN = 4

_CONFIG_KEYS = {"tau", "n", "t", "c0", "c", "lambda"}


@dataclass
class RunConfig:
    """Parsed run parameters: the validated configuration plus CLI knobs."""

    cfg: ModuliConfig | None = None
    tolerances: dict = field(default_factory=dict)
    seed: int = 0
    output: str | None = None


def _as_complex(value, where: str) -> complex:
    if isinstance(value, (int, float)):
        return complex(value)
    if (isinstance(value, list) and len(value) == 2
            and all(isinstance(x, (int, float)) for x in value)):
        return complex(value[0], value[1])
    raise ParseError(f"{where}: expected a number or [re, im] pair")


def parse_config(text: str) -> RunConfig:
    """Parse and validate a JSON configuration document."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"malformed JSON (line {exc.lineno}, "
                         f"column {exc.colno}): {exc.msg}") from exc
    if not isinstance(doc, dict):
        raise ParseError("configuration must be a JSON object")
    unknown = set(doc) - _CONFIG_KEYS
    if unknown:
        raise ParseError(f"unknown configuration keys: {sorted(unknown)}")
    missing = _CONFIG_KEYS - set(doc)
    if missing:
        raise ParseError(f"missing configuration keys: {sorted(missing)}")
    if not isinstance(doc["n"], int):
        raise ParseError("n: expected an integer")
    n = doc["n"]
    if not isinstance(doc["t"], list) or not isinstance(doc["c"], list):
        raise ParseError("t and c must be lists of [re, im] pairs")
    t = [_as_complex(v, f"t[{i}]") for i, v in enumerate(doc["t"])]
    c = [_as_complex(v, f"c[{i}]") for i, v in enumerate(doc["c"])]
    tau = _as_complex(doc["tau"], "tau")
    if not tau.imag > 0:
        raise InvariantViolation("im tau", "tau must satisfy Im(tau) > 0")
    cfg = ModuliConfig(TorusParam(tau), n, tuple(t),
                       _as_complex(doc["c0"], "c0"), tuple(c),
                       _as_complex(doc["lambda"], "lambda"))
    return RunConfig(cfg=cfg)


def _c2pair(z: complex) -> list:
    return [float(z.real), float(z.imag)]


def _jsonify(obj):
    if isinstance(obj, complex):
        return _c2pair(obj)
    if isinstance(obj, np.ndarray):
        return [_jsonify(v) for v in obj.tolist()]
    if isinstance(obj, SymMatrix):
        return obj.to_text()
    if isinstance(obj, IdentityReport):
        return obj.as_dict()
    if isinstance(obj, dict):
        return {k: _jsonify(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonify(v) for v in obj]
    return obj


def _config_echo(cfg: ModuliConfig) -> dict:
    return {
        "tau": _c2pair(cfg.tau),
        "n": cfg.n,
        "t": [_c2pair(v) for v in cfg.t],
        "c0": _c2pair(cfg.c0),
        "c": [_c2pair(v) for v in cfg.c],
        "lambda": _c2pair(cfg.lam),
        "c_inf": _c2pair(cfg.c_inf),
        "integer_c_indices": list(cfg.integer_c_indices),
    }


def _parse_generator(text: str, cfg: ModuliConfig, dual: bool = False):
    """Generator spec: psi:J, dpsi:P, eta:P,Q,K, du, rhoprime:I,
    rhodiff:I,J."""
    base = cfg.dual() if dual else cfg
    name, _, rest = text.partition(":")
    idx = [int(v) for v in rest.split(",")] if rest else []
    try:
        if name == "psi":
            return cohomology.psi_form(idx[0], base)
        if name == "dpsi":
            return cohomology.dpsi_form(idx[0], base)
        if name == "eta":
            return cohomology.eta_form(idx[0], idx[1], idx[2], base)
        if name == "du":
            return cohomology.du_form(base)
        if name == "rhoprime":
            return cohomology.rho_prime_form(idx[0], base)
        if name == "rhodiff":
            return cohomology.rho_diff_form(idx[0], idx[1], base)
    except IndexError:
        raise ParseError(f"generator spec {text!r} is missing indices")
    raise ParseError(f"unknown generator spec {text!r}")


def _require_cfg(rc: RunConfig) -> ModuliConfig:
    if rc.cfg is None:
        raise ParseError("this command needs --config")
    return rc.cfg


def _worker_count() -> int:
    try:
        return max(1, int(os.environ.get("RWKIT_THREADS", "1")))
    except ValueError:
        return 1


def _verify_all(rc: RunConfig, tol_scale: float) -> IdentityReport:
    """The composed verification suite: exactly the acceptance identities
    at the provided configuration."""
    cfg = _require_cfg(rc)
    get_context(cfg.n)         # materialize the field context up front
    items = [
        ("theta", lambda: theta.verify_theta_identities(
            cfg.tp, samples=100, rng_seed=rc.seed)),
        ("homology", lambda: homology.verify_homology_suite(cfg.n)),
        ("cohomology", lambda: cohomology.verify_cohomology_suite(
            cfg, rng_seed=rc.seed)),
    ]

    def contiguity_item() -> IdentityReport:
        rep = IdentityReport("contiguity on integrals")
        path = pairing.SegmentPath(1, 2)
        p, q = (2, 3) if cfg.n >= 3 else (1, 2)
        res = pairing.verify_contiguity_integral(p, q, path, cfg)
        rep.add_numeric("contiguity_relation_on_integrals", res, 1e-6)
        return rep

    items.append(("pairing", contiguity_item))
    workers = _worker_count()
    report = IdentityReport(f"verify all (n={cfg.n})")
    if workers == 1:
        results = [fn() for _, fn in items]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(fn) for _, fn in items]
            results = [f.result() for f in futures]
    for sub in results:
        report.extend(sub)
    if tol_scale != 1.0:
        for chk in report.checks:
            if chk.tolerance is not None:
                chk.tolerance *= tol_scale
                chk.passed = chk.residual < chk.tolerance
    return report


def run(rc: RunConfig, args) -> tuple:
    """Execute one subcommand; returns (exit_code, result dict)."""
    tol_scale = rc.tolerances.get("scale", 1.0)
    out: dict = {"command": f"{args.group} {args.command}"}
    if rc.cfg is not None:
        out["config"] = _config_echo(rc.cfg)
    code = EXIT_OK

    if args.group == "theta" and args.command == "eval":
        if rc.cfg is not None:
            tp = rc.cfg.tp
        elif args.tau:
            tp = TorusParam(complex(*[float(v) for v in args.tau.split(",")]))
        else:
            raise ParseError("theta eval needs --tau or --config")
        u = complex(*[float(v) for v in args.u.split(",")])
        policy = SeriesPolicy()
        res = {"u": u, "tau": tp.tau, "theta1": theta.theta1(u, tp, policy)}
        for order in (1, 2, 3):
            res[f"theta1_d{order}"] = theta.theta1_deriv(u, tp, order, policy)
        out["result"] = res

    elif args.group == "homology":
        n = args.n if args.n else (_require_cfg(rc).n)
        if args.command == "matrix":
            out["result"] = {"which": args.which, "n": n,
                             "entries": homology.build_matrix(args.which, n)}
        elif args.command == "monodromy":
            out["result"] = {"p": args.p, "q": args.q, "n": n,
                             "entries": homology.monodromy_matrix(args.p, args.q, n)}
        elif args.command == "connection":
            build = (homology.connection_matrix_0 if args.dir == "0"
                     else homology.connection_matrix_inf)
            out["result"] = {"p": args.p, "dir": args.dir, "n": n,
                             "entries": build(args.p, n)}
        elif args.command == "verify":
            rep = homology.verify_homology_suite(n)
            out["result"] = rep
            code = EXIT_OK if rep.all_passed else EXIT_IDENTITY_FAILURE

    elif args.group == "cohomology":
        cfg = _require_cfg(rc)
        if args.command == "pair":
            a = _parse_generator(args.a, cfg)
            b = _parse_generator(args.b, cfg, dual=True)
            value = cohomology.ic_pair_numeric(a, b, cfg)
            res = {"a": args.a, "b": args.b, "engine": value}
            try:
                closed = cohomology.ic_closed_form(a.terms[0][1],
                                                   b.terms[0][1], cfg)
                res["closed_form"] = closed
                res["agreement"] = abs(value - closed) / max(1.0, abs(closed))
            except Exception:
                pass
            out["result"] = res
        elif args.command == "matrix":
            mat = cohomology.build_cmatrix(args.which, cfg, p=args.p,
                                           q=args.q)
            out["result"] = {"which": args.which, "entries": mat}
        elif args.command == "contiguity":
            mat = cohomology.contiguity_matrix(args.p, args.q, cfg)
            out["result"] = {"p": args.p, "q": args.q, "entries": mat}
        elif args.command == "verify":
            rep = cohomology.verify_cohomology_suite(cfg, rng_seed=rc.seed)
            out["result"] = rep
            code = EXIT_OK if rep.all_passed else EXIT_IDENTITY_FAILURE

    elif args.group == "pair":
        cfg = _require_cfg(rc)
        if args.command == "integrate":
            a, b = (int(v) for v in args.path.split(","))
            path = pairing.SegmentPath(a, b)
            phi = _parse_generator(args.phi, cfg)
            quad_tol = rc.tolerances.get("quad", 1e-10)
            value = pairing.rw_integral(path, phi, cfg, quad_tol=quad_tol)
            out["result"] = {"value": value, "path": [a, b], "phi": args.phi}
        elif args.command == "verify-contiguity":
            a, b = ((int(v) for v in args.path.split(","))
                    if args.path else (1, 2))
            path = pairing.SegmentPath(a, b)
            res = pairing.verify_contiguity_integral(args.p, args.q, path, cfg)
            tol = 1e-6 * tol_scale
            out["result"] = {"residual": res, "tolerance": tol,
                             "passed": res < tol}
            code = EXIT_OK if res < tol else EXIT_IDENTITY_FAILURE

    elif args.group == "verify" and args.command == "all":
        rep = _verify_all(rc, tol_scale)
        out["result"] = rep
        code = EXIT_OK if rep.all_passed else EXIT_IDENTITY_FAILURE

    else:
        raise ParseError(f"unknown command {args.group} {args.command}")

    return code, _jsonify(out)


def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", default=argparse.SUPPRESS,
                        help="JSON configuration file")
    common.add_argument("--tol", type=float, default=argparse.SUPPRESS,
                        help="scale every numeric tolerance by this factor")
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS)
    common.add_argument("--json", dest="json_out", default=argparse.SUPPRESS,
                        help="write the JSON report to this file")

    ap = argparse.ArgumentParser(
        prog="rwkit", parents=[common],
        description="Intersection numbers, monodromy, connection and "
                    "contiguity data for twisted (co)homology on a "
                    "once-punctured torus")
    sub = ap.add_subparsers(dest="group", required=True)

    def leaf(group, name):
        return group.add_parser(name, parents=[common])

    g = sub.add_parser("theta").add_subparsers(dest="command", required=True)
    p = leaf(g, "eval")
    p.add_argument("--u", required=True, help="point as RE,IM")
    p.add_argument("--tau", help="modulus as RE,IM (if no --config)")

    g = sub.add_parser("homology").add_subparsers(dest="command", required=True)
    p = leaf(g, "matrix")
    p.add_argument("--which", required=True)
    p.add_argument("--n", type=int)
    p = leaf(g, "monodromy")
    p.add_argument("p", type=int)
    p.add_argument("q", type=int)
    p.add_argument("--n", type=int)
    p = leaf(g, "connection")
    p.add_argument("p", type=int)
    p.add_argument("--dir", choices=("0", "inf"), required=True)
    p.add_argument("--n", type=int)
    p = leaf(g, "verify")
    p.add_argument("--n", type=int)

    g = sub.add_parser("cohomology").add_subparsers(dest="command",
                                                    required=True)
    p = leaf(g, "pair")
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)
    p = leaf(g, "matrix")
    p.add_argument("--which", required=True)
    p.add_argument("--p", type=int)
    p.add_argument("--q", type=int)
    p = leaf(g, "contiguity")
    p.add_argument("p", type=int)
    p.add_argument("q", type=int)
    leaf(g, "verify")

    g = sub.add_parser("pair").add_subparsers(dest="command", required=True)
    p = leaf(g, "integrate")
    p.add_argument("--path", required=True, help="start,end puncture indices")
    p.add_argument("--phi", required=True)
    p = leaf(g, "verify-contiguity")
    p.add_argument("p", type=int)
    p.add_argument("q", type=int)
    p.add_argument("--path", help="start,end puncture indices")

    g = sub.add_parser("verify").add_subparsers(dest="command", required=True)
    leaf(g, "all")
    return ap


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    json_out = getattr(args, "json_out", None)
    try:
        rc = RunConfig()
        config_path = getattr(args, "config", None)
        if config_path:
            with open(config_path, "r", encoding="utf-8") as fh:
                rc = parse_config(fh.read())
        rc.seed = getattr(args, "seed", 0)
        tol = getattr(args, "tol", None)
        if tol is not None:
            rc.tolerances["scale"] = tol
        rc.output = json_out
        code, out = run(rc, args)
    except INPUT_ERRORS as exc:
        _emit({"error": {"type": type(exc).__name__, "message": str(exc)}},
              json_out)
        return EXIT_INVALID_INPUT
    except NUMERIC_ERRORS as exc:
        _emit({"error": {"type": type(exc).__name__, "message": str(exc)}},
              json_out)
        return EXIT_NUMERIC_BREAKDOWN
    _emit(out, rc.output)
    return code


def _emit(out: dict, path: str | None) -> None:
    text = json.dumps(out, sort_keys=True, indent=2)
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        sys.stdout.write(text + "\n")


if __name__ == "__main__":
    sys.exit(main())
