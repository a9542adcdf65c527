"""Command-line front end.

Exit codes: 0 success, 1 domain or file errors (JSON error object on
stderr), 2 usage errors. Default tolerances can be overridden through the
environment variables ``UISCERT_RANK_TOL``, ``UISCERT_PROD_TOL`` and
``UISCERT_CONV_TOL``, read once at startup.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import warnings
from dataclasses import dataclass

from . import io
from .certify import (certify_uis, classify_ghz_w, find_collapse, hyperdeterminant,
                      prop5_check, three_tangle, verify_collapse)
from .errors import UISError
from .product_opt import ProductSearchBudget, best_product_approximation
from .schmidt import RANK_TOL, schmidt_decompose, separability_class
from .states import Bipartition, all_cuts
from .ueb import build_3ueb, build_w_ueb, unambiguous_locc_feasible, verify_ueb

ENV_PREFIX = "UISCERT_"


@dataclass(frozen=True)
class RunConfig:
    command: str
    seed: int = 0
    rank_tol: float = RANK_TOL
    prod_tol: float = RANK_TOL
    conv_tol: float = 1e-12
    output: str = "json"

    def __post_init__(self):
        for name in ("rank_tol", "prod_tol", "conv_tol"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")


def _env_defaults(environ) -> dict:
    out = {}
    for key, default in (("rank_tol", RANK_TOL), ("prod_tol", RANK_TOL), ("conv_tol", 1e-12)):
        raw = environ.get(ENV_PREFIX + key.upper())
        out[key] = float(raw) if raw else default
    return out


def _positive_float(text):
    try:
        x = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not x > 0:
        raise argparse.ArgumentTypeError("must be positive")
    return x


def _positive_int(text):
    try:
        x = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if x < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return x


def _cut(text):
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"cut must be comma-separated party indices: {text!r}") \
            from None


def _complex(text):
    try:
        return complex(text.replace(" ", ""))
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a complex number: {text!r}") from None


def build_parser(defaults: dict) -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--rank-tol", type=_positive_float, default=defaults["rank_tol"])
    common.add_argument("--prod-tol", type=_positive_float, default=defaults["prod_tol"])
    common.add_argument("--conv-tol", type=_positive_float, default=defaults["conv_tol"])
    common.add_argument("--format", choices=("json", "text"), default="json", dest="output")

    search = argparse.ArgumentParser(add_help=False)
    search.add_argument("--restarts", "--budget", type=_positive_int, default=32,
                        dest="restarts")
    search.add_argument("--max-iters", type=_positive_int, default=500)

    parser = argparse.ArgumentParser(prog="uiscert", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", parents=[common], help="dims, norm, class and per-cut Schmidt data")
    p.add_argument("state")
    p = sub.add_parser("schmidt", parents=[common], help="Schmidt coefficients across one cut")
    p.add_argument("--cut", type=_cut, required=True)
    p.add_argument("state")
    p = sub.add_parser("approx-product", parents=[common, search],
                       help="best completely product approximation")
    p.add_argument("state")
    p = sub.add_parser("certify-uis", parents=[common, search],
                       help="certify superposition robustness or find a collapse")
    p.add_argument("state")
    p = sub.add_parser("collapse", parents=[common, search], help="search for a collapse witness")
    p.add_argument("state")
    p = sub.add_parser("verify-witness", parents=[common],
                       help="re-verify a collapse witness from a certificate file")
    p.add_argument("state")
    p.add_argument("certificate")
    p = sub.add_parser("classify3q", parents=[common], help="GHZ vs W class via the 3-tangle")
    p.add_argument("state")
    p = sub.add_parser("prop5", parents=[common],
                       help="superpose with a bi-separable state across the structural cut")
    p.add_argument("state")
    p.add_argument("partner")
    p.add_argument("--a", type=_complex, required=True)
    p.add_argument("--b", type=_complex, required=True)

    ueb = sub.add_parser("ueb", help="build or verify unextendible entangled bases")
    usub = ueb.add_subparsers(dest="ueb_command", required=True)
    p = usub.add_parser("build", parents=[common])
    p.add_argument("kind", choices=("w", "3x3x3"))
    p.add_argument("--out", required=True)
    p = usub.add_parser("verify", parents=[common])
    p.add_argument("manifest")
    p.add_argument("--samples", type=_positive_int, default=1000)

    p = sub.add_parser("discriminate", parents=[common, search],
                       help="unambiguous LOCC identification of one set member")
    p.add_argument("manifest")
    p.add_argument("--target", type=int, required=True)
    return parser


def _budget(args, cfg: RunConfig) -> ProductSearchBudget:
    return ProductSearchBudget(restarts=args.restarts, max_iters=args.max_iters,
                               conv_tol=cfg.conv_tol, seed=cfg.seed)


def _cut_data(psi, cut, tol):
    sd = schmidt_decompose(psi, cut, tol)
    return {"cut": list(cut.left_parties), "coeffs": [io._f(c) for c in sd.coeffs],
            "rank": sd.rank}


def run(args, cfg: RunConfig) -> dict:
    cmd = args.command
    if cmd == "analyze":
        psi = io.read_state(args.state)
        sep = separability_class(psi, cfg.rank_tol)
        return {"dims": list(psi.dims), "norm": io._f(psi.norm),
                "separability": {"tag": sep.tag.value,
                                 "partition": [list(b) for b in sep.partition]},
                "cuts": [_cut_data(psi, c, cfg.rank_tol) for c in all_cuts(psi.n)]}
    if cmd == "schmidt":
        psi = io.read_state(args.state)
        return _cut_data(psi, Bipartition.of(args.cut, psi.n), cfg.rank_tol)
    if cmd == "approx-product":
        w = best_product_approximation(io.read_state(args.state), _budget(args, cfg))
        return io.product_witness_to_dict(w)
    if cmd == "certify-uis":
        return io.certificate_to_dict(certify_uis(io.read_state(args.state), _budget(args, cfg)))
    if cmd == "collapse":
        w = find_collapse(io.read_state(args.state), _budget(args, cfg))
        out = {"found": w is not None, "restarts": args.restarts, "seed": cfg.seed}
        if w is not None:
            out["witness"] = io.witness_to_dict(w)
        return out
    if cmd == "verify-witness":
        psi = io.read_state(args.state)
        cert = io.read_json(args.certificate)
        payload = cert.get("witness", cert) if isinstance(cert, dict) else cert
        w = io.witness_from_dict(payload)
        return {"verified": verify_collapse(psi, w, cfg.prod_tol)}
    if cmd == "classify3q":
        psi = io.read_state(args.state)
        return {"class": classify_ghz_w(psi).value, "three_tangle": io._f(three_tangle(psi)),
                "hyperdeterminant": io.cpx(hyperdeterminant(psi))}
    if cmd == "prop5":
        v = prop5_check(io.read_state(args.state), io.read_state(args.partner), args.a, args.b)
        return io.prop5_to_dict(v)
    if cmd == "ueb":
        if args.ueb_command == "build":
            s = build_w_ueb() if args.kind == "w" else build_3ueb()
            path = io.write_manifest(args.out, s)
            return {"manifest": str(path), "members": len(s.members),
                    "complement": len(s.complement_basis)}
        s = io.read_manifest(args.manifest)
        return io.report_to_dict(verify_ueb(s, args.samples, cfg.seed))
    if cmd == "discriminate":
        s = io.read_manifest(args.manifest)
        return io.discrimination_to_dict(
            unambiguous_locc_feasible(s, args.target, _budget(args, cfg)))
    raise AssertionError(cmd)


def _text(obj, indent=0) -> str:
    pad = "  " * indent
    lines = []
    for k, v in obj.items():
        if isinstance(v, dict):
            lines.append(f"{pad}{k}:")
            lines.append(_text(v, indent + 1))
        else:
            lines.append(f"{pad}{k}: {json.dumps(v)}")
    return "\n".join(lines)


def main(argv=None) -> int:
    defaults = _env_defaults(os.environ)
    parser = build_parser(defaults)
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    cfg = RunConfig(command=args.command, seed=getattr(args, "seed", 0),
                    rank_tol=getattr(args, "rank_tol", defaults["rank_tol"]),
                    prod_tol=getattr(args, "prod_tol", defaults["prod_tol"]),
                    conv_tol=getattr(args, "conv_tol", defaults["conv_tol"]),
                    output=getattr(args, "output", "json"))
    try:
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            result = run(args, cfg)
        for w in caught:
            print(json.dumps({"warning": str(w.message)}), file=sys.stderr)
    except UISError as exc:
        print(json.dumps({"error": exc.code, "message": str(exc)}), file=sys.stderr)
        return 1
    print(io.dumps(result) if cfg.output == "json" else _text(result))
    return 0


if __name__ == "__main__":
    sys.exit(main())
