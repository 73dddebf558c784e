"""Command-line client for the workbench service.

The CLI performs no computation itself: it builds a request, sends it to
the FastAPI app (in-process by default, or a remote server via --server)
and writes the response as a reproducible JSON artifact.  Artifacts embed
the full normalized run configuration and a schema version; identical
configurations produce byte-identical artifacts.

Exit codes: 0 success/pass, 1 mathematical fail (the artifact carries the
violating witness), 2 usage error, 3 resource or budget exhaustion.
"""

from __future__ import annotations

import argparse
import asyncio
import json
import sys
from typing import Any, Dict, Optional, Tuple

import httpx

from .wire import SCHEMA_VERSION, atomic_write, canonical_json_bytes

EXIT_OK = 0
EXIT_MATH_FAIL = 1
EXIT_USAGE = 2
EXIT_RESOURCE = 3


def _window(text: str) -> Tuple[int, int]:
    try:
        lo, hi = text.split(":")
        return int(lo), int(hi)
    except ValueError:
        raise argparse.ArgumentTypeError(f"window must look like 2:60, got {text!r}")


def _int_list(text: str) -> list:
    if not text:
        return []
    return [int(x) for x in text.split(",")]


def _str_list(text: str) -> list:
    return [x for x in text.split(",") if x]


def _vec(text: str) -> Dict[str, Any]:
    coeffs = {}
    for part in text.split(","):
        idx, coeff = part.split(":")
        coeffs[idx.strip()] = coeff.strip()
    return {"coeffs": coeffs}


def _load_json(path: str):
    with open(path, "r", encoding="utf-8") as handle:
        return json.load(handle)


def _unwrap(data, key: str):
    """Accept either a bare object or an artifact wrapping it under result."""
    if isinstance(data, dict) and "result" in data and "config" in data:
        result = data["result"]
        return result[key] if key in result else result
    if isinstance(data, dict) and key in data and "type" not in data:
        return data[key]
    return data


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="schreierlab",
        description="workbench for Schreier families, exact norms and certificates",
        allow_abbrev=False,
    )
    parser.add_argument("--server", default=None, help="remote service URL (default: in-process)")
    parser.add_argument("--budget", type=int, default=None, help="search/verify budget")
    parser.add_argument("--seed", type=int, default=None, help="recorded in the artifact; searches are deterministic by default")
    parser.add_argument("--out", default=None, help="artifact path (default: stdout)")
    groups = parser.add_subparsers(dest="group", required=True)

    serve = groups.add_parser("serve", allow_abbrev=False, help="run the compute service")
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", type=int, default=8000)

    ordinal = groups.add_parser("ordinal", allow_abbrev=False).add_subparsers(
        dest="command", required=True
    )
    p = ordinal.add_parser("classify", allow_abbrev=False)
    p.add_argument("--ordinal", required=True)
    p = ordinal.add_parser("assoc", allow_abbrev=False)
    p.add_argument("--ordinal", required=True)
    p.add_argument("--n", type=int, required=True)
    p = ordinal.add_parser("compare", allow_abbrev=False)
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)

    schreier = groups.add_parser("schreier", allow_abbrev=False).add_subparsers(
        dest="command", required=True
    )
    p = schreier.add_parser("member", allow_abbrev=False)
    p.add_argument("--alpha", required=True)
    p.add_argument("--set", dest="elements", type=_int_list, required=True)
    p = schreier.add_parser("enum", allow_abbrev=False)
    p.add_argument("--alpha", required=True)
    p.add_argument("--window", type=_window, required=True)
    p.add_argument("--maximal", action="store_true")
    p = schreier.add_parser("threshold", allow_abbrev=False)
    p.add_argument("--from", dest="from_level", required=True)
    p.add_argument("--to", dest="to_level", required=True)
    p.add_argument("--width", type=int, required=True)
    p = schreier.add_parser("restrict", allow_abbrev=False)
    p.add_argument("--alpha", default=None, help="restrict this family level")
    p.add_argument("--members", default=None, help="explicit family: sets like 1,2;3")
    p.add_argument("--m", type=_int_list, required=True)
    p.add_argument("--window", type=_window, default=None)

    nrm = groups.add_parser("norm", allow_abbrev=False).add_subparsers(
        dest="command", required=True
    )
    for name in ("eval", "a1-search", "kpoints"):
        p = nrm.add_parser(name, allow_abbrev=False)
        p.add_argument("--model", choices=("schreier", "tsirelson"), required=True)
        p.add_argument("--alpha", default="1")
        p.add_argument("--theta", default="1/2")
        if name == "eval":
            p.add_argument("--vec", type=_vec, required=True)
        else:
            p.add_argument("--window", type=_window, required=True)
        if name == "a1-search":
            p.add_argument("--grid", type=_str_list, default=["1"])
        if name == "kpoints":
            p.add_argument("--depth", type=int, default=None)

    block = groups.add_parser("block", allow_abbrev=False).add_subparsers(
        dest="command", required=True
    )
    p = block.add_parser("find0", allow_abbrev=False)
    p.add_argument("--model", choices=("schreier", "tsirelson"), required=True)
    p.add_argument("--alpha", default="1")
    p.add_argument("--theta", default="1/2")
    p.add_argument("--window", type=_window, required=True)
    p.add_argument("--eps", required=True)
    p = block.add_parser("verify", allow_abbrev=False)
    p.add_argument("cert_file")
    p = block.add_parser("restrict", allow_abbrev=False)
    p.add_argument("cert_file")
    p.add_argument("--i0", type=_int_list, required=True)
    p = block.add_parser("tau", allow_abbrev=False)
    p.add_argument("--model", choices=("schreier", "tsirelson"), required=True)
    p.add_argument("--alpha", default="1")
    p.add_argument("--theta", default="1/2")
    p.add_argument("--window", type=_window, required=True)

    chain = groups.add_parser("chain", allow_abbrev=False).add_subparsers(
        dest="command", required=True
    )
    p = chain.add_parser("search", allow_abbrev=False)
    p.add_argument("--model", choices=("schreier", "tsirelson"), required=True)
    p.add_argument("--alpha", default="2", help="model family level")
    p.add_argument("--theta", default="1/2")
    p.add_argument("--level", default="1", help="chain level ordinal")
    p.add_argument("--window", type=_window, required=True)
    p.add_argument("--len", dest="length", type=int, required=True)
    p.add_argument("--delta", required=True)
    p.add_argument("--eps-seq", type=_str_list, default=None)
    p = chain.add_parser("verify", allow_abbrev=False)
    p.add_argument("chain_file")
    p = chain.add_parser("check-l3", allow_abbrev=False)
    p.add_argument("search_file", help="artifact produced by chain search")
    p.add_argument("--j", type=_int_list, required=True)
    p = chain.add_parser("check-l4", allow_abbrev=False)
    p.add_argument("search_file", help="artifact produced by chain search")

    msep = groups.add_parser("msep", allow_abbrev=False).add_subparsers(
        dest="command", required=True
    )
    p = msep.add_parser("run", allow_abbrev=False)
    p.add_argument("--model", choices=("schreier",), default="schreier")
    p.add_argument("--alpha", required=True, help="separation level ordinal")
    p.add_argument("--rho", required=True)
    p.add_argument("--family", required=True, help="family JSON file, or 'bundled'")
    p.add_argument("--window", type=_window, required=True)
    p = msep.add_parser("check-norming", allow_abbrev=False)
    p.add_argument("family_file")
    p.add_argument("--window", type=_window, required=True)
    p.add_argument("--rho", required=True)
    p.add_argument("--grid", type=_str_list, default=["1"])
    p.add_argument("--max-support", type=int, default=1)
    p = msep.add_parser("good", allow_abbrev=False)
    p.add_argument("family_file")
    p.add_argument("--measure", type=int, default=0)
    p.add_argument("--prefix", type=_int_list, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--rho", required=True)

    return parser


def _model_payload(args) -> Dict[str, Any]:
    out = {"kind": args.model, "alpha": args.alpha}
    if args.model == "tsirelson":
        out["theta"] = args.theta
    return out


def _bundled_family(window: Tuple[int, int], alpha: str) -> Dict[str, Any]:
    # the bundled fixture: point masses at maximal-in-window family sets on
    # the level-max(alpha,1) model (separation level 0 still runs on level 1)
    from .goodness import point_mass_family
    from .schreier import FinSet
    from .normmodel import schreier_space
    from . import wire as w
    from . import ordinal as ordmod

    level = ordmod.parse(alpha)
    if level.is_zero:
        level = ordmod.ONE
    model = schreier_space(level)
    fam = point_mass_family(model, FinSet(tuple(range(window[0], window[1] + 1))))
    return w.family_json(fam)


def build_request(args) -> Tuple[str, Dict[str, Any]]:
    g, c = args.group, args.command
    if g == "ordinal":
        if c == "classify":
            return "/ordinal/classify", {"ordinal": args.ordinal}
        if c == "assoc":
            return "/ordinal/assoc", {"ordinal": args.ordinal, "n": args.n}
        if c == "compare":
            return "/ordinal/compare", {"a": args.a, "b": args.b}
    if g == "schreier":
        if c == "member":
            return "/schreier/member", {"alpha": args.alpha, "elements": args.elements}
        if c == "enum":
            payload = {
                "alpha": args.alpha,
                "lo": args.window[0],
                "hi": args.window[1],
                "maximal": args.maximal,
            }
            if args.budget is not None:
                payload["budget"] = args.budget
            return "/schreier/enum", payload
        if c == "threshold":
            return "/schreier/threshold", {
                "from_level": args.from_level,
                "to_level": args.to_level,
                "width": args.width,
            }
        if c == "restrict":
            if args.members is not None:
                family = {
                    "kind": "explicit",
                    "members": [_int_list(s) for s in args.members.split(";")],
                }
            elif args.alpha is not None:
                family = {"kind": "schreier", "alpha": args.alpha}
            else:
                raise SystemExit2("restrict needs --alpha or --members")
            payload = {"family": family, "m": args.m}
            if args.window is not None:
                payload["window"] = list(args.window)
            return "/schreier/restrict", payload
    if g == "norm":
        model = _model_payload(args)
        if c == "eval":
            return "/norm/eval", {"model": model, "vec": args.vec}
        if c == "a1-search":
            payload = {
                "model": model,
                "lo": args.window[0],
                "hi": args.window[1],
                "coeff_grid": args.grid,
            }
            if args.budget is not None:
                payload["budget"] = args.budget
            return "/norm/a1-search", payload
        if c == "kpoints":
            payload = {"model": model, "lo": args.window[0], "hi": args.window[1]}
            if args.depth is not None:
                payload["depth"] = args.depth
            return "/norm/kpoints", payload
    if g == "block":
        if c == "find0":
            payload = {
                "model": _model_payload(args),
                "lo": args.window[0],
                "hi": args.window[1],
                "eps": args.eps,
            }
            if args.budget is not None:
                payload["budget"] = args.budget
            return "/block/find0", payload
        if c == "verify":
            cert = _unwrap(_load_json(args.cert_file), "cert")
            payload = {"cert": cert}
            if args.budget is not None:
                payload["budget"] = args.budget
            return "/block/verify", payload
        if c == "restrict":
            cert = _unwrap(_load_json(args.cert_file), "cert")
            return "/block/restrict", {"cert": cert, "i0": args.i0}
        if c == "tau":
            payload = {
                "model": _model_payload(args),
                "lo": args.window[0],
                "hi": args.window[1],
            }
            if args.budget is not None:
                payload["budget"] = args.budget
            return "/block/tau", payload
    if g == "chain":
        if c == "search":
            payload = {
                "model": _model_payload(args),
                "alpha": args.level,
                "lo": args.window[0],
                "hi": args.window[1],
                "delta": args.delta,
                "length": args.length,
            }
            if args.eps_seq is not None:
                payload["eps_seq"] = args.eps_seq
            if args.budget is not None:
                payload["budget"] = args.budget
            return "/chain/search", payload
        if c == "verify":
            chain = _unwrap(_load_json(args.chain_file), "chain")
            payload = {"chain": chain}
            if args.budget is not None:
                payload["budget"] = args.budget
            return "/chain/verify", payload
        if c in ("check-l3", "check-l4"):
            artifact = _load_json(args.search_file)
            result = artifact.get("result", artifact)
            base = {
                "chain": result["chain"],
                "points": result["points"],
                "tau_hat": result["tau_hat"],
                "delta": result["delta"],
            }
            if c == "check-l3":
                base["j"] = args.j
                return "/chain/check-l3", base
            base["t0"] = result["t0"]
            return "/chain/check-l4", base
    if g == "msep":
        if c == "run":
            if args.family == "bundled":
                family = _bundled_family(args.window, args.alpha)
            else:
                family = _unwrap(_load_json(args.family), "family")
            window = list(range(args.window[0], args.window[1] + 1))
            return "/msep/run", {
                "family": family,
                "alpha": args.alpha,
                "rho": args.rho,
                "window": window,
            }
        if c == "check-norming":
            family = _unwrap(_load_json(args.family_file), "family")
            return "/msep/check-norming", {
                "family": family,
                "pool": list(range(args.window[0], args.window[1] + 1)),
                "coeff_grid": args.grid,
                "rho": args.rho,
                "max_support": args.max_support,
            }
        if c == "good":
            family = _unwrap(_load_json(args.family_file), "family")
            return "/msep/good", {
                "family": family,
                "measure_index": args.measure,
                "prefix": args.prefix,
                "n": args.n,
                "rho": args.rho,
            }
    raise SystemExit2(f"unknown command {g} {c}")


class SystemExit2(Exception):
    pass


# mathematical pass/fail probes per endpoint; None means always a success
_MATH_VERDICT = {
    "/block/verify": lambda r: r["passed"],
    "/chain/verify": lambda r: r["passed"],
    "/chain/check-l3": lambda r: r["holds"],
    "/chain/check-l4": lambda r: r["holds"],
    "/msep/run": lambda r: r["ok"],
    "/msep/check-norming": lambda r: r["passed"],
    "/norm/a1-search": lambda r: not r["violation"],
}


async def _post_async(path: str, payload: Dict[str, Any], server: Optional[str]):
    if server is None:
        from .service import app

        transport = httpx.ASGITransport(app=app)
        async with httpx.AsyncClient(
            transport=transport, base_url="http://workbench", timeout=None
        ) as client:
            return await client.post(path, json=payload)
    async with httpx.AsyncClient(base_url=server, timeout=None) as client:
        return await client.post(path, json=payload)


def run(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.group == "serve":
        import uvicorn

        from .service import app

        uvicorn.run(app, host=args.host, port=args.port)
        return EXIT_OK
    try:
        path, payload = build_request(args)
    except SystemExit2 as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (OSError, json.JSONDecodeError, KeyError, ValueError) as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    response = asyncio.run(_post_async(path, payload, args.server))
    config = {
        "command": f"{args.group} {args.command}",
        "endpoint": path,
        "params": payload,
        "budget": args.budget,
        "seed": args.seed,
        "schema_version": SCHEMA_VERSION,
    }
    if response.status_code == 400 or response.status_code == 422:
        print(f"usage error: {response.text}", file=sys.stderr)
        return EXIT_USAGE
    if response.status_code == 409:
        artifact = {"schema_version": SCHEMA_VERSION, "config": config, "error": response.json()["error"]}
        _emit(args.out, artifact)
        return EXIT_RESOURCE
    if response.status_code != 200:
        print(f"service error {response.status_code}: {response.text}", file=sys.stderr)
        return EXIT_USAGE
    result = response.json()
    artifact = {"schema_version": SCHEMA_VERSION, "config": config, "result": result}
    _emit(args.out, artifact)
    probe = _MATH_VERDICT.get(path)
    if probe is not None and not probe(result):
        return EXIT_MATH_FAIL
    return EXIT_OK


def _emit(out: Optional[str], artifact) -> None:
    data = canonical_json_bytes(artifact)
    if out is None:
        sys.stdout.write(data.decode())
    else:
        atomic_write(out, data)


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
