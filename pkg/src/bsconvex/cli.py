"""Batch command-line front end.

The CLI is a thin client of the HTTP service: it builds a request body,
posts it (to an in-process ASGI app by default, or to ``--server URL``),
and renders the JSON payload deterministically.  No computation happens
here, so local and remote runs produce identical bytes.

Exit status: 0 success; 1 audit violation (a lemma check failed, which
would mean an implementation bug); 2 usage or configuration error;
3 memory budget exhausted (including truncated/partial reports).
"""

from __future__ import annotations

import argparse
import asyncio
import json
import sys
from typing import Optional

import httpx

from . import reports
from .errors import ConfigError
from .group import parse_element
from .service.models import std_generator_specs

_RENDERERS = {
    "constants": reports.render_constants_csv,
    "ball": reports.render_ball_csv,
    "len": reports.render_word_length_csv,
    "ac-table": reports.render_ac_table_csv,
    "lemma1": reports.render_lemma1_csv,
    "lemma2": reports.render_lemma2_csv,
    "witness": reports.render_witness_csv,
}

_PATHS = {
    "constants": "/v1/constants",
    "ball": "/v1/ball",
    "len": "/v1/word-length",
    "ac-table": "/v1/ac-table",
    "lemma1": "/v1/lemma1",
    "lemma2": "/v1/lemma2",
    "witness": "/v1/witness",
}


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # single-line diagnostics on stderr
        print(f"error: usage: {message}", file=sys.stderr)
        raise SystemExit(2)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="bsconvex", description=__doc__)
    parser.add_argument("--config", help="JSON config file (see README)")
    parser.add_argument(
        "--p", type=int, help="shortcut: standard generators a=(1,0), t=(0,1) over p"
    )
    parser.add_argument("--format", choices=["csv", "json"], help="output format")
    parser.add_argument("--server", help="base URL of a running service instance")
    parser.add_argument("--workers", type=int, help="worker count for ball expansion")
    parser.add_argument("--budget-bytes", type=int, help="memory budget override")
    parser.add_argument("--max-radius", type=int, help="radius cap override")

    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("constants", help="derived generating-set constants")
    s = sub.add_parser("ball", help="the ball B(n) as CSV/JSON")
    s.add_argument("--n", type=int, required=True)
    s = sub.add_parser("len", help="word length of an element")
    s.add_argument("--element", required=True, metavar="num/exp:c")
    s.add_argument("--max-r", type=int, help="search cap (default: max_radius)")
    s = sub.add_parser("ac-table", help="detour table N(n,k) for n <= N")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--k", type=int, default=2)
    s = sub.add_parser("lemma1", help="audit the horocyclic norm/denominator bounds")
    s.add_argument("--n", type=int, required=True)
    s = sub.add_parser("lemma2", help="audit the horocyclic Lipschitz bounds")
    s.add_argument("--r", type=int, required=True)
    s.add_argument("--n", type=int, required=True)
    s = sub.add_parser("witness", help="build and audit one witness family")
    s.add_argument("--k", type=int, required=True)
    s.add_argument("--j", type=int, default=1)
    return parser


def load_config(args) -> tuple[dict, str]:
    """The request ``config`` object plus the output format."""
    fmt = "csv"
    if args.config:
        try:
            with open(args.config, "r", encoding="utf-8") as fh:
                doc = json.load(fh)
        except OSError as e:
            raise ConfigError(f"cannot read config {args.config}: {e}") from e
        except json.JSONDecodeError as e:
            raise ConfigError(f"config {args.config} is not valid JSON: {e}") from e
        if not isinstance(doc, dict):
            raise ConfigError("config must be a JSON object")
        for field in ("p", "generators"):
            if field not in doc:
                raise ConfigError(f"config is missing required field {field!r}")
        fmt = doc.pop("output_format", "csv")
        if fmt not in ("csv", "json"):
            raise ConfigError(f"output_format must be csv or json, got {fmt!r}")
        cfg = doc
    elif args.p is not None:
        cfg = {"p": args.p, "generators": std_generator_specs()}
    else:
        raise ConfigError("either --config or --p is required")
    if args.workers is not None:
        cfg["workers"] = args.workers
    if args.budget_bytes is not None:
        cfg["memory_budget_bytes"] = args.budget_bytes
    if args.max_radius is not None:
        cfg["max_radius"] = args.max_radius
    if args.format is not None:
        fmt = args.format
    return cfg, fmt


def build_request(args, cfg: dict) -> dict:
    body: dict = {"config": cfg}
    if args.command == "ball":
        body["n"] = args.n
    elif args.command == "len":
        p = cfg["p"]
        if not isinstance(p, int) or abs(p) < 2:
            raise ConfigError(f"|p| must be at least 2, got {p!r}")
        el = parse_element(args.element, p)
        body["element"] = {"num": str(el.f.num), "exp": el.f.exp, "c": el.c}
        if args.max_r is not None:
            body["max_r"] = args.max_r
    elif args.command == "ac-table":
        body["n_max"] = args.n
        body["k"] = args.k
    elif args.command == "lemma1":
        body["n"] = args.n
    elif args.command == "lemma2":
        body["r"] = args.r
        body["n"] = args.n
    elif args.command == "witness":
        body["k"] = args.k
        body["j"] = args.j
    return body


def post(path: str, body: dict, server: Optional[str]) -> tuple[int, dict]:
    if server:
        with httpx.Client(base_url=server, timeout=600.0) as client:
            resp = client.post(path, json=body)
            return resp.status_code, resp.json()
    return asyncio.run(_post_in_process(path, body))


async def _post_in_process(path: str, body: dict) -> tuple[int, dict]:
    from .service import app  # imported lazily: pulls in FastAPI

    transport = httpx.ASGITransport(app=app)
    async with httpx.AsyncClient(
        transport=transport, base_url="http://bsconvex.local"
    ) as client:
        resp = await client.post(path, json=body)
        return resp.status_code, resp.json()


def main(argv: Optional[list[str]] = None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as e:  # argparse reports usage errors via exit
        return int(e.code or 0)
    try:
        cfg, fmt = load_config(args)
        body = build_request(args, cfg)
    except ConfigError as e:
        print(f"error: config: {e}", file=sys.stderr)
        return 2
    try:
        status, payload = post(_PATHS[args.command], body, args.server)
    except httpx.HTTPError as e:
        print(f"error: transport: {e}", file=sys.stderr)
        return 2
    if status != 200:
        detail = payload.get("error", {}) if isinstance(payload, dict) else {}
        code = detail.get("code", "internal")
        message = detail.get("message", "request failed")
        print(f"error: {code}: {message}", file=sys.stderr)
        if status == 507:
            return 3
        return 2
    text = (
        reports.render_json(payload)
        if fmt == "json"
        else _RENDERERS[args.command](payload)
    )
    sys.stdout.write(text)
    code = exit_code_for(payload)
    if code == 3:
        print("error: budget: report truncated by memory budget", file=sys.stderr)
    return code


def exit_code_for(payload: dict) -> int:
    """0 success, 1 audit violation, 3 budget-truncated report."""
    if payload.get("ok") is False:
        return 1
    if payload.get("truncated") or payload.get("partial"):
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
