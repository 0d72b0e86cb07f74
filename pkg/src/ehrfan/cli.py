"""Command-line front end: a thin client for the HTTP service.

Requests are posted to the FastAPI app through an in-process ASGI
transport, so no socket is opened; the same request/response documents
drive a standalone server.  Exit codes: 0 success, 1 domain error
(NOT_EHRHART, REFINEMENT_REQUIRED, ...), 2 malformed input or usage.
Output is a single JSON document on stdout, byte-deterministic for fixed
inputs.  Set EHRFAN_LOG to a level name for diagnostics on stderr.
"""

from __future__ import annotations

import argparse
import asyncio
import json
import logging
import os
import sys

import httpx

from .serialize import canonical_dumps

log = logging.getLogger("ehrfan")


def _load_json(path: str) -> dict:
    with open(path, "r", encoding="utf-8") as handle:
        return json.load(handle)


def _parse_cone(text: str) -> list[int]:
    return [int(part) for part in text.replace(",", " ").split()]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ehrfan",
        description="Exact Ehrhart functionals on unimodular fans",
    )
    sub = parser.add_subparsers(dest="group", required=True)

    def add(group, name):
        p = group.add_parser(name)
        p.add_argument("--fan", help="fan JSON file")
        p.add_argument("--fan2", help="second fan JSON file")
        p.add_argument("--pl", help="piecewise-linear values JSON file")
        p.add_argument("--pl2", help="second piecewise-linear values JSON file")
        p.add_argument("--matroid", help="matroid JSON file")
        p.add_argument("--pe", help="piecewise-exponential element JSON file")
        p.add_argument("--cone", help="ray indices, comma separated")
        p.add_argument("--interior", action="store_true")
        p.add_argument("--acknowledge-choice-dependence", action="store_true")
        p.add_argument("--max-shells", type=int, default=64)
        return p

    parser_group(sub, "fan", ["validate", "star", "subdivide", "product"], add)
    parser_group(sub, "ehrhart", ["check", "poly", "eval"], add)
    parser_group(sub, "volume", ["eval"], add)
    parser_group(sub, "polytope", ["count", "altsum"], add)
    parser_group(sub, "matroid", ["bergman", "chi"], add)
    parser_group(sub, "pe", ["normalform", "chi", "verify-maxmin"], add)
    return parser


def parser_group(sub, name, commands, add):
    group = sub.add_parser(name)
    inner = group.add_subparsers(dest="command", required=True)
    for cmd in commands:
        add(inner, cmd)
    return group


class SystemExit2(Exception):
    """Usage problem: reported as MALFORMED_INPUT with exit code 2."""


def _request_body(args) -> tuple[str, dict]:
    """Map the parsed command to (endpoint, request document)."""
    group, command = args.group, args.command
    body: dict = {}

    def need(flag: str):
        value = getattr(args, flag.replace("-", "_"))
        if value is None:
            raise SystemExit2(f"--{flag} is required for '{group} {command}'")
        return value

    if group == "fan":
        body["fan"] = _load_json(need("fan"))
        if command in ("star", "subdivide"):
            body["cone"] = _parse_cone(need("cone"))
        if command == "product":
            body["fan2"] = _load_json(need("fan2"))
        return f"/fan/{command}", body
    if group == "ehrhart":
        body["fan"] = _load_json(need("fan"))
        if command == "eval":
            body["pl"] = _load_json(need("pl"))
            body["acknowledge_choice_dependence"] = args.acknowledge_choice_dependence
        return f"/ehrhart/{command}", body
    if group == "volume":
        body["fan"] = _load_json(need("fan"))
        body["pl"] = _load_json(need("pl"))
        return "/volume/eval", body
    if group == "polytope":
        body["fan"] = _load_json(need("fan"))
        body["pl"] = _load_json(need("pl"))
        if command == "count":
            body["interior"] = args.interior
        else:
            body["max_shells"] = args.max_shells
        return f"/polytope/{command}", body
    if group == "matroid":
        body["matroid"] = _load_json(need("matroid"))
        if command == "chi":
            body["pl"] = _load_json(need("pl"))
        return f"/matroid/{command}", body
    if group == "pe":
        body["fan"] = _load_json(need("fan"))
        if command == "verify-maxmin":
            body["pl"] = _load_json(need("pl"))
            body["pl2"] = _load_json(need("pl2"))
        else:
            body["pe"] = _load_json(need("pe"))
        return f"/pe/{command}", body
    raise SystemExit2(f"unknown command {group} {command}")


def main(argv=None) -> int:
    level = os.environ.get("EHRFAN_LOG")
    if level:
        logging.basicConfig(level=level.upper(), stream=sys.stderr)
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        endpoint, body = _request_body(args)
    except SystemExit2 as exc:
        print(canonical_dumps({"error": {"code": "MALFORMED_INPUT", "message": str(exc)}}))
        return 2
    except (OSError, json.JSONDecodeError) as exc:
        print(canonical_dumps({"error": {"code": "MALFORMED_INPUT", "message": str(exc)}}))
        return 2

    from .service import app  # deferred: keeps --help fast

    async def post():
        transport = httpx.ASGITransport(app=app)
        async with httpx.AsyncClient(transport=transport, base_url="http://ehrfan") as client:
            log.info("POST %s", endpoint)
            return await client.post(endpoint, json=body)

    response = asyncio.run(post())
    sys.stdout.write(response.text + "\n")
    if response.status_code == 200:
        return 0
    if response.status_code == 422:
        return 1
    return 2


if __name__ == "__main__":
    sys.exit(main())
