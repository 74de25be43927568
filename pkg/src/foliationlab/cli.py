"""Thin-client CLI for the verification service.

Subcommands build a JSON request, send it to the FastAPI app (in-process by
default, or to a remote server via --server), write the returned report and
CSV artifacts under --out-dir, and translate the outcome into the exit-code
contract: 0 expectations met, 2 verdict mismatch, 3 Unresolved encountered,
4 input error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Optional

from .scenarios import canonical_json

EXIT_OK = 0
EXIT_MISMATCH = 2
EXIT_UNRESOLVED = 3
EXIT_INPUT = 4


class Client:
    """POST/GET against the service, in-process unless a server URL is given."""

    def __init__(self, server: Optional[str] = None):
        if server:
            import httpx

            self._client = httpx.Client(base_url=server.rstrip("/"), timeout=600.0)
        else:
            from fastapi.testclient import TestClient

            from .service import app

            self._client = TestClient(app)

    def post(self, path: str, payload: dict) -> tuple[int, dict]:
        resp = self._client.post(path, json=payload)
        return resp.status_code, resp.json()

    def get(self, path: str) -> tuple[int, dict]:
        resp = self._client.get(path)
        return resp.status_code, resp.json()


def _load_json(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise SystemExit(f"error: cannot read JSON from {path}: {exc}")


def _write_outputs(body: dict, out_dir: Path, name: str) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    report_path = out_dir / f"{name}.report.json"
    report_path.write_text(canonical_json({"report": body["report"], "meta": body["meta"]}),
                           encoding="utf-8")
    for fname, text in (body.get("artifacts") or {}).items():
        (out_dir / fname).write_text(text, encoding="utf-8")
    print(f"report: {report_path}")
    for fname in sorted(body.get("artifacts") or {}):
        print(f"artifact: {out_dir / fname}")


def _print_verdicts(body: dict) -> None:
    verdicts = body.get("report", {}).get("verdicts", {})
    for key in sorted(verdicts):
        print(f"  {key}: {verdicts[key]}")


def _run_one(client: Client, path: str, params: dict, expected: Optional[dict],
             out_dir: Path, name: str) -> int:
    status, body = client.post(path, {"params": params, "expected": expected})
    if status == 400:
        print(f"input error: {body.get('message')}", file=sys.stderr)
        return EXIT_INPUT
    if status == 422:
        print(f"{body.get('error', 'error')}: {body.get('message', body)}", file=sys.stderr)
        return EXIT_INPUT
    if status != 200:
        print(f"server error {status}: {body}", file=sys.stderr)
        return EXIT_INPUT
    print(f"scenario {body['report']['name']}:")
    _print_verdicts(body)
    _write_outputs(body, out_dir, name)
    return int(body.get("exit_code", 0))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="folab", description="verification lab client (foliation flows & envelopes)")
    parser.add_argument("--server", default=None,
                        help="service URL; defaults to running the app in-process")
    parser.add_argument("--out-dir", default="folab-out", help="directory for reports and CSVs")
    parser.add_argument("--expect", default=None,
                        help="JSON file with expected verdicts (regression mode)")
    parser.add_argument("--tol", type=float, default=None, help="flow tolerance override")
    parser.add_argument("--seeds", type=int, default=None,
                        help="seed-grid size / sample-count override")

    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("counterexample", help="notch region vs its convex hull")

    p = sub.add_parser("thm51", help="boundary-singularity battery")
    p.add_argument("--r", type=float, default=0.1)
    p.add_argument("--cubic-coeff", type=float, default=0.05)
    p.add_argument("--rng-seed", type=int, default=2027)

    p = sub.add_parser("classify", help="classify a quadratic-form gradient")
    p.add_argument("--form", default=None, help="JSON file with H and S matrices")
    p.add_argument("--count", type=int, default=100, help="truth-table size when no form given")

    p = sub.add_parser("rectify", help="rectify a conserved quantity")
    p.add_argument("--alpha", default="y_over_x")
    p.add_argument("--window", type=float, nargs=4, default=[0.5, 2.0, -1.0, 1.0],
                   metavar=("X0", "X1", "Y0", "Y1"))

    p = sub.add_parser("continue", help="analytic continuation of a germ along a path")
    p.add_argument("--germ", required=True, help="JSON germ spec")
    p.add_argument("--path", required=True, help="JSON path spec")

    p = sub.add_parser("linear", help="linear-field interval-hypothesis checks")
    p.add_argument("--matrix", default=None, help="JSON file with the complex matrix")
    p.add_argument("--domain", default=None, help="JSON domain spec")
    p.add_argument("--seed-points", default=None, help="JSON file with seed points")

    p = sub.add_parser("run-manifest", help="run a scenario manifest")
    p.add_argument("manifest", nargs="?", default="builtin",
                   help="manifest JSON file, or 'builtin'")
    p.add_argument("--parallel", action="store_true", help="run scenarios concurrently")

    p = sub.add_parser("scenario", help="run a named scenario")
    p.add_argument("name")

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    out_dir = Path(args.out_dir)
    expected = _load_json(args.expect) if args.expect else None
    client = Client(args.server)

    overrides = {}
    if args.tol is not None:
        overrides["tol"] = args.tol
    if args.seeds is not None:
        overrides["seeds"] = args.seeds

    cmd = args.command
    if cmd == "counterexample":
        return _run_one(client, "/run/counterexample", overrides, expected, out_dir, cmd)

    if cmd == "thm51":
        params = overrides | {"r": args.r, "cubic_coeff": args.cubic_coeff,
                              "rng_seed": args.rng_seed}
        return _run_one(client, "/run/thm51", params, expected, out_dir, cmd)

    if cmd == "classify":
        params = dict(overrides)
        if args.form:
            params["form"] = _load_json(args.form)
        else:
            params["count"] = args.count
        return _run_one(client, "/run/classify", params, expected, out_dir, cmd)

    if cmd == "rectify":
        params = overrides | {"alpha": args.alpha, "window": list(args.window)}
        return _run_one(client, "/run/rectify", params, expected, out_dir, cmd)

    if cmd == "continue":
        params = {"germ": _load_json(args.germ), "path": _load_json(args.path)}
        return _run_one(client, "/run/continue", params, expected, out_dir, "continuation")

    if cmd == "linear":
        params = dict(overrides)
        if args.matrix:
            params["matrix"] = _load_json(args.matrix)
            if not args.domain:
                raise SystemExit("error: --matrix needs --domain")
            params["domain"] = _load_json(args.domain)
            if args.seed_points:
                params["seed_points"] = _load_json(args.seed_points)
        return _run_one(client, "/run/linear", params, expected, out_dir, cmd)

    if cmd == "scenario":
        return _run_one(client, f"/scenarios/{args.name}", overrides, expected,
                        out_dir, args.name)

    if cmd == "run-manifest":
        payload = {"parallel": bool(args.parallel)}
        if args.manifest != "builtin":
            manifest = _load_json(args.manifest)
            entries = manifest if isinstance(manifest, list) else manifest.get("entries")
            if not isinstance(entries, list):
                print("error: manifest must be a list of entries or {'entries': [...]}",
                      file=sys.stderr)
                return EXIT_INPUT
            payload["entries"] = entries
        status, body = client.post("/manifest", payload)
        if status == 400:
            print(f"input error: {body.get('message')}", file=sys.stderr)
            return EXIT_INPUT
        if status != 200:
            print(f"server error {status}: {body}", file=sys.stderr)
            return EXIT_INPUT
        for item in body["reports"]:
            print(f"scenario {item['report']['name']}: exit {item['exit_code']}")
            _print_verdicts(item)
            _write_outputs(item, out_dir, item["report"]["name"])
        return int(body["exit_code"])

    return EXIT_INPUT


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
