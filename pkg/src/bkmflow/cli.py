"""Command-line front end.

Runs the pipeline in-process by default; with ``--server URL`` every
subcommand is forwarded to a running ``bkmflow serve`` instance instead.
Exit codes: 0 pass, 1 numerical failure, 2 config error, 3 singularity abort.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys

import numpy as np

from . import __version__
from .errors import BkmError, ConfigError

EXIT_CONFIG = 2


class LocalBackend:
    def __init__(self):
        from . import service

        self.s = service

    def presets(self):
        return self.s.list_presets()

    def preset(self, name):
        return self.s.show_preset(name)

    def run(self, target, out_dir, workers):
        return self.s.run(target, out_dir, workers)

    def verify(self, directory):
        return self.s.verify(directory)

    def export(self, directory, fmt):
        return self.s.export_dir(directory, fmt)


class RemoteError(BkmError):
    """An error reported by the server, already described there."""

    def __init__(self, description, exit_code):
        super().__init__(description)
        self.exit_code = exit_code

    def describe(self):
        return str(self)


class HttpBackend:
    """Thin client for the HTTP service; server-side errors keep their exit code."""

    def __init__(self, url, timeout=600.0):
        import httpx

        self.http = httpx.Client(base_url=url.rstrip("/"), timeout=timeout)
        self.httpx = httpx

    def _call(self, method, path, **kw):
        try:
            r = self.http.request(method, path, **kw)
        except self.httpx.HTTPError as exc:
            raise ConfigError(f"cannot reach server: {exc}") from None
        if r.status_code < 400:
            return r.json()
        detail = r.json().get("detail")
        if isinstance(detail, dict) and "exit_code" in detail:
            raise RemoteError(detail.get("error", "server error"), int(detail["exit_code"]))
        raise ConfigError(f"server rejected request ({r.status_code}): {detail}")

    def _post(self, path, body):
        # scenarios may hold Infinity (e.g. max_step), which httpx's strict encoder rejects
        return self._call("POST", path, content=json.dumps(body), headers={"content-type": "application/json"})

    def presets(self):
        return self._call("GET", "/presets")

    def preset(self, name):
        return self._call("GET", f"/presets/{name}")

    def run(self, target, out_dir, workers):
        body = {"out_dir": out_dir, "workers": workers}
        try:
            with open(target, encoding="utf-8") as fh:
                body["scenario"] = json.load(fh)
        except FileNotFoundError:
            body["preset"] = target
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read scenario {target}: {exc}") from None
        return self._post("/run", body)

    def verify(self, directory):
        return self._post("/verify", {"directory": directory})

    def export(self, directory, fmt):
        return self._post("/export", {"directory": directory, "format": fmt})


def c_roots(scn: dict) -> list[complex]:
    red = scn["reduction"]
    if red.get("c_roots") is not None:
        return [complex(r) for r in sorted(red["c_roots"])]
    roots = np.roots(np.asarray(red["c"], dtype=float)[::-1])
    return sorted((complex(r) for r in roots), key=lambda z: (z.real, z.imag))


def _fmt_root(z: complex) -> str:
    # double roots split by ~sqrt(eps) under numpy.roots
    return f"{z.real:.6g}" if abs(z.imag) < 1e-6 else f"{z.real:.6g}{z.imag:+.6g}i"


def print_summary(summary: dict, out=None):
    out = out or sys.stdout
    print(f"scenario {summary['scenario']}: {summary['status'].upper()} (exit {summary['exit_code']})", file=out)
    if summary.get("error"):
        print(f"  error: {summary['error']}", file=out)
    for name, chk in summary.get("checks", {}).items():
        mark = "ok  " if chk["passed"] else "FAIL"
        print(f"  [{mark}] {name:<15} {chk['value']:.3e} <= {chk['threshold']:.1e}", file=out)
    for w in summary.get("warnings", []):
        print(f"  warning: {w}", file=out)
    if summary.get("out_dir"):
        print(f"  artifacts: {summary['out_dir']}", file=out)


def cmd_run(be, args):
    summary = be.run(args.scenario, args.out, args.workers)
    print_summary(summary)
    return summary["exit_code"]


def cmd_verify(be, args):
    summary = be.verify(args.directory)
    print_summary(summary)
    return summary["exit_code"]


def cmd_presets(be, args):
    if args.action == "list":
        for p in be.presets():
            print(f"{p['name']:<22} {p['description']}")
        return 0
    if args.name is None:
        raise ConfigError("presets show needs a preset name")
    scn = be.preset(args.name)
    if args.json:
        print(json.dumps(scn, indent=2))
        return 0
    roots = c_roots(scn)
    print(f"{scn['name']}: {scn['description']}")
    print(f"  n={scn['bkm']['n']}  N={scn['reduction']['N']}  m={scn['bkm']['m']}  lambda={scn['bkm']['lam']}")
    tag = ", implementer-chosen" if "implementer-chosen" in scn["notes"] else ""
    print(f"  roots of c ({len(roots)}{tag}): {', '.join(_fmt_root(z) for z in roots)}")
    print(f"  note: {scn['notes']}")
    return 0


def cmd_export(be, args):
    res = be.export(args.directory, args.format)
    for f in res["files"][:5]:
        print(f)
    if len(res["files"]) > 5:
        print(f"... {len(res['files'])} files")
    return 0


def cmd_serve(_be, args):
    import uvicorn

    uvicorn.run("bkmflow.api:app", host=args.host, port=args.port, log_level="info")
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="bkmflow", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"bkmflow {__version__}")
    ap.add_argument("--server", metavar="URL", help="forward the command to a bkmflow HTTP service")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run a scenario file or a preset")
    p.add_argument("scenario", help="path to a scenario JSON file, or a preset name")
    p.add_argument("--out", metavar="DIR", help="directory for the solution and reports")
    p.add_argument("--workers", type=int, help="worker processes (default: BKMFLOW_WORKERS or 1)")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("verify", help="re-run the checks on a stored solution")
    p.add_argument("directory")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("presets", help="list or show built-in scenarios")
    p.add_argument("action", choices=["list", "show"])
    p.add_argument("name", nargs="?")
    p.add_argument("--json", action="store_true", help="print the scenario file for the preset")
    p.set_defaults(func=cmd_presets)

    p = sub.add_parser("export", help="write CSV or per-frame CSVs from a stored solution")
    p.add_argument("directory")
    p.add_argument("--format", choices=["csv", "frames"], default="csv")
    p.set_defaults(func=cmd_export)

    p = sub.add_parser("serve", help="start the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.set_defaults(func=cmd_serve)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else 0
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        be = HttpBackend(args.server) if args.server and args.command != "serve" else LocalBackend()
        return int(args.func(be, args))
    except BkmError as exc:
        print(f"error: {exc.describe()}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
