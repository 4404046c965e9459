"""Command-line front end.

Exit codes: 0 when every selected identity holds, 1 when one fails (or a
decomposition cannot be carried out), 2 for usage and configuration errors.
"""

from __future__ import annotations

import argparse
import contextlib
import csv
import io
import json
import os
import sys
from dataclasses import dataclass
from pathlib import Path

from .birkhoff import birkhoff_report
from .coeffs import Q, EpsLaurent, Poly
from .errors import CKRGError, ConfigError, DuplicateTree, ParseError, RuleIncomplete
from .suites import SUITES, Workspace, run_suites
from .toy import load_rule
from .trees import ONE, enumerate_trees

__all__ = ["RunConfig", "build_parser", "main", "cmd_trees", "cmd_decompose",
           "cmd_beta", "cmd_verify", "cmd_report"]

OUTPUTS = ("json", "csv", "pretty")
EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2


@dataclass
class RunConfig:
    command: str
    max_degree: int = 5
    eps_trunc: int = 8
    rule: str = "ladder"
    hierarchy_depth: int = 3
    suites: tuple = SUITES
    output: str | None = None
    out: Path | None = None
    threads: int = 1

    def validate(self):
        if self.max_degree < 0:
            raise ConfigError("--max-degree must be >= 0")
        if self.eps_trunc < self.max_degree:
            raise ConfigError(
                f"--eps-trunc {self.eps_trunc} is below --max-degree {self.max_degree}; "
                "the ladder rule alone needs pole capacity equal to the degree")
        if self.hierarchy_depth < 1:
            raise ConfigError("--hierarchy-depth must be >= 1")
        if self.output is not None and self.output not in OUTPUTS:
            raise ConfigError(f"unknown output format {self.output!r}")
        unknown = [s for s in self.suites if s not in SUITES]
        if unknown:
            raise ConfigError(f"unknown suite(s): {', '.join(unknown)}; "
                              f"choose from {', '.join(SUITES)} or all")
        if self.threads < 1:
            raise ConfigError("CKRG_THREADS must be a positive integer")
        return self

    def to_json(self):
        return {
            "max_degree": self.max_degree,
            "eps_trunc": self.eps_trunc,
            "rule": self.rule,
            "hierarchy_depth": self.hierarchy_depth,
            "suites": list(self.suites),
        }

    def workspace(self):
        try:
            rule = load_rule(self.rule)
        except OSError as exc:
            raise ConfigError(f"cannot read rule file {self.rule!r}: {exc.strerror}") from None
        return Workspace(rule, self.max_degree, self.eps_trunc, self.hierarchy_depth)


def _parse_suites(text):
    names = [s.strip() for s in text.split(",") if s.strip()]
    if "all" in names:
        return SUITES
    return tuple(dict.fromkeys(names))


def _threads_from_env(environ):
    raw = environ.get("CKRG_THREADS")
    if raw is None or raw == "":
        return 1
    try:
        return int(raw)
    except ValueError:
        raise ConfigError(f"CKRG_THREADS={raw!r} is not an integer") from None


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--max-degree", type=int, default=5, metavar="N")
    common.add_argument("--eps-trunc", type=int, default=8, metavar="M",
                        help="eps order kept when exponentials are expanded")
    common.add_argument("--rule", default="ladder",
                        help="builtin rule (ladder, mellin) or path to a rule file")
    common.add_argument("--hierarchy-depth", type=int, default=3, metavar="K")
    common.add_argument("--suite", default="all", metavar="NAME[,NAME...]",
                        help="subset of " + ", ".join(SUITES) + ", or all")
    common.add_argument("--output", default=None, metavar="{json,csv,pretty}")
    common.add_argument("--out", default=None, metavar="DIR",
                        help="write output files into DIR instead of stdout")

    parser = argparse.ArgumentParser(
        prog="ckrg",
        description="Exact renormalization identities on the rooted-tree Hopf algebra.")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("trees", parents=[common], help="list trees and per-degree counts")
    sub.add_parser("decompose", parents=[common], help="Birkhoff decomposition per tree")
    sub.add_parser("beta", parents=[common], help="the beta element per tree")
    sub.add_parser("verify", parents=[common], help="run verification suites")
    sub.add_parser("report", parents=[common], help="write beta, M and scattering CSV tables")
    return parser


def config_from_args(args, environ=None):
    environ = os.environ if environ is None else environ
    return RunConfig(
        command=args.command,
        max_degree=args.max_degree,
        eps_trunc=args.eps_trunc,
        rule=args.rule,
        hierarchy_depth=args.hierarchy_depth,
        suites=_parse_suites(args.suite),
        output=args.output,
        out=Path(args.out) if args.out else None,
        threads=_threads_from_env(environ),
    ).validate()


# rendering ------------------------------------------------------------------

def _json_text(obj):
    return json.dumps(obj, indent=2, ensure_ascii=False) + "\n"


def _csv_text(header, rows):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def _emit(cfg, text, filename, stdout):
    if cfg.out is None:
        stdout.write(text)
        return
    cfg.out.mkdir(parents=True, exist_ok=True)
    (cfg.out / filename).write_text(text, encoding="utf-8")


def _ext(fmt):
    return {"json": "json", "csv": "csv", "pretty": "txt"}[fmt]


def _flag(b):
    return "true" if b else "false"


# commands -------------------------------------------------------------------

def cmd_trees(cfg, stdout=sys.stdout):
    fmt = cfg.output or "pretty"
    listing = [(n, t.encoding) for n in range(1, cfg.max_degree + 1) for t in enumerate_trees(n)]
    counts = {n: len(enumerate_trees(n)) for n in range(1, cfg.max_degree + 1)}
    if fmt == "json":
        text = _json_text({
            "max_degree": cfg.max_degree,
            "trees": [{"degree": n, "encoding": e} for n, e in listing],
            "counts": {str(n): c for n, c in counts.items()},
        })
    elif fmt == "csv":
        text = _csv_text(["degree", "encoding"], listing)
    else:
        lines = [e for _, e in listing] + [f"{n}: {c}" for n, c in counts.items()]
        text = "".join(line + "\n" for line in lines)
    _emit(cfg, text, "trees." + _ext(fmt), stdout)
    return EXIT_OK


def _unit_entry():
    one = EpsLaurent.one().to_json()
    return {"tree": ONE.encoding, "phi": one, "phi_minus": one,
            "phi_plus": {"closed": one, "expanded": one},
            "checks": {"reconstruct": True, "pure_pole": True, "local": True}}


def cmd_decompose(cfg, stdout=sys.stdout):
    fmt = cfg.output or "json"
    ws = cfg.workspace()
    pair = ws.pair
    entries = [_unit_entry()] + birkhoff_report(pair)
    if fmt == "json":
        text = _json_text({"config": cfg.to_json(), "entries": entries})
    else:
        rows = [[ONE.encoding, 0, "1", "1", "1", "1", "true", "true", "true"]]
        for t in pair.algebra.trees():
            checks = next(e["checks"] for e in entries if e["tree"] == t.encoding)
            rows.append([t.encoding, t.degree, str(pair.source(t)), str(pair.phi_minus(t)),
                         str(pair.phi_plus(t)), str(pair.phi_plus_expanded(t)),
                         _flag(checks["reconstruct"]), _flag(checks["pure_pole"]),
                         _flag(checks["local"])])
        header = ["tree", "degree", "phi", "phi_minus", "phi_plus", "phi_plus_expanded",
                  "reconstruct", "pure_pole", "local"]
        if fmt == "csv":
            text = _csv_text(header, rows)
        else:
            text = "".join(f"{r[0]}\n  phi   = {r[2]}\n  phi-  = {r[3]}\n  phi+  = {r[4]}\n"
                           f"  phi+ (expanded) = {r[5]}\n" for r in rows)
    _emit(cfg, text, "decompose." + _ext(fmt), stdout)
    return EXIT_OK


def cmd_beta(cfg, stdout=sys.stdout):
    fmt = cfg.output or "json"
    ws = cfg.workspace()
    beta = ws.beta
    trees = ws.algebra.trees()
    if fmt == "json":
        text = _json_text({
            "config": cfg.to_json(),
            "infinitesimal": beta.is_infinitesimal,
            "local": beta.local,
            "values": [{"tree": t.encoding, "degree": t.degree, "beta": beta(t).to_json(),
                        "pole_free": beta.pole_free[t.encoding],
                        "eps_free": beta.eps_free[t.encoding]} for t in trees],
        })
    elif fmt == "csv":
        text = _csv_text(["tree", "degree", "beta", "pole_free", "eps_free"],
                         [[t.encoding, t.degree, str(beta(t)), _flag(beta.pole_free[t.encoding]),
                           _flag(beta.eps_free[t.encoding])] for t in trees])
    else:
        text = "".join(f"beta({t.encoding}) = {beta(t)}\n" for t in trees)
    _emit(cfg, text, "beta." + _ext(fmt), stdout)
    return EXIT_OK


def cmd_verify(cfg, stdout=sys.stdout):
    fmt = cfg.output or "json"
    ws = cfg.workspace()
    results = run_suites(ws, cfg.suites, cfg.threads)
    passed = all(r.passed for r in results)
    if fmt == "json":
        text = _json_text({"config": cfg.to_json(), "pass": passed,
                           "suites": [r.to_json() for r in results]})
    elif fmt == "csv":
        rows = []
        for res in results:
            if res.error:
                rows.append([res.name, "", "false", 0, res.error])
            for rep in res.reports:
                rows.append([res.name, rep.identity, _flag(rep.passed), len(rep.residuals),
                             " ".join(w.key for w in rep.witnesses)])
        text = _csv_text(["suite", "identity", "pass", "checked", "witnesses"], rows)
    else:
        lines = []
        for res in results:
            lines.append(f"[{'PASS' if res.passed else 'FAIL'}] suite {res.name}")
            if res.error:
                lines.append(f"  error: {res.error}")
            for rep in res.reports:
                lines.append("  " + rep.summary())
                lines.extend(f"      note: {n}" for n in rep.notes)
        lines.append("all suites passed" if passed else "some identities FAILED")
        text = "".join(line + "\n" for line in lines)
    _emit(cfg, text, "verify." + _ext(fmt), stdout)
    return EXIT_OK if passed else EXIT_FAIL


def _q_rows(profile, trees):
    rows = []
    for t in trees:
        v = profile(t)
        for k in sorted(v.q_support()):
            part = v.map_coeffs(lambda p, k=k: p.split_by(Q).get(k, Poly()))
            rows.append([t.encoding, t.degree, k, str(part)])
    return rows


def cmd_report(cfg, stdout=sys.stdout):
    """Write beta.csv (suite rg), M.csv (suite ode) and scattering.csv (suite scattering)."""
    out = cfg.out or Path(".")
    written = []
    if cfg.suites:
        ws = cfg.workspace()
        trees = ws.algebra.trees()
        tables = []
        if "rg" in cfg.suites:
            tables.append(("beta.csv", ["tree", "degree", "beta"],
                           [[t.encoding, t.degree, str(ws.beta(t))] for t in trees]))
        if "ode" in cfg.suites:
            tables.append(("M.csv", ["tree", "degree", "M"],
                           [[t.encoding, t.degree, str(ws.M(t))] for t in trees]))
        if "scattering" in cfg.suites:
            profile = ws.scattering_result[1]
            tables.append(("scattering.csv", ["tree", "degree", "q_power", "coefficient"],
                           _q_rows(profile, trees)))
        if tables:
            out.mkdir(parents=True, exist_ok=True)
        for name, header, rows in tables:
            (out / name).write_text(_csv_text(header, rows), encoding="utf-8")
            written.append(str(out / name))
    stdout.write(_json_text({"written": written}))
    return EXIT_OK


COMMANDS = {
    "trees": cmd_trees,
    "decompose": cmd_decompose,
    "beta": cmd_beta,
    "verify": cmd_verify,
    "report": cmd_report,
}


_CONFIG_ERRORS = (ConfigError, ParseError, DuplicateTree, RuleIncomplete)


def main(argv=None, stdout=None, stderr=None, environ=None):
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        with contextlib.redirect_stderr(stderr):
            args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_CONFIG
    try:
        cfg = config_from_args(args, environ)
        return COMMANDS[cfg.command](cfg, stdout=stdout)
    except _CONFIG_ERRORS as exc:
        print(f"ckrg: {type(exc).__name__}: {exc}", file=stderr)
        return EXIT_CONFIG
    except CKRGError as exc:
        # e.g. TruncationExhausted: the computation itself could not be completed
        print(f"ckrg: {type(exc).__name__}: {exc}", file=stderr)
        return EXIT_FAIL
    except OSError as exc:
        print(f"ckrg: {exc}", file=stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
