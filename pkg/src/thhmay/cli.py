"""Command-line entry point: run scenarios and write charts and reports."""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path

from . import __version__
from .chart import ChartModel, chart_from_dims, chart_from_page, render_ascii, render_svg
from .fp import is_prime
from .scenarios import ScenarioResult, run

CHOICES = ("bokstedt", "hfp-may", "primitives", "v1-may", "thh-j-ell", "les", "all")
EMITS = ("ascii", "svg", "json", "csv")
EXT = {"ascii": "txt", "svg": "svg", "json": "json", "csv": "csv"}
DEFAULTS = {"prime": 3, "max-degree": 40, "scenario": "all", "emit": [], "out": "."}


class UsageError(Exception):
    pass


def chart_for(result: ScenarioResult) -> ChartModel:
    if result.chart_page:
        return chart_from_page(result.pages[result.chart_page])
    return chart_from_dims([v.got for v in result.verdicts])


def report(result: ScenarioResult) -> dict:
    chart = chart_for(result)
    page = result.pages.get(result.chart_page) if result.chart_page else None
    return {
        "scenario": result.scenario,
        "prime": result.p,
        "cutoff": result.N,
        "version": __version__,
        "convention": page.convention.name if page else "degree",
        "page": page.r if page else None,
        "status": result.status,
        "columns": [{"s": d.s, "t": d.t, "dim": d.multiplicity} for d in chart.dots],
        "strokes": [{"from": list(s.source), "to": list(s.target), "r": s.r}
                    for s in chart.strokes],
        "verdicts": [{"degree": v.degree, "expected": v.expected, "got": v.got, "ok": v.ok}
                     for v in result.verdicts],
        "unresolved": list(result.unresolved),
        "checks": dict(sorted(result.checks.items())),
        "renaming": dict(sorted(result.renaming.items())),
        "obstructions": [{"from": list(o.source), "to": list(o.target), "r": o.r,
                          "generator": o.generator} for o in result.obstructions],
        "excluded": [{"from": list(o.source), "to": list(o.target), "r": o.r,
                      "generator": o.generator, "reason": why} for o, why in result.excluded],
        "notes": list(result.notes),
    }


def dump_json(doc) -> str:
    return json.dumps(doc, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def dump_csv(result: ScenarioResult) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["degree", "expected", "got", "ok"])
    for v in result.verdicts:
        w.writerow([v.degree, v.expected, v.got, "true" if v.ok else "false"])
    return buf.getvalue()


def read_config(path: str) -> dict:
    out = {}
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise UsageError(f"cannot read config {path}: {e}") from e
    for n, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{n}: expected key=value")
        k, v = (x.strip() for x in line.split("=", 1))
        k = k.replace("_", "-")
        if k not in DEFAULTS:
            raise UsageError(f"{path}:{n}: unknown key {k}")
        out[k] = v
    return out


def _emits(values) -> list[str]:
    out = []
    for v in values:
        for part in str(v).split(","):
            part = part.strip()
            if not part:
                continue
            if part not in EMITS:
                raise UsageError(f"unknown --emit value {part!r}")
            if part not in out:
                out.append(part)
    return out


def resolve(args) -> dict:
    cfg = dict(DEFAULTS)
    if args.config:
        file_cfg = read_config(args.config)
        if "emit" in file_cfg:
            file_cfg["emit"] = [file_cfg["emit"]]
        cfg.update(file_cfg)
    for key, val in (("prime", args.prime), ("max-degree", args.max_degree),
                     ("scenario", args.scenario), ("out", args.out)):
        if val is not None:
            cfg[key] = val
    if args.emit:
        cfg["emit"] = args.emit
    try:
        cfg["prime"] = int(cfg["prime"])
        cfg["max-degree"] = int(cfg["max-degree"])
    except ValueError as e:
        raise UsageError(str(e)) from e
    if not is_prime(cfg["prime"]) or cfg["prime"] < 3:
        raise UsageError(f"an odd prime required, got {cfg['prime']}")
    if cfg["max-degree"] < 1:
        raise UsageError("--max-degree must be positive")
    if cfg["scenario"] not in CHOICES:
        raise UsageError(f"unknown scenario {cfg['scenario']!r}")
    cfg["emit"] = _emits(cfg["emit"])
    return cfg


def parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="thhmay", description=__doc__)
    ap.add_argument("--prime", type=int, help="odd prime (default 3)")
    ap.add_argument("--max-degree", type=int, help="degree cutoff N (default 40)")
    ap.add_argument("--scenario", choices=CHOICES, help="which computation (default all)")
    ap.add_argument("--emit", action="append", default=[],
                    help="ascii, svg, json or csv; repeatable or comma separated")
    ap.add_argument("--out", help="output directory (default .)")
    ap.add_argument("--config", help="file of key=value lines overriding the defaults")
    return ap


def write_outputs(results: dict[str, ScenarioResult], cfg: dict) -> list[Path]:
    out_dir = Path(cfg["out"])
    out_dir.mkdir(parents=True, exist_ok=True)
    p, N = cfg["prime"], cfg["max-degree"]
    written = []
    for name, res in results.items():
        stem = f"{name}-p{p}-N{N}"
        for kind in cfg["emit"]:
            if kind == "json":
                text = dump_json(report(res))
            elif kind == "csv":
                text = dump_csv(res)
            elif kind == "svg":
                text = render_svg(chart_for(res))
            else:
                text = render_ascii(chart_for(res))
            path = out_dir / f"{stem}.{EXT[kind]}"
            path.write_text(text, encoding="utf-8")
            written.append(path)
    return written


def main(argv=None) -> int:
    ap = parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    try:
        cfg = resolve(args)
    except UsageError as e:
        print(f"thhmay: error: {e}", file=sys.stderr)
        return 2
    results = run(cfg["scenario"], cfg["prime"], cfg["max-degree"])
    write_outputs(results, cfg)
    ok = True
    for name, res in results.items():
        print(f"{name} p={res.p} N={res.N}: {res.status}")
        for line in res.failures():
            print(f"  {line}", file=sys.stderr)
        ok = ok and res.ok
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
