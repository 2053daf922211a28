"""Command-line front end: orbits, scans, components, return tables, verification."""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Callable, Sequence

from .billiard import TABLE_NAMES, OutsideError, make_table, orbit, orbit_dump
from .exactfield import QuadExt, approx, parse
from .geometry import ConvexPolygon, Point, Region

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_BAD_INPUT = 2
EXIT_USAGE = 64

COMMANDS = ("orbit", "scan", "component", "return-table", "tables", "verify", "witness")
VERIFY_CHECKS = ("invariants", "figures", "golden", "octagon", "conjugacy", "hypothesis1", "growth")
SIDES_ROW = "Количество сторон многоугольника"
TIMES_ROW = "Количество итераций до первого возвращения"
SVG_DIGITS = 12

USAGE = """usage: outer-billiards COMMAND [key=value ...] [--config FILE]

commands:
  orbit         orbit dump (JSON lines) and SVG of one start point
  scan          classify cell centres of a window; PGM or SVG raster
  component     periodic component of a point (JSON and SVG)
  return-table  first-return table of one dodecagon subdomain (CSV and JSON)
  tables        every octagon and dodecagon table as CSV, checked against printed values
  verify        run the verification suites, JSON report
  witness       nested chain of periodic components (octagon or dodecagon)

keys: table point window resolution budget output workers seed target
      depth format golden checks samples
exit codes: 0 ok, 1 verification failure, 2 bad input, 64 usage
"""


class UsageError(Exception):
    pass


class BadInput(Exception):
    pass


# -- configuration ---------------------------------------------------------------------


def _parse_point(text: str) -> Point:
    parts = text.split(",")
    if len(parts) != 2:
        raise BadInput(f"point needs two coordinates, got {text!r}")
    return Point(_num(parts[0]), _num(parts[1]))


def _num(text: str) -> QuadExt:
    try:
        return parse(text)
    except ValueError as exc:
        raise BadInput(str(exc)) from None


def _parse_window(text: str) -> tuple[QuadExt, ...]:
    parts = text.split(",")
    if len(parts) != 4:
        raise BadInput(f"window needs x0,y0,x1,y1, got {text!r}")
    vals = tuple(_num(p) for p in parts)
    if any(v.b != 0 for v in vals):
        raise BadInput("window corners must be rational")
    if not (vals[0] < vals[2] and vals[1] < vals[3]):
        raise BadInput("window must have positive width and height")
    return vals


def _parse_resolution(text: str) -> tuple[int, int]:
    try:
        w, h = (int(v) for v in text.lower().split("x"))
    except ValueError:
        raise BadInput(f"resolution must look like 200x200, got {text!r}") from None
    if w < 1 or h < 1:
        raise BadInput("resolution must be positive")
    return w, h


def _positive(name: str) -> Callable[[str], int]:
    def conv(text: str) -> int:
        try:
            v = int(text)
        except ValueError:
            raise BadInput(f"{name} must be an integer, got {text!r}") from None
        if v < 1:
            raise BadInput(f"{name} must be positive")
        return v

    return conv


def _integer(text: str) -> int:
    try:
        return int(text)
    except ValueError:
        raise BadInput(f"expected an integer, got {text!r}") from None


def _fmt_point(p: Point | None) -> str:
    return f"{p.x},{p.y}"


@dataclass
class RunConfig:
    command: str | None = None
    table: str = "square"
    point: Point | None = None
    window: tuple[QuadExt, ...] = (QuadExt(-3), QuadExt(-3), QuadExt(4), QuadExt(4))
    resolution: tuple[int, int] = (100, 100)
    budget: int = 100_000
    output: str = "out"
    workers: int = 1
    seed: int = 0
    target: str = "A_мал"
    depth: int = 3
    format: str = "pgm"
    golden: str | None = None
    checks: tuple[str, ...] = VERIFY_CHECKS
    samples: int = 100
    explicit: set = field(default_factory=set, repr=False, compare=False)

    _PARSERS = {
        "command": str,
        "table": str,
        "point": _parse_point,
        "window": _parse_window,
        "resolution": _parse_resolution,
        "budget": _positive("budget"),
        "output": str,
        "workers": _positive("workers"),
        "seed": _integer,
        "target": str,
        "depth": _positive("depth"),
        "format": str,
        "golden": str,
        "checks": lambda s: tuple(c for c in s.split(",") if c),
        "samples": _positive("samples"),
    }
    _FORMATTERS = {
        "point": _fmt_point,
        "window": lambda w: ",".join(str(v) for v in w),
        "resolution": lambda r: f"{r[0]}x{r[1]}",
        "checks": ",".join,
    }

    def set(self, key: str, value: str) -> None:
        if key not in self._PARSERS:
            raise UsageError(f"unknown key {key!r}")
        setattr(self, key, self._PARSERS[key](value.strip()))
        self.explicit.add(key)

    def validate(self) -> None:
        if self.table not in TABLE_NAMES:
            raise BadInput(f"unknown table {self.table!r}; expected one of {', '.join(TABLE_NAMES)}")
        if self.format not in ("pgm", "svg"):
            raise BadInput("format must be pgm or svg")
        bad = [c for c in self.checks if c not in VERIFY_CHECKS]
        if bad:
            raise BadInput(f"unknown checks {bad}; expected some of {', '.join(VERIFY_CHECKS)}")

    def to_text(self) -> str:
        lines = []
        for f in fields(self):
            if f.name == "explicit":
                continue
            v = getattr(self, f.name)
            if v is None:
                continue
            fmt = self._FORMATTERS.get(f.name, str)
            lines.append(f"{f.name} = {fmt(v)}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "RunConfig":
        cfg = cls()
        for n, raw in enumerate(text.splitlines(), 1):
            line = raw.split("#", 1)[0].strip()
            if not line or line.startswith("["):
                continue
            if "=" not in line:
                raise UsageError(f"line {n}: expected key = value")
            key, value = line.split("=", 1)
            value = value.strip()
            if len(value) >= 2 and value[0] == value[-1] and value[0] in "\"'":
                value = value[1:-1]
            cfg.set(key.strip(), value)
        return cfg


# -- output helpers -------------------------------------------------------------------------


def _out_dir(cfg: RunConfig) -> Path:
    d = Path(cfg.output)
    d.mkdir(parents=True, exist_ok=True)
    return d


def _write(path: Path, data: str | bytes) -> None:
    if isinstance(data, str):
        data = data.encode("utf-8")
    path.write_bytes(data)


def _dumps(obj) -> str:
    return json.dumps(obj, ensure_ascii=False, indent=1, sort_keys=True) + "\n"


class SvgCanvas:
    """Minimal SVG writer.  y grows upward in model space; the view box flips it."""

    def __init__(self, lo: Point, hi: Point, width: int = 600):
        self.lo, self.hi = lo, hi
        self.width = width
        self.items: list[str] = []
        self.exact: list[str] = []

    def _c(self, v) -> str:
        return approx(v, SVG_DIGITS)

    def _xy(self, p: Point) -> str:
        return f"{self._c(p.x)},{self._c(-p.y)}"

    def polygon(self, pts: Sequence[Point], fill: str, stroke: str = "black", label: str | None = None) -> None:
        d = " ".join(self._xy(p) for p in pts)
        self.items.append(f'<polygon points="{d}" fill="{fill}" stroke="{stroke}" stroke-width="0.005"/>')
        if label is not None:
            self.exact.append(f"{label}: " + " ".join(f"({p.x}, {p.y})" for p in pts))

    def polyline(self, pts: Sequence[Point], stroke: str, label: str | None = None) -> None:
        d = " ".join(self._xy(p) for p in pts)
        self.items.append(f'<polyline points="{d}" fill="none" stroke="{stroke}" stroke-width="0.01"/>')
        if label is not None:
            self.exact.append(f"{label}: " + " ".join(f"({p.x}, {p.y})" for p in pts))

    def rect(self, x0, y0, dx, dy, fill: str) -> None:
        self.items.append(
            f'<rect x="{self._c(x0)}" y="{self._c(-(y0 + dy))}" width="{self._c(dx)}" height="{self._c(dy)}" fill="{fill}"/>'
        )

    def render(self) -> str:
        lo, hi = self.lo, self.hi
        w, h = hi.x - lo.x, hi.y - lo.y
        vb = f"{self._c(lo.x)} {self._c(-hi.y)} {self._c(w)} {self._c(h)}"
        height = max(1, round(self.width * float(h) / float(w)))
        out = [
            '<?xml version="1.0" encoding="UTF-8"?>',
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{self.width}" height="{height}" viewBox="{vb}">',
        ]
        if self.exact:
            body = "\n".join(self.exact).replace("--", "- -")
            out.append(f"<!-- exact values\n{body}\n-->")
        out.extend(self.items)
        out.append("</svg>")
        return "\n".join(out) + "\n"


def _bounds(points: Sequence[Point], pad: int = 1) -> tuple[Point, Point]:
    xs = [p.x for p in points]
    ys = [p.y for p in points]
    return Point(min(xs) - pad, min(ys) - pad), Point(max(xs) + pad, max(ys) + pad)


def partition_csv(rows: Sequence[tuple[int, int]]) -> str:
    """Two-row layout: side counts, then first-return times."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow([SIDES_ROW, *(s for s, _ in rows)])
    w.writerow([TIMES_ROW, *(t for _, t in rows)])
    return buf.getvalue()


# -- commands ----------------------------------------------------------------------------------


def cmd_orbit(cfg: RunConfig) -> int:
    if cfg.point is None:
        raise BadInput("orbit needs point=x,y")
    t = make_table(cfg.table)
    try:
        res = orbit(t, cfg.point, cfg.budget, keep_points=True)
    except OutsideError as exc:
        raise BadInput(str(exc)) from None
    d = _out_dir(cfg)
    _write(d / "orbit.jsonl", orbit_dump(res, cfg.point))
    pts = res.points or [cfg.point]
    lo, hi = _bounds(list(pts) + list(t.vertices))
    svg = SvgCanvas(lo, hi)
    svg.polygon(t.vertices, "#bbbbbb", label="table")
    svg.polyline(list(pts), "#c0392b", label=f"orbit {res.label()}")
    _write(d / "orbit.svg", svg.render())
    print(res.label())
    return EXIT_OK


_PALETTE = ("#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf")


def _label_colour(lab: tuple) -> str:
    if lab[0] == "table":
        return "#000000"
    if lab[0] == "finite":
        return "#ffffff"
    if lab[0] == "budget":
        return "#808080"
    return _PALETTE[lab[1] % len(_PALETTE)]


def _scan_svg(grid) -> str:
    x0, y0, x1, y1 = grid.window
    w, h = grid.resolution
    dx, dy = (x1 - x0) / w, (y1 - y0) / h
    svg = SvgCanvas(Point(x0, y0), Point(x1, y1))
    svg.exact.append(f"window: ({x0}, {y0}) - ({x1}, {y1}); resolution {w}x{h}; budget {grid.budget}")
    for j, row in enumerate(grid.labels):
        i = 0
        while i < w:
            k = i
            while k + 1 < w and row[k + 1] == row[i]:
                k += 1
            svg.rect(x0 + i * dx, y1 - (j + 1) * dy, dx * (k - i + 1), dy, _label_colour(row[i]))
            i = k + 1
    return svg.render()


def cmd_scan(cfg: RunConfig) -> int:
    from .structure import scan_classify

    t = make_table(cfg.table)
    win = tuple(v.a for v in cfg.window)
    grid = scan_classify(t, win, cfg.resolution, cfg.budget, cfg.workers)
    d = _out_dir(cfg)
    if cfg.format == "svg":
        _write(d / "scan.svg", _scan_svg(grid))
    else:
        _write(d / "scan.pgm", grid.to_pgm())
    counts = grid.counts()
    _write(d / "scan_counts.json", _dumps(counts))
    print(" ".join(f"{k}={counts[k]}" for k in sorted(counts)))
    return EXIT_OK


def cmd_component(cfg: RunConfig) -> int:
    from .structure import NotPeriodicError, component_of

    if cfg.point is None:
        raise BadInput("component needs point=x,y")
    t = make_table(cfg.table)
    try:
        comp = component_of(t, cfg.point, cfg.budget)
    except (OutsideError, NotPeriodicError) as exc:
        raise BadInput(str(exc)) from None
    d = _out_dir(cfg)
    rec = {
        "table": t.name,
        "seed": cfg.point.to_json(),
        "polygon": comp.region.to_json(),
        "period": comp.period,
        "itinerary": list(comp.itinerary),
        "center_special": comp.center_special,
    }
    _write(d / "component.json", _dumps(rec))
    lo, hi = _bounds(list(comp.region.vertices) + list(t.vertices))
    svg = SvgCanvas(lo, hi)
    svg.polygon(t.vertices, "#bbbbbb", label="table")
    svg.polygon(comp.region.vertices, "#2ca02c", label=f"component period {comp.period}")
    _write(d / "component.svg", svg.render())
    print(f"period={comp.period} sides={len(comp.region)}")
    return EXIT_OK


def _load_golden(cfg: RunConfig) -> dict[str, tuple[tuple[int, ...], tuple[int, ...]]]:
    from .renorm_dodecagon import GOLDEN_TABLES, TARGET_ALIASES

    if cfg.golden is None:
        return dict(GOLDEN_TABLES)
    try:
        raw = json.loads(Path(cfg.golden).read_text(encoding="utf-8"))
        return {TARGET_ALIASES.get(k, k): (tuple(v[0]), tuple(v[1])) for k, v in raw.items()}
    except (OSError, ValueError, TypeError, IndexError) as exc:
        raise BadInput(f"cannot read golden file: {exc}") from None


def _table_job(which: str) -> tuple[str, list[tuple[int, int]] | None, str | None]:
    from .renorm_dodecagon import RocketSystemError, rocket_return_table

    try:
        return which, rocket_return_table(_rocket_system(), which), None
    except RocketSystemError as exc:
        return which, None, str(exc)


_SYSTEM_CACHE: dict = {}


def _rocket_system():
    from .renorm_dodecagon import build_rocket_system

    if "rocket" not in _SYSTEM_CACHE:
        _SYSTEM_CACHE["rocket"] = build_rocket_system()
    return _SYSTEM_CACHE["rocket"]


def _compute_tables(names: Sequence[str], workers: int) -> list[tuple[str, list | None, str | None]]:
    if workers <= 1 or len(names) <= 1:
        return [_table_job(n) for n in names]
    from concurrent.futures import ProcessPoolExecutor

    with ProcessPoolExecutor(max_workers=min(workers, len(names))) as ex:
        return list(ex.map(_table_job, names))


def _ascii_name(which: str) -> str:
    from .renorm_dodecagon import TARGET_ALIASES

    inv = {v: k for k, v in TARGET_ALIASES.items()}
    return inv.get(which, which)


def _compare(which, rows, golden) -> dict:
    exp = golden.get(which)
    got = (tuple(s for s, _ in rows), tuple(t for _, t in rows)) if rows is not None else None
    return {
        "table": which,
        "sides": list(got[0]) if got else None,
        "times": list(got[1]) if got else None,
        "golden": exp is not None,
        "matched": exp is None or got == exp,
    }


def cmd_return_table(cfg: RunConfig) -> int:
    from .renorm_dodecagon import TARGET_ALIASES

    which = TARGET_ALIASES.get(cfg.target, cfg.target)
    sys_ = _rocket_system()
    if which not in sys_.sub_rockets:
        raise BadInput(f"unknown target {cfg.target!r}; expected one of {', '.join(sorted(sys_.sub_rockets))}")
    golden = _load_golden(cfg)
    _, rows, err = _table_job(which)
    if rows is None:
        print(f"{which}: {err}", file=sys.stderr)
        return EXIT_FAILED
    d = _out_dir(cfg)
    name = _ascii_name(which)
    _write(d / f"return_{name}.csv", partition_csv(rows))
    rep = _compare(which, rows, golden)
    _write(d / f"return_{name}.json", _dumps(rep))
    print(f"{which}: {'ok' if rep['matched'] else 'MISMATCH'}")
    return EXIT_OK if rep["matched"] else EXIT_FAILED


def _octagon_rank0_table() -> tuple[str, str, bool]:
    """Rank-0 period CSV, the closed-form CSV (derived, flagged) and whether the printed rank-0 rows match."""
    from .renorm_octagon import (
        PRINTED_RANK0_PERIODS,
        CountVector,
        build_sector_system,
        closed_form,
        discrepancy_report,
        rank0_orbits,
        simulated_period,
    )

    ss = build_sector_system()
    orbits = {o.name: o for o in rank0_orbits(ss)}
    rep = discrepancy_report(ss)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["orbit", "word", "count_u", "count_v", "count_w", "coef_9^n", "coef_(-3)^n",
                "period_n0", "period_n1", "simulated_n0", "simulated_n1", "status"])
    ok = True
    for name in PRINTED_RANK0_PERIODS:
        o = orbits[name]
        coef = o.period_coefficients()
        sim = [simulated_period(ss, o.seed, n) for n in (0, 1)]
        per = [o.period(n) for n in (0, 1)]
        row_ok = (
            rep[f"rank0_word_{name}"] and rep[f"rank0_counts_{name}"] and rep[f"rank0_period_{name}"] and sim == per
        )
        ok = ok and row_ok
        w.writerow([name, "".join(o.word), *o.counts.as_tuple(), coef.get(9, 0), coef.get(-3, 0),
                    *per, *sim, "golden" if row_ok else "MISMATCH"])
    buf2 = io.StringIO()
    w2 = csv.writer(buf2, lineterminator="\n")
    w2.writerow(["start", "k", "a_k", "b_k", "c_k", "total", "status"])
    for letter, cv0 in (("u", (1, 0, 0)), ("v", (0, 1, 0)), ("w", (0, 0, 1))):
        for k in range(5):
            cv = closed_form(CountVector(*cv0), k)
            w2.writerow([letter, k, *cv.as_tuple(), cv.total, "derived"])
    return buf.getvalue(), buf2.getvalue(), ok


def cmd_tables(cfg: RunConfig) -> int:
    from .renorm_dodecagon import GOLDEN_TABLES

    golden = _load_golden(cfg)
    names = list(GOLDEN_TABLES)
    for extra in golden:
        if extra not in names:
            names.append(extra)
    results = _compute_tables(names, cfg.workers)
    d = _out_dir(cfg)
    summary = []
    failed = False
    for which, rows, err in results:
        name = _ascii_name(which)
        if rows is None:
            summary.append({"table": which, "error": err, "matched": False})
            failed = True
            continue
        _write(d / f"dodecagon_{name}.csv", partition_csv(rows))
        rep = _compare(which, rows, golden)
        summary.append(rep)
        failed = failed or not rep["matched"]
    rank0, closed, ok1 = _octagon_rank0_table()
    _write(d / "octagon_rank0_periods.csv", rank0)
    _write(d / "octagon_closed_form.csv", closed)
    summary.append({"table": "octagon_rank0_periods", "matched": ok1})
    failed = failed or not ok1
    _write(d / "tables.json", _dumps(summary))
    for rec in summary:
        print(f"{rec['table']}: {'ok' if rec['matched'] else 'MISMATCH'}")
    return EXIT_FAILED if failed else EXIT_OK


def _verify_invariants(cfg: RunConfig) -> dict:
    from .structure import check_invariants

    out = {}
    for name in TABLE_NAMES:
        fails = check_invariants(make_table(name), samples=20, seed=cfg.seed)
        out[name] = {k: not v for k, v in fails.items()}
    passed = all(all(v.values()) for v in out.values())
    return {"passed": passed, "details": out}


def _verify_figures(cfg: RunConfig) -> dict:
    from .renorm_dodecagon import check_figure_shapes, zone_invariant_figures

    sys_ = _rocket_system()
    shapes = check_figure_shapes(zone_invariant_figures(sys_))
    angles = [z.motion.angle for z in sys_.zones]
    return {"passed": all(shapes.values()), "details": {"shapes": shapes, "zone_angles": angles}}


def _verify_golden(cfg: RunConfig) -> dict:
    golden = _load_golden(cfg)
    names = list(golden)
    results = _compute_tables(names, cfg.workers)
    details = {which: _compare(which, rows, golden)["matched"] if rows is not None else False for which, rows, _ in results}
    return {"passed": all(details.values()), "details": details}


def _verify_octagon(cfg: RunConfig) -> dict:
    from .renorm_octagon import build_sector_system, conjugacy_check, discrepancy_report, eigen_decomposition, substituted_cycle_check

    ss = build_sector_system()
    conj = conjugacy_check(ss, samples=cfg.samples, seed=cfg.seed)
    eig = sorted(int(lam) for lam, _ in eigen_decomposition(ss.matrix))
    rep = discrepancy_report(ss)
    cycles = substituted_cycle_check(ss)
    passed = all(v == cfg.samples for v in conj.values()) and all(ok for _, ok in cycles) and eig == [-3, 1, 9] and all(v for k, v in rep.items() if k.startswith("rank0_"))
    return {
        "passed": passed,
        "details": {"conjugacy": conj, "eigenvalues": eig, "printed_artifacts": rep, "substituted_cycles": cycles},
    }


def _report(rep) -> dict:
    return {"passed": rep.matched, "details": rep.to_json()}


def _verify_conjugacy(cfg: RunConfig) -> dict:
    from .renorm_dodecagon import verify_scaling_conjugacy

    return _report(verify_scaling_conjugacy(_rocket_system(), samples=cfg.samples, seed=cfg.seed))


def _verify_hypothesis1(cfg: RunConfig) -> dict:
    from .renorm_dodecagon import verify_hypothesis1

    return _report(verify_hypothesis1(_rocket_system(), samples=cfg.samples, seed=cfg.seed))


def _verify_growth(cfg: RunConfig) -> dict:
    from .renorm_dodecagon import GrowthViolation, RocketSystemError, period_growth_witness

    try:
        w = period_growth_witness(_rocket_system())
    except (GrowthViolation, RocketSystemError) as exc:
        return {"passed": False, "details": str(exc)}
    return {"passed": True, "details": w.to_json()}


_VERIFIERS = {
    "invariants": _verify_invariants,
    "figures": _verify_figures,
    "golden": _verify_golden,
    "octagon": _verify_octagon,
    "conjugacy": _verify_conjugacy,
    "hypothesis1": _verify_hypothesis1,
    "growth": _verify_growth,
}


def cmd_verify(cfg: RunConfig) -> int:
    checks = cfg.checks
    if cfg.golden is not None and "checks" not in cfg.explicit:
        checks = ("golden",)
    _load_golden(cfg)  # fail early on a broken file
    report = {}
    for name in checks:
        report[name] = _VERIFIERS[name](cfg)
        print(f"{name}: {'pass' if report[name]['passed'] else 'FAIL'}")
    report = {"passed": all(r["passed"] for r in report.values()), "checks": report}
    _write(_out_dir(cfg) / "verify.json", _dumps(_jsonable(report)))
    return EXIT_OK if report["passed"] else EXIT_FAILED


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (bool, int, str)) or obj is None:
        return obj
    if isinstance(obj, float):
        return obj if obj == obj and abs(obj) != float("inf") else str(obj)
    if hasattr(obj, "to_json"):
        return obj.to_json()
    return str(obj)


def cmd_witness(cfg: RunConfig) -> int:
    if cfg.table == "octagon":
        from .renorm_octagon import SectorSystemError, aperiodic_witness, build_sector_system

        try:
            w = aperiodic_witness(build_sector_system(), cfg.depth)
        except SectorSystemError as exc:
            print(str(exc), file=sys.stderr)
            return EXIT_FAILED
        periods = [l.period for l in w.links]
    elif cfg.table == "dodecagon":
        from .renorm_dodecagon import GrowthViolation, RocketSystemError, period_growth_witness

        try:
            w = period_growth_witness(_rocket_system(), n_max=max(3, 2 * cfg.depth))
        except (GrowthViolation, RocketSystemError) as exc:
            print(str(exc), file=sys.stderr)
            return EXIT_FAILED
        periods = [l.period for l in w.links]
    else:
        raise BadInput("witness needs table=octagon or table=dodecagon")
    _write(_out_dir(cfg) / f"witness_{cfg.table}.json", _dumps(_jsonable(w.to_json())))
    print("periods " + " ".join(str(p) for p in periods))
    return EXIT_OK


_HANDLERS = {
    "orbit": cmd_orbit,
    "scan": cmd_scan,
    "component": cmd_component,
    "return-table": cmd_return_table,
    "tables": cmd_tables,
    "verify": cmd_verify,
    "witness": cmd_witness,
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_config(argv: Sequence[str]) -> RunConfig:
    p = _Parser(prog="outer-billiards", add_help=False)
    p.add_argument("--config")
    p.add_argument("-h", "--help", action="store_true")
    p.add_argument("args", nargs="*")
    ns = p.parse_args(list(argv))
    if ns.help:
        raise UsageError("")
    cfg = RunConfig()
    if ns.config:
        try:
            cfg = RunConfig.from_text(Path(ns.config).read_text(encoding="utf-8"))
        except OSError as exc:
            raise BadInput(f"cannot read config: {exc}") from None
    for a in ns.args:
        if "=" in a:
            k, v = a.split("=", 1)
            cfg.set(k.strip(), v)
        elif cfg.command is None or "command" not in cfg.explicit or a in COMMANDS:
            cfg.command = a
            cfg.explicit.add("command")
        else:
            raise UsageError(f"unexpected argument {a!r}")
    return cfg


def main(argv: Sequence[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        cfg = build_config(argv)
        if cfg.command is None:
            raise UsageError("no command given")
        if cfg.command not in _HANDLERS:
            raise UsageError(f"unknown command {cfg.command!r}")
        cfg.validate()
        return _HANDLERS[cfg.command](cfg)
    except UsageError as exc:
        if str(exc):
            print(f"error: {exc}", file=sys.stderr)
        print(USAGE, file=sys.stderr)
        return EXIT_USAGE
    except BadInput as exc:
        print(f"bad input: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT


if __name__ == "__main__":
    sys.exit(main())
