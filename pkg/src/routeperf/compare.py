"""Trend report joining a simulation sweep table with an analytic curve table.

Absolute values of the two sources are not comparable, so the report
checks orderings and monotonicity on each side and flags every violated
expectation by cell.
"""

from __future__ import annotations

import math
import statistics
from dataclasses import dataclass, field

from .curves import CURVE_COLUMNS
from .runner import COUNTER_COLUMNS, SIM_COLUMNS
from .tables import read_csv

__all__ = ["CompareError", "Check", "Report", "compare_report", "sim_checks", "model_checks"]

PDR_SPREAD_LIMIT = 0.05
MIN_LATENCY = 0.002
# Table values carry 9 significant digits, so "exact" means equal after rounding.
REL_EQ = 1e-8


class CompareError(ValueError):
    pass


@dataclass
class Check:
    name: str
    passed: bool | None  # None: not evaluable on these tables
    detail: str = ""

    def line(self) -> str:
        tag = {True: "PASS", False: "FAIL", None: "SKIP"}[self.passed]
        return f"{tag} {self.name}" + (f": {self.detail}" if self.detail else "")


@dataclass
class Report:
    checks: list = field(default_factory=list)
    notes: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed is not False for c in self.checks)

    def text(self) -> str:
        lines = list(self.notes) + [c.line() for c in self.checks]
        lines.append(f"verdict: {'PASS' if self.passed else 'FAIL'}")
        return "\n".join(lines) + "\n"


def _num(text: str):
    return None if text == "" else float(text)


# ---------------------------------------------------------------- simulation side

def _cell_means(rows):
    cells: dict = {}
    for row in rows:
        cell = (row["network"], int(row["node_count"]))
        prof = (row["protocol"], row["variant"])
        d = cells.setdefault(cell, {}).setdefault(prof, {"pdr": [], "ae2ed": [], "nro": []})
        for m in d:
            v = _num(row[m])
            if v is not None:
                d[m].append(v)
    out = {}
    for cell, profs in cells.items():
        out[cell] = {
            prof: {m: (statistics.fmean(v) if v else None) for m, v in ms.items()}
            for prof, ms in profs.items()
        }
    return out


def _seed_rows(rows):
    out = []
    for row in rows:
        if row["seed"] in ("mean", "std"):
            continue
        try:
            int(row["seed"])
        except ValueError:
            raise CompareError(f"bad seed value {row['seed']!r}") from None
        out.append(row)
    return out


def sim_checks(rows) -> list[Check]:
    rows = _seed_rows(rows)
    if not rows:
        raise CompareError("simulation table has no per-seed rows")
    checks = []
    bad = []
    for row in rows:
        where = "/".join(row[k] for k in ("network", "protocol", "variant", "node_count", "seed"))
        c = {k: int(float(row[k])) for k in COUNTER_COLUMNS if k != "delay_sum"}
        if c["data_sent"] != c["data_delivered"] + c["data_dropped"] + c["data_in_flight"]:
            bad.append(f"{where} conservation")
        pdr, ae2ed, nro = (_num(row[m]) for m in ("pdr", "ae2ed", "nro"))
        if pdr is None or not 0.0 <= pdr <= 1.0:
            bad.append(f"{where} pdr")
        if ae2ed is not None and ae2ed < MIN_LATENCY * (1 - 1e-9):
            bad.append(f"{where} ae2ed")
        if nro is not None and nro < 0:
            bad.append(f"{where} nro")
    checks.append(Check("row sanity (conservation, 0<=pdr<=1, ae2ed>=latency, nro>=0)",
                        not bad, "; ".join(bad[:10])))

    means = _cell_means(rows)

    def get(cell, proto, var, metric):
        v = means[cell].get((proto, var))
        return None if v is None else v[metric]

    def order(name, cells, fn):
        fails, evaluated = [], 0
        for cell in cells:
            verdict = fn(cell)
            if verdict is None:
                continue
            evaluated += 1
            if not verdict:
                fails.append(f"{cell[0]}/{cell[1]}")
        if not evaluated:
            checks.append(Check(name, None, "profiles missing"))
        else:
            checks.append(Check(name, not fails, ("violated in " + ", ".join(fails)) if fails
                                else f"{evaluated} cells"))

    def compare(lhs, rhs, op):
        if lhs is None or rhs is None:
            return None
        return op(lhs, rhs)

    cells = sorted(means)

    def a(cell):
        dsr = get(cell, "dsr", "default", "pdr")
        r1 = compare(dsr, get(cell, "dymo", "default", "pdr"), lambda x, y: x >= y)
        r2 = compare(dsr, get(cell, "dsdv", "default", "pdr"), lambda x, y: x >= y)
        if r1 is None or r2 is None:
            return None
        return r1 and r2

    def b(cell):
        d = get(cell, "dsdv", "default", "ae2ed")
        others = [get(cell, "dsr", "default", "ae2ed"), get(cell, "dymo", "default", "ae2ed")]
        if d is None or any(o is None for o in others):
            return None
        return all(d < o for o in others)

    order("PDR: DSR-DEF >= DYMO-DEF and DSDV", cells, a)
    order("AE2ED: DSDV lowest", cells, b)
    order("NRO: DYMO-DEF > DSR-DEF", cells, lambda c: compare(
        get(c, "dymo", "default", "nro"), get(c, "dsr", "default", "nro"), lambda x, y: x > y))
    order("NRO: DYMO-MOD < DYMO-DEF", cells, lambda c: compare(
        get(c, "dymo", "modified", "nro"), get(c, "dymo", "default", "nro"), lambda x, y: x < y))
    order("PDR: DSR-MOD >= DSR-DEF (vanet)", [c for c in cells if c[0] == "vanet"],
          lambda c: compare(get(c, "dsr", "modified", "pdr"), get(c, "dsr", "default", "pdr"),
                            lambda x, y: x >= y))
    return checks


def sim_summary(rows) -> list[str]:
    means = _cell_means(_seed_rows(rows))
    out = ["cell,profile,pdr,ae2ed,nro"]
    for cell in sorted(means):
        for prof in sorted(means[cell]):
            m = means[cell][prof]
            vals = ",".join("" if m[k] is None else format(m[k], ".4g") for k in ("pdr", "ae2ed", "nro"))
            out.append(f"{cell[0]}/{cell[1]},{prof[0]}-{prof[1]},{vals}")
    return out


# ---------------------------------------------------------------- model side

def _nondecreasing(seq, tol=1e-12):
    return all(b >= a - tol * max(1.0, abs(a)) for a, b in zip(seq, seq[1:]))


def model_checks(kind: str, rows) -> list[Check]:
    if not rows:
        raise CompareError("model table is empty")
    checks = []
    if kind in ("pdr", "delay"):
        col = "pdr" if kind == "pdr" else "tau0"
        groups: dict = {}
        for r in rows:
            groups.setdefault((r["lambda"], r["sigma"], r["road"]), []).append(
                (float(r["wait_t"]), float(r[col])))
        fails, spread_fails = [], []
        for g, pts in sorted(groups.items()):
            ys = [y for _, y in sorted(pts)]
            if not _nondecreasing(ys):
                fails.append("/".join(g))
            if kind == "pdr" and math.isclose(float(g[0]), 0.00025) and ys[-1] - ys[0] > PDR_SPREAD_LIMIT:
                spread_fails.append("/".join(g))
        checks.append(Check(f"{col} nondecreasing in wait time", not fails, ", ".join(fails)))
        if kind == "pdr":
            checks.append(Check(f"pdr variation <= {PDR_SPREAD_LIMIT} at lambda=0.00025",
                                not spread_fails, ", ".join(spread_fails)))
        return checks
    groups = {}
    for r in rows:
        groups.setdefault((r["population"], r["lambda"], r["h"]), []).append(
            (float(r["t"]), {p: float(r[p]) for p in ("dymo", "dsr", "dsdv")}))
    mono, dom = [], []
    for g, pts in sorted(groups.items()):
        pts.sort(key=lambda x: x[0])
        for p in ("dymo", "dsr", "dsdv"):
            if not _nondecreasing([v[p] for _, v in pts]):
                mono.append(f"{p}@{'/'.join(g)}")
        if g[0] == "10":
            for t, v in pts:
                if t >= 60 and not (v["dsdv"] > v["dsr"] and v["dsdv"] > v["dymo"]):
                    dom.append(f"h={g[2]} t={t:g}")
    checks.append(Check("NRO nondecreasing in t", not mono, ", ".join(mono)))
    checks.append(Check("10-node: DSDV above DSR and DYMO for t >= 60", not dom,
                        ("violated at " + ", ".join(dom[:6]) + (" ..." if len(dom) > 6 else ""))
                        if dom else ""))
    by_t: dict = {}
    for (pop, lam, h), pts in groups.items():
        if pop == "10":
            for t, v in pts:
                by_t.setdefault((lam, t), {})[float(h)] = v["dsdv"]
    scale_fail = [f"t={t}" for (lam, t), hv in sorted(by_t.items())
                  if 2.0 in hv and 8.0 in hv
                  and not math.isclose(hv[8.0], 4.0 * hv[2.0], rel_tol=REL_EQ, abs_tol=1e-300)]
    checks.append(Check("10-node: DSDV(h=8) = 4 x DSDV(h=2)",
                        None if not by_t else not scale_fail, ", ".join(scale_fail)))
    return checks


# ---------------------------------------------------------------- entry point

def _model_kind(header) -> str:
    for kind, cols in CURVE_COLUMNS.items():
        if tuple(header) == cols:
            return kind
    raise CompareError(f"model table header {','.join(header)!r} matches no curve schema")


def compare_report(sim_text: str, model_text: str) -> Report:
    sim_header, sim_rows = read_csv(sim_text)
    if not sim_header:
        raise CompareError("simulation table is empty")
    if tuple(sim_header) != SIM_COLUMNS:
        raise CompareError(f"simulation table header {','.join(sim_header)!r} is not the sweep schema")
    model_header, model_rows = read_csv(model_text)
    if not model_header:
        raise CompareError("model table is empty")
    kind = _model_kind(model_header)
    rep = Report()
    rep.notes.extend(sim_summary(sim_rows))
    rep.notes.append(f"model table: {kind}, {len(model_rows)} rows")
    rep.checks.extend(sim_checks(sim_rows))
    rep.checks.extend(model_checks(kind, model_rows))
    return rep
