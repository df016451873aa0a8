"""Experiment specs, pipelines and result files.

A spec is an INI file with an ``[experiment]`` section (``name``,
``checkers``), a ``[source]`` section describing the word and a ``[params]``
section.  Running it produces ``<out>/<name>.json`` (verdicts with exact
quantities, sorted keys, no timestamps) and one CSV per table.
"""

from __future__ import annotations

import configparser
import csv
import hashlib
import io
import json
import os
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

from . import checkers as ck
from .dynamics import factor_graph, identity_return, shift_identity_check, uk_collection, uk_set, default_scan_length
from .padic import PrecisionError
from .projective import ProjPoint
from .semigroup import matrix_of_word
from .surds import RealQuadratic
from .words import CONCAT, PERIODIC, PRESETS, ConcatProgram, WordSource, complexity, factors, source_from_mapping

SCHEMA_VERSION = 1

DEFAULTS = {
    "k": "6",
    "bound": "50",
    "prefix_window": str(2**14),
}

EXIT_OK, EXIT_HYPOTHESIS, EXIT_PRECISION, EXIT_ERROR = 0, 1, 2, 3


class SpecError(ValueError):
    """Invalid experiment spec; the message names the section and field."""


def _int_list(text: str) -> list[int]:
    """``"1-8"``, ``"4,8,12"`` or ``"6"``."""
    out = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        if "-" in part[1:]:
            lo, hi = part.split("-", 1)
            out.extend(range(int(lo), int(hi) + 1))
        else:
            out.append(int(part))
    return out


@dataclass
class ExperimentSpec:
    name: str
    checkers: list
    source_cfg: dict
    params: dict
    output: str = ""
    origin: str = "<memory>"

    @property
    def source(self) -> WordSource:
        return source_from_mapping(self.source_cfg)

    def canonical(self) -> dict:
        return {"name": self.name, "checkers": self.checkers, "source": dict(sorted(self.source_cfg.items())),
                "params": dict(sorted(self.params.items())), "schema": SCHEMA_VERSION}

    def spec_hash(self) -> str:
        blob = json.dumps(self.canonical(), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:16]

    def get(self, key: str, default: str | None = None) -> str:
        if key in self.params:
            return self.params[key]
        if default is not None:
            return default
        if key in DEFAULTS:
            return DEFAULTS[key]
        raise SpecError(f"{self.origin}: [params] missing required field '{key}'")

    def get_int(self, key: str, default: int | None = None) -> int:
        raw = self.get(key, None if default is None else str(default))
        try:
            return int(raw)
        except ValueError:
            raise SpecError(f"{self.origin}: [params] field '{key}' = {raw!r} is not an integer") from None

    def get_list(self, key: str, default: str | None = None) -> list[int]:
        raw = self.get(key, default)
        try:
            vals = _int_list(raw)
        except ValueError:
            raise SpecError(f"{self.origin}: [params] field '{key}' = {raw!r} is not an integer list") from None
        if not vals:
            raise SpecError(f"{self.origin}: [params] field '{key}' is empty")
        return vals


def parse_spec(text: str, origin: str = "<memory>", overrides: dict | None = None) -> ExperimentSpec:
    cp = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
    cp.optionxform = str
    try:
        cp.read_string(text, source=origin)
    except configparser.Error as exc:
        raise SpecError(f"{origin}: {exc}") from None
    for sec in ("experiment", "source"):
        if not cp.has_section(sec):
            raise SpecError(f"{origin}: missing section [{sec}]")
    exp = cp["experiment"]
    name = exp.get("name", "").strip()
    if not name:
        raise SpecError(f"{origin}: [experiment] field 'name' is required")
    checks = [c.strip() for c in exp.get("checkers", "").split(",") if c.strip()]
    if not checks:
        raise SpecError(f"{origin}: [experiment] field 'checkers' must list at least one checker")
    for c in checks:
        if c not in PIPELINES:
            raise SpecError(f"{origin}: [experiment] unknown checker {c!r}; choose from {sorted(PIPELINES)}")
    params = dict(cp["params"]) if cp.has_section("params") else {}
    if overrides:
        params.update({k: str(v) for k, v in overrides.items() if v is not None})
    spec = ExperimentSpec(name, checks, dict(cp["source"]), params, exp.get("output", "").strip(), origin)
    try:
        spec.source
    except (ValueError, KeyError) as exc:
        raise SpecError(f"{origin}: [source] {exc}") from None
    return spec


def load_spec(path: str, overrides: dict | None = None) -> ExperimentSpec:
    with open(path, encoding="utf-8") as fh:
        return parse_spec(fh.read(), origin=path, overrides=overrides)


# --------------------------------------------------------------------------
# pipelines: each returns (verdict records, tables)


@dataclass
class Outcome:
    verdicts: list = field(default_factory=list)
    tables: dict = field(default_factory=dict)
    caveats: list = field(default_factory=list)


def _record(checker: str, status: str, data: dict, provenance: str) -> dict:
    return {"checker": checker, "status": status, "data": data, "provenance": provenance}


def run_complexity(spec: ExperimentSpec) -> Outcome:
    src = spec.source
    window = spec.get_int("prefix_window")
    rows = []
    for n in spec.get_list("n_values", "1-12"):
        fs = factors(src, n, window)
        rows.append({"n": n, "P": len(fs), "exact": fs.exact, "provenance": "words.factors"})
    return Outcome(tables={"complexity": rows})


def run_factor_graph(spec: ExperimentSpec) -> Outcome:
    src = spec.source
    window = spec.get_int("prefix_window")
    rows = []
    out = Outcome()
    for n in spec.get_list("n_values", "1-8"):
        g = factor_graph(src, n, window)
        p2n = complexity(src, 2 * n, window)
        rows.append({"n": n, "components": g.component_count, "edges": len(g.edges), "P_2n": p2n,
                     "edge_law": len(g.edges) == p2n, "exact": g.exact, "provenance": "dynamics.factor_graph"})
    counts = [r["components"] for r in rows]
    ups = sum(1 for a, b in zip(counts, counts[1:]) if b > a)
    downs = sum(1 for a, b in zip(counts, counts[1:]) if b < a)
    trend = "non-decreasing" if downs == 0 else f"{ups} increases, {downs} decreases"
    out.tables["factor_graph"] = rows
    status = "ok" if all(r["edge_law"] for r in rows) else "hypothesis_failed"
    out.verdicts.append(_record("factor_graph", status, {"component_counts": counts, "trend": trend,
                                                        "all_exact": all(r["exact"] for r in rows)},
                                "dynamics.factor_graph"))
    return out


def run_uk(spec: ExperimentSpec) -> Outcome:
    src = spec.source
    p = spec.get_int("p")
    shift_max = spec.get_int("shift_window", 100)
    rows = []
    for k in spec.get_list("k"):
        N = spec.get_int("scan_length", default_scan_length(p, k))
        U = uk_set(src, p, k, N)
        coll = uk_collection(src, p, k, shift_max, N)
        shift = shift_identity_check(src, p, k, shift_max, N)
        ret = identity_return(src, p, k, N)
        rows.append({"k": k, "U_size": len(U), "saturated": U.saturated, "collection_size": coll.count,
                     "equal_cardinality": coll.equal_cardinality(), "shift_identity_failures": len(shift["failures"]),
                     "identity_return": ret if ret is not None else "not found",
                     "provenance": "dynamics.uk_set/uk_collection/shift_identity_check"})
    return Outcome(tables={"uk": rows})


def _parse_points(text: str, p: int, prec: int) -> list[tuple[str, ProjPoint]]:
    """``"x:y,..."`` to ``(label, point)`` pairs; the label is precision independent."""
    pts = []
    for item in text.split(","):
        item = item.strip()
        if not item:
            continue
        try:
            x, y = item.split(":")
            pts.append((f"({x.strip()}:{y.strip()})", ProjPoint.from_ints(Fraction(x), Fraction(y), p, prec)))
        except ValueError:
            raise SpecError(f"[params] cannot parse point {item!r}; expected x:y") from None
    return pts


def run_th_main(spec: ExperimentSpec) -> Outcome:
    src = spec.source
    p = spec.get_int("p")
    ks = spec.get_list("k")
    word = spec.get("matrix_word", "")
    if not word:
        if src.kind != PERIODIC:
            raise SpecError(f"{spec.origin}: [params] 'matrix_word' required for non-periodic sources")
        word = "".join(str(x) for x in src.period)
    A = matrix_of_word(word)
    m = spec.get("m", "max")
    window = spec.get_int("trajectory_window", 0) or None
    pts = _parse_points(spec.get("points", "1:0,1:1"), p, max(ks) + 8)
    out = Outcome()
    rows = []
    for label, pt in pts:
        for k in ks:
            inst = ck.build_th_main(A, pt, src, k, m if m == "max" else int(m))
            v = ck.check_th_main(inst, window)
            d = v.to_dict()
            d.update({"point": label, "k": k})
            out.verdicts.append(_record("th_main", v.status, d, "checkers.check_th_main"))
            rows.append({"point": label, "k": k, "m": inst.m, "status": v.status,
                         "epsilon_squared": d.get("epsilon_squared", ""), "epsilon_decimal": d.get("epsilon_decimal", ""),
                         "provenance": "checkers.check_th_main"})
    out.tables["th_main"] = rows
    return out


def run_th_da(spec: ExperimentSpec) -> Outcome:
    src = spec.source
    p = spec.get_int("p")
    a = spec.get_int("a")
    m = spec.get("m", "max")
    window = spec.get_int("trajectory_window", 0) or None
    out = Outcome()
    for k in spec.get_list("k"):
        for label, pt in _parse_points(spec.get("points", "1:1"), p, k + 8):
            v = ck.check_th_da(a, pt, src, k, m if m == "max" else int(m), window)
            d = v.to_dict()
            d.update({"point": label, "k": k})
            out.verdicts.append(_record("th_da", v.status, d, "checkers.check_th_da"))
    return out


def run_lmad_periodic(spec: ExperimentSpec) -> Outcome:
    src = spec.source
    if src.kind != PERIODIC:
        raise SpecError(f"{spec.origin}: checker 'lmad_periodic' needs a periodic source")
    p = spec.get_int("p")
    k = spec.get_list("k")[0]
    bounds = spec.get_list("bounds", spec.get("bound"))
    samples = spec.get_int("samples", 5)
    rep = ck.lmad_certificate_periodic(src.period, p, k, bounds, samples=samples, seed=spec.get_int("seed", 0))
    d = rep.to_dict()
    statuses = {v.status for v in rep.only_if}
    status = "ok" if rep.if_direction and statuses <= {ck.APPLIES} else "hypothesis_failed"
    return Outcome(verdicts=[_record("lmad_periodic", status, d, "checkers.lmad_certificate_periodic")])


def run_concat(spec: ExperimentSpec) -> Outcome:
    src = spec.source
    if src.kind != CONCAT:
        raise SpecError(f"{spec.origin}: checker 'concat' needs a concat source")
    p = spec.get_int("p")
    out = Outcome()
    for k in spec.get_list("k"):
        rep = ck.concat_scheme_checker(src.program, src.seeds, p, k)
        status = "ok" if rep.pure_period and rep.uniqueness_ok else "hypothesis_failed"
        d = rep.to_dict()
        d["seeds"] = list(d["seeds"])
        out.verdicts.append(_record("concat", status, d, "checkers.concat_scheme_checker"))
    return out


NAMED_REALS: dict[str, Callable[[], RealQuadratic]] = {
    "golden": RealQuadratic.golden_ratio,
    "sqrt2m1": lambda: RealQuadratic(-1, 1, 1, 2),
}


def run_prop_lem1(spec: ExperimentSpec) -> Outcome:
    name = spec.get("x", "golden")
    if name in NAMED_REALS:
        x = NAMED_REALS[name]()
    else:
        from .words import _parse_number

        x = _parse_number(name)
        if not isinstance(x, RealQuadratic):
            raise SpecError(f"{spec.origin}: [params] 'x' must be a quadratic irrational")
    n_max = spec.get_int("n_max", 40)
    ab = spec.get_int("ab_max", 5)
    primes = spec.get_list("primes", "2,3")
    total = failures = 0
    rows = []
    for p in primes:
        for n in range(0, n_max + 1):
            for a in range(-ab, ab + 1):
                for b in range(-ab, ab + 1):
                    if a == 0 and b == 0:
                        continue
                    r = ck.prop_lem1_check(x, n, a, b, p)
                    total += 1
                    failures += not r.holds
            rows.append({"p": p, "n": n, "q_n": ck.cf_denominators(x.continued_fraction(n + 2), n)[n],
                         "provenance": "checkers.prop_lem1_check"})
    status = "ok" if failures == 0 else "hypothesis_failed"
    out = Outcome(tables={"prop_lem1": rows})
    out.verdicts.append(_record("prop_lem1", status, {"x": str(x), "tuples": total, "failures": failures},
                                "checkers.prop_lem1_check"))
    return out


def run_vpw(spec: ExperimentSpec) -> Outcome:
    p = spec.get_int("p")
    cands = [c.strip() for c in spec.get("candidates").split(",") if c.strip()]
    pts = spec.get("points", "")
    k = spec.get_list("k")[0]
    out = Outcome()
    targets = _parse_points(pts, p, k + 8) if pts else [("any", None)]
    for label, pt in targets:
        v = ck.th_vpw_screen(cands, pt, p, k)
        d = v.to_dict()
        d["point"] = label
        out.verdicts.append(_record("vpw", "ok", d, "checkers.th_vpw_screen"))
    return out


PIPELINES: dict[str, Callable[[ExperimentSpec], Outcome]] = {
    "complexity": run_complexity,
    "factor_graph": run_factor_graph,
    "uk": run_uk,
    "th_main": run_th_main,
    "th_da": run_th_da,
    "lmad_periodic": run_lmad_periodic,
    "concat": run_concat,
    "prop_lem1": run_prop_lem1,
    "vpw": run_vpw,
}

CHECKER_DOCS = {
    "complexity": "factor complexity P(w,n); params: n_values (default 1-12), prefix_window",
    "factor_graph": "bipartite factor graphs G_n with component counts and the edge law; params: n_values (default 1-8), prefix_window",
    "uk": "prefix-matrix sets mod p^k, shift collections and the shift identity; params: p, k (list), shift_window, scan_length",
    "th_main": "main-theorem verdicts; params: p, k (list), points ('x:y,...'), matrix_word, m ('max' or integer), trajectory_window",
    "th_da": "unipotent-theorem verdicts; params: p, a, k (list), points, m, trajectory_window",
    "lmad_periodic": "both directions for a periodic word; params: p, k, bounds (list), samples, seed",
    "concat": "concatenation-scheme periodicity, uniqueness and exclusion stamp; params: p, k (list)",
    "prop_lem1": "convergent inequality sweep; params: x (golden | sqrt2m1 | '(a+b*sqrt(D))/c'), n_max, ab_max, primes",
    "vpw": "stabilizer screen; params: p, k, candidates (words), points (optional)",
}


# --------------------------------------------------------------------------
# run and persist


@dataclass
class ResultRecord:
    spec: ExperimentSpec
    verdicts: list
    tables: dict
    caveats: list
    errors: list

    def exit_code(self) -> int:
        if self.errors:
            return EXIT_ERROR
        statuses = {v["status"] for v in self.verdicts}
        if ck.PRECISION_LIMITED in statuses:
            return EXIT_PRECISION
        if ck.HYPOTHESIS_FAILED in statuses:
            return EXIT_HYPOTHESIS
        return EXIT_OK

    def to_json(self) -> dict:
        return {
            "schema": SCHEMA_VERSION,
            "spec": self.spec.canonical(),
            "spec_hash": self.spec.spec_hash(),
            "verdicts": self.verdicts,
            "tables": self.tables,
            "caveats": self.caveats,
            "errors": self.errors,
        }


def run(spec: ExperimentSpec) -> ResultRecord:
    verdicts, tables, caveats, errors = [], {}, [], []
    for name in spec.checkers:
        try:
            out = PIPELINES[name](spec)
        except SpecError:
            raise
        except PrecisionError as exc:
            verdicts.append(_record(name, ck.PRECISION_LIMITED, {"message": str(exc)}, name))
            continue
        except (ValueError, ArithmeticError) as exc:
            errors.append({"checker": name, "message": f"{type(exc).__name__}: {exc}"})
            continue
        verdicts.extend(out.verdicts)
        tables.update(out.tables)
        caveats.extend(out.caveats)
    return ResultRecord(spec, verdicts, tables, caveats, errors)


def _csv_text(rows: list[dict]) -> str:
    buf = io.StringIO()
    if not rows:
        return ""
    cols = list(rows[0].keys())
    w = csv.DictWriter(buf, fieldnames=cols, lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow({c: _cell(r.get(c)) for c in cols})
    return buf.getvalue()


def _cell(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if v is None:
        return ""
    return str(v)


def write_results(record: ResultRecord, out_dir: str) -> list[str]:
    """Write ``<name>.json`` and ``<name>.<table>.csv``; returns the written paths."""
    os.makedirs(out_dir, exist_ok=True)
    base = os.path.join(out_dir, record.spec.name)
    paths = []
    with open(base + ".json", "w", encoding="utf-8", newline="\n") as fh:
        json.dump(record.to_json(), fh, sort_keys=True, indent=2, default=str)
        fh.write("\n")
    paths.append(base + ".json")
    for tname in sorted(record.tables):
        path = f"{base}.{tname}.csv"
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(_csv_text(record.tables[tname]))
        paths.append(path)
    return paths


def summary(record: ResultRecord) -> str:
    lines = [f"experiment {record.spec.name} [{record.spec.spec_hash()}]"]
    counts: dict[str, int] = {}
    for v in record.verdicts:
        counts[v["status"]] = counts.get(v["status"], 0) + 1
    for s in sorted(counts):
        lines.append(f"  {s}: {counts[s]}")
    for t in sorted(record.tables):
        lines.append(f"  table {t}: {len(record.tables[t])} rows")
    for e in record.errors:
        lines.append(f"  error in {e['checker']}: {e['message']}")
    return "\n".join(lines)


# --------------------------------------------------------------------------
# comparison


class SchemaError(ValueError):
    pass


def load_record(path: str) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise SchemaError(f"{path}: cannot read result record ({exc})") from None
    if not isinstance(data, dict) or data.get("schema") != SCHEMA_VERSION:
        raise SchemaError(f"{path}: not a schema-{SCHEMA_VERSION} result record")
    for key in ("verdicts", "tables", "spec"):
        if key not in data:
            raise SchemaError(f"{path}: missing field '{key}'")
    return data


def _eps_by_key(rec: dict) -> dict:
    out = {}
    for v in rec["verdicts"]:
        d = v.get("data", {})
        if v["checker"] == "th_main" and "epsilon_decimal" in d:
            out[(d.get("point"), d.get("k"))] = float(d["epsilon_decimal"])
    return out


def compare(a: dict, b: dict) -> dict:
    """Structural diff of two records plus an epsilon monotonicity report."""
    diffs = []
    if a["spec"] != b["spec"]:
        diffs.append({"field": "spec", "a": a["spec"], "b": b["spec"]})
    va, vb = a["verdicts"], b["verdicts"]
    if len(va) != len(vb):
        diffs.append({"field": "verdicts", "a": len(va), "b": len(vb)})
    for i, (x, y) in enumerate(zip(va, vb)):
        if x != y:
            diffs.append({"field": f"verdicts[{i}]", "a": x.get("status"), "b": y.get("status")})
    for t in sorted(set(a["tables"]) | set(b["tables"])):
        if a["tables"].get(t) != b["tables"].get(t):
            diffs.append({"field": f"tables.{t}"})
    ea, eb = _eps_by_key(a), _eps_by_key(b)
    mono = []
    pts = {pt for pt, _ in ea} & {pt for pt, _ in eb}
    for pt in sorted(pts, key=str):
        ka = {k: e for (q, k), e in ea.items() if q == pt}
        kb = {k: e for (q, k), e in eb.items() if q == pt}
        for k1, e1 in ka.items():
            for k2, e2 in kb.items():
                if k1 < k2:
                    mono.append({"point": pt, "k_a": k1, "k_b": k2, "eps_a": e1, "eps_b": e2, "non_increasing": e2 <= e1})
    return {"identical": not diffs, "differences": diffs, "epsilon_monotonicity": mono}
