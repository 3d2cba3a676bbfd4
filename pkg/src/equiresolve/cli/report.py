"""Running problem-file tasks and rendering their reports.

A :class:`ReportDoc` is plain JSON data.  ``emit`` turns it into bytes in
one of three formats; the same document always gives the same bytes.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from typing import Dict, List, Optional

from .. import __version__
from ..algebra import locus_empty, sing_ideal
from ..ambient import monomial_decompose
from ..errors import EngineError
from ..family import FamilySpec, check_AE, check_theorem23, stratify, tau
from ..resolution import desingularize, make_basic_object, principalize, resolve
from ..resolution.driver import ResolutionTree
from ..syntax import format_poly
from .dsl import ProblemFile, Task, format_problem

__all__ = ["FORMATS", "REPORT_FORMAT", "SCHEMA_FILE", "Flags", "ReportDoc", "emit", "load_schema", "run_task"]

REPORT_FORMAT = "equiresolve-report/1"
SCHEMA_FILE = "report_schema_v1.json"
FORMATS = ("json", "dot", "text")


@dataclass(frozen=True)
class Flags:
    max_steps: int = 64
    trace: bool = False
    seed: int = 0

    def to_json(self) -> dict:
        return {"max_steps": self.max_steps, "trace": self.trace, "seed": self.seed}


@dataclass
class ReportDoc:
    """The JSON document produced by :func:`run_task`."""

    data: Dict[str, object] = field(default_factory=dict)

    @property
    def diagnostics(self) -> List[dict]:
        return list(self.data.get("diagnostics", []))

    @property
    def tasks(self) -> List[dict]:
        return list(self.data.get("tasks", []))

    @property
    def exit_code(self) -> int:
        return 1 if self.diagnostics else 0


def load_schema() -> dict:
    """The shipped JSON schema of report documents."""
    text = resources.files(__package__).joinpath(SCHEMA_FILE).read_text(encoding="utf-8")
    return json.loads(text)


# ---------------------------------------------------------------------------
# building


def _rat(q) -> str:
    return str(q)


def _point(names, values) -> Dict[str, str]:
    return {n: _rat(v) for n, v in zip(names, values)}


def _chart_json(ch) -> dict:
    return {
        "id": ch.id,
        "parent": None if ch.parent is None else ch.parent.id,
        "step": ch.step,
        "kind": ch.kind,
        "coordinates": list(ch.names),
        "divisors": dict(ch.divisors),
        "equations": {k: format_poly(v) for k, v in ch.equations.items()},
        "exceptional": ch.exceptional,
        "units": [format_poly(u) for u in ch.units],
    }


def _created(res: ResolutionTree, i: int) -> List[str]:
    before = set(res.steps[i].charts)
    after = res.steps[i + 1].charts if i + 1 < len(res.steps) else res.final.charts
    return [c for c in after if c not in before]


def _resolution_json(res: ResolutionTree, flags: Flags) -> dict:
    steps = []
    for i, s in enumerate(res.steps):
        rec = {
            "index": s.step,
            "value": str(s.value),
            "heads": s.value.to_json(),
            "centers": {
                cid: [[format_poly(g) for g in comp] for comp in comps]
                for cid, comps in s.center.pieces.items()
                if comps
            },
            "new_divisor": s.label,
            "charts_created": _created(res, i),
        }
        if flags.trace:
            rec["trace"] = {
                "w_ord": str(s.value.w_ord),
                "t": [str(s.value.t[0]), s.value.t[1]],
                "charts": {cid: [format_poly(g) for g in s.J[cid]] for cid in s.charts},
            }
        steps.append(rec)
    final = res.final
    sing_empty = True
    monomial: Dict[str, Dict[str, int]] = {}
    for cid in final.charts:
        ch = final.tree[cid]
        J = final.J[cid]
        sing_empty = sing_empty and locus_empty(sing_ideal(J, final.b), ch.units)
        exps, _ = monomial_decompose(J, {l: ch.var(v) for l, v in sorted(ch.divisors.items())})
        monomial[cid] = exps
    return {
        "field": str(res.domain),
        "length": res.length,
        "complete": res.complete,
        "steps": steps,
        "final": {"charts": list(final.charts), "sing_empty": sing_empty, "monomial": monomial},
        "chart_tree": [_chart_json(ch) for ch in res.tree.charts.values()],
    }


def _family(p: ProblemFile) -> FamilySpec:
    return FamilySpec(p.vars, p.params, p.ideal, p.divisors, p.b)


def _basic_object(p: ProblemFile, b: Optional[int] = None):
    return make_basic_object(p.names, p.ideal, p.b if b is None else b, dict(p.divisors), keep_last=p.params)


def _run_one(p: ProblemFile, task: Task, flags: Flags) -> dict:
    out: dict = {}
    if task.name == "resolve":
        out["resolution"] = _resolution_json(resolve(_basic_object(p), flags.max_steps), flags)
    elif task.name == "principalize":
        if p.b != 1:
            raise _TaskError("principalization works with b = 1")
        pr = principalize(_basic_object(p), flags.max_steps)
        body = _resolution_json(pr.resolution, flags)
        body["final"]["monomial"] = pr.exponents
        body["final"]["verified"] = pr.verified
        out["resolution"] = body
    elif task.name == "desingularize":
        if p.b != 1:
            raise _TaskError("desingularization works with b = 1")
        dr = desingularize(_basic_object(p), max_steps=flags.max_steps, seed=flags.seed)
        out["resolution"] = _resolution_json(dr.resolution, flags)
        out["desingularization"] = {
            "index": dr.index,
            "smooth_point": {k: _rat(v) for k, v in dr.smooth_point.items()},
            "smooth_value": str(dr.smooth_value),
            "strict_transform": {c: [format_poly(g) for g in X] for c, X in dr.strict_transform.items()},
            "smooth": dr.smooth,
            "normal_crossings": dr.normal_crossings,
            "inside_center": dr.inside_center,
        }
    elif task.name == "tau":
        F = _family(p)
        value = tau(F, task.points[0], flags.max_steps)
        out["tau"] = {"sample": _point(p.params, task.points[0]), "tau": value.to_json(), "tau_text": str(value)}
    elif task.name == "stratify":
        out["stratification"] = stratify(_family(p), task.points, flags.max_steps).to_json()
    elif task.name == "check-ae":
        out["ae"] = check_AE(_family(p), task.points, flags.max_steps).to_json()
    elif task.name == "check-tau":
        F = _family(p)
        taus = [(s, tau(F, s, flags.max_steps)) for s in task.points]
        out["tau_check"] = {
            "taus": [{"sample": _point(p.params, s), "tau": t.to_json(), "tau_text": str(t)} for s, t in taus],
            "constant": len({t for _, t in taus}) == 1,
        }
    elif task.name == "check-thm23":
        out["theorem23"] = check_theorem23(_family(p), task.points, flags.max_steps).to_json()
    else:  # pragma: no cover - the parser only admits known tasks
        raise _TaskError(f"unknown task {task.name}")
    return out


class _TaskError(Exception):
    code = "invalid-task"


def _task_args(p: ProblemFile, task: Task) -> list:
    return [_point(p.params, pt) for pt in task.points]


def run_task(p: ProblemFile, flags: Optional[Flags] = None) -> ReportDoc:
    """Run every task of ``p`` in order and collect one report.

    Engine errors do not stop the run: the failing task gets status
    ``"error"`` and a diagnostic entry carrying the error's code.
    """
    flags = flags or Flags()
    tasks = []
    diagnostics = []
    for i, task in enumerate(p.tasks):
        entry = {"index": i, "task": task.name, "arguments": _task_args(p, task)}
        try:
            entry.update(_run_one(p, task, flags))
            entry["status"] = "ok"
        except (EngineError, _TaskError, ValueError) as exc:
            code = getattr(exc, "code", "invalid-task")
            entry["status"] = "error"
            entry["error"] = {"code": code, "message": str(exc)}
            diagnostics.append({"task": i, "code": code, "type": type(exc).__name__, "message": str(exc)})
        tasks.append(entry)
    data = {
        "format": REPORT_FORMAT,
        "version": __version__,
        "input": {
            "text": format_problem(p),
            "vars": list(p.vars),
            "params": list(p.params),
            "divisors": {k: v for k, v in p.divisors},
            "ideal": list(p.ideal),
            "b": p.b,
        },
        "flags": flags.to_json(),
        "tasks": tasks,
        "diagnostics": diagnostics,
    }
    return ReportDoc(data)


# ---------------------------------------------------------------------------
# emitters


def _json(doc: ReportDoc) -> bytes:
    return (json.dumps(doc.data, sort_keys=True, indent=2, ensure_ascii=True) + "\n").encode("ascii")


def _quote(text: str) -> str:
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n") + '"'


def _dot(doc: ReportDoc) -> bytes:
    lines = ["digraph charts {", "  rankdir=TB;", "  node [shape=box];"]
    for entry in doc.tasks:
        res = entry.get("resolution")
        if not res:
            continue
        prefix = f"t{entry['index']}_"
        lines.append(f"  subgraph cluster_{entry['index']} {{")
        lines.append(f"    label={_quote(str(entry['index']) + ': ' + entry['task'])};")
        finals = set(res["final"]["charts"])
        for ch in res["chart_tree"]:
            label = f"{ch['id']}\n{ch['kind']} (step {ch['step']})"
            style = ", style=bold" if ch["id"] in finals else ""
            lines.append(f"    {prefix}{ch['id']} [label={_quote(label)}{style}];")
        for ch in res["chart_tree"]:
            if ch["parent"] is not None:
                edge = ch["kind"] if ch["exceptional"] is None else f"{ch['kind']} {ch['exceptional']}"
                lines.append(f"    {prefix}{ch['parent']} -> {prefix}{ch['id']} [label={_quote(edge)}];")
        lines.append("  }")
    lines.append("}")
    return ("\n".join(lines) + "\n").encode("ascii")


def _text(doc: ReportDoc) -> bytes:
    d = doc.data
    out = [f"equiresolve {d['version']}", "input:"]
    out += ["  " + line for line in d["input"]["text"].splitlines()]
    for entry in d["tasks"]:
        out.append(f"task {entry['index']}: {entry['task']} [{entry['status']}]")
        if entry["status"] == "error":
            out.append(f"  error {entry['error']['code']}: {entry['error']['message']}")
            continue
        res = entry.get("resolution")
        if res:
            out.append(f"  field {res['field']}, {res['length']} steps")
            for s in res["steps"]:
                centers = "; ".join(
                    f"{cid}: " + " | ".join("(" + ", ".join(c) + ")" for c in comps) for cid, comps in s["centers"].items()
                )
                out.append(f"  step {s['index']}: Max g = {s['value']}, new divisor {s['new_divisor']}")
                out.append(f"    center {centers}")
                if s["charts_created"]:
                    out.append("    charts created " + ", ".join(s["charts_created"]))
                if "trace" in s:
                    tr = s["trace"]
                    out.append(f"    w-ord {tr['w_ord']}, t ({tr['t'][0]}, {tr['t'][1]})")
                    for cid, gens in tr["charts"].items():
                        out.append(f"    J[{cid}] = (" + ", ".join(gens) + ")")
            fin = res["final"]
            out.append(f"  final charts {', '.join(fin['charts'])}; Sing empty: {fin['sing_empty']}")
            if "verified" in fin:
                out.append(f"  monomial certificate verified: {fin['verified']}")
            for cid, exps in fin["monomial"].items():
                mono = " * ".join(f"{l}^{e}" for l, e in exps.items() if e) or "1"
                out.append(f"    {cid}: {mono}")
        if "desingularization" in entry:
            ds = entry["desingularization"]
            out.append(f"  resolution index {ds['index']} at value {ds['smooth_value']}")
            out.append(f"  smooth {ds['smooth']}, normal crossings {ds['normal_crossings']}, inside center {ds['inside_center']}")
        if "tau" in entry:
            out.append(f"  tau = {entry['tau']['tau_text']}")
        if "stratification" in entry:
            st = entry["stratification"]
            for k, s in enumerate(st["strata"]):
                pts = ", ".join(_fmt_sample(x) for x in s["samples"])
                out.append(f"  stratum {k}: {{{pts}}} tau = {s['tau_text']}")
            for bad in st["invalid"]:
                out.append(f"  invalid sample {_fmt_sample(bad['sample'])}: {bad['reason']}")
        if "ae" in entry:
            ae = entry["ae"]
            out.append(f"  condition AE holds: {ae['holds']} ({ae['steps_checked']} steps checked)")
            if ae["failure"]:
                out.append(f"  failure: {ae['failure']}")
        if "tau_check" in entry:
            for t in entry["tau_check"]["taus"]:
                out.append(f"  tau{_fmt_sample(t['sample'])} = {t['tau_text']}")
            out.append(f"  tau constant: {entry['tau_check']['constant']}")
        if "theorem23" in entry:
            th = entry["theorem23"]
            out.append(f"  condition AE holds: {th['ae']['holds']}")
            out.append(f"  tau constant: {th['tau_constant']}")
            out.append(f"  restriction verified: {th['restriction_verified']}")
            for note in th["notes"]:
                out.append(f"  note: {note}")
    for diag in d["diagnostics"]:
        out.append(f"diagnostic (task {diag['task']}) {diag['code']}: {diag['message']}")
    return ("\n".join(out) + "\n").encode("utf-8")


def _fmt_sample(sample: Dict[str, str]) -> str:
    return "(" + ", ".join(sample.values()) + ")"


def emit(doc: ReportDoc, format: str = "json") -> bytes:
    """Render ``doc`` as ``json``, ``dot`` or ``text``."""
    if format == "json":
        return _json(doc)
    if format == "dot":
        return _dot(doc)
    if format == "text":
        return _text(doc)
    raise ValueError(f"unknown format {format!r}; expected one of {FORMATS}")
