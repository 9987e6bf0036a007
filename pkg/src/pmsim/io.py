"""Text file formats.  Everything is UTF-8 JSON (or CSV for the behavior
matrix) with rationals written as "p/q" strings and Gaussian rationals as
[re, im] pairs, so files are exact and diffable."""

from __future__ import annotations

import csv
import io
import json
from fractions import Fraction
from pathlib import Path

from .automata import Behavior, behavior
from .ensemble import Ensemble, Mismatch
from .errors import InvalidState
from .exact import Matrix, gauss_json, parse_gauss, parse_rat, rat_str
from .quantum import QuantumState, validate_density


def dumps(obj) -> str:
    return json.dumps(obj, indent=1, ensure_ascii=False) + "\n"


def write_text(path, text: str) -> None:
    Path(path).write_text(text, encoding="utf-8")


def matrix_json(m: Matrix) -> list:
    return [[gauss_json(x) for x in m.row(i)] for i in range(m.rows)]


def int_rows_json(rows) -> list:
    return [[str(x) for x in r] for r in rows]


# ---- states -----------------------------------------------------------------

def state_from_json(data) -> QuantumState:
    if not isinstance(data, dict) or "rho" not in data:
        raise InvalidState("format", "state file needs a 'rho' field")
    rows = data["rho"]
    if not isinstance(rows, list) or len(rows) != 4 or any(
            not isinstance(r, list) or len(r) != 4 for r in rows):
        raise InvalidState("shape", "'rho' must be a 4x4 array")
    try:
        m = Matrix.from_rows([[parse_gauss(x) for x in r] for r in rows])
    except ValueError as exc:
        raise InvalidState("format", str(exc)) from exc
    validate_density(m)
    return QuantumState(m)


def load_state(path) -> QuantumState:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise InvalidState("format", f"{path}: {exc}") from exc
    return state_from_json(data)


def state_json(state: QuantumState) -> dict:
    return {"rho": matrix_json(state.rho)}


# ---- behaviors ----------------------------------------------------------------

def behavior_record(b: Behavior) -> dict:
    return {
        "lambda": b.lam,
        "flip": b.flip,
        "perm": b.perm,
        "s0": b.s0,
        "o": [b.automaton.output_grid(s) for s in (1, 2, 3)],
        "t": [b.automaton.transition_grid(s) for s in (1, 2, 3)],
    }


def behaviors_json(behaviors) -> dict:
    return {"count": len(behaviors), "behaviors": [behavior_record(b) for b in behaviors]}


def matrix_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    for r in rows:
        w.writerow(r)
    return buf.getvalue()


def read_matrix_csv(path) -> list:
    with open(path, newline="", encoding="utf-8") as fh:
        return [[int(x) for x in row] for row in csv.reader(fh)]


# ---- ensembles ----------------------------------------------------------------

def ensemble_json(p: Ensemble) -> dict:
    return {
        "weights": {str(lam): rat_str(p.weights[lam]) for lam in p.support},
        "behaviors": {str(lam): {"flip": behavior(lam).flip, "perm": behavior(lam).perm,
                                 "s0": behavior(lam).s0}
                      for lam in p.support},
    }


def ensemble_from_json(data) -> Ensemble:
    weights = {int(k): parse_rat(v) for k, v in data["weights"].items()}
    return Ensemble(weights)


def load_ensemble(path) -> Ensemble:
    return ensemble_from_json(json.loads(Path(path).read_text(encoding="utf-8")))


def verification_json(result, depth: int) -> dict:
    if result is None:
        return {"depth": depth, "pass": True}
    assert isinstance(result, Mismatch)
    return {
        "depth": depth,
        "pass": False,
        "mismatch": {
            "context": result.context,
            "inputs": list(result.inputs),
            "outputs": list(result.outputs),
            "expected": rat_str(result.expected),
            "obtained": rat_str(result.obtained),
        },
    }


# ---- section ------------------------------------------------------------------

def section_json(section) -> dict:
    rep = section.report
    verdicts = {v.row: v for v in rep.verdicts}
    wit = []
    for w in section.witnesses:
        v = verdicts[w.row]
        wit.append({
            "row": w.row,
            "matrix": matrix_json(w.matrix),
            "psd": v.psd,
            "rank": v.rank,
            "rank_one_projector": v.rank_one_projector,
            "context": v.context,
            "outcome": list(v.outcome) if v.outcome else None,
        })
    return {
        "ray_count": rep.ray_count,
        "preimage_ray_count": section.generators.raw_count,
        "facet_count": rep.facet_count,
        "row_count": rep.row_count,
        "nonzero_witnesses": rep.nonzero_witnesses,
        "witnesses_per_context": rep.per_context(),
        "q_subset_p": rep.q_in_p,
        "chart": list(section.facets.chart),
        "rays": int_rows_json(section.generators.rays),
        "facets": int_rows_json(section.facets.rows),
        "witnesses": wit,
    }


def fraction_list(values) -> list:
    return [rat_str(Fraction(x)) for x in values]
