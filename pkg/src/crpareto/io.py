"""JSON fixtures for instances/problems and CSV/JSON for Pareto fronts.

Instance file (``"format": "crpareto-instance"``)::

    {"format": "crpareto-instance", "version": 1,
     "topology": null | {"area_side", "num_channels", "d_min", "d_max",
                         "pus": [{"x", "y", "channel", "protection_radius"}],
                         "sus": [{"x", "y"}]},
     "channel_model": {"num_users", "num_channels",
                       "availability": N x M 0/1, "reward": N x M km^2,
                       "conflict": N x N x M 0/1,
                       "interference_radius": N x M km | null},
     "c_max": int | null}

Problem file (``"format": "crpareto-problem"``)::

    {"format": "crpareto-problem", "version": 1, "num_users", "num_channels",
     "reward": N x M, "conflicts": [[n, k, m], ...] (0-based, n < k),
     "forbidden": [[n, m], ...], "c_max": int}

Front CSV: one row per point with columns ``f1..fN``, then ``a_<n>_<m>``
(1-based, row-major), then ``g<i>`` for each constrained user ``i``. Floats
are written with ``repr`` so files are byte-stable.
"""

from __future__ import annotations

import csv
import io
import json
import re
from importlib import resources
from pathlib import Path

import numpy as np

from .network import ChannelModel, Point, PrimaryUser, Topology
from .pareto import ParetoSet
from .problem import AllocationProblem, build_problem

INSTANCE_FORMAT = "crpareto-instance"
PROBLEM_FORMAT = "crpareto-problem"
FRONT_FORMAT = "crpareto-front"
BUNDLED = ("table1a", "table1b")

_NUMBER_LIST = re.compile(r"\[\s*([-+0-9.eE,\s]*?)\s*\]")


def dumps(doc: dict) -> str:
    """Indented, key-sorted JSON with innermost numeric lists kept on one line."""
    text = json.dumps(doc, indent=1, sort_keys=True)
    text = _NUMBER_LIST.sub(lambda m: "[" + ", ".join(
        x.strip() for x in m.group(1).split(",") if x.strip()) + "]", text)
    return text + "\n"


def topology_to_dict(top: Topology) -> dict:
    return {
        "area_side": top.area_side,
        "num_channels": top.num_channels,
        "d_min": top.d_min,
        "d_max": top.d_max,
        "pus": [{"x": pu.position.x, "y": pu.position.y, "channel": pu.channel,
                 "protection_radius": pu.protection_radius} for pu in top.pus],
        "sus": [{"x": p.x, "y": p.y} for p in top.sus],
    }


def topology_from_dict(d: dict) -> Topology:
    pus = [PrimaryUser(Point(float(p["x"]), float(p["y"])), int(p["channel"]),
                       float(p["protection_radius"])) for p in d["pus"]]
    sus = [Point(float(p["x"]), float(p["y"])) for p in d["sus"]]
    return Topology(float(d["area_side"]), tuple(pus), tuple(sus), int(d["num_channels"]),
                    float(d["d_min"]), float(d["d_max"]))


def model_to_dict(model: ChannelModel) -> dict:
    ds = model.interference_radius
    return {
        "num_users": model.num_users,
        "num_channels": model.num_channels,
        "availability": model.availability.tolist(),
        "reward": model.reward.tolist(),
        "conflict": model.conflict.tolist(),
        "interference_radius": None if ds is None else ds.tolist(),
    }


def model_from_dict(d: dict) -> ChannelModel:
    N, M = int(d["num_users"]), int(d["num_channels"])
    ds = d.get("interference_radius")
    return ChannelModel(
        np.array(d["availability"], dtype=np.int8).reshape(N, M),
        np.array(d["reward"], dtype=float).reshape(N, M),
        np.array(d["conflict"], dtype=np.int8).reshape(N, N, M),
        None if ds is None else np.array(ds, dtype=float).reshape(N, M),
    )


def instance_to_json(model: ChannelModel, topology: Topology | None = None,
                     c_max: int | None = None) -> str:
    doc = {
        "format": INSTANCE_FORMAT,
        "version": 1,
        "topology": None if topology is None else topology_to_dict(topology),
        "channel_model": model_to_dict(model),
        "c_max": c_max,
    }
    return dumps(doc)


def problem_to_dict(problem: AllocationProblem) -> dict:
    return {
        "format": PROBLEM_FORMAT,
        "version": 1,
        "num_users": problem.num_users,
        "num_channels": problem.num_channels,
        "reward": problem.reward.tolist(),
        "conflicts": [list(c) for c in problem.conflicts],
        "forbidden": sorted(list(c) for c in problem.forbidden),
        "c_max": problem.c_max,
    }


def problem_from_dict(d: dict) -> AllocationProblem:
    return AllocationProblem(int(d["num_users"]), int(d["num_channels"]), d["reward"],
                             tuple(tuple(c) for c in d["conflicts"]), int(d["c_max"]),
                             frozenset(tuple(c) for c in d["forbidden"]))


def read_document(source: str | Path) -> dict:
    """Load a JSON document from a path or one of the bundled fixture names."""
    if str(source) in BUNDLED:
        text = resources.files("crpareto.fixtures").joinpath(f"{source}.json").read_text()
    else:
        text = Path(source).read_text()
    return json.loads(text)


def load_instance(source: str | Path) -> tuple[ChannelModel, Topology | None, int | None]:
    doc = read_document(source)
    if doc.get("format") != INSTANCE_FORMAT:
        raise ValueError(f"{source}: not an instance file")
    top = doc.get("topology")
    return (model_from_dict(doc["channel_model"]),
            None if top is None else topology_from_dict(top), doc.get("c_max"))


def load_problem(source: str | Path, c_max: int | None = None) -> AllocationProblem:
    """Problem from an instance or problem file; ``c_max`` overrides the stored limit."""
    doc = read_document(source)
    fmt = doc.get("format")
    if fmt == PROBLEM_FORMAT:
        prob = problem_from_dict(doc)
        if c_max is not None:
            prob = AllocationProblem(prob.num_users, prob.num_channels, prob.reward,
                                     prob.conflicts, min(c_max, prob.num_channels),
                                     prob.forbidden)
        return prob
    if fmt == INSTANCE_FORMAT:
        stored = doc.get("c_max")
        return build_problem(model_from_dict(doc["channel_model"]),
                             c_max if c_max is not None else stored)
    raise ValueError(f"{source}: unknown document format {fmt!r}")


def front_csv_header(num_users: int, num_channels: int, constrained) -> list[str]:
    return ([f"f{n + 1}" for n in range(num_users)]
            + [f"a_{n + 1}_{m + 1}" for n in range(num_users) for m in range(num_channels)]
            + [f"g{i + 1}" for i in constrained])


def front_to_csv(front: ParetoSet, num_users: int, num_channels: int) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(front_csv_header(num_users, num_channels, front.constrained))
    for pt in front.points:
        w.writerow([repr(float(v)) for v in pt.objectives]
                   + [int(b) for b in pt.witness.assign.ravel()]
                   + list(pt.grid_index))
    return buf.getvalue()


def read_front_csv(path: str | Path) -> tuple[list[tuple[float, ...]], list[np.ndarray]]:
    """Objective vectors and witness matrices from a front CSV."""
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    header, body = rows[0], rows[1:]
    f_cols = [j for j, h in enumerate(header) if h.startswith("f")]
    a_cols = [j for j, h in enumerate(header) if h.startswith("a_")]
    N = len(f_cols)
    M = len(a_cols) // N if N else 0
    vecs = [tuple(float(r[j]) for j in f_cols) for r in body]
    assigns = [np.array([int(r[j]) for j in a_cols], dtype=np.int8).reshape(N, M) for r in body]
    return vecs, assigns


def front_to_dict(front: ParetoSet, spec=None) -> dict:
    d = {
        "format": FRONT_FORMAT,
        "version": 1,
        "points": [{"objectives": list(pt.objectives),
                    "assignment": pt.witness.assign.tolist(),
                    "grid_index": list(pt.grid_index)} for pt in front.points],
        "subproblems": {"total": front.subproblems_total,
                        "infeasible": front.subproblems_infeasible,
                        "solved": front.subproblems_solved},
        "filtered": front.filtered,
        "constrained": list(front.constrained),
        "grids": [list(g) for g in front.grids],
        "elapsed_s": round(front.elapsed, 3),
    }
    if front.payoff is not None:
        t = front.payoff
        d["payoff"] = {"phi": t.phi.tolist(), "utopia": t.utopia.tolist(),
                       "pseudo_nadir": t.pseudo_nadir.tolist(),
                       "nadir": None if t.nadir is None else t.nadir.tolist(),
                       "ranges": t.ranges.tolist()}
    if spec is not None:
        d["main_objective"] = spec.main_objective
        d["epsilon"] = spec.epsilon
    return d


def front_to_json(front: ParetoSet, spec=None) -> str:
    return dumps(front_to_dict(front, spec))
