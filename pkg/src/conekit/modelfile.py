"""JSON model files: exact screws as rational strings, optional explicit loops."""

from __future__ import annotations

import json
from importlib import resources
from pathlib import Path

from .exact import Q, format_rational
from .model import JOINT_KINDS, Joint, LinkageModel
from .topology import (
    FundamentalCycle,
    LinkageGraph,
    TopologyError,
    check_closure,
    cycle_space_dimension,
    default_cotree,
    fundamental_cycles,
)

SCHEMA_VERSION = 1

FIXTURES = {
    "fayet_wohlhart": "fayet_wohlhart.json",
    "fourbar_planar": "fourbar_planar.json",
    "triangle_3r": "triangle_3r.json",
}


class ModelFileError(ValueError):
    """Validation failure; ``code`` is a stable machine-readable tag."""

    def __init__(self, code: str, message: str):
        super().__init__(f"{code}: {message}")
        self.code = code


def _rational(text, where: str):
    if not isinstance(text, (str, int)) or isinstance(text, bool):
        raise ModelFileError("malformed-rational", f"{where}: expected a rational string, got {text!r}")
    try:
        return Q(text)
    except (ValueError, ZeroDivisionError, TypeError) as exc:
        raise ModelFileError("malformed-rational", f"{where}: {exc}") from None


def model_from_dict(doc: dict) -> LinkageModel:
    if "schema_version" not in doc:
        raise ModelFileError("schema-version", "missing schema_version")
    if doc["schema_version"] != SCHEMA_VERSION:
        raise ModelFileError("schema-version", f"unsupported schema_version {doc['schema_version']!r}")
    base = doc.get("base")
    if base is None:
        raise ModelFileError("missing-base", "the base link must be named")
    links = list(doc.get("links", []))
    if base not in links:
        links.insert(0, base)
    if len(set(links)) != len(links):
        raise ModelFileError("duplicate-link", "link names must be unique")

    joints = []
    edges = []
    seen = set()
    for k, jd in enumerate(doc.get("joints", [])):
        jid = jd.get("id")
        if not isinstance(jid, int) or isinstance(jid, bool):
            raise ModelFileError("joint-id", f"joint #{k}: id must be an integer")
        if jid in seen:
            raise ModelFileError("duplicate-joint-id", f"duplicate joint id {jid}")
        seen.add(jid)
        raw = jd.get("screw", [])
        if len(raw) != 6:
            raise ModelFileError("screw-length", f"joint {jid}: screw length {len(raw)} != 6")
        sc = tuple(_rational(v, f"joint {jid} screw") for v in raw)
        kind = jd.get("kind", "helical")
        if kind not in JOINT_KINDS:
            raise ModelFileError("joint-kind", f"joint {jid}: unknown kind {kind!r}")
        for end in ("source", "target"):
            if jd.get(end) not in links:
                raise ModelFileError("unreferenced-vertex", f"joint {jid}: {end} {jd.get(end)!r} is not a listed link")
        joints.append(Joint(jid, sc, kind))
        edges.append((jid, jd["source"], jd["target"]))
    if not joints:
        raise ModelFileError("no-joints", "model has no joints")

    used = {v for _, s, t in edges for v in (s, t)}
    idle = [v for v in links if v not in used]
    if idle:
        raise ModelFileError("unreferenced-vertex", f"link {idle[0]!r} is not attached to any joint")
    graph = LinkageGraph.from_edges(edges, base=base, vertices=links)
    try:
        gamma = cycle_space_dimension(graph)
    except TopologyError as exc:
        raise ModelFileError("disconnected", str(exc)) from None

    if doc.get("loops"):
        loops = []
        for k, signed in enumerate(doc["loops"]):
            for j in signed:
                if not isinstance(j, int) or j == 0 or abs(j) not in seen:
                    raise ModelFileError("loop-joint", f"loop {k + 1}: unknown joint {j!r}")
            cyc = FundamentalCycle.from_signed(signed)
            try:
                check_closure(graph, cyc)
            except TopologyError as exc:
                raise ModelFileError("non-closing-loop", f"loop {k + 1}: {exc}") from None
            loops.append(cyc)
        if len(loops) != gamma:
            raise ModelFileError("loop-count", f"{len(loops)} loops listed, graph has {gamma} independent cycles")
    else:
        cotree = doc.get("cotree") or default_cotree(graph)
        try:
            loops = fundamental_cycles(graph, cotree)
        except TopologyError as exc:
            raise ModelFileError("cotree", str(exc)) from None

    return LinkageModel(
        joints=tuple(joints),
        graph=graph,
        loops=tuple(loops),
        name=doc.get("name", "linkage"),
        defaults=dict(doc.get("analysis", {})),
    )


def model_to_dict(m: LinkageModel) -> dict:
    edge = {e.joint: e for e in m.graph.edges}
    return {
        "schema_version": SCHEMA_VERSION,
        "name": m.name,
        "base": m.graph.base,
        "links": list(m.graph.vertices),
        "joints": [
            {
                "id": j.id,
                "kind": j.kind,
                "screw": [format_rational(v) for v in j.screw],
                "source": edge[j.id].source,
                "target": edge[j.id].target,
            }
            for j in m.joints
        ],
        "loops": [list(c.signed()) for c in m.loops],
        "analysis": dict(m.defaults),
    }


def parse_model(path) -> LinkageModel:
    text = Path(path).read_text(encoding="utf-8")
    try:
        doc = json.loads(text, parse_float=_reject_float)
    except json.JSONDecodeError as exc:
        raise ModelFileError("json", str(exc)) from None
    return model_from_dict(doc)


def _reject_float(text):
    raise ModelFileError("float-forbidden", f"floating-point literal {text} in model file")


def serialize_model(m: LinkageModel) -> str:
    return json.dumps(model_to_dict(m), indent=2) + "\n"


def fixture_path(name: str) -> Path:
    fname = FIXTURES.get(name, name)
    return Path(str(resources.files("conekit") / "fixtures" / fname))


def load_fixture(name: str) -> LinkageModel:
    return parse_model(fixture_path(name))
