"""Model and trace files: JSON models, JSON traces and a small XES subset."""

from __future__ import annotations

import json
import xml.etree.ElementTree as ET
from importlib import resources
from pathlib import Path
from typing import Any, Union

import jsonschema

from .data import NATURAL, DataModel, Domain, sorted_values
from .frozen import value_key
from .errors import (
    DawnetError, FormatError, GuardSyntaxError, IoError, SchemaError, UnknownVariable, ValidationErrors,
)
from .guards import parse_guard, pretty
from .model import DELETE, DawNet, Delete, ExplicitSet, IntInterval
from .net import Observability, PetriNet, WfNetMeta
from .trace import Event, Trace

SCHEMA_VERSION = "dawnet/1"
PathLike = Union[str, Path]


def _schema(name: str) -> dict:
    return json.loads(resources.files("dawnet.schemas").joinpath(name).read_text())


def _read(path: PathLike) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise IoError(f"{path}: {exc.strerror or exc}") from exc


def _load_json(text: str, path: PathLike) -> Any:
    if not text.strip():
        raise SchemaError(f"{path}: empty file")
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: invalid JSON at line {exc.lineno}: {exc.msg}") from exc


def _validate_schema(doc: Any, schema: dict, path: PathLike, exc_type=SchemaError) -> None:
    validator = jsonschema.Draft202012Validator(schema)
    errors = sorted(validator.iter_errors(doc), key=lambda e: list(e.absolute_path))
    if errors:
        e = errors[0]
        where = "/" + "/".join(str(p) for p in e.absolute_path)
        raise exc_type(f"{path}: {where}: {e.message}")


def model_from_dict(doc: dict, source: str = "<model>") -> DawNet:
    """Build a validated DawNet from a decoded model document."""
    if isinstance(doc, dict) and "schema" in doc and doc["schema"] != SCHEMA_VERSION:
        raise SchemaError(f"{source}: unsupported schema version {doc['schema']!r}")
    _validate_schema(doc, _schema("model.schema.json"), source)
    diags: list = []

    def fail(loc: str, msg: str) -> None:
        diags.append((loc, msg))

    domains = {}
    for name, spec in doc.get("domains", {}).items():
        loc = f"/domains/{name}"
        order = spec.get("order")
        if isinstance(order, list):
            order = frozenset(tuple(p) for p in order)
        try:
            if "values" in spec:
                domains[name] = Domain(name, frozenset(spec["values"]), order=order)
            else:
                domains[name] = Domain(name, lo=spec.get("lo"), hi=spec.get("hi"), order=order)
        except DawnetError as exc:
            fail(loc, str(exc))
    dm = {}
    for var, dname in doc.get("variables", {}).items():
        if dname not in domains:
            fail(f"/variables/{var}", f"undeclared domain {dname!r}")
        else:
            dm[var] = dname
    try:
        data = DataModel(domains, dm)
    except DawnetError as exc:
        fail("/variables", str(exc))
        raise ValidationErrors(diags) from None

    places = doc["places"]
    seen: set = set()
    for i, p in enumerate(places):
        if p in seen:
            fail(f"/places/{i}", f"duplicate place {p!r}")
        seen.add(p)
    tids, wr, gd, obs = [], {}, {}, {}
    for i, tr in enumerate(doc["transitions"]):
        loc = f"/transitions/{i}"
        t = tr["id"]
        if t in seen:
            fail(f"{loc}/id", f"duplicate identifier {t!r}")
        seen.add(t)
        tids.append(t)
        if "guard" in tr:
            try:
                gd[t] = parse_guard(tr["guard"], data)
            except (GuardSyntaxError, UnknownVariable) as exc:
                fail(f"{loc}/guard", str(exc))
        if "observability" in tr:
            obs[t] = Observability(tr["observability"])
        spec = {}
        for v, ws in tr.get("writes", {}).items():
            wloc = f"{loc}/writes/{v}"
            if v not in dm:
                fail(wloc, f"undeclared variable {v!r}")
                continue
            dom = data.domain_of(v)
            if isinstance(ws, dict):
                if ws["lo"] > ws["hi"]:
                    fail(wloc, f"empty interval [{ws['lo']}, {ws['hi']}]")
                    continue
                spec[v] = IntInterval(ws["lo"], ws["hi"])
                bad = [x for x in (ws["lo"], ws["hi"]) if x not in dom]
            else:
                spec[v] = ExplicitSet(frozenset(ws))
                bad = [x for x in ws if x not in dom]
            if bad:
                fail(wloc, f"values {bad} outside domain {dom.name!r}")
                spec.pop(v)
        for j, v in enumerate(tr.get("deletes", [])):
            if v not in dm:
                fail(f"{loc}/deletes/{j}", f"undeclared variable {v!r}")
            elif v in spec:
                fail(f"{loc}/deletes/{j}", f"{v!r} is both written and deleted")
            else:
                spec[v] = DELETE
        wr[t] = spec
    arcs = []
    for i, (a, b) in enumerate(doc["arcs"]):
        if a not in seen or b not in seen:
            fail(f"/arcs/{i}", f"arc ({a!r}, {b!r}) references an unknown node")
        elif (a in places) == (b in places):
            fail(f"/arcs/{i}", f"arc ({a!r}, {b!r}) does not connect a place and a transition")
        else:
            arcs.append((a, b))
    for key in ("start", "end"):
        if doc[key] not in places:
            fail(f"/{key}", f"{doc[key]!r} is not a declared place")
    for key in ("start_t", "end_t"):
        if doc.get(key) is not None and doc[key] not in tids:
            fail(f"/{key}", f"{doc[key]!r} is not a declared transition")
    if diags:
        raise ValidationErrors(diags)
    try:
        net = PetriNet(frozenset(places), frozenset(tids), frozenset(arcs))
        meta = WfNetMeta(doc["start"], doc["end"], obs, doc.get("start_t"), doc.get("end_t"))
        return DawNet(net, meta, data, wr, gd, doc.get("name", "model"))
    except DawnetError as exc:
        raise ValidationErrors([("/", str(exc))]) from exc


def parse_model(path: PathLike) -> DawNet:
    doc = _load_json(_read(path), path)
    return model_from_dict(doc, str(path))


def model_to_dict(w: DawNet) -> dict:
    """Inverse of :func:`model_from_dict` for validated nets."""
    domains = {}
    for name in sorted(w.data.domains):
        d = w.data.domains[name]
        spec: dict = {}
        if d.values is not None:
            spec["values"] = sorted_values(d.values)
        else:
            spec["lo"], spec["hi"] = d.lo, d.hi
        if d.order == NATURAL:
            spec["order"] = NATURAL
        elif d.order is not None:
            pairs = sorted(d.order, key=lambda p: (value_key(p[0]), value_key(p[1])))
            spec["order"] = [list(p) for p in pairs if p[0] != p[1]]
        domains[name] = spec
    transitions = []
    for t in sorted(w.net.transitions):
        entry: dict = {"id": t}
        g = w.gd[t]
        entry["guard"] = pretty(g)
        entry["observability"] = w.meta.observability_of(t).value
        writes, deletes = {}, []
        for v in sorted(w.wr[t]):
            ws = w.wr[t][v]
            if isinstance(ws, Delete):
                deletes.append(v)
            elif isinstance(ws, IntInterval):
                writes[v] = {"lo": ws.lo, "hi": ws.hi}
            else:
                writes[v] = list(ws)
        if writes:
            entry["writes"] = writes
        if deletes:
            entry["deletes"] = deletes
        transitions.append(entry)
    return {
        "schema": SCHEMA_VERSION,
        "name": w.name,
        "domains": domains,
        "variables": {v: w.data.dm[v] for v in sorted(w.data.dm)},
        "places": sorted(w.net.places),
        "transitions": transitions,
        "arcs": [list(a) for a in sorted(w.net.arcs)],
        "start": w.meta.start,
        "end": w.meta.end,
        "start_t": w.meta.start_t,
        "end_t": w.meta.end_t,
    }


def serialize_model(w: DawNet) -> str:
    return json.dumps(model_to_dict(w), indent=2) + "\n"


def write_model(w: DawNet, path: PathLike) -> None:
    Path(path).write_text(serialize_model(w), encoding="utf-8")


# traces -------------------------------------------------------------------

def trace_from_list(doc: Any, source: str = "<trace>") -> Trace:
    _validate_schema(doc, _schema("trace.schema.json"), source, FormatError)
    events = []
    for i, e in enumerate(doc):
        try:
            events.append(Event(e["t"], e.get("w", {}), frozenset(e.get("d", []))))
        except ValueError as exc:
            raise FormatError(f"{source}: /{i}: {exc}") from exc
    return Trace(tuple(events))


def trace_to_list(trace: Trace) -> list:
    out = []
    for e in trace:
        item: dict = {"t": e.transition}
        if e.writes:
            item["w"] = dict(e.writes.items_sorted())
        if e.deletes:
            item["d"] = sorted(e.deletes)
        out.append(item)
    return out


_IGNORED_PREFIXES = ("lifecycle:", "time:", "org:")
DELETE_KEY = "dawnet:delete"


def _local(tag: str) -> str:
    return tag.rsplit("}", 1)[-1]


def _parse_xes(text: str, source: str, index: int) -> Trace:
    try:
        root = ET.fromstring(text)
    except ET.ParseError as exc:
        raise FormatError(f"{source}: malformed XML: {exc}") from exc
    traces = [el for el in root.iter() if _local(el.tag) == "trace"]
    if _local(root.tag) == "trace":
        traces = [root]
    if not traces:
        raise FormatError(f"{source}: no <trace> element")
    if not 0 <= index < len(traces):
        raise FormatError(f"{source}: trace index {index} out of range ({len(traces)} traces)")
    events = []
    for k, ev in enumerate(el for el in traces[index] if _local(el.tag) == "event"):
        name, writes, deletes = None, {}, set()
        for attr in ev:
            kind = _local(attr.tag)
            key, raw = attr.get("key"), attr.get("value")
            if key is None or raw is None:
                raise FormatError(f"{source}: event {k}: attribute without key/value")
            if key == "concept:name":
                name = raw
            elif key == DELETE_KEY:
                deletes.update(x.strip() for x in raw.split(",") if x.strip())
            elif key.startswith(_IGNORED_PREFIXES):
                continue
            elif kind == "int":
                try:
                    writes[key] = int(raw)
                except ValueError:
                    raise FormatError(f"{source}: event {k}: {key} is not an integer") from None
            elif kind == "string":
                writes[key] = raw
            else:
                raise FormatError(f"{source}: event {k}: unsupported attribute type <{kind}>")
        if name is None:
            raise FormatError(f"{source}: event {k} has no concept:name")
        try:
            events.append(Event(name, writes, frozenset(deletes)))
        except ValueError as exc:
            raise FormatError(f"{source}: event {k}: {exc}") from exc
    return Trace(tuple(events))


def parse_trace(path: PathLike, format: str = "auto", index: int = 0) -> Trace:
    """Read a JSON or XES trace. ``format`` is ``json``, ``xes`` or ``auto`` (by suffix)."""
    text = _read(path)
    fmt = format.lower()
    if fmt == "auto":
        fmt = "xes" if str(path).lower().endswith(".xes") else "json"
    if fmt == "xes":
        return _parse_xes(text, str(path), index)
    if fmt != "json":
        raise FormatError(f"unknown trace format {format!r}")
    if not text.strip():
        raise FormatError(f"{path}: empty file")
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: invalid JSON at line {exc.lineno}: {exc.msg}") from exc
    return trace_from_list(doc, str(path))


def bundled(name: str) -> Path:
    """Path of a file shipped in ``dawnet/models``."""
    return Path(str(resources.files("dawnet.models").joinpath(name)))
