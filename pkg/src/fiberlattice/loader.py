"""JSON interchange for fiber configurations."""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Any

import jsonschema

from .errors import InvariantError, ParseError, SchemaError
from .lattice_core import CurveClass, FiberConfiguration

SCHEMA_VERSION = 1

CONFIG_SCHEMA: dict[str, Any] = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": ["schema_version", "characteristic", "curves", "edges", "is_full_fiber"],
    "additionalProperties": False,
    "properties": {
        "schema_version": {"const": SCHEMA_VERSION},
        "name": {"type": "string"},
        "characteristic": {"type": "integer", "minimum": 0},
        "is_full_fiber": {"type": "boolean"},
        "curves": {
            "type": "array",
            "minItems": 1,
            "items": {
                "type": "object",
                "required": ["id", "field_degree", "self_int", "canonical_deg", "multiplicity"],
                "additionalProperties": False,
                "properties": {
                    "id": {"type": "integer", "minimum": 0},
                    "field_degree": {"type": "integer", "minimum": 1},
                    "self_int": {"type": "integer"},
                    "canonical_deg": {"type": "integer"},
                    "multiplicity": {"type": "integer", "minimum": 1},
                },
            },
        },
        "edges": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["a", "b", "intersection"],
                "additionalProperties": False,
                "properties": {
                    "a": {"type": "integer", "minimum": 0},
                    "b": {"type": "integer", "minimum": 0},
                    "intersection": {"type": "integer", "minimum": 1},
                },
            },
        },
    },
}


@dataclass(frozen=True)
class ConfigDocument:
    schema_version: int
    characteristic: int
    curves: list[dict]
    edges: list[dict]
    is_full_fiber: bool
    name: str = ""

    @classmethod
    def from_dict(cls, data: dict) -> "ConfigDocument":
        try:
            jsonschema.validate(data, CONFIG_SCHEMA)
        except jsonschema.ValidationError as exc:
            where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
            raise SchemaError(f"schema violation at {where}: {exc.message}") from None
        return cls(
            data["schema_version"],
            data["characteristic"],
            data["curves"],
            data["edges"],
            data["is_full_fiber"],
            data.get("name", ""),
        )

    def to_dict(self) -> dict:
        out = {
            "schema_version": self.schema_version,
            "characteristic": self.characteristic,
            "is_full_fiber": self.is_full_fiber,
            "curves": self.curves,
            "edges": self.edges,
        }
        if self.name:
            out["name"] = self.name
        return out

    def build(self) -> FiberConfiguration:
        problems = []
        ids = [c["id"] for c in self.curves]
        if sorted(ids) != list(range(len(ids))):
            problems.append(f"curve ids {ids} are not unique and dense from 0")
        curves = []
        for c in sorted(self.curves, key=lambda c: c["id"]):
            try:
                curves.append(
                    CurveClass(c["id"], c["field_degree"], c["self_int"], c["canonical_deg"], c["multiplicity"])
                )
            except InvariantError as exc:
                problems.append(str(exc))
        seen = set()
        for k, e in enumerate(self.edges):
            a, b = e["a"], e["b"]
            if a >= len(ids) or b >= len(ids):
                problems.append(f"edge {k} ({a},{b}) references a missing curve")
            if a == b:
                problems.append(f"edge {k} ({a},{b}) is a self-loop")
            pair = (min(a, b), max(a, b))
            if pair in seen:
                problems.append(f"edge {k} ({a},{b}) duplicates an earlier edge")
            seen.add(pair)
        if problems:
            raise InvariantError("; ".join(problems))
        edges = [(e["a"], e["b"], e["intersection"]) for e in self.edges]
        return FiberConfiguration.from_graph(curves, edges, self.characteristic, self.is_full_fiber, self.name)


def document_from_config(cfg: FiberConfiguration) -> ConfigDocument:
    curves = [
        {
            "id": c.id,
            "field_degree": c.field_degree,
            "self_int": c.self_int,
            "canonical_deg": c.canonical_deg,
            "multiplicity": c.multiplicity,
        }
        for c in cfg.curves
    ]
    edges = [
        {"a": i, "b": j, "intersection": cfg.pairing[i][j]}
        for i in range(cfg.size)
        for j in range(i + 1, cfg.size)
        if cfg.pairing[i][j]
    ]
    return ConfigDocument(SCHEMA_VERSION, cfg.characteristic, curves, edges, cfg.is_full_fiber, cfg.name)


def loads(text: str) -> FiberConfiguration:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"parse error: {exc}") from None
    return ConfigDocument.from_dict(data).build()


def load(path: str | Path) -> FiberConfiguration:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc.strerror}") from None
    return loads(text)


def dumps(cfg: FiberConfiguration) -> str:
    return json.dumps(document_from_config(cfg).to_dict(), indent=2)


def dump(cfg: FiberConfiguration, path: str | Path) -> None:
    Path(path).write_text(dumps(cfg) + "\n")
