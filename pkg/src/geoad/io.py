"""JSON serialization of instances and plans.

Instance document::

    {"lambdas": [...],
     "advertisers": [{"reward": r, "qualities": {"<nodeId>": q, ...}}, ...],
     "paths": [{"gamma": g, "nodes": [vertexId, ...]}, ...]}

Node ids are the breadth-first ids the tree builder assigns, so a document
round-trips exactly.  Plans serialize as ``{"<nodeId>": adIndex}``.
"""
from __future__ import annotations

import json
from pathlib import Path as FsPath

import jsonschema

from .model import Advertiser, FatigueModel, Instance, Plan
from .tree import Path, build_tree

INSTANCE_SCHEMA = {
    "type": "object",
    "required": ["lambdas", "advertisers", "paths"],
    "properties": {
        "lambdas": {"type": "array", "items": {"type": "number", "minimum": 0, "maximum": 1}},
        "advertisers": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["reward", "qualities"],
                "properties": {
                    "reward": {"type": "number", "minimum": 0},
                    "qualities": {
                        "type": "object",
                        "patternProperties": {
                            "^[0-9]+$": {"type": "number", "minimum": 0, "maximum": 1}
                        },
                        "additionalProperties": False,
                    },
                },
            },
        },
        "paths": {
            "type": "array",
            "minItems": 1,
            "items": {
                "type": "object",
                "required": ["gamma", "nodes"],
                "properties": {
                    "gamma": {"type": "number", "exclusiveMinimum": 0, "maximum": 1},
                    "nodes": {"type": "array", "minItems": 1,
                              "items": {"type": ["integer", "string"]}},
                },
            },
        },
    },
}


def instance_to_dict(instance: Instance) -> dict:
    return {
        "lambdas": list(instance.fatigue.lambdas),
        "advertisers": [
            {
                "reward": adv.reward,
                "qualities": {str(n): q for n, q in sorted(adv.qualities.items())},
            }
            for adv in instance.advertisers
        ],
        "paths": [{"gamma": p.gamma, "nodes": list(p.vertices)} for p in instance.tree.vertex_paths()],
    }


def instance_from_dict(doc: dict) -> Instance:
    jsonschema.validate(doc, INSTANCE_SCHEMA)
    tree = build_tree([Path(p["gamma"], p["nodes"]) for p in doc["paths"]])
    advs = tuple(
        Advertiser(float(a["reward"]), {int(n): float(q) for n, q in a["qualities"].items()})
        for a in doc["advertisers"]
    )
    return Instance(advs, FatigueModel(doc["lambdas"]), tree)


def dumps_instance(instance: Instance) -> str:
    return json.dumps(instance_to_dict(instance), indent=1, sort_keys=True)


def loads_instance(text: str) -> Instance:
    return instance_from_dict(json.loads(text))


def save_instance(instance: Instance, path) -> None:
    FsPath(path).write_text(dumps_instance(instance) + "\n")


def load_instance(path) -> Instance:
    return loads_instance(FsPath(path).read_text())


def plan_to_dict(plan: Plan) -> dict[str, int]:
    return {str(n): a for n, a in plan.items()}


def plan_from_dict(doc: dict) -> Plan:
    return Plan({int(n): int(a) for n, a in doc.items()})
