"""Bundled JSON schemas and validation against them."""

from __future__ import annotations

import json
from functools import lru_cache
from importlib import resources

import jsonschema
from referencing import Registry, Resource

SCHEMA_NAMES = ("map", "cohom_class", "degree_vector", "matrix", "scenario", "report")


def load_schema(name: str) -> dict:
    if name not in SCHEMA_NAMES:
        raise ValueError(f"unknown schema {name!r}")
    path = resources.files("projdyn") / "data" / "schemas" / f"{name}.schema.json"
    return json.loads(path.read_text())


@lru_cache(maxsize=None)
def _validator(name: str):
    registry = Registry().with_resources(
        (load_schema(n)["$id"], Resource.from_contents(load_schema(n))) for n in SCHEMA_NAMES
    )
    schema = load_schema(name)
    cls = jsonschema.validators.validator_for(schema)
    return cls(schema, registry=registry)


def validate(document, name: str) -> None:
    """Raise jsonschema.ValidationError if ``document`` does not match schema ``name``."""
    _validator(name).validate(document)
