import json
import sys
from importlib import resources

import pytest
from jsonschema import Draft202012Validator
from referencing import Registry, Resource

SCHEMA_FILES = ("expr.schema.json", "envelope.schema.json", "golden-report.schema.json")


def _load(name):
    return json.loads(resources.files("surreal_calc").joinpath("schemas", name).read_text())


def _registry():
    resources_ = []
    for name in SCHEMA_FILES:
        schema = _load(name)
        res = Resource.from_contents(schema)
        resources_ += [(name, res), (schema["$id"], res)]
    return Registry().with_resources(resources_)


def validator(name):
    schema = _load(name)
    Draft202012Validator.check_schema(schema)
    return Draft202012Validator(schema, registry=_registry())


@pytest.fixture(scope="session")
def expr_validator():
    return validator("expr.schema.json")


@pytest.fixture(scope="session")
def envelope_validator():
    return validator("envelope.schema.json")


@pytest.fixture(scope="session")
def report_validator():
    return validator("golden-report.schema.json")


def pytest_terminal_summary(terminalreporter):
    lines = [line for name, mod in list(sys.modules.items())
             if name.endswith("test_acceptance") for line in getattr(mod, "RESULTS", [])]
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
