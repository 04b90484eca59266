from pathlib import Path

import pytest

from noetic import parse_domain, parse_formula, validate_domain

ROOMS_PATH = Path(__file__).resolve().parent.parent / "domains" / "rooms.dom"


@pytest.fixture(scope="session")
def rooms_text() -> str:
    return ROOMS_PATH.read_text()


@pytest.fixture(scope="session")
def rooms(rooms_text):
    spec = parse_domain(rooms_text)
    assert validate_domain(spec).ok
    return spec


def fml(text, spec=None):
    return parse_formula(text, spec.fluents if spec is not None else None)
