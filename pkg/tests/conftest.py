import json
from pathlib import Path

import pytest

from roiwrap import RoiSpec, build_page

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture(scope="session")
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture(scope="session")
def a_source() -> str:
    return (FIXTURES / "a.html").read_text(encoding="utf-8")


@pytest.fixture(scope="session")
def a_bundle(a_source):
    return build_page(a_source, source_ref=str(FIXTURES / "a.html"))


@pytest.fixture(scope="session")
def a_roi() -> RoiSpec:
    doc = json.loads((FIXTURES / "a.roi.json").read_text(encoding="utf-8"))
    return RoiSpec.from_json_dict(doc)


@pytest.fixture(scope="session")
def b_bundle():
    source = (FIXTURES / "b.html").read_text(encoding="utf-8")
    return build_page(source, source_ref=str(FIXTURES / "b.html"))


@pytest.fixture(scope="session")
def b_expected() -> dict:
    return json.loads((FIXTURES / "b.expected.json").read_text(encoding="utf-8"))


@pytest.fixture()
def store(tmp_path) -> Path:
    d = tmp_path / "store"
    d.mkdir()
    return d
