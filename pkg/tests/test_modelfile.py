import copy
import json

import pytest

from conekit.exact import Q
from conekit.modelfile import ModelFileError, fixture_path, model_from_dict, model_to_dict, parse_model, serialize_model

SCREWS = {
    1: "1 0 0 0 0 0", 2: "0 1 0 0 0 0", 3: "0 0 1 0 0 0", 4: "0 0 0 0 1 0", 5: "0 1 0 0 0 0",
    6: "0 0 0 0 1 0", 7: "0 1 0 0 0 1", 8: "0 1 0 -1 0 1", 9: "1 0 0 0 1 0", 10: "0 1 0 -1 0 0",
    11: "0 0 1 0 0 0", 12: "0 0 0 1 0 0", 13: "0 0 0 0 1 0", 14: "0 0 1 -1 0 0", 15: "0 0 0 0 1 0",
    16: "0 1 0 -1/2 0 0", 17: "0 1 0 -1/2 1 0", 18: "0 0 1 1 1 0", 19: "0 0 0 0 1 0", 20: "0 1 0 -1 0 0",
}


@pytest.fixture
def doc():
    return json.loads(fixture_path("fayet_wohlhart").read_text())


def test_fixture_screw_table(fayet):
    assert fayet.n == 20 and fayet.gamma == 3
    for j in fayet.joints:
        assert j.screw == tuple(Q(v) for v in SCREWS[j.id].split())


def test_round_trip(fayet, tmp_path):
    path = tmp_path / "m.json"
    path.write_text(serialize_model(fayet))
    again = parse_model(path)
    assert model_to_dict(again) == model_to_dict(fayet)


def _code(d):
    with pytest.raises(ModelFileError) as err:
        model_from_dict(d)
    return err.value.code


def test_screw_length(doc):
    doc["joints"][0]["screw"] = doc["joints"][0]["screw"][:5]
    assert _code(doc) == "screw-length"


def test_duplicate_joint_id(doc):
    doc["joints"][7]["id"] = doc["joints"][6]["id"]
    assert _code(doc) == "duplicate-joint-id"


def test_malformed_rational(doc):
    doc["joints"][2]["screw"][0] = "1/x"
    assert _code(doc) == "malformed-rational"


def test_unreferenced_vertex(doc):
    doc["links"].append("orphan")
    assert _code(doc) == "unreferenced-vertex"
    bad = copy.deepcopy(doc)
    bad["links"].remove("orphan")
    bad["joints"][0]["target"] = "nowhere"
    assert _code(bad) == "unreferenced-vertex"


def test_non_closing_loop(doc):
    doc["loops"][0] = doc["loops"][0][:-1]
    assert _code(doc) == "non-closing-loop"


def test_schema_version(doc):
    doc["schema_version"] = 2
    assert _code(doc) == "schema-version"


def test_float_literal_rejected(doc, tmp_path):
    text = json.dumps(doc).replace('"schema_version": 1', '"schema_version": 1, "scale": 0.5')
    path = tmp_path / "f.json"
    path.write_text(text)
    with pytest.raises(ModelFileError) as err:
        parse_model(path)
    assert err.value.code == "float-forbidden"


def test_loops_computed_when_absent(doc):
    del doc["loops"]
    m = model_from_dict(doc)
    assert m.gamma == 3
