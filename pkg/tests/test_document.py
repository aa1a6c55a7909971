import json

import numpy as np
import pytest

from povm_coarse import document as dm
from povm_coarse import fixtures
from povm_coarse import instruments as ins
from povm_coarse import measures as ms
from povm_coarse import quantum as qm
from povm_coarse import sampling
from povm_coarse.errors import NameNotFound, ParseError, ValidationError


def _arrays(obj):
    if isinstance(obj, qm.State):
        return [obj.matrix]
    if isinstance(obj, qm.Observable):
        return [obj.effects]
    if isinstance(obj, ms.StochasticMatrix):
        return [obj.entries]
    if isinstance(obj, ins.Instrument):
        return [k for op in obj.ops for k in op.kraus]
    if isinstance(obj, qm.DynamicalSystem):
        return [obj.hamiltonian, obj.initial, np.array(obj.times)]
    return [obj]


@pytest.mark.parametrize("name", fixtures.names())
def test_fixture_round_trip(name):
    doc = dm.load(fixtures.path(name))
    assert all(err is None for _, _, err in dm.validate(doc))
    for entity in doc.names():
        obj = doc.get(entity)
        entry = dm.encode_entity(obj)
        again = dm.decode_entity(entity, json.loads(json.dumps(entry)), doc.dim)
        for x, y in zip(_arrays(obj), _arrays(again)):
            assert np.abs(np.asarray(x) - np.asarray(y)).max() <= 1e-15
        assert dm.encode_entity(again) == entry


def test_shipped_fixtures_match_their_builder():
    built = fixtures.build()
    assert sorted(built) == sorted(fixtures.names())
    for name, doc in built.items():
        assert json.loads(doc.dumps()) == json.loads(fixtures.path(name).read_text())


def test_random_entities_round_trip_exactly(rng):
    doc = dm.document_of(
        3,
        rho=sampling.state(rng, 3),
        A=sampling.observable(rng, 3, 4),
        I=sampling.instrument(rng, 3, 2),
        U=sampling.unitary(rng, 3),
    )
    doc.put("K", sampling.stochastic(rng, ms.OutcomeSpace.range(4), ms.OutcomeSpace.range(2)))
    back = dm.loads(doc.dumps())
    for name in doc.names():
        for x, y in zip(_arrays(doc.get(name)), _arrays(back.get(name))):
            np.testing.assert_array_equal(x, y)


def test_pure_state_vector_form():
    doc = dm.loads('{"dim": 2, "entities": {"v": {"type": "state", "vector": [[0, 0], [1, 0]]}}}')
    np.testing.assert_array_equal(doc.get("v", "state").matrix, np.diag([0, 1]))


@pytest.mark.parametrize(
    "text",
    [
        "not json",
        "[]",
        '{"entities": {}}',
        '{"dim": 0, "entities": {}}',
        '{"dim": 2, "entities": []}',
        '{"dim": 2, "entities": {"x": {"type": "banana"}}}',
    ],
)
def test_parse_errors(text):
    with pytest.raises(ParseError):
        dm.loads(text)


def test_missing_field_and_bad_shape():
    doc = dm.loads('{"dim": 2, "entities": {"s": {"type": "state"}, "t": {"type": "state", "matrix": [1, 2]}}}')
    with pytest.raises(ParseError, match="missing field"):
        doc.get("s")
    with pytest.raises(ParseError):
        doc.get("t")


def test_invalid_entities_are_named():
    bad = {"type": "observable", "outcomes": ["0", "1"], "effects": [dm.encode_matrix(np.eye(2) / 2)] * 2}
    bad["effects"][1] = dm.encode_matrix(np.eye(2) / 3)
    doc = dm.parse_document({"dim": 2, "entities": {"B": bad}})
    with pytest.raises(ValidationError, match="'B'"):
        doc.get("B")
    results = dm.validate(doc)
    assert results[0][0] == "B" and "sum - I" in results[0][2]


def test_dimension_mismatch_and_lookup():
    doc = dm.document_of(2, rho=qm.State.maximally_mixed(2))
    doc.dim = 3
    with pytest.raises(ValidationError, match="dimension"):
        doc.get("rho")
    with pytest.raises(NameNotFound):
        doc.get("nope")
    doc.dim = 2
    with pytest.raises(ValidationError, match="not a observable"):
        doc.get("rho", "observable")


def test_load_missing_file(tmp_path):
    with pytest.raises(ParseError):
        dm.load(tmp_path / "absent.json")
