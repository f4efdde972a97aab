import json
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from distqc.bench import gen_random_cz_circuit
from distqc.circuit import (
    Circuit,
    Placement,
    cx,
    cz,
    extract_commodities,
    fanin,
    fanout,
    meas,
    validate_layers,
    yhalf,
)
from distqc.flow import iterative_greedy, metrics
from distqc.netmodel import gen_rect_low


class TestGate:
    def test_operands_distinct(self):
        with pytest.raises(ValueError):
            cx(1, 1)

    def test_fanin_needs_target(self):
        with pytest.raises(ValueError):
            fanin(0, [])

    def test_roles(self):
        g = fanin(2, [0, 5])
        assert g.controls() == (2,) and g.targets() == (0, 5)
        h = fanout(3, [1, 4])
        assert h.targets() == (3,) and h.controls() == (1, 4)

    def test_diagonal(self):
        assert cz(0, 1).is_diagonal()
        assert fanin(0, [1], basis="Z").is_diagonal()
        assert not cx(0, 1).is_diagonal()


class TestValidateLayers:
    def test_shared_qubit_in_layer(self):
        c = Circuit.from_layers(4, [[cz(0, 1), cz(1, 2)]])
        v = validate_layers(c)
        assert v is not None and v.layer == 0

    def test_empty_circuit_ok(self):
        assert validate_layers(Circuit.from_layers(3, [])) is None

    def test_duplicate_bit(self):
        c = Circuit.from_layers(2, [[meas(0, "Z", 7)], [meas(1, "Z", 7)]])
        v = validate_layers(c)
        assert v is not None and "bit" in v.reason

    def test_random_generator_layers_valid(self):
        rng = random.Random(3)
        c = gen_random_cz_circuit(49, 1024, rng)
        assert len(c.all_gates()) == 1024
        assert validate_layers(c) is None


class TestExtractCommodities:
    def test_cz_only_prec_empty(self):
        rng = random.Random(0)
        c = gen_random_cz_circuit(9, 40, rng)
        cs = extract_commodities(c, Placement.identity(9))
        assert cs.prec == frozenset()

    def test_conflict_pair(self):
        # CX(q1,q2) then CZ(q2,q3) on three processors: ordered and
        # quasi-parallel under the default predicate (shared qubit is the
        # CX target and a CZ operand).
        c = Circuit.from_layers(3, [[cx(0, 1)], [cz(1, 2)]])
        cs = extract_commodities(c, Placement.identity(3))
        assert cs.k == 2
        assert cs.prec == frozenset({(0, 1)})
        assert cs.quasi_parallel(0, 1)

    def test_control_shared_not_quasi_parallel(self):
        c = Circuit.from_layers(3, [[cx(1, 0)], [cz(1, 2)]])
        cs = extract_commodities(c, Placement.identity(3))
        assert cs.prec == frozenset({(0, 1)})
        assert not cs.quasi_parallel(0, 1)

    def test_single_processor_no_commodities(self):
        c = Circuit.from_layers(4, [[cx(0, 1)], [cz(2, 3)]])
        cs = extract_commodities(c, Placement(tuple([0] * 4)))
        assert cs.k == 0

    def test_fanin_one_commodity_per_remote_processor(self):
        c = Circuit.from_layers(5, [[fanin(0, [1, 2, 3, 4])]])
        place = Placement((0, 1, 1, 2, 0))
        cs = extract_commodities(c, place)
        assert cs.k == 2
        assert {c.target for c in cs.commodities} == {1, 2}
        by_target = {c.target: c.target_qubits for c in cs.commodities}
        assert by_target == {1: (1, 2), 2: (3,)}

    def test_deterministic_order(self):
        rng = random.Random(5)
        c = gen_random_cz_circuit(12, 30, rng)
        p = Placement.identity(12)
        a = extract_commodities(c, p)
        b = extract_commodities(c, p)
        assert a == b
        keys = [(com.layer, min(com.gate.qubits)) for com in a.commodities]
        assert keys == sorted(keys)

    def test_prec_respects_layers(self):
        rng = random.Random(6)
        layers = []
        for _ in range(8):
            a, b = rng.sample(range(6), 2)
            layers.append([rng.choice([cx, cz])(a, b)])
        c = Circuit.from_layers(6, layers)
        cs = extract_commodities(c, Placement.identity(6))
        for j, i in cs.prec:
            assert cs.commodities[j].layer < cs.commodities[i].layer

    def test_cz_only_schedule_ignores_prec(self):
        # with no order constraints, forcibly clearing prec changes nothing
        rng = random.Random(7)
        c = gen_random_cz_circuit(9, 24, rng)
        g = gen_rect_low(3)
        cs = extract_commodities(c, Placement.identity(9))
        stripped = type(cs)(cs.commodities, frozenset(), frozenset())
        a = iterative_greedy(g, cs)
        b = iterative_greedy(g, stripped)
        assert metrics(a) == metrics(b)

    def test_pluggable_predicate(self):
        c = Circuit.from_layers(3, [[cx(0, 1)], [cz(1, 2)]])
        cs = extract_commodities(
            c, Placement.identity(3), qpar_predicate=lambda a, b, q: False
        )
        assert cs.qpar == frozenset()


class TestSerialization:
    def test_circuit_roundtrip(self):
        c = Circuit.from_layers(
            5, [[cx(0, 3), cz(1, 2)], [fanin(0, [1, 4])], [yhalf(2)]]
        )
        doc = json.loads(json.dumps(c.to_json()))
        assert Circuit.from_json(doc) == c

    def test_circuit_json_shape(self):
        c = Circuit.from_layers(4, [[cx(0, 3)]])
        assert c.to_json() == {"qubits": 4, "layers": [[{"kind": "cx", "q": [0, 3]}]]}

    def test_placement_roundtrip(self):
        p = Placement((0, 2, 1))
        assert Placement.from_json(json.loads(json.dumps(p.to_json()))) == p


@settings(max_examples=60, deadline=None)
@given(st.integers(2, 10), st.integers(0, 60), st.integers(0, 2**31))
def test_generated_circuits_always_layer_valid(n, k, seed):
    c = gen_random_cz_circuit(n, k, random.Random(seed))
    assert validate_layers(c) is None
    assert len(c.all_gates()) == k
