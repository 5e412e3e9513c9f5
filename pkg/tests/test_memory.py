"""Program/detector memory: registration, addressing, forking."""

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from cnpi import memory as mem


def make_memory(n_progs=5, seed=0):
    rng = np.random.default_rng(seed)
    m = mem.Memory()
    for i in range(n_progs):
        m.register_program(f"p{i}", "act", mem.random_unit_key(rng))
    m.register_detector("_blind?", mem.random_unit_key(rng), mem.BlindModel())
    return m, rng


def test_ids_are_dense_and_ordered():
    m, _ = make_memory(4)
    assert [p.id for p in m.programs] == [0, 1, 2, 3]
    assert m.prog("p2").id == 2


def test_exact_key_lookup_roundtrip():
    m, _ = make_memory(8)
    for p in m.programs:
        assert m.lookup_program(p.key).id == p.id


def test_lookup_tie_breaks_to_lowest_id():
    m = mem.Memory()
    key = np.ones(mem.D_KEY) / np.sqrt(mem.D_KEY)
    m.register_program("a", "act", key)
    m.register_program("b", "act", key.copy())
    assert m.lookup_program(key).name == "a"


def test_duplicate_names_rejected():
    m, rng = make_memory(1)
    with pytest.raises(ValueError):
        m.register_program("p0", "act", mem.random_unit_key(rng))
    with pytest.raises(ValueError):
        m.register_detector("_blind?", mem.random_unit_key(rng), mem.BlindModel())


def test_kind_payload_contracts():
    m, rng = make_memory(0)
    with pytest.raises(ValueError):
        m.register_program("c", "combinator", mem.random_unit_key(rng))
    with pytest.raises(ValueError):
        m.register_program("a", "applier", mem.random_unit_key(rng))
    with pytest.raises(ValueError):
        m.register_program("x", "nonsense", mem.random_unit_key(rng))
    e = m.register_program("c", "combinator", mem.random_unit_key(rng),
                           embedding=np.zeros(16))
    assert e.kind == "combinator"


def test_fork_isolates_registration_but_shares_entries():
    m, rng = make_memory(2)
    f = m.fork()
    f.register_program("candidate", "act", mem.random_unit_key(rng))
    assert f.has_prog("candidate")
    assert not m.has_prog("candidate")
    assert f.prog("p0") is m.prog("p0")   # shared entry objects


def test_detector_models():
    class FakeEnv:
        def eval_predicate(self, name):
            assert name == "probe?"
            return 1

        def observe(self, name):
            assert name == "pair"
            return np.array([1.0, -1.0])

    env = FakeEnv()
    assert mem.BlindModel().prob(env) == 0.0
    assert mem.BuiltinModel("probe?").prob(env) == 1.0
    lin = mem.LinearModel("pair", np.array([2.0, 0.0]), -1.0)
    assert abs(lin.prob(env) - mem.sigmoid(1.0)) < 1e-12
    assert mem.detector_bit(mem.BlindModel(), env) == 0
    assert mem.detector_bit(mem.BuiltinModel("probe?"), env) == 1
    assert mem.detector_bit(lin, env) == 1   # sigmoid(1.0) > 0.5


@given(st.integers(min_value=1, max_value=40), st.integers(min_value=0, max_value=5))
def test_random_unit_keys_resolve_exactly(n, seed):
    rng = np.random.default_rng(seed)
    m = mem.Memory()
    for i in range(n):
        m.register_program(f"p{i}", "act", mem.random_unit_key(rng))
    for p in m.programs:
        assert m.lookup_program(p.key).id == p.id


def test_empty_memory_lookup_raises():
    m = mem.Memory()
    with pytest.raises(LookupError):
        m.lookup_program(np.zeros(mem.D_KEY))
