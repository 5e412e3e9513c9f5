"""Environment primitives and exact detectors."""

import numpy as np
import pytest

from cnpi.envs import END, SENTINEL, DagEnv, ListEnv, QuicksortEnv
from cnpi.envs.listenv import OK, symbol_index


def test_reads_and_end():
    e = ListEnv([3, 1, 2])
    assert e.read(0) == 3
    assert e.read(-1) == END
    assert e.read(3) == END


def test_pointer_clamping():
    e = ListEnv([1, 2])
    e.act("P1_LEFT")
    e.act("P1_LEFT")
    assert e.p1 == -1          # parks one step outside
    for _ in range(5):
        e.act("P2_RIGHT")
    assert e.p2 == 2


def test_out_advances_p3_but_ok_does_not():
    e = ListEnv([7, 8])
    e.act("OUT_1")
    assert e.out == [7] and e.p3 == 1
    e.act("OUT_OK")
    assert e.out == [7, OK] and e.p3 == 1


def test_outclear_and_clear():
    e = ListEnv([5, 6], p1=0, p2=1)
    e.act("OUTCLEAR_1")
    assert e.a == [-1, 6] and e.out == [5]
    e.act("CLEAR_2")
    assert e.a == [-1, -1]


def test_swap_is_noop_when_either_side_is_end():
    e = ListEnv([5, 6], p1=-1, p2=0)
    e.act("SWAP_12")
    assert e.a == [5, 6]
    e.p1, e.p2 = 0, 1
    e.act("SWAP_12")
    assert e.a == [6, 5]


def test_stack_builtins():
    e = ListEnv([1, 2], p1=1, p2=0)
    e.act("_push_sentinel")
    e.act("_push")
    e.p1, e.p2 = 0, 1
    e.act("_load_state")
    assert (e.p1, e.p2) == (1, 0)
    assert e.eval_predicate("top!=SENTINEL?") == 0
    e.act("_pop")
    assert e.eval_predicate("top!=SENTINEL?") == 1   # sentinel on top
    e.act("_pop")
    assert e.eval_predicate("top!=SENTINEL?") == 1   # empty
    e.act("_pop")                                     # no-op on empty
    e.act("_load_state")                              # no-op on empty
    assert e.stack == []


def test_compare_predicate_with_end_and_cleared():
    e = ListEnv([3, 1], p1=0, p2=1)
    assert e.eval_predicate("A[P1]>A[P2]?") == 0      # 3 > 1 holds
    e.p2 = 5
    assert e.eval_predicate("A[P1]>A[P2]?") == 1      # END never compares
    e.p1, e.p2 = 5, 0
    assert e.eval_predicate("A[P1]>A[P2]?") == 1
    e2 = ListEnv([0, -1], p1=0, p2=1)
    assert e2.eval_predicate("A[P1]>A[P2]?") == 0     # 0 > -1 numerically


def test_end_predicates_and_pointer_equality():
    e = ListEnv([1], p1=0, p2=1, p3=0)
    assert e.eval_predicate("A[P1]!=END?") == 0
    assert e.eval_predicate("A[P2]!=END?") == 1
    assert e.eval_predicate("A[P3]!=END?") == 0
    assert e.eval_predicate("P1!=P2?") == 0
    e.p2 = 0
    assert e.eval_predicate("P1!=P2?") == 1


def test_observation_encoding():
    e = ListEnv([-1, 9], p1=0, p2=1)
    obs = e.observe("pair12")
    assert obs.shape == (24,)
    assert obs[0] == 1.0            # -1 is symbol 0
    assert obs[12 + 10] == 1.0      # digit 9 is symbol 10
    e.p2 = 7
    obs = e.observe("pair12")
    assert obs[12 + 11] == 1.0      # END is symbol 11
    assert symbol_index(0) == 1


def test_unknown_names_raise():
    e = ListEnv([1])
    with pytest.raises(ValueError):
        e.act("FLY")
    with pytest.raises(ValueError):
        e.eval_predicate("MOON?")
    with pytest.raises(ValueError):
        e.observe("stars")


def test_clone_is_independent():
    e = ListEnv([1, 2])
    c = e.clone()
    c.act("OUT_1")
    c.act("_push")
    assert e.out == [] and e.stack == []


def test_quicksort_push_modes():
    q = QuicksortEnv([4, 5, 6, 7], lo=0)
    q.ppivot = 2
    q.act("_push", (1, 0, 0))
    q.act("_push", (2, 0, 0))
    q.act("_push", (0, 0, 0))
    assert q.stack == [(0, 1), (3, 3), (0, 3)]
    q.act("_load_state")
    assert (q.plo, q.phi) == (0, 3)
    q.act("_push_sentinel")
    assert q.eval_predicate("top!=SENTINEL?") == 1


def test_quicksort_actions_and_predicates():
    q = QuicksortEnv([2, 9, 1], lo=0)
    assert q.eval_predicate("Plo<Phi?") == 0
    q.act("SET_PIVOT_LO")
    q.act("SET_J_LO")
    assert (q.ppivot, q.pj) == (0, 0)
    assert q.eval_predicate("A[Pj]<=A[Phi]?") == 1    # 2 <= 1 fails
    q.act("PJ_RIGHT")
    q.act("PJ_RIGHT")
    assert q.eval_predicate("Pj!=Phi?") == 1
    q.act("SWAP_PIVOTHI")
    assert q.a == [1, 9, 2]
    q.act("SET_J_NULL")
    assert q.pj == -1
    assert q.eval_predicate("A[Pj]<=A[Phi]?") == 1    # END is incomparable
    lone = QuicksortEnv([5], lo=0)
    assert lone.eval_predicate("Plo<Phi?") == 1


def test_dag_actions_and_predicates():
    d = DagEnv([[1, 2], [], []], root=0)
    assert d.eval_predicate("V_IS_WHITE?") == 0
    d.act("COLOR_GREY")
    assert d.visit == [0] and d.colors[0] == "grey"
    assert d.eval_predicate("HAS_CHILD?") == 0
    d.act("ACTIVATE_CHILD")
    assert d.v == 1
    d.act("CHILD_UP")
    d.act("ACTIVATE_CHILD")
    assert d.v == 2
    d.act("CHILD_UP")
    assert d.eval_predicate("HAS_CHILD?") == 1
    d.act("COLOR_BLACK")
    d.act("OUT_RESULT")
    assert d.out == [0] and d.visit == []
    assert d.colors[0] == "black"


def test_dag_state_stack_saves_register():
    d = DagEnv([[1], []], root=0)
    d.act("_push_sentinel")
    d.act("_push")
    d.v = 1
    d.act("_load_state")
    assert d.v == 0
    d.act("_pop")
    assert d.stack == [SENTINEL]


def test_dag_visit_ops_are_total_on_empty_stack():
    d = DagEnv([[]], root=0)
    d.act("ACTIVATE_CHILD")
    d.act("CHILD_UP")
    d.act("COLOR_BLACK")
    d.act("OUT_RESULT")
    assert d.out == [] and d.v == 0
