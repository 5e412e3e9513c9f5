"""Symbolic execution of the program library.

These are the semantic oracles for the whole stack: the behaviour tables
driven over real environments must implement the algorithms the programs
claim to be.  Expected outputs are computed by plain Python (sorted, DFS
post-order), never by the interpreter itself.
"""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cnpi import interpreter as itp
from cnpi import programs as pg
from cnpi.envs import DagEnv, ListEnv, QuicksortEnv
from cnpi.envs.listenv import OK


def sort_memory(variant="swap_advance"):
    rng = np.random.default_rng(0)
    m = pg.bootstrap(4, rng)
    pg.library_sort(m, rng, step_variant=variant)
    pg.library_aux_tasks(m, rng)
    return m


def qs_memory():
    rng = np.random.default_rng(0)
    m = pg.bootstrap(4, rng, acts=pg.QS_ACTS, dets=pg.QS_DETS)
    pg.library_quicksort(m, rng)
    return m


def dag_memory():
    rng = np.random.default_rng(0)
    m = pg.bootstrap(4, rng, acts=pg.DAG_ACTS, dets=pg.DAG_DETS)
    pg.library_traverse(m, rng)
    return m


def run_sym(m, prog, env, limits=None):
    return itp.run(m, m.prog(prog), env, itp.SymbolicBackend(),
                   limits or itp.Limits(top_steps=2000, total_steps=200000))


# -- descending sort -----------------------------------------------------------

@pytest.mark.parametrize("variant", ["swap_advance", "track_max"])
def test_sort_small_array(variant):
    m = sort_memory(variant)
    env = ListEnv([3, 1, 2], p1=-1, p2=0, p3=0)
    res = run_sym(m, "SORT", env)
    assert res.ok
    assert env.out == [3, 2, 1]


@pytest.mark.parametrize("variant", ["swap_advance", "track_max"])
@pytest.mark.parametrize("a", [[], [5], [2, 2], [0, 9, 4, 4, 7]])
def test_sort_edge_cases(variant, a):
    m = sort_memory(variant)
    env = ListEnv(a, p1=-1, p2=0, p3=0)
    res = run_sym(m, "SORT", env)
    assert res.ok
    assert env.out == sorted(a, reverse=True)


@settings(max_examples=30, deadline=None)
@given(st.lists(st.integers(min_value=0, max_value=9), max_size=7))
def test_sort_random_arrays(a):
    m = sort_memory()
    env = ListEnv(a, p1=-1, p2=0, p3=0)
    res = run_sym(m, "SORT", env)
    assert res.ok
    assert env.out == sorted(a, reverse=True)


def test_max_pass_outputs_maximum_once():
    m = sort_memory()
    env = ListEnv([4, 8, 2], p1=-1, p2=0, p3=0)
    res = run_sym(m, "MAX", env)
    assert res.ok
    assert env.out == [8]
    assert env.a.count(-1) == 1


# -- reference task programs ---------------------------------------------------

def test_seq_task_program():
    m = sort_memory()
    env = ListEnv([3, 7], p1=0, p2=1)
    assert run_sym(m, "SEQ_TASK", env).ok
    assert env.out == [3, 3]
    assert env.a == [7, 3]


def test_cond_task_program_both_sides():
    m = sort_memory()
    env = ListEnv([6], p1=0, p2=0)
    assert run_sym(m, "COND_TASK", env).ok
    assert env.out == [6] and env.a == [-1]
    env = ListEnv([6], p1=0, p2=1)
    assert run_sym(m, "COND_TASK", env).ok
    assert env.out == [OK] and env.a == [6]


@pytest.mark.parametrize("a", [[4], [4, 9], [1, 2, 3, 4, 5]])
def test_copy_task_program(a):
    m = sort_memory()
    env = ListEnv(a, p1=0, p2=0)
    assert run_sym(m, "COPY_TASK", env).ok
    assert env.out == a + [OK]


# -- quicksort (tree recursion + stack map) ------------------------------------

def test_quicksort_small():
    m = qs_memory()
    env = QuicksortEnv([3, 1, 2])
    res = run_sym(m, "QSORT", env)
    assert res.ok
    assert env.a == [1, 2, 3]
    assert env.stack == []       # every sentinel popped


@pytest.mark.parametrize("a", [[], [5], [2, 1], [2, 2, 2], [9, 8, 7, 6, 5],
                               [5, 1, 4, 1, 5, 9, 2, 6]])
def test_quicksort_edge_cases(a):
    m = qs_memory()
    env = QuicksortEnv(a)
    res = run_sym(m, "QSORT", env)
    assert res.ok
    assert env.a == sorted(a)


@settings(max_examples=30, deadline=None)
@given(st.lists(st.integers(min_value=0, max_value=9), max_size=8))
def test_quicksort_random_arrays(a):
    m = qs_memory()
    env = QuicksortEnv(a)
    res = run_sym(m, "QSORT", env)
    assert res.ok
    assert env.a == sorted(a)
    assert env.stack == []


# -- DAG traversal --------------------------------------------------------------

def reachable(adj, root):
    seen, stack = set(), [root]
    while stack:
        u = stack.pop()
        if u in seen:
            continue
        seen.add(u)
        stack.extend(adj[u])
    return seen


def test_traverse_diamond():
    m = dag_memory()
    env = DagEnv([[1, 2], [3], [3], []], root=0)
    res = run_sym(m, "TRAVERSE", env)
    assert res.ok
    assert env.out == [3, 2, 1, 0]
    assert env.stack == []


def test_traverse_chain_and_lone_node():
    m = dag_memory()
    env = DagEnv([[1], [2], []], root=0)
    assert run_sym(m, "TRAVERSE", env).ok
    assert env.out == [2, 1, 0]
    env = DagEnv([[]], root=0)
    assert run_sym(m, "TRAVERSE", env).ok
    assert env.out == [0]


@st.composite
def dags(draw):
    n = draw(st.integers(min_value=1, max_value=7))
    adj = []
    for u in range(n):
        later = list(range(u + 1, n))
        adj.append(draw(st.lists(st.sampled_from(later), unique=True,
                                 max_size=len(later))) if later else [])
    return adj


@settings(max_examples=30, deadline=None)
@given(dags())
def test_traverse_random_dags_postorder(adj):
    m = dag_memory()
    env = DagEnv(adj, root=0)
    res = run_sym(m, "TRAVERSE", env)
    assert res.ok
    want = reachable(adj, 0)
    assert sorted(env.out) == sorted(want)           # each reachable node once
    pos = {v: i for i, v in enumerate(env.out)}
    for u in want:
        for v in adj[u]:
            assert pos[v] < pos[u]                   # children finish first


# -- runner mechanics ------------------------------------------------------------

def test_step_budget_aborts_divergence():
    m = sort_memory()
    env = ListEnv([1, 2], p1=2, p2=0)     # P1 right of P2: catch-up never ends
    res = itp.run(m, m.prog("MOVE_12"), env, itp.SymbolicBackend(),
                  itp.Limits(top_steps=50, total_steps=50))
    assert not res.ok
    assert res.abort == "total_step_limit"


def test_top_step_budget_counts_only_depth_zero():
    m = sort_memory()
    env = ListEnv([3, 1, 2], p1=-1, p2=0, p3=0)
    res = run_sym(m, "SORT", env)
    # the outermost invocation decides: call MAX, call RESET, call self,
    # return -- the self call recurses at depth 1, so top stays at 4
    assert res.top_steps == 4
    top = [e for e in res.events if e.depth == 0]
    assert [e.callee for e in top] == ["MAX", "RESET", "SORT", None]
    assert res.total_steps > res.top_steps


def test_trace_replay_is_byte_identical():
    m = sort_memory()
    runs = []
    for _ in range(2):
        env = ListEnv([3, 1, 2], p1=-1, p2=0, p3=0)
        res = run_sym(m, "SORT", env)
        runs.append(itp.format_trace(res.events))
    assert runs[0] == runs[1]
    assert runs[0].count("\n") == len(res.events)


def test_act_entry_and_act_applier_dispatch():
    m = qs_memory()
    env = QuicksortEnv([4, 5, 6, 7])
    env.ppivot = 2
    res = itp.run(m, m.prog("SAVE_LEFT"), env, itp.SymbolicBackend())
    assert res.ok and res.total_steps == 0
    assert env.stack == [(0, 1)]
    res = itp.run(m, m.prog("NOP"), env, itp.SymbolicBackend())
    assert res.ok and env.stack == [(0, 1)]


def test_top_level_combinator_rejected():
    m = sort_memory()
    with pytest.raises(ValueError):
        itp.run(m, m.prog("seq"), ListEnv([1]), itp.SymbolicBackend())


def test_frame_layout():
    m = sort_memory()
    from cnpi.applier import parse_applier
    entry = m.prog("SORT")
    fr = itp.frame_for(m, entry, parse_applier(m, entry.composition))
    names = [m.programs[i].name for i in fr.slots]
    assert names == ["SORT", "MAX", "RESET", "NOP", "_mapself",
                     "_push_sentinel", "_push", "_pop", "_load_state"]
    assert m.detectors[fr.det_id].name == "A[P3]!=END?"


def test_untrained_neural_backend_runs_and_terminates():
    m = sort_memory()
    env = ListEnv([2, 1], p1=-1, p2=0, p3=0)
    backend = itp.NeuralBackend(_fresh_params(m))
    res = itp.run(m, m.prog("SORT"), env, backend,
                  itp.Limits(top_steps=20, total_steps=200))
    assert res.returned or res.abort in ("top_step_limit", "total_step_limit")


def test_sampling_backend_records_episode():
    m = sort_memory()
    env = ListEnv([2, 1], p1=0, p2=1)
    rec = itp.EpisodeRecord()
    backend = itp.NeuralBackend(_fresh_params(m), sample=True,
                                rng=np.random.default_rng(0), recorder=rec)
    itp.run(m, m.prog("SEQ_TASK"), env, backend,
            itp.Limits(top_steps=10, total_steps=50))
    assert rec.invocations
    inv = rec.invocations[0]
    assert inv.prog == "seq"
    assert len(inv.decisions) == len(inv.tape)


def _fresh_params(m):
    from cnpi import nnkernel as nk
    hidden = m.prog("seq").embedding.shape[0]
    return nk.init_params(hidden, "state0", np.random.default_rng(5))
