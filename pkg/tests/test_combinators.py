"""Behaviour tables and trace generation.

Expected counts below were derived by hand from the branch-table grammar
before the generators were written:

* canonical traces at max depth 2 over the five core behaviours:
  1 (seq, blind) + 2 (cond) + 3 (linrec: base + depths 1,2)
  + 2 (treerec) + 3 (stack-map) = 11
* noise segments: one per (branch, post-initial bit pattern), so a branch
  with k calls contributes 2**k patterns; seq is blind (1 total), giving
  1, 6, 10, 33, 18 for the five cores
* full enumerated set: 16 branch variants (8 argument subsequences, with
  and without terminal self) squared, minus 8 divergent identical-recursive
  pairs, minus the empty behaviour = 247
"""

from itertools import product

import pytest
from hypothesis import given
from hypothesis import strategies as st

from cnpi import combinators as cb

ALL_SPECS = list(cb.SPECS.values()) + cb.enumerate_full_set()


def test_core_branch_tables():
    assert cb.SPECS["seq"].branches == ((1, 2, 3), (1, 2, 3))
    assert cb.SPECS["cond"].branches == ((1, 2), (3,))
    assert cb.SPECS["linrec"].branches == ((1, 2, 0), (3,))
    assert cb.SPECS["treerec"].branches == ((1, 5, 2, 4, 3), ())
    assert cb.SPECS["_mapself"].branches == ((8, 7, 0, 4), (7,))
    assert cb.SPECS["treerec"].active == 9
    assert cb.SPECS["_mapself"].active == 9
    assert cb.SPECS["seq"].active == 4


def test_canonical_trace_count_is_eleven():
    n = sum(len(cb.canonical_traces(s, 2)) for s in cb.SPECS.values())
    assert n == 11


def test_canonical_trace_counts_per_core():
    expect = {"seq": 1, "cond": 2, "linrec": 3, "treerec": 2, "_mapself": 3}
    for name, spec in cb.SPECS.items():
        assert len(cb.canonical_traces(spec, 2)) == expect[name]


def test_noise_segment_counts():
    expect = {"seq": 1, "cond": 6, "linrec": 10, "treerec": 33, "_mapself": 18}
    for name, spec in cb.SPECS.items():
        assert len(cb.noise_segments(spec)) == expect[name]


def test_full_set_size_and_uniqueness():
    specs = cb.enumerate_full_set()
    assert len(specs) == 247
    assert len({s.name for s in specs}) == 247
    assert len({s.branches for s in specs}) == 247
    for s in specs:
        assert s.branches[0] or s.branches[1]          # empty behaviour excluded
        if s.branches[0] == s.branches[1]:
            assert s.blind
            assert s.branches[0][-1] != cb.SLOT_SELF   # divergent diagonal excluded


def test_full_set_branch_grammar():
    for s in cb.enumerate_full_set():
        for br in s.branches:
            body = br[:-1] if br and br[-1] == cb.SLOT_SELF else br
            assert all(c in (1, 2, 3) for c in body)
            assert list(body) == sorted(set(body), key=list((1, 2, 3)).index)


def test_segment_shape_pure_return():
    seg = cb.branch_segment(cb.SPECS["treerec"], 1)
    assert len(seg.steps) == 1
    assert seg.steps[0] == cb.TraceStep(1, 1, None)


@given(st.sampled_from(ALL_SPECS), st.sampled_from((0, 1)))
def test_segment_invariants(spec, b):
    seg = cb.branch_segment(spec, b)
    calls = spec.branches[b]
    assert len(seg.steps) == len(calls) + 1
    assert seg.conds[0] == b
    for step, slot in zip(seg.steps, calls):
        assert step.ret == 0 and step.slot == slot
    last = seg.steps[-1]
    assert last.ret == 1 and last.slot is None


@given(st.sampled_from(ALL_SPECS))
def test_noise_segments_commit_to_first_bit(spec):
    segs = cb.noise_segments(spec)
    assert len(segs) == len(set(segs))
    for seg in segs:
        ref = cb.branch_segment(spec, seg.branch)
        assert [s.slot for s in seg.steps] == [s.slot for s in ref.steps]
        assert [s.ret for s in seg.steps] == [s.ret for s in ref.steps]
        assert seg.conds[0] == seg.branch


@given(st.sampled_from(ALL_SPECS), st.integers(min_value=0, max_value=4))
def test_canonical_traces_end_without_chain(spec, depth):
    for tr in cb.canonical_traces(spec, depth):
        *body, last = tr.segments
        assert not spec.branch_chains(last.branch)
        for seg in body:
            assert spec.branch_chains(seg.branch)


def test_chaining_detection():
    assert cb.SPECS["linrec"].branch_chains(0)
    assert not cb.SPECS["linrec"].branch_chains(1)
    assert cb.SPECS["_mapself"].branch_chains(0)   # terminal slot-4 call
    assert not cb.SPECS["treerec"].branch_chains(0)  # slot 4 calls another prog
    assert not cb.SPECS["seq"].branch_chains(0)


def test_both_recursive_pairs_have_segments_but_no_finite_traces():
    both = [s for s in cb.enumerate_full_set()
            if s.branch_chains(0) and s.branch_chains(1)]
    assert len(both) == 56          # 8 recursive variants squared, off-diagonal
    for s in both:
        assert cb.canonical_traces(s, 3) == []
        assert len(cb.canonical_segments(s)) == 2


def test_blind_behaviours_only_emit_branch_zero():
    seq = cb.SPECS["seq"]
    assert cb.active_branches(seq) == (0,)
    segs = cb.canonical_segments(seq)
    assert len(segs) == 1 and segs[0].branch == 0
    assert all(c == 0 for c in segs[0].conds)


def test_branch_segment_cond_override_validation():
    spec = cb.SPECS["cond"]
    seg = cb.branch_segment(spec, 0, (0, 1, 1))
    assert seg.conds == (0, 1, 1)
    with pytest.raises(ValueError):
        cb.branch_segment(spec, 0, (1, 0, 0))   # first bit must match branch
    with pytest.raises(ValueError):
        cb.branch_segment(spec, 0, (0, 0))      # wrong length


def test_total_canonical_segments_full_set():
    specs = cb.enumerate_full_set()
    total = sum(len(cb.canonical_segments(s)) for s in specs)
    # 7 blind singletons + 240 branched pairs
    assert total == 7 + 2 * 240
