"""Verification layers: segments, margin probes, behavioural equivalence."""

import numpy as np
import pytest

from cnpi import nnkernel as nk
from cnpi.combinators import SPECS
from cnpi.envs import ListEnv
from cnpi.programs import LIST_ACTS, LIST_DETS, bootstrap, library_sort
from cnpi.training import SLConfig, build_tasks, train_sl
from cnpi.verify import (VerifyReport, verify_behaviour, verify_segments,
                         verify_with_margin)

CORES = list(SPECS.values())


@pytest.fixture(scope="module")
def trained():
    """Memory + core trained on the five behaviours' noise segments."""
    rng = np.random.default_rng(3)
    mem = bootstrap(16, rng, LIST_ACTS, LIST_DETS)
    library_sort(mem, rng)
    params = nk.init_params(16, "state0", rng)
    embs = {name: mem.prog(name).embedding for name in SPECS}
    tasks = build_tasks(CORES, "noise", balance=True)
    res = train_sl(params, embs, tasks, SLConfig(max_epochs=400))
    assert res.reached_target, "fixture core failed to train"
    return mem, params, tasks, embs


def test_verify_segments_pass(trained):
    _, params, tasks, embs = trained
    rep = verify_segments(params, embs, tasks)
    assert rep.ok
    assert rep.accuracy == 1.0
    assert rep.summary() == f"PASS {len(tasks)}/{len(tasks)}"


def test_verify_margin_pass(trained):
    _, params, tasks, embs = trained
    rep = verify_with_margin(params, embs, tasks, scale=1e-6, probes=3)
    assert rep.ok
    assert rep.total == 4 * len(tasks)


def test_verify_catches_corruption(trained):
    _, params, tasks, embs = trained
    bad = params.copy()
    bad.slot_w = bad.slot_w + np.random.default_rng(0).normal(
        scale=3.0, size=bad.slot_w.shape)
    rep = verify_segments(bad, embs, tasks)
    assert not rep.ok
    assert rep.summary().startswith("FAIL")
    assert 0.0 <= rep.accuracy < 1.0


def test_report_empty_is_pass():
    rep = VerifyReport(0)
    assert rep.ok and rep.accuracy == 1.0


def test_behavioural_equivalence_sort(trained):
    mem, params, _, _ = trained
    cases = [
        ("SORT", lambda: ListEnv([3, 1, 2])),
        ("SORT", lambda: ListEnv([5])),
        ("SORT", lambda: ListEnv([])),
        ("SORT", lambda: ListEnv([2, 2, 1, 9, 0])),
        ("MAX", lambda: ListEnv([4, 8, 1])),
    ]
    rep = verify_behaviour(mem, params, cases)
    assert rep.ok, rep.failures


def test_behavioural_mismatch_reported(trained):
    mem, params, _, _ = trained
    bad = params.copy()
    bad.end_w = bad.end_w * 0.0  # return decisions collapse to coin flips
    rep = verify_behaviour(mem, bad, [("SORT", lambda: ListEnv([3, 1, 2]))])
    assert not rep.ok
