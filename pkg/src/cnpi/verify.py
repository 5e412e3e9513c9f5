"""Verification of trained cores.

Three layers, from abstract to concrete:

* segment verification: greedy decisions reproduce every training segment
  bit for bit (this is the property new registrations must not break)
* margin probe: the same check under a tiny parameter perturbation, so a
  pass is a region, not a knife's edge
* behavioural equivalence: the neural backend and the symbolic tables
  produce identical call traces and identical environment outcomes on real
  program executions
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import nnkernel as nk
from .interpreter import (ExecResult, Limits, NeuralBackend, SymbolicBackend,
                          format_trace, run)
from .memory import Memory
from .training import SegmentTask, greedy_segment_ok


@dataclass
class VerifyReport:
    total: int
    failures: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures

    @property
    def accuracy(self) -> float:
        return 1.0 - len(self.failures) / self.total if self.total else 1.0

    def summary(self) -> str:
        state = "PASS" if self.ok else "FAIL"
        return f"{state} {self.total - len(self.failures)}/{self.total}"


def verify_segments(params: nk.CoreParams, embs: dict[str, np.ndarray],
                    tasks: list[SegmentTask]) -> VerifyReport:
    rep = VerifyReport(len(tasks))
    for t in tasks:
        if not greedy_segment_ok(params, embs[t.emb_name], t):
            rep.failures.append(f"{t.emb_name} conds={t.conds}")
    return rep


def verify_with_margin(params: nk.CoreParams, embs: dict[str, np.ndarray],
                       tasks: list[SegmentTask], scale: float = 1e-6,
                       probes: int = 3, seed: int = 0) -> VerifyReport:
    """Re-verify under small random parameter perturbations."""
    rng = np.random.default_rng(seed)
    rep = verify_segments(params, embs, tasks)
    for k in range(probes):
        p = params.copy()
        flat = p.flat()
        p.set_flat(flat + rng.normal(scale=scale, size=flat.shape))
        probe = verify_segments(p, embs, tasks)
        for f in probe.failures:
            rep.failures.append(f"probe{k}: {f}")
    rep.total *= (probes + 1)
    return rep


@dataclass
class BehaviouralCase:
    """One program execution compared across backends."""

    prog: str
    sym: ExecResult
    neu: ExecResult
    trace_equal: bool
    outcome_equal: bool

    @property
    def ok(self) -> bool:
        return (self.sym.ok and self.neu.ok and self.trace_equal
                and self.outcome_equal)


def env_fingerprint(env) -> tuple:
    """Observable outcome of a run: array, pointers, stacks, output."""
    fp = []
    for attr in ("a", "out", "stack", "colors", "visit", "p1", "p2", "p3",
                 "plo", "phi", "ppivot", "pj", "v", "childptr"):
        if hasattr(env, attr):
            val = getattr(env, attr)
            fp.append((attr, tuple(val) if isinstance(val, list) else val))
    return tuple(fp)


def behavioural_case(mem: Memory, params: nk.CoreParams, prog: str,
                     make_env, limits: Limits | None = None) -> BehaviouralCase:
    limits = limits or Limits(top_steps=5000, total_steps=500000)
    env_s, env_n = make_env(), make_env()
    sym = run(mem, mem.prog(prog), env_s, SymbolicBackend(), limits)
    neu = run(mem, mem.prog(prog), env_n, NeuralBackend(params), limits)
    return BehaviouralCase(
        prog, sym, neu,
        trace_equal=format_trace(sym.events) == format_trace(neu.events),
        outcome_equal=env_fingerprint(env_s) == env_fingerprint(env_n))


def verify_behaviour(mem: Memory, params: nk.CoreParams,
                     cases: list[tuple[str, object]]) -> VerifyReport:
    """``cases``: (program name, env factory) pairs."""
    rep = VerifyReport(len(cases))
    for prog, make_env in cases:
        c = behavioural_case(mem, params, prog, make_env)
        if not c.ok:
            why = []
            if not c.sym.ok:
                why.append(f"sym:{c.sym.abort}")
            if not c.neu.ok:
                why.append(f"neu:{c.neu.abort}")
            if not c.trace_equal:
                why.append("trace")
            if not c.outcome_equal:
                why.append("outcome")
            rep.failures.append(f"{prog}: {','.join(why)}")
    return rep
