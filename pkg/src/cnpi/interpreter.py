"""Program execution.

``run`` drives one program against an environment.  Control flow is decided
by a pluggable backend: the symbolic backend replays the behaviour tables
(ground truth), the neural backend asks the core (greedy thresholds for
evaluation, sampled decisions for reinforcement episodes).  Everything else
is identical between backends, so call traces are directly comparable.

Execution of an applier builds a frame: nine program ids (the applier
itself in the self slot, its three arguments, then the five built-ins) plus
the applier's detector.  Calling a slot resolves the id's kind:

* action: one environment primitive, no decisions
* applier: parse, fresh frame, run its target combinator
* combinator: run it in the CURRENT frame (this is how the stack-map and
  the self slot work); a behaviour with an own-detector reads that built-in
  for its own condition bits while callees keep the frame's detector

Each invocation starts the core from fresh state; a condition bit is read
before every decision; the return flag is checked before the slot choice,
so a branch may return without calling anything.  Budgets cut runaways:
one for top-level decisions (reward bookkeeping) and one for decisions at
any depth (safety).
"""

from __future__ import annotations

import sys
from dataclasses import dataclass, field
from typing import Protocol

import numpy as np

from . import nnkernel as nk
from .applier import ParsedApplier, parse_applier
from .combinators import SPECS, CombinatorSpec
from .memory import BETA, DetectorEntry, Memory, ProgramEntry


@dataclass(frozen=True)
class Frame:
    slots: tuple[int, ...]    # nine program ids
    det_id: int


BUILTIN_SLOT_PROGS = ("_mapself", "_push_sentinel", "_push", "_pop",
                      "_load_state")


def frame_for(mem: Memory, applier_entry: ProgramEntry,
              parsed: ParsedApplier) -> Frame:
    slots = (applier_entry.id,) + tuple(a.id for a in parsed.prog_args)
    slots += tuple(mem.prog(n).id for n in BUILTIN_SLOT_PROGS)
    return Frame(slots, parsed.detector.id)


@dataclass
class Limits:
    top_steps: int = 200
    total_steps: int = 20000
    frame_steps: int = 10**9   # decisions one invocation may make before abort


@dataclass(frozen=True)
class CallEvent:
    """One decision, for trace comparison and replay."""

    t: int
    depth: int
    prog: str
    cond: int
    ret: int
    slot: int | None
    callee: str | None

    def line(self) -> str:
        callee = self.callee if self.callee is not None else "-"
        slot = self.slot if self.slot is not None else "-"
        return f"{self.t}\t{self.depth}\t{self.prog}\t{self.cond}\t{self.ret}\t{slot}\t{callee}"


def format_trace(events: list[CallEvent]) -> str:
    return "\n".join(e.line() for e in events) + "\n"


@dataclass
class ExecResult:
    returned: bool
    abort: str | None
    top_steps: int
    total_steps: int
    events: list[CallEvent]
    completed: bool = False   # a `stop` predicate ended the run early

    @property
    def ok(self) -> bool:
        return self.returned and self.abort is None


class _Abort(Exception):
    def __init__(self, reason: str):
        self.reason = reason


class _Complete(Exception):
    """Raised when the caller's stop predicate fires mid-run."""


# -- backends ----------------------------------------------------------------

class Backend(Protocol):
    def begin(self, entry: ProgramEntry, spec: CombinatorSpec): ...
    def decide(self, inv, cond: int) -> tuple[bool, int | None]: ...


@dataclass
class _SymInvocation:
    spec: CombinatorSpec
    branch: int | None = None
    pos: int = 0


class SymbolicBackend:
    """Replays the behaviour tables exactly; the branch is committed by the
    first condition bit, later bits are ignored."""

    def begin(self, entry: ProgramEntry, spec: CombinatorSpec) -> _SymInvocation:
        return _SymInvocation(spec)

    def decide(self, inv: _SymInvocation, cond: int) -> tuple[bool, int | None]:
        if inv.branch is None:
            inv.branch = cond
        calls = inv.spec.branches[inv.branch]
        if inv.pos >= len(calls):
            return True, None
        slot = calls[inv.pos]
        inv.pos += 1
        return False, slot


@dataclass
class DetSample:
    det: DetectorEntry
    obs: np.ndarray
    bit: int
    p: float


@dataclass
class InvRecord:
    prog: str
    tape: nk.Tape
    decisions: list[tuple[int | None, int]] = field(default_factory=list)


@dataclass
class EpisodeRecord:
    invocations: list[InvRecord] = field(default_factory=list)
    det_samples: list[DetSample] = field(default_factory=list)


@dataclass
class _NeuralInvocation:
    emb: np.ndarray
    active: int
    state: nk.CoreState
    tape: nk.Tape | None
    record: InvRecord | None


class NeuralBackend:
    """Decisions come from the core.  ``sample=False`` thresholds the return
    flag and argmaxes the slot scores; ``sample=True`` draws both, recording
    tapes and taken decisions for reinforcement updates.

    ``sample_returns=False`` gives the reinforcement-episode regime: only
    slot choices are sampled and the invocation never returns on its own —
    the episode ends through the runner's stop predicate or the step budget,
    and correct return flags are imputed afterwards (``final_return``).

    ``explore`` mixes a uniform draw over the active slots into the sampling
    policy.  Softmax sampling alone stops exploring once a decision
    saturates, which freezes half-correct policies whose repair needs a
    specific unlikely slot; the mixture keeps every slot's probability
    bounded away from zero during training.
    """

    def __init__(self, params: nk.CoreParams, sample: bool = False,
                 rng: np.random.Generator | None = None,
                 recorder: EpisodeRecord | None = None,
                 sample_returns: bool = True, explore: float = 0.0):
        if sample and rng is None:
            raise ValueError("sampling backend needs an rng")
        self.params = params
        self.sample = sample
        self.rng = rng
        self.recorder = recorder
        self.sample_returns = sample_returns
        self.explore = explore

    def begin(self, entry: ProgramEntry, spec: CombinatorSpec) -> _NeuralInvocation:
        emb = entry.embedding
        if emb is None:
            raise ValueError(f"program {entry.name!r} has no embedding")
        tape = record = None
        if self.recorder is not None:
            tape = nk.Tape(emb=emb, active=spec.active)
            record = InvRecord(entry.name, tape)
            self.recorder.invocations.append(record)
        return _NeuralInvocation(emb, spec.active,
                                 nk.init_state(self.params, emb), tape, record)

    def decide(self, inv: _NeuralInvocation, cond: int) -> tuple[bool, int | None]:
        inv.state, r, scores = nk.step(self.params, inv.state, cond, inv.emb,
                                       inv.tape)
        if not self.sample:
            ret = r >= nk.ALPHA
        elif self.sample_returns:
            ret = bool(self.rng.random() < r)
        else:
            ret = False
        slot = None
        if not ret:
            if self.sample:
                p = nk.masked_softmax(scores, inv.active)
                if self.explore > 0.0:
                    p = (1.0 - self.explore) * p
                    p[:inv.active] += self.explore / inv.active
                slot = int(self.rng.choice(len(p), p=p))
            else:
                slot = nk.argmax_slot(scores, inv.active)
        if inv.record is not None:
            inv.record.decisions.append((slot, int(ret)))
        return ret, slot

    def final_return(self, inv: _NeuralInvocation, cond: int) -> None:
        """Record one supervised step with a return target (task done)."""
        inv.state, _, _ = nk.step(self.params, inv.state, cond, inv.emb,
                                  inv.tape)
        if inv.record is not None:
            inv.record.decisions.append((None, 1))


# -- the runner ---------------------------------------------------------------

@dataclass
class _Run:
    mem: Memory
    env: object
    backend: Backend
    limits: Limits
    sample_conds: bool
    rng: np.random.Generator | None
    recorder: EpisodeRecord | None
    stop: object = None       # optional env predicate ending the run early
    events: list[CallEvent] = field(default_factory=list)
    top_steps: int = 0
    total_steps: int = 0
    comb_stack: list = field(default_factory=list)   # active (invocation, detector)

    def condition_bit(self, det: DetectorEntry) -> int:
        from .memory import LinearModel
        p = det.model.prob(self.env)
        if self.sample_conds and isinstance(det.model, LinearModel):
            bit = int(self.rng.random() < p)
            if self.recorder is not None:
                obs = self.env.observe(det.model.obs)
                self.recorder.det_samples.append(DetSample(det, obs, bit, p))
            return bit
        return int(p >= BETA)

    def charge(self, depth: int) -> None:
        if depth == 0:
            if self.top_steps >= self.limits.top_steps:
                raise _Abort("top_step_limit")
            self.top_steps += 1
        if self.total_steps >= self.limits.total_steps:
            raise _Abort("total_step_limit")
        self.total_steps += 1

    def check_stop(self) -> None:
        if self.stop is not None and self.stop(self.env):
            raise _Complete()

    def call_entry(self, entry: ProgramEntry, frame: Frame | None,
                   depth: int) -> None:
        if entry.kind in ("act", "builtin_act"):
            self.env.act(entry.name)
            self.check_stop()
            return
        if entry.kind == "applier":
            parsed = parse_applier(self.mem, entry.composition)
            if parsed.is_action:
                self.env.act(parsed.target.name, parsed.act_args)
                self.check_stop()
                return
            child = frame_for(self.mem, entry, parsed)
            self.run_combinator(parsed.target, child, depth)
            return
        # bare combinator: runs in the caller's frame (self slot, stack map)
        if frame is None:
            raise ValueError(
                f"combinator {entry.name!r} cannot run without a frame")
        self.run_combinator(entry, frame, depth)

    def run_combinator(self, entry: ProgramEntry, frame: Frame,
                       depth: int) -> None:
        spec = SPECS.get(entry.name)
        if spec is None:
            raise ValueError(f"no behaviour table for {entry.name!r}")
        det = self.mem.detectors[frame.det_id]
        own = (self.mem.det(spec.own_detector)
               if spec.own_detector is not None else None)
        read_det = own if own is not None else det
        inv = self.backend.begin(entry, spec)
        # the condition is latched once per invocation: a frame commits to its
        # branch on entry, so recursion into the remainder of a structure is
        # decided by the state the frame was entered with, not by whatever an
        # action inside the frame later made true
        cond = self.condition_bit(read_det)
        # entries stay on an exception unwind: an early task-completion stop
        # must still see every active invocation to impute its return step
        self.comb_stack.append((inv, cond))
        frame_steps = 0
        while True:
            if frame_steps >= self.limits.frame_steps:
                raise _Abort("frame_step_limit")
            frame_steps += 1
            self.charge(depth)
            ret, slot = self.backend.decide(inv, cond)
            t = self.total_steps - 1
            if ret:
                self.events.append(CallEvent(
                    t, depth, entry.name, cond, 1, None, None))
                self.comb_stack.pop()
                return
            callee = self.mem.programs[frame.slots[slot]]
            self.events.append(CallEvent(
                t, depth, entry.name, cond, 0, slot, callee.name))
            self.call_entry(callee, frame, depth + 1)


def run(mem: Memory, entry: ProgramEntry, env, backend: Backend,
        limits: Limits | None = None, sample_conds: bool = False,
        rng: np.random.Generator | None = None,
        recorder: EpisodeRecord | None = None, stop=None) -> ExecResult:
    """Execute one program to completion or abort.

    The entry must be an applier or an action (combinators need a frame).
    Aborts come from the step budgets or non-finite activations; both leave
    the partial trace in the result.

    ``stop(env) -> bool`` ends the run the moment an action makes it true
    (reinforcement episodes end on task completion).  On such an early end
    every active invocation still on the stack gets one supervised
    return-step appended to its tape (deepest first): the task is done, so
    returning is the correct flag from here on up.
    """
    if entry.kind == "combinator":
        raise ValueError("top-level entry must be an applier or action")
    if sys.getrecursionlimit() < 20000:
        sys.setrecursionlimit(20000)   # deep self-recursion nests Python frames
    r = _Run(mem, env, backend, limits or Limits(), sample_conds, rng, recorder,
             stop)
    try:
        r.call_entry(entry, None, 0)
        return ExecResult(True, None, r.top_steps, r.total_steps, r.events)
    except _Complete:
        if hasattr(backend, "final_return"):
            for inv, det in reversed(r.comb_stack):
                bit = int(det.model.prob(env) >= BETA)
                backend.final_return(inv, bit)
        return ExecResult(False, None, r.top_steps, r.total_steps, r.events,
                          completed=True)
    except _Abort as a:
        return ExecResult(False, a.reason, r.top_steps, r.total_steps, r.events)
    except nk.NumericError:
        return ExecResult(False, "numeric", r.top_steps, r.total_steps, r.events)
