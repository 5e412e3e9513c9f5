"""Combinator behaviour tables and abstract trace generation.

A combinator's behaviour is two branches, one per value of the condition bit
read at the first decision step.  A branch is a list of frame slots to call
in order, followed by an implicit return step.  Frame slot layout:

    0 self   1..3 args   4 stack-map   5 push-sentinel   6 push
    7 pop    8 load-state

``seq``, ``cond`` and ``linrec`` only ever select among slots 0..3;
``treerec`` and the stack-map also reach the built-in slots, so their score
softmax runs over all nine.

Traces come in two flavours.  *Canonical* traces are idealised executions:
the condition bit is constant within each invocation and recursive branches
chain into a fresh invocation of the same behaviour, giving one trace per
recursion depth.  *Noise* segments enumerate every combination of
post-initial condition bits for one invocation; the branch is committed by
the first bit, so targets do not depend on the later bits.  Noise segments
are what the execution core trains on, because real detectors do flip mid
invocation (a base-case action can re-establish the loop condition before
the closing return step reads it).
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product

SLOT_SELF = 0
SLOT_MAPSELF = 4
SLOT_PUSH_SENTINEL = 5
SLOT_PUSH = 6
SLOT_POP = 7
SLOT_LOAD_STATE = 8

SLOT_NAMES = ("self", "arg1", "arg2", "arg3", "_mapself",
              "_push_sentinel", "_push", "_pop", "_load_state")

TOP_NOT_SENTINEL = "top!=SENTINEL?"


@dataclass(frozen=True)
class CombinatorSpec:
    """One behaviour table.

    ``blind`` marks behaviours meant to run with the blind detector: the
    condition bit is structurally zero, so only branch 0 produces traces.
    ``chain_slot`` is the slot whose terminal call re-enters this same
    behaviour (how recursion shows up in a trace chain); ``own_detector``
    substitutes a built-in detector for the behaviour's own condition reads
    at run time (callees still get the frame's detector).
    """

    name: str
    branches: tuple[tuple[int, ...], tuple[int, ...]]
    active: int = 4
    blind: bool = False
    chain_slot: int | None = None
    own_detector: str | None = None

    def branch_chains(self, b: int) -> bool:
        br = self.branches[b]
        return (self.chain_slot is not None and len(br) > 0
                and br[-1] == self.chain_slot)


SPECS: dict[str, CombinatorSpec] = {
    "seq": CombinatorSpec(
        "seq", ((1, 2, 3), (1, 2, 3)), blind=True),
    "cond": CombinatorSpec(
        "cond", ((1, 2), (3,))),
    "linrec": CombinatorSpec(
        "linrec", ((1, 2, SLOT_SELF), (3,)), chain_slot=SLOT_SELF),
    "treerec": CombinatorSpec(
        "treerec",
        ((1, SLOT_PUSH_SENTINEL, 2, SLOT_MAPSELF, 3), ()),
        active=9),
    "_mapself": CombinatorSpec(
        "_mapself",
        ((SLOT_LOAD_STATE, SLOT_POP, SLOT_SELF, SLOT_MAPSELF), (SLOT_POP,)),
        active=9, chain_slot=SLOT_MAPSELF, own_detector=TOP_NOT_SENTINEL),
}

CORE_SPEC_NAMES = tuple(SPECS)


@dataclass(frozen=True)
class TraceStep:
    cond: int
    ret: int              # 1 on the closing return step
    slot: int | None      # selected slot; None on the return step


@dataclass(frozen=True)
class Segment:
    """One invocation: fresh core state, a run of decision steps."""

    branch: int
    steps: tuple[TraceStep, ...]

    @property
    def conds(self) -> tuple[int, ...]:
        return tuple(s.cond for s in self.steps)


@dataclass(frozen=True)
class Trace:
    spec_name: str
    segments: tuple[Segment, ...]


def branch_segment(spec: CombinatorSpec, b: int,
                   conds: tuple[int, ...] | None = None) -> Segment:
    """Segment for branch ``b``.  ``conds`` overrides the condition bits
    (first bit must equal ``b``, which is what committed the branch)."""
    calls = spec.branches[b]
    n = len(calls) + 1
    if conds is None:
        conds = (b,) * n
    if len(conds) != n or conds[0] != b:
        raise ValueError("condition override must match branch length and bit")
    steps = tuple(TraceStep(conds[t], 0, calls[t]) for t in range(len(calls)))
    steps += (TraceStep(conds[-1], 1, None),)
    return Segment(b, steps)


def active_branches(spec: CombinatorSpec) -> tuple[int, ...]:
    return (0,) if spec.blind else (0, 1)


def canonical_traces(spec: CombinatorSpec, max_depth: int) -> list[Trace]:
    """Idealised executions, one per reachable recursion depth.

    A chaining branch must eventually land in the other branch to finish;
    if both branches chain no finite trace exists and the result is empty
    (such behaviours are still trainable through their segments).
    """
    traces: list[Trace] = []
    branches = active_branches(spec)
    for b in branches:
        if not spec.branch_chains(b):
            traces.append(Trace(spec.name, (branch_segment(spec, b),)))
    for b in branches:
        if not spec.branch_chains(b):
            continue
        other = 1 - b
        if other not in branches or spec.branch_chains(other):
            continue
        for depth in range(1, max_depth + 1):
            segs = tuple(branch_segment(spec, b) for _ in range(depth))
            segs += (branch_segment(spec, other),)
            traces.append(Trace(spec.name, segs))
    return traces


def canonical_segments(spec: CombinatorSpec) -> list[Segment]:
    """The per-branch constant-condition segments (deduplicated)."""
    out, seen = [], set()
    for b in active_branches(spec):
        seg = branch_segment(spec, b)
        if seg not in seen:
            seen.add(seg)
            out.append(seg)
    return out


def noise_segments(spec: CombinatorSpec) -> list[Segment]:
    """Every invocation segment under every post-initial condition pattern.

    Blind behaviours read a structurally-zero bit, so their only pattern is
    all zeros.  Targets are branch-table targets throughout: the branch is
    decided by the first bit and later flips must not derail it.
    """
    if spec.blind:
        return [branch_segment(spec, 0)]
    out = []
    for b in active_branches(spec):
        n = len(spec.branches[b]) + 1
        for tail in product((0, 1), repeat=n - 1):
            out.append(branch_segment(spec, b, (b,) + tail))
    return out


# -- full behaviour set (enumeration grammar) -----------------------------

def _arg_subsequences() -> list[tuple[int, ...]]:
    subs = []
    for mask in range(8):
        subs.append(tuple(s for i, s in enumerate((1, 2, 3)) if mask >> i & 1))
    return subs


def _variant_name(calls: tuple[int, ...]) -> str:
    if not calls:
        return "e"
    return "".join("s" if c == SLOT_SELF else str(c) for c in calls)


def enumerate_full_set() -> list[CombinatorSpec]:
    """All behaviours expressible over slots 1..3 with optional terminal
    self-recursion: every ordered pair of branch variants, minus the
    divergent identical-recursive pairs and the empty behaviour.  Identical
    non-recursive pairs are the blind (sequence-like) family."""
    variants = []
    for sub in _arg_subsequences():
        variants.append(sub)
        variants.append(sub + (SLOT_SELF,))
    specs = []
    for b0 in variants:
        for b1 in variants:
            if b0 == b1:
                if (b0 and b0[-1] == SLOT_SELF) or not b0:
                    continue
                specs.append(CombinatorSpec(
                    f"enum_rep_{_variant_name(b0)}", (b0, b1), blind=True,
                    chain_slot=SLOT_SELF))
            else:
                specs.append(CombinatorSpec(
                    f"enum_{_variant_name(b0)}_{_variant_name(b1)}", (b0, b1),
                    chain_slot=SLOT_SELF))
    return specs
