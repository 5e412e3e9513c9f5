"""Applier composition vectors.

An applier binds a target program to a detector and up to three argument
programs in one fixed-width vector of five key-sized segments:

    [ target key | detector key | arg1 key | arg2 key | arg3 key ]

Segments hold exact stored keys, so parsing is a nearest-key lookup per
segment and registering a parsed-and-rebuilt vector is idempotent.  For
primitive-action targets the argument segments carry raw integers instead
(value in the first component, rest zero) and the detector segment is pinned
to the blind detector, since an action never reads a condition.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .memory import D_KEY, DetectorEntry, Memory, ProgramEntry

N_SEGMENTS = 5
APPLIER_DIM = N_SEGMENTS * D_KEY

BLIND_DET = "_blind?"


def _seg(vec: np.ndarray, i: int) -> np.ndarray:
    return vec[i * D_KEY:(i + 1) * D_KEY]


def build_comb_applier(mem: Memory, comb: str, det: str,
                       a1: str, a2: str, a3: str) -> np.ndarray:
    vec = np.zeros(APPLIER_DIM)
    _seg(vec, 0)[:] = mem.prog(comb).key
    _seg(vec, 1)[:] = mem.det(det).key
    for i, name in enumerate((a1, a2, a3)):
        _seg(vec, 2 + i)[:] = mem.prog(name).key
    return vec


def build_act_applier(mem: Memory, act: str,
                      args: tuple[int, int, int] = (0, 0, 0)) -> np.ndarray:
    entry = mem.prog(act)
    if entry.kind not in ("act", "builtin_act"):
        raise ValueError(f"{act!r} is not an action")
    vec = np.zeros(APPLIER_DIM)
    _seg(vec, 0)[:] = entry.key
    _seg(vec, 1)[:] = mem.det(BLIND_DET).key
    for i, v in enumerate(args):
        _seg(vec, 2 + i)[0] = float(v)
    return vec


@dataclass(frozen=True)
class ParsedApplier:
    target: ProgramEntry
    detector: DetectorEntry | None        # None for action targets
    prog_args: tuple[ProgramEntry, ...]   # comb targets: three entries
    act_args: tuple[int, int, int]        # action targets: raw values

    @property
    def is_action(self) -> bool:
        return self.detector is None


def parse_applier(mem: Memory, vec: np.ndarray) -> ParsedApplier:
    target = mem.lookup_program(_seg(vec, 0))
    if target.kind in ("act", "builtin_act"):
        args = tuple(int(round(float(_seg(vec, 2 + i)[0]))) for i in range(3))
        return ParsedApplier(target, None, (), args)  # type: ignore[arg-type]
    det = mem.lookup_detector(_seg(vec, 1))
    prog_args = tuple(mem.lookup_program(_seg(vec, 2 + i)) for i in range(3))
    return ParsedApplier(target, det, prog_args, (0, 0, 0))


def canonical(mem: Memory, vec: np.ndarray) -> np.ndarray:
    """Snap every segment to the exact key of whatever it resolves to."""
    p = parse_applier(mem, vec)
    if p.is_action:
        return build_act_applier(mem, p.target.name, p.act_args)
    return build_comb_applier(mem, p.target.name, p.detector.name,
                              *(a.name for a in p.prog_args))
