"""Pointer-machine over a small integer array.

The scratch array holds digits 0..9; clearing a cell writes -1; reading any
position outside the array yields the END symbol.  Three pointers move over
it: P1 and P2 are free read/write heads (they may park one step outside the
array on either side), P3 only ever moves right and doubles as the output
counter, advancing whenever an element is emitted.

A state stack backs the built-in actions shared with the recursive
environments: sentinel push, state push/restore, pop.  For this environment
the saved state is the (P1, P2) pair.
"""

from __future__ import annotations

import numpy as np

END = "END"
SENTINEL = "SENTINEL"
OK = "OK"

N_SYMBOLS = 12   # -1, digits 0..9, END


def symbol_index(v) -> int:
    if v == END:
        return 11
    if v == -1:
        return 0
    return int(v) + 1


def symbol_onehot(v) -> np.ndarray:
    out = np.zeros(N_SYMBOLS)
    out[symbol_index(v)] = 1.0
    return out


def _gt(a, b) -> bool:
    """Order used by the comparison detectors: END compares greater-than
    nothing and nothing exceeds it; cleared cells (-1) compare numerically."""
    if a == END or b == END:
        return False
    return a > b


class ListEnv:
    ACTIONS = ("NOP", "OUT_1", "OUT_2", "CLEAR_2", "OUTCLEAR_1", "SWAP_12",
               "P1_RIGHT", "P1_LEFT", "P2_RIGHT", "P2_LEFT", "P3_RIGHT",
               "OUT_OK",
               "_push_sentinel", "_push", "_pop", "_load_state")

    def __init__(self, a: list[int], p1: int = 0, p2: int = 0, p3: int = 0):
        self.a = list(a)
        self.p1 = p1
        self.p2 = p2
        self.p3 = p3
        self.stack: list = []
        self.out: list = []

    def clone(self) -> "ListEnv":
        e = ListEnv(self.a, self.p1, self.p2, self.p3)
        e.stack = list(self.stack)
        e.out = list(self.out)
        return e

    # -- array access -------------------------------------------------------
    def read(self, p: int):
        if 0 <= p < len(self.a):
            return self.a[p]
        return END

    def _write(self, p: int, v: int) -> None:
        if 0 <= p < len(self.a):
            self.a[p] = v

    def _clamp(self, p: int) -> int:
        return max(-1, min(len(self.a), p))

    def _emit(self, v) -> None:
        self.out.append(v)
        if v != OK:
            self.p3 = self._clamp(self.p3 + 1)

    # -- interpreter surface --------------------------------------------------
    def act(self, name: str, args: tuple[int, int, int] = (0, 0, 0)) -> None:
        if name == "NOP":
            return
        if name == "OUT_1":
            self._emit(self.read(self.p1))
        elif name == "OUT_2":
            self._emit(self.read(self.p2))
        elif name == "CLEAR_2":
            self._write(self.p2, -1)
        elif name == "OUTCLEAR_1":
            self._emit(self.read(self.p1))
            self._write(self.p1, -1)
        elif name == "SWAP_12":
            v1, v2 = self.read(self.p1), self.read(self.p2)
            if v1 != END and v2 != END:
                self.a[self.p1], self.a[self.p2] = v2, v1
        elif name == "P1_RIGHT":
            self.p1 = self._clamp(self.p1 + 1)
        elif name == "P1_LEFT":
            self.p1 = self._clamp(self.p1 - 1)
        elif name == "P2_RIGHT":
            self.p2 = self._clamp(self.p2 + 1)
        elif name == "P2_LEFT":
            self.p2 = self._clamp(self.p2 - 1)
        elif name == "P3_RIGHT":
            self.p3 = self._clamp(self.p3 + 1)
        elif name == "OUT_OK":
            self._emit(OK)
        elif name == "_push_sentinel":
            self.stack.append(SENTINEL)
        elif name == "_push":
            self.stack.append((self.p1, self.p2))
        elif name == "_pop":
            if self.stack:
                self.stack.pop()
        elif name == "_load_state":
            if self.stack and self.stack[-1] != SENTINEL:
                self.p1, self.p2 = self.stack[-1]
        else:
            raise ValueError(f"unknown action: {name!r}")

    def eval_predicate(self, name: str) -> int:
        if name == "A[P1]>A[P2]?":
            holds = _gt(self.read(self.p1), self.read(self.p2))
        elif name == "A[P1]!=END?":
            holds = self.read(self.p1) != END
        elif name == "A[P2]!=END?":
            holds = self.read(self.p2) != END
        elif name == "A[P3]!=END?":
            holds = self.read(self.p3) != END
        elif name == "P1!=P2?":
            holds = self.p1 != self.p2
        elif name == "top!=SENTINEL?":
            holds = bool(self.stack) and self.stack[-1] != SENTINEL
        else:
            raise ValueError(f"unknown predicate: {name!r}")
        return 0 if holds else 1

    def observe(self, name: str) -> np.ndarray:
        if name == "pair12":
            return np.concatenate([symbol_onehot(self.read(self.p1)),
                                   symbol_onehot(self.read(self.p2))])
        raise ValueError(f"unknown observation: {name!r}")
