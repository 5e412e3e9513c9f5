"""In-place partition sort environment.

Four pointers over one array: the active range (Plo, Phi), the store
position (Ppivot) and the scanner (Pj).  The pivot VALUE lives at Phi; the
partition loop walks Pj from Plo to Phi, swapping kept elements down to
Ppivot, then swaps the pivot into place.  The state stack saves (lo, hi)
ranges; the push action's first raw argument selects which subrange of the
just-partitioned range to save:

    1  ->  (Plo, Ppivot - 1)       left of the placed pivot
    2  ->  (Ppivot + 1, Phi)       right of the placed pivot
    other  ->  (Plo, Phi)          the range as-is
"""

from __future__ import annotations

from .listenv import END, SENTINEL


class QuicksortEnv:
    ACTIONS = ("NOP", "SET_PIVOT_LO", "SET_J_LO", "SWAP_PIVOTJ",
               "PPIVOT_RIGHT", "PJ_RIGHT", "SWAP_PIVOTHI", "SET_J_NULL",
               "_push_sentinel", "_push", "_pop", "_load_state")

    def __init__(self, a: list[int], lo: int = 0, hi: int | None = None):
        self.a = list(a)
        self.plo = lo
        self.phi = (len(a) - 1) if hi is None else hi
        self.ppivot = lo
        self.pj = lo
        self.stack: list = []

    def clone(self) -> "QuicksortEnv":
        e = QuicksortEnv(self.a, self.plo, self.phi)
        e.ppivot, e.pj = self.ppivot, self.pj
        e.stack = list(self.stack)
        return e

    def read(self, p: int):
        if 0 <= p < len(self.a):
            return self.a[p]
        return END

    def _swap(self, i: int, j: int) -> None:
        if 0 <= i < len(self.a) and 0 <= j < len(self.a):
            self.a[i], self.a[j] = self.a[j], self.a[i]

    def act(self, name: str, args: tuple[int, int, int] = (0, 0, 0)) -> None:
        if name == "NOP":
            return
        if name == "SET_PIVOT_LO":
            self.ppivot = self.plo
        elif name == "SET_J_LO":
            self.pj = self.plo
        elif name == "SWAP_PIVOTJ":
            self._swap(self.ppivot, self.pj)
        elif name == "PPIVOT_RIGHT":
            self.ppivot += 1
        elif name == "PJ_RIGHT":
            self.pj += 1
        elif name == "SWAP_PIVOTHI":
            self._swap(self.ppivot, self.phi)
        elif name == "SET_J_NULL":
            self.pj = -1
        elif name == "_push_sentinel":
            self.stack.append(SENTINEL)
        elif name == "_push":
            if args[0] == 1:
                self.stack.append((self.plo, self.ppivot - 1))
            elif args[0] == 2:
                self.stack.append((self.ppivot + 1, self.phi))
            else:
                self.stack.append((self.plo, self.phi))
        elif name == "_pop":
            if self.stack:
                self.stack.pop()
        elif name == "_load_state":
            if self.stack and self.stack[-1] != SENTINEL:
                self.plo, self.phi = self.stack[-1]
        else:
            raise ValueError(f"unknown action: {name!r}")

    def eval_predicate(self, name: str) -> int:
        if name == "Plo<Phi?":
            holds = self.plo < self.phi
        elif name == "Pj!=Phi?":
            holds = self.pj != self.phi
        elif name == "A[Pj]<=A[Phi]?":
            vj, vh = self.read(self.pj), self.read(self.phi)
            holds = vj != END and vh != END and vj <= vh
        elif name == "top!=SENTINEL?":
            holds = bool(self.stack) and self.stack[-1] != SENTINEL
        else:
            raise ValueError(f"unknown predicate: {name!r}")
        return 0 if holds else 1

    def observe(self, name: str):
        raise ValueError(f"unknown observation: {name!r}")
