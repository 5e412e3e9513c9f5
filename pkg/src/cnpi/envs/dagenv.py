"""Depth-first traversal environment over a DAG.

Nodes carry a colour (white = unvisited, grey = in progress, black = done)
and a child cursor.  A register ``v`` names the node currently under
consideration.  Two stacks:

* the visit stack holds the chain of grey nodes; child enumeration and the
  finishing actions address its top, so ``v`` is free to be clobbered while
  children are staged and later restored from the state stack
* the state stack holds staged child nodes (plus sentinels), driving the
  stack-map recursion exactly as in the other environments: the push action
  saves ``v``, load-state restores it

Output is emitted at finish time, so a full run lists nodes in post-order
(every node after all of its descendants), each node exactly once.
"""

from __future__ import annotations

from .listenv import SENTINEL

WHITE, GREY, BLACK = "white", "grey", "black"


class DagEnv:
    ACTIONS = ("NOP", "COLOR_GREY", "ACTIVATE_CHILD", "CHILD_UP",
               "COLOR_BLACK", "OUT_RESULT",
               "_push_sentinel", "_push", "_pop", "_load_state")

    def __init__(self, adj: list[list[int]], root: int = 0):
        self.adj = [list(children) for children in adj]
        self.colors = [WHITE] * len(adj)
        self.childptr = [0] * len(adj)
        self.v = root
        self.visit: list[int] = []
        self.stack: list = []
        self.out: list[int] = []

    def clone(self) -> "DagEnv":
        e = DagEnv(self.adj, self.v)
        e.colors = list(self.colors)
        e.childptr = list(self.childptr)
        e.visit = list(self.visit)
        e.stack = list(self.stack)
        e.out = list(self.out)
        return e

    def _top(self) -> int | None:
        return self.visit[-1] if self.visit else None

    def act(self, name: str, args: tuple[int, int, int] = (0, 0, 0)) -> None:
        if name == "NOP":
            return
        if name == "COLOR_GREY":
            self.colors[self.v] = GREY
            self.visit.append(self.v)
        elif name == "ACTIVATE_CHILD":
            t = self._top()
            if t is not None and self.childptr[t] < len(self.adj[t]):
                self.v = self.adj[t][self.childptr[t]]
        elif name == "CHILD_UP":
            t = self._top()
            if t is not None:
                self.childptr[t] += 1
        elif name == "COLOR_BLACK":
            t = self._top()
            if t is not None:
                self.colors[t] = BLACK
        elif name == "OUT_RESULT":
            t = self._top()
            if t is not None:
                self.out.append(t)
                self.visit.pop()
        elif name == "_push_sentinel":
            self.stack.append(SENTINEL)
        elif name == "_push":
            self.stack.append(self.v)
        elif name == "_pop":
            if self.stack:
                self.stack.pop()
        elif name == "_load_state":
            if self.stack and self.stack[-1] != SENTINEL:
                self.v = self.stack[-1]
        else:
            raise ValueError(f"unknown action: {name!r}")

    def eval_predicate(self, name: str) -> int:
        if name == "V_IS_WHITE?":
            holds = self.colors[self.v] == WHITE
        elif name == "HAS_CHILD?":
            t = self._top()
            holds = t is not None and self.childptr[t] < len(self.adj[t])
        elif name == "top!=SENTINEL?":
            holds = bool(self.stack) and self.stack[-1] != SENTINEL
        else:
            raise ValueError(f"unknown predicate: {name!r}")
        return 0 if holds else 1

    def observe(self, name: str):
        raise ValueError(f"unknown observation: {name!r}")
