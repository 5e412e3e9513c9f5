"""Task environments.

Every environment exposes the same small surface to the interpreter:

* ``act(name, args)``: perform one primitive action (built-in stack actions
  use the same entry point, names starting with ``_``).
* ``eval_predicate(name)``: exact condition bit for a built-in detector
  (0 = the condition holds).
* ``observe(name)``: feature vector for a learned detector.

Actions are total: out-of-range reads produce the END symbol, out-of-range
writes and empty pops are no-ops.  Runaway executions are cut by the
interpreter's step budget, not by the environment.
"""

from .listenv import END, SENTINEL, ListEnv, symbol_onehot
from .quicksort import QuicksortEnv
from .dagenv import DagEnv

__all__ = ["END", "SENTINEL", "ListEnv", "QuicksortEnv", "DagEnv",
           "symbol_onehot"]
