"""Standard memory contents and the program library.

``bootstrap`` registers what every system needs: the five core behaviours
(fresh embeddings), the built-in stack actions, the blind and stack-top
detectors, and an environment's primitive actions and exact detectors.
The ``library_*`` builders then register the hand-written programs used by
the experiments and as ground truth for verification.
"""

from __future__ import annotations

import numpy as np

from .applier import BLIND_DET, build_act_applier, build_comb_applier
from .combinators import CORE_SPEC_NAMES, TOP_NOT_SENTINEL
from .interpreter import BUILTIN_SLOT_PROGS
from .memory import (BuiltinModel, BlindModel, Memory, ProgramEntry,
                     random_unit_key)
from .nnkernel import init_embedding

LIST_ACTS = ("NOP", "OUT_1", "OUT_2", "CLEAR_2", "OUTCLEAR_1", "SWAP_12",
             "P1_RIGHT", "P1_LEFT", "P2_RIGHT", "P2_LEFT", "P3_RIGHT",
             "OUT_OK")
LIST_DETS = ("A[P1]>A[P2]?", "A[P1]!=END?", "A[P2]!=END?", "A[P3]!=END?",
             "P1!=P2?")

QS_ACTS = ("NOP", "SET_PIVOT_LO", "SET_J_LO", "SWAP_PIVOTJ", "PPIVOT_RIGHT",
           "PJ_RIGHT", "SWAP_PIVOTHI", "SET_J_NULL")
QS_DETS = ("Plo<Phi?", "Pj!=Phi?", "A[Pj]<=A[Phi]?")

DAG_ACTS = ("NOP", "COLOR_GREY", "ACTIVATE_CHILD", "CHILD_UP", "COLOR_BLACK",
            "OUT_RESULT")
DAG_DETS = ("V_IS_WHITE?", "HAS_CHILD?")


def bootstrap(hidden: int, rng: np.random.Generator,
              acts: tuple[str, ...] = LIST_ACTS,
              dets: tuple[str, ...] = LIST_DETS) -> Memory:
    m = Memory()
    for name in CORE_SPEC_NAMES:
        m.register_program(name, "combinator", random_unit_key(rng),
                           embedding=init_embedding(hidden, rng))
    for name in BUILTIN_SLOT_PROGS[1:]:   # _mapself is already the combinator
        m.register_program(name, "builtin_act", random_unit_key(rng))
    m.register_detector(BLIND_DET, random_unit_key(rng), BlindModel())
    m.register_detector(TOP_NOT_SENTINEL, random_unit_key(rng),
                        BuiltinModel(TOP_NOT_SENTINEL))
    for name in acts:
        m.register_program(name, "act", random_unit_key(rng))
    for name in dets:
        m.register_detector(name, random_unit_key(rng), BuiltinModel(name))
    return m


def def_applier(m: Memory, name: str, comb: str, det: str, a1: str, a2: str,
                a3: str, rng: np.random.Generator) -> ProgramEntry:
    vec = build_comb_applier(m, comb, det, a1, a2, a3)
    return m.register_program(name, "applier", random_unit_key(rng),
                              composition=vec)


def def_act_applier(m: Memory, name: str, act: str,
                    args: tuple[int, int, int],
                    rng: np.random.Generator) -> ProgramEntry:
    vec = build_act_applier(m, act, args)
    return m.register_program(name, "applier", random_unit_key(rng),
                              composition=vec)


def library_sort(m: Memory, rng: np.random.Generator,
                 step_variant: str = "swap_advance") -> None:
    """Selection-by-bubbling sort over the list environment.

    Expects pointers at P1 = -1, P2 = 0, P3 = 0.  Each MAX pass bubbles the
    maximum under P1 to the right end, outputs and clears it; RESET walks
    the pointers back; SORT repeats until P3 has counted every element, so
    the output is the array in descending order.

    Two interchangeable STEP solutions: ``swap_advance`` swaps out-of-order
    neighbours and advances P1; ``track_max`` keeps P1 on the running
    maximum without swapping (catch-up move when the scanned element wins).
    """
    def_applier(m, "COMPSWAP", "cond", "A[P1]>A[P2]?",
                "SWAP_12", "NOP", "NOP", rng)
    def_applier(m, "MOVE_12", "linrec", "P1!=P2?",
                "P1_RIGHT", "NOP", "NOP", rng)
    if step_variant == "swap_advance":
        def_applier(m, "STEP", "seq", BLIND_DET,
                    "COMPSWAP", "P1_RIGHT", "NOP", rng)
    elif step_variant == "track_max":
        def_applier(m, "STEP", "cond", "A[P1]>A[P2]?",
                    "NOP", "NOP", "MOVE_12", rng)
    else:
        raise ValueError(f"unknown step variant: {step_variant!r}")
    def_applier(m, "MAX", "linrec", "A[P2]!=END?",
                "STEP", "P2_RIGHT", "OUTCLEAR_1", rng)
    def_applier(m, "RESET_1", "linrec", "A[P1]!=END?",
                "P1_LEFT", "NOP", "NOP", rng)
    def_applier(m, "RESET_2", "linrec", "P1!=P2?",
                "P2_LEFT", "NOP", "P2_RIGHT", rng)
    def_applier(m, "RESET", "seq", BLIND_DET,
                "RESET_1", "RESET_2", "NOP", rng)
    def_applier(m, "SORT", "linrec", "A[P3]!=END?",
                "MAX", "RESET", "NOP", rng)


def library_aux_tasks(m: Memory, rng: np.random.Generator) -> None:
    """Reference solutions of the three reinforcement tasks, plus the relaxed
    variants used as curriculum stepping stones.

    The tasks are built so that completing them almost forces the canonical
    slot order: the sequencing task's emit/swap/clear chain reaches its target
    state through exactly one ordering (emitting after the swap reads the
    wrong cell, clearing before it destroys the value the checker wants
    preserved), and the branch task's two checkers each admit exactly one
    branch.  Reward for task completion is then reward for executing the
    combinator correctly, which is what lets a behavioural battery (trace
    equality against the symbolic tables) stand in for the task checkers
    after training.

    For the two fixed-shape tasks the relaxed program replaces later
    arguments with NOP so partial behaviour already completes them; the loop
    task is instead relaxed through its data (empty and one-element arrays),
    because disabling the pointer advance would reward exactly the early
    return that the loop has to unlearn."""
    def_applier(m, "SEQ_TASK", "seq", BLIND_DET,
                "OUT_1", "SWAP_12", "CLEAR_2", rng)
    def_applier(m, "COND_TASK", "cond", "A[P2]!=END?",
                "OUT_2", "CLEAR_2", "OUT_OK", rng)
    def_applier(m, "COPY_TASK", "linrec", "A[P2]!=END?",
                "OUT_2", "P2_RIGHT", "OUT_OK", rng)
    def_applier(m, "SEQ_EASY", "seq", BLIND_DET,
                "OUT_1", "NOP", "NOP", rng)
    def_applier(m, "COND_EASY", "cond", "A[P2]!=END?",
                "OUT_2", "NOP", "OUT_OK", rng)


def library_quicksort(m: Memory, rng: np.random.Generator) -> None:
    """In-place partition sort: sorts A[Plo..Phi] ascending.

    The pivot value sits at Phi.  PARTITION walks Pj over the range moving
    kept elements down to Ppivot, then swaps the pivot into place; DIVIDE
    saves both subranges; the tree recursion replays them off the stack.
    """
    def_act_applier(m, "SAVE_LEFT", "_push", (1, 0, 0), rng)
    def_act_applier(m, "SAVE_RIGHT", "_push", (2, 0, 0), rng)
    def_applier(m, "MAYBE_SWAP", "cond", "A[Pj]<=A[Phi]?",
                "SWAP_PIVOTJ", "PPIVOT_RIGHT", "NOP", rng)
    def_applier(m, "LOOP_PART", "linrec", "Pj!=Phi?",
                "MAYBE_SWAP", "PJ_RIGHT", "NOP", rng)
    def_applier(m, "INIT_PART", "seq", BLIND_DET,
                "SET_PIVOT_LO", "SET_J_LO", "NOP", rng)
    def_applier(m, "PARTITION", "seq", BLIND_DET,
                "INIT_PART", "LOOP_PART", "SWAP_PIVOTHI", rng)
    def_applier(m, "DIVIDE", "seq", BLIND_DET,
                "SAVE_LEFT", "SAVE_RIGHT", "NOP", rng)
    def_applier(m, "QSORT", "treerec", "Plo<Phi?",
                "PARTITION", "DIVIDE", "NOP", rng)


def library_traverse(m: Memory, rng: np.random.Generator) -> None:
    """Depth-first post-order walk of a DAG from the register node."""
    def_applier(m, "STAGE_CHILD", "seq", BLIND_DET,
                "ACTIVATE_CHILD", "_push", "NOP", rng)
    def_applier(m, "EXPAND", "linrec", "HAS_CHILD?",
                "STAGE_CHILD", "CHILD_UP", "NOP", rng)
    def_applier(m, "FINISH", "seq", BLIND_DET,
                "COLOR_BLACK", "OUT_RESULT", "NOP", rng)
    def_applier(m, "TRAVERSE", "treerec", "V_IS_WHITE?",
                "COLOR_GREY", "EXPAND", "FINISH", rng)
