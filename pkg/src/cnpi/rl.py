"""Reinforcement learning of combinator behaviours, detectors and appliers.

Three pipelines share one episode mechanism (sampled decisions through the
interpreter, scalar reward at the end):

* combinator trials — a fresh core plus fresh embeddings learn three
  pointer-machine tasks (sequenced output, conditional output, linear copy)
  from reward alone.  The task for each episode is drawn uniformly or
  adaptively (softmax over per-task moving-average error), and each task is
  trained either directly, interleaved 50/50 with a relaxed variant, or
  staged through the relaxed variant first.
* detector fitting — a logistic read-out over the one-hot pair observation
  learns a comparison predicate from episode reward inside a fixed
  conditional-swap scaffold.
* applier search — a candidate program's five composition keys parameterize
  softmax distributions over caller-supplied candidate pools; components
  are sampled per episode, rewarded as a whole (+/-1), and the embedding
  ascends the episode log-likelihood until the greedy composition solves
  the task.

The episode reward is ``+1 - 0.1*T`` on success and ``-1 - 0.1*T`` on
failure, where ``T`` counts core decisions at every depth.  Episodes are
cut off at ``K_ARGS * n`` decisions for a size-``n`` problem, and every
invocation is cut off at ``K_ARGS`` decisions of its own — a canonical
frame visits each slot at most once and returns, so the budget only
excludes behaviours (like unrolling a loop body inside one frame) that no
canonical execution produces.  Applier search uses the bare ``+/-1``
reward.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
import numpy as np

from . import nnkernel as nk
from .applier import build_comb_applier
from .envs.listenv import ListEnv, OK
from .interpreter import (EpisodeRecord, Limits, NeuralBackend,
                          SymbolicBackend, format_trace, run)
from .memory import BETA, LinearModel, Memory
from .programs import BLIND_DET, bootstrap, def_applier, library_aux_tasks
from .training import Adam, flat_grads

K_ARGS = 4            # callable slots per frame; scales the step cap
STEP_PENALTY = 0.1
TOTAL_GUARD = 150     # decision budget across all depths for one episode


def softmax(z: np.ndarray) -> np.ndarray:
    z = np.asarray(z, dtype=float)
    z = z - z.max()
    e = np.exp(z)
    return e / e.sum()


# -- episodes ------------------------------------------------------------------

@dataclass
class Episode:
    ok: bool                  # the task checker fired (or held at return)
    reward: float
    record: EpisodeRecord
    steps: int                # core decisions at any depth


def run_episode(mem: Memory, applier: str, env, params: nk.CoreParams,
                rng: np.random.Generator, n: int, check,
                sample_conds: bool = False,
                greedy_core: bool = False,
                explore: float = 0.0) -> Episode:
    """One reinforcement rollout of `applier`.

    The episode ends the moment the checker holds, or at the step budgets.
    With a sampling core only the slot choices are drawn — return flags are
    imputed on completion (every invocation still active should return once
    the task is done), which is where the supervised return-flag targets of
    successful episodes come from.

    The budgets mirror the combinator structure: a frame may make at most
    ``K_ARGS`` decisions (one per slot plus the return — a canonical frame
    never needs more), and the whole episode at most ``K_ARGS * n`` for a
    size-``n`` problem (the frames a canonical recursion opens).  The frame
    budget is what rules out unrolling a loop inside one frame: only genuine
    recursion can complete a problem bigger than a single frame's budget.
    The reward penalty counts every decision at every depth, so wasted
    decisions cost the same wherever they hide.
    """
    rec = EpisodeRecord()
    backend = NeuralBackend(params, sample=not greedy_core, rng=rng,
                            recorder=rec, sample_returns=False,
                            explore=explore)
    res = run(mem, mem.prog(applier), env, backend,
              Limits(top_steps=10**9, total_steps=K_ARGS * n,
                     frame_steps=K_ARGS),
              sample_conds=sample_conds, rng=rng, recorder=rec, stop=check)
    ok = bool(res.completed or (res.returned and check(env)))
    reward = (1.0 if ok else -1.0) - STEP_PENALTY * res.total_steps
    return Episode(ok, reward, rec, res.total_steps)


class PolicyOptimizer:
    """Per-parameter moment state for the episodic policy-gradient updates.

    One instance spans a whole trial: the recurrent core is shared between
    tasks, and each combinator embedding gets its own moment state the first
    time it receives a gradient.  The per-parameter step normalisation keeps
    one task's large failure gradients from bulldozing the weights another
    task has already settled, which plain accumulation-scaled steps do badly
    when the tasks share one network.
    """

    def __init__(self, params: nk.CoreParams, lr: float):
        self.lr = lr
        self.core = Adam(params.flat().shape, 0.9, 0.999, 1e-8)
        self.embs: dict[str, Adam] = {}

    def step(self, params: nk.CoreParams, entry, grads: nk.Grads) -> None:
        flat = params.flat()
        flat += self.core.delta(flat_grads(grads), self.lr)
        params.set_flat(flat)
        opt = self.embs.get(entry.name)
        if opt is None:
            opt = self.embs[entry.name] = Adam(entry.embedding.shape,
                                               0.9, 0.999, 1e-8)
        entry.embedding += opt.delta(grads.emb, self.lr)


def reinforce_core(params: nk.CoreParams, mem: Memory, episode: Episode,
                   combinator: str, opt: PolicyOptimizer,
                   clip: float = 25.0) -> None:
    """Policy-gradient step on the core and one combinator's embedding.

    Sampled call decisions are weighted by the raw episode reward: failures
    outweigh shortcut successes (``-1-0.1T`` against ``+1-0.1T``), which is
    what eventually erodes degenerate policies that pass only the short
    cases.  Centring the reward with a per-task baseline destroys exactly
    that asymmetry and turns half-successful policies into stable attractors,
    so no baseline is used.

    Return flags are handled asymmetrically.  A *taken* return ends its
    episode, so the outcome judges that decision directly: it is weighted by
    the raw reward, pushed up on success and down on failure.  The
    down-push matters because return flags are thresholded, not sampled — a
    premature-return habit (typically inherited from a relaxed task whose
    episodes end earlier) would otherwise end every harder episode
    deterministically, and no amount of failure could ever unlearn it.  A
    mid-episode *continue* is only reinforced on success (weight zero on
    failure): a failed episode says nothing about the continue decisions,
    because the blame usually lies with the slot choices that followed.

    Episode step gradients must stay summed, not averaged, and the clip must
    sit far above the ordinary gradient scale.  Anything that shrinks long
    episodes' contributions relative to short ones (a per-step mean, a tight
    norm cap) can flip the sign of the expected update and let shortcut
    policies survive the punishment that is supposed to remove them, because
    failed episodes run to the step cap while successes end early.
    """
    entry = mem.prog(combinator)
    pos = 1.0 if episode.reward > 0 else 0.0
    agg: nk.Grads | None = None
    for inv in episode.record.invocations:
        if inv.prog != combinator or len(inv.tape) == 0:
            continue
        targets = [nk.StepTarget(slot, ret,
                                 slot_weight=episode.reward if slot is not None
                                 else 0.0,
                                 ret_weight=episode.reward if ret else pos)
                   for slot, ret in inv.decisions]
        g = nk.backward_segment(params, inv.tape, targets)
        agg = g if agg is None else agg.add_(g)
    if agg is None:
        return
    nk.clip_grads(agg, clip)
    opt.step(params, entry, agg)


def reinforce_detector(episode: Episode, lr: float) -> None:
    """Policy-gradient step on every logistic detector sampled this episode."""
    for s in episode.record.det_samples:
        model = s.det.model
        if not isinstance(model, LinearModel):
            continue
        g = episode.reward * (s.bit - s.p)
        model.w += lr * g * s.obs
        model.b += lr * g


def adaptive_distribution(errors, temperature: float = 1.0) -> np.ndarray:
    """Task-sampling distribution: softmax of per-task error averages."""
    return softmax(np.asarray(errors, dtype=float) / temperature)


# -- stage 1: the three combinator tasks ---------------------------------------

@dataclass(frozen=True)
class AuxTask:
    name: str
    combinator: str
    applier: str
    easy_applier: str


AUX_TASKS = (AuxTask("chain", "seq", "SEQ_TASK", "SEQ_EASY"),
             AuxTask("branch", "cond", "COND_TASK", "COND_EASY"),
             AuxTask("copy", "linrec", "COPY_TASK", "COPY_TASK"))


def _chain_case(a: int, b: int, easy: bool):
    # Emit the first cell, swap, blank the second cell.  For distinct values
    # this end state is reachable through exactly one slot order: emitting
    # after the swap reads the moved value, and clearing before the swap
    # destroys the value the checker wants moved into the first cell.
    env = ListEnv([a, b], p1=0, p2=1)
    if easy:
        return env, 2, lambda e: e.out == [a]
    return env, 2, lambda e: e.out == [a] and e.a == [b, -1]


def _branch_case(b: int, p2: int, easy: bool):
    env = ListEnv([b], p1=0, p2=p2)
    if easy:
        if p2 == 0:
            return env, 1, lambda e: e.out == [b]
        return env, 1, lambda e: e.out == [OK]
    if p2 == 0:
        return env, 1, lambda e: e.out == [b] and e.a == [-1]
    return env, 1, lambda e: e.out == [OK] and e.a == [b]


def _copy_easy_case(a0: list[int]):
    """Relaxed copy: the full task on degenerate data (empty or one-element
    arrays), so the termination branch and a single loop iteration are each
    rewarded on their own before longer arrays demand chaining them."""
    return _copy_case(a0)


def _copy_case(a0: list[int]):
    # size counts the elements plus the closing end-marker emission
    env = ListEnv(list(a0), p1=0, p2=0, p3=0)
    want = list(a0) + [OK]
    return env, len(a0) + 1, lambda e: e.out == want


def sample_case(task: AuxTask, rng: np.random.Generator, easy: bool):
    """Random environment, size parameter and checker for one episode."""
    if task.name == "chain":
        a, b = (int(v) for v in rng.integers(0, 10, 2))
        return _chain_case(a, b, easy)
    if task.name == "branch":
        return _branch_case(int(rng.integers(0, 10)),
                            int(rng.integers(0, 2)), easy)
    if task.name == "copy":
        # Mixed lengths keep a one-decision exploration path open: advancing
        # the pointer on a one-element array flips the condition bit, and the
        # already-learned termination branch finishes the episode.  Length two
        # is what punishes the no-advance shortcut.
        ln = int(rng.integers(0, 2)) if easy else 1 + int(rng.integers(0, 2))
        return _copy_easy_case([int(v) for v in rng.integers(0, 10, ln)]) \
            if easy else _copy_case([int(v) for v in rng.integers(0, 10, ln)])
    raise KeyError(task.name)


def battery_cases(task: AuxTask, rng: np.random.Generator, size: int):
    """Fixed evaluation set with the strict checkers (edges + random)."""
    cases = []
    if task.name == "chain":
        seen = [(0, 0), (9, 9), (3, 7), (7, 3)]
        while len(seen) < size:
            seen.append(tuple(int(v) for v in rng.integers(0, 10, 2)))
        cases = [_chain_case(a, b, easy=False) for a, b in seen]
    elif task.name == "branch":
        seen = [(0, 0), (0, 1), (9, 0), (9, 1)]
        while len(seen) < size:
            seen.append((int(rng.integers(0, 10)), int(rng.integers(0, 2))))
        cases = [_branch_case(b, p2, easy=False) for b, p2 in seen]
    elif task.name == "copy":
        seen = [[0], [9], [3, 3], [2, 7]]
        while len(seen) < size:
            ln = int(rng.integers(1, 3))
            seen.append([int(v) for v in rng.integers(0, 10, ln)])
        cases = [_copy_case(a) for a in seen]
    else:
        raise KeyError(task.name)
    return cases


def easy_battery_cases(task: AuxTask):
    """Fixed evaluation set for the relaxed variants (both branches, edges)."""
    if task.name == "chain":
        return [_chain_case(a, b, easy=True) for a, b in
                ((0, 0), (9, 9), (3, 7), (7, 3))]
    if task.name == "branch":
        return [_branch_case(b, p2, easy=True) for b, p2 in
                ((0, 0), (0, 1), (9, 0), (9, 1))]
    if task.name == "copy":
        return [_copy_easy_case(a) for a in ([], [0], [9], [5])]
    raise KeyError(task.name)


def battery_pass(mem: Memory, params: nk.CoreParams, task: AuxTask,
                 cases, easy: bool = False) -> bool:
    """Greedy evaluation over a fixed case set.

    True-task batteries also require the greedy call trace to equal the
    symbolic backend's: the tasks are designed so that completion forces the
    canonical slot order, and holding the battery to the trace makes a
    solved trial mean the combinator itself is executed correctly (not just
    that the environment ends up right).  The relaxed batteries check
    outcomes only — a stepping stone is allowed to stop early.
    """
    backend = NeuralBackend(params)
    applier = task.easy_applier if easy else task.applier
    for env0, n, check in cases:
        env = env0.clone()
        limits = Limits(top_steps=10**9, total_steps=K_ARGS * n,
                        frame_steps=K_ARGS)
        res = run(mem, mem.prog(applier), env, backend, limits)
        if not (res.returned and check(env)):
            return False
        if not easy:
            sym = run(mem, mem.prog(applier), env0.clone(),
                      SymbolicBackend(), limits)
            if format_trace(res.events) != format_trace(sym.events):
                return False
    return True


@dataclass
class TrialConfig:
    hidden: int = 16
    lr: float = 0.1
    sampling: str = "adaptive"        # "uniform" | "adaptive"
    curriculum: str = "gradual"       # "none" | "mixed" | "gradual"
    max_episodes: int = 5000
    check_every: int = 25
    window: int = 10
    temperature: float = 1.0
    battery_size: int = 8
    battery_gate: float = 0.7         # skip the battery while any task's error exceeds this
    graduate_streak: int = 10         # consecutive relaxed successes before the real task
    explore: float = 0.0              # uniform slot mixture during sampled episodes
    seed: int = 0


@dataclass
class TrialResult:
    solved: bool
    episodes: int
    task_solved: dict[str, bool]
    task_errors: dict[str, float]


def combinator_trial(cfg: TrialConfig) -> TrialResult:
    """One reinforcement trial: learn seq/cond/linrec behaviours from reward.

    A task counts as solved when the greedy policy passes its whole
    behavioural battery (environment outcomes and canonical call traces);
    the trial ends early once all three tasks pass together.  Under the
    gradual curriculum a task moves from its relaxed variant to the real
    one after ten consecutive successes on the relaxed episodes.
    """
    if cfg.sampling not in ("uniform", "adaptive"):
        raise KeyError(cfg.sampling)
    if cfg.curriculum not in ("none", "mixed", "gradual"):
        raise KeyError(cfg.curriculum)
    rng = np.random.default_rng(cfg.seed)
    mem = bootstrap(cfg.hidden, rng)
    library_aux_tasks(mem, rng)
    params = nk.init_params(cfg.hidden, "state0", rng)
    cases = {t.name: battery_cases(t, rng, cfg.battery_size) for t in AUX_TASKS}
    recent = {t.name: deque(maxlen=cfg.window) for t in AUX_TASKS}
    streak = {t.name: 0 for t in AUX_TASKS}
    graduated: set[str] = set()
    opt = PolicyOptimizer(params, cfg.lr)

    def error(name: str) -> float:
        q = recent[name]
        return float(np.mean(q)) if q else 1.0

    for ep in range(1, cfg.max_episodes + 1):
        if cfg.sampling == "adaptive":
            p = adaptive_distribution([error(t.name) for t in AUX_TASKS],
                                      cfg.temperature)
            task = AUX_TASKS[int(rng.choice(len(AUX_TASKS), p=p))]
        else:
            task = AUX_TASKS[int(rng.integers(len(AUX_TASKS)))]
        if cfg.curriculum == "none":
            easy = False
        elif cfg.curriculum == "mixed":
            easy = bool(rng.random() < 0.5)
        else:
            easy = task.name not in graduated
        env, n, check = sample_case(task, rng, easy)
        episode = run_episode(mem, task.easy_applier if easy else task.applier,
                              env, params, rng, n, check,
                              explore=cfg.explore)
        reinforce_core(params, mem, episode, task.combinator, opt)
        recent[task.name].append(0.0 if episode.ok else 1.0)
        if cfg.curriculum == "gradual" and easy:
            streak[task.name] = streak[task.name] + 1 if episode.ok else 0
            if streak[task.name] >= cfg.graduate_streak:
                # The relaxed variant is mastered; move to the real task.
                graduated.add(task.name)
                recent[task.name].clear()
        if ep % cfg.check_every == 0:
            if all(error(t.name) <= cfg.battery_gate for t in AUX_TASKS) \
                    and all(battery_pass(mem, params, t, cases[t.name])
                            for t in AUX_TASKS):
                return TrialResult(True, ep,
                                   {t.name: True for t in AUX_TASKS},
                                   {t.name: error(t.name) for t in AUX_TASKS})
    return TrialResult(False, cfg.max_episodes,
                       {t.name: battery_pass(mem, params, t, cases[t.name])
                        for t in AUX_TASKS},
                       {t.name: error(t.name) for t in AUX_TASKS})


# -- stage 2a: the comparison detector -----------------------------------------

CMP_DET = "A[P1]>A[P2]?"
CSWAP_SKETCH = "CSWAP_SKETCH"


def register_cswap_sketch(mem: Memory, rng: np.random.Generator,
                          det: str = CMP_DET) -> None:
    """Conditional-swap scaffold around a (learnable) comparison detector."""
    def_applier(mem, CSWAP_SKETCH, "cond", det, "SWAP_12", "NOP", "NOP", rng)


def _pair_env(u, v) -> ListEnv:
    env = ListEnv([0, 0], p1=0, p2=1)
    env.a = [u, v]
    return env


def comparison_truth(u, v) -> int:
    """Ground-truth condition bit of the comparison (0 = first greater)."""
    return _pair_env(u, v).eval_predicate(CMP_DET)


def comparison_error(model: LinearModel, values=(-1, 0, 1, 2, 3, 4, 5, 6, 7,
                                                 8, 9)) -> float:
    """Exhaustive disagreement rate over the value grid."""
    wrong = total = 0
    for u in values:
        for v in values:
            env = _pair_env(u, v)
            bit = int(model.prob(env) >= BETA)
            wrong += int(bit != comparison_truth(u, v))
            total += 1
    return wrong / total


@dataclass
class DetectorRLResult:
    converged: bool
    episodes: int
    error: float


def comparison_detector_rl(mem: Memory, params: nk.CoreParams,
                           rng: np.random.Generator, lr: float = 0.1,
                           max_episodes: int = 3000,
                           check_every: int = 25) -> DetectorRLResult:
    """Learn the comparison detector from reward inside the swap scaffold.

    Core decisions stay greedy (the core is already trained); only the
    detector's condition bits are sampled.  The value grid covers cleared
    cells but not out-of-array reads: a wrong bit on an out-of-array pair
    never changes the scaffold's outcome, so reward carries no signal for
    those rows (the supervised path covers them instead).
    """
    model = mem.det(CMP_DET).model
    if not isinstance(model, LinearModel):
        raise TypeError("comparison detector is not trainable")
    values = (-1, 0, 1, 2, 3, 4, 5, 6, 7, 8, 9)
    for ep in range(1, max_episodes + 1):
        u, v = (int(values[i]) for i in rng.integers(0, len(values), 2))
        env = _pair_env(u, v)
        want = [v, u] if comparison_truth(u, v) == 0 else [u, v]
        episode = run_episode(mem, CSWAP_SKETCH, env, params, rng, 1,
                              lambda e: e.a == want and e.out == [],
                              sample_conds=True, greedy_core=True)
        reinforce_detector(episode, lr)
        if ep % check_every == 0 and comparison_error(model, values) == 0.0:
            return DetectorRLResult(True, ep, 0.0)
    return DetectorRLResult(False, max_episodes, comparison_error(model, values))


# -- stage 2b: applier search --------------------------------------------------

@dataclass(frozen=True)
class SlotPools:
    """Candidate programs for each applier segment."""
    target: tuple[str, ...]
    det: tuple[str, ...]
    args: tuple[str, ...]


@dataclass
class ApplierRLConfig:
    lr: float = 0.1
    max_episodes: int = 5000
    check_every: int = 25
    battery: int = 10
    seed: int = 0


@dataclass
class ApplierTrialResult:
    solved: bool
    episodes: int
    composition: tuple[str, str, str, str, str] | None


class ApplierSearch:
    """REINFORCE over the five composition segments of one candidate applier.

    The candidate's embedding segments parameterize softmax distributions
    over the pools (logits are dot products against the pool keys, exactly
    the parser's similarity); one composition is sampled per episode and
    the whole episode is rewarded +/-1.
    """

    def __init__(self, mem: Memory, pools: SlotPools, rng: np.random.Generator):
        self.mem = mem
        self.pools = pools
        self.rng = rng
        self.keys = [np.stack([mem.prog(n).key for n in pools.target]),
                     np.stack([mem.det(n).key for n in pools.det]),
                     np.stack([mem.prog(n).key for n in pools.args]),
                     np.stack([mem.prog(n).key for n in pools.args]),
                     np.stack([mem.prog(n).key for n in pools.args])]
        self.phi = [np.zeros(k.shape[1]) for k in self.keys]

    def _names(self, idx: list[int]) -> tuple[str, str, str, str, str]:
        p = self.pools
        return (p.target[idx[0]], p.det[idx[1]], p.args[idx[2]],
                p.args[idx[3]], p.args[idx[4]])

    def sample(self) -> tuple[list[int], tuple[str, str, str, str, str]]:
        idx = []
        for k, phi in zip(self.keys, self.phi):
            p = softmax(k @ phi)
            idx.append(int(self.rng.choice(len(p), p=p)))
        return idx, self._names(idx)

    def greedy(self) -> tuple[str, str, str, str, str]:
        return self._names([int(np.argmax(k @ phi))
                            for k, phi in zip(self.keys, self.phi)])

    def update(self, idx: list[int], reward: float, lr: float) -> None:
        for seg, (k, phi) in enumerate(zip(self.keys, self.phi)):
            p = softmax(k @ phi)
            e = np.zeros(len(p))
            e[idx[seg]] = 1.0
            phi += lr * reward * (k.T @ (e - p))


def set_candidate(mem: Memory, name: str,
                  comp: tuple[str, str, str, str, str]) -> None:
    """(Re)build the candidate applier's composition embedding in place."""
    mem.prog(name).composition = build_comb_applier(mem, *comp)


def nop_normalize(comp, behaves_same) -> tuple[str, str, str, str, str]:
    """Simplify a converged composition by behavioural dead-code removal.

    Reward cannot distinguish arguments whose calls never change the
    outcome, so the search may converge with junk in such slots.  Each
    argument is replaced by NOP (and the detector by the blind one) when
    the caller-provided equivalence check confirms identical behaviour.
    """
    comp = list(comp)
    for j in (4, 3, 2):
        if comp[j] != "NOP":
            trial = comp.copy()
            trial[j] = "NOP"
            if behaves_same(tuple(trial)):
                comp = trial
    if comp[1] != BLIND_DET:
        trial = comp.copy()
        trial[1] = BLIND_DET
        if behaves_same(tuple(trial)):
            comp = trial
    return tuple(comp)


def applier_rl(mem: Memory, pools: SlotPools, candidate: str, task: str,
               make_case, cfg: ApplierRLConfig, params: nk.CoreParams,
               rng: np.random.Generator,
               battery_envs) -> ApplierTrialResult:
    """Search for a composition of `candidate` that completes `task`.

    ``make_case(rng) -> (env, n, check)`` draws a training environment;
    ``battery_envs`` is a fixed list of (env, n, check) deciding
    convergence of the greedy composition.
    """
    search = ApplierSearch(mem, pools, rng)
    backend = NeuralBackend(params)

    def passes(comp, cases) -> bool:
        set_candidate(mem, candidate, comp)
        for env0, n, check in cases:
            env = env0.clone()
            res = run(mem, mem.prog(task), env, backend,
                      Limits(top_steps=K_ARGS * n, total_steps=TOTAL_GUARD))
            if not (res.returned and check(env)):
                return False
        return True

    for ep in range(1, cfg.max_episodes + 1):
        idx, comp = search.sample()
        set_candidate(mem, candidate, comp)
        env, n, check = make_case(rng)
        res = run(mem, mem.prog(task), env, backend,
                  Limits(top_steps=K_ARGS * n, total_steps=TOTAL_GUARD))
        reward = 1.0 if res.returned and check(env) else -1.0
        search.update(idx, reward, cfg.lr)
        if ep % cfg.check_every == 0:
            comp = search.greedy()
            if passes(comp, battery_envs):
                comp = nop_normalize(comp, lambda c: passes(c, battery_envs))
                set_candidate(mem, candidate, comp)
                return ApplierTrialResult(True, ep, comp)
    return ApplierTrialResult(False, cfg.max_episodes, None)
