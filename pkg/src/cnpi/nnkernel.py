"""Dense numeric kernel for the interpreter core.

A single-layer LSTM plus two decoders (return flag, slot scores), written
directly over numpy with hand-derived gradients.  The core is tiny (default
16 cells) and is stepped one condition bit at a time by the interpreter, so
everything here is optimised for small-vector stepwise use: no batching, no
autograd, explicit tapes.

Two ways of injecting a program embedding are supported:

* ``state0``: the embedding initialises both the hidden and the cell state;
  the per-step input is just the one-hot condition bit.
* ``input``: hidden and cell start at zero; the embedding is concatenated to
  the condition one-hot at every step.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

N_SLOTS = 9          # frame width: self + 3 args + 5 built-in slots
COND_DIM = 2         # condition bit is fed as a one-hot pair
ALPHA = 0.5          # return-flag decision threshold
INIT_SCALE = 0.1     # uniform init range for all trainable tensors

MODES = ("state0", "input")


class NumericError(RuntimeError):
    """Raised when a forward step produces a non-finite value."""


def sigmoid(x):
    return 1.0 / (1.0 + np.exp(-x))


@dataclass
class CoreParams:
    """All trainable tensors of the core.  ``w`` is the stacked gate matrix
    with row blocks (input, forget, output, candidate) acting on the
    concatenation [step input; previous hidden]."""

    hidden: int
    mode: str
    w: np.ndarray        # (4H, in_dim + H)
    b: np.ndarray        # (4H,)
    end_w: np.ndarray    # (H,)
    end_b: float
    slot_w: np.ndarray   # (N_SLOTS, H)
    slot_b: np.ndarray   # (N_SLOTS,)

    @property
    def in_dim(self) -> int:
        return COND_DIM + (self.hidden if self.mode == "input" else 0)

    def copy(self) -> "CoreParams":
        return CoreParams(
            self.hidden, self.mode, self.w.copy(), self.b.copy(),
            self.end_w.copy(), float(self.end_b),
            self.slot_w.copy(), self.slot_b.copy())

    def flat(self) -> np.ndarray:
        """All parameters as one vector (used by the finite-difference tests)."""
        return np.concatenate([
            self.w.ravel(), self.b, self.end_w, [self.end_b],
            self.slot_w.ravel(), self.slot_b])

    def set_flat(self, vec: np.ndarray) -> None:
        pos = 0
        for arr in (self.w, self.b, self.end_w):
            n = arr.size
            arr[...] = vec[pos:pos + n].reshape(arr.shape)
            pos += n
        self.end_b = float(vec[pos]); pos += 1
        for arr in (self.slot_w, self.slot_b):
            n = arr.size
            arr[...] = vec[pos:pos + n].reshape(arr.shape)
            pos += n
        assert pos == vec.size


def init_params(hidden: int, mode: str, rng: np.random.Generator) -> CoreParams:
    if mode not in MODES:
        raise ValueError(f"unknown embedding mode: {mode!r}")
    in_dim = COND_DIM + (hidden if mode == "input" else 0)
    u = lambda *shape: rng.uniform(-INIT_SCALE, INIT_SCALE, shape)
    return CoreParams(
        hidden=hidden, mode=mode,
        w=u(4 * hidden, in_dim + hidden), b=u(4 * hidden),
        end_w=u(hidden), end_b=float(u(1)[0]),
        slot_w=u(N_SLOTS, hidden), slot_b=u(N_SLOTS))


def init_embedding(hidden: int, rng: np.random.Generator) -> np.ndarray:
    """Fresh program embedding; always core-sized regardless of mode."""
    return rng.uniform(-INIT_SCALE, INIT_SCALE, hidden)


@dataclass
class Grads:
    w: np.ndarray
    b: np.ndarray
    end_w: np.ndarray
    end_b: float
    slot_w: np.ndarray
    slot_b: np.ndarray
    emb: np.ndarray      # gradient w.r.t. the segment's program embedding

    def add_(self, other: "Grads") -> "Grads":
        self.w += other.w; self.b += other.b
        self.end_w += other.end_w; self.end_b += other.end_b
        self.slot_w += other.slot_w; self.slot_b += other.slot_b
        self.emb += other.emb
        return self


def zero_grads(params: CoreParams) -> Grads:
    return Grads(
        np.zeros_like(params.w), np.zeros_like(params.b),
        np.zeros_like(params.end_w), 0.0,
        np.zeros_like(params.slot_w), np.zeros_like(params.slot_b),
        np.zeros(params.hidden))


def clip_grads(grads: Grads, max_norm: float) -> Grads:
    """Scale the whole gradient down to ``max_norm`` if it exceeds it.
    Keeps single aggressive steps from saturating the gates."""
    total = 0.0
    for arr in (grads.w, grads.b, grads.end_w, grads.slot_w, grads.slot_b,
                grads.emb):
        total += float(np.sum(arr * arr))
    total += grads.end_b * grads.end_b
    norm = np.sqrt(total)
    if norm > max_norm:
        s = max_norm / norm
        grads.w *= s; grads.b *= s
        grads.end_w *= s; grads.end_b *= s
        grads.slot_w *= s; grads.slot_b *= s
        grads.emb *= s
    return grads


def sgd_apply(params: CoreParams, grads: Grads, lr: float) -> None:
    """Plain ascent step: params move along the accumulated gradient."""
    params.w += lr * grads.w
    params.b += lr * grads.b
    params.end_w += lr * grads.end_w
    params.end_b += lr * grads.end_b
    params.slot_w += lr * grads.slot_w
    params.slot_b += lr * grads.slot_b


@dataclass
class Tape:
    """Per-step caches of one invocation (fresh state to return).

    Replaying the recorded inputs through the same parameters reproduces the
    recorded activations bitwise; backward consumes the caches in reverse.
    """

    emb: np.ndarray
    active: int                       # number of selectable slots this segment
    conds: list[int] = field(default_factory=list)
    xs: list[np.ndarray] = field(default_factory=list)
    h_prev: list[np.ndarray] = field(default_factory=list)
    c_prev: list[np.ndarray] = field(default_factory=list)
    gi: list[np.ndarray] = field(default_factory=list)
    gf: list[np.ndarray] = field(default_factory=list)
    go: list[np.ndarray] = field(default_factory=list)
    gg: list[np.ndarray] = field(default_factory=list)
    cs: list[np.ndarray] = field(default_factory=list)
    hs: list[np.ndarray] = field(default_factory=list)
    rs: list[float] = field(default_factory=list)
    scores: list[np.ndarray] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.xs)


@dataclass
class CoreState:
    h: np.ndarray
    c: np.ndarray


def init_state(params: CoreParams, emb: np.ndarray) -> CoreState:
    """Start an invocation.  In ``state0`` mode the embedding is copied into
    both the hidden and the cell state; in ``input`` mode both start at zero
    and the embedding rides along with every step input instead."""
    if emb.shape != (params.hidden,):
        raise ValueError("embedding size must equal the core size")
    if params.mode == "state0":
        return CoreState(emb.astype(float).copy(), emb.astype(float).copy())
    return CoreState(np.zeros(params.hidden), np.zeros(params.hidden))


def step(params: CoreParams, state: CoreState, cond: int, emb: np.ndarray,
         tape: Tape | None = None) -> tuple[CoreState, float, np.ndarray]:
    """One decision step: feed the condition bit, return (state', r, scores).

    ``r`` is the logistic return flag, ``scores`` the raw slot scores (the
    caller masks inactive slots).  ``emb`` is the invocation's program
    embedding; it only enters the step input in ``input`` mode but is always
    required so call sites cannot silently drop it.  When a tape is given,
    caches are appended for a later backward pass.
    """
    H = params.hidden
    x = np.zeros(params.in_dim)
    x[cond] = 1.0
    if params.mode == "input":
        x[COND_DIM:] = emb
    a = params.w[:, :params.in_dim] @ x + params.w[:, params.in_dim:] @ state.h + params.b
    gi = sigmoid(a[:H])
    gf = sigmoid(a[H:2 * H])
    go = sigmoid(a[2 * H:3 * H])
    gg = np.tanh(a[3 * H:])
    c_new = gf * state.c + gi * gg
    tanh_c = np.tanh(c_new)
    h_new = go * tanh_c
    r = float(sigmoid(params.end_w @ h_new + params.end_b))
    scores = params.slot_w @ h_new + params.slot_b
    if not (np.isfinite(h_new).all() and np.isfinite(scores).all() and np.isfinite(r)):
        raise NumericError("non-finite activation in core step")
    if tape is not None:
        tape.conds.append(cond)
        tape.xs.append(x)
        tape.h_prev.append(state.h)
        tape.c_prev.append(state.c)
        tape.gi.append(gi); tape.gf.append(gf); tape.go.append(go); tape.gg.append(gg)
        tape.cs.append(c_new); tape.hs.append(h_new)
        tape.rs.append(r); tape.scores.append(scores)
    return CoreState(h_new, c_new), r, scores


def masked_log_softmax(scores: np.ndarray, active: int) -> np.ndarray:
    """Log-probabilities over the first ``active`` slots (rest stay -inf)."""
    out = np.full(scores.shape, -np.inf)
    s = scores[:active]
    m = s.max()
    logz = m + np.log(np.exp(s - m).sum())
    out[:active] = s - logz
    return out


def masked_softmax(scores: np.ndarray, active: int) -> np.ndarray:
    out = np.zeros(scores.shape)
    s = scores[:active]
    e = np.exp(s - s.max())
    out[:active] = e / e.sum()
    return out


def argmax_slot(scores: np.ndarray, active: int) -> int:
    """Highest-scoring selectable slot; ties resolve to the lowest index."""
    return int(np.argmax(scores[:active]))


@dataclass(frozen=True)
class StepTarget:
    """Training signal for one decision step.

    ``slot``/``slot_weight`` drive the slot log-likelihood term (slot may be
    None when the step selects nothing, e.g. a pure return step);
    ``ret``/``ret_weight`` drive the return-flag log-likelihood term.
    Weights of zero drop a term entirely, which is how the reinforcement
    update switches its pieces on and off.
    """

    slot: int | None
    ret: int
    slot_weight: float = 1.0
    ret_weight: float = 1.0


def forward_segment(params: CoreParams, emb: np.ndarray, conds: list[int],
                    active: int) -> Tape:
    """Run one invocation over a fixed condition sequence, recording a tape."""
    if not conds:
        raise ValueError("empty condition sequence")
    tape = Tape(emb=emb.astype(float), active=active)
    state = init_state(params, tape.emb)
    for cond in conds:
        state, _, _ = step(params, state, cond, tape.emb, tape)
    return tape


def segment_log_likelihood(tape: Tape, targets: list[StepTarget]) -> float:
    """Weighted log-likelihood of the targets under the recorded outputs."""
    if len(targets) != len(tape):
        raise ValueError("targets must align with tape steps")
    total = 0.0
    for t, tgt in enumerate(targets):
        if tgt.slot is not None and tgt.slot_weight != 0.0:
            logp = masked_log_softmax(tape.scores[t], tape.active)
            total += tgt.slot_weight * float(logp[tgt.slot])
        if tgt.ret_weight != 0.0:
            r = tape.rs[t]
            total += tgt.ret_weight * float(np.log(r if tgt.ret else 1.0 - r))
    return total


def backward_segment(params: CoreParams, tape: Tape,
                     targets: list[StepTarget]) -> Grads:
    """Gradient of the weighted log-likelihood w.r.t. params and embedding."""
    if len(tape) == 0:
        raise ValueError("cannot run backward over an empty tape")
    if len(targets) != len(tape):
        raise ValueError("targets must align with tape steps")
    H = params.hidden
    in_dim = params.in_dim
    g = zero_grads(params)
    dh_next = np.zeros(H)
    dc_next = np.zeros(H)
    for t in reversed(range(len(tape))):
        tgt = targets[t]
        h = tape.hs[t]
        dh = dh_next.copy()
        # decoder contributions at this step
        if tgt.slot is not None and tgt.slot_weight != 0.0:
            p = masked_softmax(tape.scores[t], tape.active)
            ds = -p
            ds[tgt.slot] += 1.0
            ds *= tgt.slot_weight
            g.slot_w += np.outer(ds, h)
            g.slot_b += ds
            dh += params.slot_w.T @ ds
        if tgt.ret_weight != 0.0:
            dr = tgt.ret_weight * (tgt.ret - tape.rs[t])  # d log p / d preact
            g.end_w += dr * h
            g.end_b += dr
            dh += dr * params.end_w
        # backprop through h = o * tanh(c)
        gi, gf, go, gg = tape.gi[t], tape.gf[t], tape.go[t], tape.gg[t]
        c = tape.cs[t]
        tanh_c = np.tanh(c)
        dc = dc_next + dh * go * (1.0 - tanh_c * tanh_c)
        do = dh * tanh_c
        df = dc * tape.c_prev[t]
        di = dc * gg
        dg = dc * gi
        da = np.concatenate([
            di * gi * (1.0 - gi),
            df * gf * (1.0 - gf),
            do * go * (1.0 - go),
            dg * (1.0 - gg * gg)])
        xh = np.concatenate([tape.xs[t], tape.h_prev[t]])
        g.w += np.outer(da, xh)
        g.b += da
        dxh = params.w.T @ da
        if params.mode == "input":
            g.emb += dxh[COND_DIM:in_dim]
        dh_next = dxh[in_dim:]
        dc_next = dc * gf
    if params.mode == "state0":
        g.emb += dh_next + dc_next  # embedding was both h0 and c0
    return g


# ---------------------------------------------------------------------------
# Batched kernel.  Same math as the per-segment functions above, over a
# padded (B, T) block of segments at once.  Rows shorter than T are padded;
# padded steps run in the forward pass but carry zero target weight, and the
# prefix mask guarantees no gradient can flow out of them (their decoder
# terms vanish and nothing later feeds back into them).

@dataclass
class BatchTape:
    """Forward caches for a padded block of segments (leading dim = time)."""

    emb: np.ndarray      # (B, H) one embedding row per segment
    conds: np.ndarray    # (B, T) condition bits, zero-padded
    mask: np.ndarray     # (B, T) bool prefix mask of valid steps
    active: np.ndarray   # (B,) selectable slot count per segment
    xs: np.ndarray       # (T, B, in_dim)
    h_prev: np.ndarray   # (T, B, H)
    c_prev: np.ndarray   # (T, B, H)
    gi: np.ndarray
    gf: np.ndarray
    go: np.ndarray
    gg: np.ndarray
    cs: np.ndarray
    hs: np.ndarray
    rs: np.ndarray       # (T, B)
    scores: np.ndarray   # (T, B, N_SLOTS)


def slot_mask(active: np.ndarray) -> np.ndarray:
    """(B, N_SLOTS) bool mask of selectable slots per row."""
    return np.arange(N_SLOTS)[None, :] < active[:, None]


def masked_softmax_batch(scores: np.ndarray, active: np.ndarray) -> np.ndarray:
    """Row-wise softmax over each row's first ``active`` slots, zero outside."""
    m = slot_mask(active)
    s = np.where(m, scores, -np.inf)
    s = s - s.max(axis=1, keepdims=True)
    e = np.where(m, np.exp(s), 0.0)
    return e / e.sum(axis=1, keepdims=True)


def forward_batch(params: CoreParams, embs: np.ndarray, conds: np.ndarray,
                  mask: np.ndarray, active: np.ndarray) -> BatchTape:
    """Run a padded block of segments; returns the full forward cache."""
    B, T = conds.shape
    H = params.hidden
    in_dim = params.in_dim
    if embs.shape != (B, H):
        raise ValueError("embedding block must be (batch, hidden)")
    embs = embs.astype(float)
    if params.mode == "state0":
        h = embs.copy()
        c = embs.copy()
    else:
        h = np.zeros((B, H))
        c = np.zeros((B, H))
    shape = (T, B, H)
    tape = BatchTape(
        emb=embs, conds=conds, mask=mask, active=active,
        xs=np.zeros((T, B, in_dim)),
        h_prev=np.zeros(shape), c_prev=np.zeros(shape),
        gi=np.zeros(shape), gf=np.zeros(shape),
        go=np.zeros(shape), gg=np.zeros(shape),
        cs=np.zeros(shape), hs=np.zeros(shape),
        rs=np.zeros((T, B)), scores=np.zeros((T, B, N_SLOTS)))
    rows = np.arange(B)
    for t in range(T):
        x = np.zeros((B, in_dim))
        x[rows, conds[:, t]] = 1.0
        if params.mode == "input":
            x[:, COND_DIM:] = embs
        a = x @ params.w[:, :in_dim].T + h @ params.w[:, in_dim:].T + params.b
        gi = 1.0 / (1.0 + np.exp(-a[:, :H]))
        gf = 1.0 / (1.0 + np.exp(-a[:, H:2 * H]))
        go = 1.0 / (1.0 + np.exp(-a[:, 2 * H:3 * H]))
        gg = np.tanh(a[:, 3 * H:])
        c_new = gf * c + gi * gg
        tanh_c = np.tanh(c_new)
        h_new = go * tanh_c
        r = 1.0 / (1.0 + np.exp(-(h_new @ params.end_w + params.end_b)))
        scores = h_new @ params.slot_w.T + params.slot_b
        tape.xs[t] = x
        tape.h_prev[t] = h
        tape.c_prev[t] = c
        tape.gi[t] = gi; tape.gf[t] = gf; tape.go[t] = go; tape.gg[t] = gg
        tape.cs[t] = c_new; tape.hs[t] = h_new
        tape.rs[t] = r; tape.scores[t] = scores
        h, c = h_new, c_new
    if not (np.isfinite(tape.hs).all() and np.isfinite(tape.scores).all()
            and np.isfinite(tape.rs).all()):
        raise NumericError("non-finite activation in batched core step")
    return tape


def backward_batch(params: CoreParams, tape: BatchTape,
                   slot_tgt: np.ndarray, ret_tgt: np.ndarray,
                   slot_wt: np.ndarray, ret_wt: np.ndarray,
                   ) -> tuple[Grads, np.ndarray]:
    """Gradient of the summed weighted log-likelihood over the block.

    ``slot_tgt`` (B, T) holds -1 where a step has no slot target; weights of
    zero (and every padded step must carry zero weight) drop terms exactly as
    in the per-segment backward.  Returns the core gradient summed over the
    block plus one embedding gradient row per segment.
    """
    T, B, H = tape.hs.shape
    in_dim = params.in_dim
    g = zero_grads(params)
    emb_g = np.zeros((B, H))
    dh_next = np.zeros((B, H))
    dc_next = np.zeros((B, H))
    rows = np.arange(B)
    for t in reversed(range(T)):
        h = tape.hs[t]
        dh = dh_next.copy()
        has_slot = (slot_tgt[:, t] >= 0) & (slot_wt[:, t] != 0.0)
        if has_slot.any():
            p = masked_softmax_batch(tape.scores[t], tape.active)
            ds = -p
            ds[rows, np.maximum(slot_tgt[:, t], 0)] += 1.0
            ds *= (slot_wt[:, t] * has_slot)[:, None]
            g.slot_w += ds.T @ h
            g.slot_b += ds.sum(axis=0)
            dh += ds @ params.slot_w
        dr = ret_wt[:, t] * (ret_tgt[:, t] - tape.rs[t])
        g.end_w += dr @ h
        g.end_b += float(dr.sum())
        dh += dr[:, None] * params.end_w[None, :]
        gi, gf, go, gg = tape.gi[t], tape.gf[t], tape.go[t], tape.gg[t]
        tanh_c = np.tanh(tape.cs[t])
        dc = dc_next + dh * go * (1.0 - tanh_c * tanh_c)
        do = dh * tanh_c
        df = dc * tape.c_prev[t]
        di = dc * gg
        dg = dc * gi
        da = np.concatenate([
            di * gi * (1.0 - gi),
            df * gf * (1.0 - gf),
            do * go * (1.0 - go),
            dg * (1.0 - gg * gg)], axis=1)
        xh = np.concatenate([tape.xs[t], tape.h_prev[t]], axis=1)
        g.w += da.T @ xh
        g.b += da.sum(axis=0)
        dxh = da @ params.w
        if params.mode == "input":
            emb_g += dxh[:, COND_DIM:in_dim]
        dh_next = dxh[:, in_dim:]
        dc_next = dc * gf
    if params.mode == "state0":
        emb_g += dh_next + dc_next
    return g, emb_g


def greedy_batch_ok(tape: BatchTape, slot_tgt: np.ndarray,
                    ret_tgt: np.ndarray) -> np.ndarray:
    """(B,) bool: thresholded decisions reproduce each segment exactly."""
    T, B, _ = tape.hs.shape
    ok = np.ones(B, dtype=bool)
    m = slot_mask(tape.active)
    for t in range(T):
        valid = tape.mask[:, t]
        ret_hit = (tape.rs[t] >= ALPHA) == (ret_tgt[:, t] > 0.5)
        masked = np.where(m, tape.scores[t], -np.inf)
        pick = masked.argmax(axis=1)
        need_slot = slot_tgt[:, t] >= 0
        slot_hit = ~need_slot | (pick == slot_tgt[:, t])
        ok &= ~valid | (ret_hit & slot_hit)
    return ok
