"""Reproducible studies over the enumerated behaviour set.

Three studies, all pure functions returning plain dicts (scripts and tests
handle any serialization):

- ``full_set_capacity``: can a 5-cell core learn every enumerated behaviour
  perfectly, seed after seed?
- ``mode_trend``: embedding-as-initial-state vs embedding-as-input accuracy
  across core widths under a fixed epoch budget.
- ``retention``: train half the set, freeze the core, learn the other half
  through embeddings alone, and re-test the old half for forgetting.

The capacity and retention studies use the full-batch Adam recipe (see
training.train_sl_adam); plain per-segment SGD walls out well below 100%
on sets this large at small widths.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import nnkernel as nk
from .combinators import CombinatorSpec, enumerate_full_set
from .training import (AdamConfig, SLResult, build_tasks, emb_matrix,
                       fresh_embeddings, pack_tasks, packed_accuracy,
                       train_sl_adam)


def _adam_cfg(max_epochs: int, seed: int) -> AdamConfig:
    """The settled full-set recipe: gentle floor, patient decay."""
    return AdamConfig(lr=3e-3, max_epochs=max_epochs, patience=400,
                      decay=0.5, min_lr=1e-3, seed=seed)


def train_full_set(specs: list[CombinatorSpec], hidden: int, mode: str,
                   seed: int, max_epochs: int = 24000,
                   log=None) -> tuple[nk.CoreParams, dict[str, np.ndarray], SLResult]:
    """One training run over the canonical segments of ``specs``."""
    tasks = build_tasks(specs, "canonical")
    rng = np.random.default_rng(seed)
    params = nk.init_params(hidden, mode, rng)
    embs = fresh_embeddings(specs, hidden, rng)
    res = train_sl_adam(params, embs, tasks, _adam_cfg(max_epochs, seed),
                        log=log)
    return params, embs, res


def full_set_capacity(hidden: int = 5, seeds: int = 5,
                      max_epochs: int = 24000, log=None) -> dict:
    """Per-seed accuracy of a ``hidden``-cell core on the enumerated set."""
    specs = enumerate_full_set()
    runs = []
    for seed in range(seeds):
        _, _, res = train_full_set(specs, hidden, "state0", seed,
                                   max_epochs, log=log)
        runs.append({"seed": seed, "accuracy": res.accuracy,
                     "epochs": res.epochs})
        if log is not None:
            log("capacity/final_accuracy", seed, res.accuracy)
    wins = sum(r["accuracy"] >= 1.0 for r in runs)
    return {"hidden": hidden, "set_size": len(specs), "runs": runs,
            "perfect_seeds": wins, "seeds": seeds}


def mode_trend(hiddens: tuple[int, ...] = (2, 3, 4, 5), seeds: int = 3,
               budget: int = 3000, log=None) -> list[dict]:
    """Mean accuracy per (width, embedding mode) under a fixed budget."""
    specs = enumerate_full_set()
    rows = []
    for hidden in hiddens:
        row: dict = {"hidden": hidden}
        for mode in ("state0", "input"):
            accs = []
            for seed in range(seeds):
                _, _, res = train_full_set(specs, hidden, mode, 100 + seed,
                                           budget)
                accs.append(res.accuracy)
            row[mode] = float(np.mean(accs))
            if log is not None:
                log(f"trend/{mode}", hidden, row[mode])
        rows.append(row)
    return rows


def retention(hidden: int = 16, seed: int = 0, max_epochs: int = 8000,
              log=None) -> dict:
    """Half/half split: old jointly, then new with the core frozen.

    Returns accuracies plus ``core_moved``, which must stay False: the old
    half keeps exactly its behaviour because nothing it depends on changed.
    """
    specs = enumerate_full_set()
    rng = np.random.default_rng(seed)
    order = rng.permutation(len(specs))
    half = len(specs) // 2
    old = [specs[i] for i in order[:half]]
    new = [specs[i] for i in order[half:]]
    old_tasks = build_tasks(old, "canonical")
    new_tasks = build_tasks(new, "canonical")

    params = nk.init_params(hidden, "state0", rng)
    embs = fresh_embeddings(old, hidden, rng)
    res_old = train_sl_adam(params, embs, old_tasks,
                            _adam_cfg(max_epochs, seed), log=log)

    frozen = params.flat().copy()
    embs.update(fresh_embeddings(new, hidden, rng))
    cfg_new = _adam_cfg(max_epochs, seed)
    cfg_new.train_core = False
    res_new = train_sl_adam(params, embs, new_tasks, cfg_new,
                            trainable_embs={s.name for s in new}, log=log)

    packed_old = pack_tasks(old_tasks)
    old_retest = packed_accuracy(params, emb_matrix(embs, packed_old.emb_names),
                                 packed_old)
    return {
        "hidden": hidden,
        "old_accuracy": res_old.accuracy,
        "new_accuracy": res_new.accuracy,
        "old_retest": old_retest,
        "core_moved": bool((params.flat() != frozen).any()),
        "old_size": len(old), "new_size": len(new),
    }
