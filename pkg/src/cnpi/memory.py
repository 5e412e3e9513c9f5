"""Growable key-value memories for programs and detectors.

Both memories are append-only: entries get dense integer ids in registration
order and are addressed at run time by key similarity (dot product against
the stored key matrix, argmax, ties to the lowest id).  Keys are random unit
vectors, so freshly drawn keys are almost surely resolvable; the applier
format stores exact keys, which makes lookup collisions a non-issue in
practice and exact replay possible in tests.

Program payloads by kind:

* ``combinator``: a live embedding vector fed to the core (trainable until
  the owner freezes it).
* ``applier``: a fixed composition vector (see :mod:`cnpi.applier`).
* ``act`` / ``builtin_act``: no payload; the interpreter dispatches them to
  the environment.

Detector payloads are small models producing the probability that the
detector emits bit 1.  Convention: bit 0 means the detector's condition
HOLDS (take the first branch), bit 1 means it fails (take the second).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Protocol

import numpy as np

D_KEY = 16
BETA = 0.5   # detector threshold: bit = 1 iff p >= BETA

PROGRAM_KINDS = ("combinator", "applier", "act", "builtin_act")


def sigmoid(x: float) -> float:
    return float(1.0 / (1.0 + np.exp(-x)))


def random_unit_key(rng: np.random.Generator) -> np.ndarray:
    v = rng.normal(size=D_KEY)
    return v / np.linalg.norm(v)


class EnvObs(Protocol):
    """What detector models need from an environment."""

    def eval_predicate(self, name: str) -> int: ...
    def observe(self, name: str) -> np.ndarray: ...


@dataclass
class BlindModel:
    """Constant detector: its vacuous condition always holds (bit 0)."""

    def prob(self, env: EnvObs) -> float:
        return 0.0


@dataclass
class BuiltinModel:
    """Hard-wired predicate evaluated by the environment (exact 0/1)."""

    predicate: str

    def prob(self, env: EnvObs) -> float:
        return float(env.eval_predicate(self.predicate))


@dataclass
class LinearModel:
    """Logistic read-out over a named environment observation (trainable)."""

    obs: str
    w: np.ndarray
    b: float

    def prob(self, env: EnvObs) -> float:
        return sigmoid(float(self.w @ env.observe(self.obs)) + self.b)


DetectorModel = BlindModel | BuiltinModel | LinearModel


@dataclass
class ProgramEntry:
    id: int
    name: str
    kind: str
    key: np.ndarray
    embedding: np.ndarray | None = None   # combinator kind only
    composition: np.ndarray | None = None  # applier kind only


@dataclass
class DetectorEntry:
    id: int
    name: str
    key: np.ndarray
    model: DetectorModel


def _lookup(keys: np.ndarray, query: np.ndarray) -> int:
    """Argmax dot-product address; ties resolve to the lowest id."""
    if keys.shape[0] == 0:
        raise LookupError("empty memory")
    return int(np.argmax(keys @ query))


@dataclass
class Memory:
    programs: list[ProgramEntry] = field(default_factory=list)
    detectors: list[DetectorEntry] = field(default_factory=list)
    _prog_by_name: dict[str, int] = field(default_factory=dict)
    _det_by_name: dict[str, int] = field(default_factory=dict)

    # -- registration -----------------------------------------------------
    def register_program(self, name: str, kind: str, key: np.ndarray,
                         embedding: np.ndarray | None = None,
                         composition: np.ndarray | None = None) -> ProgramEntry:
        if kind not in PROGRAM_KINDS:
            raise ValueError(f"unknown program kind: {kind!r}")
        if name in self._prog_by_name:
            raise ValueError(f"program name already registered: {name!r}")
        if kind == "combinator" and embedding is None:
            raise ValueError("combinator entries need an embedding")
        if kind == "applier" and composition is None:
            raise ValueError("applier entries need a composition vector")
        entry = ProgramEntry(len(self.programs), name, kind,
                             np.asarray(key, dtype=float),
                             embedding, composition)
        self.programs.append(entry)
        self._prog_by_name[name] = entry.id
        return entry

    def register_detector(self, name: str, key: np.ndarray,
                          model: DetectorModel) -> DetectorEntry:
        if name in self._det_by_name:
            raise ValueError(f"detector name already registered: {name!r}")
        entry = DetectorEntry(len(self.detectors), name,
                              np.asarray(key, dtype=float), model)
        self.detectors.append(entry)
        self._det_by_name[name] = entry.id
        return entry

    # -- addressing -------------------------------------------------------
    def prog_keys(self) -> np.ndarray:
        if not self.programs:
            raise LookupError("empty program memory")
        return np.stack([p.key for p in self.programs])

    def det_keys(self) -> np.ndarray:
        if not self.detectors:
            raise LookupError("empty detector memory")
        return np.stack([d.key for d in self.detectors])

    def lookup_program(self, query: np.ndarray) -> ProgramEntry:
        return self.programs[_lookup(self.prog_keys(), query)]

    def lookup_detector(self, query: np.ndarray) -> DetectorEntry:
        return self.detectors[_lookup(self.det_keys(), query)]

    def prog(self, name: str) -> ProgramEntry:
        return self.programs[self._prog_by_name[name]]

    def det(self, name: str) -> DetectorEntry:
        return self.detectors[self._det_by_name[name]]

    def has_prog(self, name: str) -> bool:
        return name in self._prog_by_name

    def has_det(self, name: str) -> bool:
        return name in self._det_by_name

    # -- views ------------------------------------------------------------
    def combinators(self) -> list[ProgramEntry]:
        return [p for p in self.programs if p.kind == "combinator"]

    def fork(self) -> "Memory":
        """Shallow-ish copy for trial episodes: entry lists are copied so the
        fork can register candidates without touching the original; the
        shared entries themselves are NOT copied (embeddings stay live)."""
        m = Memory(list(self.programs), list(self.detectors),
                   dict(self._prog_by_name), dict(self._det_by_name))
        return m


def detector_bit(model: DetectorModel, env: EnvObs) -> int:
    return int(model.prob(env) >= BETA)
