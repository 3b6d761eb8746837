"""Seedable phase-noise processes.

Random numbers come from numpy's counter-based Philox generator, keyed by
``(seed, trial_index)``.  Every trial therefore owns an independent stream
whose contents do not depend on which other trials were run, or in what order.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .mzi import ChannelNoise, CouplerNoise, TWO_PI

_U64 = 1 << 64

COUPLER_MODES = ("direct", "per-arm")
ARMS = ("zeta1", "zeta2", "zeta_alpha", "zeta_beta")


@dataclass(frozen=True)
class NoiseModel:
    """Per-arm phase process.

    ``iid``: independent samples uniform on ``[0, range)``.
    ``walk``: reflecting random walk on ``[0, bound]`` with increments uniform on
    ``[-step, step]``; the starting point is uniform on ``[0, bound)``.
    """

    kind: str = "iid"
    range: float = TWO_PI
    step: float = TWO_PI / 1000
    bound: float = TWO_PI

    def __post_init__(self):
        if self.kind not in ("iid", "walk"):
            raise ValueError(f"unknown noise kind {self.kind!r}")
        if self.kind == "iid" and not 0.0 <= self.range <= TWO_PI:
            raise ValueError(f"range must lie in [0, 2pi], got {self.range}")
        if self.kind == "walk":
            if not self.step > 0:
                raise ValueError("walk step must be positive")
            if not 0.0 < self.bound <= TWO_PI:
                raise ValueError("walk bound must lie in (0, 2pi]")

    @classmethod
    def iid(cls, range: float = TWO_PI) -> "NoiseModel":
        return cls(kind="iid", range=float(range))

    @classmethod
    def walk(cls, step: float = TWO_PI / 1000, bound: float = TWO_PI) -> "NoiseModel":
        return cls(kind="walk", step=float(step), bound=float(bound))


QUIET = NoiseModel.iid(0.0)
FULL = NoiseModel.iid(TWO_PI)


@dataclass
class NoiseStream:
    """A single-owner random stream for one trial.

    ``cursor`` counts the uniforms consumed so far.  Walk processes keep their
    unfolded position per arm in ``walk_state``.
    """

    seed: int
    trial_index: int = 0
    cursor: int = 0
    walk_state: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        if not 0 <= self.seed < _U64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        if not 0 <= self.trial_index < _U64:
            raise ValueError("trial_index must be a 64-bit unsigned integer")
        self._gen = np.random.Generator(np.random.Philox(key=np.array([self.seed, self.trial_index], dtype=np.uint64)))
        if self.cursor:
            self._gen.random(self.cursor)

    def uniforms(self, size) -> np.ndarray:
        out = self._gen.random(size)
        self.cursor += out.size
        return out


def substream(seed: int, trial_index: int) -> NoiseStream:
    """Fresh stream for ``trial_index`` under ``seed``; a pure function of its arguments."""
    return NoiseStream(seed=seed, trial_index=trial_index)


def trial_key(*parts: int, width: int = 20) -> int:
    """Pack small non-negative integers into one 64-bit trial index."""
    key = 0
    for p in parts:
        if not 0 <= p < (1 << width):
            raise ValueError(f"trial key component {p} out of range")
        key = (key << width) | p
    if key >= _U64:
        raise ValueError("too many trial key components")
    return key


@dataclass(frozen=True)
class NoiseVector:
    """One draw (or a batch of draws, when fields are arrays) of the four arm phases."""

    zeta1: float | np.ndarray
    zeta2: float | np.ndarray
    zeta_alpha: float | np.ndarray
    zeta_beta: float | np.ndarray

    @property
    def channel(self) -> ChannelNoise:
        return ChannelNoise(self.zeta1, self.zeta2)

    @property
    def coupler(self) -> CouplerNoise:
        return CouplerNoise(self.zeta_alpha, self.zeta_beta)

    @property
    def zeta(self):
        return self.channel.zeta

    @property
    def zeta_double_prime(self):
        return self.coupler.zeta_double_prime

    def __len__(self):
        return int(np.size(self.zeta1))

    def row(self, i: int) -> "NoiseVector":
        return NoiseVector(*(float(np.asarray(getattr(self, a)).reshape(-1)[i]) for a in ARMS))


def _fold(y: np.ndarray, bound: float) -> np.ndarray:
    m = np.remainder(y, 2.0 * bound)
    return np.where(m > bound, 2.0 * bound - m, m)


def _arm(stream: NoiseStream, arm: str, model: NoiseModel, u: np.ndarray) -> np.ndarray:
    if model.kind == "iid":
        return u * model.range
    incr = model.step * (2.0 * u - 1.0)
    start = stream.walk_state.get(arm)
    if start is None:
        incr[0] = u[0] * model.bound
        start = 0.0
    path = start + np.cumsum(incr)
    stream.walk_state[arm] = float(path[-1])
    return _fold(path, model.bound)


def sample_batch(
    stream: NoiseStream,
    chan_model: NoiseModel,
    coupler_model: NoiseModel,
    size: int,
    coupler_mode: str = "per-arm",
) -> NoiseVector:
    """``size`` consecutive draws; row ``k`` equals the k-th of ``size`` calls to :func:`sample`.

    In ``direct`` mode zeta_alpha carries zeta'' itself and zeta_beta is pinned to 0.
    """
    if coupler_mode not in COUPLER_MODES:
        raise ValueError(f"coupler_mode must be one of {COUPLER_MODES}")
    if size < 1:
        raise ValueError("size must be >= 1")
    u = stream.uniforms((size, 4))
    models = (chan_model, chan_model, coupler_model, coupler_model)
    cols = [_arm(stream, arm, m, u[:, k].copy()) for k, (arm, m) in enumerate(zip(ARMS, models))]
    if coupler_mode == "direct":
        cols[3] = np.zeros(size)
    return NoiseVector(*cols)


def sample(
    stream: NoiseStream,
    chan_model: NoiseModel,
    coupler_model: NoiseModel,
    coupler_mode: str = "per-arm",
) -> NoiseVector:
    """One draw of (zeta1, zeta2, zeta_alpha, zeta_beta); advances the stream."""
    return sample_batch(stream, chan_model, coupler_model, 1, coupler_mode).row(0)

