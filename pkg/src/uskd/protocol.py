"""Key-distribution sessions over the round-trip interferometer.

Round structure: Bob picks phi, light makes the outbound pass to Alice (whose
D1/D2 see the alpha/beta ports), Alice applies psi and returns it through the
coupling section, and Bob's D4/D3 see the A/B ports.  D4 means identity (bases
equal), D3 inversion; Bob thereby learns Alice's basis, which is the shared key
bit (0 for basis Zero, 1 for basis Pi).
"""

from __future__ import annotations

import enum
from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from . import mzi, optics
from .mzi import TWO_PI, ChannelNoise
from .noise import NoiseModel, NoiseStream, NoiseVector, sample, substream


class Basis(enum.IntEnum):
    ZERO = 0
    PI = 1

    @property
    def phase(self) -> float:
        return 0.0 if self is Basis.ZERO else np.pi


class EveKind(str, enum.Enum):
    NONE = "none"
    INTENSITY_TAP = "tap"
    INTERFEROMETRIC_TAP = "mzi"


@dataclass(frozen=True)
class EveStrategy:
    """Passive eavesdropper on the outbound channels.

    ``zeta_prior_range`` is the width of the uniform prior Eve holds over the
    channel phase difference; 2pi means she knows nothing about it, 0 means she
    assumes zeta = 0 (diagnostic mode).
    """

    kind: EveKind = EveKind.NONE
    zeta_prior_range: float = TWO_PI
    prior_points: int = 720
    readout_sigma: float = 0.01

    def __post_init__(self):
        object.__setattr__(self, "kind", EveKind(self.kind))
        if not 0.0 <= self.zeta_prior_range <= TWO_PI:
            raise ValueError("zeta_prior_range must lie in [0, 2pi]")

    @classmethod
    def diagnostic(cls) -> "EveStrategy":
        return cls(kind=EveKind.INTERFEROMETRIC_TAP, zeta_prior_range=0.0)


@dataclass(frozen=True)
class SessionConfig:
    rounds: int = 1000
    guard_band: float = 0.1
    chan_model: NoiseModel = field(default_factory=lambda: NoiseModel.iid(TWO_PI))
    coupler_model: NoiseModel = field(default_factory=lambda: NoiseModel.iid(0.0))
    coupler_mode: str = "per-arm"
    eve: EveStrategy = field(default_factory=EveStrategy)
    seed: int = 0

    def __post_init__(self):
        if self.rounds < 1:
            raise ValueError("rounds must be >= 1")
        if not 0.0 <= self.guard_band < 0.5:
            raise ValueError("guard_band must lie in [0, 0.5)")


@dataclass(frozen=True)
class RoundRecord:
    bob_basis: Basis
    alice_basis: Basis
    outbound_click: str  # "D1" | "D2" | "inconclusive"
    return_click: str  # "D3" | "D4" | "inconclusive"
    relation: str  # "identity" | "inversion" | "inconclusive"
    key_bit: int | None
    noise: NoiseVector
    I_alpha: float
    I_beta: float
    I_A: float
    I_B: float
    eve_guess: Basis | None = None

    @property
    def conclusive(self) -> bool:
        return self.key_bit is not None


@dataclass(frozen=True)
class KeyMaterial:
    bob_key: tuple
    alice_key: tuple
    discard_count: int

    @property
    def error_rate(self) -> float:
        if not self.bob_key:
            return 0.0
        errors = sum(a != b for a, b in zip(self.alice_key, self.bob_key))
        return errors / len(self.bob_key)


@dataclass(frozen=True)
class SessionStats:
    rounds: int
    key_rate: float
    error_rate: float
    discard_rate: float
    eve_guess_rate: float  # nan without an eavesdropper
    per_combination: dict  # (bob, alice) -> {"rounds", "kept", "errors"}


def detect(bright_upper, bright_lower, guard_band: float, upper: str, lower: str) -> str:
    """Threshold detection: the brighter port clicks unless the two are within ``guard_band``."""
    if abs(bright_upper - bright_lower) < guard_band:
        return "inconclusive"
    return upper if bright_upper > bright_lower else lower


def _coin(stream: NoiseStream) -> Basis:
    return Basis(int(stream.uniforms(1)[0] >= 0.5))


def eve_observe(strategy: EveStrategy, channel: np.ndarray):
    """The intensity Eve reads from her copy of the outbound channel fields (batches allowed)."""
    if strategy.kind is EveKind.INTENSITY_TAP:
        return optics.intensity(channel)[0]
    # recombine both channels on her own splitter, read the alpha-like port
    return optics.intensity(optics.apply(optics.beam_splitter(), channel))[0]


def _prior_grid(strategy: EveStrategy) -> np.ndarray:
    if strategy.zeta_prior_range == 0.0:
        return np.zeros(1)
    return np.linspace(0.0, strategy.zeta_prior_range, strategy.prior_points, endpoint=False)


def eve_likelihoods(strategy: EveStrategy, observed: float) -> np.ndarray:
    """Likelihood of ``observed`` under phi = 0 and phi = pi, marginalised over Eve's zeta prior."""
    zetas = _prior_grid(strategy)
    out = []
    for b in Basis:
        fields = mzi.channel_fields(b.phase, ChannelNoise(0.0, zetas))
        predicted = eve_observe(strategy, fields)
        z = (observed - predicted) / strategy.readout_sigma
        out.append(np.mean(np.exp(-0.5 * z * z)))
    return np.array(out)


def eve_observe_and_guess(strategy: EveStrategy, channel: np.ndarray, stream: NoiseStream) -> Basis | None:
    """Maximum-likelihood guess of Bob's basis; ties are broken by a coin from ``stream``."""
    if strategy.kind is EveKind.NONE:
        return None
    like = eve_likelihoods(strategy, float(eve_observe(strategy, channel)))
    if np.isclose(like[0], like[1], rtol=1e-9, atol=1e-300):
        return _coin(stream)
    return Basis(int(np.argmax(like)))


def evaluate_round(
    bob: Basis,
    alice: Basis,
    noise: NoiseVector,
    guard_band: float,
    eve_guess: Basis | None = None,
) -> RoundRecord:
    """Deterministic part of a round, given the bases and the noise draw."""
    chan, coup = noise.channel, noise.coupler
    i_alpha, i_beta = (float(x) for x in mzi.one_way_output(bob.phase, chan))
    i_a, i_b = (float(x) for x in mzi.round_trip_intensities(bob.phase, alice.phase, chan, coup))
    outbound = detect(i_alpha, i_beta, guard_band, "D1", "D2")
    back = detect(i_a, i_b, guard_band, "D4", "D3")
    if back == "inconclusive":
        relation, bit = "inconclusive", None
    else:
        relation = "identity" if back == "D4" else "inversion"
        bit = int(bob) ^ int(relation == "inversion")
    return RoundRecord(bob, alice, outbound, back, relation, bit, noise, i_alpha, i_beta, i_a, i_b, eve_guess)


def run_round(config: SessionConfig, stream: NoiseStream) -> RoundRecord:
    bob = _coin(stream)
    alice = _coin(stream)
    noise = sample(stream, config.chan_model, config.coupler_model, config.coupler_mode)
    guess = None
    if config.eve.kind is not EveKind.NONE:
        guess = eve_observe_and_guess(config.eve, mzi.channel_fields(bob.phase, noise.channel), stream)
    return evaluate_round(bob, alice, noise, config.guard_band, guess)


def run_rounds(config: SessionConfig) -> list[RoundRecord]:
    # one stream per session: walk noise must evolve continuously across rounds
    stream = substream(config.seed, 0)
    return [run_round(config, stream) for _ in range(config.rounds)]


def sift(records) -> KeyMaterial:
    """Drop inconclusive rounds; Alice keeps her basis bits, Bob his inferred bits."""
    kept = [r for r in records if r.conclusive]
    return KeyMaterial(
        bob_key=tuple(r.key_bit for r in kept),
        alice_key=tuple(int(r.alice_basis) for r in kept),
        discard_count=len(records) - len(kept),
    )


def session_stats(records) -> SessionStats:
    records = list(records)
    n = len(records)
    if n == 0:
        raise ValueError("no rounds")
    key = sift(records)
    guesses = [r for r in records if r.eve_guess is not None]
    eve_rate = sum(r.eve_guess == r.bob_basis for r in guesses) / len(guesses) if guesses else float("nan")
    combos = Counter()
    kept = Counter()
    errors = Counter()
    for r in records:
        k = (int(r.bob_basis), int(r.alice_basis))
        combos[k] += 1
        if r.conclusive:
            kept[k] += 1
            errors[k] += int(r.key_bit != int(r.alice_basis))
    per = {
        k: {"rounds": combos[k], "kept": kept[k], "errors": errors[k]}
        for k in sorted(combos)
    }
    return SessionStats(
        rounds=n,
        key_rate=len(key.bob_key) / n,
        error_rate=key.error_rate,
        discard_rate=key.discard_count / n,
        eve_guess_rate=eve_rate,
        per_combination=per,
    )


def run_session(config: SessionConfig) -> tuple[SessionStats, list[RoundRecord]]:
    records = run_rounds(config)
    return session_stats(records), records
