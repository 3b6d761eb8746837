"""Monte Carlo sweeps over channel and coupler phase noise.

Every grid point (and every repeat of it) draws from its own noise substream,
so a trace is a pure function of ``(SweepSpec, seed)`` no matter how the work
is scheduled.
"""

from __future__ import annotations

import hashlib
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, replace

import numpy as np

from . import mzi
from .mzi import TWO_PI, ChannelNoise, CouplerNoise
from .noise import NoiseModel, sample_batch, substream, trial_key

#: coupler-noise ranges of the averaged panels, 0 .. 2pi in pi/4 steps
QUARTER_TURN_RANGES = tuple(k * np.pi / 4 for k in range(9))
#: ranges of the channel-averaged panel
CHANNEL_PANEL_RANGES = (TWO_PI, np.pi / 2, np.pi / 5)

CROSSOVER_LEVEL = 0.5

# first trial-key component, one per panel
_TOP, _COUPLER, _REPEATS, _CHANNEL, _FIG3B = 1, 2, 3, 4, 5


@dataclass(frozen=True)
class SweepSpec:
    phi: float = 0.0
    psi: float = 0.0
    coupler_ranges: tuple = (TWO_PI,)
    samples_per_point: int = 2000
    zeta_grid: int = 200
    repeats: int = 10
    seed: int = 0
    coupler_mode: str = "direct"
    chan_range: float = TWO_PI

    def __post_init__(self):
        object.__setattr__(self, "coupler_ranges", tuple(float(r) for r in self.coupler_ranges))
        if self.samples_per_point < 1:
            raise ValueError("samples_per_point must be >= 1")
        if self.zeta_grid < 2:
            raise ValueError("zeta_grid must be >= 2")
        if self.repeats < 1:
            raise ValueError("repeats must be >= 1")
        if not self.coupler_ranges:
            raise ValueError("at least one coupler range is required")
        for r in self.coupler_ranges + (self.chan_range,):
            if not 0.0 <= r <= TWO_PI:
                raise ValueError(f"noise range {r} outside [0, 2pi]")
        if self.coupler_mode not in ("direct", "per-arm"):
            raise ValueError(f"unknown coupler_mode {self.coupler_mode!r}")

    def digest(self) -> str:
        payload = json.dumps(asdict(self), sort_keys=True, default=repr)
        return hashlib.sha256(payload.encode()).hexdigest()

    @property
    def bright_is_A(self) -> bool:
        # equal bases -> identity -> A port bright
        return bool(mzi.circular_distance(self.phi, self.psi) < np.pi / 2)


@dataclass
class TraceResult:
    label: str
    axis: np.ndarray
    mean_IA: np.ndarray
    mean_IB: np.ndarray
    std_IA: np.ndarray
    std_IB: np.ndarray
    seed: int
    spec_digest: str
    bright_is_A: bool = True
    crossover_count: int = field(init=False)

    def __post_init__(self):
        self.crossover_count = int(np.count_nonzero(self.bright <= CROSSOVER_LEVEL))

    @property
    def bright(self) -> np.ndarray:
        return self.mean_IA if self.bright_is_A else self.mean_IB

    def __len__(self):
        return len(self.axis)


@dataclass(frozen=True)
class Summary:
    mean: float
    std: float
    min: float
    max: float
    crossover_count: int


def summarize(trace) -> Summary:
    """Statistics of the bright output along a trace (or of a bare 1-D array)."""
    values = trace.bright if isinstance(trace, TraceResult) else np.asarray(trace, dtype=float)
    if values.size == 0:
        raise ValueError("cannot summarize an empty trace")
    return Summary(
        mean=float(values.mean()),
        std=float(values.std()),
        min=float(values.min()),
        max=float(values.max()),
        crossover_count=int(np.count_nonzero(values <= CROSSOVER_LEVEL)),
    )


def _models(spec: SweepSpec, coupler_range: float):
    return NoiseModel.iid(spec.chan_range), NoiseModel.iid(coupler_range)


def _intensities(spec, zeta1, zeta2, zeta_alpha, zeta_beta):
    return mzi.round_trip_intensities(
        spec.phi, spec.psi, ChannelNoise(zeta1, zeta2), CouplerNoise(zeta_alpha, zeta_beta)
    )


def _map(fn, items, workers):
    if workers and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(fn, items))
    return [fn(i) for i in items]


def _stack(rows):
    a = np.array(rows, dtype=float)
    return a[:, 0], a[:, 1], a[:, 2], a[:, 3]


def zeta_axis(spec: SweepSpec) -> np.ndarray:
    return np.linspace(0.0, TWO_PI, spec.zeta_grid, endpoint=False)


def fig2_individual(spec: SweepSpec) -> TraceResult:
    """Unaveraged per-sample (I_A, I_B); axis is the sample index.

    Uses ``samples_per_point`` draws with the first coupler range.
    """
    chan, coup = _models(spec, spec.coupler_ranges[0])
    stream = substream(spec.seed, trial_key(_TOP, 0, 0))
    nv = sample_batch(stream, chan, coup, spec.samples_per_point, spec.coupler_mode)
    ia, ib = _intensities(spec, nv.zeta1, nv.zeta2, nv.zeta_alpha, nv.zeta_beta)
    zeros = np.zeros_like(ia)
    return TraceResult(
        "individual", np.arange(ia.size, dtype=float), ia, ib, zeros, zeros.copy(),
        spec.seed, spec.digest(), spec.bright_is_A,
    )


def _coupler_point(spec, coupler_range, key, zeta):
    """Mean/std of (I_A, I_B) over n draws at fixed channel difference ``zeta``."""
    chan, coup = _models(spec, coupler_range)
    nv = sample_batch(substream(spec.seed, key), chan, coup, spec.samples_per_point, spec.coupler_mode)
    ia, ib = _intensities(spec, nv.zeta1, nv.zeta1 + zeta, nv.zeta_alpha, nv.zeta_beta)
    return ia.mean(), ib.mean(), ia.std(), ib.std()


def _avg_over_coupler_trace(spec, coupler_range, trace_index, panel, label, workers):
    axis = zeta_axis(spec)
    rows = _map(
        lambda g: _coupler_point(spec, coupler_range, trial_key(panel, trace_index, g), axis[g]),
        range(axis.size),
        workers,
    )
    mia, mib, sia, sib = _stack(rows)
    return TraceResult(label, axis, mia, mib, sia, sib, spec.seed, spec.digest(), spec.bright_is_A)


def fig2_avg_over_coupler(spec: SweepSpec, workers: int = 0) -> list[TraceResult]:
    """One trace per coupler range: at each zeta grid point, the mean over n coupler draws."""
    return [
        _avg_over_coupler_trace(spec, r, k, _COUPLER, f"avg_coupler_R{r:.6f}", workers)
        for k, r in enumerate(spec.coupler_ranges)
    ]


def fig2_repeat_trials(spec: SweepSpec, workers: int = 0) -> list[TraceResult]:
    """``repeats`` independent realisations of the coupler-averaged trace at the first range."""
    if spec.repeats < 2:
        raise ValueError("repeat trials need repeats >= 2")
    r = spec.coupler_ranges[0]
    return [
        _avg_over_coupler_trace(spec, r, k, _REPEATS, f"repeat_{k:03d}", workers)
        for k in range(spec.repeats)
    ]


def _channel_point(spec, coupler_range, key):
    chan, coup = _models(spec, coupler_range)
    nv = sample_batch(substream(spec.seed, key), chan, coup, spec.samples_per_point, spec.coupler_mode)
    za = float(np.asarray(nv.zeta_alpha)[0])
    zb = float(np.asarray(nv.zeta_beta)[0])
    ia, ib = _intensities(spec, nv.zeta1, nv.zeta2, za, zb)
    return mzi.wrap_phase(za - zb), ia.mean(), ib.mean(), ia.std(), ib.std()


def fig2_avg_over_channel(spec: SweepSpec, workers: int = 0) -> list[TraceResult]:
    """One trace per coupler range; each point is one coupler draw averaged over n channel draws.

    Points are ordered by their zeta'' value.
    """
    out = []
    for k, r in enumerate(spec.coupler_ranges):
        rows = _map(lambda g: _channel_point(spec, r, trial_key(_CHANNEL, k, g)), range(spec.zeta_grid), workers)
        a = np.array(rows, dtype=float)
        a = a[np.argsort(a[:, 0], kind="stable")]
        out.append(
            TraceResult(
                f"avg_channel_R{r:.6f}", a[:, 0], a[:, 1], a[:, 2], a[:, 3], a[:, 4],
                spec.seed, spec.digest(), spec.bright_is_A,
            )
        )
    return out


def fig3b_axis(spec: SweepSpec) -> np.ndarray:
    return np.linspace(0.0, TWO_PI, spec.zeta_grid)


def _fig3b_point(spec, n, n_index, g, zdp):
    """``repeats`` independent n-sample means at coupler phase ``zdp``; channel noise random."""
    chan = NoiseModel.iid(spec.chan_range)
    stream = substream(spec.seed, trial_key(_FIG3B, n_index, g))
    nv = sample_batch(stream, chan, NoiseModel.iid(0.0), spec.repeats * n, "direct")
    z1 = np.asarray(nv.zeta1).reshape(spec.repeats, n)
    z2 = np.asarray(nv.zeta2).reshape(spec.repeats, n)
    ia, ib = _intensities(spec, z1, z2, zdp, 0.0)
    ma, mb = ia.mean(axis=1), ib.mean(axis=1)
    ddof = 1 if spec.repeats > 1 else 0
    return ma.mean(), mb.mean(), ma.std(ddof=ddof), mb.std(ddof=ddof)


def fig3b_averaging(spec: SweepSpec, n_small: int = 20, n_large: int = 2000, workers: int = 0):
    """zeta'' swept linearly over [0, 2pi]; channel-averaged intensities for two sample counts.

    ``std_*`` of each trace is the fluctuation amplitude: the standard deviation,
    over ``repeats`` realisations, of the n-sample mean.
    """
    axis = fig3b_axis(spec)
    out = []
    for i, n in enumerate((n_small, n_large)):
        if n < 1:
            raise ValueError("sample counts must be >= 1")
        rows = _map(lambda g: _fig3b_point(spec, n, i, g, axis[g]), range(axis.size), workers)
        mia, mib, sia, sib = _stack(rows)
        out.append(
            TraceResult(f"fig3b_n{n}", axis, mia, mib, sia, sib, spec.seed, spec.digest(), spec.bright_is_A)
        )
    return tuple(out)


def with_seed(spec: SweepSpec, seed: int) -> SweepSpec:
    return replace(spec, seed=seed)
