"""One-way and round-trip transfer matrices of the doubly coupled MZI.

Everything here is built by composing beam splitters and phase layers from
:mod:`uskd.optics`.  The closed-form expressions (``closed_form_IA``,
``expected_IA_over_coupler``) are kept algebraically independent of that
construction so they can serve as test oracles.

Port conventions (input light enters port 0 with unit intensity):

* one-way outputs: port 0 = alpha port (Alice's D1), port 1 = beta port (D2)
* round-trip outputs: port 0 = A port (Bob's D4), port 1 = B port (D3)
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import optics

TWO_PI = 2.0 * np.pi


def wrap_phase(x):
    """Reduce phases to ``[0, 2*pi)``."""
    r = np.remainder(x, TWO_PI)
    # remainder of tiny negatives can round up to exactly 2*pi
    r = np.where(r >= TWO_PI, 0.0, r)
    return float(r) if r.ndim == 0 else r


def circular_distance(a, b):
    d = np.abs(wrap_phase(np.asarray(a) - np.asarray(b)))
    return np.minimum(d, TWO_PI - d)


@dataclass(frozen=True)
class ChannelNoise:
    """Phase noise picked up in the two transmission channels."""

    zeta1: float | np.ndarray = 0.0
    zeta2: float | np.ndarray = 0.0

    @property
    def zeta(self):
        return wrap_phase(np.asarray(self.zeta2) - np.asarray(self.zeta1))


@dataclass(frozen=True)
class CouplerNoise:
    """Phase noise in the intermediate coupling section between the two passes."""

    zeta_alpha: float | np.ndarray = 0.0
    zeta_beta: float | np.ndarray = 0.0

    @property
    def zeta_double_prime(self):
        return wrap_phase(np.asarray(self.zeta_alpha) - np.asarray(self.zeta_beta))


NOISELESS_CHANNEL = ChannelNoise()
NOISELESS_COUPLER = CouplerNoise()

_INPUT = np.array([1.0, 0.0], dtype=complex)


def mzi_forward(phi, noise: ChannelNoise = NOISELESS_CHANNEL, bs: np.ndarray | None = None) -> np.ndarray:
    """BS . diag(e^{i zeta2}, e^{i(phi + zeta1)}) . BS.

    ``bs`` overrides the beam splitter (fault injection only).
    """
    if bs is None:
        bs = optics.beam_splitter()
    phi = np.asarray(phi, dtype=float)
    arms = optics.phase_layer(noise.zeta2, phi + np.asarray(noise.zeta1, dtype=float))
    return optics.compose(bs, optics.compose(arms, bs))


def mzi_forward_closed_form(phi, noise: ChannelNoise = NOISELESS_CHANNEL) -> np.ndarray:
    """Literal closed-form one-way matrix (first displayed form), for cross-checks."""
    phi = np.asarray(phi, dtype=float)
    z1 = np.asarray(noise.zeta1, dtype=float)
    z = np.asarray(noise.zeta2, dtype=float) - z1
    a = np.exp(1j * z)
    b = np.exp(1j * phi)
    a, b, z1 = np.broadcast_arrays(a, b, z1)
    pre = 0.5 * np.exp(1j * z1)
    out = np.empty(a.shape + (2, 2), dtype=complex)
    out[..., 0, 0] = pre * (a - b)
    out[..., 0, 1] = pre * 1j * (a + b)
    out[..., 1, 0] = pre * 1j * (a + b)
    out[..., 1, 1] = -pre * (a - b)
    return out


def channel_fields(phi, noise: ChannelNoise = NOISELESS_CHANNEL) -> np.ndarray:
    """Fields travelling in the two channels on the outbound pass, before Alice's splitter.

    Upper channel carries zeta2, lower carries phi + zeta1.
    """
    phi = np.asarray(phi, dtype=float)
    arms = optics.phase_layer(noise.zeta2, phi + np.asarray(noise.zeta1, dtype=float))
    return optics.apply(arms, optics.apply(optics.beam_splitter(), _INPUT))


def one_way_output(phi, noise: ChannelNoise = NOISELESS_CHANNEL):
    """Simulated (I_alpha, I_beta) after the outbound pass."""
    return optics.intensity(optics.apply(mzi_forward(phi, noise), _INPUT))


def one_way_intensities(phi, zeta):
    """Analytic (I_alpha, I_beta) = 1/2 [1 -/+ cos(phi - zeta)]."""
    c = np.cos(np.asarray(phi) - np.asarray(zeta))
    return 0.5 * (1.0 - c), 0.5 * (1.0 + c)


def round_trip(
    phi,
    psi,
    chan: ChannelNoise = NOISELESS_CHANNEL,
    coupler: CouplerNoise = NOISELESS_COUPLER,
    inbound: ChannelNoise | None = None,
    bs: np.ndarray | None = None,
) -> np.ndarray:
    """[MZI]_2(psi) . [zeta_ab] . [MZI]_1(phi).

    The return pass sees the same channel noise as the outbound pass unless an
    independent ``inbound`` draw is supplied.
    """
    back = chan if inbound is None else inbound
    first = mzi_forward(phi, chan, bs=bs)
    middle = optics.phase_layer(coupler.zeta_alpha, coupler.zeta_beta)
    second = mzi_forward(psi, back, bs=bs)
    return optics.compose(second, optics.compose(middle, first))


def _forward_field(phi, noise: ChannelNoise, f):
    bs = optics.beam_splitter()
    f = optics.apply(bs, f)
    f = optics.apply_phase_layer(f, noise.zeta2, np.asarray(phi, dtype=float) + np.asarray(noise.zeta1, dtype=float))
    return optics.apply(bs, f)


def round_trip_intensities(
    phi,
    psi,
    chan: ChannelNoise = NOISELESS_CHANNEL,
    coupler: CouplerNoise = NOISELESS_COUPLER,
    inbound: ChannelNoise | None = None,
):
    """(I_A, I_B) for unit input on port 0.

    Propagates the field element by element instead of forming the matrix
    product; agrees with ``round_trip`` to rounding.
    """
    back = chan if inbound is None else inbound
    f = _forward_field(phi, chan, _INPUT)
    f = optics.apply_phase_layer(f, coupler.zeta_alpha, coupler.zeta_beta)
    f = _forward_field(psi, back, f)
    return optics.intensity(f)


def closed_form_IA(phi, psi, zeta, zeta_double_prime):
    """Analytic I_A as a function of the basis pair and the two noise differences."""
    u = np.exp(1j * np.asarray(zeta, dtype=float))
    ep = np.exp(1j * np.asarray(phi, dtype=float))
    es = np.exp(1j * np.asarray(psi, dtype=float))
    ec = np.exp(1j * np.asarray(zeta_double_prime, dtype=float))
    amp = ec * (u - es) * (u - ep) - (u + es) * (u + ep)
    return (amp.real**2 + amp.imag**2) / 16.0


def expected_IA_over_coupler(phi, psi, zeta):
    """Mean of I_A over zeta'' uniform on [0, 2*pi)."""
    zeta = np.asarray(zeta, dtype=float)
    return 0.5 * (1.0 + np.cos(zeta - psi) * np.cos(zeta - phi))


def expected_IA_uniform_coupler(phi, psi, zeta, coupler_range):
    """Mean of I_A over zeta'' uniform on [0, coupler_range) (equal bases case closed form).

    Only valid for ``phi == psi``; for equal bases
    I_A = 1/2 (1 + cos^2 u) + 1/2 sin^2 u cos zeta'' with u = zeta - phi,
    and the zeta'' average of cos is sin(R)/R.
    """
    if not np.allclose(wrap_phase(phi), wrap_phase(psi)):
        raise ValueError("closed form only covers equal bases")
    u = np.asarray(zeta, dtype=float) - phi
    mean_cos = 1.0 if coupler_range == 0 else np.sin(coupler_range) / coupler_range
    return 0.5 * (1.0 + np.cos(u) ** 2) + 0.5 * np.sin(u) ** 2 * mean_cos
