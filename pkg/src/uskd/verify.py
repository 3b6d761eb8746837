"""Invariant checks run by ``uskd verify``.

Each check returns ``(passed, detail)``.  ``bs_sign=-1`` swaps in the
conjugate-convention beam splitter as a negative control; only the check
against the literal one-way closed form is sensitive to it.
"""

from __future__ import annotations

import numpy as np

from . import mzi, optics
from .mzi import TWO_PI, ChannelNoise, CouplerNoise

_INPUT = np.array([1.0, 0.0], dtype=complex)


def _rng(quick: bool):
    # fixed seed: verification must be repeatable
    return np.random.default_rng(20200906), (100 if quick else 1000), (1000 if quick else 10_000)


def check_unitarity(quick=False, bs_sign=1):
    rng, n, _ = _rng(quick)
    bs = optics.beam_splitter(bs_sign)
    worst_single = max(optics.unitarity_error(bs), optics.unitarity_error(optics.phase_layer(*rng.uniform(0, TWO_PI, 2))))
    worst_cascade = 0.0
    for _ in range(n):
        m = optics.identity()
        for _ in range(8):
            el = bs if rng.random() < 0.5 else optics.phase_layer(*rng.uniform(-10, 10, 2))
            m = optics.compose(el, m)
        worst_cascade = max(worst_cascade, optics.unitarity_error(m))
    ok = worst_single <= 1e-12 and worst_cascade <= 1e-10
    return ok, f"single={worst_single:.2e} cascade8={worst_cascade:.2e}"


def check_one_way_closed_form(quick=False, bs_sign=1):
    rng, n, _ = _rng(quick)
    phi, z1, z2 = rng.uniform(0, TWO_PI, (3, n))
    chan = ChannelNoise(z1, z2)
    composed = mzi.mzi_forward(phi, chan, bs=optics.beam_splitter(bs_sign))
    err = float(np.max(np.abs(composed - mzi.mzi_forward_closed_form(phi, chan))))
    return err <= 1e-12, f"max|diff|={err:.2e} over {n} draws"


def check_noise_immunity(quick=False, bs_sign=1):
    rng, _, n = _rng(quick)
    bs = optics.beam_splitter(bs_sign)
    worst_var, worst_dev = 0.0, 0.0
    for phi in (0.0, np.pi):
        for psi in (0.0, np.pi):
            z1, z2, za = rng.uniform(0, TWO_PI, (3, n))
            m = mzi.round_trip(phi, psi, ChannelNoise(z1, z2), CouplerNoise(za, za), bs=bs)
            ia, ib = optics.intensity(optics.apply(m, _INPUT))
            target = 0.5 * (1 + np.cos(psi - phi))
            worst_var = max(worst_var, float(ia.var()), float(ib.var()))
            worst_dev = max(worst_dev, float(np.max(np.abs(ia - target))), float(np.max(np.abs(ib - (1 - target)))))
    return worst_var < 1e-20 and worst_dev <= 1e-12, f"var={worst_var:.2e} dev={worst_dev:.2e}"


def check_oracle_agreement(quick=False, bs_sign=1):
    rng, _, n = _rng(quick)
    phi, psi, z1, z2, za, zb = rng.uniform(0, TWO_PI, (6, n))
    m = mzi.round_trip(phi, psi, ChannelNoise(z1, z2), CouplerNoise(za, zb), bs=optics.beam_splitter(bs_sign))
    ia, ib = optics.intensity(optics.apply(m, _INPUT))
    ref = mzi.closed_form_IA(phi, psi, z2 - z1, za - zb)
    err = float(max(np.max(np.abs(ia - ref)), np.max(np.abs(ib - (1 - ref)))))
    return err <= 1e-12, f"max|diff|={err:.2e} over {n} draws"


def check_energy_conservation(quick=False, bs_sign=1):
    rng, _, n = _rng(quick)
    phi, psi, z1, z2, za, zb = rng.uniform(0, TWO_PI, (6, n))
    m = mzi.round_trip(phi, psi, ChannelNoise(z1, z2), CouplerNoise(za, zb), bs=optics.beam_splitter(bs_sign))
    f = optics.field(rng.normal(size=n) + 1j * rng.normal(size=n), rng.normal(size=n) + 1j * rng.normal(size=n))
    pin = sum(optics.intensity(f))
    pout = sum(optics.intensity(optics.apply(m, f)))
    err = float(np.max(np.abs(pout - pin) / np.maximum(pin, 1.0)))
    return err <= 1e-12, f"max relative power change={err:.2e}"


CHECKS = (
    ("unitarity", check_unitarity),
    ("one-way closed form", check_one_way_closed_form),
    ("noise immunity (zeta''=0)", check_noise_immunity),
    ("round-trip oracle agreement", check_oracle_agreement),
    ("energy conservation", check_energy_conservation),
)


def run_checks(quick=False, bs_sign=1):
    return [(name, *fn(quick=quick, bs_sign=bs_sign)) for name, fn in CHECKS]
