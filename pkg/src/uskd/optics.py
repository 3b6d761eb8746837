"""Complex 2x2 algebra for two-port optical elements.

Matrices are complex ndarrays of shape ``(..., 2, 2)`` and field states are
complex ndarrays of shape ``(..., 2)``; leading axes broadcast, so a batch of
noise draws is evaluated in one call.  Port 0 is the "upper" port, port 1 the
"lower" port.
"""

from __future__ import annotations

import numpy as np

#: Default element-wise tolerance for unitarity checks.
UNITARY_TOL = 1e-12

TransferMatrix = np.ndarray
FieldState = np.ndarray

_SQRT_HALF = 1.0 / np.sqrt(2.0)


def beam_splitter(sign: int = 1) -> TransferMatrix:
    """Symmetric 50:50 beam splitter ``(1/sqrt2) [[1, i], [i, 1]]``.

    ``sign=-1`` gives the conjugate-convention splitter ``[[1, -i], [-i, 1]]``;
    it is only used as a negative control by the verification suite.
    """
    if sign not in (1, -1):
        raise ValueError(f"sign must be +1 or -1, got {sign!r}")
    c = sign * 1j
    return _SQRT_HALF * np.array([[1.0, c], [c, 1.0]], dtype=complex)


def identity() -> TransferMatrix:
    return np.eye(2, dtype=complex)


def phase_layer(upper_phase, lower_phase) -> TransferMatrix:
    """Diagonal phase screen ``diag(exp(i*upper), exp(i*lower))``.

    Accepts scalars or broadcastable arrays.
    """
    upper = np.asarray(upper_phase, dtype=float)
    lower = np.asarray(lower_phase, dtype=float)
    if not (np.all(np.isfinite(upper)) and np.all(np.isfinite(lower))):
        raise ValueError("phase_layer phases must be finite")
    upper, lower = np.broadcast_arrays(upper, lower)
    out = np.zeros(upper.shape + (2, 2), dtype=complex)
    out[..., 0, 0] = np.exp(1j * upper)
    out[..., 1, 1] = np.exp(1j * lower)
    return out


def compose(second: TransferMatrix, first: TransferMatrix) -> TransferMatrix:
    """Cascade two elements: ``first`` acts, then ``second`` (product second @ first)."""
    return np.matmul(second, first)


def apply(m: TransferMatrix, f: FieldState) -> FieldState:
    """Propagate field amplitudes ``f`` through ``m``."""
    f = np.asarray(f, dtype=complex)
    return np.einsum("...ij,...j->...i", m, f)


def apply_phase_layer(f: FieldState, upper_phase, lower_phase) -> FieldState:
    """Same as ``apply(phase_layer(upper, lower), f)`` without building the matrices."""
    f = np.asarray(f, dtype=complex)
    upper = np.exp(1j * np.asarray(upper_phase, dtype=float)) * f[..., 0]
    lower = np.exp(1j * np.asarray(lower_phase, dtype=float)) * f[..., 1]
    return field(upper, lower)


def field(upper, lower) -> FieldState:
    """Build a field state from its two port amplitudes."""
    upper, lower = np.broadcast_arrays(np.asarray(upper, dtype=complex), np.asarray(lower, dtype=complex))
    return np.stack([upper, lower], axis=-1)


def intensity(f: FieldState) -> tuple[np.ndarray, np.ndarray]:
    """Squared moduli ``(|upper|^2, |lower|^2)`` of a field state."""
    f = np.asarray(f)
    p = f.real**2 + f.imag**2
    return p[..., 0], p[..., 1]


def dagger(m: TransferMatrix) -> TransferMatrix:
    return np.conj(np.swapaxes(m, -1, -2))


def unitarity_error(m: TransferMatrix) -> float:
    """Largest element-wise deviation of ``M^dagger M`` from the identity."""
    return float(np.max(np.abs(np.matmul(dagger(m), m) - np.eye(2))))


def is_unitary(m: TransferMatrix, tol: float = UNITARY_TOL) -> bool:
    return unitarity_error(m) <= tol


def equal_up_to_global_phase(a: TransferMatrix, b: TransferMatrix, tol: float = UNITARY_TOL) -> bool:
    """True iff ``a == lam * b`` element-wise within ``tol`` for some unit complex ``lam``.

    ``lam`` is fixed by the largest-modulus element of ``b``.  Only single
    (unbatched) 2x2 matrices are accepted.
    """
    if not tol > 0:
        raise ValueError("tol must be positive")
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if a.shape != (2, 2) or b.shape != (2, 2):
        raise ValueError("expected two 2x2 matrices")
    if not np.any(a) and not np.any(b):
        raise ValueError("both matrices are all-zero; global phase undefined")
    idx = np.unravel_index(np.argmax(np.abs(b)), b.shape)
    if abs(b[idx]) == 0.0 or abs(a[idx]) == 0.0:
        return False
    lam = a[idx] / b[idx]
    lam /= abs(lam)
    return bool(np.max(np.abs(a - lam * b)) <= tol)
