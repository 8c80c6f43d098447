"""
Small dense eigenvalue solver: Householder reduction to upper Hessenberg form
followed by shifted complex QR iterations with deflation.
"""

import cmath
from typing import Final, List

import numpy as np

MAX_DIMENSION: Final[int] = 64
# total QR sweeps allowed per eigenvalue
ITERATIONS_PER_EIGENVALUE: Final[int] = 100
EXCEPTIONAL_SHIFT_PERIOD: Final[int] = 10

_EPS: Final[float] = float(np.finfo(float).eps)


class ConvergenceError(RuntimeError):
    pass


def hessenberg(m) -> np.ndarray:
    """
    Upper Hessenberg matrix similar to ``m`` obtained with Householder reflections.
    """
    h = np.array(m, dtype=float)
    assert h.ndim == 2 and h.shape[0] == h.shape[1], f"square matrix expected: {h.shape}"
    n = h.shape[0]
    for k in range(n - 2):
        u = h[k + 1 :, k].copy()
        norm = float(np.linalg.norm(u))
        if norm == 0.0:
            continue
        alpha = -norm if u[0] >= 0.0 else norm
        u[0] -= alpha
        unorm = float(np.linalg.norm(u))
        if unorm == 0.0:
            continue
        u /= unorm
        h[k + 1 :, :] -= 2.0 * np.outer(u, u @ h[k + 1 :, :])
        h[:, k + 1 :] -= 2.0 * np.outer(h[:, k + 1 :] @ u, u)
        h[k + 2 :, k] = 0.0
    return h


def _wilkinson_shift(a: complex, b: complex, c: complex, d: complex) -> complex:
    """Eigenvalue of [[a, b], [c, d]] closer to d."""
    half_trace = 0.5 * (a + d)
    disc = cmath.sqrt(half_trace * half_trace - (a * d - b * c))
    mu1, mu2 = half_trace + disc, half_trace - disc
    return mu1 if abs(mu1 - d) <= abs(mu2 - d) else mu2


def _qr_sweep(block: np.ndarray, shift: complex) -> None:
    """One shifted QR step A - mu I = QR, A <- RQ + mu I, in place, by Givens rotations."""
    m = block.shape[0]
    block -= shift * np.eye(m)
    rotations = []
    for k in range(m - 1):
        a, b = block[k, k], block[k + 1, k]
        r = float(np.hypot(abs(a), abs(b)))
        if r == 0.0:
            rotations.append(None)
            continue
        c, s = a / r, b / r
        rows = block[k : k + 2, k:].copy()
        block[k, k:] = np.conj(c) * rows[0] + np.conj(s) * rows[1]
        block[k + 1, k:] = -s * rows[0] + c * rows[1]
        rotations.append((c, s))
    for k, rot in enumerate(rotations):
        if rot is None:
            continue
        c, s = rot
        top = min(k + 2, m - 1) + 1
        cols = block[:top, k : k + 2].copy()
        block[:top, k] = cols[:, 0] * c + cols[:, 1] * s
        block[:top, k + 1] = -cols[:, 0] * np.conj(s) + cols[:, 1] * np.conj(c)
    block += shift * np.eye(m)


def eigenvalues(m) -> List[complex]:
    """
    Full spectrum of a real square matrix (dimension at most 64), sorted by
    decreasing real part, then decreasing imaginary part.
    """
    a = np.array(m, dtype=float)
    n = a.shape[0]
    assert n <= MAX_DIMENSION, f"dimension {n} exceeds {MAX_DIMENSION}"
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix has non-finite entries")
    if n == 0:
        return []

    h = hessenberg(a).astype(complex)
    scale = max(float(np.linalg.norm(a)), np.finfo(float).tiny)
    res: List[complex] = []
    hi = n - 1
    iterations = 0
    total = 0
    while hi >= 0:
        if hi == 0:
            res.append(complex(h[0, 0]))
            break
        lo = hi
        while lo > 0:
            near = abs(h[lo - 1, lo - 1]) + abs(h[lo, lo])
            if abs(h[lo, lo - 1]) <= _EPS * (near if near > 0.0 else scale):
                h[lo, lo - 1] = 0.0
                break
            lo -= 1
        if lo == hi:
            res.append(complex(h[hi, hi]))
            hi -= 1
            iterations = 0
            continue

        iterations += 1
        total += 1
        if total > ITERATIONS_PER_EIGENVALUE * n:
            raise ConvergenceError(f"QR iteration did not converge after {total} sweeps")
        if iterations % EXCEPTIONAL_SHIFT_PERIOD == 0:
            shift = h[hi, hi] + 0.75 * abs(h[hi, hi - 1])
        else:
            shift = _wilkinson_shift(
                h[hi - 1, hi - 1], h[hi - 1, hi], h[hi, hi - 1], h[hi, hi]
            )
        block = h[lo : hi + 1, lo : hi + 1]
        _qr_sweep(block, shift)
        h[lo : hi + 1, lo : hi + 1] = block

    return sorted(res, key=lambda z: (-z.real, -z.imag))


def eigenvector(m, lam: complex, iterations: int = 3) -> np.ndarray:
    """Unit eigenvector for a computed eigenvalue, by inverse iteration."""
    a = np.array(m, dtype=complex)
    n = a.shape[0]
    v = np.ones(n, dtype=complex) / np.sqrt(n)
    perturbation = 1e-10 * max(1.0, abs(lam))
    for attempt in range(4):
        shifted = a - (lam + perturbation) * np.eye(n)
        try:
            for _ in range(iterations):
                w = np.linalg.solve(shifted, v)
                v = w / np.linalg.norm(w)
            return v
        except np.linalg.LinAlgError:
            perturbation *= 1e3
    raise ConvergenceError(f"inverse iteration failed for eigenvalue {lam}")
