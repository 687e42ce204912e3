"""Real trigonometric polynomials and their recovery from equally spaced samples.

A degree-N polynomial is stored as ``[A0, A1, A2, ..., A_{2N}]`` with::

    p(phi) = A0 + sum_k A_{2k-1} cos(k phi) + A_{2k} sin(k phi)
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionError

PROBABILITY_SLACK = 1e-9


@dataclass(frozen=True, eq=False)
class TrigPoly:
    coefficients: np.ndarray

    def __post_init__(self):
        c = np.array(self.coefficients, dtype=float)
        if c.ndim != 1 or c.size % 2 != 1:
            raise DimensionError(f"need an odd number of coefficients, got shape {c.shape}")
        c.setflags(write=False)
        object.__setattr__(self, "coefficients", c)

    @property
    def degree(self) -> int:
        return (self.coefficients.size - 1) // 2

    def __call__(self, phi):
        return evaluate(self.coefficients, phi)

    def derivative(self, phi, order: int = 1):
        return evaluate(self.coefficients, phi, order)


def _split(coeffs: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Constant, cosine and sine parts along the last axis."""
    return coeffs[..., 0], coeffs[..., 1::2], coeffs[..., 2::2]


def evaluate(coeffs, phi, order: int = 0):
    """Evaluate (or differentiate ``order`` times) polynomials at ``phi``.

    ``coeffs`` has shape ``(..., 2N+1)`` and broadcasts against ``phi``.
    """
    coeffs = np.asarray(coeffs, dtype=float)
    phi = np.asarray(phi, dtype=float)
    a0, ca, sa = _split(coeffs)
    c1, s1 = np.cos(phi), np.sin(phi)
    cos, sin = c1, s1
    out = 0.0
    for k in range(1, ca.shape[-1] + 1):
        if k > 1:
            # angle addition instead of fresh trig calls
            cos, sin = cos * c1 - sin * s1, sin * c1 + cos * s1
        # d^n/dphi^n of cos and sin cycle with period 4
        r = order % 4
        if r == 0:
            term = ca[..., k - 1] * cos + sa[..., k - 1] * sin
        elif r == 1:
            term = sa[..., k - 1] * cos - ca[..., k - 1] * sin
        elif r == 2:
            term = -(ca[..., k - 1] * cos + sa[..., k - 1] * sin)
        else:
            term = ca[..., k - 1] * sin - sa[..., k - 1] * cos
        out = out + float(k) ** order * term
    if order == 0:
        out = out + a0
    return np.broadcast_to(out, np.broadcast_shapes(phi.shape, a0.shape)) if np.ndim(out) == 0 else out


def probe_phases(n_photons: int) -> np.ndarray:
    """The 2N+1 sampling phases ``0, +d, -d, +2d, -2d, ...`` with ``d = 2 pi / (2N+1)``."""
    if n_photons < 1:
        raise ValueError(f"photon number must be >= 1, got {n_photons}")
    K = 2 * n_photons + 1
    steps = [0]
    for k in range(1, n_photons + 1):
        steps += [k, -k]
    return 2 * np.pi * np.array(steps, dtype=float) / K


def design_matrix(phases, degree: int) -> np.ndarray:
    """Rows ``[1, cos phi, sin phi, ..., cos N phi, sin N phi]``."""
    phases = np.asarray(phases, dtype=float)
    cols = [np.ones_like(phases)]
    for k in range(1, degree + 1):
        cols += [np.cos(k * phases), np.sin(k * phases)]
    return np.stack(cols, axis=-1)


def recovery_matrix(n_photons: int) -> np.ndarray:
    """Map from probe samples to coefficients.

    Discrete orthogonality on 2N+1 equispaced points makes this the scaled
    transpose of the design matrix: weight 1/K on the constant row and 2/K
    on every cosine and sine row.
    """
    phases = probe_phases(n_photons)
    K = phases.size
    R = 2.0 / K * design_matrix(phases, n_photons).T
    R[0] /= 2.0
    return R


def recover_trig_poly(samples) -> TrigPoly:
    """Coefficients of the degree-N polynomial through ``samples`` at :func:`probe_phases`.

    ``samples`` are probabilities and must lie in [0, 1]. Use
    :func:`recover_coefficients` for unconstrained real data.
    """
    r = np.asarray(samples, dtype=float)
    if r.ndim != 1:
        raise DimensionError(f"samples must be 1-d, got shape {r.shape}")
    if np.any(r < 0.0) or np.any(r > 1.0) or not np.all(np.isfinite(r)):
        raise ValueError("samples must be probabilities in [0, 1]")
    return TrigPoly(recover_coefficients(r))


def recover_coefficients(samples) -> np.ndarray:
    """Batched recovery: ``samples`` of shape ``(..., 2N+1)`` to coefficients."""
    r = np.asarray(samples, dtype=float)
    K = r.shape[-1]
    if K < 3 or K % 2 != 1:
        raise DimensionError(f"need 2N+1 >= 3 samples, got {K}")
    return r @ recovery_matrix((K - 1) // 2).T
