"""Exact simulation of passive linear optics on two modes with N photons.

A 2x2 mode transformation ``U`` acts on creation operators as
``a^dag -> u00 a^dag + u10 b^dag`` and ``b^dag -> u01 a^dag + u11 b^dag``.
On the N-photon subspace this induces the (N+1)-dimensional symmetric
representation computed by :func:`lift_unitary`.

Basis ordering is by descending photon count in mode ``a``: index ``k`` is
``|N-k, k>``, so for N=2 the basis is ``(|20>, |11>, |02>)``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import DimensionError, LimitError, UnitarityError

MODE_UNITARY_TOL = 1e-12
FOCK_NORM_TOL = 1e-10
ORACLE_MAX_PHOTONS = 8

# symmetric 50/50 convention
BEAMSPLITTER = np.array([[1.0, 1.0j], [1.0j, 1.0]], dtype=complex) / math.sqrt(2.0)


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=complex)
    a.setflags(write=False)
    return a


def _unitarity_deviation(m: np.ndarray) -> float:
    return float(np.linalg.norm(m.conj().T @ m - np.eye(m.shape[0])))


@dataclass(frozen=True, eq=False)
class ModeUnitary:
    """2x2 unitary acting on the two spatial modes.

    Raises :class:`UnitarityError` on construction if ``U^dag U`` deviates
    from the identity by more than ``tol``.
    """

    matrix: np.ndarray
    tol: float = MODE_UNITARY_TOL

    def __post_init__(self):
        m = _frozen(self.matrix)
        if m.shape != (2, 2):
            raise DimensionError(f"mode unitary must be 2x2, got shape {m.shape}")
        dev = _unitarity_deviation(m)
        if dev > self.tol:
            raise UnitarityError(dev, self.tol)
        object.__setattr__(self, "matrix", m)

    def __matmul__(self, other: "ModeUnitary") -> "ModeUnitary":
        return ModeUnitary(self.matrix @ other.matrix, tol=max(self.tol, other.tol))

    @classmethod
    def identity(cls) -> "ModeUnitary":
        return cls(np.eye(2))

    @classmethod
    def beamsplitter(cls) -> "ModeUnitary":
        return cls(BEAMSPLITTER)

    @classmethod
    def phase(cls, phi: float, mode: str = "a") -> "ModeUnitary":
        d = [np.exp(1j * phi), 1.0] if mode == "a" else [1.0, np.exp(1j * phi)]
        return cls(np.diag(d))


@dataclass(frozen=True, eq=False)
class FockVector:
    """Pure state of N photons in two modes, amplitudes in descending-``a`` order."""

    amplitudes: np.ndarray

    def __post_init__(self):
        amps = _frozen(self.amplitudes)
        if amps.ndim != 1 or amps.size < 1:
            raise DimensionError(f"amplitudes must be a nonempty 1-d vector, got shape {amps.shape}")
        object.__setattr__(self, "amplitudes", amps)

    @property
    def photon_number(self) -> int:
        return self.amplitudes.size - 1

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def is_normalized(self, tol: float = FOCK_NORM_TOL) -> bool:
        return abs(self.norm**2 - 1.0) <= tol

    @classmethod
    def basis(cls, n_a: int, n_b: int) -> "FockVector":
        """The number state ``|n_a, n_b>``."""
        if n_a < 0 or n_b < 0:
            raise ValueError("photon counts must be non-negative")
        amps = np.zeros(n_a + n_b + 1, dtype=complex)
        amps[n_b] = 1.0
        return cls(amps)


@dataclass(frozen=True, eq=False)
class FockUnitary:
    """Matrix of a mode transformation restricted to the N-photon subspace."""

    matrix: np.ndarray

    def __post_init__(self):
        m = _frozen(self.matrix)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise DimensionError(f"Fock unitary must be square, got shape {m.shape}")
        object.__setattr__(self, "matrix", m)

    @property
    def photon_number(self) -> int:
        return self.matrix.shape[0] - 1

    def is_unitary(self, tol: float = FOCK_NORM_TOL) -> bool:
        return _unitarity_deviation(self.matrix) <= tol

    def __matmul__(self, other: "FockUnitary") -> "FockUnitary":
        if self.matrix.shape != other.matrix.shape:
            raise DimensionError(
                f"cannot compose N={self.photon_number} with N={other.photon_number}"
            )
        return FockUnitary(self.matrix @ other.matrix)

    @property
    def dagger(self) -> "FockUnitary":
        return FockUnitary(self.matrix.conj().T)


def _as_mode_unitary(U) -> ModeUnitary:
    return U if isinstance(U, ModeUnitary) else ModeUnitary(U)


def _binomial_row(x: complex, y: complex, n: int) -> np.ndarray:
    """Coefficients of ``(x a + y b)^n`` indexed by the power of ``a``."""
    return np.array([math.comb(n, i) * x**i * y ** (n - i) for i in range(n + 1)], dtype=complex)


def lift_matrix(u: np.ndarray, n_photons: int) -> np.ndarray:
    """Symmetric-representation matrix of a 2x2 array, without unitarity checks.

    Column ``n`` is the image of ``|N-n, n>``; the input state
    ``(a^dag)^p (b^dag)^q |0> / sqrt(p! q!)`` is expanded as a product of
    binomials in the output creation operators.
    """
    N = n_photons
    u = np.asarray(u, dtype=complex)
    fact = [math.factorial(k) for k in range(N + 1)]
    out = np.zeros((N + 1, N + 1), dtype=complex)
    for col in range(N + 1):
        p, q = N - col, col
        # powers of a^dag in the output polynomial, index 0..N
        poly = np.convolve(_binomial_row(u[0, 0], u[1, 0], p), _binomial_row(u[0, 1], u[1, 1], q))
        norm_in = math.sqrt(fact[p] * fact[q])
        for ka in range(N + 1):
            out[N - ka, col] = poly[ka] * math.sqrt(fact[ka] * fact[N - ka]) / norm_in
    return out


def lift_unitary(U, n_photons: int) -> FockUnitary:
    """Lift a 2x2 mode unitary to the (N+1)-dimensional N-photon subspace.

    For ``N=1`` the result is ``U`` itself. Non-unitary input raises
    :class:`UnitarityError`.
    """
    if n_photons < 0:
        raise ValueError(f"photon number must be non-negative, got {n_photons}")
    U = _as_mode_unitary(U)
    return FockUnitary(lift_matrix(U.matrix, n_photons))


def permanent(m: np.ndarray) -> complex:
    """Permanent by full expansion over permutations. Exponential cost."""
    n = m.shape[0]
    if n == 0:
        return 1.0 + 0j
    rows = range(n)
    return complex(sum(math.prod(m[r, s] for r, s in zip(rows, perm)) for perm in itertools.permutations(rows)))


def lift_oracle(U, n_photons: int) -> FockUnitary:
    """Brute-force lift through permanents of row/column-repeated submatrices.

    ``<out|U|in> = per(U[out, in]) / sqrt(prod(out!) prod(in!))`` where
    ``U[out, in]`` repeats row ``j`` ``out_j`` times and column ``k`` ``in_k``
    times. Independent of :func:`lift_unitary` and only used for checking it.
    """
    N = n_photons
    if N > ORACLE_MAX_PHOTONS:
        raise LimitError(f"lift_oracle supports N <= {ORACLE_MAX_PHOTONS}, got {N}")
    if N < 0:
        raise ValueError(f"photon number must be non-negative, got {N}")
    u = _as_mode_unitary(U).matrix
    out = np.zeros((N + 1, N + 1), dtype=complex)
    for r in range(N + 1):
        occ_out = (N - r, r)
        rows = [0] * occ_out[0] + [1] * occ_out[1]
        for c in range(N + 1):
            occ_in = (N - c, c)
            cols = [0] * occ_in[0] + [1] * occ_in[1]
            sub = u[np.ix_(rows, cols)]
            norm = math.sqrt(math.prod(math.factorial(k) for k in occ_out + occ_in))
            out[r, c] = permanent(sub) / norm
    return FockUnitary(out)


def photons_in_a(n_photons: int) -> np.ndarray:
    """Photon count in mode ``a`` for each basis index."""
    return np.arange(n_photons, -1, -1)


def phase_shifter(phi: float, mode: str, n_photons: int) -> FockUnitary:
    """Diagonal ``e^{i n phi}`` with ``n`` the photon count in ``mode``."""
    if mode not in ("a", "b"):
        raise ValueError(f"mode must be 'a' or 'b', got {mode!r}")
    n = photons_in_a(n_photons) if mode == "a" else np.arange(n_photons + 1)
    return FockUnitary(np.diag(np.exp(1j * n * phi)))


@lru_cache(maxsize=None)
def _beamsplitter_lift(n_photons: int) -> np.ndarray:
    return lift_unitary(BEAMSPLITTER, n_photons).matrix


def beamsplitter(n_photons: int) -> FockUnitary:
    return FockUnitary(_beamsplitter_lift(n_photons))


def mzi(phi: float, n_photons: int) -> FockUnitary:
    """Mach-Zehnder interferometer: beamsplitter, phase ``phi`` on mode a, beamsplitter."""
    bs = beamsplitter(n_photons)
    return bs @ phase_shifter(phi, "a", n_photons) @ bs


def apply(U: FockUnitary, v: FockVector) -> FockVector:
    if U.matrix.shape[1] != v.amplitudes.size:
        raise DimensionError(
            f"operator acts on N={U.photon_number} photons but state has N={v.photon_number}"
        )
    return FockVector(U.matrix @ v.amplitudes)


def outcome_probability(v: FockVector, m: int) -> float:
    """Probability of detecting basis state ``m`` (an index into the Fock basis)."""
    if not 0 <= m <= v.photon_number:
        raise IndexError(f"outcome index {m} out of range for N={v.photon_number}")
    return float(abs(v.amplitudes[m]) ** 2)
