"""Layered two-mode circuits with data re-uploading.

Every element carries one physical phase, an affine function of the
trainable vector ``theta`` and the feature vector ``x``::

    phase = theta[bias] + sum(theta[p] * x[f] for p, f in weights)

Elements are applied in list order, so the first element acts first on the
input state.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from typing import Sequence

import numpy as np

from . import fock
from .errors import DimensionError, SpecError

DEFAULT_THRESHOLD = 0.5


class Kind(str, Enum):
    MZI = "mzi"
    PHASE = "phase"


@dataclass(frozen=True)
class EncodingSpec:
    bias: int
    weights: tuple[tuple[int, int], ...] = ()

    def params(self) -> list[int]:
        return [self.bias] + [p for p, _ in self.weights]


@dataclass(frozen=True)
class ElementSpec:
    kind: Kind
    encoding: EncodingSpec


@dataclass(frozen=True, eq=False)
class CircuitSpec:
    """Complete description of a classifier circuit.

    Attributes:
        photon_number: total photons N in the two modes.
        elements: applied in order to ``input_state``.
        input_state: amplitudes over ``|N,0>, ..., |0,N>``.
        outcome: basis index of the measured outcome.
        threshold: probability above which a point is labelled 1.
        param_count: length of theta.
        feature_dim: length of each feature vector.
    """

    photon_number: int
    elements: tuple[ElementSpec, ...]
    input_state: np.ndarray
    outcome: int
    param_count: int
    feature_dim: int
    threshold: float = DEFAULT_THRESHOLD

    def __post_init__(self):
        N = self.photon_number
        if N < 1:
            raise SpecError(f"photon_number must be >= 1, got {N}")
        object.__setattr__(self, "elements", tuple(self.elements))
        psi = np.array(self.input_state, dtype=complex)
        psi.setflags(write=False)
        object.__setattr__(self, "input_state", psi)
        if psi.shape != (N + 1,):
            raise SpecError(f"input_state needs {N + 1} amplitudes, got {psi.shape}")
        if abs(np.vdot(psi, psi).real - 1.0) > fock.FOCK_NORM_TOL:
            raise SpecError(f"input_state is not normalized (norm^2 = {np.vdot(psi, psi).real:.12g})")
        if not 0 <= self.outcome <= N:
            raise SpecError(f"outcome index {self.outcome} outside 0..{N}")
        if not 0.0 <= self.threshold <= 1.0:
            raise SpecError(f"threshold must lie in [0, 1], got {self.threshold}")
        referenced = set()
        for i, el in enumerate(self.elements):
            enc = el.encoding
            for p in enc.params():
                if not 0 <= p < self.param_count:
                    raise SpecError(f"element {i}: parameter index {p} outside 0..{self.param_count - 1}")
                referenced.add(p)
            for _, f in enc.weights:
                if not 0 <= f < self.feature_dim:
                    raise SpecError(f"element {i}: feature index {f} outside 0..{self.feature_dim - 1}")
        unused = sorted(set(range(self.param_count)) - referenced)
        if unused:
            raise SpecError(f"parameters {unused} are not referenced by any element")

    def __eq__(self, other):
        if not isinstance(other, CircuitSpec):
            return NotImplemented
        return to_dict(self) == to_dict(other)

    def with_threshold(self, threshold: float) -> "CircuitSpec":
        return CircuitSpec(
            self.photon_number, self.elements, self.input_state, self.outcome,
            self.param_count, self.feature_dim, threshold,
        )


# -- JSON ---------------------------------------------------------------------

def _parse_state(doc, N: int) -> np.ndarray:
    if isinstance(doc, str):
        # preset "n_a,n_b", e.g. "1,1"
        try:
            n_a, n_b = (int(t) for t in doc.strip("|>").split(","))
        except ValueError as exc:
            raise SpecError(f"bad input_state preset {doc!r}; expected 'n_a,n_b'") from exc
        if n_a + n_b != N:
            raise SpecError(f"preset {doc!r} has {n_a + n_b} photons, circuit has {N}")
        return fock.FockVector.basis(n_a, n_b).amplitudes
    try:
        return np.array([complex(re, im) for re, im in doc], dtype=complex)
    except (TypeError, ValueError) as exc:
        raise SpecError("input_state must be a preset string or a list of [re, im] pairs") from exc


def from_dict(doc: dict) -> CircuitSpec:
    try:
        N = int(doc["photon_number"])
        elements = []
        for e in doc["elements"]:
            enc = EncodingSpec(int(e["bias"]), tuple((int(p), int(f)) for p, f in e.get("weights", [])))
            elements.append(ElementSpec(Kind(e["kind"]), enc))
        return CircuitSpec(
            photon_number=N,
            elements=tuple(elements),
            input_state=_parse_state(doc.get("input_state", "1,1"), N),
            outcome=int(doc["outcome"]),
            param_count=int(doc["param_count"]),
            feature_dim=int(doc["feature_dim"]),
            threshold=float(doc.get("threshold", DEFAULT_THRESHOLD)),
        )
    except KeyError as exc:
        raise SpecError(f"circuit document is missing field {exc.args[0]!r}") from exc
    except ValueError as exc:
        if isinstance(exc, SpecError):
            raise
        raise SpecError(f"invalid circuit document: {exc}") from exc


def to_dict(spec: CircuitSpec) -> dict:
    return {
        "photon_number": spec.photon_number,
        "param_count": spec.param_count,
        "feature_dim": spec.feature_dim,
        "elements": [
            {
                "kind": el.kind.value,
                "bias": el.encoding.bias,
                "weights": [[p, f] for p, f in el.encoding.weights],
            }
            for el in spec.elements
        ],
        "input_state": [[float(a.real), float(a.imag)] for a in spec.input_state],
        "outcome": spec.outcome,
        "threshold": spec.threshold,
    }


def loads(text: str) -> CircuitSpec:
    return from_dict(json.loads(text))


def dumps(spec: CircuitSpec) -> str:
    return json.dumps(to_dict(spec), indent=2)


def reference_circuit(threshold: float = DEFAULT_THRESHOLD) -> CircuitSpec:
    """MZI, phase shifter, MZI on |1,1> measuring |1,1>.

    Phases are ``t0 + t1*x2``, ``t2 + t3*x1`` and ``t4 + t5*x2``.
    """
    return CircuitSpec(
        photon_number=2,
        elements=(
            ElementSpec(Kind.MZI, EncodingSpec(0, ((1, 1),))),
            ElementSpec(Kind.PHASE, EncodingSpec(2, ((3, 0),))),
            ElementSpec(Kind.MZI, EncodingSpec(4, ((5, 1),))),
        ),
        input_state=fock.FockVector.basis(1, 1).amplitudes,
        outcome=1,
        param_count=6,
        feature_dim=2,
        threshold=threshold,
    )


# -- evaluation ---------------------------------------------------------------

def _check_theta(spec: CircuitSpec, theta) -> np.ndarray:
    theta = np.asarray(theta, dtype=float)
    if theta.shape != (spec.param_count,):
        raise DimensionError(f"theta must have {spec.param_count} entries, got shape {theta.shape}")
    if not np.all(np.isfinite(theta)):
        raise DimensionError("theta has non-finite entries")
    return theta


def _check_features(spec: CircuitSpec, X) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[None, :]
    if X.ndim != 2 or X.shape[1] != spec.feature_dim:
        raise DimensionError(f"features must have dimension {spec.feature_dim}, got shape {X.shape}")
    return X


def resolve_phases_batch(spec: CircuitSpec, theta, X) -> np.ndarray:
    """Physical phases, shape ``(n_points, n_elements)``."""
    theta = _check_theta(spec, theta)
    X = _check_features(spec, X)
    out = np.empty((X.shape[0], len(spec.elements)))
    for e, el in enumerate(spec.elements):
        col = np.full(X.shape[0], theta[el.encoding.bias])
        for p, f in el.encoding.weights:
            col = col + theta[p] * X[:, f]
        out[:, e] = col
    return out


def resolve_phases(spec: CircuitSpec, theta, x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.shape != (spec.feature_dim,):
        raise DimensionError(f"x must have {spec.feature_dim} entries, got shape {x.shape}")
    return resolve_phases_batch(spec, theta, x)[0]


def element_unitaries(spec: CircuitSpec, phases: np.ndarray, e: int) -> np.ndarray:
    """Batch of Fock matrices for element ``e`` at each phase, shape ``(n, d, d)``."""
    N = spec.photon_number
    diag = np.exp(1j * np.multiply.outer(phases, fock.photons_in_a(N)))
    if spec.elements[e].kind is Kind.PHASE:
        out = np.zeros(diag.shape + (N + 1,), dtype=complex)
        idx = np.arange(N + 1)
        out[:, idx, idx] = diag
        return out
    bs = fock.beamsplitter(N).matrix
    return np.einsum("ij,nj,jk->nik", bs, diag, bs)


def evolve_phases(spec: CircuitSpec, phases) -> np.ndarray:
    """Output amplitudes for each row of resolved phases, shape ``(n, N+1)``."""
    phases = np.atleast_2d(np.asarray(phases, dtype=float))
    if phases.shape[1] != len(spec.elements):
        raise DimensionError(f"expected {len(spec.elements)} phases per point, got {phases.shape[1]}")
    state = np.broadcast_to(spec.input_state, (phases.shape[0], spec.photon_number + 1)).copy()
    for e in range(len(spec.elements)):
        state = np.einsum("nij,nj->ni", element_unitaries(spec, phases[:, e], e), state)
    return state


def forward_phases(spec: CircuitSpec, phases) -> np.ndarray:
    """Outcome probability for each row of resolved physical phases."""
    amp = evolve_phases(spec, phases)[:, spec.outcome]
    return np.clip(np.abs(amp) ** 2, 0.0, 1.0)


def forward_batch(spec: CircuitSpec, theta, X) -> np.ndarray:
    return forward_phases(spec, resolve_phases_batch(spec, theta, X))


def forward(spec: CircuitSpec, theta, x) -> float:
    """Exact probability of the measured outcome for one data point."""
    return float(forward_phases(spec, resolve_phases(spec, theta, x)[None, :])[0])


def sample_probabilities(p, shots: int, rng) -> np.ndarray:
    """Binomial estimates ``k/shots`` of the exact probabilities ``p``."""
    if shots < 1:
        raise ValueError(f"shots must be >= 1, got {shots}")
    rng = np.random.default_rng(rng)
    p = np.clip(np.asarray(p, dtype=float), 0.0, 1.0)
    return rng.binomial(shots, p) / shots


def forward_sampled(spec: CircuitSpec, theta, x, shots: int, seed=None) -> float:
    """Finite-count estimate of :func:`forward`.

    ``seed`` may be an int or a ``numpy.random.Generator``.
    """
    if shots < 1:
        raise ValueError(f"shots must be >= 1, got {shots}")
    return float(sample_probabilities(forward(spec, theta, x), shots, seed))


def classify(spec: CircuitSpec, theta, x) -> int:
    """1 if the probability strictly exceeds the threshold, else 0 (ties give 0)."""
    return int(forward(spec, theta, x) > spec.threshold)


def classify_batch(spec: CircuitSpec, theta, X) -> np.ndarray:
    return (forward_batch(spec, theta, X) > spec.threshold).astype(int)


def fit_threshold(probs: Sequence[float], labels: Sequence[int]) -> float:
    """Threshold maximizing balanced accuracy of ``p > b`` on the given points.

    Candidates are midpoints between consecutive distinct probabilities; the
    smallest maximizer wins. Returns the default when only one class is present.
    """
    p = np.asarray(probs, dtype=float)
    y = np.asarray(labels, dtype=int)
    n_pos, n_neg = int(np.sum(y == 1)), int(np.sum(y == 0))
    if n_pos == 0 or n_neg == 0:
        return DEFAULT_THRESHOLD
    u = np.unique(p)
    cands = np.concatenate(([0.0], (u[:-1] + u[1:]) / 2, [1.0]))
    pred = p[None, :] > cands[:, None]
    tpr = np.sum(pred & (y == 1), axis=1) / n_pos
    tnr = np.sum(~pred & (y == 0), axis=1) / n_neg
    return float(cands[np.argmax(tpr + tnr)])


def boundary_amplitudes(spec: CircuitSpec, theta, x, e: int) -> tuple[fock.FockVector, fock.FockVector]:
    """States on either side of element ``e``'s phase-shifting section.

    Returns ``(U_before |psi0>, U_after^dag |m>)``. For an MZI element the
    inner beamsplitters are folded into the two products, so that the
    outcome amplitude is ``sum_k conj(post_k) exp(i n_k phi) pre_k`` with
    ``n_k`` the photon count in mode a.
    """
    if not 0 <= e < len(spec.elements):
        raise IndexError(f"element index {e} out of range")
    phases = resolve_phases(spec, theta, x)
    pre = spec.input_state.astype(complex)
    for k in range(e):
        pre = element_unitaries(spec, phases[k : k + 1], k)[0] @ pre
    post = np.zeros(spec.photon_number + 1, dtype=complex)
    post[spec.outcome] = 1.0
    for k in range(len(spec.elements) - 1, e, -1):
        post = element_unitaries(spec, phases[k : k + 1], k)[0].conj().T @ post
    if spec.elements[e].kind is Kind.MZI:
        bs = fock.beamsplitter(spec.photon_number).matrix
        pre = bs @ pre
        post = bs.conj().T @ post
    return fock.FockVector(pre), fock.FockVector(post)


def boundary_amplitudes_batch(spec: CircuitSpec, phases: np.ndarray, e: int) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized :func:`boundary_amplitudes` from resolved phases, each ``(n, N+1)``."""
    n = phases.shape[0]
    d = spec.photon_number + 1
    pre = np.broadcast_to(spec.input_state, (n, d)).astype(complex)
    for k in range(e):
        pre = np.einsum("nij,nj->ni", element_unitaries(spec, phases[:, k], k), pre)
    post = np.zeros((n, d), dtype=complex)
    post[:, spec.outcome] = 1.0
    for k in range(len(spec.elements) - 1, e, -1):
        post = np.einsum("nji,nj->ni", element_unitaries(spec, phases[:, k], k).conj(), post)
    if spec.elements[e].kind is Kind.MZI:
        bs = fock.beamsplitter(spec.photon_number).matrix
        pre = pre @ bs.T
        post = post @ bs.conj()
    return pre, post
