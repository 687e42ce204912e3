"""Sequential minimal optimization of circuit parameters.

One scalar parameter ``s`` enters exactly one element's phase as
``phase_i = s * m_i + c_i`` at data point ``i``. With every other parameter
fixed, the outcome probability at that point is a degree-N trigonometric
polynomial ``poly_i`` of the phase, so the training cost::

    C(s) = mean_i (poly_i(s * m_i + c_i) - y_i)^2

is known in closed form once ``poly_i`` is. The polynomials come either from
the boundary amplitudes around the element (analytic) or from 2N+1 probe
evaluations of the circuit (probed, optionally with shot noise). ``s`` then
jumps to the minimizer of ``C`` and the sweep moves to the next parameter.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import circuit as circ
from .circuit import CircuitSpec
from .data import Dataset
from .errors import SharedParameterError, SpecError
from .trigpoly import TrigPoly, evaluate, probe_phases, recover_coefficients

log = logging.getLogger(__name__)

PROBE_MODES = ("analytic", "probed", "sampled")


@dataclass(frozen=True)
class TrainConfig:
    max_sweeps: int = 30
    rel_tol: float = 1e-6
    grid_size: int = 2048
    refine_iters: int = 5
    weight_search_halfwidth: float = 2 * math.pi
    shots: Optional[int] = None
    probe_mode: str = "analytic"
    seed: int = 0

    def __post_init__(self):
        if self.rel_tol <= 0:
            raise SpecError(f"rel_tol must be positive, got {self.rel_tol}")
        if self.max_sweeps < 1:
            raise SpecError(f"max_sweeps must be >= 1, got {self.max_sweeps}")
        if self.refine_iters < 0:
            raise SpecError(f"refine_iters must be >= 0, got {self.refine_iters}")
        if self.weight_search_halfwidth <= 0:
            raise SpecError("weight_search_halfwidth must be positive")
        if self.shots is not None and self.shots < 1:
            raise SpecError(f"shots must be >= 1, got {self.shots}")
        if self.probe_mode not in ("analytic", "probed"):
            raise SpecError(f"probe_mode must be 'analytic' or 'probed', got {self.probe_mode!r}")

    @property
    def mode(self) -> str:
        """Effective probe mode: shots switch any config to ``sampled``."""
        return "sampled" if self.shots is not None else self.probe_mode

    def check_for(self, spec: CircuitSpec) -> None:
        need = 2 * (2 * spec.photon_number + 1)
        if self.grid_size < need:
            raise SpecError(f"grid_size must be >= {need} for N={spec.photon_number}, got {self.grid_size}")

    @classmethod
    def from_dict(cls, doc: dict) -> "TrainConfig":
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(doc) - known
        if unknown:
            raise SpecError(f"unknown train config keys: {sorted(unknown)}")
        return cls(**doc)

    def to_dict(self) -> dict:
        return {f: getattr(self, f) for f in self.__dataclass_fields__}


@dataclass(frozen=True, eq=False)
class ScalarProblem:
    """Cost of the training set as a function of one parameter.

    Attributes:
        coefficients: ``(n_points, 2N+1)`` trig-poly coefficients per point.
        multipliers: ``m_i``, 1 for a bias or the feature value for a weight.
        offsets: ``c_i``, the rest of the affine phase at each point.
        labels: ``y_i``.
    """

    coefficients: np.ndarray
    multipliers: np.ndarray
    offsets: np.ndarray
    labels: np.ndarray
    param: int = -1
    is_bias: bool = True

    def __post_init__(self):
        n = len(self.labels)
        if not (len(self.coefficients) == len(self.multipliers) == len(self.offsets) == n):
            raise ValueError("scalar problem arrays must share their first dimension")

    @property
    def polys(self) -> list[TrigPoly]:
        return [TrigPoly(c) for c in self.coefficients]

    def phases(self, s) -> np.ndarray:
        s = np.asarray(s, dtype=float)
        return s[..., None] * self.multipliers + self.offsets

    def cost(self, s):
        """Mean squared residual; vectorized over ``s``."""
        r = evaluate(self.coefficients, self.phases(s)) - self.labels
        return np.mean(r * r, axis=-1)

    def cost_derivatives(self, s: float) -> tuple[float, float]:
        phi = self.phases(s)
        r = evaluate(self.coefficients, phi) - self.labels
        d1 = evaluate(self.coefficients, phi, 1) * self.multipliers
        d2 = evaluate(self.coefficients, phi, 2) * self.multipliers**2
        g = 2.0 * np.mean(r * d1)
        h = 2.0 * np.mean(d1 * d1 + r * d2)
        return float(g), float(h)


def scalar_cost(s, prob: ScalarProblem):
    return prob.cost(s)


# -- coefficient extraction ---------------------------------------------------

def closed_form_coefficients(pre: np.ndarray, post: np.ndarray) -> np.ndarray:
    """Closed-form A0..A4 for two photons.

    ``pre = (a1, b1, g1)`` is the state entering the phase section and
    ``post = (a2, b2, g2)`` the measured outcome propagated backwards, both in
    the (|20>, |11>, |02>) basis. Batched over leading axes.
    """
    a1, b1, g1 = np.moveaxis(np.asarray(pre), -1, 0)
    a2, b2, g2 = np.moveaxis(np.asarray(post), -1, 0)
    ab = np.conj(a1) * a2 * b1 * np.conj(b2)
    bg = np.conj(b1) * b2 * g1 * np.conj(g2)
    ag = np.conj(a1) * a2 * g1 * np.conj(g2)
    A0 = abs(a1) ** 2 * abs(a2) ** 2 + abs(b1) ** 2 * abs(b2) ** 2 + abs(g1) ** 2 * abs(g2) ** 2
    A1 = 2 * (ab + bg).real
    A2 = 2 * (ab + bg).imag
    A3 = 2 * ag.real
    A4 = 2 * ag.imag
    return np.stack([A0, A1, A2, A3, A4], axis=-1)


def fourier_coefficients(pre: np.ndarray, post: np.ndarray) -> np.ndarray:
    """Closed-form coefficients for any photon number.

    The outcome amplitude is ``sum_n c_n exp(i n phi)`` with ``n`` photons in
    mode a and ``c_n = conj(post_n) pre_n``. Its squared modulus has
    frequency-``d`` component ``D_d = sum_n c_{n+d} conj(c_n)``.
    """
    pre = np.asarray(pre)
    post = np.asarray(post)
    N = pre.shape[-1] - 1
    # reorder so index = photons in mode a
    c = (np.conj(post) * pre)[..., ::-1]
    out = np.empty(pre.shape[:-1] + (2 * N + 1,))
    out[..., 0] = np.sum(abs(c) ** 2, axis=-1)
    for d in range(1, N + 1):
        D = np.sum(c[..., d:] * np.conj(c[..., : N + 1 - d]), axis=-1)
        out[..., 2 * d - 1] = 2 * D.real
        out[..., 2 * d] = -2 * D.imag
    return out


def locate_parameter(spec: CircuitSpec, j: int) -> tuple[int, Optional[int]]:
    """Element index and role of parameter ``j``; role is None for a bias, else the feature index."""
    hits = []
    for e, el in enumerate(spec.elements):
        if el.encoding.bias == j:
            hits.append((e, None))
        hits.extend((e, f) for p, f in el.encoding.weights if p == j)
    if not hits:
        raise SpecError(f"parameter {j} is not referenced by any element")
    if len(hits) > 1:
        raise SharedParameterError(
            f"parameter {j} enters {len(hits)} phase terms; sequential optimization needs exactly one"
        )
    return hits[0]


def build_scalar_problem(
    spec: CircuitSpec,
    theta,
    data: Dataset,
    j: int,
    mode: str = "analytic",
    shots: Optional[int] = None,
    rng=None,
) -> ScalarProblem:
    """Reduce the training cost to a function of parameter ``j`` alone.

    Modes: ``analytic`` reads the coefficients off the boundary amplitudes,
    ``probed`` runs the circuit at the probe phases and inverts the samples,
    ``sampled`` does the same with ``shots`` binomial counts per probe.
    """
    if mode not in PROBE_MODES:
        raise ValueError(f"unknown probe mode {mode!r}")
    if len(data) == 0:
        raise ValueError("training data is empty")
    theta = np.asarray(theta, dtype=float)
    e, feature = locate_parameter(spec, j)
    phases = circ.resolve_phases_batch(spec, theta, data.X)
    mult = np.ones(len(data)) if feature is None else data.X[:, feature].astype(float)
    offsets = phases[:, e] - theta[j] * mult

    N = spec.photon_number
    if mode == "analytic":
        pre, post = circ.boundary_amplitudes_batch(spec, phases, e)
        coeffs = closed_form_coefficients(pre, post) if N == 2 else fourier_coefficients(pre, post)
    else:
        probes = probe_phases(N)
        K = probes.size
        batch = np.repeat(phases, K, axis=0)
        batch[:, e] = np.tile(probes, len(data))
        r = circ.forward_phases(spec, batch)
        if mode == "sampled":
            if shots is None:
                raise ValueError("sampled mode needs a shot count")
            r = circ.sample_probabilities(r, shots, rng)
        coeffs = recover_coefficients(np.clip(r, 0.0, 1.0).reshape(len(data), K))
    return ScalarProblem(coeffs, mult, offsets, data.y.astype(float), param=j, is_bias=feature is None)


# -- 1-d minimization ---------------------------------------------------------

def minimize_scalar(
    prob: ScalarProblem,
    is_bias: bool,
    config: TrainConfig = TrainConfig(),
    current: float = 0.0,
) -> tuple[float, float]:
    """Global grid search then Newton polishing; never worse than ``current``.

    Biases are searched over [0, 2 pi); weights over
    ``current +- weight_search_halfwidth``. Among equal grid minima the
    smallest ``s`` wins. If no candidate strictly improves on ``current``,
    ``current`` is returned unchanged.
    """
    n = config.grid_size
    if is_bias:
        grid = np.linspace(0.0, 2 * np.pi, n, endpoint=False)
    else:
        W = config.weight_search_halfwidth
        grid = np.linspace(current - W, current + W, n)
    costs = prob.cost(grid)
    i = int(np.argmin(costs))
    s, c = float(grid[i]), float(costs[i])
    step = float(grid[1] - grid[0])
    lo, hi = s - step, s + step
    if not is_bias:
        lo, hi = max(lo, grid[0]), min(hi, grid[-1])
    for _ in range(config.refine_iters):
        g, h = prob.cost_derivatives(s)
        if not h > 0:
            break
        trial = min(max(s - g / h, lo), hi)
        ct = float(prob.cost(trial))
        if ct > c:
            break
        s, c = trial, ct
    if is_bias:
        s = s % (2 * np.pi)
        c = float(prob.cost(s))
    c_now = float(prob.cost(current))
    if not c < c_now:
        return float(current), c_now
    return s, c


# -- sweeps and training ------------------------------------------------------

def cost(spec: CircuitSpec, theta, data: Dataset) -> float:
    """Mean squared error between outcome probabilities and labels."""
    if len(data) == 0:
        raise ValueError("cannot evaluate cost on an empty dataset")
    r = circ.forward_batch(spec, theta, data.X) - data.y
    return float(np.mean(r * r))


def estimated_cost(spec: CircuitSpec, theta, data: Dataset, shots: int, rng) -> float:
    p = circ.sample_probabilities(circ.forward_batch(spec, theta, data.X), shots, rng)
    return float(np.mean((p - data.y) ** 2))


def is_bias_param(spec: CircuitSpec, j: int) -> bool:
    return any(el.encoding.bias == j for el in spec.elements)


def initial_theta(spec: CircuitSpec, seed: int = 0) -> np.ndarray:
    """Biases uniform on [0, 2 pi), weights uniform on [-pi, pi]."""
    rng = np.random.default_rng(seed)
    draws = rng.uniform(0.0, 1.0, spec.param_count)
    return np.array(
        [2 * np.pi * u if is_bias_param(spec, j) else np.pi * (2 * u - 1) for j, u in enumerate(draws)]
    )


def smo_sweep(
    spec: CircuitSpec,
    theta,
    data: Dataset,
    config: TrainConfig = TrainConfig(),
    rng=None,
) -> tuple[np.ndarray, float]:
    """Update every parameter once, in ascending index order.

    Returns the new theta and its cost: exact in exact modes, otherwise the
    estimate from the last coordinate's sampled problem.
    """
    theta = np.array(theta, dtype=float)
    mode = config.mode
    c = float("nan")
    for j in range(spec.param_count):
        prob = build_scalar_problem(spec, theta, data, j, mode, config.shots, rng)
        theta[j], c = minimize_scalar(prob, prob.is_bias, config, theta[j])
    if mode != "sampled":
        c = cost(spec, theta, data)
    return theta, c


@dataclass
class TrainResult:
    """Outcome of :func:`train`.

    ``history[0]`` is the cost of the initial parameters and ``history[k]``
    the cost after sweep ``k``. ``theta`` is the parameter vector with the
    lowest recorded cost (latest on ties); ``thetas`` keeps every iterate.
    """

    theta: np.ndarray
    history: list[float]
    thetas: list[np.ndarray] = field(repr=False)
    best_index: int
    converged: bool

    @property
    def sweeps(self) -> int:
        return len(self.history) - 1

    @property
    def final_theta(self) -> np.ndarray:
        return self.thetas[-1]


def train(
    spec: CircuitSpec,
    theta0,
    data: Dataset,
    config: TrainConfig = TrainConfig(),
) -> TrainResult:
    """Repeat sweeps until the relative improvement drops below ``rel_tol``."""
    config.check_for(spec)
    rng = np.random.default_rng(config.seed)
    theta = np.array(theta0, dtype=float)
    if config.mode == "sampled":
        c0 = estimated_cost(spec, theta, data, config.shots, rng)
    else:
        c0 = cost(spec, theta, data)
    history, thetas = [c0], [theta.copy()]
    converged = False
    for sweep in range(1, config.max_sweeps + 1):
        theta, c = smo_sweep(spec, theta, data, config, rng)
        prev = history[-1]
        history.append(c)
        thetas.append(theta.copy())
        log.debug("sweep %d cost %.10g", sweep, c)
        improvement = (prev - c) / prev if prev > 0 else 0.0
        if improvement < config.rel_tol:
            converged = True
            break
    hist = np.asarray(history)
    best = int(np.flatnonzero(hist == hist.min())[-1])
    return TrainResult(thetas[best].copy(), history, thetas, best, converged)
