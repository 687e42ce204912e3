"""Labelled two-dimensional datasets for the circle task."""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path
from typing import Iterator, NamedTuple

import numpy as np

from .errors import DataError

CIRCLE_CENTER = (0.2, 0.6)
CIRCLE_RADIUS = 0.32


class LabeledPoint(NamedTuple):
    x: tuple[float, ...]
    y: int


@dataclass(frozen=True, eq=False)
class Dataset:
    """Feature matrix ``X`` of shape ``(n, D)`` and 0/1 labels ``y``."""

    X: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        X = np.array(self.X, dtype=float)
        y = np.array(self.y)
        if X.ndim == 1 and X.size == 0:
            X = X.reshape(0, 2)
        if X.ndim != 2:
            raise DataError(f"features must be a 2-d array, got shape {X.shape}")
        if y.shape != (X.shape[0],):
            raise DataError(f"{X.shape[0]} points but {y.size} labels")
        if not np.all(np.isfinite(X)):
            raise DataError("features must be finite")
        if y.size and not np.all(np.isin(y, (0, 1))):
            raise DataError("labels must be 0 or 1")
        y = y.astype(int)
        X.setflags(write=False)
        y.setflags(write=False)
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "y", y)

    def __len__(self) -> int:
        return self.X.shape[0]

    def __iter__(self) -> Iterator[LabeledPoint]:
        for x, y in zip(self.X, self.y):
            yield LabeledPoint(tuple(float(v) for v in x), int(y))

    def __eq__(self, other):
        if not isinstance(other, Dataset):
            return NotImplemented
        return np.array_equal(self.X, other.X) and np.array_equal(self.y, other.y)

    @property
    def feature_dim(self) -> int:
        return self.X.shape[1]

    @classmethod
    def from_points(cls, points) -> "Dataset":
        points = list(points)
        if not points:
            return cls(np.empty((0, 2)), np.empty(0, dtype=int))
        return cls(np.array([p.x for p in points]), np.array([p.y for p in points]))


def circle_label(X, center=CIRCLE_CENTER, radius=CIRCLE_RADIUS) -> np.ndarray:
    """0 strictly inside the circle, 1 on or outside it."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    d2 = (X[:, 0] - center[0]) ** 2 + (X[:, 1] - center[1]) ** 2
    return np.where(d2 < radius**2, 0, 1)


def gen_circle(n: int, center=CIRCLE_CENTER, radius=CIRCLE_RADIUS, seed=None) -> Dataset:
    """``n`` points uniform on the unit square, labelled by :func:`circle_label`."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if radius <= 0:
        raise ValueError(f"radius must be positive, got {radius}")
    X = np.random.default_rng(seed).uniform(0.0, 1.0, size=(n, 2))
    return Dataset(X, circle_label(X, center, radius))


def split(ds: Dataset, n_train: int, seed=None) -> tuple[Dataset, Dataset]:
    """Shuffle and cut into ``n_train`` training points and the rest."""
    if not 0 <= n_train <= len(ds):
        raise ValueError(f"n_train must be in 0..{len(ds)}, got {n_train}")
    perm = np.random.default_rng(seed).permutation(len(ds))
    a, b = perm[:n_train], perm[n_train:]
    return Dataset(ds.X[a], ds.y[a]), Dataset(ds.X[b].reshape(-1, ds.feature_dim), ds.y[b])


def save_csv(ds: Dataset, path) -> None:
    """Header ``x1,...,xD,y``; floats written with ``repr`` so reloading is exact."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow([f"x{i + 1}" for i in range(ds.feature_dim)] + ["y"])
        for x, y in zip(ds.X, ds.y):
            w.writerow([repr(float(v)) for v in x] + [int(y)])


def load_csv(path) -> Dataset:
    path = Path(path)
    try:
        text = path.read_text()
    except FileNotFoundError:
        raise DataError(f"dataset not found: {path}") from None
    rows = list(csv.reader(text.splitlines()))
    if not rows:
        raise DataError(f"{path}: empty dataset file")
    header = [h.strip() for h in rows[0]]
    if len(header) < 2 or header[-1] != "y":
        raise DataError(f"{path}:1: header must be x1,...,xD,y, got {','.join(header)!r}")
    D = len(header) - 1
    X, y = [], []
    for lineno, row in enumerate(rows[1:], start=2):
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != D + 1:
            raise DataError(f"{path}:{lineno}: expected {D + 1} fields, got {len(row)}")
        try:
            feats = [float(v) for v in row[:D]]
        except ValueError:
            raise DataError(f"{path}:{lineno}: non-numeric feature in {row!r}") from None
        label = row[D].strip()
        if label not in ("0", "1"):
            raise DataError(f"{path}:{lineno}: label must be 0 or 1, got {label!r}")
        X.append(feats)
        y.append(int(label))
    if not X:
        raise DataError(f"{path}: dataset has no rows")
    return Dataset(np.array(X), np.array(y))
