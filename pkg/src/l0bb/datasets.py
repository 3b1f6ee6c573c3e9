"""Synthetic data generation, normalization and file formats.

The synthetic generator draws rows from a multivariate normal with either a
constant correlation or block-wise exponentially decaying correlation, places
equi-spaced unit coefficients and adds Gaussian noise calibrated to a target
signal-to-noise ratio snr = var(x @ beta) / sigma^2.

Two on-disk formats are supported: CSV with an optional header row (response
in a named column or, by default, the last column) and a compact binary
matrix format.  The binary layout is the 4 magic bytes "L0BB", one version
byte (currently 1), little-endian uint64 row and column counts, then the
design matrix as column-major float64 followed by the response vector.
"""

from __future__ import annotations

import csv
import math
import struct
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .problem import Dataset

MAGIC = b"L0BB"
BINARY_VERSION = 1

RIDGE_GRID = np.logspace(-4.0, 4.0, 50)


@dataclass(frozen=True)
class SynthSpec:
    """Recipe for one synthetic regression instance."""

    n: int
    p: int
    k: int
    rho: float = 0.0
    corr: str = "constant"
    snr: float = 5.0
    seed: int = 0

    def __post_init__(self) -> None:
        if self.n < 2 or self.p < 1:
            raise ValueError("need n >= 2 and p >= 1")
        if not 1 <= self.k <= self.p:
            raise ValueError("support size k must lie in [1, p]")
        if not 0.0 <= self.rho < 1.0:
            raise ValueError("rho must lie in [0, 1)")
        if self.corr not in ("constant", "block"):
            raise ValueError(f"unknown correlation structure {self.corr!r}")
        if not self.snr > 0.0:
            raise ValueError("snr must be positive (math.inf for noiseless)")


@dataclass
class SynthData:
    """Raw generated instance, before any normalization."""

    x: np.ndarray
    y: np.ndarray
    beta: np.ndarray
    support: tuple[int, ...]
    sigma2: float
    spec: SynthSpec


def generate(spec: SynthSpec) -> SynthData:
    """Draw one instance.  The random stream order is fixed, so a given seed
    always produces bit-identical arrays."""
    rng = np.random.default_rng(spec.seed)
    n, p = spec.n, spec.p
    if spec.corr == "constant":
        shared = rng.standard_normal((n, 1))
        x = math.sqrt(spec.rho) * shared + math.sqrt(1.0 - spec.rho) * rng.standard_normal((n, p))
    else:
        # k nearly equal consecutive blocks, AR(1) within each block.
        x = np.empty((n, p))
        sizes = [p // spec.k + (1 if b < p % spec.k else 0) for b in range(spec.k)]
        start = 0
        scale = math.sqrt(1.0 - spec.rho ** 2)
        for size in sizes:
            noise = rng.standard_normal((n, size))
            x[:, start] = noise[:, 0]
            for j in range(1, size):
                x[:, start + j] = spec.rho * x[:, start + j - 1] + scale * noise[:, j]
            start += size
    support = tuple(sorted({(j * p) // spec.k for j in range(spec.k)}))
    beta = np.zeros(p)
    beta[list(support)] = 1.0
    signal = x @ beta
    sigma2 = 0.0 if math.isinf(spec.snr) else float(np.var(signal)) / spec.snr
    y = signal + math.sqrt(sigma2) * rng.standard_normal(n)
    return SynthData(x=x, y=y, beta=beta, support=support, sigma2=sigma2, spec=spec)


def normalize(x: np.ndarray, y: np.ndarray, center: bool = True) -> Dataset:
    """Mean-center (optionally) and scale columns and response to unit norm.

    Raises ValueError when a column or the response has no variation, naming
    the offending column.  Already normalized input passes through unchanged
    up to floating-point roundoff.
    """
    x = np.array(x, dtype=np.float64, order="F", copy=True)
    y = np.array(y, dtype=np.float64, copy=True).ravel()
    if x.ndim != 2 or x.shape[0] != y.shape[0]:
        raise ValueError("x must be n-by-p and y a length-n vector")
    if not np.isfinite(x).all() or not np.isfinite(y).all():
        raise ValueError("inputs must be finite")
    if center:
        means = x.mean(axis=0)
        x -= means
        y_mean = float(y.mean())
        y = y - y_mean
    else:
        means = np.zeros(x.shape[1])
        y_mean = 0.0
    norms = np.linalg.norm(x, axis=0)
    floor = 1e-12 * math.sqrt(max(x.shape[0], 1))
    bad = np.flatnonzero(norms <= floor)
    if bad.size:
        raise ValueError(f"column {int(bad[0])} has zero variance after centering")
    x /= norms
    y_norm = float(np.linalg.norm(y))
    if y_norm <= floor:
        raise ValueError("response has zero variance after centering")
    y = y / y_norm
    return Dataset(x=x, y=y, column_norms=norms, y_norm=y_norm, centered=center,
                   column_means=means, y_mean=y_mean)


def lambda0_max(data: Dataset, lambda2: float) -> float:
    """Smallest lambda0 at which beta == 0 is coordinate-wise optimal for the
    exact objective, max_i <x_i, y>^2 / (2 + 4 * lambda2)."""
    top = float(np.max(np.abs(data.xty))) if data.p else 0.0
    return top * top / (2.0 + 4.0 * lambda2)


def scale_coefficients(data: Dataset, beta_original: np.ndarray) -> dict[int, float]:
    """Express raw-unit coefficients in the normalized problem's units."""
    out: dict[int, float] = {}
    for i in np.flatnonzero(beta_original):
        out[int(i)] = float(beta_original[i]) * float(data.column_norms[i]) / data.y_norm
    return out


def restricted_ridge(data: Dataset, support: Sequence[int], lambda2: float) -> np.ndarray:
    """Ridge coefficients on a fixed support, in normalized units."""
    idx = np.asarray(sorted(support), dtype=np.intp)
    if idx.size == 0:
        return np.zeros(0)
    xs = data.x[:, idx]
    gram = xs.T @ xs + 2.0 * lambda2 * np.eye(idx.size)
    rhs = xs.T @ data.y
    try:
        return np.linalg.solve(gram, rhs)
    except np.linalg.LinAlgError:
        return np.linalg.lstsq(xs.T @ xs, rhs, rcond=None)[0]


def estimate_ridge_params(data: Dataset, support: Sequence[int],
                          target: dict[int, float]) -> tuple[float, float]:
    """Pick (lambda2, big_m) from the ridge grid.

    For each grid value the ridge fit restricted to the given support is
    compared against the target coefficients (normalized units); the grid
    point with the closest fit wins and big_m is the largest coefficient
    magnitude of that fit.
    """
    idx = sorted(support)
    tvec = np.array([target.get(i, 0.0) for i in idx])
    best = (math.inf, RIDGE_GRID[0], 0.0)
    for lam2 in RIDGE_GRID:
        bhat = restricted_ridge(data, idx, float(lam2))
        dist = float(np.linalg.norm(bhat - tvec))
        if dist < best[0]:
            best = (dist, float(lam2), float(np.max(np.abs(bhat))) if idx else 0.0)
    return best[1], best[2]


def save_bin(path: str, x: np.ndarray, y: np.ndarray) -> None:
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64).ravel()
    if x.ndim != 2 or x.shape[0] != y.shape[0]:
        raise ValueError("x must be n-by-p and y a length-n vector")
    n, p = x.shape
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(bytes([BINARY_VERSION]))
        fh.write(struct.pack("<QQ", n, p))
        fh.write(np.asfortranarray(x).tobytes(order="F"))
        fh.write(y.tobytes())


def load_bin(path: str) -> tuple[np.ndarray, np.ndarray]:
    with open(path, "rb") as fh:
        blob = fh.read()
    if len(blob) < 21 or blob[:4] != MAGIC:
        raise ValueError(f"{path}: not a matrix file (bad magic)")
    if blob[4] != BINARY_VERSION:
        raise ValueError(f"{path}: unsupported format version {blob[4]}")
    n, p = struct.unpack("<QQ", blob[5:21])
    need = 21 + 8 * n * p + 8 * n
    if len(blob) != need:
        raise ValueError(f"{path}: truncated or oversized payload "
                         f"(expected {need} bytes, found {len(blob)})")
    flat = np.frombuffer(blob, dtype="<f8", count=n * p, offset=21)
    x = np.asfortranarray(flat.reshape((n, p), order="F"))
    y = np.frombuffer(blob, dtype="<f8", count=n, offset=21 + 8 * n * p).copy()
    return x, y


def save_csv(path: str, x: np.ndarray, y: np.ndarray,
             feature_names: Sequence[str] | None = None,
             response_name: str = "y") -> None:
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64).ravel()
    if feature_names is None:
        feature_names = [f"x{j}" for j in range(x.shape[1])]
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(list(feature_names) + [response_name])
        for row, target in zip(x, y):
            writer.writerow([repr(float(v)) for v in row] + [repr(float(target))])


def _is_number(token: str) -> bool:
    try:
        float(token)
        return True
    except ValueError:
        return False


def load_csv(path: str, response: str | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Load a CSV table, splitting off the response column.

    A header row is detected by non-numeric tokens in the first line.  The
    response is taken from the column named by `response` (header required)
    or from the last column when no name is given.
    """
    with open(path, newline="") as fh:
        rows = [row for row in csv.reader(fh) if row]
    if not rows:
        raise ValueError(f"{path}: empty file")
    header: list[str] | None = None
    if any(not _is_number(tok) for tok in rows[0]):
        header = [tok.strip() for tok in rows[0]]
        rows = rows[1:]
    if not rows:
        raise ValueError(f"{path}: no data rows")
    try:
        table = np.array([[float(tok) for tok in row] for row in rows])
    except ValueError as exc:
        raise ValueError(f"{path}: non-numeric entry in data rows: {exc}") from None
    if response is not None:
        if header is None:
            raise ValueError(f"{path}: a named response column needs a header row")
        if response not in header:
            raise ValueError(f"{path}: no column named {response!r}")
        col = header.index(response)
    else:
        col = table.shape[1] - 1
    y = table[:, col].copy()
    x = np.delete(table, col, axis=1)
    if x.shape[1] == 0:
        raise ValueError(f"{path}: no feature columns left after removing the response")
    return x, y
