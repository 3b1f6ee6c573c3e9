"""Array-in, handle-out wrappers around the l0bb command line solver.

The solver is consumed strictly through its public surface: the ``l0bb``
command line interface and its documented matrix file format (magic bytes
"L0BB", a version byte, little-endian uint64 dims, column-major float64
payload).  Each call writes the arrays to a scratch file, runs the CLI in a
subprocess, and parses the JSON result.  No numerics are reimplemented
here, and because the solve happens in a separate process the interpreter
lock is never held while it runs.
"""

from __future__ import annotations

import json
import math
import os
import struct
import subprocess
import sys
import tempfile
from typing import Any, Sequence

import numpy as np

_MAGIC = b"L0BB"
_FORMAT_VERSION = 1

# keyword settings accepted by fit / fit_path and the CLI flag each maps to
_SETTING_FLAGS = {
    "gap": "--gap",
    "int_tol": "--int-tol",
    "pd_tol": "--pd-tol",
    "time_limit": "--time-limit",
    "nodes_limit": "--nodes-limit",
    "screening": "--screening",
    "branching": "--branching",
    "workers": "--workers",
    "seed": "--seed",
    "trace": "--trace",
}


def _cli_base() -> list[str]:
    return [sys.executable, "-m", "l0bb"]


def _check_arrays(x: Any, y: Any) -> tuple[np.ndarray, np.ndarray]:
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.ndim != 2:
        raise ValueError(f"x must be a 2-d array, got ndim {x.ndim}")
    if y.ndim != 1:
        raise ValueError(f"y must be a 1-d array, got ndim {y.ndim}")
    if x.shape[0] != y.shape[0]:
        raise ValueError(f"x has {x.shape[0]} rows but y has {y.shape[0]} entries")
    if not np.isfinite(x).all() or not np.isfinite(y).all():
        raise ValueError("inputs must be finite")
    return x, y


def _write_matrix(path: str, x: np.ndarray, y: np.ndarray) -> None:
    # either input layout is fine; the file is column-major by definition
    with open(path, "wb") as fh:
        fh.write(_MAGIC)
        fh.write(bytes([_FORMAT_VERSION]))
        fh.write(struct.pack("<QQ", x.shape[0], x.shape[1]))
        fh.write(np.asfortranarray(x).tobytes(order="F"))
        fh.write(np.ascontiguousarray(y).tobytes())


def _read_matrix(path: str) -> tuple[np.ndarray, np.ndarray]:
    with open(path, "rb") as fh:
        blob = fh.read()
    if blob[:4] != _MAGIC or blob[4] != _FORMAT_VERSION:
        raise ValueError(f"{path}: not a recognized matrix file")
    n, p = struct.unpack("<QQ", blob[5:21])
    x = np.frombuffer(blob, dtype="<f8", count=n * p, offset=21)
    y = np.frombuffer(blob, dtype="<f8", count=n, offset=21 + 8 * n * p)
    return np.asfortranarray(x.reshape((n, p), order="F")), y.copy()


def _penalty_flags(lambda0, lambda2, big_m) -> list[str]:
    def render(value, name):
        if value == "auto":
            return "auto"
        value = float(value)
        if name == "big_m" and math.isinf(value):
            return "auto"
        return repr(value)

    return ["--lambda0", render(lambda0, "lambda0"),
            "--lambda2", repr(float(lambda2)),
            "--big-m", render(big_m, "big_m")]


def _setting_flags(settings: dict[str, Any]) -> list[str]:
    flags: list[str] = []
    for name, value in settings.items():
        flag = _SETTING_FLAGS.get(name)
        if flag is None:
            raise TypeError(f"unexpected setting {name!r}; known settings: "
                            f"{', '.join(sorted(_SETTING_FLAGS))}")
        if value is None:
            continue
        flags.extend([flag, str(value)])
    return flags


def _run_cli(args: list[str]) -> subprocess.CompletedProcess:
    proc = subprocess.run(_cli_base() + args, capture_output=True, text=True)
    if proc.returncode not in (0, 2):
        message = proc.stderr.strip() or proc.stdout.strip() or "solver failed"
        raise RuntimeError(message)
    return proc


class FitHandle:
    """One solver result.

    Wraps the solver's JSON record; accessors report exactly what the CLI
    reported for the same inputs.  Coefficients are in the units of the
    arrays passed in, with the intercept separate.
    """

    def __init__(self, record: dict[str, Any], n_features: int):
        self._record = record
        self._n_features = n_features

    @property
    def coefficients(self) -> np.ndarray:
        coef = np.zeros(self._n_features)
        for i, value in self._record["support"]:
            coef[int(i)] = value
        return coef

    @property
    def intercept(self) -> float:
        return self._record["intercept"]

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(int(i) for i, _ in self._record["support"])

    @property
    def objective(self) -> float:
        return self._record["objective"]

    @property
    def lower_bound(self) -> float:
        return self._record["lower_bound"]

    @property
    def gap(self) -> float:
        return self._record["rel_gap"]

    @property
    def node_count(self) -> int:
        return self._record["nodes_explored"]

    @property
    def status(self) -> str:
        return self._record["status"]

    @property
    def lambda0(self) -> float | None:
        """Penalty the record was solved at; set for path results."""
        return self._record.get("lambda0")

    def record(self) -> dict[str, Any]:
        """The raw solver record (a copy)."""
        return dict(self._record)

    def __repr__(self) -> str:
        return (f"FitHandle(objective={self.objective:.6g}, "
                f"support_size={len(self._record['support'])}, "
                f"gap={self.gap:.2e}, nodes={self.node_count})")


def fit(x, y, lambda0="auto", lambda2=1e-2, big_m="auto", **settings) -> FitHandle:
    """Solve one penalized regression problem on in-memory arrays.

    lambda0 and big_m accept "auto" with the same meaning as the CLI.
    Extra keyword settings mirror the CLI flags (gap, int_tol, pd_tol,
    time_limit, nodes_limit, screening, branching, workers, seed, trace).
    """
    x, y = _check_arrays(x, y)
    flags = _penalty_flags(lambda0, lambda2, big_m) + _setting_flags(settings)
    with tempfile.TemporaryDirectory(prefix="l0bb-") as scratch:
        data_path = os.path.join(scratch, "data.bin")
        out_path = os.path.join(scratch, "result.json")
        _write_matrix(data_path, x, y)
        _run_cli(["fit", data_path, "--output", out_path] + flags)
        with open(out_path) as fh:
            record = json.load(fh)
    return FitHandle(record, x.shape[1])


def fit_path(x, y, lambda0_grid: Sequence[float], lambda2=1e-2,
             big_m="auto", **settings) -> list[FitHandle]:
    """Solve along a lambda0 grid; returns one handle per grid value,
    sorted by decreasing lambda0."""
    x, y = _check_arrays(x, y)
    grid = [float(v) for v in lambda0_grid]
    if not grid:
        return []
    flags = _penalty_flags("auto", lambda2, big_m)[2:]  # no --lambda0 on path
    flags += _setting_flags(settings)
    flags += ["--grid", ",".join(repr(v) for v in grid)]
    with tempfile.TemporaryDirectory(prefix="l0bb-") as scratch:
        data_path = os.path.join(scratch, "data.bin")
        out_path = os.path.join(scratch, "result.json")
        _write_matrix(data_path, x, y)
        _run_cli(["path", data_path, "--output", out_path] + flags)
        with open(out_path) as fh:
            payload = json.load(fh)
    return [FitHandle(record, x.shape[1]) for record in payload["path"]]


def generate_synthetic(n: int, p: int, k: int, rho: float = 0.0,
                       corr: str = "constant", snr: float = 5.0,
                       seed: int = 0) -> tuple[np.ndarray, np.ndarray, tuple[int, ...]]:
    """Draw a synthetic instance through the solver's generator.

    Returns (x, y, planted_support).  Deterministic in the seed.
    """
    with tempfile.TemporaryDirectory(prefix="l0bb-") as scratch:
        data_path = os.path.join(scratch, "data.bin")
        proc = _run_cli(["gen", "--n", str(n), "--p", str(p), "--k", str(k),
                         "--rho", repr(float(rho)), "--corr", corr,
                         "--snr", "inf" if math.isinf(snr) else repr(float(snr)),
                         "--seed", str(seed), "--format", "bin",
                         "--output", data_path])
        summary = json.loads(proc.stdout)
        x, y = _read_matrix(data_path)
    return x, y, tuple(summary["planted_support"])
