"""Solver settings shared by the node solver and the search driver."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

SCREENING_AUTO_MIN_P = 10_000


@dataclass
class SolverSettings:
    """Knobs for the branch-and-bound search and its node relaxations.

    rel_gap_target is the relative optimality gap at which the search stops;
    pd_gap the relative primal-dual gap required of a node solve before its
    bound is trusted; int_tol the tolerance within which a recovered selection
    variable counts as integral.  screening is "auto" (on for wide problems),
    "on" or "off"; branching is "strong" or "frac".  trace, when set, is
    called with one dict per explored node.
    """

    rel_gap_target: float = 1e-2
    int_tol: float = 1e-4
    pd_gap: float = 1e-5
    cd_tolerance: float = 1e-6
    max_cd_cycles: int = 500
    screening: str = "auto"
    screening_audit: bool = False
    eps_gs: float = 0.05
    branching: str = "strong"
    workers: int = 1
    seed: int = 0
    time_limit: float | None = None
    node_limit: int | None = None
    trace: Callable[[dict], None] | None = None

    def __post_init__(self) -> None:
        if self.screening not in ("auto", "on", "off"):
            raise ValueError(f"screening must be auto, on or off, got {self.screening!r}")
        if self.branching not in ("strong", "frac"):
            raise ValueError(f"branching must be strong or frac, got {self.branching!r}")
        if self.workers < 1:
            raise ValueError("workers must be at least 1")
        for name in ("rel_gap_target", "int_tol", "pd_gap", "cd_tolerance"):
            if getattr(self, name) <= 0.0:
                raise ValueError(f"{name} must be positive")

    def screening_enabled(self, p: int) -> bool:
        if self.screening == "on":
            return True
        if self.screening == "off":
            return False
        return p >= SCREENING_AUTO_MIN_P
