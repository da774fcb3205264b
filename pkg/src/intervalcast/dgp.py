"""Synthetic interval-series generators.

Three seeded processes produce center/range pairs for benchmarking:

- c1: ARMA-style center y_t = 0.4 y_{t-1} + e_t + 2 e_{t-1} started at
  y_0 = 0, e_0 = 0; range i.i.d. Uniform(30, 50).
- c2: two-branch threshold center recursion started at y_0 = y_1 = 0,
  branch chosen by whether the value two steps back is below 5; range
  i.i.d. Uniform(30, 50) (the branch-threshold setting leaves the range
  process open; uniform matches c1 and is flagged in the spec_note).
- c3: log-autoregressive range y_t = 0.2 y_{t-1} + 1.6 log(1000 y_{t-1})
  + 30 + e_t started at y_0 = 0.001 (natural log by default); center
  reuses the c1 recursion (likewise an extrapolation, flagged).

The generated series contains exactly ``length`` computed values; the
initial conditions above are consumed by the recursions but not emitted.
Noise is N(0, noise_std^2).  Draw order is fixed (center noise first,
then the range draws), so output is bit-identical for a given seed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import LogDomain
from .series import CenterRangeSeries

DGP_KINDS = ("c1", "c2", "c3")


@dataclass(frozen=True)
class DgpSpec:
    """Parameters of one synthetic generation run."""

    kind: str
    length: int = 1500
    seed: int = 0
    noise_std: float = 1.0
    burn_in: int = 0
    c3_log_base: str = "e"  # "e" (natural, default) or "10"

    def __post_init__(self):
        if self.kind not in DGP_KINDS:
            raise ValueError(f"unknown dgp kind {self.kind!r}; expected one of {DGP_KINDS}")
        if self.length < 10:
            raise ValueError(f"length must be >= 10, got {self.length}")
        if not self.noise_std > 0:
            raise ValueError(f"noise_std must be positive, got {self.noise_std}")
        if self.burn_in < 0:
            raise ValueError(f"burn_in must be >= 0, got {self.burn_in}")
        if self.c3_log_base not in ("e", "10"):
            raise ValueError(f"c3_log_base must be 'e' or '10', got {self.c3_log_base!r}")


def iterate_c1_center(eps) -> np.ndarray:
    """Run the c1 center recursion over a given noise sequence.

    eps[i] plays the role of e_{i+1}; e_0 = 0 and y_0 = 0.  Returns the
    computed values y_1..y_n for n = len(eps).
    """
    eps = np.asarray(eps, dtype=float)
    out = np.empty(eps.size)
    y_prev = 0.0
    e_prev = 0.0
    for i in range(eps.size):
        y_prev = 0.4 * y_prev + eps[i] + 2.0 * e_prev
        e_prev = eps[i]
        out[i] = y_prev
    return out


def iterate_c2_center(eps) -> np.ndarray:
    """Run the two-branch threshold recursion over a noise sequence.

    Starting from y_0 = y_1 = 0, each step computes
        y = 0.6 + 1.3 y_prev - 0.4 y_prev2 + e   if y_prev2 < 5
        y = 1.2 + 1.6 y_prev - 1.1 y_prev2 + e   otherwise.
    Returns the computed values y_2..y_{n+1}.
    """
    eps = np.asarray(eps, dtype=float)
    out = np.empty(eps.size)
    y_prev2 = 0.0
    y_prev = 0.0
    for i in range(eps.size):
        if y_prev2 < 5.0:
            y = 0.6 + 1.3 * y_prev - 0.4 * y_prev2 + eps[i]
        else:
            y = 1.2 + 1.6 * y_prev - 1.1 * y_prev2 + eps[i]
        y_prev2, y_prev = y_prev, y
        out[i] = y
    return out


def iterate_c3_range(eps, log_base: str = "e") -> np.ndarray:
    """Run the log-autoregressive range recursion over a noise sequence.

    Starting from y_0 = 0.001, each step computes
        y = 0.2 y_prev + 1.6 log(1000 y_prev) + 30 + e.
    Raises LogDomain if an iterate is <= 0 before entering the log.
    """
    eps = np.asarray(eps, dtype=float)
    log = math.log if log_base == "e" else math.log10
    out = np.empty(eps.size)
    y_prev = 0.001
    for i in range(eps.size):
        if y_prev <= 0.0:
            raise LogDomain(
                f"range iterate became non-positive ({y_prev}) at step {i}; "
                "log-recursion aborted"
            )
        y_prev = 0.2 * y_prev + 1.6 * log(1000.0 * y_prev) + 30.0 + eps[i]
        out[i] = y_prev
    return out


def generate_dgp(spec: DgpSpec) -> CenterRangeSeries:
    """Generate one seeded center/range series per the spec.

    Deterministic: the same spec always yields bit-identical output.
    """
    rng = np.random.default_rng(spec.seed)
    n = spec.length + spec.burn_in

    if spec.kind == "c1":
        center = iterate_c1_center(rng.normal(0.0, spec.noise_std, n))
        rng_vals = rng.uniform(30.0, 50.0, n)
    elif spec.kind == "c2":
        center = iterate_c2_center(rng.normal(0.0, spec.noise_std, n))
        rng_vals = rng.uniform(30.0, 50.0, n)
    else:  # c3
        center = iterate_c1_center(rng.normal(0.0, spec.noise_std, n))
        rng_vals = iterate_c3_range(rng.normal(0.0, spec.noise_std, n), spec.c3_log_base)

    return CenterRangeSeries(center=center[-spec.length:], range=rng_vals[-spec.length:])
