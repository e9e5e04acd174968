"""Amplitude bookkeeping for the nested-cube ``1/|nu|`` state preparation.

The preparation runs over branches labelled by the cube index ``mu``, the
sign-magnitude register contents for ``nu`` and the inequality-test register
``m``. Rather than simulating gates, each branch's probability is tracked
exactly. Branches that are flagged (minus zero, inner box, failed inequality)
are recorded as failure mass; downstream they act as the identity in SELECT.

Sums that need every ``nu`` up to ``n = 12`` bits (4095**3 points) are done by
grouping on ``s = |nu|**2``: the success weight depends on ``nu`` only through
``mu`` and ``s``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Optional

import numpy as np
from scipy import integrate, signal

from .lattice import inverse_square_sum


@dataclass(frozen=True)
class PrepConfig:
    n: int
    M: Optional[int] = None  # None is the M -> infinity limit

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("n must be >= 2")
        if self.M is not None and (self.M < 2 or self.M & (self.M - 1)):
            raise ValueError("M must be a power of two >= 2")


@dataclass(frozen=True)
class ShellSet:
    mu: int
    members: np.ndarray  # (k, 3) integer triples, lexicographic


@dataclass
class PrepAmplitudes:
    mu: np.ndarray
    nu: np.ndarray
    amplitude: np.ndarray
    failure: dict[str, float] = field(default_factory=dict)

    @property
    def success_mass(self) -> float:
        return math.fsum((self.amplitude**2).tolist())

    @property
    def failure_mass(self) -> float:
        return math.fsum(self.failure.values())


def _norm_factor(n: int) -> int:
    return 2 ** (n + 1) - 4


def mu_weights(n: int) -> np.ndarray:
    """Amplitudes of the initial ``|mu>`` superposition for ``mu = 2..n``."""
    if n < 2:
        raise ValueError("n must be >= 2")
    mu = np.arange(2, n + 1)
    return np.sqrt(2.0**mu / _norm_factor(n))


def _box(h: int) -> np.ndarray:
    r = np.arange(-h, h + 1)
    return np.stack(np.meshgrid(r, r, r, indexing="ij"), axis=-1).reshape(-1, 3)


def shell(mu: int) -> ShellSet:
    if mu < 2:
        raise ValueError("mu must be >= 2")
    pts = _box(2 ** (mu - 1) - 1)
    a = np.abs(pts)
    keep = np.any(a >= 2 ** (mu - 2), axis=1)
    return ShellSet(mu, pts[keep])


@lru_cache(maxsize=32)
def norm_counts(h: int) -> np.ndarray:
    """``c[s]`` = number of integer triples in ``[-h, h]**3`` with squared norm ``s``."""
    c1 = np.zeros(h * h + 1)
    c1[0] = 1.0
    c1[np.arange(1, h + 1) ** 2] = 2.0
    raw = signal.fftconvolve(signal.fftconvolve(c1, c1), c1)
    counts = np.rint(raw).astype(np.int64)
    if np.max(np.abs(raw - counts), initial=0.0) > 1e-3 or counts.sum() != (2 * h + 1) ** 3:
        raise ArithmeticError("norm-count convolution lost integer precision")
    counts.setflags(write=False)
    return counts


def shell_norm_counts(mu: int) -> np.ndarray:
    """Counts by squared norm for the members of ``B_mu``."""
    outer = norm_counts(2 ** (mu - 1) - 1).copy()
    if mu > 2:
        inner = norm_counts(2 ** (mu - 2) - 1)
        outer[: len(inner)] -= inner
    else:
        outer[0] -= 1
    return outer


def _q_values(mu: int, s: np.ndarray, M: int) -> np.ndarray:
    """Number of ``m in [0, M)`` with ``m * s < M * 4**(mu-2)``."""
    A = M * 4 ** (mu - 2)
    return np.minimum(-(-A // s), M)


def _failure_labels(n: int) -> dict[str, float]:
    minus_zero = inner = 0.0
    for mu in range(2, n + 1):
        w = 2.0**mu / _norm_factor(n) / 2.0 ** (3 * mu)
        minus_zero += w * (2 ** (3 * mu) - (2**mu - 1) ** 3)
        inner += w * (2 ** (mu - 1) - 1) ** 3
    return {"minus_zero": minus_zero, "inner_box": inner}


def discretized_amplitudes(config: PrepConfig) -> PrepAmplitudes:
    """Enumerate every successful ``(mu, nu)`` branch with its exact amplitude.

    Cost grows as ``8**n``; intended for ``n <= 7``.
    """
    n, M = config.n, config.M
    norm = _norm_factor(n)
    mus, nus, amps = [], [], []
    ineq_fail = 0.0
    for mu in range(2, n + 1):
        members = shell(mu).members
        s = np.sum(members * members, axis=1)
        if M is None:
            frac = 4.0 ** (mu - 2) / s
        else:
            frac = _q_values(mu, s, M) / M
        mus.append(np.full(len(s), mu))
        nus.append(members)
        amps.append(np.sqrt(frac / (4.0**mu * norm)))
        ineq_fail += math.fsum(((1.0 - frac) / (4.0**mu * norm)).tolist())
    failure = _failure_labels(n)
    failure["inequality"] = ineq_fail
    return PrepAmplitudes(np.concatenate(mus), np.concatenate(nus), np.concatenate(amps), failure)


def success_probability(n: int, M: Optional[int] = None) -> float:
    """Probability of an unflagged branch; ``M=None`` is the large-``M`` limit."""
    if n < 2:
        raise ValueError("n must be >= 2")
    if M is None:
        return inverse_square_sum(2 ** (n - 1) - 1) / (2**5 * (2**n - 2))
    PrepConfig(n, M)
    total = []
    for mu in range(2, n + 1):
        c = shell_norm_counts(mu)
        s = np.nonzero(c)[0]
        q = _q_values(mu, s, M)
        total.append(float(np.sum(c[s] * q)) / (M * 4.0**mu * _norm_factor(n)))
    return math.fsum(total)


def l1_discretization_error(config: PrepConfig, check: bool = True) -> float:
    """``sum |amp_M**2 - amp_inf**2|`` over the success branch; bounded by ``1/M``."""
    n, M = config.n, config.M
    if M is None:
        return 0.0
    parts = []
    for mu in range(2, n + 1):
        c = shell_norm_counts(mu)
        s = np.nonzero(c)[0]
        excess = _q_values(mu, s, M) / M - 4.0 ** (mu - 2) / s
        parts.append(float(np.sum(c[s] * np.abs(excess))) / (4.0**mu * _norm_factor(n)))
    err = math.fsum(parts)
    if check and not err <= 1.0 / M:
        raise ArithmeticError(f"discretization error {err} exceeds 1/M = {1.0 / M}")
    return err


def _ti2(x: float) -> float:
    """Inverse tangent integral ``int_0^x arctan(t)/t dt``."""
    val, _ = integrate.quad(lambda t: math.atan(t) / t if t else 1.0, 0.0, x, epsabs=1e-14, epsrel=1e-13)
    return val


def box_integral_asymptote() -> float:
    """Large-``n`` limit of the success probability, ``(1/8) int_[0,1]^3 1/r^2``."""
    catalan = _ti2(1.0)
    return 3.0 / 8.0 * (_ti2(3.0 - math.sqrt(8.0)) - catalan + math.pi / 2.0 * math.log(1.0 + math.sqrt(2.0)))


def amplified_failure(P: float) -> float:
    """Failure probability after one round of amplitude amplification."""
    if not 0.0 <= P <= 1.0:
        raise ValueError("P must lie in [0, 1]")
    return math.sin(3.0 * math.acos(math.sqrt(P))) ** 2


def grover_step(amps: PrepAmplitudes) -> PrepAmplitudes:
    """One amplification round on the success/failure plane.

    Both branches keep their internal shape; only the two overall weights move.
    """
    P = min(max(amps.success_mass, 0.0), 1.0)
    theta = math.asin(math.sqrt(P))
    new_success = math.sin(3.0 * theta) ** 2
    scale = math.sqrt(new_success / P) if P > 0 else 0.0
    fail_old = amps.failure_mass
    fail_scale = (1.0 - new_success) / fail_old if fail_old > 0 else 0.0
    return PrepAmplitudes(
        amps.mu.copy(),
        amps.nu.copy(),
        amps.amplitude * scale,
        {k: v * fail_scale for k, v in amps.failure.items()},
    )


def fig1_rows(n_max: int, n_min: int = 2, M: Optional[int] = None) -> list[dict]:
    """Rows ``(n, P_n, amplified_failure[, P_n at finite M])`` for ``n_min..n_max``."""
    rows = []
    for n in range(n_min, n_max + 1):
        p = success_probability(n)
        row = {"n": n, "P_n": p, "amplified_failure": amplified_failure(p)}
        if M is not None:
            row["P_n_M"] = success_probability(n, M)
        rows.append(row)
    return rows
