"""Truncated Dyson series evolution in the rotating frame of a diagonal ``A``.

For ``H = A + B`` one segment of length ``tau`` is

    e^{-i A tau} sum_{k<=K} (-i)^k int_{0<=s_1<=...<=s_k<=tau} B_I(s_k) ... B_I(s_1)

with ``B_I(s) = e^{iAs} B e^{-iAs}``. The simplex integrals are evaluated by
the recursion ``W_k(s) = -i int_0^s B_I(u) W_{k-1}(u) du`` with a cumulative
trapezoid rule on ``quad_points`` uniform intervals, so no ``k``-dimensional
grid is ever formed.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np
import scipy.sparse as sp

from .hamiltonian import FirstQuantizedBasis, as_dense, build_U, build_V, kinetic_diagonal
from .lattice import SimulationCell
from .lcu import lambda_total

MAX_QUAD_POINTS = 2**16


@dataclass
class SplitHamiltonian:
    a: np.ndarray  # diagonal of A
    B: object  # dense ndarray or scipy sparse matrix
    lambda_B: float

    @property
    def dim(self) -> int:
        return len(self.a)

    def dense_H(self) -> np.ndarray:
        return np.diag(self.a).astype(complex) + as_dense(self.B)


@dataclass(frozen=True)
class SegmentPlan:
    tau: float
    segments: int
    K: int
    quad_points: int
    epsilon: float

    @property
    def segment_tolerance(self) -> float:
        """Share of the error budget given to each of truncation and quadrature, per segment."""
        return self.epsilon / (2 * self.segments)


def split_from_cell(cell: SimulationCell) -> SplitHamiltonian:
    """``A = T`` and ``B = U + V`` with ``lambda_B`` the LCU 1-norm."""
    basis = FirstQuantizedBasis(cell)
    B = sp.csr_matrix(build_U(basis) + build_V(basis))
    return SplitHamiltonian(kinetic_diagonal(basis), B, lambda_total(cell))


def truncation_order(x: float, tol: float) -> int:
    """Smallest ``K >= 1`` with ``x**(K+1)/(K+1)! <= tol``."""
    K = 1
    while x ** (K + 1) / math.factorial(K + 1) > tol:
        K += 1
    return K


def plan_schedule(lambda_B: float, t: float, epsilon: float, quad_points: int = 8) -> SegmentPlan:
    if not t >= 0:
        raise ValueError("t must be non-negative")
    if not 0 < epsilon < 1:
        raise ValueError("epsilon must lie in (0, 1)")
    if lambda_B < 0:
        raise ValueError("lambda_B must be non-negative")
    segments = max(1, math.ceil(2.0 * lambda_B * t))
    tau = t / segments
    K = truncation_order(lambda_B * tau, epsilon / (2 * segments))
    return SegmentPlan(tau, segments, K, quad_points, epsilon)


def segment_apply(split: SplitHamiltonian, tau: float, K: int, quad_points: int, X: np.ndarray) -> np.ndarray:
    """Apply one truncated segment to the columns of ``X``."""
    X = np.asarray(X, dtype=complex)
    vec = X.ndim == 1
    if vec:
        X = X[:, None]
    h = tau / quad_points
    s = h * np.arange(quad_points + 1)
    phase = np.exp(-1j * np.outer(s, split.a))  # e^{-iAs} diagonals, one row per grid point
    total = X.copy()
    W = np.broadcast_to(X, (quad_points + 1,) + X.shape)
    for _ in range(K):
        # F(s) = B_I(s) W(s)
        F = np.empty_like(W)
        for m in range(quad_points + 1):
            F[m] = phase[m].conj()[:, None] * (split.B @ (phase[m][:, None] * W[m]))
        # cumulative trapezoid with the -i factor
        incr = (-0.5j * h) * (F[1:] + F[:-1])
        W = np.concatenate([np.zeros_like(F[:1]), np.cumsum(incr, axis=0)])
        total = total + W[-1]
    out = np.exp(-1j * tau * split.a)[:, None] * total
    return out[:, 0] if vec else out


def dyson_segment(split: SplitHamiltonian, tau: float, K: int, quad_points: int) -> np.ndarray:
    if split.dim > 4096:
        raise ValueError("segment matrices are limited to dimension <= 4096")
    return segment_apply(split, tau, K, quad_points, np.eye(split.dim, dtype=complex))


def converge_segment(split: SplitHamiltonian, plan: SegmentPlan, X: np.ndarray) -> tuple[np.ndarray, int]:
    """Double ``quad_points`` until successive segment results agree to the per-segment tolerance."""
    q = plan.quad_points
    prev = segment_apply(split, plan.tau, plan.K, q, X)
    while True:
        q *= 2
        cur = segment_apply(split, plan.tau, plan.K, q, X)
        diff = np.linalg.norm(cur - prev, ord=2) if cur.ndim == 2 else np.linalg.norm(cur - prev)
        # second-order rule: the error of ``cur`` is about diff / 3
        if diff <= plan.segment_tolerance:
            return cur, q
        if q >= MAX_QUAD_POINTS:
            raise ArithmeticError(f"quadrature did not converge by {q} points (last change {diff:.3e})")
        prev = cur


def evolve(
    split: SplitHamiltonian,
    t: float,
    epsilon: float,
    plan: Optional[SegmentPlan] = None,
    converge: bool = True,
) -> np.ndarray:
    """Truncated-series approximation of ``exp(-i(A+B)t)`` as a dense matrix.

    With ``converge=False`` the plan's ``quad_points`` is used as given.
    """
    if plan is None:
        plan = plan_schedule(split.lambda_B, t, epsilon)
    eye = np.eye(split.dim, dtype=complex)
    if t == 0:
        return eye
    if converge:
        seg, _ = converge_segment(split, plan, eye)
    else:
        seg = dyson_segment(split, plan.tau, plan.K, plan.quad_points)
    return np.linalg.matrix_power(seg, plan.segments)


def evolve_state(split: SplitHamiltonian, t: float, epsilon: float, psi: np.ndarray) -> tuple[np.ndarray, SegmentPlan]:
    """Evolve a single state segment by segment; returns the state and the final plan."""
    plan = plan_schedule(split.lambda_B, t, epsilon)
    psi = np.asarray(psi, dtype=complex)
    if t == 0:
        return psi.copy(), plan
    q_used = plan.quad_points
    start = plan
    for _ in range(plan.segments):
        psi, q = converge_segment(split, start, psi)
        q_used = max(q_used, q)
        # later segments restart one doubling below the resolution that sufficed
        start = replace(plan, quad_points=max(plan.quad_points, q // 2))
    return psi, replace(plan, quad_points=q_used)


def exact_propagator(split: SplitHamiltonian, t: float) -> np.ndarray:
    """Dense ``exp(-iHt)`` by Hermitian diagonalization."""
    w, v = np.linalg.eigh(split.dense_H())
    return (v * np.exp(-1j * w * t)) @ v.conj().T


def interaction_frame_residual(split: SplitHamiltonian, t: float, steps: int = 2**14) -> float:
    """Spectral-norm gap between ``exp(-iHt)`` and the frame-rotated product integral of ``B_I``."""
    B = as_dense(split.B)
    w, v = np.linalg.eigh(B)
    h = t / steps
    step_exp = (v * np.exp(-1j * w * h)) @ v.conj().T
    a = split.a
    W = np.eye(split.dim, dtype=complex)
    for m in range(steps):
        s = (m + 0.5) * h
        d = np.exp(1j * a * s)
        # exp(-i h B_I(s)) = e^{iAs} exp(-ihB) e^{-iAs}
        W = (d[:, None] * step_exp * d.conj()[None, :]) @ W
    approx = np.exp(-1j * a * t)[:, None] * W
    return float(np.linalg.norm(exact_propagator(split, t) - approx, ord=2))


def random_split(dim: int, rng: np.random.Generator, a_scale: float = 5.0, b_scale: float = 1.0) -> SplitHamiltonian:
    """Random diagonal ``A`` and Hermitian ``B``; ``lambda_B`` is the spectral norm of ``B``."""
    a = rng.uniform(-a_scale, a_scale, dim)
    G = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    B = (G + G.conj().T) / 2.0
    B *= b_scale / np.linalg.norm(B, ord=2)
    return SplitHamiltonian(a, B, float(np.linalg.norm(B, ord=2)))
