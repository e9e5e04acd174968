"""Exact first-quantized plane-wave Hamiltonian matrices.

The Hilbert space is the full product space of ``eta`` registers, each holding
one orbital momentum from ``G``; antisymmetry is not built into the basis but
imposed by :func:`antisymmetric_projector`. Basis index ordering is
lexicographic over register tuples, register 0 most significant.
"""
from __future__ import annotations

import csv
import itertools
import math
from dataclasses import dataclass, replace
from functools import cached_property
from typing import IO, Union

import numpy as np
import scipy.sparse as sp

from .lattice import Nucleus, SimulationCell, grid_G, grid_G0, in_G, orbital_index, wavenumber

DENSE_LIMIT = 4096

OperatorMatrix = Union[np.ndarray, sp.csr_matrix]


@dataclass(frozen=True)
class FirstQuantizedBasis:
    cell: SimulationCell

    @property
    def eta(self) -> int:
        return self.cell.eta

    @property
    def n_orbitals(self) -> int:
        return self.cell.n_orbitals

    @property
    def dim(self) -> int:
        return self.n_orbitals ** self.eta

    @cached_property
    def strides(self) -> np.ndarray:
        return self.n_orbitals ** np.arange(self.eta - 1, -1, -1)

    @cached_property
    def orbitals(self) -> np.ndarray:
        """Orbital index held by each register, shape ``(dim, eta)``."""
        idx = np.arange(self.dim)
        return (idx[:, None] // self.strides[None, :]) % self.n_orbitals

    @cached_property
    def momenta(self) -> np.ndarray:
        """Momentum triple held by each register, shape ``(dim, eta, 3)``."""
        return grid_G(self.cell)[self.orbitals]

    def index(self, momenta) -> int:
        """Basis index of a tuple of register momenta."""
        orb = orbital_index(np.asarray(momenta).reshape(self.eta, 3), self.cell)
        return int(orb @ self.strides)


def _finalize(dim: int, rows, cols, vals) -> OperatorMatrix:
    m = sp.coo_matrix((vals, (rows, cols)), shape=(dim, dim), dtype=complex)
    if dim <= DENSE_LIMIT:
        return m.toarray()
    return m.tocsr()


def as_dense(m: OperatorMatrix) -> np.ndarray:
    return m.toarray() if sp.issparse(m) else np.asarray(m)


def kinetic_diagonal(basis: FirstQuantizedBasis) -> np.ndarray:
    k = wavenumber(basis.momenta, basis.cell.omega)
    return 0.5 * np.sum(k * k, axis=(1, 2))


def build_T(basis: FirstQuantizedBasis) -> OperatorMatrix:
    d = np.arange(basis.dim)
    return _finalize(basis.dim, d, d, kinetic_diagonal(basis))


def one_body_nuclear(cell: SimulationCell) -> np.ndarray:
    """Single-register nuclear attraction matrix on G, following the ``e^{i k_{q-p} R}`` phase."""
    G = grid_G(cell)
    n = len(G)
    u1 = np.zeros((n, n), dtype=complex)
    if not cell.nuclei:
        return u1
    diff = G[:, None, :] - G[None, :, :]  # p - q
    assert np.all(np.abs(diff) <= cell.g0), "p - q escaped the G0 box"
    k_pq = wavenumber(diff, cell.omega)
    k2 = np.sum(k_pq * k_pq, axis=-1)
    off = ~np.eye(n, dtype=bool)
    R = cell.positions()
    zeta = cell.charges()
    # k_{q-p} . R_l for every (p, q, l)
    phase = np.exp(1j * np.einsum("pqc,lc->pql", -k_pq, R))
    num = phase @ zeta
    u1[off] = -(4.0 * np.pi / cell.omega) * num[off] / k2[off]
    return u1


def _embed_one_body(basis: FirstQuantizedBasis, u1: np.ndarray) -> OperatorMatrix:
    n = basis.n_orbitals
    rows, cols, vals = [], [], []
    cols_all = np.arange(basis.dim)
    for j in range(basis.eta):
        q = basis.orbitals[:, j]
        stride = basis.strides[j]
        for p in range(n):
            v = u1[p, q]
            nz = v != 0
            rows.append(cols_all[nz] + (p - q[nz]) * stride)
            cols.append(cols_all[nz])
            vals.append(v[nz])
    if not rows:
        return _finalize(basis.dim, [], [], [])
    return _finalize(basis.dim, np.concatenate(rows), np.concatenate(cols), np.concatenate(vals))


def build_U(basis: FirstQuantizedBasis) -> OperatorMatrix:
    return _embed_one_body(basis, one_body_nuclear(basis.cell))


def build_V(basis: FirstQuantizedBasis) -> OperatorMatrix:
    cell = basis.cell
    nu = grid_G0(cell)
    k = wavenumber(nu, cell.omega)
    w = (2.0 * np.pi / cell.omega) / np.sum(k * k, axis=1)
    cols_all = np.arange(basis.dim)
    mom = basis.momenta
    rows, cols, vals = [], [], []
    for i, j in itertools.permutations(range(basis.eta), 2):
        pi_, pj = mom[:, i], mom[:, j]
        for a in range(len(nu)):
            new_i = pi_ + nu[a]
            new_j = pj - nu[a]
            ok = in_G(new_i, cell) & in_G(new_j, cell)
            if not ok.any():
                continue
            c = cols_all[ok]
            r = (
                c
                + (orbital_index(new_i[ok], cell) - basis.orbitals[ok, i]) * basis.strides[i]
                + (orbital_index(new_j[ok], cell) - basis.orbitals[ok, j]) * basis.strides[j]
            )
            rows.append(r)
            cols.append(c)
            vals.append(np.full(len(c), w[a]))
    if not rows:
        return _finalize(basis.dim, [], [], [])
    return _finalize(basis.dim, np.concatenate(rows), np.concatenate(cols), np.concatenate(vals))


def build_H(basis: FirstQuantizedBasis) -> OperatorMatrix:
    return build_T(basis) + build_U(basis) + build_V(basis)


def permutation_matrix(basis: FirstQuantizedBasis, perm) -> OperatorMatrix:
    """Operator sending register ``perm[r]``'s content into register ``r``."""
    orb = basis.orbitals[:, list(perm)]
    rows = orb @ basis.strides
    cols = np.arange(basis.dim)
    return _finalize(basis.dim, rows, cols, np.ones(basis.dim))


def _parity(perm) -> int:
    perm = list(perm)
    sign = 1
    for a in range(len(perm)):
        for b in range(a + 1, len(perm)):
            if perm[a] > perm[b]:
                sign = -sign
    return sign


def antisymmetric_projector(basis: FirstQuantizedBasis) -> OperatorMatrix:
    total = None
    for perm in itertools.permutations(range(basis.eta)):
        term = _parity(perm) * permutation_matrix(basis, perm)
        total = term if total is None else total + term
    return total / math.factorial(basis.eta)


def quantize_nuclei(cell: SimulationCell, b_R: int) -> SimulationCell:
    """Round every fractional nuclear coordinate to the nearest multiple of ``2**-b_R``."""
    if b_R < 1:
        raise ValueError("b_R must be >= 1")
    scale = 2.0 ** b_R
    nuclei = tuple(
        Nucleus(zeta=n.zeta, r=tuple(math.floor(c * scale + 0.5) / scale for c in n.r))
        for n in cell.nuclei
    )
    return replace(cell, nuclei=nuclei)


def write_triplets(m: OperatorMatrix, fh: IO[str], tol: float = 0.0) -> None:
    """Write nonzero entries as ``row,col,re,im`` CSV in row-major order."""
    coo = sp.coo_matrix(m)
    order = np.lexsort((coo.col, coo.row))
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(["row", "col", "re", "im"])
    for idx in order:
        v = complex(coo.data[idx])
        if abs(v) > tol:
            writer.writerow([int(coo.row[idx]), int(coo.col[idx]), repr(v.real), repr(v.imag)])
