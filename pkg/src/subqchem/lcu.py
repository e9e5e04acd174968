"""Weighted-unitary decomposition of the potential ``U + V``.

Every term is a signed, phased permutation of the register basis. Shifts that
leave the G box are wrapped modulo the box so each term stays unitary; the
``x`` bit multiplies those wrapped branches by ``(-1)**x`` and the two ``x``
values cancel them exactly in the weighted sum.

Two conventions are fixed here:

* nuclear terms map ``|p_j> -> -exp(+i k_nu . R_l) |p_j - nu>``, the sign that
  reproduces :func:`subqchem.hamiltonian.build_U` element by element;
* ``i == j`` electron-pair terms act as the identity, so they add the constant
  shift ``c`` reported by :func:`lambda_parts`.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .hamiltonian import FirstQuantizedBasis, OperatorMatrix, _finalize, kinetic_diagonal
from .lattice import SimulationCell, grid_G0, in_G, inverse_square_sum, orbital_index, wavenumber, wrap


@dataclass(frozen=True)
class LcuTerm:
    kind: str  # "U" or "V"
    nu: tuple[int, int, int]
    x: int
    j: int
    weight: float
    i: Optional[int] = None  # V-terms only
    ell: Optional[int] = None  # U-terms only


def _inv_k2(cell: SimulationCell) -> np.ndarray:
    k = wavenumber(grid_G0(cell), cell.omega)
    return 1.0 / np.sum(k * k, axis=1)


def enumerate_terms(cell: SimulationCell) -> list[LcuTerm]:
    """All terms, ordered by nu, then V (i, j, x), then U (ell, j, x)."""
    nus = grid_G0(cell)
    inv = _inv_k2(cell)
    zeta = cell.charges()
    eta = cell.eta
    terms = []
    for a, nu in enumerate(map(tuple, nus.tolist())):
        wv = np.pi / cell.omega * inv[a]
        for i, j in itertools.product(range(eta), repeat=2):
            for x in (0, 1):
                terms.append(LcuTerm("V", nu, x, j, wv, i=i))
        for ell in range(cell.n_nuclei):
            wu = 2.0 * np.pi * zeta[ell] / cell.omega * inv[a]
            for j in range(eta):
                for x in (0, 1):
                    terms.append(LcuTerm("U", nu, x, j, wu, ell=ell))
    return terms


def term_action(term: LcuTerm, basis: FirstQuantizedBasis) -> tuple[np.ndarray, np.ndarray]:
    """``(rows, phases)`` with ``H_s |c> = phases[c] |rows[c]>`` for every basis column ``c``."""
    cell = basis.cell
    cols = np.arange(basis.dim)
    nu = np.asarray(term.nu)
    mom = basis.momenta
    if term.kind == "V":
        if term.i == term.j:
            return cols, np.ones(basis.dim, dtype=complex)
        i, j = term.i, term.j
        raw_i = mom[:, i] + nu
        raw_j = mom[:, j] - nu
        out = ~in_G(raw_i, cell) | ~in_G(raw_j, cell)
        rows = (
            cols
            + (orbital_index(wrap(raw_i, cell), cell) - basis.orbitals[:, i]) * basis.strides[i]
            + (orbital_index(wrap(raw_j, cell), cell) - basis.orbitals[:, j]) * basis.strides[j]
        )
        phases = np.where(out & (term.x == 1), -1.0, 1.0).astype(complex)
        return rows, phases
    if term.kind == "U":
        j = term.j
        raw = mom[:, j] - nu
        out = ~in_G(raw, cell)
        rows = cols + (orbital_index(wrap(raw, cell), cell) - basis.orbitals[:, j]) * basis.strides[j]
        R = cell.positions()[term.ell]
        phase = -np.exp(1j * wavenumber(nu, cell.omega) @ R)
        phases = phase * np.where(out & (term.x == 1), -1.0, 1.0)
        return rows, phases
    raise ValueError(f"unknown term kind {term.kind!r}")


def apply_term(term: LcuTerm, state: np.ndarray, basis: FirstQuantizedBasis) -> np.ndarray:
    state = np.asarray(state)
    if state.shape[0] != basis.dim:
        raise ValueError(f"state has dimension {state.shape[0]}, basis has {basis.dim}")
    rows, phases = term_action(term, basis)
    out = np.zeros_like(state, dtype=complex)
    out[rows] = (phases * state.T).T
    return out


def term_matrix(term: LcuTerm, basis: FirstQuantizedBasis) -> OperatorMatrix:
    rows, phases = term_action(term, basis)
    return _finalize(basis.dim, rows, np.arange(basis.dim), phases)


def lambda_parts(cell: SimulationCell) -> dict[str, float]:
    """1-norm pieces of the decomposition.

    ``lambda_V`` counts all ``eta**2`` register pairs, ``shift`` is the identity
    weight contributed by the ``i == j`` pairs, and ``lambda_without`` drops them.
    """
    s = inverse_square_sum(cell.g0)
    sum_inv_k2 = cell.omega ** (2.0 / 3.0) / (4.0 * np.pi**2) * s
    base = np.pi / cell.omega * sum_inv_k2
    eta = cell.eta
    lam_v = 2.0 * eta * eta * base
    lam_u = 2.0 * eta * 2.0 * cell.total_charge * base
    shift = 2.0 * eta * base
    return {
        "lambda": lam_v + lam_u,
        "lambda_U": lam_u,
        "lambda_V": lam_v,
        "shift": shift,
        "lambda_without_self_pairs": lam_v + lam_u - shift,
    }


def lambda_total(cell: SimulationCell, include_self_pairs: bool = True) -> float:
    parts = lambda_parts(cell)
    return parts["lambda"] if include_self_pairs else parts["lambda_without_self_pairs"]


def reconstruct(cell: SimulationCell) -> tuple[np.ndarray, float]:
    """Dense ``sum_s w_s H_s`` together with the identity shift ``c``."""
    basis = FirstQuantizedBasis(cell)
    if basis.dim > 4096:
        raise ValueError("reconstruction is limited to dimension <= 4096")
    out = np.zeros((basis.dim, basis.dim), dtype=complex)
    cols = np.arange(basis.dim)
    for term in enumerate_terms(cell):
        rows, phases = term_action(term, basis)
        out[rows, cols] += term.weight * phases
    return out, lambda_parts(cell)["shift"]


def prepare_weights(cell: SimulationCell) -> dict[tuple, float]:
    """PREPARE amplitudes keyed by ``("V", nu, i, j)`` or ``("U", nu, ell, j)``.

    The ``x`` qubit is prepared separately in uniform superposition, so each
    class carries the weight of both of its ``x`` terms.
    """
    lam = lambda_total(cell)
    nus = grid_G0(cell)
    inv = _inv_k2(cell)
    zeta = cell.charges()
    amps = {}
    for a, nu in enumerate(map(tuple, nus.tolist())):
        av = np.sqrt(2.0 * np.pi / (lam * cell.omega) * inv[a])
        for i, j in itertools.product(range(cell.eta), repeat=2):
            amps[("V", nu, i, j)] = av
        for ell in range(cell.n_nuclei):
            au = np.sqrt(4.0 * np.pi * zeta[ell] / (lam * cell.omega) * inv[a])
            for j in range(cell.eta):
                amps[("U", nu, ell, j)] = au
    return amps


def kinetic_phase(basis: FirstQuantizedBasis, tau: float) -> OperatorMatrix:
    d = np.arange(basis.dim)
    return _finalize(basis.dim, d, d, np.exp(-1j * tau * kinetic_diagonal(basis)))
