"""Simulation cell, plane-wave grids and wavenumbers.

Momenta are integer triples. The orbital grid ``G`` uses ``n_p`` sign-magnitude
bits per component, so each component lies in ``[-g, g]`` with
``g = 2**(n_p - 1) - 1``. The momentum-transfer grid ``G0`` uses one more bit,
half-width ``2g + 1``, which covers every difference ``p - q`` of two orbital
momenta. Nuclear positions are fractional coordinates of the cubic cell.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np


class CellError(ValueError):
    """Raised for an invalid cell description."""


@dataclass(frozen=True)
class Nucleus:
    zeta: int
    r: tuple[float, float, float]  # fractional coordinates, multiply by omega**(1/3)


@dataclass(frozen=True)
class SimulationCell:
    eta: int
    omega: float
    n_p: int
    nuclei: tuple[Nucleus, ...] = field(default_factory=tuple)

    def __post_init__(self):
        if not isinstance(self.eta, (int, np.integer)) or self.eta < 1:
            raise CellError(f"eta must be a positive integer, got {self.eta!r}")
        if not self.omega > 0:
            raise CellError(f"omega must be positive, got {self.omega!r}")
        if not isinstance(self.n_p, (int, np.integer)) or self.n_p < 2:
            raise CellError(f"n_p must be an integer >= 2, got {self.n_p!r}")
        object.__setattr__(self, "nuclei", tuple(self.nuclei))
        for nuc in self.nuclei:
            if not isinstance(nuc.zeta, (int, np.integer)) or nuc.zeta < 1:
                raise CellError(f"nuclear charge must be a positive integer, got {nuc.zeta!r}")
            if len(nuc.r) != 3:
                raise CellError("nuclear position must be a triple")

    @property
    def g(self) -> int:
        """Half-width of the orbital grid."""
        return 2 ** (self.n_p - 1) - 1

    @property
    def g0(self) -> int:
        """Half-width of the momentum-transfer grid (``n_p + 1`` bits)."""
        return 2 * self.g + 1

    @property
    def side(self) -> int:
        return 2 * self.g + 1

    @property
    def n_orbitals(self) -> int:
        return self.side ** 3

    @property
    def n_nuclei(self) -> int:
        return len(self.nuclei)

    @property
    def length(self) -> float:
        return self.omega ** (1.0 / 3.0)

    @property
    def total_charge(self) -> int:
        return sum(nuc.zeta for nuc in self.nuclei)

    @property
    def is_neutral(self) -> bool:
        return self.total_charge == self.eta

    def charges(self) -> np.ndarray:
        return np.array([nuc.zeta for nuc in self.nuclei], dtype=float)

    def positions(self) -> np.ndarray:
        """Cartesian nuclear positions, shape ``(L, 3)``."""
        if not self.nuclei:
            return np.zeros((0, 3))
        return np.array([nuc.r for nuc in self.nuclei], dtype=float) * self.length


def wavenumber(p, omega: float) -> np.ndarray:
    """``k_p = 2 pi p / omega**(1/3)``; ``p`` may be a triple or an ``(..., 3)`` array."""
    if not omega > 0:
        raise ValueError("omega must be positive")
    return 2.0 * np.pi * np.asarray(p, dtype=float) / omega ** (1.0 / 3.0)


def _cube(h: int) -> np.ndarray:
    r = np.arange(-h, h + 1)
    return np.stack(np.meshgrid(r, r, r, indexing="ij"), axis=-1).reshape(-1, 3)


def grid_G(cell: SimulationCell) -> np.ndarray:
    """Orbital momenta in lexicographic order, shape ``(N, 3)``."""
    return _cube(cell.g)


def grid_G0(cell: SimulationCell) -> np.ndarray:
    """Momentum transfers excluding the origin, lexicographic order."""
    pts = _cube(cell.g0)
    return pts[np.any(pts != 0, axis=1)]


def in_G(p: np.ndarray, cell: SimulationCell) -> np.ndarray:
    return np.all(np.abs(p) <= cell.g, axis=-1)


def orbital_index(p: np.ndarray, cell: SimulationCell) -> np.ndarray:
    """Position of momentum ``p`` (assumed in G) within :func:`grid_G`."""
    s, g = cell.side, cell.g
    p = np.asarray(p) + g
    return (p[..., 0] * s + p[..., 1]) * s + p[..., 2]


def wrap(p: np.ndarray, cell: SimulationCell) -> np.ndarray:
    """Reduce momenta modulo the G box into ``[-g, g]``."""
    return (np.asarray(p) + cell.g) % cell.side - cell.g


def cell_from_dict(doc: dict) -> SimulationCell:
    try:
        nuclei = tuple(
            Nucleus(zeta=n["zeta"], r=tuple(float(c) for c in n["r"]))
            for n in doc.get("nuclei", [])
        )
        return SimulationCell(
            eta=doc["eta"], omega=float(doc["omega"]), n_p=doc["n_p"], nuclei=nuclei
        )
    except (KeyError, TypeError) as exc:
        raise CellError(f"malformed cell document: {exc!r}") from exc


def cell_to_dict(cell: SimulationCell) -> dict:
    return {
        "eta": int(cell.eta),
        "n_p": int(cell.n_p),
        "omega": float(cell.omega),
        "nuclei": [{"zeta": int(n.zeta), "r": [float(c) for c in n.r]} for n in cell.nuclei],
    }


def load_cell(path: str | Path) -> SimulationCell:
    """Read a cell JSON document; ``json.JSONDecodeError`` propagates with line/column."""
    with open(path) as fh:
        return cell_from_dict(json.load(fh))


def make_cell(
    eta: int,
    n_p: int,
    omega: float,
    nuclei: Sequence[tuple[int, Sequence[float]]] = (),
) -> SimulationCell:
    """Shorthand used by tests and scripts: ``nuclei`` as ``(zeta, r_fractional)`` pairs."""
    return SimulationCell(
        eta=eta,
        omega=omega,
        n_p=n_p,
        nuclei=tuple(Nucleus(zeta=z, r=tuple(float(c) for c in r)) for z, r in nuclei),
    )


def _inverse_square_direct(h: int) -> float:
    sq = np.arange(-h, h + 1) ** 2
    yz = (sq[:, None] + sq[None, :]).astype(float)
    parts = []
    for x2 in sq:
        d = yz + x2
        if x2 == 0:
            d = d.copy()
            d[h, h] = np.inf
        parts.append(float(np.sum(1.0 / d)))
    return float(np.sum(parts))


def _inverse_square_theta(h: int, step: float = 0.05) -> float:
    # 1/s = int_0^inf exp(-t s) dt, and the cube sum of exp(-t s) factorizes
    # into theta_h(t)**3; integrate in u = log t with the trapezoid rule.
    u = -90.0 + step * np.arange(int(96.0 / step) + 1)
    t = np.exp(u)
    x2 = (np.arange(1, h + 1) ** 2).astype(float)
    tail = np.empty_like(t)
    for a in range(0, len(t), 256):
        tail[a : a + 256] = 2.0 * np.exp(-np.outer(t[a : a + 256], x2)).sum(axis=1)
    theta = 1.0 + tail
    integrand = t * tail * (theta * theta + theta + 1.0)  # t * (theta**3 - 1)
    return step * math.fsum(integrand.tolist())


def inverse_square_sum(h: int, method: str = "auto") -> float:
    """``sum 1/|v|^2`` over nonzero integer triples with every ``|v_c| <= h``.

    ``"direct"`` enumerates the cube; ``"theta"`` evaluates a one-dimensional
    integral in ``O(h)`` work per node. ``"auto"`` enumerates up to ``h = 127``.
    """
    if h < 1:
        return 0.0
    if method == "auto":
        method = "direct" if h <= 127 else "theta"
    if method == "direct":
        return _inverse_square_direct(h)
    if method == "theta":
        return _inverse_square_theta(h)
    raise ValueError(f"unknown method {method!r}")
