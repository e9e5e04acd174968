import itertools
import json

import numpy as np
import pytest
from hypothesis import given, strategies as st

from subqchem.lattice import (
    CellError,
    SimulationCell,
    cell_from_dict,
    cell_to_dict,
    grid_G,
    grid_G0,
    in_G,
    inverse_square_sum,
    load_cell,
    make_cell,
    orbital_index,
    wavenumber,
    wrap,
)

triples = st.tuples(*[st.integers(-50, 50)] * 3)


def test_wavenumber_examples():
    assert np.allclose(wavenumber((0, 0, 0), 1.0), 0)
    assert np.allclose(wavenumber((1, 0, 0), (2 * np.pi) ** 3), (1, 0, 0))
    assert np.allclose(wavenumber((1, 2, 3), 8.0), (np.pi, 2 * np.pi, 3 * np.pi))


def test_wavenumber_rejects_bad_volume():
    with pytest.raises(ValueError):
        wavenumber((1, 0, 0), 0.0)


@given(triples, triples, st.floats(0.1, 1e4))
def test_wavenumber_is_linear(p, q, omega):
    lhs = wavenumber(np.add(p, q), omega)
    assert np.allclose(lhs, wavenumber(p, omega) + wavenumber(q, omega), rtol=1e-12, atol=1e-12)


def test_grid_sizes_np2():
    cell = make_cell(1, 2, 1.0)
    G, G0 = grid_G(cell), grid_G0(cell)
    assert len(G) == 27 and cell.n_orbitals == 27
    assert len(G0) == 7**3 - 1 == 342
    assert (0, 0, 0) in set(map(tuple, G.tolist()))
    assert (0, 0, 0) not in set(map(tuple, G0.tolist()))


@pytest.mark.parametrize("n_p", [2, 3, 4, 5])
def test_grid_G_count_and_order(n_p):
    cell = make_cell(1, n_p, 1.0)
    G = grid_G(cell)
    assert len(G) == (2**n_p - 1) ** 3
    assert np.array_equal(orbital_index(G, cell), np.arange(len(G)))
    assert sorted(map(tuple, G.tolist())) == list(map(tuple, G.tolist()))


@pytest.mark.parametrize("n_p", [2, 3])
def test_G0_covers_all_differences(n_p):
    cell = make_cell(1, n_p, 1.0)
    G = grid_G(cell)
    diffs = {tuple(d) for d in (G[:, None] - G[None, :]).reshape(-1, 3).tolist()} - {(0, 0, 0)}
    assert diffs <= set(map(tuple, grid_G0(cell).tolist()))


@given(triples, st.integers(2, 5))
def test_wrap_lands_in_G_and_is_congruent(p, n_p):
    cell = make_cell(1, n_p, 1.0)
    w = wrap(np.array(p), cell)
    assert in_G(w, cell)
    assert np.all((w - np.array(p)) % cell.side == 0)


def test_cell_validation():
    with pytest.raises(CellError):
        make_cell(0, 2, 1.0)
    with pytest.raises(CellError):
        make_cell(1, 1, 1.0)
    with pytest.raises(CellError):
        make_cell(1, 2, -1.0)
    with pytest.raises(CellError):
        make_cell(1, 2, 1.0, [(0, (0, 0, 0))])


def test_neutrality_flag():
    assert make_cell(2, 2, 1.0, [(2, (0, 0, 0))]).is_neutral
    assert not make_cell(1, 2, 1.0).is_neutral


def test_json_round_trip(tmp_path):
    doc = {"eta": 2, "n_p": 3, "omega": 12.5, "nuclei": [{"zeta": 1, "r": [0.5, 0.25, 0.0]}, {"zeta": 1, "r": [0, 0, 0.5]}]}
    path = tmp_path / "cell.json"
    path.write_text(json.dumps(doc))
    cell = load_cell(path)
    assert cell_to_dict(cell) == {**doc, "nuclei": [{"zeta": 1, "r": [0.5, 0.25, 0.0]}, {"zeta": 1, "r": [0.0, 0.0, 0.5]}]}
    assert np.allclose(cell.positions()[0], np.array([0.5, 0.25, 0.0]) * 12.5 ** (1 / 3))


def test_json_missing_key():
    with pytest.raises(CellError):
        cell_from_dict({"eta": 1, "omega": 1.0})


def _brute_inverse_square(h):
    return sum(
        1.0 / (x * x + y * y + z * z)
        for x, y, z in itertools.product(range(-h, h + 1), repeat=3)
        if (x, y, z) != (0, 0, 0)
    )


@pytest.mark.parametrize("h", [1, 2, 3, 7])
def test_inverse_square_sum_matches_brute_force(h):
    expected = _brute_inverse_square(h)
    assert inverse_square_sum(h, "direct") == pytest.approx(expected, rel=1e-13)
    assert inverse_square_sum(h, "theta") == pytest.approx(expected, rel=1e-12)


def test_inverse_square_sum_h1_exact():
    # 6 axis neighbours at 1, 12 edge at 1/2, 8 corners at 1/3
    assert inverse_square_sum(1) == pytest.approx(6 + 6 + 8 / 3, rel=1e-15)


@pytest.mark.parametrize("h", [31, 63, 127, 255])
def test_inverse_square_methods_agree(h):
    assert inverse_square_sum(h, "theta") == pytest.approx(inverse_square_sum(h, "direct"), rel=1e-12)
