import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from specmi.errors import InvalidInputError
from specmi.grid import Field, Grid, UnitCell, fluctuation, matrix_to_sym, mean, sym_to_matrix


def test_unit_cell_validation():
    assert UnitCell((1.0,)).dim == 1
    assert UnitCell((1.0, 2.0, 3.0)).dim == 3
    with pytest.raises(InvalidInputError):
        UnitCell((1.0, 2.0))
    with pytest.raises(InvalidInputError):
        UnitCell((0.0,))


def test_grid_coordinates_and_half_counts():
    g = Grid.regular(1.0, 8)
    assert g.spacings == (0.125,)
    assert g.half_counts == (4,)
    np.testing.assert_allclose(g.nodes(), np.arange(8) / 8)
    np.testing.assert_allclose(g.centers(), (np.arange(8) + 0.5) / 8)
    assert Grid.regular(1.0, 9).half_counts == (4,)
    with pytest.raises(InvalidInputError):
        Grid.regular(1.0, 1)
    with pytest.raises(InvalidInputError):
        Grid.regular([1.0, 1.0, 1.0], [4, 4])


def test_mean_examples():
    g = Grid.regular(1.0, 8)
    assert mean(Field(g, np.full(8, 3.5))) == pytest.approx(3.5)
    assert abs(mean(Field(g, np.sin(2 * np.pi * g.nodes())))) < 1e-14
    assert mean(Field(Grid.regular(1.0, 2), [1.0, 3.0])) == 2.0


def test_fluctuation_examples():
    g = Grid.regular(1.0, 2)
    np.testing.assert_array_equal(fluctuation(Field(g, [1.0, 3.0])).data, [-1.0, 1.0])
    np.testing.assert_array_equal(fluctuation(Field(g, [2.0, 2.0])).data, [0.0, 0.0])


def test_mean_rejects_mode_fields():
    g = Grid.regular(1.0, 4)
    with pytest.raises(InvalidInputError):
        mean(Field(g, np.zeros(4), sampling="mode"))


def test_field_is_immutable_and_shape_checked():
    g = Grid.regular([1, 1, 1], [2, 3, 4])
    f = Field(g, np.zeros((6, 2, 3, 4)), "sym2")
    with pytest.raises(ValueError):
        f.data[0, 0, 0, 0] = 1.0
    with pytest.raises(InvalidInputError):
        Field(g, np.zeros((3, 2, 3, 4)), "sym2")


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 16), st.integers(2, 16), st.integers(2, 16), st.integers(0, 2**31 - 1))
def test_fluctuation_has_zero_mean(n1, n2, n3, seed):
    rng = np.random.default_rng(seed)
    g = Grid.regular([1, 1, 1], [n1, n2, n3])
    data = rng.normal(size=(6, n1, n2, n3)) * 10
    fl = fluctuation(Field(g, data, "sym2"))
    assert np.max(np.abs(mean(fl))) <= 1e-13 * np.max(np.abs(data))


def test_fluctuation_zero_mean_large_grid():
    rng = np.random.default_rng(0)
    g = Grid.regular([1, 1, 1], [64, 64, 64])
    data = rng.normal(size=(64, 64, 64))
    assert abs(mean(fluctuation(Field(g, data)))) <= 1e-13 * np.max(np.abs(data))


@settings(max_examples=30, deadline=None)
@given(st.lists(st.integers(2, 9), min_size=3, max_size=3))
def test_linear_index_round_trip(counts):
    g = Grid.regular([1, 1, 1], counts)
    lin = np.arange(g.size)
    back = g.linear_index(g.multi_index(lin))
    np.testing.assert_array_equal(back, lin)


def test_sym_storage_round_trip():
    rng = np.random.default_rng(1)
    A = rng.normal(size=(3, 3))
    S = 0.5 * (A + A.T)
    np.testing.assert_allclose(sym_to_matrix(matrix_to_sym(S)), S)
    assert matrix_to_sym(S)[3] == S[1, 2]
