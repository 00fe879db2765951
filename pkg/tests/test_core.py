import io

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from adaptest.core import (
    Dataset,
    RngSpec,
    is_standardized,
    load_dataset,
    standardize_columns,
    unstandardize,
)
from adaptest.errors import DegenerateColumnError, InputError, ParseError, TooFewRowsError


def test_three_row_table_passes_through():
    d = load_dataset("x1,y\n1.5,2\n-3,4.25\n0,7\n", response_column="y")
    assert (d.n, d.p) == (3, 1)
    np.testing.assert_array_equal(d.xs[:, 0], [1.5, -3.0, 0.0])
    np.testing.assert_array_equal(d.ys, [2.0, 4.25, 7.0])
    assert d.names == ("x1", "y")
    assert not d.standardized


def test_na_cell_names_location():
    with pytest.raises(ParseError) as err:
        load_dataset("a,b,y\n1,2,3\n4,NA,6\n")
    assert err.value.row == 2 and err.value.column == 2
    assert "NA" in str(err.value) and "b" in str(err.value)


def test_non_finite_cell_rejected():
    with pytest.raises(ParseError):
        load_dataset("a,y\n1,inf\n2,3\n")


def test_ragged_row_rejected():
    with pytest.raises(ParseError):
        load_dataset("a,b,y\n1,2,3\n4,5\n")


@pytest.mark.parametrize(
    "text",
    ["a\tb\ty\n1\t2\t3\n4\t5\t6\n", "a,b,y\n1,2,3\n4,5,6\n", "a b y\n1 2 3\n4  5 6\n"],
)
def test_delimiters_detected(text):
    d = load_dataset(io.StringIO(text))
    np.testing.assert_array_equal(d.xs, [[1, 2], [4, 5]])
    np.testing.assert_array_equal(d.ys, [3, 6])


def test_response_by_label_and_index_keeps_file_order():
    text = "y,a,b\n1,2,3\n4,5,6\n"
    by_label = load_dataset(text, response_column="y")
    by_index = load_dataset(text, response_column=0)
    for d in (by_label, by_index):
        assert d.names == ("a", "b", "y")
        np.testing.assert_array_equal(d.xs, [[2, 3], [5, 6]])
        np.testing.assert_array_equal(d.ys, [1, 4])


def test_unknown_response_column():
    with pytest.raises(InputError):
        load_dataset("a,y\n1,2\n", response_column="z")


def test_headerless_table_gets_default_names():
    d = load_dataset("1\t2\t3\n4\t5\t6\n", header=False)
    assert d.names == ("x1", "x2", "y")


def test_load_is_deterministic():
    text = "a,b,y\n" + "".join(f"{i},{i * i % 7},{i % 3}\n" for i in range(30))
    d1, d2 = load_dataset(text, standardize=True), load_dataset(text, standardize=True)
    np.testing.assert_array_equal(d1.xs, d2.xs)
    np.testing.assert_array_equal(d1.ys, d2.ys)


def test_standardize_simple_column():
    d = standardize_columns(Dataset(xs=[[0.0], [2.0], [4.0]], ys=[1.0, 2.0, 4.0]))
    np.testing.assert_allclose(d.xs[:, 0], [-1.0, 0.0, 1.0], atol=1e-15)
    assert abs(d.ys.mean()) < 1e-12 and abs(d.ys.std(ddof=1) - 1) < 1e-12
    assert d.standardized and is_standardized(d)


def test_constant_column_rejected():
    with pytest.raises(DegenerateColumnError):
        standardize_columns(Dataset(xs=[[5.0], [5.0], [5.0]], ys=[1.0, 2.0, 3.0]))


def test_standardized_load_enforces_row_count():
    text = "a,b,y\n1,2,3\n4,5,7\n2,9,1\n"
    with pytest.raises(TooFewRowsError):
        load_dataset(text, standardize=True)
    load_dataset(text)  # raw loads keep the 3-row pass-through


def test_standardize_is_idempotent():
    rng = np.random.default_rng(0)
    d = standardize_columns(Dataset(rng.normal(size=(40, 3)), rng.normal(size=40)))
    again = standardize_columns(d)
    np.testing.assert_allclose(again.xs, d.xs, atol=1e-12)
    np.testing.assert_allclose(again.ys, d.ys, atol=1e-12)
    back = unstandardize(again)
    np.testing.assert_allclose(back.xs, unstandardize(d).xs, atol=1e-12)


@settings(max_examples=60, deadline=None)
@given(
    arrays(np.float64, st.tuples(st.integers(8, 30), st.integers(2, 4)),
           elements=st.floats(-1e3, 1e3, allow_nan=False, width=64))
)
def test_round_trip(table):
    col_sd = table.std(axis=0, ddof=1)
    if np.any(col_sd < 1e-3 * (1 + np.abs(table).max())):
        return
    d = Dataset(xs=table[:, :-1], ys=table[:, -1])
    back = unstandardize(standardize_columns(d))
    scale = 1 + np.abs(table).max()
    np.testing.assert_allclose(back.xs, d.xs, atol=1e-12 * scale)
    np.testing.assert_allclose(back.ys, d.ys, atol=1e-12 * scale)


def test_dataset_is_immutable_and_validated():
    d = Dataset(xs=np.zeros((6, 1)), ys=np.arange(6.0))
    with pytest.raises(ValueError):
        d.xs[0, 0] = 1.0
    with pytest.raises(InputError):
        Dataset(xs=np.zeros((3, 1)), ys=np.zeros(4))
    with pytest.raises(InputError):
        Dataset(xs=[[np.nan]], ys=[1.0])
    with pytest.raises(TooFewRowsError):
        Dataset(xs=np.zeros((5, 1)), ys=np.zeros(5)).check_size()


def test_metadata_records_center_and_scale():
    d = standardize_columns(Dataset(xs=[[0.0], [2.0], [4.0]], ys=[1.0, 3.0, 5.0]))
    meta = d.metadata()
    assert meta["center"] == [2.0, 3.0] and meta["scale"] == [2.0, 2.0]


def test_rng_streams_reproducible_and_distinct():
    a = RngSpec(42, 3).generator().standard_normal(5)
    b = RngSpec(42, 3).generator().standard_normal(5)
    c = RngSpec(42, 4).generator().standard_normal(5)
    np.testing.assert_array_equal(a, b)
    assert not np.allclose(a, c)
    # independent streams are uncorrelated
    x = RngSpec(1, 0).generator().standard_normal(20000)
    y = RngSpec(1, 1).generator().standard_normal(20000)
    assert abs(np.corrcoef(x, y)[0, 1]) < 4 / np.sqrt(20000)
    assert RngSpec(1).child(7) == RngSpec(1, 7)
