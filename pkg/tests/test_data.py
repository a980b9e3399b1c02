"""Dataset ingestion, grouping encoding, and standardization."""

import numpy as np
import pytest

from hetscan.data import (
    BERNOULLI,
    DUMMY,
    GAUSSIAN,
    DataError,
    Dataset,
    destandardize,
    encode_groups,
    load_csv,
    load_csv_text,
    standardize,
    write_csv,
    write_csv_text,
)

CSV_SMALL = """x1,x2,g1,y
0.5,1.0,a,2.0
-0.5,2.0,b,3.0
1.5,3.0,a,4.0
"""


def make_dataset(family=GAUSSIAN, n=8, d=2, k=1, seed=0):
    r = np.random.default_rng(seed)
    x = r.normal(size=(n, d))
    # Cycle starting at code 1 so codes are already in first-appearance order.
    groups = np.column_stack([1 + np.arange(n) % (3 + j) for j in range(k)])
    if family == GAUSSIAN:
        y = r.normal(size=n)
    else:
        y = (r.random(n) < 0.5).astype(float)
    return Dataset(
        x=x,
        groups=groups,
        y=y,
        family=family,
        predictor_names=tuple(f"x{j + 1}" for j in range(d)),
        grouping_names=tuple(f"g{j + 1}" for j in range(k)),
        response_name="y",
    )


class TestEncodeGroups:
    def test_first_appearance_strings(self):
        codes, label_map = encode_groups(["b", "a", "b", "c"])
        assert codes.tolist() == [1, 2, 1, 3]
        assert label_map == {"b": 1, "a": 2, "c": 3}

    def test_first_appearance_integers(self):
        codes, label_map = encode_groups([2, 7, 2])
        assert codes.tolist() == [1, 2, 1]
        assert label_map == {2: 1, 7: 2}

    def test_single_level_rejected(self):
        with pytest.raises(DataError):
            encode_groups(["x", "x"])

    def test_empty_rejected(self):
        with pytest.raises(DataError):
            encode_groups([])


class TestLoadCsv:
    def test_small_example(self):
        ds = load_csv_text(CSV_SMALL, "y", ("g1",), GAUSSIAN)
        assert ds.predictor_names == ("x1", "x2")
        assert ds.grouping_names == ("g1",)
        assert ds.response_name == "y"
        np.testing.assert_allclose(ds.x[:, 0], [0.5, -0.5, 1.5])
        np.testing.assert_allclose(ds.y, [2.0, 3.0, 4.0])
        assert ds.groups[:, 0].tolist() == [1, 2, 1]
        assert ds.level_labels == (("a", "b"),)

    def test_all_leftover_columns_become_predictors(self):
        text = "a,b,c,g,y\n1,2,3,u,0.0\n4,5,6,v,1.0\n"
        ds = load_csv_text(text, "y", ("g",), GAUSSIAN)
        assert ds.predictor_names == ("a", "b", "c")

    def test_missing_response_column(self):
        with pytest.raises(DataError, match="response"):
            load_csv_text(CSV_SMALL, "nope", ("g1",), GAUSSIAN)

    def test_missing_grouping_column(self):
        with pytest.raises(DataError, match="grouping"):
            load_csv_text(CSV_SMALL, "y", ("nope",), GAUSSIAN)

    def test_duplicate_header(self):
        text = "x1,x1,g,y\n1,2,a,0\n3,4,b,1\n"
        with pytest.raises(DataError, match="duplicate"):
            load_csv_text(text, "y", ("g",), GAUSSIAN)

    def test_missing_cell(self):
        text = "x1,g,y\n1,a,0\n,b,1\n"
        with pytest.raises(DataError, match="missing value"):
            load_csv_text(text, "y", ("g",), GAUSSIAN)

    def test_ragged_row(self):
        text = "x1,g,y\n1,a,0\n2,b\n"
        with pytest.raises(DataError, match="cells"):
            load_csv_text(text, "y", ("g",), GAUSSIAN)

    def test_unparseable_numeric_names_column_and_row(self):
        text = "x1,g,y\n1,a,0\nfoo,b,1\n"
        with pytest.raises(DataError, match="x1"):
            load_csv_text(text, "y", ("g",), GAUSSIAN)

    def test_bernoulli_two_distinct_required(self):
        text = "x1,g,y\n1,a,0\n2,b,1\n3,a,2\n"
        with pytest.raises(DataError, match="distinct"):
            load_csv_text(text, "y", ("g",), BERNOULLI)

    def test_bernoulli_literal_01_preserved(self):
        text = "x1,g,y\n1,a,1\n2,b,0\n3,a,1\n"
        ds = load_csv_text(text, "y", ("g",), BERNOULLI)
        np.testing.assert_array_equal(ds.y, [1.0, 0.0, 1.0])

    def test_bernoulli_labels_coded_first_seen_zero(self):
        text = "x1,g,y\n1,a,yes\n2,b,no\n3,a,yes\n"
        ds = load_csv_text(text, "y", ("g",), BERNOULLI)
        np.testing.assert_array_equal(ds.y, [0.0, 1.0, 0.0])

    def test_single_level_grouping_named(self):
        text = "x1,g,y\n1,a,0\n2,a,1\n"
        with pytest.raises(DataError, match="'g'"):
            load_csv_text(text, "y", ("g",), GAUSSIAN)

    def test_empty_csv(self):
        with pytest.raises(DataError):
            load_csv_text("", "y", ("g",), GAUSSIAN)

    def test_no_data_rows(self):
        with pytest.raises(DataError, match="no data rows"):
            load_csv_text("x1,g,y\n", "y", ("g",), GAUSSIAN)

    def test_unknown_family(self):
        with pytest.raises(DataError, match="family"):
            load_csv_text(CSV_SMALL, "y", ("g1",), "poisson")

    def test_file_missing(self, tmp_path):
        with pytest.raises(DataError, match="no such file"):
            load_csv(tmp_path / "absent.csv", "y", ("g",), GAUSSIAN)


class TestRoundTrip:
    @pytest.mark.parametrize("family", [GAUSSIAN, BERNOULLI])
    def test_write_then_load_is_identity(self, family):
        ds = make_dataset(family=family, n=12, d=3, k=2, seed=3)
        text = write_csv_text(ds)
        back = load_csv_text(text, ds.response_name, ds.grouping_names, family)
        assert back == ds

    def test_write_read_file(self, tmp_path):
        ds = make_dataset(seed=5)
        path = tmp_path / "data.csv"
        write_csv(ds, path)
        assert load_csv(path, "y", ("g1",), GAUSSIAN) == ds

    def test_deterministic_serialization(self):
        ds = make_dataset(seed=9)
        assert write_csv_text(ds) == write_csv_text(ds)

    def test_bernoulli_written_as_int(self):
        ds = make_dataset(family=BERNOULLI, seed=2)
        lines = write_csv_text(ds).splitlines()
        assert all(line.rsplit(",", 1)[1] in {"0", "1"} for line in lines[1:])


class TestDatasetValidation:
    def test_noncontiguous_codes_rejected(self):
        with pytest.raises(DataError, match="contiguous"):
            Dataset(
                x=np.zeros((3, 1)) + [[1.0], [2.0], [3.0]],
                groups=np.array([[1], [3], [1]]),
                y=np.zeros(3),
                family=GAUSSIAN,
                predictor_names=("x1",),
                grouping_names=("g",),
                response_name="y",
            )

    def test_nonfinite_rejected(self):
        with pytest.raises(DataError, match="finite"):
            Dataset(
                x=np.array([[1.0], [np.nan]]),
                groups=np.array([[1], [2]]),
                y=np.zeros(2),
                family=GAUSSIAN,
                predictor_names=("x1",),
                grouping_names=("g",),
                response_name="y",
            )

    def test_bernoulli_response_must_be_01(self):
        with pytest.raises(DataError, match="0/1"):
            Dataset(
                x=np.array([[1.0], [2.0]]),
                groups=np.array([[1], [2]]),
                y=np.array([0.0, 0.5]),
                family=BERNOULLI,
                predictor_names=("x1",),
                grouping_names=("g",),
                response_name="y",
            )

    def test_default_level_labels(self):
        ds = make_dataset(n=6, k=1)
        assert ds.level_labels == (("1", "2", "3"),)

    def test_shape_accessors(self):
        ds = make_dataset(n=8, d=2, k=1)
        assert (ds.n_obs, ds.n_predictors, ds.n_groupings) == (8, 2, 1)
        assert ds.n_levels(0) == 3


class TestStandardize:
    def test_unit_scale_example(self):
        ds = Dataset(
            x=np.array([[1.0], [2.0], [3.0]]),
            groups=np.array([[1], [2], [1]]),
            y=np.zeros(3),
            family=GAUSSIAN,
            predictor_names=("x1",),
            grouping_names=("g",),
            response_name="y",
        )
        design, params = standardize(ds)
        np.testing.assert_allclose(design.z[:, 0], [-1.0, 0.0, 1.0])
        np.testing.assert_allclose(params.means, [2.0])
        np.testing.assert_allclose(params.stds, [1.0])

    def test_sample_sd_uses_ddof_1(self):
        ds = make_dataset(n=10, d=2, seed=1)
        _, params = standardize(ds)
        np.testing.assert_allclose(params.stds, ds.x.std(axis=0, ddof=1))

    def test_group_codes_pass_through_unscaled(self):
        ds = make_dataset(n=9, d=2, k=2, seed=4)
        design, _ = standardize(ds)
        np.testing.assert_array_equal(design.z[:, 2:], ds.groups.astype(float))
        assert design.column_kinds == ("numerical", "numerical", DUMMY, DUMMY)
        assert design.n_numerical == 2
        assert design.n_dummy == 2

    def test_standardized_block_has_unit_sample_sd(self):
        ds = make_dataset(n=30, d=3, seed=7)
        design, _ = standardize(ds)
        np.testing.assert_allclose(design.z[:, :3].mean(axis=0), 0.0, atol=1e-12)
        np.testing.assert_allclose(design.z[:, :3].std(axis=0, ddof=1), 1.0, rtol=1e-12)

    def test_constant_column_rejected_by_name(self):
        ds = make_dataset(n=6, d=2, seed=2)
        bad = Dataset(
            x=np.column_stack([ds.x[:, 0], np.full(6, 3.25)]),
            groups=ds.groups,
            y=ds.y,
            family=ds.family,
            predictor_names=("x1", "flat"),
            grouping_names=ds.grouping_names,
            response_name="y",
        )
        with pytest.raises(DataError, match="'flat'"):
            standardize(bad)

    def test_destandardize_inverts(self):
        ds = make_dataset(n=15, d=4, seed=8)
        design, params = standardize(ds)
        back = destandardize(design.z[:, :4], params)
        np.testing.assert_allclose(back, ds.x, atol=1e-12)
