import os

import numpy as np
import pytest

from fairsparse.dataio import (PreprocessOptions, RawTable, load_csv,
                               preprocess, read_dataset_csv,
                               write_dataset_csv)
from fairsparse.errors import ConfigError, DataError
from fairsparse.synthgen import GenerativeConfig, make_instance

REAL_DATA_DIR = os.environ.get("FAIRSPARSE_DATA_DIR", "data")


def write(tmp_path, name, text):
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return path


class TestLoadCsv:
    def test_two_by_two(self, tmp_path):
        table = load_csv(write(tmp_path, "t.csv", "a,b\n1,2\n3,4\n"))
        assert table.n_rows == 2 and table.n_cols == 2
        assert table.columns == ("a", "b")
        assert table.column("b") == ["2", "4"]

    def test_missing_sentinel_preserved(self, tmp_path):
        table = load_csv(write(tmp_path, "t.csv", "a,b\n?,2\n3,\n"))
        assert table.cells[0][0] == "?"
        assert table.cells[1][1] == ""

    def test_ragged_row_reports_index(self, tmp_path):
        with pytest.raises(DataError, match="row 1"):
            load_csv(write(tmp_path, "t.csv", "a,b\n1,2\n3\n"))

    def test_duplicate_header_rejected(self, tmp_path):
        with pytest.raises(DataError, match="duplicate"):
            load_csv(write(tmp_path, "t.csv", "a,a\n1,2\n"))

    def test_missing_file(self):
        with pytest.raises(DataError):
            load_csv("definitely/not/here.csv")

    def test_quoted_fields(self, tmp_path):
        table = load_csv(write(tmp_path, "t.csv", 'a,b\n"1,5",2\n'))
        assert table.cells[0][0] == "1,5"


def options(**kw):
    base = dict(target_column="y")
    base.update(kw)
    return PreprocessOptions(**base)


class TestPreprocess:
    def test_standardization_moments(self, tmp_path):
        path = write(tmp_path, "t.csv",
                     "y,x1,x2\n" + "\n".join(
                         f"{i},{2 * i + 1},{-i}" for i in range(10)) + "\n")
        ds, colmap = preprocess(load_csv(path), options())
        assert colmap == ["x1", "x2"]
        for col in (ds.y, ds.X[:, 0], ds.X[:, 1]):
            assert abs(col.mean()) <= 1e-10
            assert abs(col.std(ddof=1) - 1.0) <= 1e-10

    def test_already_standardized_unchanged(self, tmp_path):
        rows = np.array([-1.5, -0.5, 0.5, 1.5]) / np.std(
            [-1.5, -0.5, 0.5, 1.5], ddof=1)
        text = "y,x\n" + "\n".join(
            f"{float(v)!r},{float(v)!r}" for v in rows) + "\n"
        ds, _ = preprocess(load_csv(write(tmp_path, "t.csv", text)), options())
        assert np.max(np.abs(ds.X[:, 0] - rows)) <= 1e-12
        assert np.max(np.abs(ds.y - rows)) <= 1e-12

    def test_missing_column_dropped(self, tmp_path):
        path = write(tmp_path, "t.csv", "y,x1,x2\n1,?,5\n2,3,6\n3,4,7\n")
        ds, colmap = preprocess(load_csv(path), options())
        assert colmap == ["x2"]

    def test_dummy_encoding_layout(self, tmp_path):
        path = write(tmp_path, "t.csv",
                     "y,c\n1,red\n2,green\n3,blue\n4,red\n5,green\n")
        ds, colmap = preprocess(load_csv(path),
                                options(standardize=False))
        # categories sorted: blue (reference), green, red -> 2 indicators
        assert colmap == ["c=green", "c=red"]
        assert ds.X.shape == (5, 2)
        assert np.all(ds.X.sum(axis=1) <= 1.0)
        assert ds.X[:, 0].tolist() == [0, 1, 0, 0, 1]
        assert ds.X[:, 1].tolist() == [1, 0, 0, 1, 0]

    def test_categorical_without_dummy_rejected(self, tmp_path):
        path = write(tmp_path, "t.csv", "y,c\n1,a\n2,b\n")
        with pytest.raises(DataError):
            preprocess(load_csv(path), options(dummy_encode=False))

    def test_constant_column_dropped_with_warning(self, tmp_path):
        path = write(tmp_path, "t.csv", "y,x1,x2\n1,7,1\n2,7,2\n3,7,5\n")
        with pytest.warns(UserWarning, match="constant"):
            ds, colmap = preprocess(load_csv(path), options())
        assert colmap == ["x2"]

    def test_drop_columns_respected(self, tmp_path):
        path = write(tmp_path, "t.csv", "y,x1,x2\n1,5,1\n2,6,2\n3,9,5\n")
        ds, colmap = preprocess(load_csv(path),
                                options(drop_columns=("x1",)))
        assert colmap == ["x2"]

    def test_unknown_drop_rejected(self, tmp_path):
        path = write(tmp_path, "t.csv", "y,x\n1,2\n2,3\n")
        with pytest.raises(ConfigError):
            preprocess(load_csv(path), options(drop_columns=("nope",)))

    def test_missing_target_rejected(self, tmp_path):
        path = write(tmp_path, "t.csv", "a,b\n1,2\n")
        with pytest.raises(ConfigError):
            preprocess(load_csv(path), options())

    def test_target_with_missing_values_rejected(self, tmp_path):
        path = write(tmp_path, "t.csv", "y,x\n?,2\n1,3\n")
        with pytest.raises(DataError):
            preprocess(load_csv(path), options())

    def test_deterministic(self, tmp_path):
        path = write(tmp_path, "t.csv",
                     "y,a,c\n1.5,2,u\n2.5,3,v\n0.5,4,u\n3.5,9,w\n")
        t = load_csv(path)
        ds1, map1 = preprocess(t, options())
        ds2, map2 = preprocess(t, options())
        assert map1 == map2
        assert np.array_equal(ds1.X, ds2.X)
        assert np.array_equal(ds1.y, ds2.y)


class TestDatasetRoundTrip:
    def test_write_read_identity(self, tmp_path):
        cfg = GenerativeConfig(d=4, s=2, n=9, seed=5)
        _, ds = make_instance(cfg)
        path = tmp_path / "ds.csv"
        write_dataset_csv(ds, path)
        back = read_dataset_csv(path)
        assert np.array_equal(back.X, ds.X)
        assert np.array_equal(back.y, ds.y)

    def test_rejects_single_column(self, tmp_path):
        with pytest.raises(DataError):
            read_dataset_csv(write(tmp_path, "t.csv", "y\n1\n2\n"))


needs_communities = pytest.mark.skipif(
    not os.path.exists(os.path.join(REAL_DATA_DIR, "communities.csv")),
    reason="public Communities & Crime CSV not provided",
)


@needs_communities
class TestCommunitiesAndCrime:
    def test_row_count_and_preprocessed_shape(self):
        table = load_csv(os.path.join(REAL_DATA_DIR, "communities.csv"))
        assert table.n_rows == 1994
        opts = PreprocessOptions(
            target_column="ViolentCrimesPerPop",
            drop_columns=("state", "county", "community", "communityname",
                          "fold"),
        )
        ds, colmap = preprocess(table, opts)
        assert ds.n == 1994
        assert ds.d == 100
