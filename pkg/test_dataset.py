import numpy as np
import pytest
from numpy.testing import assert_array_equal

from mrsqm.core.errors import DatasetFormatError, DatasetParseError
from mrsqm.models.enums import LabelColumn
from mrsqm.services.dataset_loader import load_csv, load_dataset, load_ts, save_ts

TS_HEADER = "@problemName toy\n@univariate true\n@classLabel true a b\n@data\n"


def test_load_ts_two_lines(write_file):
    path = write_file("two.ts", TS_HEADER + "1,2,3:a\n4,5,6:b\n")
    dataset = load_ts(path)

    assert (dataset.N, dataset.L, dataset.C) == (2, 3, 2)
    assert dataset.labels == ["a", "b"]
    assert dataset.name == "toy"
    assert_array_equal(dataset.X, [[1, 2, 3], [4, 5, 6]])
    assert_array_equal(dataset.y, [0, 1])


def test_load_ts_uses_declared_label_order(write_file):
    path = write_file("order.ts", "@classLabel true z y\n@data\n1,2:y\n3,4:z\n5,6:y\n")
    dataset = load_ts(path)

    assert dataset.class_index == {"z": 0, "y": 1}
    assert dataset.class_names == ["z", "y"]
    assert_array_equal(dataset.y, [1, 0, 1])


def test_load_ts_first_appearance_without_declaration(write_file):
    path = write_file("appear.ts", "@data\n1,2:dog\n3,4:cat\n5,6:dog\n")
    assert load_ts(path).class_index == {"dog": 0, "cat": 1}


def test_load_ts_rejects_undeclared_label(write_file):
    path = write_file("undeclared.ts", "@classLabel true a b\n@data\n1,2:a\n3,4:c\n")
    with pytest.raises(DatasetFormatError, match="'c'"):
        load_ts(path)


def test_load_ts_rejects_duplicate_declared_label(write_file):
    path = write_file("duplicate.ts", "@classLabel true a a b\n@data\n1,2:a\n3,4:b\n")
    with pytest.raises(DatasetFormatError, match="'a' is declared twice"):
        load_ts(path)


@pytest.mark.parametrize("name", ["broken.ts", "broken.csv"])
def test_load_rejects_invalid_utf8(tmp_path, name):
    path = tmp_path / name
    path.write_bytes(b"@data\n1,2,3:\xff\n" if name.endswith(".ts") else b"a,1,2\n\xff,3,4\n")
    with pytest.raises(DatasetParseError, match=name):
        load_dataset(path)


def test_load_ts_ragged_names_line(write_file):
    path = write_file("ragged.ts", TS_HEADER + "1,2,3:a\n4,5,6,7:b\n")
    with pytest.raises(DatasetFormatError, match="Line 6"):
        load_ts(path)


def test_load_ts_non_numeric_value(write_file):
    path = write_file("bad.ts", TS_HEADER + "1,2,3:a\n4,x,6:b\n")
    with pytest.raises(DatasetParseError, match="'x'"):
        load_ts(path)


@pytest.mark.parametrize("value", ["nan", "inf", "-Infinity"])
def test_load_ts_rejects_non_finite(write_file, value):
    path = write_file("nan.ts", TS_HEADER + f"1,{value},3:a\n")
    with pytest.raises(DatasetParseError):
        load_ts(path)


def test_load_ts_missing_data_directive(write_file):
    path = write_file("nodata.ts", "@problemName toy\n@classLabel true a b\n")
    with pytest.raises(DatasetFormatError, match="@data"):
        load_ts(path)


def test_load_ts_empty_data_section(write_file):
    path = write_file("empty.ts", TS_HEADER)
    with pytest.raises(DatasetFormatError, match="no data"):
        load_ts(path)


def test_load_ts_missing_label(write_file):
    path = write_file("nolabel.ts", TS_HEADER + "1,2,3\n")
    with pytest.raises(DatasetFormatError, match="label"):
        load_ts(path)


def test_load_ts_rejects_multivariate(write_file):
    path = write_file("multi.ts", "@univariate false\n@data\n1,2:3,4:a\n")
    with pytest.raises(DatasetFormatError):
        load_ts(path)


def test_load_ts_rejects_multiple_dimensions_in_data(write_file):
    path = write_file("dims.ts", "@data\n1,2:3,4:a\n")
    with pytest.raises(DatasetFormatError, match="dimensions"):
        load_ts(path)


def test_load_ts_skips_comments_and_blank_lines(write_file):
    path = write_file("comments.ts", "# made by hand\n\n@data\n\n1,2:a\n# middle\n3,4:b\n")
    assert load_ts(path).N == 2


def test_load_ts_unlabeled(write_file):
    path = write_file("unlabeled.ts", "@classLabel false\n@data\n1,2,3\n4,5,6\n")
    dataset = load_ts(path)

    assert not dataset.is_labeled
    assert dataset.labels is None
    assert dataset.C == 0
    assert dataset.N == 2


def test_save_ts_round_trip(make_dataset, rng, tmp_path):
    dataset = make_dataset(rng, n_per_class=3, L=17)
    path = save_ts(dataset, tmp_path / "round.ts")
    reloaded = load_ts(path)

    # exact float equality: values are written in shortest round-trip form
    assert reloaded == dataset
    assert reloaded.class_names == dataset.class_names


def test_save_ts_round_trip_unlabeled(write_file, tmp_path):
    dataset = load_ts(write_file("unlabeled.ts", "@classLabel false\n@data\n0.1,0.2\n0.3,1e-300\n"))
    assert load_ts(save_ts(dataset, tmp_path / "again.ts")) == dataset


def test_load_csv_label_first(write_file):
    dataset = load_csv(write_file("first.csv", "0,1.0,2.0\n1,3.0,4.0\n"))

    assert (dataset.N, dataset.L) == (2, 2)
    assert set(dataset.labels) == {"0", "1"}
    assert_array_equal(dataset.X, [[1.0, 2.0], [3.0, 4.0]])


def test_load_csv_label_last_with_header(write_file):
    path = write_file("last.csv", "t0,t1,label\n1.0,2.0,up\n3.0,4.0,down\n")
    dataset = load_csv(path, label_column=LabelColumn.LAST, header=True)

    assert dataset.labels == ["up", "down"]
    assert_array_equal(dataset.X, [[1.0, 2.0], [3.0, 4.0]])


def test_load_csv_empty_file(write_file):
    with pytest.raises(DatasetFormatError):
        load_csv(write_file("empty.csv", ""))


def test_load_csv_ragged(write_file):
    with pytest.raises(DatasetFormatError):
        load_csv(write_file("ragged.csv", "0,1.0,2.0\n1,3.0\n"))


def test_load_csv_non_numeric_names_line(write_file):
    with pytest.raises(DatasetParseError, match="Line 2"):
        load_csv(write_file("bad.csv", "0,1.0,2.0\n1,3.0,oops\n"))


def test_load_csv_single_class_is_loadable(write_file):
    dataset = load_csv(write_file("one.csv", "a,1.0,2.0\n"))
    assert dataset.C == 1


def test_ts_and_csv_give_same_contents(write_file):
    from_ts = load_ts(write_file("same.ts", "@data\n1.5,2,3:a\n4,5,6.25:b\n"))
    from_csv = load_dataset(write_file("same.csv", "a,1.5,2,3\nb,4,5,6.25\n"))
    assert from_ts == from_csv


def test_dataset_is_read_only(toy_dataset):
    with pytest.raises(ValueError):
        toy_dataset.X[0, 0] = 1.0
    assert toy_dataset.N == len(toy_dataset.series) == 20
    assert toy_dataset.X.dtype == np.float64
