import math

import numpy as np
import pytest

from dfdr import (
    DataMatrix,
    ParseError,
    PreprocessingError,
    ValidationError,
    load_matrix,
    preprocess,
    signed_log1p,
)


def write_tsv(path, header, rows):
    lines = ["\t".join(header)]
    lines += ["\t".join(str(c) for c in row) for row in rows]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def write_labels(path, pairs):
    path.write_text("".join(f"{s}\t{g}\n" for s, g in pairs), encoding="utf-8")


@pytest.fixture
def matrix_files(tmp_path):
    mpath = tmp_path / "matrix.tsv"
    lpath = tmp_path / "labels.tsv"
    write_tsv(
        mpath,
        ["feature_id", "s1", "s2", "s3", "s4"],
        [
            ["g1", 1.0, 2.0, 3.0, 4.0],
            ["g2", 5.0, 6.0, 7.0, 8.0],
            ["g3", 0.5, 0.25, 0.125, 0.0625],
        ],
    )
    write_labels(lpath, [("s1", "A"), ("s2", "A"), ("s3", "B"), ("s4", "B")])
    return mpath, lpath


class TestLoadMatrix:
    def test_reads_dimensions_and_groups(self, matrix_files):
        matrix = load_matrix(*matrix_files)
        assert matrix.n_features == 3
        assert matrix.n_subjects == 4
        assert matrix.groups() == {"A": (0, 1), "B": (2, 3)}
        assert matrix.feature_ids == ("g1", "g2", "g3")
        np.testing.assert_array_equal(matrix.values[0], [1.0, 2.0, 3.0, 4.0])

    def test_ragged_row_names_row_number(self, matrix_files, tmp_path):
        mpath, lpath = matrix_files
        lines = mpath.read_text().splitlines()
        lines[2] = "g2\t5.0\t6.0"
        mpath.write_text("\n".join(lines) + "\n")
        with pytest.raises(ParseError, match="row 3"):
            load_matrix(mpath, lpath)

    def test_duplicate_feature_id_named(self, matrix_files):
        mpath, lpath = matrix_files
        text = mpath.read_text().replace("g3", "g1")
        mpath.write_text(text)
        with pytest.raises(ValidationError, match="'g1'"):
            load_matrix(mpath, lpath)

    def test_duplicate_subject_id_named(self, tmp_path):
        mpath = tmp_path / "m.tsv"
        lpath = tmp_path / "l.tsv"
        write_tsv(mpath, ["id", "s1", "s1"], [["g1", 1, 2]])
        write_labels(lpath, [("s1", "A")])
        with pytest.raises(ValidationError, match="'s1'"):
            load_matrix(mpath, lpath)

    def test_missing_label_named(self, matrix_files, tmp_path):
        mpath, _ = matrix_files
        lpath = tmp_path / "short.tsv"
        write_labels(lpath, [("s1", "A"), ("s2", "A"), ("s3", "B")])
        with pytest.raises(ValidationError, match="'s4'"):
            load_matrix(mpath, lpath)

    def test_blank_cell_is_parse_error(self, matrix_files):
        mpath, lpath = matrix_files
        mpath.write_text(mpath.read_text().replace("6.0", ""))
        with pytest.raises(ParseError, match="missing value"):
            load_matrix(mpath, lpath)

    def test_na_cell_is_parse_error(self, matrix_files):
        mpath, lpath = matrix_files
        mpath.write_text(mpath.read_text().replace("6.0", "NA"))
        with pytest.raises(ParseError, match="missing value"):
            load_matrix(mpath, lpath)

    def test_non_numeric_cell_is_parse_error(self, matrix_files):
        mpath, lpath = matrix_files
        mpath.write_text(mpath.read_text().replace("6.0", "high"))
        with pytest.raises(ParseError, match="non-numeric"):
            load_matrix(mpath, lpath)

    def test_extra_label_entries_are_ignored(self, matrix_files, tmp_path):
        mpath, _ = matrix_files
        lpath = tmp_path / "extra.tsv"
        write_labels(
            lpath,
            [("s1", "A"), ("s2", "A"), ("s3", "B"), ("s4", "B"), ("s9", "C")],
        )
        matrix = load_matrix(mpath, lpath)
        assert matrix.labels == ("A", "A", "B", "B")


class TestDataMatrixValidation:
    def test_needs_two_subjects(self):
        with pytest.raises(ValidationError):
            DataMatrix(
                values=np.array([[1.0]]),
                feature_ids=("g1",),
                subject_ids=("s1",),
                labels=("A",),
            )

    def test_unknown_group_lookup(self, tiny_matrix):
        with pytest.raises(ValidationError, match="'C'"):
            tiny_matrix.group_columns("C")

    def test_select_features_keeps_labels(self, tiny_matrix):
        sub = tiny_matrix.select_features([2, 0])
        assert sub.feature_ids == ("g3", "g1")
        assert sub.labels == tiny_matrix.labels
        np.testing.assert_array_equal(sub.values[1], tiny_matrix.values[0])


class TestPreprocess:
    def test_normalizes_by_column_median(self):
        # single column [2, 4, 6]: median 4, normalized [0.5, 1.0, 1.5]
        matrix = DataMatrix(
            values=np.array([[2.0, 2.0], [4.0, 4.0], [6.0, 6.0]]),
            feature_ids=("g1", "g2", "g3"),
            subject_ids=("s1", "s2"),
            labels=("A", "B"),
        )
        out = preprocess(matrix)
        expected = [math.log1p(0.5), math.log1p(1.0), math.log1p(1.5)]
        np.testing.assert_allclose(out.values[:, 0], expected, rtol=1e-15)

    def test_transform_value_e_minus_one(self):
        # normalized value e - 1 maps to exactly 1; its negation to -1
        assert signed_log1p(math.e - 1.0) == pytest.approx(1.0, abs=1e-15)
        assert signed_log1p(-(math.e - 1.0)) == pytest.approx(-1.0, abs=1e-15)
        assert signed_log1p(0.0) == 0.0

    def test_zero_median_names_subject(self):
        matrix = DataMatrix(
            values=np.array([[1.0, -1.0], [0.0, 2.0], [-1.0, 3.0]]),
            feature_ids=("g1", "g2", "g3"),
            subject_ids=("sA", "sB"),
            labels=("A", "B"),
        )
        with pytest.raises(PreprocessingError, match="'sA'"):
            preprocess(matrix)

    def test_negative_median_allowed(self):
        matrix = DataMatrix(
            values=np.array([[-2.0, 1.0], [-4.0, 2.0], [-6.0, 3.0]]),
            feature_ids=("g1", "g2", "g3"),
            subject_ids=("s1", "s2"),
            labels=("A", "B"),
        )
        out = preprocess(matrix)
        # column 1 median is -4; -2 / -4 = 0.5
        assert out.values[0, 0] == pytest.approx(math.log1p(0.5))

    def test_preserves_shape_ids_labels(self, tiny_matrix):
        out = preprocess(tiny_matrix)
        assert out.values.shape == tiny_matrix.values.shape
        assert out.feature_ids == tiny_matrix.feature_ids
        assert out.subject_ids == tiny_matrix.subject_ids
        assert out.labels == tiny_matrix.labels

    def test_sign_preserved_for_positive_medians(self):
        rng = np.random.default_rng(7)
        for _ in range(20):
            values = rng.normal(2.0, 1.0, size=(15, 6))  # medians positive w.h.p.
            matrix = DataMatrix(
                values=values,
                feature_ids=tuple(f"g{i}" for i in range(15)),
                subject_ids=tuple(f"s{j}" for j in range(6)),
                labels=("A",) * 3 + ("B",) * 3,
            )
            if np.any(np.median(values, axis=0) <= 0.0):
                continue
            out = preprocess(matrix)
            np.testing.assert_array_equal(np.sign(out.values), np.sign(values))

    def test_transform_is_odd(self):
        rng = np.random.default_rng(11)
        x = rng.normal(0.0, 3.0, size=1000)
        np.testing.assert_allclose(signed_log1p(-x), -signed_log1p(x), atol=1e-15)
