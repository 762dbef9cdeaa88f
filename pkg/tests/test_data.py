"""
数据层测试：标签、CSV 读写、分层划分、矩阵测量模型与合成
"""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from src.core.errors import DataParseError, ParameterError, SchemaError, ShapeError, StratificationError
from src.core.models import SplitSpec
from src.data import (
    ANALYTE_ORDER,
    LabeledDataset,
    MixtureLabel,
    SampleMatrix,
    SensitivityMatrix,
    array_capability,
    export_csv,
    factorial_mixtures,
    load_csv,
    perfect_measurement,
    planted_sensitivity,
    sensor_capability,
    stratified_split,
    synth_dataset,
    synth_measure,
    synth_sensitivity,
)
from src.data.split import train_count

CSV_HEADER = "B,T,E,X,N,I,S1,S2,S3"


def _write(tmp_path, lines):
    path = tmp_path / "array.csv"
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def _dataset(labels, seed=0):
    rng = np.random.default_rng(seed)
    return LabeledDataset(
        sensor_ids=("S1", "S2"),
        features=rng.normal(size=(len(labels), 2)),
        labels=tuple(MixtureLabel.parse(s) for s in labels),
    )


class TestLabels:
    def test_canonical_order(self):
        assert MixtureLabel.of(["I", "B", "X"]).canonical == "BXI"

    def test_empty_is_none(self):
        assert MixtureLabel.of([]).canonical == "NONE"
        assert MixtureLabel.parse("NONE").present == frozenset()

    @pytest.mark.parametrize("text", ["TB", "BB", "Q", ""])
    def test_rejects_non_canonical(self, text):
        with pytest.raises(ValueError):
            MixtureLabel.parse(text)

    @given(st.sets(st.sampled_from(ANALYTE_ORDER)))
    def test_parse_format_identity(self, codes):
        label = MixtureLabel(frozenset(codes))
        assert MixtureLabel.parse(label.canonical) == label
        assert MixtureLabel.parse(label.canonical).canonical == label.canonical


class TestCsv:
    def test_labels_from_concentrations(self, tmp_path):
        path = _write(tmp_path, [
            CSV_HEADER,
            "120,0,0,0,0,0,0.1,0.2,0.3",
            "0,0,0,0,0,0,0.0,0.1,0.0",
            "0,44,0,0,160,0,1.0,1.1,1.2",
        ])
        ds = load_csv(path)
        assert [lb.canonical for lb in ds.labels] == ["B", "NONE", "TN"]
        assert ds.sensor_ids == ("S1", "S2", "S3")
        assert ds.source_rows == 3

    def test_missing_column_is_named(self, tmp_path):
        path = _write(tmp_path, ["B,T,E,X,N,S1", "1,0,0,0,0,0.5"])
        with pytest.raises(SchemaError, match="'I'"):
            load_csv(path)

    def test_bad_cell_reports_row(self, tmp_path):
        path = _write(tmp_path, [
            CSV_HEADER,
            "0,0,0,0,0,0,0.1,0.2,0.3",
            "0,0,0,0,0,0,0.1,oops,0.3",
        ])
        with pytest.raises(DataParseError) as info:
            load_csv(path)
        assert info.value.row == 1
        assert info.value.column == "S2"

    def test_export_then_load(self, tmp_path, planted):
        path = export_csv(planted, tmp_path / "out.csv")
        again = load_csv(path)
        assert again.sensor_ids == planted.sensor_ids
        assert list(again.label_strings) == list(planted.label_strings)
        np.testing.assert_allclose(again.features, planted.features)


class TestSplit:
    def test_train_count(self):
        assert train_count(5, 0.8) == 4
        assert train_count(2, 0.8) == 1
        assert train_count(3, 0.99) == 2
        assert train_count(3, 0.01) == 1

    def test_ten_rows_two_classes(self):
        ds = _dataset(["B"] * 5 + ["T"] * 5)
        train, test = stratified_split(ds, SplitSpec(train_fraction=0.8, seed=1))
        assert train.n_rows == 8 and test.n_rows == 2
        assert train.class_counts() == {"B": 4, "T": 4}
        assert test.class_counts() == {"B": 1, "T": 1}

    def test_deterministic(self):
        ds = _dataset(["B"] * 7 + ["T"] * 9 + ["NONE"] * 4)
        spec = SplitSpec(train_fraction=0.7, seed=42)
        a, _ = stratified_split(ds, spec)
        b, _ = stratified_split(ds, spec)
        np.testing.assert_array_equal(a.features, b.features)

    def test_singleton_class(self):
        ds = _dataset(["B", "B", "T"])
        with pytest.raises(StratificationError) as info:
            stratified_split(ds, SplitSpec())
        assert info.value.classes == ["T"]

    @settings(max_examples=50, deadline=None)
    @given(
        counts=st.lists(st.integers(min_value=2, max_value=12), min_size=1, max_size=5),
        fraction=st.floats(min_value=0.05, max_value=0.95),
        seed=st.integers(min_value=0, max_value=10_000),
    )
    def test_conservation(self, counts, fraction, seed):
        names = ["NONE", "B", "T", "E", "X"]
        labels = [names[i] for i, c in enumerate(counts) for _ in range(c)]
        ds = LabeledDataset(
            sensor_ids=("S1",),
            features=np.arange(len(labels), dtype=float)[:, None],
            labels=tuple(MixtureLabel.parse(s) for s in labels),
        )
        train, test = stratified_split(ds, SplitSpec(train_fraction=fraction, seed=seed))
        rows = sorted(train.features[:, 0].tolist() + test.features[:, 0].tolist())
        assert rows == list(range(len(labels)))
        for name, total in ds.class_counts().items():
            assert train.class_counts()[name] + test.class_counts()[name] == total
            assert train.class_counts()[name] >= 1 and test.class_counts()[name] >= 1


class TestSynthesis:
    def test_density_out_of_range(self):
        with pytest.raises(ParameterError):
            synth_sensitivity(4, 3, 0.0, seed=0)
        with pytest.raises(ParameterError):
            synth_sensitivity(4, 3, 1.5, seed=0)

    def test_full_density(self):
        D = synth_sensitivity(5, 4, 1.0, seed=0)
        assert np.all(D.entries >= 0.5) and np.all(D.entries <= 1.5)

    def test_forced_identity_mask(self):
        D = synth_sensitivity(6, 6, 0.1, seed=0, mask=np.eye(6, dtype=bool))
        assert np.count_nonzero(D.entries) == 6
        assert np.all(np.diag(D.entries) > 0)

    def test_mean_density(self):
        fractions = [np.mean(synth_sensitivity(17, 6, 0.62, seed=s).entries > 0) for s in range(300)]
        assert abs(np.mean(fractions) - 0.62) < 0.03

    def test_identity_readouts(self):
        D = SensitivityMatrix.from_entries(np.eye(3))
        M = synth_measure(D, SampleMatrix(np.array([1.0, 2.0, 3.0])), noise_sd=0.0, seed=0)
        np.testing.assert_allclose(M.readouts, [1.0, 2.0, 3.0])

    def test_row_sums_match_matrix_product(self):
        D = synth_sensitivity(4, 3, 0.7, seed=5)
        X = SampleMatrix(np.array([0.3, 1.2, 2.5]))
        M = synth_measure(D, X, noise_sd=0.0, seed=0)
        np.testing.assert_allclose(M.readouts, D.entries @ X.as_matrix() @ np.ones(3))

    @given(alpha=st.floats(min_value=0.0, max_value=10.0))
    def test_linearity(self, alpha):
        D = synth_sensitivity(5, 3, 0.8, seed=2)
        X = SampleMatrix(np.array([0.5, 1.0, 1.5]))
        base = synth_measure(D, X, 0.0, 0).readouts
        scaled = synth_measure(D, X.scaled(alpha), 0.0, 0).readouts
        np.testing.assert_allclose(scaled, alpha * base, atol=1e-12)

    def test_dimension_mismatch(self):
        D = synth_sensitivity(4, 3, 0.5, seed=0)
        with pytest.raises(ShapeError):
            synth_measure(D, SampleMatrix(np.ones(4)), 0.0, 0)

    def test_factorial_design(self):
        mixtures = factorial_mixtures(3, {}, seed=0)
        labels = [lb.canonical for _, lb in mixtures]
        assert len(labels) == 8 and len(set(labels)) == 8
        assert "NONE" in labels
        assert len(factorial_mixtures(3, {}, seed=0, include_empty=False)) == 7

    def test_dataset_rows_and_duplicates(self):
        D = synth_sensitivity(4, 3, 0.8, seed=1)
        mixtures = factorial_mixtures(3, {"B": [1, 2], "T": [1, 2], "E": [1, 2]}, seed=1)
        ds = synth_dataset(D, mixtures, repeats=2, noise_sd=0.0, seed=1)
        assert ds.n_rows == 16
        np.testing.assert_array_equal(ds.features[0], ds.features[1])

    def test_empty_mixture_list(self):
        D = synth_sensitivity(4, 3, 0.8, seed=1)
        with pytest.raises(ParameterError):
            synth_dataset(D, [], repeats=2, noise_sd=0.0, seed=1)

    def test_planted_rows(self, planted):
        D = planted_sensitivity(8, 3, [1, 4, 6], density=0.62, seed=3)
        live = np.any(D.entries > 0, axis=1)
        assert live.tolist() == [False, True, False, False, True, False, True, False]
        dead = planted.features[:, [0, 2, 3, 5, 7]]
        assert np.abs(dead).max() < 0.1

    def test_planted_is_reproducible(self):
        a = planted_sensitivity(8, 3, [1, 4], density=0.5, seed=9)
        b = planted_sensitivity(8, 3, [1, 4], density=0.5, seed=9)
        np.testing.assert_array_equal(a.entries, b.entries)


class TestCapability:
    def test_perfect_measurement_prefix(self):
        D = SensitivityMatrix.from_entries(np.eye(3))
        M = synth_measure(D, SampleMatrix(np.array([1.0, 1.0, 1.0])), 0.0, 0)
        assert perfect_measurement(M, 3)
        assert not perfect_measurement(M, 2)
        assert array_capability(M, 2) == pytest.approx(2 / 3)

    def test_zero_column_never_perfect(self):
        entries = np.array([[1.0, 0.0], [0.5, 0.0], [1.2, 0.0]])
        M = synth_measure(SensitivityMatrix.from_entries(entries), SampleMatrix(np.ones(2)), 0.0, 0)
        assert not any(perfect_measurement(M, k) for k in range(1, 4))

    def test_monotone_in_k(self):
        D = synth_sensitivity(10, 6, 0.3, seed=4)
        M = synth_measure(D, SampleMatrix(np.ones(6)), 0.0, 0)
        flags = [perfect_measurement(M, k) for k in range(1, 11)]
        assert flags == sorted(flags)

    def test_k_out_of_range(self):
        M = synth_measure(SensitivityMatrix.from_entries(np.eye(2)), SampleMatrix(np.ones(2)), 0.0, 0)
        with pytest.raises(ParameterError):
            perfect_measurement(M, 0)

    def test_sensor_capability(self):
        D = SensitivityMatrix.from_entries(np.array([[1.0, 0.0, 0.0, 1.0], [1.0, 1.0, 1.0, 1.0]]))
        np.testing.assert_allclose(sensor_capability(D), [0.5, 1.0])
