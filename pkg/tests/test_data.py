import numpy as np
import pytest

from tpaucopt.data import (
    BatchSpec,
    Dataset,
    ScorePair,
    gen_gaussian_features,
    gen_gaussian_scores,
    load_csv,
    load_scores_csv,
    sample_batch,
    save_csv,
    save_scores_csv,
)

from oracles import auc_loop


class TestDataset:
    def test_minimal_two_row_dataset(self):
        ds = Dataset(np.array([[0.5, 0.2], [-0.1, 0.3]]), np.array([1, 0]))
        assert ds.n_pos == 1 and ds.n_neg == 1 and ds.dim == 2

    def test_missing_negative_class(self):
        with pytest.raises(ValueError, match="negative"):
            Dataset(np.ones((3, 2)), np.array([1, 1, 1]))

    def test_missing_positive_class(self):
        with pytest.raises(ValueError, match="positive"):
            Dataset(np.ones((3, 2)), np.array([0, 0, 0]))

    def test_non_finite_features_rejected(self):
        with pytest.raises(ValueError, match="finite"):
            Dataset(np.array([[np.nan], [1.0]]), np.array([1, 0]))

    def test_bad_labels_rejected(self):
        with pytest.raises(ValueError):
            Dataset(np.ones((2, 1)), np.array([1, 2]))

    def test_index_partition(self):
        ds = gen_gaussian_features(7, 9, 3, 1.0, seed=0)
        merged = np.sort(np.concatenate([ds.pos_index, ds.neg_index]))
        assert np.array_equal(merged, np.arange(16))
        assert np.all(ds.labels[ds.pos_index] == 1)
        assert np.all(ds.labels[ds.neg_index] == 0)

    def test_immutable(self):
        ds = gen_gaussian_features(3, 3, 2, 1.0, seed=0)
        with pytest.raises(ValueError):
            ds.features[0, 0] = 99.0


class TestScorePair:
    def test_range_enforced(self):
        with pytest.raises(ValueError):
            ScorePair(np.array([1.2]), np.array([0.5]))

    def test_nonempty_enforced(self):
        with pytest.raises(ValueError):
            ScorePair(np.array([]), np.array([0.5]))


class TestCsv:
    def test_round_trip_features(self, tmp_path):
        ds = gen_gaussian_features(60, 40, 3, 1.5, seed=11)
        path = tmp_path / "data.csv"
        save_csv(ds, path)
        back = load_csv(path)
        assert np.array_equal(ds.features, back.features)
        assert np.array_equal(ds.labels, back.labels)

    def test_minimal_file(self, tmp_path):
        path = tmp_path / "two.csv"
        path.write_text("label,f1,f2\n1,0.5,0.2\n0,-0.1,0.3\n")
        ds = load_csv(path)
        assert ds.n_pos == 1 and ds.n_neg == 1 and ds.dim == 2

    def test_all_one_labels(self, tmp_path):
        path = tmp_path / "onesided.csv"
        path.write_text("label,f1\n1,0.5\n1,0.7\n")
        with pytest.raises(ValueError, match="negative"):
            load_csv(path)

    def test_malformed_row_reports_line(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("label,f1\n1,0.5\n0,not-a-number\n")
        with pytest.raises(ValueError, match=":3"):
            load_csv(path)

    def test_wrong_column_count_reports_line(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("label,f1,f2\n1,0.5,0.2\n0,0.1\n")
        with pytest.raises(ValueError, match=":3"):
            load_csv(path)

    def test_non_finite_value_rejected(self, tmp_path):
        path = tmp_path / "inf.csv"
        path.write_text("label,f1\n1,inf\n0,0.3\n")
        with pytest.raises(ValueError, match="non-finite"):
            load_csv(path)

    def test_missing_header(self, tmp_path):
        path = tmp_path / "hdr.csv"
        path.write_text("x,y\n1,2\n")
        with pytest.raises(ValueError, match=":1"):
            load_csv(path)

    def test_score_round_trip(self, tmp_path):
        scores = gen_gaussian_scores(30, 50, seed=5)
        path = tmp_path / "scores.csv"
        save_scores_csv(scores, path)
        back = load_scores_csv(path)
        assert np.array_equal(scores.pos_scores, back.pos_scores)
        assert np.array_equal(scores.neg_scores, back.neg_scores)

    def test_score_header_enforced(self, tmp_path):
        path = tmp_path / "s.csv"
        path.write_text("label,value\n1,0.5\n")
        with pytest.raises(ValueError, match="label,score"):
            load_scores_csv(path)


class TestGaussianScores:
    def test_deterministic(self):
        a = gen_gaussian_scores(100, 100, seed=7)
        b = gen_gaussian_scores(100, 100, seed=7)
        assert np.array_equal(a.pos_scores, b.pos_scores)
        assert np.array_equal(a.neg_scores, b.neg_scores)

    def test_positive_mean_near_half(self):
        s = gen_gaussian_scores(100, 100, seed=3)
        assert abs(s.pos_scores.mean() - 0.5) < 0.05

    def test_sample_auc_reflects_separation(self):
        # class means 0.2 apart at sd 0.08 put the pairwise accuracy ~0.96
        s = gen_gaussian_scores(100, 100, seed=3)
        assert auc_loop(list(s.pos_scores), list(s.neg_scores)) > 0.9

    def test_scores_clamped(self):
        s = gen_gaussian_scores(2000, 2000, seed=0)
        assert s.pos_scores.min() >= 0.0 and s.pos_scores.max() <= 1.0

    def test_precondition(self):
        with pytest.raises(ValueError):
            gen_gaussian_scores(0, 5, seed=0)


class TestGaussianFeatures:
    def test_deterministic(self):
        a = gen_gaussian_features(20, 30, 4, 1.0, seed=9)
        b = gen_gaussian_features(20, 30, 4, 1.0, seed=9)
        assert np.array_equal(a.features, b.features)
        assert np.array_equal(a.labels, b.labels)

    def test_zero_separation_is_chance_level(self):
        ds = gen_gaussian_features(500, 500, 2, 0.0, seed=1)
        proj = ds.features @ np.array([1.0, 1.0])
        scores = (proj - proj.min()) / (proj.max() - proj.min())
        auc = auc_loop(
            list(scores[ds.pos_index]), list(scores[ds.neg_index])
        )
        assert abs(auc - 0.5) < 0.06

    def test_separated_clouds_rankable_along_ones(self):
        ds = gen_gaussian_features(200, 2000, 2, 2.0, seed=42)
        proj = ds.features @ np.ones(2)
        scores = (proj - proj.min()) / (proj.max() - proj.min())
        auc = auc_loop(list(scores[ds.pos_index]), list(scores[ds.neg_index]))
        assert auc > 0.9


class TestBatchSpec:
    def test_default_ratio_one_to_ten(self):
        assert BatchSpec(128).pos_per_batch == 12
        assert BatchSpec(128).neg_per_batch == 116

    def test_explicit_count(self):
        assert BatchSpec(128, 20).pos_per_batch == 20

    def test_invariant(self):
        with pytest.raises(ValueError):
            BatchSpec(8, 8)


class TestSampleBatch:
    def test_deterministic_per_coordinates(self):
        ds = gen_gaussian_features(30, 80, 2, 1.0, seed=0)
        spec = BatchSpec(16, 4, seed=5)
        a = sample_batch(ds, spec, 3, 7)
        b = sample_batch(ds, spec, 3, 7)
        assert np.array_equal(a[0], b[0]) and np.array_equal(a[1], b[1])
        c = sample_batch(ds, spec, 3, 8)
        assert not (np.array_equal(a[0], c[0]) and np.array_equal(a[1], c[1]))

    def test_exact_class_counts_and_no_duplicates(self):
        ds = gen_gaussian_features(30, 80, 2, 1.0, seed=0)
        spec = BatchSpec(16, 4, seed=5)
        pos, neg = sample_batch(ds, spec, 0, 0)
        assert pos.size == 4 and neg.size == 12
        assert np.all(ds.labels[pos] == 1) and np.all(ds.labels[neg] == 0)
        combined = np.concatenate([pos, neg])
        assert np.unique(combined).size == combined.size

    def test_forced_minimal_batch(self):
        ds = Dataset(np.array([[0.1], [0.2]]), np.array([1, 0]))
        pos, neg = sample_batch(ds, BatchSpec(2, 1, seed=0), 0, 0)
        assert pos.tolist() == [0] and neg.tolist() == [1]

    def test_pool_too_small(self):
        ds = Dataset(np.array([[0.1], [0.2]]), np.array([1, 0]))
        with pytest.raises(ValueError, match="pool"):
            sample_batch(ds, BatchSpec(4, 2, seed=0), 0, 0)

    def test_draws_cover_pools_uniformly(self):
        # 1e4 deterministic draws: per-index frequency within 5% of uniform
        ds = gen_gaussian_features(20, 40, 2, 1.0, seed=0)
        spec = BatchSpec(16, 4, seed=123)
        counts = np.zeros(60)
        draws = 10_000
        for k in range(draws):
            pos, neg = sample_batch(ds, spec, k // 100, k % 100)
            counts[pos] += 1
            counts[neg] += 1
        rel_pos = counts[ds.pos_index] / (draws * 4 / 20) - 1.0
        rel_neg = counts[ds.neg_index] / (draws * 12 / 40) - 1.0
        assert np.abs(rel_pos).max() < 0.05
        assert np.abs(rel_neg).max() < 0.05
