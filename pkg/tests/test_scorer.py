import numpy as np
import pytest

from tpaucopt.scorer import ScorerParams, backward, forward, init, load, save


def sigmoid_scalar(z):
    return 1.0 / (1.0 + np.exp(-min(max(z, -36.0), 36.0)))


class TestForward:
    def test_zero_linear_params_score_half(self):
        p = ScorerParams("linear", 3, 0, np.zeros(4))
        x = np.random.default_rng(0).normal(size=(5, 3))
        np.testing.assert_array_equal(forward(p, x), np.full(5, 0.5))

    def test_large_bias_saturates(self):
        p = ScorerParams("linear", 2, 0, np.array([0.0, 0.0, 20.0]))
        scores = forward(p, np.zeros((3, 2)))
        assert np.all(np.abs(scores - 1.0) < 1e-8)

    def test_outputs_strictly_inside_unit_interval(self):
        p = ScorerParams("linear", 1, 0, np.array([100.0, 50.0]))
        scores = forward(p, np.array([[5.0], [-5.0]]))
        assert np.all(scores > 0.0) and np.all(scores < 1.0)

    def test_matches_scalar_recomputation_linear(self):
        rng = np.random.default_rng(1)
        p = init("linear", 4, seed=3)
        p.theta = rng.normal(size=p.theta.shape)
        x = rng.normal(size=(6, 4))
        expected = [
            sigmoid_scalar(sum(p.theta[k] * row[k] for k in range(4)) + p.theta[4])
            for row in x
        ]
        np.testing.assert_allclose(forward(p, x), expected, rtol=1e-12)

    def test_matches_scalar_recomputation_mlp(self):
        rng = np.random.default_rng(2)
        p = init("mlp", 3, hidden=4, seed=5)
        p.theta = rng.normal(size=p.theta.shape)
        w1 = p.theta[:12].reshape(4, 3)
        b1 = p.theta[12:16]
        w2 = p.theta[16:20]
        b2 = p.theta[20]
        x = rng.normal(size=(5, 3))
        expected = []
        for row in x:
            hidden = [
                np.tanh(sum(w1[h, k] * row[k] for k in range(3)) + b1[h])
                for h in range(4)
            ]
            expected.append(
                sigmoid_scalar(sum(w2[h] * hidden[h] for h in range(4)) + b2)
            )
        np.testing.assert_allclose(forward(p, x), expected, rtol=1e-12)

    def test_dimension_mismatch(self):
        p = init("linear", 3, seed=0)
        with pytest.raises(ValueError, match="shape"):
            forward(p, np.zeros((2, 4)))

    def test_deterministic(self):
        p = init("mlp", 3, hidden=5, seed=9)
        x = np.random.default_rng(3).normal(size=(7, 3))
        np.testing.assert_array_equal(forward(p, x), forward(p, x))


class TestBackward:
    def test_zero_output_grads(self):
        p = init("mlp", 3, hidden=4, seed=0)
        x = np.random.default_rng(0).normal(size=(5, 3))
        np.testing.assert_array_equal(backward(p, x, np.zeros(5)), np.zeros(21))

    def test_single_example_linear_chain_rule(self):
        p = ScorerParams("linear", 2, 0, np.array([0.3, -0.2, 0.1]))
        x = np.array([[1.5, -0.7]])
        z = 0.3 * 1.5 + 0.2 * 0.7 + 0.1
        s = sigmoid_scalar(z)
        g = backward(p, x, np.array([2.0]))
        expected_w = 2.0 * s * (1 - s) * x[0]
        np.testing.assert_allclose(g[:2], expected_w, rtol=1e-12)
        assert g[2] == pytest.approx(2.0 * s * (1 - s), rel=1e-12)

    @pytest.mark.parametrize("kind,hidden", [("linear", 0), ("mlp", 3)])
    def test_matches_finite_differences(self, kind, hidden):
        rng = np.random.default_rng(4)
        worst = 0.0
        for trial in range(50):
            d = int(rng.integers(1, 5))
            p = init(kind, d, hidden=hidden, seed=trial)
            p.theta = rng.normal(0, 1, p.theta.shape)
            n = int(rng.integers(1, 6))
            x = rng.normal(size=(n, d))
            d_out = rng.normal(size=n)
            grad = backward(p, x, d_out)
            h = 1e-5
            for k in range(p.theta.size):
                up, dn = p.copy(), p.copy()
                up.theta[k] += h
                dn.theta[k] -= h
                fd = (
                    np.sum(d_out * forward(up, x)) - np.sum(d_out * forward(dn, x))
                ) / (2 * h)
                if abs(grad[k]) < 1e-8:
                    worst = max(worst, abs(fd - grad[k]))
                else:
                    worst = max(worst, abs(fd - grad[k]) / abs(grad[k]))
        assert worst < 1e-5

    def test_length_mismatch(self):
        p = init("linear", 2, seed=0)
        with pytest.raises(ValueError, match="entry per input row"):
            backward(p, np.zeros((3, 2)), np.zeros(2))


class TestInit:
    def test_deterministic(self):
        a = init("mlp", 4, hidden=6, seed=42)
        b = init("mlp", 4, hidden=6, seed=42)
        np.testing.assert_array_equal(a.theta, b.theta)

    def test_linear_parameter_count(self):
        assert init("linear", 3, seed=0).theta.size == 4

    def test_biases_start_at_zero(self):
        p = init("mlp", 3, hidden=4, seed=1)
        np.testing.assert_array_equal(p.theta[12:16], np.zeros(4))
        assert p.theta[-1] == 0.0

    def test_fresh_scores_center_near_half(self):
        rng = np.random.default_rng(5)
        p = init("linear", 8, seed=11)
        x = rng.normal(size=(1000, 8))
        assert abs(forward(p, x).mean() - 0.5) < 0.1

    def test_mlp_needs_hidden(self):
        with pytest.raises(ValueError):
            init("mlp", 3, hidden=0, seed=0)


class TestSaveLoad:
    @pytest.mark.parametrize("kind,hidden", [("linear", 0), ("mlp", 5)])
    def test_round_trip_bit_identical(self, tmp_path, kind, hidden):
        rng = np.random.default_rng(6)
        p = init(kind, 3, hidden=hidden, seed=7)
        p.theta = rng.normal(size=p.theta.shape)
        path = tmp_path / "model.txt"
        save(p, path)
        q = load(path)
        assert q.kind == p.kind and q.d == p.d and q.hidden == p.hidden
        np.testing.assert_array_equal(q.theta, p.theta)
        x = rng.normal(size=(4, 3))
        np.testing.assert_array_equal(forward(p, x), forward(q, x))

    def test_corrupt_header(self, tmp_path):
        path = tmp_path / "bad.txt"
        path.write_text("SOME-OTHER-FORMAT v9\nkind linear\n2\n0 0 0\n")
        with pytest.raises(ValueError, match=":1"):
            load(path)

    def test_bad_parameter_reports_line(self, tmp_path):
        path = tmp_path / "bad.txt"
        path.write_text("TPAUCOPT-MODEL v1\nkind linear\n2\n0.1 oops\n0.3\n")
        with pytest.raises(ValueError, match=":4"):
            load(path)

    def test_wrong_parameter_count(self, tmp_path):
        path = tmp_path / "bad.txt"
        path.write_text("TPAUCOPT-MODEL v1\nkind linear\n2\n0.1\n")
        with pytest.raises(ValueError, match="expected 3 parameters"):
            load(path)

    def test_loaded_model_enforces_feature_dimension(self, tmp_path):
        p = init("mlp", 3, hidden=2, seed=0)
        path = tmp_path / "m.txt"
        save(p, path)
        q = load(path)
        with pytest.raises(ValueError, match="shape"):
            forward(q, np.zeros((2, 5)))
