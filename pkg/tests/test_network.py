import json

import numpy as np
import pytest

from hybridbn.data import CategoricalDataset
from hybridbn.graphs import Dag
from hybridbn.network import (
    BayesianNetwork,
    fit_cpts,
    forward_sample,
    read_network,
    write_network,
)
from hybridbn.synthetic import child_shape_network, monotone_network, random_dag

B = ("0", "1")


def binary_chain():
    # x0 -> x1 with deterministic copy
    g = Dag(2, [(0, 1)])
    cpts = [
        np.array([[0.5], [0.5]]),
        np.array([[1.0, 0.0], [0.0, 1.0]]),
    ]
    return BayesianNetwork(g, ("x0", "x1"), (B, B), cpts)


class TestValidation:
    def test_column_sum_enforced(self):
        g = Dag(1)
        with pytest.raises(ValueError, match="sum"):
            BayesianNetwork(g, ("a",), (B,), [np.array([[0.5], [0.4]])])

    def test_shape_enforced(self):
        g = Dag(2, [(0, 1)])
        cpts = [np.array([[0.5], [0.5]]), np.array([[0.5], [0.5]])]
        with pytest.raises(ValueError, match="shape"):
            BayesianNetwork(g, ("a", "b"), (B, B), cpts)

    def test_name_count_enforced(self):
        g = Dag(1)
        with pytest.raises(ValueError, match="metadata"):
            BayesianNetwork(g, ("a", "b"), (B,), [np.array([[1.0], [0.0]])])

    def test_negative_entry_enforced(self):
        g = Dag(1)
        with pytest.raises(ValueError, match="negative"):
            BayesianNetwork(g, ("a",), (B,), [np.array([[1.5], [-0.5]])])


def dataset(rows, arities):
    return CategoricalDataset.from_array(
        np.asarray(rows, dtype=np.int32), arities=arities
    )


class TestFitCpts:
    def test_maximum_likelihood_counts(self):
        ds = dataset([[0, 0], [0, 0], [0, 1], [1, 1]], (2, 2))
        net = fit_cpts(Dag(2, [(0, 1)]), ds)
        np.testing.assert_allclose(net.cpts[0][:, 0], [0.75, 0.25])
        np.testing.assert_allclose(net.cpts[1][:, 0], [2 / 3, 1 / 3])
        np.testing.assert_allclose(net.cpts[1][:, 1], [0.0, 1.0])

    def test_laplace_smoothing(self):
        ds = dataset([[0, 0], [0, 0], [1, 1]], (2, 2))
        net = fit_cpts(Dag(2, [(0, 1)]), ds, laplace=1.0)
        # parent=0: counts (2, 0) -> (3, 1)/4
        np.testing.assert_allclose(net.cpts[1][:, 0], [0.75, 0.25])
        np.testing.assert_allclose(net.cpts[1][:, 1], [1 / 3, 2 / 3])

    def test_unseen_config_uniform(self):
        # parent level 1 never appears; its column must be uniform
        ds = dataset([[0, 0], [0, 1]], (2, 2))
        net = fit_cpts(Dag(2, [(0, 1)]), ds)
        np.testing.assert_allclose(net.cpts[1][:, 1], [0.5, 0.5])

    def test_multi_parent_column_order(self):
        # column index iterates the last parent fastest
        ds = dataset([[0, 0, 0], [0, 1, 1], [1, 0, 1], [1, 1, 1]], (2, 2, 2))
        net = fit_cpts(Dag(3, [(0, 2), (1, 2)]), ds)
        assert net.cpts[2].shape == (2, 4)
        np.testing.assert_allclose(net.cpts[2][:, 0], [1.0, 0.0])  # a=0,b=0
        np.testing.assert_allclose(net.cpts[2][:, 1], [0.0, 1.0])  # a=0,b=1
        np.testing.assert_allclose(net.cpts[2][:, 2], [0.0, 1.0])  # a=1,b=0

    def test_preserves_metadata(self):
        ds = dataset([[0, 2], [1, 0], [1, 1]], (2, 3))
        net = fit_cpts(Dag(2), ds)
        assert net.names == ds.names
        assert net.arities == (2, 3)


class TestForwardSample:
    def test_deterministic_chain_copies(self):
        out = forward_sample(binary_chain(), 500, seed=3)
        assert out.rows.shape == (500, 2)
        np.testing.assert_array_equal(out.rows[:, 0], out.rows[:, 1])

    def test_marginal_frequency(self):
        g = Dag(1)
        net = BayesianNetwork(g, ("a",), (B,), [np.array([[0.5], [0.5]])])
        out = forward_sample(net, 10000, seed=11)
        assert abs(out.rows.mean() - 0.5) < 0.02

    def test_seed_determinism(self):
        net = monotone_network(random_dag(6, 3, np.random.default_rng(2)))
        a = forward_sample(net, 200, seed=5)
        b = forward_sample(net, 200, seed=5)
        c = forward_sample(net, 200, seed=6)
        np.testing.assert_array_equal(a.rows, b.rows)
        assert not np.array_equal(a.rows, c.rows)

    def test_values_within_levels(self):
        net = monotone_network(
            random_dag(5, 2, np.random.default_rng(7)), arities=(2, 3, 4, 2, 3)
        )
        out = forward_sample(net, 300, seed=1)
        assert out.names == net.names
        for j, arity in enumerate(net.arities):
            assert out.rows[:, j].min() >= 0
            assert out.rows[:, j].max() < arity

    def test_sequence_seed(self):
        net = binary_chain()
        a = forward_sample(net, 50, seed=[3, 500])
        b = forward_sample(net, 50, seed=[3, 500])
        c = forward_sample(net, 50, seed=[3, 501])
        np.testing.assert_array_equal(a.rows, b.rows)
        assert not np.array_equal(a.rows, c.rows)


class TestSerialization:
    def test_roundtrip(self, tmp_path):
        net = monotone_network(
            random_dag(7, 3, np.random.default_rng(4)), arities=(2, 3, 2, 2, 4, 2, 3)
        )
        path = tmp_path / "net.json"
        write_network(net, path)
        back = read_network(path)
        assert back.names == net.names
        assert back.levels == net.levels
        assert back.graph.edges() == net.graph.edges()
        for v in range(net.d):
            np.testing.assert_allclose(back.cpts[v], net.cpts[v], atol=1e-12)

    def test_sample_after_roundtrip_identical(self, tmp_path):
        net = monotone_network(random_dag(5, 2, np.random.default_rng(8)))
        path = tmp_path / "net.json"
        write_network(net, path)
        back = read_network(path)
        np.testing.assert_array_equal(
            forward_sample(net, 100, seed=2).rows,
            forward_sample(back, 100, seed=2).rows,
        )

    def _write(self, tmp_path, doc):
        path = tmp_path / "bad.json"
        path.write_text(json.dumps(doc))
        return path

    def _valid_doc(self):
        return {
            "variables": [
                {"name": "a", "levels": ["0", "1"]},
                {"name": "b", "levels": ["0", "1"]},
            ],
            "edges": [["a", "b"]],
            "cpts": {
                "a": [0.5, 0.5],
                "b": [1.0, 0.0, 0.0, 1.0],
            },
        }

    def test_read_valid(self, tmp_path):
        net = read_network(self._write(tmp_path, self._valid_doc()))
        assert net.names == ("a", "b")
        assert net.graph.edges() == [(0, 1)]

    def test_read_missing_key(self, tmp_path):
        doc = self._valid_doc()
        del doc["cpts"]
        with pytest.raises(ValueError, match="cpts"):
            read_network(self._write(tmp_path, doc))

    def test_read_unknown_edge_name(self, tmp_path):
        doc = self._valid_doc()
        doc["edges"] = [["a", "zz"]]
        with pytest.raises(ValueError, match="edge"):
            read_network(self._write(tmp_path, doc))

    def test_read_cycle(self, tmp_path):
        doc = self._valid_doc()
        doc["edges"] = [["a", "b"], ["b", "a"]]
        doc["cpts"]["a"] = [1.0, 0.0, 0.0, 1.0]
        with pytest.raises(ValueError):
            read_network(self._write(tmp_path, doc))

    def test_read_negative_probability(self, tmp_path):
        doc = self._valid_doc()
        doc["cpts"]["a"] = [1.5, -0.5]
        with pytest.raises(ValueError, match="negative"):
            read_network(self._write(tmp_path, doc))

    def test_read_bad_column_sum(self, tmp_path):
        doc = self._valid_doc()
        doc["cpts"]["a"] = [0.7, 0.2]
        with pytest.raises(ValueError, match="sum"):
            read_network(self._write(tmp_path, doc))

    def test_read_wrong_cpt_size(self, tmp_path):
        doc = self._valid_doc()
        doc["cpts"]["b"] = [0.5, 0.5]
        with pytest.raises(ValueError, match="entries"):
            read_network(self._write(tmp_path, doc))

    def test_read_renormalizes_rounding_noise(self, tmp_path):
        doc = self._valid_doc()
        doc["cpts"]["a"] = [0.5000001, 0.5]
        net = read_network(self._write(tmp_path, doc))
        assert abs(net.cpts[0][:, 0].sum() - 1.0) < 1e-12

    def test_read_not_json(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text("{nope")
        with pytest.raises(ValueError, match="JSON"):
            read_network(path)


class TestFixtures:
    def test_child_shape_dimensions(self):
        net = child_shape_network()
        assert net.d == 20
        assert len(net.graph.edges()) == 25
        indeg = max(len(net.graph.parents(v)) for v in range(20))
        assert indeg <= 2
