import math

import networkx as nx
import pytest

import cnca


def test_generate_and_exact_centralities_match_networkx():
    g = cnca.generate("ba", n=80, m=2, seed=3)
    assert g.num_nodes == 80
    assert g.num_edges == (80 - 2) * 2
    ref = nx.Graph(g.edges())
    cc = cnca.closeness(g)
    ref_cc = nx.closeness_centrality(ref)
    assert all(math.isclose(cc[v], ref_cc[v], rel_tol=1e-12) for v in range(80))
    bc = cnca.betweenness(g)
    ref_bc = nx.betweenness_centrality(ref, normalized=False)
    # Ordered-pair normalisation: 2 * unordered count / (n(n-1)).
    assert all(math.isclose(bc[v], 2 * ref_bc[v] / (80 * 79), abs_tol=1e-12) for v in range(80))


def test_kendall_tau():
    assert cnca.kendall_tau([1, 2, 3], [1, 2, 3]) == 1.0
    assert cnca.kendall_tau([1, 2, 3], [3, 2, 1]) == -1.0
    with pytest.raises(ValueError):
        cnca.kendall_tau([1], [1])


def test_parse_errors_are_value_errors():
    with pytest.raises(ValueError):
        cnca.Graph.parse("1 2\n3\n")


def test_train_predict_roundtrip(tmp_path):
    g = cnca.generate("ws", n=60, k=4, p=0.1, seed=2)
    ckpt, log, best = cnca.train([g], "cc", {"epochs": "3", "split": "1", "features": "basis"})
    assert len(log) == 3
    scores = cnca.predict(ckpt, g)
    assert len(scores) == 60 and all(math.isfinite(s) for s in scores)
    assert math.isclose(cnca.kendall_tau(scores, cnca.closeness(g)), best, abs_tol=1e-9)
    path = str(tmp_path / "m.ckpt")
    ckpt.save(path)
    assert cnca.predict(cnca.Checkpoint.load(path), g) == scores


def test_cli_entry_point(tmp_path):
    code, out, _ = cnca.run_cli(["generate", "--model", "ba", "--n", "50", "--m", "2", "--out", str(tmp_path / "g.txt")])
    assert code == 0
    assert cnca.Graph.read(str(tmp_path / "g.txt")).num_edges == 96
    assert cnca.run_cli(["bogus"])[0] == 2
