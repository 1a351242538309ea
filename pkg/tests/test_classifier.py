from fractions import Fraction
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bcnet.classifier import decide, fuse, predict, predict_batch, score, score_batch
from bcnet.data import Dataset, SplitSpec, load_csv, stratified_split
from bcnet.evaluation import accuracy
from bcnet.graph import HyperParams, build_network, structural_hash

from oracles import literal_classification

DATA = Path(__file__).resolve().parent.parent / "data" / "uci"

# frozen 12-node, 2-class fixture
FIXTURE_X = [
    [0.15, -0.42], [-0.33, -1.95], [1.44, 0.92], [-0.26, 0.62], [0.22, -0.44], [0.78, -0.25],
    [1.24, 0.37], [1.86, 0.92], [1.94, 0.51], [1.6, 0.29], [2.17, 1.15], [1.76, 1.33],
]
FIXTURE_Y = ["a"] * 6 + ["b"] * 6
PROBES = [
    [-0.07, 2.2], [0.62, 1.28], [-1.02, -1.08], [-0.59, 2.04], [1.56, 1.9], [1.4, 0.13], [0.82, 0.87],
    [2.38, 0.25], [2.52, 0.95], [2.23, 0.49], [1.62, -0.14], [0.85, -0.64], [-1.05, -1.35],
    [1.66, 0.33], [2.54, 1.84], [0.23, 2.39], [1.16, 1.56], [0.33, -0.72], [-0.73, -0.78], [1.22, -1.05],
]


def fixture_model(**params):
    ds = Dataset(np.array(FIXTURE_X), [0] * 6 + [1] * 6, ("a", "b"))
    return build_network(ds, HyperParams(**{"k": 2, "e": 0.0, "b": 2, "alpha": 1.0, **params}))


def assert_matches_oracle(s, oracle):
    W, T, H, decided = oracle
    assert s.T == T
    assert s.decided == decided
    # floats against exact rationals; 1e-12 absorbs only the final rounding
    for got, want in zip(s.W, W):
        assert abs(Fraction(got) - want) <= Fraction(1, 10**12)
    for got, want in zip(s.H, H):
        assert abs(Fraction(got) - want) <= Fraction(1, 10**12)


@pytest.mark.parametrize("i", range(len(PROBES)))
def test_fixture_matches_literal_transcription(i):
    model = fixture_model()
    oracle = literal_classification(FIXTURE_X, FIXTURE_Y, ["a", "b"], PROBES[i], k=2, e=0.0, b=2, alpha=1.0)
    assert_matches_oracle(score(model, PROBES[i]), oracle)


@pytest.mark.parametrize("params", [dict(alpha=0.5), dict(e=0.5, k=3, b=4, alpha=0.3), dict(b=10)])
def test_fixture_matches_oracle_under_other_settings(params):
    full = {"k": 2, "e": 0.0, "b": 2, "alpha": 1.0, **params}
    model = fixture_model(**params)
    for x in PROBES:
        assert_matches_oracle(score(model, x), literal_classification(FIXTURE_X, FIXTURE_Y, ["a", "b"], x, **full))


def test_literal_options_match_oracle_variants():
    model = fixture_model()
    for x in PROBES:
        plain = literal_classification(FIXTURE_X, FIXTURE_Y, ["a", "b"], x, 2, 0.0, 2, 1.0, unlinked_max=False)
        assert_matches_oracle(score(model, x, literal_unlinked=True), plain)
        signed = literal_classification(FIXTURE_X, FIXTURE_Y, ["a", "b"], x, 2, 0.0, 2, 1.0, absolute=False)
        assert_matches_oracle(score(model, x, signed_differences=True), signed)


def test_fixture_has_probes_linked_to_both_classes():
    # guards the fixture itself: some probes must split their links
    model = fixture_model()
    assert any(min(score(model, x).T) > 0 for x in PROBES)
    assert any(min(score(model, x).T) == 0 for x in PROBES)


def test_differences_cover_every_member():
    model = fixture_model()
    s = score(model, PROBES[5])
    for c, nb in enumerate(s.probe.differences):
        assert len(nb) == len(model.members(c))
        assert np.all(np.diff(nb) >= 0) and np.all(nb >= 0)


# -- fusion ------------------------------------------------------------------

def test_two_class_betweenness_only_example():
    W_norm, _, H = fuse([0.2, 0.6], [1, 1], 1.0)
    assert W_norm == pytest.approx([2 / 3, 1 / 3], abs=1e-15)
    assert H == W_norm


def test_link_only_example_on_a_model():
    X = np.array([[0.0, 0], [0.1, 0], [0, 0.1], [0.1, 0.1], [5, 5], [5.1, 5], [9, 0], [9.1, 0]])
    ds = Dataset(X, [0, 0, 0, 0, 1, 1, 2, 2], ("A", "B", "C"))
    model = build_network(ds, HyperParams(k=3, alpha=0.0))
    s = score(model, [0.05, 0.05])
    assert s.T == [3, 0, 0]
    assert s.H == [1.0, 0.0, 0.0]
    assert s.decided == "A"


@settings(max_examples=200, deadline=None)
@given(st.lists(st.floats(0, 1), min_size=2, max_size=6).flatmap(
    lambda W: st.tuples(st.just(W), st.lists(st.integers(0, 9), min_size=len(W), max_size=len(W)))),
    st.floats(0, 1))
def test_fusion_is_a_distribution(WT, alpha):
    W, T = WT
    W_norm, T_norm, H = fuse(W, T, alpha)
    assert min(H) >= 0
    assert abs(sum(H) - 1) <= 1e-9
    _, _, H1 = fuse(W, T, 1.0)
    _, _, H0 = fuse(W, T, 0.0)
    assert H1 == W_norm and H0 == T_norm


def test_degenerate_normalizers_give_uniform():
    W_norm, T_norm, H = fuse([1.0, 1.0, 1.0], [0, 0, 0], 0.5)
    assert W_norm == T_norm == H == [1 / 3] * 3


def test_tie_breaking():
    assert decide([0.5, 0.5], [1, 3]) == 1
    assert decide([0.5, 0.5], [2, 2]) == 0
    assert decide([0.2, 0.4, 0.4], [9, 1, 1]) == 1


def test_unlinked_class_gets_maximal_difference():
    model = fixture_model()
    for x in PROBES:
        s = score(model, x)
        for w, t in zip(s.W, s.T):
            if t == 0:
                assert w == 1.0


# -- prediction modes --------------------------------------------------------

def iris_model(seed=0, **params):
    ds = load_csv(DATA / "iris.csv")
    train, test = stratified_split(ds, SplitSpec(0.75, seed))
    full = {"k": 7, "e": 0.0, "b": 3, "alpha": 1.0, **params}
    return build_network(train, HyperParams(**full)), test


def test_stateless_is_pure():
    model, test = iris_model()
    digest = structural_hash(model)
    first = [predict(model, x) for x in test.X[:10]]
    second = [predict(model, x) for x in test.X[:10]]
    assert first == second
    assert structural_hash(model) == digest


def test_growth_attaches_to_winner():
    model, test = iris_model()
    before = [len(c.nodes) for c in model.components]
    label = predict(model, test.X[0], mode="growth")
    c = model.class_index(label)
    assert [len(comp.nodes) for comp in model.components] == [n + (i == c) for i, n in enumerate(before)]


def test_first_decision_is_mode_independent():
    for seed in range(3):
        a, test = iris_model(seed)
        b = a.copy()
        assert predict(a, test.X[0]) == predict(b, test.X[0], mode="growth")


def test_stateless_batch_is_map_and_order_invariant():
    model, test = iris_model(1, k=5, e=0.5, b=5, alpha=0.6)
    singles = [predict(model, x) for x in test.X]
    assert predict_batch(model, test.X) == singles
    perm = np.random.default_rng(4).permutation(len(test))
    shuffled = predict_batch(model, test.X[perm])
    assert [shuffled[list(perm).index(i)] for i in range(len(test))] == singles


def test_growth_batch_matches_sequential_predict():
    model, test = iris_model(2)
    clone = model.copy()
    batch = predict_batch(model, test.X, mode="growth")
    assert batch == [predict(clone, x, mode="growth") for x in test.X]
    assert structural_hash(model) == structural_hash(clone)


def test_class_declaration_order_does_not_matter():
    ds = load_csv(DATA / "wine.csv")
    train, test = stratified_split(ds, SplitSpec(0.75, 0))
    order = (2, 0, 1)
    remap = {old: new for new, old in enumerate(order)}
    perm_train = Dataset(train.X, [remap[v] for v in train.y], tuple(train.classes[o] for o in order))
    params = HyperParams(k=8, e=0.5, b=5, alpha=0.4)
    a = build_network(train, params, scale=True)
    b = build_network(perm_train, params, scale=True)
    assert predict_batch(a, test.X) == predict_batch(b, test.X)


def test_mode_and_model_checks():
    model, test = iris_model()
    with pytest.raises(ValueError, match="mode"):
        predict(model, test.X[0], mode="sometimes")
    with pytest.raises(ValueError, match="trained"):
        score(None, test.X[0])
    with pytest.raises(ValueError, match="dimension"):
        score(model, [1.0, 2.0])


def test_scores_are_valid_distributions_on_real_data():
    model, test = iris_model(3, k=5, e=0.5, b=5, alpha=0.5)
    for s in score_batch(model, test.X, mode="growth"):
        assert min(s.H) >= 0 and abs(sum(s.H) - 1) <= 1e-9
        assert s.decided in model.classes


def test_iris_four_one_zero_regime():
    # k=5, e=0.5: a probe whose five nearest neighbors split 4/1/0 by class,
    # which the class holding four of them wins
    ds = load_csv(DATA / "iris.csv")
    train, test = stratified_split(ds, SplitSpec(0.75, 0))
    model = build_network(train, HyperParams(k=5, e=0.5, b=5, alpha=1.0))
    regime = [s for s in (score(model, x) for x in test.X)
              if sorted(s.T) == [0, 1, 4] and not s.probe.used_radius]
    assert regime
    assert any(s.T[s.decided_index] == 4 for s in regime)
    assert all(s.T[s.decided_index] > 0 for s in regime)


def test_zoo_first_split_growth_mode():
    ds = load_csv(DATA / "zoo.csv")
    train, test = stratified_split(ds, SplitSpec(0.75, 0))
    model = build_network(train, HyperParams(k=1, e=0.0, b=1, alpha=1.0))
    assert len(test) == 26
    assert accuracy(predict_batch(model, test.X, mode="growth"), test.labels) == 100.0
