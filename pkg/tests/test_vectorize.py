import math

import numpy as np
import pytest

from expertfind.vectorize import (
    MarginConfig,
    expert_probability,
    fit_tfidf,
    load_meta_model,
    save_meta_model,
    train_margin_classifier,
    transform,
)


class TestTfidf:
    def test_classic_idf_ubiquitous_term_zero(self):
        model = fit_tfidf([["a", "b"], ["a", "c"]], idf_mode="classic")
        assert model.idf("a") == 0.0

    def test_single_document_classic_all_zero(self):
        model = fit_tfidf([["x", "y", "z"]], idf_mode="classic")
        assert all(model.idf(t) == 0.0 for t in model.vocabulary)

    def test_smoothed_idf(self):
        model = fit_tfidf([["a", "b"], ["a", "c"]], idf_mode="smoothed")
        assert model.idf("b") == pytest.approx(math.log(3 / 2) + 1)
        assert model.idf("a") == pytest.approx(math.log(3 / 3) + 1)

    def test_vocabulary_dense_indices(self):
        model = fit_tfidf([["b", "a"], ["c", "a"]])
        assert sorted(model.vocabulary.values()) == [0, 1, 2]

    def test_df_bounds(self):
        model = fit_tfidf([["a", "a", "b"], ["a", "c"], ["c"]])
        for t, df in model.document_frequency.items():
            assert 1 <= df <= model.n_documents

    def test_zero_documents_error(self):
        with pytest.raises(ValueError):
            fit_tfidf([])

    def test_transform_all_unseen_zero_vector(self):
        model = fit_tfidf([["a", "b"], ["a", "c"]])
        vec = transform(model, ["zz", "qq"])
        assert vec.indices.size == 0
        assert vec.norm() == 0.0

    def test_transform_classic_hand_example(self):
        model = fit_tfidf([["a", "b"], ["a", "c"]], idf_mode="classic")
        vec = transform(model, ["a", "b"]).to_dense()
        # idf(a) = 0, so only b carries weight; normalized to 1
        assert vec[model.vocabulary["a"]] == 0.0
        assert vec[model.vocabulary["b"]] == pytest.approx(1.0)

    def test_unit_norm_unless_zero(self):
        model = fit_tfidf([["a", "b", "c"], ["a", "d"], ["e", "b"]])
        for doc in (["a", "b"], ["d", "e", "e"], ["a"], ["nope"]):
            vec = transform(model, doc)
            if vec.indices.size:
                assert vec.norm() == pytest.approx(1.0)
            else:
                assert vec.norm() == 0.0

    def test_duplicate_token_doubles_prenorm_weight(self):
        model = fit_tfidf([["a", "b"], ["a", "c"]], idf_mode="smoothed")
        idx_b = model.vocabulary["b"]
        # pre-normalization weights: recompute by hand
        single = 1 * model.idf("b")
        double = 2 * model.idf("b")
        assert double == pytest.approx(2 * single)
        # and post-normalization a doc of only b's stays the unit vector
        vec1 = transform(model, ["b"]).to_dense()
        vec2 = transform(model, ["b", "b"]).to_dense()
        assert vec1[idx_b] == pytest.approx(vec2[idx_b]) == pytest.approx(1.0)


def _separable_fixture():
    """20 docs over two disjoint vocabularies."""
    pos_docs = [["alpha", "beta", f"p{i % 4}"] for i in range(10)]
    neg_docs = [["gamma", "delta", f"n{i % 4}"] for i in range(10)]
    docs = pos_docs + neg_docs
    labels = [1] * 10 + [0] * 10
    model = fit_tfidf(docs)
    vectors = [transform(model, d) for d in docs]
    return model, vectors, labels


class TestMarginClassifier:
    def test_separable_training_accuracy(self):
        _, vectors, labels = _separable_fixture()
        margin = train_margin_classifier(vectors, labels, MarginConfig(seed=3))
        preds = [1 if margin.decision(v) > 0 else 0 for v in vectors]
        assert preds == labels

    def test_flipped_labels_negate_weights(self):
        _, vectors, labels = _separable_fixture()
        cfg = MarginConfig(seed=3)
        m1 = train_margin_classifier(vectors, labels, cfg)
        m2 = train_margin_classifier(vectors, [1 - y for y in labels], cfg)
        np.testing.assert_allclose(m2.weights, -m1.weights, atol=1e-9)
        assert m2.bias == pytest.approx(-m1.bias, abs=1e-9)

    def test_deterministic(self):
        _, vectors, labels = _separable_fixture()
        cfg = MarginConfig(seed=11)
        m1 = train_margin_classifier(vectors, labels, cfg)
        m2 = train_margin_classifier(vectors, labels, cfg)
        np.testing.assert_array_equal(m1.weights, m2.weights)
        assert m1.calibration == m2.calibration

    def test_single_class_error(self):
        _, vectors, _ = _separable_fixture()
        with pytest.raises(ValueError):
            train_margin_classifier(vectors, [1] * len(vectors))


class TestExpertProbability:
    def test_sigmoid_midpoint(self):
        _, vectors, labels = _separable_fixture()
        m = train_margin_classifier(vectors, labels)
        m.calibration = (1.0, 0.0)
        m.weights = np.zeros_like(m.weights)
        m.bias = 0.0
        assert expert_probability(m, vectors[0]) == 0.5

    def test_separable_positives_confident(self):
        _, vectors, labels = _separable_fixture()
        m = train_margin_classifier(vectors, labels)
        for v, y in zip(vectors, labels):
            p = expert_probability(m, v)
            assert 0.0 <= p <= 1.0
            if y == 1:
                assert p > 0.9
            else:
                assert p < 0.1

    def test_monotone_in_decision(self):
        _, vectors, labels = _separable_fixture()
        m = train_margin_classifier(vectors, labels)
        pairs = sorted((m.decision(v), expert_probability(m, v)) for v in vectors)
        probs = [p for _, p in pairs]
        assert all(b >= a for a, b in zip(probs, probs[1:]))


class TestPersistence:
    def test_round_trip(self, tmp_path):
        tfidf, vectors, labels = _separable_fixture()
        margin = train_margin_classifier(vectors, labels, MarginConfig(seed=5))
        path = tmp_path / "meta.json"
        save_meta_model(path, tfidf, margin)
        tf2, mg2 = load_meta_model(path)
        assert tf2.vocabulary == tfidf.vocabulary
        assert tf2.document_frequency == tfidf.document_frequency
        assert tf2.idf_mode == tfidf.idf_mode
        np.testing.assert_array_equal(mg2.weights, margin.weights)
        assert mg2.calibration == margin.calibration
        doc = ["alpha", "beta"]
        assert expert_probability(mg2, transform(tf2, doc)) == pytest.approx(
            expert_probability(margin, transform(tfidf, doc))
        )

    def test_rejects_foreign_file(self, tmp_path):
        path = tmp_path / "other.json"
        path.write_text('{"format": "something-else"}')
        with pytest.raises(ValueError):
            load_meta_model(path)
