from __future__ import annotations

import pytest
from hypothesis import given, strategies as st

from procshap.diagnostics import (
    PERSPECTIVES,
    DiagnosticsConfig,
    adaptive_nodes,
    classify,
    jaccard,
    noise_correlation,
    quality_perspectives,
    summarize_attributions,
    top_k,
)
from procshap.process_tree import activity, assign_node_ids, seq, xor


def test_classify_thresholds():
    values = {"x": 0.15, "y": 0.005, "z": 0.05}
    out = classify(values, DiagnosticsConfig(0.1, 0.01))
    assert out.classes["x"].label == "critical"
    assert out.classes["y"].label == "redundant"
    assert out.classes["z"].label == "neutral"


def test_classify_all_zero_is_redundant():
    out = classify({"a": 0.0, "b": 0.0})
    assert all(c.label == "redundant" for c in out.classes.values())


def test_classify_negative_critical_is_harmful():
    out = classify({"x": -0.12}, DiagnosticsConfig(0.1, 0.01))
    cls = out.classes["x"]
    assert cls.label == "critical" and cls.sign == "negative" and cls.harmful


def test_classify_negative_redundant_not_harmful():
    out = classify({"x": -0.001}, DiagnosticsConfig(0.1, 0.01))
    assert not out.classes["x"].harmful


def test_classification_partitions():
    values = {f"n{i}": (i - 5) / 10 for i in range(11)}
    out = classify(values)
    assert sum(out.counts().values()) == len(values)


def test_config_validation():
    with pytest.raises(ValueError):
        DiagnosticsConfig(critical_threshold=0.01, redundant_threshold=0.1)
    with pytest.raises(ValueError):
        DiagnosticsConfig(top_k=0)


def test_top_k_basic():
    assert top_k({"a": 0.3, "b": 0.1, "c": 0.2}, 2) == ["a", "c"]


def test_top_k_tie_breaks_by_index():
    values = {"b@2": 0.2, "a@1": 0.2, "c@3": 0.1}
    assert top_k(values, 2) == ["a@1", "b@2"]


def test_top_k_clamps():
    assert top_k({"a": 1.0}, 5) == ["a"]


def test_top_k_uses_magnitude():
    assert top_k({"a": -0.5, "b": 0.3}, 1) == ["a"]


def test_jaccard_examples():
    assert jaccard({"a", "b", "c"}, {"a", "b", "d"}) == 0.5
    assert jaccard({"a"}, {"a"}) == 1.0
    assert jaccard({"a"}, {"b"}) == 0.0
    assert jaccard(set(), set()) == 1.0


@given(
    st.sets(st.integers(0, 20)),
    st.sets(st.integers(0, 20)),
)
def test_jaccard_properties(a, b):
    j = jaccard(a, b)
    assert 0.0 <= j <= 1.0
    assert j == jaccard(b, a)
    assert (j == 1.0) == (a == b)


def test_noise_correlation_collinear():
    corr = noise_correlation([(0, 0), (0.25, 0.1), (0.5, 0.2), (1.0, 0.4)])
    assert corr.r == pytest.approx(1.0)
    assert not corr.zero_variance


def test_noise_correlation_zero_variance():
    corr = noise_correlation([(0, 0.3), (0.5, 0.3), (1.0, 0.3)])
    assert corr.r == 0.0 and corr.zero_variance


def test_noise_correlation_needs_two_points():
    with pytest.raises(ValueError):
        noise_correlation([(0, 1)])


def test_noise_correlation_affine_invariance():
    points = [(0.0, 0.1), (0.25, 0.3), (0.5, 0.2), (1.0, 0.5)]
    scaled = [(x, 3.0 * y + 1.0) for x, y in points]
    assert noise_correlation(points).r == pytest.approx(noise_correlation(scaled).r)


def test_summarize_attributions():
    tree = assign_node_ids(seq(activity("a"), activity("b")))
    values = {"Seq2@0": 0.2, "a@1": -0.1, "b@2": 0.0}
    out = summarize_attributions(values, tree)
    assert out["positive_sum"] == pytest.approx(0.2)
    assert out["negative_sum"] == pytest.approx(-0.1)
    assert out["counts"] == {"positive": 1, "negative": 1, "zero": 1}
    assert out["mean_abs_phi_by_kind"]["Seq"] == pytest.approx(0.2)
    assert out["mean_abs_phi_by_kind"]["leaf"] == pytest.approx(0.05)


def test_summarize_operator_dominance():
    tree = assign_node_ids(seq(activity("a"), xor(activity("b"), activity("c"))))
    values = {"Seq2@0": 0.4, "a@1": 0.0, "Xor2@2": 0.0, "b@3": 0.0, "c@4": 0.0}
    out = summarize_attributions(values, tree)
    dominant = max(out["mean_abs_phi_by_kind"], key=out["mean_abs_phi_by_kind"].get)
    assert dominant == "Seq"


def test_adaptive_sign_change():
    per_noise = {0.0: {"x": 0.2}, 0.5: {"x": -0.05}}
    out = adaptive_nodes(per_noise, 0.0)
    assert len(out) == 1 and "sign change" in out[0]["reason"]


def test_adaptive_constant_not_flagged():
    per_noise = {0.0: {"x": 0.2}, 0.5: {"x": 0.2}, 1.0: {"x": 0.2}}
    assert adaptive_nodes(per_noise, 0.0) == []


def test_adaptive_magnitude_rule():
    per_noise = {0.0: {"x": 0.10}, 0.5: {"x": 0.16}}
    out = adaptive_nodes(per_noise, 0.0, DiagnosticsConfig(adaptive_magnitude=0.05))
    assert len(out) == 1 and "magnitude" in out[0]["reason"]
    out = adaptive_nodes(per_noise, 0.0, DiagnosticsConfig(adaptive_magnitude=0.1))
    assert out == []


def test_adaptive_requires_baseline():
    with pytest.raises(ValueError):
        adaptive_nodes({0.5: {"x": 1.0}}, 0.0)


def test_quality_perspectives_hand_checkable():
    values = {
        "a": 0.25,  # critical everywhere
        "b": 0.07,  # critical only under high sensitivity
        "c": 0.015, # neutral under standard/high, redundant under low? no: 0.015 < 0.02
        "d": 0.004, # redundant everywhere
    }
    out = quality_perspectives(values)
    assert out["standard"]["counts"] == {"critical": 1, "neutral": 2, "redundant": 1}
    assert out["high_sensitivity"]["counts"] == {
        "critical": 2,
        "neutral": 1,
        "redundant": 1,
    }
    assert out["low_sensitivity"]["counts"] == {
        "critical": 1,
        "neutral": 1,
        "redundant": 2,
    }
    for name, perspective in out.items():
        assert sum(perspective["counts"].values()) == len(values)
        assert sum(perspective["percentages"].values()) == pytest.approx(100.0)


def test_quality_perspectives_all_zero():
    out = quality_perspectives({"a": 0.0, "b": 0.0})
    for perspective in out.values():
        assert perspective["counts"]["redundant"] == 2
        assert perspective["percentages"]["redundant"] == pytest.approx(100.0)


def test_perspective_thresholds():
    assert PERSPECTIVES == (
        ("standard", 0.1, 0.01),
        ("high_sensitivity", 0.05, 0.005),
        ("low_sensitivity", 0.2, 0.02),
    )


@given(st.dictionaries(st.text(min_size=1, max_size=4),
                       st.floats(-1, 1, allow_nan=False), max_size=12))
def test_critical_sets_nest_across_perspectives(values):
    out = quality_perspectives(values)

    def critical_set(name):
        cfg = DiagnosticsConfig(*[p for p in PERSPECTIVES if p[0] == name][0][1:3])
        return {
            k for k, c in classify(values, cfg).classes.items() if c.label == "critical"
        }

    low = critical_set("low_sensitivity")
    std = critical_set("standard")
    high = critical_set("high_sensitivity")
    assert low <= std <= high
    for perspective in out.values():
        assert sum(perspective["counts"].values()) == len(values)
