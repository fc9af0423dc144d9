"""궤적 비교, 언어 피드백, 프롬프트 테스트"""

import numpy as np
import pytest

from vortex.errors import MetricsError
from vortex.feedback.models import Deltas, PromptState, VerbalFeedback
from vortex.feedback.prompt import build_fixed_prompt, render_prompt, update_prompt
from vortex.feedback.reflection import compare, load_templates, render_feedback, total_shift
from vortex.metrics.models import EpisodeMetrics, FeatureDistribution, PreferenceSpec

INCOME = ("income=Low", "income=High")


def _metrics(U, low_share, C=0.1):
    return EpisodeMetrics(
        U=U,
        D=FeatureDistribution([low_share, 1.0 - low_share]),
        C=C,
        coverage={"income": {"Low": low_share, "High": 1.0 - low_share}},
    )


@pytest.fixture
def income_pref():
    return PreferenceSpec(
        "favor income=Low",
        FeatureDistribution([0.75, 0.25]),
        class_labels=INCOME,
        focus=("income", "Low"),
        rho=0.75,
    )


def test_compare_deltas():
    d = compare(_metrics(98.3, 0.275, C=0.3), _metrics(100.0, 0.22, C=0.4))
    assert d.dU == pytest.approx(-1.7)
    assert d.dD == pytest.approx((0.055, -0.055))
    assert sum(d.dD) == pytest.approx(0.0, abs=1e-15)
    assert d.dC == pytest.approx(-0.1)
    assert d.dCoverage["income"]["Low"] == pytest.approx(0.055)
    assert total_shift(d) == pytest.approx(0.11)


def test_compare_dimension_mismatch():
    three = EpisodeMetrics(U=1.0, D=FeatureDistribution([0.2, 0.3, 0.5]), C=0.0)
    with pytest.raises(MetricsError, match="dimension mismatch"):
        compare(three, _metrics(1.0, 0.5))


def test_feedback_for_focused_directive(income_pref):
    prev, curr = _metrics(100.0, 0.22), _metrics(98.3, 0.275)
    fb = render_feedback(compare(curr, prev), income_pref, curr)
    assert fb.text.splitlines() == [
        "Compared to the previous round, reward decreased slightly (-1.7).",
        "Coverage of income=Low increased from 22.0% to 27.5% (+5.5 points).",
        "Increase shaping reward for income=Low (served 27.5%, target 75.0%).",
        "Decrease shaping reward for income=High (served 72.5%, target 25.0%).",
    ]
    assert fb.increase == (0,)
    assert fb.decrease == (1,)


def test_feedback_is_pure(income_pref):
    prev, curr = _metrics(100.0, 0.22), _metrics(98.3, 0.275)
    d = compare(curr, prev)
    assert render_feedback(d, income_pref, curr) == render_feedback(d, income_pref, curr)


def test_substantial_change_qualifier(income_pref):
    prev, curr = _metrics(100.0, 0.5), _metrics(120.0, 0.5)
    text = render_feedback(compare(curr, prev), income_pref, curr).text
    first = text.splitlines()[0]
    assert first == "Compared to the previous round, reward increased substantially (+20.0)."
    assert "Coverage of income=Low is unchanged at 50.0%." in text


def test_small_utilities_use_absolute_scale(income_pref):
    # |U_prev| < 1 이면 분모는 1
    prev, curr = _metrics(0.01, 0.5), _metrics(0.04, 0.5)
    text = render_feedback(compare(curr, prev), income_pref, curr).text
    assert "increased slightly" in text


def test_unchanged_reward_and_aligned_allocation(income_pref):
    m = _metrics(50.0, 0.75)
    fb = render_feedback(compare(m, m), income_pref, m)
    lines = fb.text.splitlines()
    assert lines[0] == "Compared to the previous round, reward is unchanged (50.0)."
    assert lines[-1] == load_templates()["feedback"]["aligned"]
    assert fb.increase == () and fb.decrease == ()


def test_divergence_sentence_without_focus():
    pref = PreferenceSpec("explicit target", FeatureDistribution([0.5, 0.5]), kind="tv")
    prev, curr = _metrics(10.0, 0.9, C=0.4), _metrics(10.0, 0.7, C=0.2)
    text = render_feedback(compare(curr, prev), pref, curr).text
    assert "Preference violation moved from 0.4000 to 0.2000." in text
    assert "Increase shaping reward for class 1" in text


def test_directives_are_capped_and_ranked():
    n = 8
    target = FeatureDistribution(np.full(n, 1.0 / n))
    pref = PreferenceSpec("spread", target)
    D = FeatureDistribution([0.3, 0.2, 0.15, 0.1, 0.1, 0.1, 0.05, 0.0])
    m = EpisodeMetrics(U=1.0, D=D, C=0.2)
    fb = render_feedback(compare(m, m), pref, m)
    assert fb.decrease == (0, 1, 2)
    assert fb.increase == (7, 6, 3)


def test_fixed_prompt_blocks(det_env, half_pref):
    p = build_fixed_prompt(det_env, half_pref, r_max=1.0)
    assert p.fixed.startswith("Task:")
    assert "Context:" in p.fixed
    assert p.closing.startswith("Instruction:")
    assert "Output:" in p.closing
    text = render_prompt(p)
    assert "0: group=A, count 1, target 50.0%" in text
    assert '{"0": 0.0, "1": 0.0}' in text
    assert "[-1.0, 1.0]" in text


def test_update_prompt_appends_and_keeps_fixed():
    p = PromptState(fixed="FIXED")
    deltas = Deltas(dU=0.0, dD=(0.0,), dC=0.0)
    p1 = update_prompt(p, VerbalFeedback(text="first", deltas=deltas))
    p2 = update_prompt(p1, VerbalFeedback(text="second", deltas=deltas))
    assert p.editable == ()
    assert p2.fixed == "FIXED"
    assert p2.entries() == ["first", "second"]
    assert p2.rounds == 2


def test_render_prompt_with_and_without_entries():
    assert render_prompt(PromptState(fixed="F")) == "F\n\nReflection:"
    p = PromptState(fixed="F", editable=("a", "b", "c"))
    assert render_prompt(p) == "F\n\nReflection:\na\nb\nc"
    assert render_prompt(p, max_entries=1) == (
        "F\n\nReflection:\n(2 earlier feedback rounds omitted)\nc"
    )


def test_reflection_sits_between_context_and_instruction(det_env, half_pref):
    deltas = Deltas(dU=0.0, dD=(0.0, 0.0), dC=0.0)
    p = update_prompt(
        build_fixed_prompt(det_env, half_pref), VerbalFeedback(text="note 1", deltas=deltas)
    )
    text = render_prompt(p)
    headers = ["Task:", "Context:", "Reflection:", "note 1", "Instruction:", "Output:"]
    positions = [text.index(h) for h in headers]
    assert positions == sorted(positions)
    assert text.endswith(p.closing)


def test_deltas_dict_round_trip():
    d = Deltas(dU=1.5, dD=(0.1, -0.1), dC=-0.02, dCoverage={"g": {"A": 0.1, "B": -0.1}})
    assert Deltas.from_dict(d.to_dict()) == d
