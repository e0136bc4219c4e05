import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from crowdcap.model import (
    FilterKind,
    FilterPolicy,
    Form,
    ITStructure,
    KnowledgeBase,
    ValidationError,
    is_complete,
    make_agent,
    make_task,
)

anything = st.one_of(
    st.floats(allow_nan=True, allow_infinity=True),
    st.integers(min_value=-5, max_value=5),
)


def test_make_agent_boundaries():
    a = make_agent(0, 1.0, 1.0)
    assert (a.id, a.motivation, a.success_rate, a.attempts_made) == (0, 1.0, 1.0, 0)
    b = make_agent(1, 0.0, 0.5)
    assert b.motivation == 0.0


def test_make_agent_rejects_motivation():
    with pytest.raises(ValidationError, match="motivation out of range") as e:
        make_agent(2, 1.5, 0.5)
    assert e.value.field == "motivation"


def test_make_agent_rejects_success_rate():
    with pytest.raises(ValidationError) as e:
        make_agent(0, 0.5, -0.1)
    assert e.value.field == "success_rate"


def test_make_task():
    t = make_task(0, 0.0, 1.0)
    assert (t.completion, t.attempts, t.cost) == (0.0, 0, 1.0)
    assert make_task(2, 0.5, 0.0).cost == 0.0
    with pytest.raises(ValidationError, match="difficulty out of range"):
        make_task(1, 1.0, 1.0)


@pytest.mark.parametrize("cost", [-1.0, math.nan, math.inf])
def test_make_task_rejects_cost(cost):
    with pytest.raises(ValidationError) as e:
        make_task(0, 0.1, cost)
    assert e.value.field == "cost"


@given(anything, anything)
def test_agent_constructor_accepts_exactly_the_unit_square(m, s):
    ok = 0.0 <= m <= 1.0 and 0.0 <= s <= 1.0
    if ok:
        a = make_agent(3, m, s)
        assert 0.0 <= a.motivation <= 1.0 and 0.0 <= a.success_rate <= 1.0
    else:
        with pytest.raises(ValidationError):
            make_agent(3, m, s)


@given(anything, anything)
def test_task_constructor_domain(d, c):
    ok = 0.0 <= d < 1.0 and 0.0 <= c < math.inf
    if ok:
        t = make_task(0, d, c)
        assert 0.0 <= t.difficulty < 1.0 and t.cost >= 0.0 and t.completion == 0.0
    else:
        with pytest.raises(ValidationError):
            make_task(0, d, c)


@pytest.mark.parametrize(
    "completion,theta,expected",
    [(1.0, 1.0, True), (0.0, 0.5, False), (0.8, 0.8, True), (0.79, 0.8, False)],
)
def test_is_complete(completion, theta, expected):
    t = make_task(0, 0.0, 1.0)
    t.completion = completion
    assert is_complete(t, theta) is expected


@given(st.floats(0, 1), st.floats(0, 1), st.floats(0.001, 1))
def test_is_complete_monotone(a, b, theta):
    lo, hi = sorted((a, b))
    t_lo, t_hi = make_task(0, 0, 0), make_task(1, 0, 0)
    t_lo.completion, t_hi.completion = lo, hi
    if is_complete(t_lo, theta):
        assert is_complete(t_hi, theta)


def test_filter_policy_threshold_presence():
    assert FilterPolicy.threshold_at(0.5).threshold == 0.5
    with pytest.raises(ValidationError):
        FilterPolicy(FilterKind.THRESHOLD)
    with pytest.raises(ValidationError):
        FilterPolicy(FilterKind.BEST_PER_TASK, 0.3)
    with pytest.raises(ValidationError):
        FilterPolicy.threshold_at(1.5)


def test_it_structure_checks():
    tasks = [make_task(0, 0, 1), make_task(1, 0, 1)]
    it = ITStructure(Form.EPISODIC, tasks, update_period=2, completion_threshold=0.5)
    assert it.form is Form.EPISODIC and it.submission_buffer == [] and it.open_tasks == 2
    with pytest.raises(AttributeError):
        it.form = Form.COLLABORATIVE
    with pytest.raises(ValidationError):
        ITStructure(Form.EPISODIC, [make_task(1, 0, 1)])
    with pytest.raises(ValidationError):
        ITStructure(Form.EPISODIC, tasks, completion_threshold=0.0)
    with pytest.raises(ValidationError):
        ITStructure(Form.EPISODIC, tasks, update_period=0)


def test_knowledge_base_starts_empty():
    kb = KnowledgeBase()
    assert (kb.total_submissions, kb.accepted_submissions, kb.completed_submissions) == (0, 0, 0)
    assert kb.tasks_completed == 0 and kb.total_cost == 0.0
