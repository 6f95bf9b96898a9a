import pytest

from kmroots.worked_examples import CHECKS, run_all


@pytest.mark.parametrize("check", CHECKS, ids=[c.__name__ for c in CHECKS])
def test_worked_example(check):
    res = check()
    assert res.passed, res.to_json()


def test_run_all_order():
    assert [r.name for r in run_all()][:2] == [
        "rank-2 real roots of [[2,-4],[-1,2]]",
        "Fibonacci real roots of [[2,-3],[-3,2]]",
    ]
