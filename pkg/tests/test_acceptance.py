"""Acceptance suite at full budget: one pass/fail line per criterion.

Two stated targets are contradicted by the model's own closed forms (the mean
on the line is exactly 1/3, and h grows like R^((d-1)/2)). Those records are
still evaluated at their stated tolerance and are reported as FAIL; the tests
that assert them are strict xfails so the rest of the run stays green.
"""

import pytest

from pvdist import validation as v
from pvdist.typicalexact import McBudget

SEED = 2024

UNATTAINABLE = {
    "exact mean d=1 (closed form)": "closed form gives exactly 1/3, not 0.305",
    "Q_2(R, 0.1) increasing, Q(1000) > 0.999": "h ~ R^((d-1)/2) so Q(1000) is about 0.85",
    "log-log slope of h d=2": "slope is (d-1)/2 = 0.5",
    "log-log slope of h d=3": "slope is (d-1)/2 = 1.0",
}


@pytest.fixture(scope="session")
def suite():
    return v.Suite(samples=100_000, seed=SEED, exact_budget=McBudget(seed=SEED))


_results = {}


@pytest.fixture(scope="session")
def results(suite, acceptance_log):
    def get(check):
        if check not in _results:
            part = check(suite)
            _results[check] = part
            crit = part[0].criterion
            ok = all(r.passed for r in part)
            acceptance_log.append(f"criterion {crit:2d} {'PASS' if ok else 'FAIL'} ({check.__name__})")
            for r in part:
                acceptance_log.append("    " + r.line())
            print(f"criterion {crit} {'PASS' if ok else 'FAIL'}")
        return _results[check]

    return get


@pytest.mark.slow
@pytest.mark.parametrize("check", v.ALL_CHECKS, ids=lambda c: c.__name__)
def test_criterion(check, results):
    part = results(check)
    assert part
    bad = [r.line() for r in part if not r.passed and r.name not in UNATTAINABLE]
    assert not bad, "\n".join(bad)


@pytest.mark.slow
@pytest.mark.parametrize(
    "check,name",
    [
        (v.check_exact_rows, "exact mean d=1 (closed form)"),
        (v.check_limit_shape, "Q_2(R, 0.1) increasing, Q(1000) > 0.999"),
        (v.check_limit_shape, "log-log slope of h d=2"),
        (v.check_limit_shape, "log-log slope of h d=3"),
    ],
    ids=["line-mean-0.305", "Q1000", "slope-d2", "slope-d3"],
)
def test_contradicted_target(check, name, results, request):
    request.applymarker(pytest.mark.xfail(strict=True, reason=UNATTAINABLE[name]))
    (rec,) = [r for r in results(check) if r.name == name]
    assert rec.passed, rec.line()


if __name__ == "__main__":
    v.run_all(v.Suite(seed=SEED, exact_budget=McBudget(seed=SEED)), echo=print)
