import pytest
from pydantic import ValidationError

from src.core.errors import ParameterError
from src.core.params import (
    ProblemParams,
    RegimeTag,
    RegularFlag,
    classify_regime,
    critical_exponents,
    is_critical,
)


def test_critical_exponents_reference(reference_params):
    p_star, p_star_star = critical_exponents(reference_params)
    assert p_star == pytest.approx(4.0)
    assert p_star_star == pytest.approx(7.0)


@pytest.mark.parametrize(
    'N, k, expected',
    [
        (4, 2.0, (3.0, 5.0)),
        (4, 1.5, (6.0, 11.0)),
    ],
)
def test_critical_exponents_other_dimensions(N, k, expected):
    assert critical_exponents(ProblemParams(N=N, k=k, p=2.0)) == pytest.approx(expected)


def test_critical_exponents_need_k_above_one():
    with pytest.raises(ParameterError):
        critical_exponents(ProblemParams(N=3, k=0.5, p=2.0))


@pytest.mark.parametrize(
    'p, tag, regular',
    [
        (2.0, RegimeTag.NONEXISTENCE_SUBCRITICAL, RegularFlag.NO_REGULAR),
        (4.0, RegimeTag.CRITICAL_P_STAR_NO_LP_SOLUTION, RegularFlag.NO_REGULAR),
        (5.5, RegimeTag.EXISTENCE_SUPERCRITICAL, RegularFlag.NO_REGULAR),
        (7.0, RegimeTag.EXISTENCE_SUPERCRITICAL, RegularFlag.REGULAR_CRITICAL_BUBBLES),
        (9.0, RegimeTag.EXISTENCE_SUPERCRITICAL, RegularFlag.REGULAR_EXISTS),
    ],
)
def test_classify_regime(p, tag, regular):
    regime = classify_regime(ProblemParams(N=3, k=1.5, p=p))
    assert regime.tag == tag
    assert regime.regular == regular
    assert regime.vacuous == (tag != RegimeTag.EXISTENCE_SUPERCRITICAL)


def test_small_k_has_no_regular_flag():
    regime = classify_regime(ProblemParams(N=3, k=1.0, p=3.0))
    assert regime.tag == RegimeTag.NONEXISTENCE_K_SMALL
    assert regime.regular is None
    assert regime.label() == 'NonexistenceKSmall'


def test_regime_label_joins_flag():
    regime = classify_regime(ProblemParams(N=3, k=1.5, p=7.0))
    assert regime.label() == 'ExistenceSupercritical+RegularCriticalBubbles'


def test_is_critical_uses_relative_tolerance():
    assert is_critical(4.0 * (1 + 1e-13), 4.0)
    assert not is_critical(4.0 * (1 + 1e-9), 4.0)


@pytest.mark.parametrize(
    'kwargs, fragment',
    [
        ({'N': 2, 'k': 0.5, 'p': 2.0}, 'N >= 3'),
        ({'N': 3, 'k': 2.0, 'p': 2.0}, 'k < N - 1'),
        ({'N': 3, 'k': 1.5, 'p': 0.0}, 'p > 0'),
        ({'N': 3, 'k': 1.5, 'p': 2.0, 'lam': -1.0}, 'lambda >= 0'),
    ],
)
def test_params_window(kwargs, fragment):
    with pytest.raises(ValidationError, match=fragment):
        ProblemParams(**kwargs)


def test_lambda_alias_and_zero_coupling():
    params = ProblemParams.model_validate({'N': 3, 'k': 1.5, 'p': 5.5, 'lambda': 0.0})
    assert params.lam == 0.0
    assert params.with_lambda(2.0).lam == 2.0
    assert params.d == 2


def test_coupling_defaults_to_one():
    assert ProblemParams(N=3, k=1.5, p=5.5).lam == 1.0
