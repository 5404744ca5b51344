import numpy as np
import pytest

from vilenkin import (
    AtomConditionError,
    AtomSpec,
    DomainError,
    MartingaleSequence,
    Point,
    StepFunction,
    character,
    dirichlet,
    hp_norm,
    lp_norm,
    make_atom,
    make_group,
    martingale_from,
    maximal_function,
    random_atom,
    validate_atom,
    walsh,
    weak_lp_functional,
    weak_lp_norm,
)
from vilenkin.experiments import counterexample_function


def weak_oracle(values, p):
    """sup over levels v of v * mu(|f| >= v)^(1/p), trying every attained level."""
    a = np.abs(values)
    return max(v * (np.count_nonzero(a >= v) / a.size) ** (1 / p) for v in a)


def test_lp_indicator():
    g = walsh(4)
    f = StepFunction.indicator(g, Point((0, 0)))
    assert lp_norm(f, 0.5) == pytest.approx(1 / 16)
    for p in (1 / 3, 0.4, 1.0, 2.0):
        assert lp_norm(f, p) == pytest.approx((1 / 4) ** (1 / p))


def test_lp_D4():
    assert lp_norm(dirichlet(walsh(3), 4, 3), 0.5) == pytest.approx(1 / 4)


def test_lp_characters():
    g = make_group([2, 3], 4)
    for n in (0, 1, 5, 17):
        for p in (1 / 3, 1.0, 3.0):
            assert lp_norm(character(g, n, 4), p) == pytest.approx(1.0)


def test_weak_single_level():
    f = dirichlet(walsh(3), 4, 3)
    assert weak_lp_norm(f, 0.5) == pytest.approx(4 * (1 / 4) ** 2)
    assert weak_lp_functional(f, 0.5) == pytest.approx(0.5)


def test_weak_against_level_oracle():
    rng = np.random.default_rng(0)
    g = make_group([2, 3], 4)
    for _ in range(20):
        f = StepFunction(g, 4, rng.standard_normal(g.M[4]))
        for p in (1 / 3, 0.5):
            assert weak_lp_norm(f, p) == pytest.approx(weak_oracle(f.values, p), rel=1e-12)


def test_weak_below_strong():
    rng = np.random.default_rng(1)
    g = walsh(6)
    for _ in range(50):
        f = StepFunction(g, 6, rng.standard_normal(64) * rng.exponential(size=64))
        for p in (1 / 3, 0.5):
            assert weak_lp_norm(f, p) <= lp_norm(f, p) * (1 + 1e-12)


def test_functional_is_power_of_norm():
    f = StepFunction(walsh(3), 3, np.arange(8.0))
    assert weak_lp_functional(f, 0.4) == pytest.approx(weak_lp_norm(f, 0.4) ** 0.4)


def test_bad_exponent():
    with pytest.raises(DomainError):
        lp_norm(StepFunction.constant(walsh(1), 1.0), 0.0)


def test_martingale_constant():
    g = walsh(4)
    mart = martingale_from(StepFunction.constant(g, 2.0, 4))
    assert all(np.allclose(lv.values, 2.0) for lv in mart.levels)
    assert hp_norm(martingale_from(StepFunction.constant(g, 1.0, 3)), 0.3) == pytest.approx(1.0)


def test_martingale_compatible():
    rng = np.random.default_rng(2)
    g = make_group([3, 2], 5)
    mart = martingale_from(StepFunction(g, 5, rng.standard_normal(g.M[5])))
    assert mart.is_compatible()
    for n, lv in enumerate(mart.levels):
        assert lv.rank == n


def test_martingale_levels_of_test_function():
    g = walsh(8)
    f = counterexample_function(g, 3)
    mart = martingale_from(f)
    assert np.allclose(mart.levels[6].values, 0)
    assert mart.levels[7].allclose(f, 1e-12)


def test_maximal_function_dominates_levels():
    rng = np.random.default_rng(3)
    g = walsh(6)
    mart = martingale_from(StepFunction(g, 6, rng.standard_normal(64)))
    fs = maximal_function(mart)
    for lv in mart.levels:
        assert np.all(fs.values >= np.abs(lv.refine(6).values) - 1e-15)
    for p in (1 / 3, 0.5, 1.0):
        assert hp_norm(mart, p) >= lp_norm(mart.top, p) - 1e-15


def test_single_level_martingale():
    g = walsh(2)
    f = StepFunction(g, 0, [-3.0])
    mart = MartingaleSequence((f,))
    assert np.allclose(maximal_function(mart).values, 3.0)


def test_maximal_function_of_test_function():
    g = walsh(8)
    f = counterexample_function(g, 3)
    assert np.allclose(maximal_function(martingale_from(f)).values, np.abs(f.values))
    assert hp_norm(martingale_from(f), 1 / 3) == pytest.approx(64.0 ** (1 - 3), rel=1e-12)


def test_hp_of_test_function_closed_form():
    # |f| = M(m-1) on I_{2n+1}, M on I_{2n} minus I_{2n+1}, 0 elsewhere (M = M_{2n})
    for m in (2, 3, 4):
        g = make_group([m], 5)
        f = counterexample_function(g, 2)
        M = g.M[4]
        for p in (1 / 3, 0.4):
            exact = (M ** (p - 1) * ((m - 1) ** p / m + (m - 1) / m)) ** (1 / p)
            assert hp_norm(martingale_from(f), p) == pytest.approx(exact, rel=1e-12)


def test_atom_plus_minus():
    g = walsh(4)
    cap = 4.0 ** 3
    a = make_atom(g, AtomSpec(Point((0, 0)), (cap, -cap)), 1 / 3)
    assert a.rank == 3 and a.sup() == cap


def test_atom_condition_a():
    with pytest.raises(AtomConditionError) as e:
        make_atom(walsh(4), AtomSpec(Point((0, 0)), (1.0, 1.0)), 1 / 3)
    assert e.value.condition == "a"


def test_atom_condition_b():
    cap = 4.0 ** 3
    with pytest.raises(AtomConditionError) as e:
        make_atom(walsh(4), AtomSpec(Point((0, 0)), (2 * cap, -2 * cap)), 1 / 3)
    assert e.value.condition == "b"


def test_atom_condition_c():
    g = walsh(3)
    vals = np.zeros(8)
    vals[0], vals[1] = 1.0, -1.0
    with pytest.raises(AtomConditionError) as e:
        validate_atom(StepFunction(g, 3, vals), Point((0, 0)), 0.4)
    assert e.value.condition == "c"


@pytest.mark.parametrize("m", [(2,), (2, 3), (3,)])
def test_random_atoms_valid(m):
    g = make_group(m, 7)
    for seed in range(10):
        rng = np.random.default_rng(seed)
        base = Point.from_index(g, seed % g.M[2], 2)
        spec = random_atom(g, base, 0.4, rng, extra_rank=1 + seed % 3)
        a = make_atom(g, spec, 0.4)
        assert a.sup() == pytest.approx(g.M[2] ** (1 / 0.4))
        assert abs(a.integral()) <= 1e-12 * a.sup()


def test_random_atom_needs_refinement():
    with pytest.raises(DomainError):
        random_atom(walsh(4), Point((0,)), 0.4, np.random.default_rng(0), extra_rank=0)
