"""Schema validation, preset registry, and mutation behavior."""

import numpy as np
import pytest

import ivpsuite as ivp
from ivpsuite.core import CONSTRAINT_TAGS, validate_parameters


# one passing and one failing value for every registered constraint tag
TAG_CASES = {
    "scalar": (5.0, np.array([1.0, 1.0])),
    "vector": (np.array([1.0, 2.0]), 5.0),
    "matrix": (np.eye(2), np.array([1.0])),
    "nonnegative": (0.0, -1.0),
    "positive": (1.0, 0.0),
    "finite": (1.0, np.inf),
    "integer": (3, 2.5),
    "function": (lambda t: t, 3.0),
}


def test_every_tag_has_pass_and_fail_case():
    assert set(TAG_CASES) == set(CONSTRAINT_TAGS)


@pytest.mark.parametrize("tag", sorted(CONSTRAINT_TAGS))
def test_constraint_tags(tag):
    good, bad = TAG_CASES[tag]
    assert CONSTRAINT_TAGS[tag](good)
    assert not CONSTRAINT_TAGS[tag](bad)


def test_validate_ok():
    validate_parameters({"sigma": 10}, {"sigma": ("scalar", "nonnegative")})


def test_validate_reports_first_failing_constraint():
    with pytest.raises(ivp.ValidationError) as err:
        validate_parameters({"rho": -1}, {"rho": ("scalar", "nonnegative")})
    assert str(err.value) == "The field rho does not satisfy nonnegative"
    assert err.value.field == "rho"
    assert err.value.constraint == "nonnegative"


def test_validate_nonfinite():
    with pytest.raises(ivp.ValidationError) as err:
        validate_parameters({"beta": np.inf}, {"beta": ("scalar", "finite")})
    assert str(err.value) == "The field beta does not satisfy finite"


def test_validate_unknown_field():
    with pytest.raises(ivp.UnknownField):
        validate_parameters({"zeta": 1.0}, {"sigma": ("scalar",)})


def test_build_preset_lorenz96_canonical():
    problem = ivp.build_preset("lorenz96", "Canonical", {})
    assert problem.num_vars == 40


def test_build_preset_validation_messages():
    with pytest.raises(ivp.ValidationError) as err:
        ivp.build_preset("lorenz63", "Canonical", {"rho": -1})
    assert "The field rho does not satisfy nonnegative" in str(err.value)
    with pytest.raises(ivp.ValidationError) as err:
        ivp.build_preset("lorenz63", "Canonical", {"rho": np.array([1.0, 1.0])})
    assert "The field rho does not satisfy scalar" in str(err.value)


def test_unknown_family_and_preset():
    with pytest.raises(ivp.UnknownFamily):
        ivp.build_preset("nosuch", "Canonical")
    with pytest.raises(ivp.UnknownPreset):
        ivp.build_preset("lorenz63", "NoSuchPreset")
    with pytest.raises(ivp.UnknownField):
        ivp.build_preset("lorenz63", "Canonical", {"zeta": 1.0})


def test_mutation_success_changes_rhs():
    problem = ivp.build_preset("lorenz63")
    sigma = problem.parameters.sigma
    before = problem.rhs.f(0.0, problem.y0)
    problem.parameters.sigma = sigma + np.sqrt(np.spacing(sigma))
    after = problem.rhs.f(0.0, problem.y0)
    assert not np.array_equal(before, after)


def test_mutation_failure_leaves_problem_unchanged():
    problem = ivp.build_preset("lorenz63")
    with pytest.raises(ivp.ValidationError) as err:
        problem.parameters.rho = np.array([1.0, 1.0])
    assert "does not satisfy scalar" in str(err.value)
    assert problem.parameters.rho == 28.0
    with pytest.raises(ivp.ValidationError):
        problem.set_parameter("rho", -1)
    assert problem.parameters.rho == 28.0


def test_mutation_unknown_field():
    problem = ivp.build_preset("lorenz63")
    with pytest.raises(ivp.UnknownField):
        problem.set_parameter("gamma", 1.0)


def test_mutate_parameter_alias():
    problem = ivp.build_preset("lorenz63")
    out = ivp.mutate_parameter(problem, "sigma", 11.0)
    assert out is problem
    assert problem.parameters.sigma == 11.0


def test_qgso_solver_swap_rebuilds(qgso_small):
    problem = qgso_small
    y = problem.y0
    f_direct = problem.rhs.f(0.0, y)
    assert problem.extras["helmholtz"].method == "cholesky"
    problem.parameters.linearsolver = "multigrid"
    assert problem.extras["helmholtz"].method == "multigrid"
    f_mg = problem.rhs.f(0.0, y)
    # same state and span survive the rebuild; solutions agree to the
    # iterative tolerance but are not the same bits
    assert np.allclose(f_mg, f_direct, rtol=1e-6, atol=1e-9)
    assert not np.array_equal(f_mg, f_direct)


def test_y0_and_time_span_mutation_guarded():
    problem = ivp.build_preset("lorenz63")
    problem.y0 = [1.0, 2.0, 3.0]
    assert np.array_equal(problem.y0, [1.0, 2.0, 3.0])
    with pytest.raises(ivp.DimensionMismatch):
        problem.y0 = [1.0, 2.0]
    with pytest.raises(ivp.ValidationError):
        problem.time_span = (2.0, 1.0)
    problem.time_span = (0.0, 10.0)
    assert problem.time_span == (0.0, 10.0)


def test_preset_determinism_bitwise():
    rng = np.random.default_rng(11)
    for family, preset in [
        ("lorenz63", "Canonical"),
        ("lorenz96", "Canonical"),
        ("brusselator", "Canonical"),
        ("bouncingball", "RandomTerrain"),
    ]:
        p1 = ivp.build_preset(family, preset)
        p2 = ivp.build_preset(family, preset)
        t0, tf = p1.time_span
        for _ in range(100):
            t = rng.uniform(t0, tf)
            y = rng.standard_normal(p1.num_vars)
            assert np.array_equal(p1.rhs.f(t, y), p2.rhs.f(t, y))


def test_partition_consistency_all_families():
    rng = np.random.default_rng(5)
    eps = np.finfo(float).eps
    for family in ivp.list_families():
        overrides = {}
        if family.name == "grayscott":
            overrides = {"nx": 8, "ny": 8}
        problem = family.build("Canonical", overrides)
        if problem.rhs.partitions is None:
            continue
        t0, tf = problem.time_span
        for _ in range(100):
            t = rng.uniform(t0, tf)
            y = problem.y0 + rng.standard_normal(problem.num_vars)
            full = problem.rhs.f(t, y)
            total = sum(p.f(t, y) for p in problem.rhs.partitions.values())
            assert np.all(
                np.abs(total - full) <= 8.0 * eps * np.maximum(np.abs(full), 1e-30)
                + 8.0 * eps * np.max(np.abs(full))
            )


def test_jvp_javp_match_jacobian_products():
    rng = np.random.default_rng(17)
    problem = ivp.build_preset("bpe", "Canonical", {"nx": 15})
    t0, tf = problem.time_span
    worst = 0.0
    for _ in range(20):
        t = rng.uniform(t0, tf)
        y = rng.uniform(-0.5, 0.5, problem.num_vars)
        v = rng.standard_normal(problem.num_vars)
        jac = problem.rhs.jacobian(t, y)
        jv = problem.rhs.jvp(t, y, v)
        ja = problem.rhs.javp(t, y, v)
        scale = max(np.linalg.norm(jac @ v), 1e-30)
        worst = max(worst, np.linalg.norm(jv - jac @ v) / scale)
        scale = max(np.linalg.norm(jac.T @ v), 1e-30)
        worst = max(worst, np.linalg.norm(ja - jac.T @ v) / scale)
    assert worst <= 1e-12


def test_validation_happens_before_rebuild():
    problem = ivp.build_preset("qgso", "GC", {"nx": 21})
    with pytest.raises(ivp.ValidationError) as err:
        problem.parameters.linearsolver = "multigrid"  # 21 is not 2^k - 1
    assert "does not satisfy" in str(err.value)
    assert problem.parameters.linearsolver == "cholesky"
