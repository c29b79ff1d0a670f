import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.stats import special_ortho_group

from ncs.objectives import (
    BUILTINS,
    NonOrthogonalRotation,
    ObjectiveSpec,
    TransformCountError,
    TransformFileMissing,
    apply_transform,
    evaluate_builtin,
    load_transform_file,
    make_problem,
)

OPTIMA = {
    "sphere": 0.0,
    "rosenbrock": 1.0,
    "ackley": 0.0,
    "rastrigin": 0.0,
    "griewank": 0.0,
    "weierstrass": 0.0,
}


@pytest.mark.parametrize("name", sorted(OPTIMA))
@pytest.mark.parametrize("dim", [1, 2, 10, 30])
def test_builtins_vanish_at_optimum(name, dim):
    if name == "rosenbrock" and dim == 1:
        pytest.skip("rosenbrock needs two coordinates")
    assert abs(evaluate_builtin(name, np.full(dim, OPTIMA[name]))) < 1e-8


def test_schwefel_near_zero_at_published_coordinate():
    assert 0.0 <= evaluate_builtin("schwefel", np.full(30, 420.9687)) < 1e-2


def test_hand_values():
    assert evaluate_builtin("sphere", [1.0, 2.0]) == 5.0
    assert evaluate_builtin("rastrigin", [1.0]) == pytest.approx(1.0)
    assert evaluate_builtin("rosenbrock", [0.0, 0.0]) == pytest.approx(1.0)
    assert evaluate_builtin("griewank", [0.0, 0.0]) == pytest.approx(0.0)


def test_unknown_builtin():
    with pytest.raises(ValueError, match="unknown builtin"):
        evaluate_builtin("himmelblau", [0.0])


def test_batch_matches_rowwise():
    X = np.random.default_rng(0).uniform(-3, 3, size=(7, 5))
    for name in BUILTINS:
        batch = evaluate_builtin(name, X)
        assert np.allclose(batch, [evaluate_builtin(name, x) for x in X], rtol=1e-13)


@settings(max_examples=40, deadline=None)
@given(st.sampled_from(sorted(BUILTINS)), st.integers(2, 6), st.integers(0, 1000))
def test_errors_nonnegative_inside_domain(name, dim, seed):
    p = make_problem(name, dim)
    X = p.lower + np.random.default_rng(seed).random((50, dim)) * p.width
    assert np.all(p.evaluate_batch(X) - p.optimum_value >= -1e-9)


def test_identity_transform_equals_builtin():
    x = np.array([0.3, -1.2, 2.0])
    spec = make_problem("ackley", 3, shift=np.zeros(3), rotation=np.eye(3))
    assert apply_transform(spec, x) == evaluate_builtin("ackley", x)


def test_shift_point_gives_base_at_origin_plus_bias():
    shift = np.array([1.0, -2.0])
    spec = make_problem("rastrigin", 2, shift=shift, f_bias=-330.0)
    assert apply_transform(spec, shift) == pytest.approx(-330.0)
    assert spec.error(apply_transform(spec, shift)) == pytest.approx(0.0)


def test_rotated_sphere_preserves_norm():
    R = special_ortho_group.rvs(6, random_state=4)
    shift = np.linspace(-1, 1, 6)
    spec = make_problem("sphere", 6, shift=shift, rotation=R)
    for x in np.random.default_rng(1).uniform(-50, 50, (20, 6)):
        assert abs(apply_transform(spec, x) - np.sum((x - shift) ** 2)) < 1e-9


def test_spec_validation():
    with pytest.raises(ValueError):
        ObjectiveSpec("bad", 2, [0, 0], [0, 1], base="sphere")
    with pytest.raises(ValueError):
        ObjectiveSpec("bad", 2, [0, -np.inf], [1, 1], base="sphere")
    with pytest.raises(TransformCountError):
        make_problem("sphere", 3, shift=np.zeros(2))
    with pytest.raises(NonOrthogonalRotation):
        make_problem("sphere", 2, rotation=[[1, 1], [0, 1]])
    with pytest.raises(ValueError, match="dimension"):
        apply_transform(make_problem("sphere", 2), np.zeros(3))


def test_load_transform_file(tmp_path):
    f = tmp_path / "t.txt"
    f.write_text("0.5 -1.5\n0 1\n-1 0\n")
    shift, rot = load_transform_file(f, 2)
    assert shift.tolist() == [0.5, -1.5]
    assert rot.shape == (2, 2)


def test_load_transform_file_errors(tmp_path):
    with pytest.raises(TransformFileMissing):
        load_transform_file(tmp_path / "missing.txt", 2)
    short = tmp_path / "short.txt"
    short.write_text("0.5\n1 0\n0 1\n")
    with pytest.raises(TransformCountError):
        load_transform_file(short, 2)
    skew = tmp_path / "skew.txt"
    skew.write_text("0 0\n1 1\n0 1\n")
    with pytest.raises(NonOrthogonalRotation):
        load_transform_file(skew, 2)
    # the three failure kinds are distinct
    assert len({TransformFileMissing, TransformCountError, NonOrthogonalRotation}) == 3
