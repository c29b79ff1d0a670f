import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ncs.antenna import (
    NO_SIDELOBE_DB,
    POSITION_ONLY,
    POSITION_PHASE,
    AngleGrid,
    ArrayLayout,
    DegenerateLayoutError,
    GridConfigError,
    SusaaEncoding,
    array_factor,
    decode_layout,
    encode_layout,
    genome_bounds,
    mainlobe_region,
    psll_db,
    radiation_pattern_db,
    susaa_objective,
    uniform_layout,
)


def brute_psll(layout, step=0.2):
    """Reference PSLL from an explicit element-by-element sum."""
    theta = np.round(np.arange(-90.0, 90.0 + step / 2, step), 10)
    af = np.empty(theta.size)
    for k, t in enumerate(theta):
        s = np.sin(np.radians(t))
        tot = 0j
        for x, ph in zip(layout.positions, layout.phases):
            tot += complex(np.cos(2 * np.pi * x * s + ph), np.sin(2 * np.pi * x * s + ph))
        af[k] = abs(tot)
    i0 = int(np.argmin(np.abs(theta)))
    r = i0
    while r + 1 < af.size and af[r + 1] <= af[r]:
        r += 1
    l = i0
    while l > 0 and af[l - 1] <= af[l]:
        l -= 1
    side = np.concatenate([af[: l + 1], af[r:]])
    return 20 * np.log10(side.max() / af[i0])


def random_genome(enc, rng):
    lo, hi = genome_bounds(enc)
    return lo + rng.uniform(size=lo.size) * (hi - lo)


def test_decode_odd_example():
    lay = decode_layout(SusaaEncoding(POSITION_ONLY, 5), [0.5, 0.75])
    assert lay.positions.tolist() == [-1.25, -0.5, 0.0, 0.5, 1.25]
    assert lay.phases.tolist() == [0.0] * 5


def test_decode_even_with_phases():
    lay = decode_layout(SusaaEncoding(POSITION_PHASE, 4), [0.25, 0.5, 0.1, 0.2])
    assert lay.positions.tolist() == [-0.75, -0.25, 0.25, 0.75]
    assert lay.phases.tolist() == [0.2, 0.1, 0.1, 0.2]
    assert lay.is_symmetric()


def test_decode_rejects_out_of_bounds():
    with pytest.raises(ValueError):
        decode_layout(SusaaEncoding(POSITION_ONLY, 5), [0.4, 0.75])


@pytest.mark.parametrize("m,mode,dim", [(37, POSITION_ONLY, 18), (32, POSITION_PHASE, 32), (36, POSITION_ONLY, 18)])
def test_genome_dimension(m, mode, dim):
    assert SusaaEncoding(mode, m).dim == dim
    assert genome_bounds(SusaaEncoding(mode, m))[0].size == dim


def test_even_centre_gap_in_spacing_range():
    enc = SusaaEncoding(POSITION_ONLY, 10)
    lo, hi = genome_bounds(enc)
    for g in (lo, hi):
        lay = decode_layout(enc, g)
        gaps = lay.spacings()
        assert np.all(gaps >= 0.5 - 1e-12) and np.all(gaps <= 1.0 + 1e-12)


@pytest.mark.parametrize("m,mode", [(7, POSITION_ONLY), (8, POSITION_PHASE), (37, POSITION_ONLY)])
def test_encode_decode_round_trip(m, mode):
    enc = SusaaEncoding(mode, m)
    g = random_genome(enc, np.random.default_rng(m))
    back = encode_layout(decode_layout(enc, g), mode)
    assert np.allclose(back.genome, g, atol=1e-12)


def test_array_factor_examples():
    two = ArrayLayout([-0.25, 0.25], [0.0, 0.0])
    assert array_factor(two, 0.0) == pytest.approx(2.0)
    assert array_factor(two, 90.0) == pytest.approx(0.0, abs=1e-12)
    assert array_factor(two, 30.0) == pytest.approx(2 * np.cos(np.pi / 4))


def test_array_factor_even_in_theta():
    enc = SusaaEncoding(POSITION_PHASE, 9)
    lay = decode_layout(enc, random_genome(enc, np.random.default_rng(0)))
    th = np.linspace(0, 90, 91)
    assert np.allclose(array_factor(lay, th), array_factor(lay, -th), atol=1e-10)


def test_uniform_32_element_sidelobe():
    got = psll_db(uniform_layout(32))
    assert -13.5 <= got <= -12.9
    assert got == pytest.approx(brute_psll(uniform_layout(32)), abs=1e-9)


@settings(max_examples=30, deadline=None)
@given(st.floats(-10, 10))
def test_global_phase_offset_invariance(offset):
    enc = SusaaEncoding(POSITION_PHASE, 10)
    lay = decode_layout(enc, random_genome(enc, np.random.default_rng(1)))
    shifted = ArrayLayout(lay.positions, lay.phases + offset)
    assert abs(psll_db(shifted) - psll_db(lay)) <= 1e-12


def test_wavelength_scaling_invariance():
    enc = SusaaEncoding(POSITION_ONLY, 11)
    g = random_genome(enc, np.random.default_rng(4))
    assert psll_db(decode_layout(enc, g, 2.5)) == pytest.approx(psll_db(decode_layout(enc, g)), abs=1e-10)


@pytest.mark.parametrize("seed", range(5))
def test_psll_matches_brute_force(seed):
    rng = np.random.default_rng(seed)
    enc = SusaaEncoding([POSITION_ONLY, POSITION_PHASE][seed % 2], 7 + seed)
    lay = decode_layout(enc, random_genome(enc, rng))
    assert psll_db(lay) == pytest.approx(brute_psll(lay), abs=1e-9)


@pytest.mark.parametrize("m,mode", [(37, POSITION_ONLY), (32, POSITION_PHASE), (12, POSITION_ONLY), (9, POSITION_PHASE)])
def test_batch_objective_matches_reference(m, mode):
    obj = susaa_objective(mode, m)
    enc = SusaaEncoding(mode, m)
    rng = np.random.default_rng(m)
    G = np.array([random_genome(enc, rng) for _ in range(20)])
    fast = obj.evaluate_batch(G)
    ref = [psll_db(decode_layout(enc, g)) for g in G]
    assert np.allclose(fast, ref, atol=1e-9, rtol=0)


def test_mainlobe_without_minimum_scores_penalty():
    obj = susaa_objective(POSITION_ONLY, 2)
    assert obj.evaluate([0.25]) == NO_SIDELOBE_DB
    with pytest.raises(GridConfigError):
        psll_db(decode_layout(SusaaEncoding(POSITION_ONLY, 2), [0.25]))


def test_mainlobe_region_simple():
    af = np.array([3.0, 1.0, 2.0, 5.0, 2.0, 0.5, 4.0])
    assert mainlobe_region(af, 3) == (1, 5)


def test_degenerate_layout():
    lay = ArrayLayout([-0.25, 0.25], [0.0, np.pi])
    with pytest.raises(DegenerateLayoutError):
        psll_db(lay)


def test_grid_validation():
    with pytest.raises(GridConfigError):
        AngleGrid(step=0.0)
    with pytest.raises(GridConfigError):
        AngleGrid(theta0=0.1)
    with pytest.raises(GridConfigError):
        susaa_objective(POSITION_ONLY, 9, AngleGrid(theta_min=-60, theta_max=90))


def test_pattern_normalized_at_broadside():
    theta, db = radiation_pattern_db(uniform_layout(8))
    assert db[np.argmin(np.abs(theta))] == pytest.approx(0.0)
    assert db.max() <= 1e-12
