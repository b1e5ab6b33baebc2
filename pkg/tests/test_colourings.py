import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from spherebell.colourings import (
    BandColouring,
    ColouringPair,
    HarmonicColouring,
    Negated,
    catalogue_labels,
    check_antipodal,
    circle_colouring_value,
    colouring_from_spec,
    evaluate,
    load_colouring,
    make_catalogue,
    negate,
    real_spherical_harmonic,
)
from spherebell.geometry import Direction

PI = math.pi


class TestCatalogue:
    def test_hemisphere_band(self):
        c = make_catalogue(1)
        assert c.label == "1"
        assert c.plus_bands == ((0.0, PI / 2),)

    def test_hemisphere_alias(self):
        assert make_catalogue("hemisphere").plus_bands == make_catalogue("1").plus_bands

    def test_two_band_colouring(self):
        c = make_catalogue(2)
        assert c.plus_bands == ((0.0, PI / 4), (PI / 2, 3 * PI / 4))

    def test_three_band_colouring(self):
        c = make_catalogue(3)
        assert c.plus_bands == (
            (0.0, PI / 6),
            (PI / 3, PI / 2),
            (2 * PI / 3, 5 * PI / 6),
        )

    def test_four_band_colouring(self):
        # bands [k pi/4, (2k+1) pi/8] for k = 0..3
        c = make_catalogue(4)
        expected = tuple(
            (k * PI / 4, (2 * k + 1) * PI / 8) for k in range(4)
        )
        assert c.plus_bands == expected

    def test_unknown_label(self):
        with pytest.raises(ValueError):
            make_catalogue("5")

    def test_inline_parameter(self):
        c = make_catalogue("3_delta:-0.038")
        d = -0.038 * PI
        assert c.plus_bands[0][1] == pytest.approx(PI / 6 + d, abs=1e-15)
        assert c.plus_bands[2][1] == pytest.approx(5 * PI / 6 - d, abs=1e-15)

    def test_deformed_three_band_requires_delta(self):
        with pytest.raises(ValueError):
            make_catalogue("3_delta")

    def test_delta_out_of_range(self):
        with pytest.raises(ValueError):
            make_catalogue("3_delta", delta=-PI / 17)
        with pytest.raises(ValueError):
            make_catalogue("3_delta", delta=PI / 23)

    def test_zero_delta_reduces_to_plain_three_band(self):
        a = make_catalogue("3_delta", delta=0.0)
        b = make_catalogue(3)
        eps = np.linspace(0.0, PI, 481)
        assert np.array_equal(a.evaluate_polar(eps), b.evaluate_polar(eps))

    def test_shrunk_cap_bands(self):
        c = make_catalogue("2_Delta:0.05")
        d = 0.05 * PI
        assert c.plus_bands == ((0.0, PI / 4 - d), (PI / 2, 3 * PI / 4 + d))

    def test_cap_parameter_out_of_range(self):
        with pytest.raises(ValueError):
            make_catalogue("2_Delta", Delta=PI / 11)

    def test_parameter_on_plain_label_rejected(self):
        with pytest.raises(ValueError):
            make_catalogue("1:0.3")

    def test_labels_listing(self):
        assert catalogue_labels() == ("1", "2", "3", "4")

    def test_every_catalogue_colouring_is_antipodal(self):
        for label in catalogue_labels():
            assert make_catalogue(label).is_antipodal()
        assert make_catalogue("3_delta", delta=-0.04 * PI).is_antipodal()
        assert make_catalogue("2_Delta", Delta=0.03 * PI).is_antipodal()


class TestBandColouring:
    def test_hemisphere_value(self):
        c = make_catalogue(1)
        assert c.value_at(PI / 4) == 1
        assert c.value_at(3 * PI / 4) == -1

    def test_three_band_values(self):
        c = make_catalogue(3)
        assert c.value_at(PI / 4) == -1  # inside the first gap
        assert c.value_at(0.4 * PI) == 1
        assert c.value_at(0.99 * PI) == -1

    def test_edges_take_plus_one(self):
        c = make_catalogue(3)
        assert c.value_at(PI / 6) == 1
        assert c.value_at(PI / 3) == 1

    def test_phi_independence(self):
        c = make_catalogue(2)
        eps = np.full(5, 0.6)
        phi = np.linspace(0.0, 2 * PI, 5)
        vals = c.evaluate_many(eps, phi)
        assert np.all(vals == vals[0])

    def test_edges_property(self):
        c = make_catalogue(2)
        assert np.allclose(c.edges, (PI / 4, PI / 2, 3 * PI / 4))

    def test_rejects_empty_and_bad_bands(self):
        with pytest.raises(ValueError):
            BandColouring(())
        with pytest.raises(ValueError):
            BandColouring(((0.5, 0.2),))
        with pytest.raises(ValueError):
            BandColouring(((0.0, 0.6), (0.5, 0.9)))

    def test_minus_bands_complement(self):
        c = make_catalogue(2)
        assert c.minus_bands() == ((PI / 4, PI / 2), (3 * PI / 4, PI))

    def test_non_antipodal_detected(self):
        assert not BandColouring(((0.0, 0.6 * PI),)).is_antipodal()


class TestHarmonicColouring:
    def test_degree_one_is_the_hemisphere(self):
        h = HarmonicColouring(((1, 0, 1.0),))
        band = make_catalogue(1)
        eps = np.linspace(0.01, PI - 0.01, 211)
        phi = np.linspace(0.0, 2 * PI, 211)
        assert np.array_equal(h.evaluate_many(eps, phi), band.evaluate_many(eps, phi))

    def test_nodal_tie_goes_to_plus(self):
        h = HarmonicColouring(((1, 0, 1.0),))
        assert evaluate(h, Direction(PI / 2, 0.3)) == 1

    @given(scale=st.floats(0.1, 50.0))
    @settings(max_examples=40, deadline=None)
    def test_sign_is_scale_invariant(self, scale):
        terms = ((1, 0, 0.4), (3, 2, -0.7), (5, -3, 0.2))
        a = HarmonicColouring(terms)
        b = HarmonicColouring(tuple((l, m, scale * c) for l, m, c in terms))
        rng = np.random.default_rng(23)
        eps = np.arccos(rng.uniform(-1, 1, 500))
        phi = rng.uniform(0, 2 * PI, 500)
        assert np.array_equal(a.evaluate_many(eps, phi), b.evaluate_many(eps, phi))

    def test_even_degree_rejected(self):
        with pytest.raises(ValueError):
            HarmonicColouring(((2, 0, 1.0),))

    def test_order_beyond_degree_rejected(self):
        with pytest.raises(ValueError):
            HarmonicColouring(((3, 4, 1.0),))

    def test_all_zero_coefficients_rejected(self):
        with pytest.raises(ValueError):
            HarmonicColouring(((1, 0, 0.0), (3, 1, 0.0)))

    def test_azimuthal_flag(self):
        assert HarmonicColouring(((3, 0, 1.0),)).is_azimuthal
        assert not HarmonicColouring(((3, 1, 1.0),)).is_azimuthal

    def test_polar_evaluation_requires_azimuthal(self):
        with pytest.raises(ValueError):
            HarmonicColouring(((3, 1, 1.0),)).evaluate_polar(np.array([0.3]))


def test_real_harmonic_normalization():
    # squared integral over the sphere must be 1 for each basis function
    n_eps, n_phi = 256, 512
    eps = (np.arange(n_eps) + 0.5) * PI / n_eps
    phi = (np.arange(n_phi) + 0.5) * 2 * PI / n_phi
    de, dp = PI / n_eps, 2 * PI / n_phi
    eps_g, phi_g = np.meshgrid(eps, phi, indexing="ij")
    for l, m in ((1, 0), (3, 2), (5, -4)):
        y = real_spherical_harmonic(l, m, np.cos(eps_g), phi_g)
        total = np.sum(y * y * np.sin(eps_g)) * de * dp
        assert total == pytest.approx(1.0, abs=1e-3)


def test_degree_one_harmonics_match_cartesian_forms():
    eps, phi = 0.7, 1.3
    x = math.cos(eps)
    norm = math.sqrt(3.0 / (4.0 * PI))
    assert real_spherical_harmonic(1, 0, np.array(x), np.array(phi)) == pytest.approx(
        norm * math.cos(eps)
    )
    assert real_spherical_harmonic(1, 1, np.array(x), np.array(phi)) == pytest.approx(
        norm * math.sin(eps) * math.cos(phi)
    )
    assert real_spherical_harmonic(1, -1, np.array(x), np.array(phi)) == pytest.approx(
        norm * math.sin(eps) * math.sin(phi)
    )


class TestNegation:
    def test_label_and_values(self):
        c = make_catalogue(3)
        n = negate(c)
        assert n.label == "-3"
        eps = np.linspace(0, PI, 50)
        assert np.array_equal(
            n.evaluate_many(eps, np.zeros(50)), -c.evaluate_many(eps, np.zeros(50))
        )

    def test_double_negation_unwraps(self):
        c = make_catalogue(3)
        assert negate(negate(c)) is c

    def test_pair_anticorrelated(self):
        pair = ColouringPair.anticorrelated(make_catalogue(2))
        assert pair.gamma_declared == 0.0
        assert isinstance(pair.bob, Negated)

    def test_pair_gamma_validation(self):
        with pytest.raises(ValueError):
            ColouringPair(make_catalogue(1), make_catalogue(1), gamma_declared=1.5)


class TestCheckAntipodal:
    def test_catalogue_families_pass(self):
        rng = np.random.default_rng(31)
        for label in catalogue_labels():
            report = check_antipodal(make_catalogue(label), 2000, rng)
            assert report.n_violations == 0

    def test_negated_colouring_passes(self):
        rng = np.random.default_rng(31)
        report = check_antipodal(negate(make_catalogue(3)), 2000, rng)
        assert report.n_violations == 0

    def test_harmonic_colouring_passes(self):
        rng = np.random.default_rng(37)
        h = HarmonicColouring(((3, 2, 1.0), (1, 0, 0.5), (5, -1, -0.3)))
        report = check_antipodal(h, 2000, rng)
        assert report.n_violations == 0

    def test_broken_colouring_fails_everywhere(self):
        rng = np.random.default_rng(41)
        whole_sphere_plus = BandColouring(((0.0, PI / 2), (PI / 2, PI)))
        report = check_antipodal(whole_sphere_plus, 2000, rng)
        assert report.violation_fraction == 1.0

    def test_sample_count_validation(self):
        with pytest.raises(ValueError):
            check_antipodal(make_catalogue(1), 0, np.random.default_rng(1))


class TestCircleColouring:
    def test_half_circle_values(self):
        assert circle_colouring_value(1, PI / 2) == 1
        assert circle_colouring_value(1, 3 * PI / 2) == -1

    def test_three_arc_value(self):
        assert circle_colouring_value(3, 0.4 * PI) == -1

    def test_even_arc_count_rejected(self):
        with pytest.raises(ValueError):
            circle_colouring_value(2, 0.1)
        with pytest.raises(ValueError):
            circle_colouring_value(-3, 0.1)

    def test_angle_out_of_range(self):
        with pytest.raises(ValueError):
            circle_colouring_value(3, 2 * PI + 0.2)

    @given(
        n=st.sampled_from([1, 3, 5, 7, 9]),
        eps=st.floats(1e-6, PI - 1e-6),
    )
    @settings(max_examples=120, deadline=None)
    def test_one_dimensional_antipodality(self, n, eps):
        # stay away from the arc boundaries where the colour convention flips
        if min(abs(n * eps / PI - round(n * eps / PI)), 1.0) < 1e-9:
            return
        assert circle_colouring_value(n, eps + PI) == -circle_colouring_value(n, eps)


class TestSerialization:
    def test_catalogue_spec(self):
        c = colouring_from_spec({"kind": "catalogue", "label": "3_delta", "delta": -0.04})
        assert isinstance(c, BandColouring)
        assert c.plus_bands[0][1] == pytest.approx(PI / 6 - 0.04 * PI)

    def test_band_spec_in_pi_units(self):
        c = colouring_from_spec(
            {"kind": "bands", "bands": [[0.0, 0.25], [0.5, 0.75]], "label": "steps"}
        )
        assert c.label == "steps"
        assert c.plus_bands == ((0.0, PI / 4), (PI / 2, 3 * PI / 4))

    def test_harmonic_spec(self):
        c = colouring_from_spec({"kind": "harmonic", "terms": [[3, -2, 0.5]]})
        assert isinstance(c, HarmonicColouring)
        assert c.terms == ((3, -2, 0.5),)

    def test_unknown_kind(self):
        with pytest.raises(ValueError):
            colouring_from_spec({"kind": "stripes"})

    def test_load_from_file(self, tmp_path):
        path = tmp_path / "c.json"
        path.write_text(json.dumps({"kind": "catalogue", "label": "2"}))
        c = load_colouring(str(path))
        assert c.label == "2"
