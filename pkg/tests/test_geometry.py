"""Bolts, ends, distances, the conformal-pair transform, and transcription."""
import math

import pytest

from u2metrics.catalog import catalog_get, hirzebruch
from u2metrics.exppoly import ExpPoly
from u2metrics.geometry import (
    OrientationError,
    TransformError,
    ambikahler_transform,
    classify_end,
    distance,
    find_bolts,
    transcribe_classic,
)
from u2metrics.profiles import Canonical, Domain, ExpFactor, MetricSpec


class TestFindBolts:
    def test_eguchi_hanson_bolt(self):
        m = catalog_get("eguchi-hanson", {"m": 1.0})
        bolts = find_bolts(m)
        assert len(bolts) == 1
        b = bolts[0]
        # F = 1 - e^{-2(z - z0)} style zero with slope exactly 2
        assert m.f_poly().eval(b.z0) == pytest.approx(0.0, abs=1e-12)
        assert b.slope == pytest.approx(2.0, abs=1e-10)
        assert b.self_intersection == 2

    def test_taub_bolt_endpoint_bolt(self):
        m = catalog_get("taub-bolt", {"m": 1.0})
        bolts = find_bolts(m)
        assert len(bolts) == 1
        assert bolts[0].z0 == pytest.approx(-math.log(3.0), abs=1e-10)
        assert abs(bolts[0].self_intersection) == 1

    def test_open_endpoint_zero_ignored(self):
        # same profile, but with the F-zero at an open endpoint
        m = catalog_get("taub-bolt", {"m": 1.0})
        opened = MetricSpec(
            "open", m.F, m.C, Domain(m.domain.lo, m.domain.hi, lo_closed=False), m.tag
        )
        assert find_bolts(opened) == []

    def test_no_bolts_on_taub_nut(self):
        assert find_bolts(catalog_get("taub-nut", {"m": 1.0})) == []

    def test_two_bolts_of_hirzebruch(self):
        m = hirzebruch(2, 1.0)
        slopes = sorted(b.slope for b in find_bolts(m))
        assert slopes == pytest.approx([-2.0, 2.0], abs=1e-9)


class TestDistance:
    def test_flat_distance_to_infinity_is_one(self):
        m = catalog_get("flat")
        assert distance(m, 0.0, math.inf) == pytest.approx(1.0, abs=1e-9)

    def test_additivity(self):
        m = catalog_get("taub-nut", {"m": 1.0})
        d_ac = distance(m, 0.5, 3.0)
        d_ab = distance(m, 0.5, 1.2)
        d_bc = distance(m, 1.2, 3.0)
        assert d_ac == pytest.approx(d_ab + d_bc, abs=1e-9)

    def test_infinite_cusp_distance(self):
        m = catalog_get("modified-taub-nut-1", {"C0": 1.0})
        # double zero of F at the lower end: infinitely far away
        assert distance(m, m.domain.lo, 1.0) == math.inf

    def test_symmetric_in_argument_order(self):
        m = catalog_get("taub-nut", {"m": 1.0})
        assert distance(m, 0.5, 2.0) == pytest.approx(distance(m, 2.0, 0.5), abs=1e-12)


class TestClassifyEnd:
    @pytest.mark.parametrize(
        "name,params,lower,upper",
        [
            ("taub-nut", {"m": 1.0}, "ALF", "nut"),
            ("modified-taub-nut-1", {"C0": 1.0}, "cusp", "ALE"),
            ("modified-taub-nut-2", {"C0": 1.0}, "cusp", "nut"),
            ("taub-bolt", {"m": 1.0}, "bolt", "ALF"),
            ("modified-taub-bolt-1", {"C0": 1.0}, "bolt", "cusp"),
            ("modified-taub-bolt-2", {"C0": 1.0}, "bolt", "cusp"),
            ("eguchi-hanson", {"m": 1.0}, "bolt", "ALE"),
        ],
    )
    def test_catalog_ends(self, name, params, lower, upper):
        m = catalog_get(name, params)
        assert classify_end(m, "lower").kind == lower
        assert classify_end(m, "upper").kind == upper

    def test_super_metrics_have_curvature_singularities(self):
        stn = classify_end(catalog_get("super-taub-nut"), "upper")
        assert stn.kind == "curvature_singularity"
        assert not stn.complete
        seh = classify_end(catalog_get("super-eguchi-hanson"), "lower")
        assert seh.kind == "curvature_singularity"

    def test_conical_end(self):
        # non-integer slope at the F-zero gives a cone angle of 2*pi*|slope|
        m = MetricSpec(
            "cone",
            ExpPoly([(0, 1.0), (-2, -1.0), (-1, -0.75), (1, 0.75)]),
            ExpFactor(1.0, -1),
            Domain(0.0, 2.0, lo_closed=True),
            None,
        )
        rep = classify_end(m, "lower")
        f1 = m.f_poly().derive().eval(0.0)
        if abs(f1 - round(f1)) < 1e-9:
            pytest.skip("slope landed on an integer")
        assert rep.kind == "conical"
        assert rep.cone_angle == pytest.approx(2.0 * math.pi * abs(f1), rel=1e-12)

    def test_bad_side_raises(self):
        with pytest.raises(ValueError):
            classify_end(catalog_get("flat"), "left")


class TestAmbikahlerTransform:
    def test_involution(self):
        m = catalog_get("modified-taub-nut-2", {"C0": 1.0})
        twice = ambikahler_transform(ambikahler_transform(m))
        assert twice.F == m.F
        assert twice.C == m.C
        assert twice.tag == m.tag

    def test_flips_orientation_tag_and_exponent(self):
        m = catalog_get("modified-taub-bolt-1", {"C0": 2.0})
        other = ambikahler_transform(m)
        assert other.tag != m.tag
        assert other.C.eps == -m.C.eps
        assert other.C.c0 == m.C.c0

    def test_requires_kahler_exp_metric(self):
        with pytest.raises(TransformError):
            ambikahler_transform(catalog_get("taub-bolt", {"m": 1.0}))


class TestTranscription:
    def test_flat_space(self):
        # dr^2 + r^2 (sum of sphere coframes squared): F = 1, C = C0 e^{+z}
        res = transcribe_classic(
            lambda r: 1.0,
            lambda r: r * r,
            lambda r: r * r,
            (1.0, 5.0),
            orientation=+1,
        )
        assert res.f_rms < 1e-10
        assert max(abs(c) for c in res.canonical.coefficients()) < 1e-8
        assert res.best_model == "exp"
        assert res.c_model.eps == +1
        assert res.c_rms < 1e-10

    def test_taub_nut_classic_form(self):
        m_par = 1.0
        res = transcribe_classic(
            lambda r: 0.25 * (r + m_par) / (r - m_par),
            lambda r: 4.0 * m_par**2 * (r - m_par) / (r + m_par),
            lambda r: r * r - m_par * m_par,
            (1.5, 8.0),
            orientation=-1,
        )
        assert res.f_rms < 1e-9
        assert res.best_model == "einstein"
        c1, c2, c3, c4 = res.canonical.coefficients()
        # shift-normalized profile (1 - e^{-z})^2: c1 = c2^2/2, c3 = c4 = 0
        k = -c2 / 2.0
        assert c1 / k**2 == pytest.approx(2.0, abs=1e-8)
        assert abs(c3) < 1e-9 and abs(c4) < 1e-9

    def test_reversed_orientation_still_fits(self):
        # z decreases along r, the fit is done in z and must agree
        res = transcribe_classic(
            lambda r: 1.0,
            lambda r: r * r,
            lambda r: r * r,
            (1.0, 5.0),
            orientation=-1,
        )
        assert res.f_rms < 1e-10
        assert res.c_model.eps == -1

    def test_invalid_orientation_value_raises(self):
        with pytest.raises(ValueError):
            transcribe_classic(
                lambda r: 1.0,
                lambda r: r * r,
                lambda r: r * r,
                (1.0, 5.0),
                orientation=0,
            )

    def test_nonpositive_coefficient_rejected(self):
        with pytest.raises(ValueError):
            transcribe_classic(
                lambda r: -1.0,
                lambda r: r * r,
                lambda r: r * r,
                (1.0, 5.0),
                orientation=+1,
            )
