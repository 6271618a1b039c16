"""Predicate classification and the exponential-family fit."""
import math

import numpy as np
import pytest

from u2metrics.catalog import catalog_get
from u2metrics.classify import (
    PREDICATES,
    RankDeficientError,
    classify,
    conformally_extremal_residual,
    fit_exp_family,
    sample_grid,
)
from u2metrics.profiles import Canonical, Domain, ExpFactor, MetricSpec


class TestTags:
    def test_taub_nut(self):
        tags = classify(catalog_get("taub-nut", {"m": 1.0}), tol=1e-8).tags()
        for t in ("ricci_flat", "hyperkahler_Iplus", "sd", "conformally_extremal"):
            assert t in tags
        assert "asd" not in tags

    def test_page_is_einstein_not_kahler(self):
        tags = classify(catalog_get("page", {"Lambda": 12.0}), tol=1e-8).tags()
        assert "einstein" in tags and "bach_flat" in tags
        assert "kahler_plus" not in tags and "kahler_minus" not in tags

    def test_scale_invariance_of_tags(self):
        for c0 in (1.0, 10.0):
            tags = classify(catalog_get("modified-taub-nut-2", {"C0": c0}), tol=1e-8).tags()
            assert set(tags) >= {"kahler_plus", "extremal", "sd", "bach_flat"}

    def test_exact_and_grid_paths_agree(self):
        m = catalog_get("taub-bolt", {"m": 1.0})
        exact = classify(m, tol=1e-8, use_exact=True).tags()
        grid = classify(m, tol=1e-8, use_exact=False).tags()
        assert exact == grid

    def test_report_text_and_tree(self):
        rep = classify(catalog_get("flat"), tol=1e-8)
        text = rep.text()
        assert "einstein yes" in text
        tree = rep.tree()
        assert tree["predicates"]["einstein"]["verdict"] == "yes"

    def test_singular_grid_is_indeterminate(self):
        # F vanishes inside the domain: residual predicates are meaningless
        m = MetricSpec(
            "bad", Canonical(0, -1, 0, 0), ExpFactor(1.0, -1), Domain(-2.0, 2.0), None
        )
        rep = classify(m, tol=1e-8)
        assert rep.verdict("einstein") == "indeterminate"

    def test_bt_flat_requires_t(self):
        m = catalog_get("taub-bolt", {"m": 1.0})
        assert "bt_flat" not in classify(m, tol=1e-8).entries
        rep = classify(m, tol=1e-8, t=1.0)
        assert rep.verdict("bt_flat") == "yes"

    def test_all_predicates_reported(self):
        rep = classify(catalog_get("flat"), tol=1e-8, t=1.0)
        assert set(rep.entries) == set(PREDICATES)


class TestSampleGrid:
    def test_points_inside_domain(self):
        d = Domain(0.0, math.inf)
        grid = sample_grid(d, 40)
        assert all(d.contains(z) for z in grid)
        assert len(grid) >= 20


class TestConformallyExtremal:
    def test_zero_on_canonical_family(self):
        m = catalog_get("taub-nut", {"m": 2.0})
        assert conformally_extremal_residual(m, [0.5, 1.0]) == 0.0

    def test_nonzero_off_family(self):
        from u2metrics.exppoly import ExpPoly

        m = MetricSpec(
            "off",
            ExpPoly([(0, 1), (3, 0.01)]),
            ExpFactor(1.0, -1),
            Domain(-1.0, 1.0),
            None,
        )
        assert conformally_extremal_residual(m, [0.5]) > 1e-4


class TestFitExpFamily:
    def test_recovers_taub_bolt_coefficients(self):
        poly = Canonical(-0.25, 0.25, -2.25, 2.25).expand()
        zs = np.linspace(-1.0, -0.1, 24)
        (c1, c2, c3, c4), rms = fit_exp_family((z, poly.eval(z)) for z in zs)
        assert rms < 1e-12
        assert (c1, c2, c3, c4) == pytest.approx((-0.25, 0.25, -2.25, 2.25), abs=1e-9)

    def test_constant_profile_fits_to_zero(self):
        zs = np.linspace(-1.0, 1.0, 12)
        coeffs, rms = fit_exp_family((z, 1.0) for z in zs)
        assert rms < 1e-13
        assert max(abs(c) for c in coeffs) < 1e-10

    def test_off_family_leaves_residual(self):
        zs = np.linspace(-1.0, 2.0, 30)
        _, rms = fit_exp_family((z, 1.0 + 0.01 * math.exp(3 * z)) for z in zs)
        assert rms > 1e-4

    def test_too_few_samples(self):
        with pytest.raises(ValueError):
            fit_exp_family([(0.1 * i, 1.0) for i in range(5)])

    def test_degenerate_spacing(self):
        with pytest.raises(RankDeficientError):
            fit_exp_family([(0.0, 1.0)] * 10)
