import numpy as np
import pytest
from numpy.testing import assert_allclose, assert_array_equal
from scipy import stats

from confdec import normal_mean_measure, norm_normal_measure
from confdec.confidence_measure import ConfidenceMeasure
from confdec.pvalue_functions import NormalMeanFamily, BinomialFamily
from confdec.regions import Region, Interval
from confdec.numerics import SeededStream, ToleranceConfig
from confdec.exceptions import (ArgumentError, DomainError, InversionRangeError, MomentError, MultimodalityError,
                                SamplingRefusedError, CapabilityError)
from tests.mock import make_uniform_measure, make_normal_measure, make_random_region


def binomial_measure(n, x, C):
    return ConfidenceMeasure.from_pvalue_function(BinomialFamily(n, x, C))


class TestProb:

    @classmethod
    def setup_class(cls) -> None:
        cls.measure = normal_mean_measure(n=4, sample_mean=0., sample_sd=1.)

    def test_interval(self):
        # F_T3(1) - F_T3(-1) with scale 1 / 2
        assert_allclose(self.measure.prob(Region.interval(-0.5, 0.5)), 0.6089977810442296, rtol=1e-12)

    def test_whole_and_empty(self):
        assert self.measure.prob(Region.whole(self.measure.domain)) == 1.
        assert self.measure.prob(Region()) == 0.

    def test_point_has_no_mass(self):
        assert self.measure.prob(0.3) == 0.

    def test_interior_jump_is_not_an_atom(self):
        # Only CDF differences count, so the jump at 1/2 isn't attributed to the point itself
        def cdf(t):
            t = np.asarray(t, dtype=float)
            return np.where(t >= 0.5, 0.5 + 0.5 * t, 0.5 * t)

        jump = ConfidenceMeasure(cdf, Interval(0., 1.))
        assert jump.prob(0.5) == 0.
        assert_allclose(jump.prob(Region.interval(0.25, 0.5)), jump.prob(Region.interval(0.25, 0.5, hi_open=True)))

    def test_additive_over_disjoint_regions(self):
        a = Region.interval(-1., 0.)
        b = Region.interval(0., 2., lo_open=True)
        assert_allclose(self.measure.prob(a.union(b)), self.measure.prob(a) + self.measure.prob(b))

    def test_complement(self):
        rng = np.random.default_rng(1)
        for _ in range(10):
            region = make_random_region(rng, lo=-3., hi=3.)
            total = self.measure.prob(region) + self.measure.prob(region.complement(self.measure.domain))
            assert_allclose(total, 1., rtol=1e-12)

    def test_region_outside_domain(self):
        measure = make_uniform_measure()
        with pytest.raises(DomainError):
            measure.prob(Region.interval(0.5, 1.5))

    def test_cdf_outside_domain(self):
        with pytest.raises(DomainError):
            make_uniform_measure().cdf(-0.1)


class TestMassDeficiency:

    def test_fully_deficient(self):
        # The valid measure for x = n puts all of its mass in the atom at theta = 1
        measure = binomial_measure(5, 5, 0.)
        assert measure.mass_deficiency == 1.
        assert measure.prob(Region.interval(0., 1.)) == 1.
        assert measure.prob(Region.interval(0.2, 0.8)) == 0.
        assert measure.prob(Region.interval(0.5, 1.)) == 1.
        assert measure.prob(Region.interval(0.5, 1., hi_open=True)) == 0.

    def test_lower_atom(self):
        # The nonconservative measure for x = 0 puts all of its mass in the atom at theta = 0
        measure = binomial_measure(5, 0, 1.)
        assert measure.prob(Region.interval(0., 0.1)) == 1.
        assert measure.prob(Region.interval(0., 0.1, lo_open=True)) == 0.

    def test_partially_deficient(self):
        # F(theta) = 0.75 theta^2 so a quarter of the mass sits at theta = 1
        measure = binomial_measure(2, 2, 0.75)
        assert_allclose(measure.mass_deficiency, 0.25)
        assert_allclose(measure.prob(Region.interval(0.5, 1.)), 0.8125)
        assert_allclose(measure.prob(Region.interval(0., 0.5)), 0.1875)

    def test_sampling_refused(self):
        with pytest.raises(SamplingRefusedError):
            binomial_measure(5, 5, 0.).sample(10, SeededStream())

    def test_sampling_warns(self):
        measure = binomial_measure(2, 2, 0.75)
        with pytest.warns(UserWarning, match='mass deficient'):
            sample = measure.sample(1000, SeededStream())
        assert sample.mass_deficiency == 0.25
        assert np.all((sample.values >= 0.) & (sample.values <= 1.))


class TestQuantiles:

    @classmethod
    def setup_class(cls) -> None:
        cls.measure = make_normal_measure()

    def test_quantile(self):
        assert_allclose(self.measure.quantile(0.975), 1.959963984540054, rtol=1e-9)
        assert_allclose(self.measure.median(), 0., atol=1e-10)

    @pytest.mark.parametrize("p", [0., 1., -0.1, np.nan])
    def test_quantile_out_of_range(self, p):
        with pytest.raises(InversionRangeError):
            self.measure.quantile(p)

    def test_quantile_above_attainable(self):
        with pytest.raises(InversionRangeError):
            binomial_measure(2, 2, 0.75).quantile(0.9)

    def test_quantile_below_attainable(self):
        # F(theta) = 1 - 0.75 (1 - theta)^2 so a quarter of the mass sits at theta = 0
        measure = binomial_measure(2, 0, 0.25)
        with pytest.raises(InversionRangeError) as excinfo:
            measure.quantile(0.1)
        assert excinfo.value.lowest == 0.25
        assert excinfo.value.highest == 1.
        assert measure.quantile(0.25) == 0.
        assert_allclose(measure.quantile(0.5), 1. - np.sqrt(2. / 3.), rtol=1e-9)
        # Set estimates map the unattainable level to the domain end point instead
        assert measure.set_estimate(0.9, alpha=0.05).lo == 0.

    def test_closed_form_matches_inversion(self):
        family = NormalMeanFamily(6, 1., 2.)
        closed = ConfidenceMeasure.from_pvalue_function(family)
        numeric = ConfidenceMeasure(family.upper_tail, family.domain)
        for p in (0.01, 0.3, 0.9):
            assert_allclose(closed.quantile(p), numeric.quantile(p), rtol=1e-8)

    def test_set_estimate(self):
        interval = self.measure.set_estimate(0.95)
        assert_allclose([interval.lo, interval.hi], [-1.959963984540054, 1.959963984540054], rtol=1e-9)
        assert not interval.lo_open and not interval.hi_open

    def test_set_estimate_extremes(self):
        assert self.measure.set_estimate(0.).is_empty
        assert self.measure.set_estimate(1.) == self.measure.domain

    @pytest.mark.parametrize("rho, alpha", [(-0.1, None), (0.9, 0.2), (0.5, -0.1)])
    def test_set_estimate_bad_levels(self, rho, alpha):
        with pytest.raises(ArgumentError):
            self.measure.set_estimate(rho, alpha)

    def test_set_contains_matches_estimate(self):
        interval = self.measure.set_estimate(0.8, alpha=0.05)
        for theta in np.linspace(-3., 3., 25):
            assert self.measure.set_contains(theta, 0.8, alpha=0.05) == interval.contains(theta)

    def test_set_estimate_nested(self):
        inner = self.measure.set_estimate(0.5)
        outer = self.measure.set_estimate(0.9)
        assert inner.is_subset_of(outer)


class TestMoments:

    def test_mean_normal_mean(self):
        measure = normal_mean_measure(n=4, sample_mean=1.5, sample_sd=1.)
        assert_allclose(measure.mean(), 1.5, rtol=1e-7)

    def test_mean_uniform(self):
        assert_allclose(make_uniform_measure().mean(), 0.5, rtol=1e-9)

    def test_mean_norm_normal(self):
        # The integrated survival function 1 - exp(-2 / theta^2) is sqrt(2 pi)
        measure = norm_normal_measure(2, 2.)
        assert_allclose(measure.mean(), np.sqrt(2. * np.pi), rtol=1e-6)
        assert_allclose(measure.expect(lambda t: t), np.sqrt(2. * np.pi), rtol=1e-6)

    @pytest.mark.parametrize(
        "measure",
        [
            normal_mean_measure(n=2, sample_mean=0., sample_sd=1.),
            norm_normal_measure(1, 2.),
        ],
    )
    def test_no_mean(self, measure):
        with pytest.raises(MomentError):
            measure.mean()

    def test_mean_of_deficient_measure_on_infinite_domain(self):
        # Half of the mass escapes to +inf
        measure = ConfidenceMeasure(lambda t: 0.5 * stats.norm.cdf(t), Interval(-np.inf, np.inf))
        with pytest.raises(MomentError):
            measure.mean()

    def test_expect(self):
        measure = make_uniform_measure()
        assert_allclose(measure.expect(lambda t: t ** 2), 1. / 3., rtol=1e-9)
        assert_allclose(measure.expect(lambda t: float(t > 0.25), breaks=[0.25]), 0.75, rtol=1e-9)

    def test_expect_without_density(self):
        measure = make_normal_measure(1., 2., with_density=False)
        tol = ToleranceConfig(abs_tol=1e-8, rel_tol=1e-6, max_iter=500)
        assert_allclose(measure.expect(lambda t: t ** 2, tol), 5., rtol=1e-5)

    def test_expect_includes_atoms(self):
        measure = binomial_measure(2, 2, 0.75)
        # 0.25 at theta = 1 plus the integral of t * 1.5 t over [0, 1]
        assert_allclose(measure.expect(lambda t: t), 0.75, rtol=1e-8)


class TestMode:

    def test_symmetric(self):
        measure = normal_mean_measure(n=10, sample_mean=1., sample_sd=2.)
        assert_allclose(measure.mode(1e-4), 1., atol=1e-4)

    def test_norm_normal(self):
        # The density 4 exp(-2 / theta^2) / theta^3 peaks at 2 / sqrt(3)
        assert_allclose(norm_normal_measure(2, 2.).mode(1e-4), 2. / np.sqrt(3.), atol=1e-3)

    def test_flat_density(self):
        with pytest.raises(MultimodalityError):
            make_uniform_measure().mode(1e-3)

    def test_bad_bandwidth(self):
        with pytest.raises(ArgumentError):
            make_normal_measure().mode(0.)


class TestSampling:

    def test_reproducible(self):
        measure = make_normal_measure()
        assert_array_equal(measure.sample(50, SeededStream(3)).values, measure.sample(50, SeededStream(3)).values)

    def test_distribution(self):
        measure = normal_mean_measure(n=4, sample_mean=0., sample_sd=1.)
        values = measure.sample(5000, SeededStream(4)).values
        assert len(values) == 5000
        assert stats.kstest(values, lambda t: measure.cdf(t)).pvalue > 0.001

    @pytest.mark.parametrize("k", [0, -1, 2.5])
    def test_bad_size(self, k):
        with pytest.raises(ArgumentError):
            make_normal_measure().sample(k, SeededStream())


def test_density_capability():
    measure = make_normal_measure(with_density=False)
    assert not measure.has_density
    with pytest.raises(CapabilityError):
        measure.density(0.)
    assert_allclose(make_normal_measure().density(0.), stats.norm.pdf(0.))


def test_from_pvalue_function():
    family = NormalMeanFamily(4, 0., 1.)
    measure = ConfidenceMeasure.from_pvalue_function(family)
    assert measure.source is family
    assert measure.max_moment == 3.
    assert measure.has_density
    assert_allclose(measure.cdf([0., 0.5]), family.eval([0., 0.5]))


def test_bad_domain():
    with pytest.raises(ArgumentError):
        ConfidenceMeasure(lambda t: t, Interval(1., 0.))
