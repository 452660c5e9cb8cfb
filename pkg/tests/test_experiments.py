import numpy as np
import pandas as pd
import pytest
from numpy.testing import assert_allclose

from confdec import experiments
from confdec.experiments import (ExperimentConfig, successes_for, run_fig1, run_coverage_audit, run_consistency,
                                 run_regions_sphere, run_bioequiv, run_combine_demo, write_csv, write_report)
from confdec.confidence_measure import ConfidenceMeasure
from confdec.pvalue_functions import BinomialFamily, NormalMeanFamily
from confdec.numerics import SeededStream
from confdec.exceptions import ArgumentError


@pytest.mark.parametrize(
    "n, theta, expected",
    [
        (1, 2. / 3., 1),
        (3, 2. / 3., 2),
        (4, 2. / 3., 3),
        (10, 0.5, 5),
        (100, 2. / 3., 67),
    ],
)
def test_successes_for(n, theta, expected):
    assert successes_for(n, theta) == expected


class TestFig1:

    @classmethod
    def setup_class(cls) -> None:
        cls.levels = run_fig1(n_max=400)

    def test_columns(self):
        assert list(self.levels.columns) == ['n', 'valid_level', 'nonconservative_level', 'half_corrected_level',
                                             'convex_mean_level']
        assert len(self.levels) == 400
        assert self.levels['n'].tolist() == list(range(1, 401))

    def test_single_trial(self):
        first = self.levels.iloc[0]
        assert_allclose(first[['valid_level', 'nonconservative_level', 'half_corrected_level',
                               'convex_mean_level']].to_numpy(dtype=float), [0., 0.5, 0.25, 0.25], atol=1e-15)

    def test_convex_mean_is_half_corrected(self):
        assert_allclose(self.levels['convex_mean_level'], self.levels['half_corrected_level'], atol=1e-14)

    def test_indeterminacy_shrinks(self):
        width = (self.levels['valid_level'] - self.levels['nonconservative_level']).abs()
        assert width[0] > width[9] > width[99]

    def test_level_tends_to_one(self):
        assert self.levels['half_corrected_level'].iloc[-1] >= 0.99

    def test_bad_input(self):
        with pytest.raises(ArgumentError):
            run_fig1(n_max=0)
        with pytest.raises(ArgumentError):
            run_fig1(theta=1.)


class TestCoverageAudit:

    @classmethod
    def setup_class(cls) -> None:
        cls.theta_grid = [0.01, 0.1, 0.25, 0.5, 0.73, 0.9, 0.99]
        cls.rho_grid = [0.5, 0.8, 0.9, 0.95]
        cls.coverage = run_coverage_audit(10, cls.theta_grid, cls.rho_grid)

    def test_shape(self):
        assert list(self.coverage.columns) == ['theta', 'rho', 'valid_coverage', 'nonconservative_coverage']
        assert len(self.coverage) == len(self.theta_grid) * len(self.rho_grid)

    def test_valid_covers(self):
        assert np.all(self.coverage['valid_coverage'] >= self.coverage['rho'] - 1e-12)

    def test_nonconservative_undercovers(self):
        assert np.all(self.coverage['nonconservative_coverage'] <= self.coverage['rho'] + 1e-12)

    def test_matches_set_membership(self):
        # Enumerate the outcomes explicitly with the measures' own membership test
        from scipy import stats
        n, theta, rho = 10, 0.25, 0.8
        valid, nonconservative = 0., 0.
        for x in range(n + 1):
            c0 = ConfidenceMeasure.from_pvalue_function(BinomialFamily(n, x, 0.))
            c1 = ConfidenceMeasure.from_pvalue_function(BinomialFamily(n, x, 1.))
            pmf = stats.binom.pmf(x, n, theta)
            valid += pmf * c0.set_contains(theta, rho, lower=c1)
            nonconservative += pmf * c1.set_contains(theta, rho, lower=c0)
        row = self.coverage[(self.coverage['theta'] == theta) & (self.coverage['rho'] == rho)].iloc[0]
        assert_allclose([row['valid_coverage'], row['nonconservative_coverage']], [valid, nonconservative],
                        rtol=1e-12)

    @pytest.mark.slow
    def test_bounds_for_every_sample_size(self):
        theta_grid = np.linspace(0.05, 0.95, 19)
        for n in range(1, 41):
            coverage = run_coverage_audit(n, theta_grid, self.rho_grid)
            assert np.all(coverage['valid_coverage'] >= coverage['rho'] - 1e-12), n
            assert np.all(coverage['nonconservative_coverage'] <= coverage['rho'] + 1e-12), n

    def test_full_confidence(self):
        coverage = run_coverage_audit(5, [0.3], [1.])
        assert coverage['valid_coverage'].iloc[0] == 1.
        assert coverage['nonconservative_coverage'].iloc[0] == 1.

    @pytest.mark.parametrize(
        "n, theta_grid, rho_grid, alpha",
        [
            (0, [0.5], [0.9], None),
            (10, [], [0.9], None),
            (10, [1.5], [0.9], None),
            (10, [0.5], [0.9], 0.2),
        ],
    )
    def test_bad_input(self, n, theta_grid, rho_grid, alpha):
        with pytest.raises(ArgumentError):
            run_coverage_audit(n, theta_grid, rho_grid, alpha)


class TestConsistency:

    def test_columns_and_point_null(self):
        df = run_consistency(n_list=[10, 100], reps=200, stream=SeededStream(1))
        assert list(df.columns) == ['n', 'mean_conf', 'q05', 'q95', 'ks_pvalue_uniformity', 'point_null_conf']
        assert df['n'].tolist() == [10, 100]
        assert np.all(df['point_null_conf'] == 0.)
        assert df['mean_conf'].iloc[1] > df['mean_conf'].iloc[0]
        assert np.all(df['q05'] <= df['q95'])
        assert df.attrs['warnings'] == []

    def test_reproducible(self):
        first = run_consistency(n_list=[20], reps=150, stream=SeededStream(3))
        second = run_consistency(n_list=[20], reps=150, stream=SeededStream(3))
        pd.testing.assert_frame_equal(first, second)

    def test_few_replicates_warn(self):
        with pytest.warns(UserWarning, match='below the recommended minimum'):
            df = run_consistency(n_list=[10], reps=20)
        assert len(df.attrs['warnings']) == 1

    @pytest.mark.parametrize(
        "kwargs",
        [
            dict(n_list=[]),
            dict(n_list=[1]),
            dict(reps=0),
            dict(sigma=0.),
        ],
    )
    def test_bad_input(self, kwargs):
        with pytest.raises(ArgumentError):
            run_consistency(**dict(dict(n_list=[10], reps=100), **kwargs))

    @pytest.mark.slow
    def test_limits(self):
        df = run_consistency(n_list=[10, 100, 1000], reps=2000, stream=SeededStream(42))
        # The region contains the true mean in its interior so its confidence tends to one, while the two-sided
        # p-values of the point null stay uniform
        assert df['mean_conf'].iloc[-1] > 0.99
        assert np.all(np.diff(df['mean_conf']) >= 0.)
        assert np.all(df['point_null_conf'] == 0.)
        assert np.all(df['ks_pvalue_uniformity'] < 0.04)

    @pytest.mark.slow
    def test_limits_outside_region(self):
        df = run_consistency(n_list=[10, 100, 1000], theta_true=2., reps=2000, stream=SeededStream(43))
        assert df['mean_conf'].iloc[-1] <= 0.05
        assert np.all(np.diff(df['mean_conf']) <= 0.)


def test_regions_sphere():
    report = run_regions_sphere(2, 2., 1., 4.)
    assert_allclose(report['middle'], np.exp(-1. / 8.) - np.exp(-2.), rtol=1e-12)
    assert_allclose(report['below'], np.exp(-2.), rtol=1e-12)
    assert_allclose(report['above'], 1. - np.exp(-1. / 8.), rtol=1e-10)
    assert_allclose(report['total'], 1., rtol=1e-12)
    with pytest.raises(ArgumentError):
        run_regions_sphere(2, 2., 4., 1.)


def test_bioequiv():
    report = run_bioequiv()
    assert_allclose(report['total'], 1., rtol=1e-12)
    assert_allclose(report['left'], report['right'], rtol=1e-10)
    assert_allclose(report['conditional_right'], 0.5, rtol=1e-10)
    assert report['middle'] > 0.99

    shifted = run_bioequiv(family=NormalMeanFamily(20, 0.2, 0.2))
    assert shifted['conditional_right'] > 0.5
    with pytest.raises(ArgumentError):
        run_bioequiv(delta=0.)


def test_combine_demo():
    report = run_combine_demo(n_sims=2000, stream=SeededStream(11))
    for label in ('first', 'second', 'combined'):
        assert report[label + '_lower_95'] < report[label + '_median'] < report[label + '_upper_95']
    combined_width = report['combined_upper_95'] - report['combined_lower_95']
    assert combined_width < max(report['first_upper_95'] - report['first_lower_95'],
                                report['second_upper_95'] - report['second_lower_95'])
    assert 0. <= report['ks_distance'] < 0.05
    assert report == run_combine_demo(n_sims=2000, stream=SeededStream(11))


class TestOutput:

    def test_write_csv(self, tmp_path):
        df = pd.DataFrame({'n': [1, 2], 'level': [1. / 3., 0.5]})
        df.attrs['warnings'] = ['few replicates']
        path = tmp_path / 'out.csv'
        write_csv(df, str(path))
        text = path.read_text()
        assert text == "# few replicates\nn,level\n1,0.333333333333\n2,0.5\n"

    def test_write_report(self, tmp_path):
        path = tmp_path / 'out.txt'
        write_report({'middle': 0.25, 'total': 1., 'label': 'x'}, str(path))
        assert path.read_text() == "middle=0.25\ntotal=1\nlabel=x\n"

    def test_stdout(self, capsys):
        write_report({'a': 0.5})
        assert capsys.readouterr().out == "a=0.5\n"


class TestExperimentConfig:

    @pytest.mark.parametrize(
        "kwargs",
        [
            dict(subcommand='fig2'),
            dict(subcommand='fig1', reps=0),
            dict(subcommand='fig1', seed=-1),
            dict(subcommand='fig1', out_path='/nonexistent/directory/out.csv'),
        ],
    )
    def test_validation(self, kwargs):
        with pytest.raises(ArgumentError):
            ExperimentConfig(**kwargs)

    def test_stream(self):
        config = ExperimentConfig('consistency', seed=7)
        assert config.stream.seed == 7
        assert config.subcommand in experiments.SUBCOMMANDS
