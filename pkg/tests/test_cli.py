import numpy as np
import pandas as pd
import pytest
from numpy.testing import assert_allclose

from confdec.cli import main, build_parser
from confdec import exceptions


def read_report(path):
    return dict(line.split('=', 1) for line in path.read_text().splitlines())


def test_fig1(tmp_path):
    out = tmp_path / 'fig1.csv'
    assert main(['fig1', '--n-max', '5', '--out', str(out)]) == 0
    df = pd.read_csv(out)
    assert len(df) == 5
    assert_allclose(df.iloc[0][['valid_level', 'nonconservative_level', 'half_corrected_level']].to_numpy(dtype=float),
                    [0., 0.5, 0.25], atol=1e-12)


def test_fig1_plot(tmp_path):
    out, plot = tmp_path / 'fig1.csv', tmp_path / 'fig1.png'
    assert main(['fig1', '--n-max', '10', '--out', str(out), '--plot', str(plot)]) == 0
    assert plot.exists()


def test_coverage_audit(tmp_path):
    out = tmp_path / 'coverage.csv'
    assert main(['coverage-audit', '--n', '8', '--theta-grid', '0.2,0.5', '--rho-grid', '0.8,0.95',
                 '--out', str(out)]) == 0
    df = pd.read_csv(out)
    assert len(df) == 4
    assert np.all(df['valid_coverage'] >= df['rho'] - 1e-12)


def test_consistency_warns_in_output(tmp_path):
    out = tmp_path / 'consistency.csv'
    assert main(['consistency', '--n-list', '10,20', '--reps', '20', '--seed', '3', '--out', str(out)]) == 0
    text = out.read_text()
    assert text.startswith('# ')
    df = pd.read_csv(out, comment='#')
    assert df['n'].tolist() == [10, 20]


def test_regions_sphere(tmp_path):
    out = tmp_path / 'sphere.txt'
    assert main(['regions-sphere', '--dim', '2', '--norm', '2', '--region', '1,4', '--out', str(out)]) == 0
    report = read_report(out)
    assert_allclose(float(report['middle']), np.exp(-1. / 8.) - np.exp(-2.), rtol=1e-11)
    assert_allclose(float(report['total']), 1., rtol=1e-11)


def test_bioequiv_stdout(capsys):
    assert main(['bioequiv', '--mean', '0.1']) == 0
    out = capsys.readouterr().out
    report = dict(line.split('=', 1) for line in out.splitlines())
    assert set(report) == {'left', 'middle', 'right', 'total', 'conditional_right'}
    assert float(report['conditional_right']) > 0.5


def test_combine_demo(tmp_path):
    out = tmp_path / 'combine.txt'
    assert main(['combine-demo', '--reps', '500', '--seed', '1', '--out', str(out)]) == 0
    report = read_report(out)
    assert 'combined_median' in report
    assert 0. <= float(report['ks_distance']) <= 1.


def test_same_seed_same_output(tmp_path):
    first, second = tmp_path / 'a.csv', tmp_path / 'b.csv'
    for out in (first, second):
        assert main(['consistency', '--n-list', '10', '--reps', '100', '--seed', '5', '--out', str(out)]) == 0
    assert first.read_bytes() == second.read_bytes()


@pytest.mark.parametrize(
    "argv",
    [
        ['fig1', '--region', '0.75,0.25'],
        ['fig1', '--n-max', '0'],
        ['coverage-audit', '--n', '0'],
        ['consistency', '--reps', '0'],
        ['regions-sphere', '--region', '4,1'],
        ['fig1', '--out', '/nonexistent/directory/out.csv'],
    ],
)
def test_bad_arguments(argv):
    assert main(argv) == 2


def test_unknown_subcommand():
    with pytest.raises(SystemExit) as excinfo:
        main(['fig2'])
    assert excinfo.value.code == 2


def test_parser_shared_options():
    args = build_parser().parse_args(['-vv', 'consistency', '--seed', '9', '--reps', '50'])
    assert args.verbose == 2
    assert args.seed == 9
    assert args.reps == 50


@pytest.mark.parametrize(
    "error, code",
    [
        (exceptions.ArgumentError, 2),
        (exceptions.ParameterDomainError, 2),
        (exceptions.DomainError, 2),
        (exceptions.MomentError, 3),
        (exceptions.MultimodalityError, 3),
        (exceptions.CapabilityError, 3),
        (exceptions.SamplingRefusedError, 3),
    ],
)
def test_exit_codes(error, code):
    assert error.exit_code == code
    assert issubclass(error, exceptions.ConfDecError)
