import numpy as np
from tqdm.auto import tqdm

from .exceptions import ArgumentError


def progress_bar(iterable, enabled=False, **kwargs):
    """Wrap `iterable` in a (notebook-aware) progress bar when `enabled`"""
    return tqdm(iterable, disable=not enabled, **kwargs)


def ks_uniform_distance(values):
    """
    The Kolmogorov-Smirnov distance between the empirical distribution of `values` and the uniform
    distribution on [0, 1]

    Parameters
    ----------
    values: array_like

    Returns
    -------
    float
    """
    from scipy import stats
    values = np.asarray(values, dtype=float).ravel()
    if values.size == 0:
        raise ArgumentError("Need at least one value to compare with the uniform distribution")
    return float(stats.kstest(values, 'uniform').statistic)


def prettify_plot(ax):
    """utility function for making plots prettier"""
    ax.get_xaxis().tick_bottom()
    ax.get_yaxis().tick_left()
    ax.spines['left'].set_position(('outward', 10))
    ax.spines['bottom'].set_position(('outward', 10))

    ax.spines['top'].set_visible(False)
    ax.spines['right'].set_visible(False)


def plot_confidence_levels(levels, ax=None, figsize=(7, 5)):
    """
    Plot the binomial confidence levels of a hypothesis against the number of trials, as produced by
    :func:`confdec.experiments.run_fig1`. The valid and nonconservative levels bound a shaded band (the
    metalevel) with the half-corrected level drawn through it.

    Parameters
    ----------
    levels: pandas.DataFrame
        With columns n, valid_level, nonconservative_level and half_corrected_level
    ax: matplotlib.axes.Axes, optional
        The axes to draw on (a new figure is created otherwise)
    figsize: tuple

    Returns
    -------
    matplotlib.axes.Axes
    """
    import matplotlib.pyplot as plt
    if ax is None:
        fig, ax = plt.subplots(1, figsize=figsize)

    lower = np.minimum(levels['valid_level'], levels['nonconservative_level'])
    upper = np.maximum(levels['valid_level'], levels['nonconservative_level'])
    ax.fill_between(levels['n'], lower, upper, color='0.8', label='Metalevel')
    ax.plot(levels['n'], levels['valid_level'], 'k--', lw=1, label='Valid (C=0)')
    ax.plot(levels['n'], levels['nonconservative_level'], 'k:', lw=1, label='Nonconservative (C=1)')
    ax.plot(levels['n'], levels['half_corrected_level'], 'r-', label='Half-corrected (C=1/2)')

    prettify_plot(ax)
    ax.set_xscale('log')
    ax.set_ylim(0., 1.)
    ax.set_xlabel('Number of trials')
    ax.set_ylabel('Confidence level')
    ax.legend(frameon=False)
    return ax
