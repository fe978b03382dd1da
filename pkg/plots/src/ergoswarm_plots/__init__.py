"""Figure generation for ergoswarm results bundles."""

__version__ = "0.1.0"

from .figures import PlotSpec, plot_entropy, plot_space_time, render
