"""Matplotlib rendering of figure and sweep data to image files."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

plt.rcParams.update({
    "figure.figsize": (5.0, 3.4),
    "font.size": 9,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "lines.linewidth": 1.2,
    "savefig.dpi": 160,
})


def render(columns, plot_spec, path, title=None):
    """Plot the y-columns of a data table against its x-column.

    ``plot_spec`` keys: x (column name), xlabel, ylabel, logy, and group
    (a column whose distinct values split the rows into separate curves).
    """
    x_name = plot_spec.get("x")
    if x_name is None or x_name not in columns:
        raise ValueError("plot spec needs an 'x' column present in the data")

    fig, ax = plt.subplots()
    group = plot_spec.get("group")
    y_names = plot_spec.get("y")
    if y_names is None:
        y_names = [name for name in columns if name not in (x_name, group)]
    if group is not None:
        key = columns[group]
        for value in dict.fromkeys(key.tolist()):
            mask = key == value
            for y in y_names:
                ax.plot(columns[x_name][mask], columns[y][mask],
                        marker="o", markersize=3,
                        label=f"{group}={value:g}")
    else:
        for name in y_names:
            ax.plot(columns[x_name], columns[name], label=name)

    if plot_spec.get("logy"):
        ax.set_yscale("log")
    ax.set_xlabel(plot_spec.get("xlabel", x_name))
    ax.set_ylabel(plot_spec.get("ylabel", ""))
    if title:
        ax.set_title(title)
    handles, labels = ax.get_legend_handles_labels()
    if handles:
        ax.legend(fontsize=7)
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
    return path
