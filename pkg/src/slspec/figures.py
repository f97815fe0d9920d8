"""Figure rendering for the report pipeline.

Kept out of the numerical core: matplotlib is imported only here, with the
Agg backend, and every figure goes straight to a file next to the delimited
output it visualizes.
"""

from __future__ import annotations

import os


def _plt():
    import matplotlib
    matplotlib.use("Agg", force=True)
    import matplotlib.pyplot as plt
    return plt

_META = {"Software": "slspec"}


def det_curve_figure(path: str, rows):
    """|Delta| along the sampled mu values (rows: re mu, im mu, re D, im D)."""
    plt = _plt()
    xs = [r[0] for r in rows]
    mag = [abs(complex(r[2], r[3])) for r in rows]
    fig, ax = plt.subplots(figsize=(7, 4))
    ax.semilogy(xs, [m if m > 0 else float("nan") for m in mag], lw=1.2)
    ax.set_xlabel(r"Re $\mu$")
    ax.set_ylabel(r"$|\Delta(\mu)|$")
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=130, metadata=_META)
    plt.close(fig)
    return path


def spectrum_figure(path: str, report):
    """Eigenvalue map in the mu plane, marker area scaled by multiplicity."""
    plt = _plt()
    fig, ax = plt.subplots(figsize=(6, 5))
    if report.records:
        xs = [r.mu.real for r in report.records]
        ys = [r.mu.imag for r in report.records]
        ss = [40 * r.multiplicity for r in report.records]
        ax.scatter(xs, ys, s=ss, alpha=0.75, edgecolor="k", linewidths=0.5)
        for r in report.records:
            if r.multiplicity > 1:
                ax.annotate(str(r.multiplicity), (r.mu.real, r.mu.imag),
                            textcoords="offset points", xytext=(5, 5), fontsize=8)
    re0, re1, im0, im1 = report.scan_region
    ax.set_xlim(re0 - 0.3, re1 + 0.3)
    ax.set_ylim(im0 - 0.3, im1 + 0.3)
    ax.axhline(0, color="gray", lw=0.5)
    ax.set_xlabel(r"Re $\mu$")
    ax.set_ylabel(r"Im $\mu$")
    ax.set_title(f"spectrum: {report.classification.value}", fontsize=10)
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=130, metadata=_META)
    plt.close(fig)
    return path


def norm_products_figure(path: str, norm_products, kernel_sup=None):
    """Basis diagnostics per index: ||u_n|| ||v_n|| and sup-kernel values."""
    plt = _plt()
    fig, ax = plt.subplots(figsize=(6, 4))
    n = range(1, len(norm_products) + 1)
    ax.semilogy(list(n), norm_products, "o-", label=r"$\|u_n\| \|v_n\|$")
    if kernel_sup:
        ax.semilogy(list(n), kernel_sup, "s--", label=r"$\sup |u_n(x)\bar v_n(\xi)|$")
    ax.set_xlabel("n")
    ax.legend()
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=130, metadata=_META)
    plt.close(fig)
    return path


def render_report_figures(outdir: str, det_rows, report, diagnostics=None):
    paths = []
    paths.append(det_curve_figure(os.path.join(outdir, "det_curve.png"), det_rows))
    paths.append(spectrum_figure(os.path.join(outdir, "spectrum.png"), report))
    if diagnostics is not None and diagnostics.norm_products:
        paths.append(norm_products_figure(os.path.join(outdir, "norm_products.png"),
                                          diagnostics.norm_products,
                                          diagnostics.kernel_sup))
    return paths
