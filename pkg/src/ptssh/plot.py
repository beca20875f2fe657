"""Optional vector rendering of a command's table; never touches the CSV."""

from __future__ import annotations

import numpy as np


def render(cfg, table, path: str) -> None:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    cols = {name: i for i, name in enumerate(table.columns)}

    def col(name, rows=None):
        rows = table.rows if rows is None else rows
        return np.array([r[cols[name]] for r in rows], dtype=float)

    cmd = cfg.command
    if cmd == "spectrum-sweep":
        fig, (ax_re, ax_im) = plt.subplots(2, 1, sharex=True, figsize=(5, 6))
        g, re, im, edge = col("gamma"), col("re_E"), col("im_E"), col("edge_flag").astype(bool)
        for ax, y in ((ax_re, re), (ax_im, im)):
            ax.plot(g[~edge], y[~edge], ".", ms=1.5, color="0.4")
            ax.plot(g[edge], y[edge], ".", ms=2.5, color="C3")
        ax_re.set_ylabel("Re E / w")
        ax_im.set_ylabel("Im E / w")
        ax_im.set_xlabel("gain amplitude / w")
    elif cmd in ("ep-sweep", "ep-find"):
        fig, ax = plt.subplots(figsize=(5, 4))
        ok = [r for r in table.rows if r[cols["status"]] == "ok"]
        for u in sorted({r[cols["u"]] for r in ok}):
            rows = [r for r in ok if r[cols["u"]] == u]
            ax.semilogy(col("M", rows), col("gamma_cr_numeric", rows), "o", label=f"u={u:g} numeric")
            ax.semilogy(col("M", rows), col("gamma_cr_analytic", rows), "-", label=f"u={u:g} |C|")
        ax.set_xlabel("M")
        ax.set_ylabel("critical edge gain / w")
        ax.legend(fontsize="small")
    elif cmd == "bulk-phase":
        fig, ax = plt.subplots(figsize=(5, 4))
        names = sorted({r[cols["phase"]] for r in table.rows})
        code = np.array([names.index(r[cols["phase"]]) for r in table.rows])
        sc = ax.scatter(col("u"), col("gamma"), c=code, s=6, cmap="viridis")
        ax.legend(sc.legend_elements()[0], names, fontsize="small")
        ax.set_xlabel("u = w/v")
        ax.set_ylabel("gamma / w")
    else:
        fig, ax = plt.subplots(figsize=(5, 3.5))
        m = col("m")
        for name in table.columns[1:]:
            if name.startswith("abs_"):
                ax.plot(m, col(name), "o-" if name == "abs_exact" else "s--", label=name[4:])
        ax.set_xlabel("site m")
        ax.set_ylabel("|amplitude|")
        ax.legend(fontsize="small")
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
