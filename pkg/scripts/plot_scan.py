#!/usr/bin/env python3
"""Plot a scan.csv produced by `sepnet scan`: distance vs q, with the fit.

Usage: python3 scripts/plot_scan.py run/scan.csv [out.png]
"""
import sys

from sepnet.io import read_table

try:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
except ImportError:
    sys.exit("matplotlib is not installed; pip install 'sepnet[plot]'")


def main(argv: list[str]) -> int:
    if not 1 <= len(argv) <= 2:
        print(__doc__.strip(), file=sys.stderr)
        return 2
    path = argv[0]
    out = argv[1] if len(argv) == 2 else path.rsplit(".", 1)[0] + ".png"
    comments, header, rows = read_table(path)
    qi, di = header.index("q"), header.index("distance")
    qs = [float(r[qi]) for r in rows]
    ds = [float(r[di]) for r in rows]

    fig, ax = plt.subplots(figsize=(5, 3.5))
    ax.plot(qs, ds, "o-", label="trained distance")
    fit = {k.strip(): v.strip() for k, _, v in
           (c.partition("=") for c in comments) if k.strip() in ("threshold", "slope", "intercept")}
    if "threshold" in fit:
        q0, slope, icept = (float(fit[k]) for k in ("threshold", "slope", "intercept"))
        ax.plot([q0, max(qs)], [0.0, slope * max(qs) + icept], "--",
                label=f"fit: q* = {q0:.4f}")
        ax.axvline(q0, color="gray", lw=0.8)
    ax.set_xlabel("q")
    ax.set_ylabel("distance to separable set")
    ax.legend()
    fig.tight_layout()
    fig.savefig(out, dpi=150)
    print(f"wrote {out}")
    return 0


if __name__ == "__main__":
    sys.exit(main(sys.argv[1:]))
