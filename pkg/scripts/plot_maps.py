"""Plot complexity-entropy and gain maps from a `lzmap report` directory.

    python scripts/plot_maps.py report_dir/ --out maps.png

Needs matplotlib (``pip install lzmap[plot]``).
"""

import argparse
from collections import defaultdict
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

PANELS = [
    ("orig", "h", "E"),
    ("word", "h_w", "E_w"),
    ("gain_sentence", "I_s", "dE_s"),
    ("gain_word", "I_w", "dE_w"),
    ("gain_character", "I_c", "dE_c"),
    ("ds", "D_s", "E - E_w"),
]


def read_scatter(path):
    groups = defaultdict(lambda: ([], []))
    for line in path.read_text(encoding="utf-8").splitlines():
        if not line or line.startswith("#"):
            continue
        x, y, label = line.split(maxsplit=2)
        groups[label][0].append(float(x))
        groups[label][1].append(float(y))
    return groups


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("report_dir", type=Path)
    p.add_argument("--out", type=Path, default=Path("maps.png"))
    args = p.parse_args(argv)

    fig, axes = plt.subplots(2, 3, figsize=(13, 8))
    for ax, (name, xl, yl) in zip(axes.flat, PANELS):
        path = args.report_dir / f"scatter_{name}.txt"
        if not path.exists():
            ax.set_visible(False)
            continue
        for label, (xs, ys) in sorted(read_scatter(path).items()):
            ax.scatter(xs, ys, s=12, label=label.replace("_", " "))
        ax.set_xlabel(xl)
        ax.set_ylabel(yl)
        ax.set_title(name)
    axes.flat[0].legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(args.out, dpi=150)
    print(args.out)


if __name__ == "__main__":
    main()
