"""Optional matplotlib helper shared by the gallery scripts.

Figures are written as PNG files next to the scripts (or into
``$WRNN_GALLERY_OUT``) using the non-interactive Agg backend; without
matplotlib the scripts still run and only print their numbers.
"""

import os

try:
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
except ImportError:  # pragma: no cover
    plt = None

OUT_DIR = os.environ.get("WRNN_GALLERY_OUT", os.path.dirname(os.path.abspath(__file__)))


def save(fig, name):
    path = os.path.join(OUT_DIR, name)
    fig.savefig(path, dpi=100, bbox_inches="tight")
    plt.close(fig)
    print(f"figure written to {path}")
