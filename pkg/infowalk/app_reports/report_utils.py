# --- START OF FILE report_utils.py ---
import io

import matplotlib
matplotlib.use('Agg')
import matplotlib.pyplot as plt
import numpy as np
import pandas as pd
import seaborn as sns

# Set a consistent plot style
sns.set_theme(style="whitegrid")

REPORT_PALETTE = [
    "#02AEB4",
    "#FF4F03",
    "#410077",
    "#792c00",
]

FIGSIZE_RECT = (6, 4)


def get_descriptives(series: pd.Series) -> dict:
    """Count, mean, std, min, quartiles and max of one numeric series."""
    if series.empty:
        return {}
    return {k: float(v) for k, v in series.describe().items()}


def _to_png(fig) -> bytes:
    img = io.BytesIO()
    fig.savefig(img, format='png')
    plt.close(fig)
    return img.getvalue()


def generate_walk_length_histogram(lengths: np.ndarray, title: str = "Walk lengths") -> bytes:
    """Histogram of walk lengths as PNG bytes."""
    fig, ax = plt.subplots(figsize=FIGSIZE_RECT)
    bins = min(40, max(1, int(np.ptp(lengths)) + 1)) if len(lengths) else 1
    sns.histplot(pd.Series(lengths, name="length"), bins=bins, color=REPORT_PALETTE[0], ax=ax)
    ax.set_title(title, fontsize=14)
    ax.set_xlabel("Walk length")
    ax.set_ylabel("Walks")
    fig.tight_layout()
    return _to_png(fig)


def generate_loss_chart(log: pd.DataFrame, title: str = "Training loss") -> bytes:
    """Held-out loss per epoch (epoch 0 is before training) as PNG bytes."""
    fig, ax = plt.subplots(figsize=FIGSIZE_RECT)
    sns.lineplot(data=log, x="epoch", y="loss", marker="o", color=REPORT_PALETTE[1], ax=ax)
    ax.set_title(title, fontsize=14)
    ax.set_xlabel("Epoch")
    ax.set_ylabel("Held-out loss")
    fig.tight_layout()
    return _to_png(fig)
