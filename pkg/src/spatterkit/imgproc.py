"""Raster preprocessing: grayscale, inversion, thresholding, labeling.

Images are plain numpy arrays. Grayscale images are uint8 (H, W) with
values in [0, 255]; binary images are uint8 (H, W) with values in
{0, 1}. Stains are dark on a light background in the source scans, so
the pipeline inverts before thresholding and foreground (1) means
stain.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .kernels import label_image

# rec. 601 luma weights, the common grayscale convention for scans
_LUMA_WEIGHTS = (0.2989, 0.5870, 0.1140)


@dataclass(frozen=True)
class LabelMap:
    """Connected-component labels: 0 is background, 1..region_count are regions."""

    labels: np.ndarray  # int32 (H, W)
    region_count: int

    @property
    def shape(self):
        return self.labels.shape


def to_gray(image: np.ndarray) -> np.ndarray:
    """Convert a decoded raster to uint8 grayscale.

    Accepts (H, W) or (H, W, 1) single-channel images (passed through)
    and (H, W, 3) RGB images (fixed luma weights, rounded half-up).
    """
    arr = np.asarray(image)
    if arr.ndim == 3 and arr.shape[2] == 1:
        arr = arr[:, :, 0]
    if arr.ndim == 2:
        return np.clip(arr, 0, 255).astype(np.uint8)
    if arr.ndim == 3 and arr.shape[2] == 3:
        wr, wg, wb = _LUMA_WEIGHTS
        f = arr.astype(np.float64)
        luma = wr * f[:, :, 0] + wg * f[:, :, 1] + wb * f[:, :, 2]
        # round half away from zero (values are non-negative)
        return np.floor(luma + 0.5).clip(0, 255).astype(np.uint8)
    raise ValueError(f"unsupported channel count: shape {arr.shape}")


def invert(gray: np.ndarray) -> np.ndarray:
    """Map every pixel x to 255 - x."""
    g = np.asarray(gray, dtype=np.uint8)
    return (255 - g).astype(np.uint8)


def otsu_threshold(gray: np.ndarray) -> int:
    """Threshold maximizing between-class variance of the 256-bin histogram.

    Ties pick the smallest threshold. A constant image has no class
    split; its single value is returned with a warning.
    """
    g = np.asarray(gray, dtype=np.uint8)
    hist = np.bincount(g.ravel(), minlength=256).astype(np.float64)
    total = hist.sum()
    if total == 0:
        raise ValueError("empty image")
    vmin, vmax = int(g.min()), int(g.max())
    if vmin == vmax:
        warnings.warn(
            f"image is constant (value {vmin}); Otsu threshold degenerates",
            stacklevel=2,
        )
        return vmin

    levels = np.arange(256, dtype=np.float64)
    w0 = np.cumsum(hist)  # pixels with value <= t
    w1 = total - w0
    sum0 = np.cumsum(hist * levels)
    mu_total = sum0[-1]
    with np.errstate(divide="ignore", invalid="ignore"):
        mu0 = sum0 / w0
        mu1 = (mu_total - sum0) / w1
        between = w0 * w1 * (mu0 - mu1) ** 2
    between[~np.isfinite(between)] = -1.0
    return int(np.argmax(between))


def binarize(gray: np.ndarray, threshold: int | str = "auto") -> np.ndarray:
    """Binarize: pixel -> 1 iff intensity > threshold.

    ``threshold`` is an integer in [0, 255] or ``"auto"`` for Otsu's
    between-class-variance criterion.
    """
    g = np.asarray(gray, dtype=np.uint8)
    if isinstance(threshold, str):
        if threshold != "auto":
            raise ValueError(f"threshold must be 'auto' or an integer, got {threshold!r}")
        t = otsu_threshold(g)
    else:
        t = int(threshold)
        if not 0 <= t <= 255:
            raise ValueError(f"fixed threshold out of range [0, 255]: {t}")
    return (g > t).astype(np.uint8)


def label_components(bits: np.ndarray) -> LabelMap:
    """8-connected components of the foreground, labeled in raster order."""
    b = np.asarray(bits, dtype=np.uint8)
    labels, count = label_image(b, connectivity=8)
    return LabelMap(labels=labels, region_count=count)


def fill_holes(bits: np.ndarray) -> np.ndarray:
    """Fill enclosed holes: background not 4-connected to the border becomes 1.

    The background complement of 8-connected foreground is traversed
    with 4-connectivity, the standard dual pairing.
    """
    b = np.asarray(bits, dtype=np.uint8)
    if b.size == 0:
        return b.copy()
    bg = (b == 0).astype(np.uint8)
    labels, count = label_image(bg, connectivity=4)
    if count == 0:
        return b.copy()
    border = np.concatenate(
        [labels[0, :], labels[-1, :], labels[:, 0], labels[:, -1]]
    )
    reachable = np.zeros(count + 1, dtype=bool)
    reachable[border] = True
    reachable[0] = True
    hole = ~reachable[labels]
    out = b.copy()
    out[hole] = 1
    return out
