"""
Binary morphology with a square structuring element of side
2 * radius + 1. Pixels outside the image never contribute: dilation
treats them as background, erosion as foreground, so both operate on
the window clipped to the image and remain adjoint. That keeps
opening and closing idempotent right up to the border.
"""

from __future__ import annotations

import numpy as np
from scipy import ndimage

from crowdtrack.core.exceptions import InvalidMaskException
from crowdtrack.core.frame import BinaryMask


def _structure(radius: int) -> np.ndarray:
    if radius < 0:
        msg = f"Morphology radius must be non-negative, got {radius}."
        raise InvalidMaskException(msg)

    side = 2 * radius + 1
    return np.ones((side, side), dtype=bool)


def dilate(mask: BinaryMask, radius: int) -> BinaryMask:
    structure = _structure(radius)
    if radius == 0:
        return mask

    return BinaryMask(ndimage.binary_dilation(mask.bits(), structure=structure, border_value=0))


def erode(mask: BinaryMask, radius: int) -> BinaryMask:
    structure = _structure(radius)
    if radius == 0:
        return mask

    return BinaryMask(ndimage.binary_erosion(mask.bits(), structure=structure, border_value=1))


def opening(mask: BinaryMask, radius: int) -> BinaryMask:
    """Erode then dilate, removes specks smaller than the element."""
    return dilate(erode(mask, radius), radius)


def closing(mask: BinaryMask, radius: int) -> BinaryMask:
    """Dilate then erode, fills gaps smaller than the element."""
    return erode(dilate(mask, radius), radius)


def clean(mask: BinaryMask, radius: int) -> BinaryMask:
    """The detector's cleaning sequence: dilate, open, close."""
    return closing(opening(dilate(mask, radius), radius), radius)
