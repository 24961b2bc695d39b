"""Circular convolution / correlation via the DFT, plus edge padding helpers.

The internal boundary model is periodic so that :func:`correlate_circular`
is the exact adjoint of :func:`convolve_circular`. User-facing pipelines
pad with edge replication before solving and crop after, which hides the
wraparound.

Kernels are center-anchored: entry (K//2, K//2) multiplies the output
pixel's own location. All operations are deterministic (single FFT path,
fixed reduction order).
"""

from __future__ import annotations

import numpy as np


def embed_kernel(kernel: np.ndarray, shape: tuple[int, int]) -> np.ndarray:
    """Zero-embed a K x K kernel into an H x W grid with its center at (0, 0).

    The circular shift makes plain spectral multiplication implement
    center-anchored convolution.
    """
    kernel = np.asarray(kernel, dtype=np.float64)
    h, w = shape
    k = kernel.shape[0]
    if kernel.ndim != 2 or kernel.shape[0] != kernel.shape[1]:
        raise ValueError(f"kernel must be square, got shape {kernel.shape}")
    if k > h or k > w:
        raise ValueError(f"kernel side {k} exceeds plane shape {shape}")
    emb = np.zeros((h, w))
    emb[:k, :k] = kernel
    r = k // 2
    return np.roll(emb, (-r, -r), axis=(0, 1))


def kernel_spectrum(kernel: np.ndarray, shape: tuple[int, int]) -> np.ndarray:
    """rfft2 of the center-anchored embedding; reusable across many planes."""
    return np.fft.rfft2(embed_kernel(kernel, shape))


def convolve_circular(plane: np.ndarray, kernel: np.ndarray) -> np.ndarray:
    """Periodic convolution: out[i] = sum_j kernel[j] * plane[i - j].

    j ranges over offsets from the kernel center; indices wrap around.
    Linear in both arguments.
    """
    plane = np.asarray(plane, dtype=np.float64)
    spec = kernel_spectrum(kernel, plane.shape)
    return np.fft.irfft2(np.fft.rfft2(plane) * spec, s=plane.shape)


def correlate_circular(plane: np.ndarray, kernel: np.ndarray) -> np.ndarray:
    """Exact adjoint of :func:`convolve_circular` for the same kernel.

    Satisfies <convolve(x, k), y> == <x, correlate(y, k)> for all x, y.
    """
    plane = np.asarray(plane, dtype=np.float64)
    spec = kernel_spectrum(kernel, plane.shape)
    return np.fft.irfft2(np.fft.rfft2(plane) * np.conj(spec), s=plane.shape)


def pad_edge(image: np.ndarray, margin: int) -> np.ndarray:
    """Replicate border rows/columns outward by ``margin`` pixels.

    Works on (H, W) planes and (C, H, W) stacks; channels are not padded.
    """
    if margin < 0:
        raise ValueError(f"margin must be >= 0, got {margin}")
    if margin == 0:
        return np.array(image, dtype=np.float64)
    image = np.asarray(image, dtype=np.float64)
    if image.ndim == 2:
        return np.pad(image, margin, mode="edge")
    if image.ndim == 3:
        return np.pad(image, ((0, 0), (margin, margin), (margin, margin)), mode="edge")
    raise ValueError(f"expected 2-D or 3-D array, got ndim={image.ndim}")


def crop(image: np.ndarray, margin: int) -> np.ndarray:
    """Inverse of :func:`pad_edge`: drop ``margin`` pixels from each border."""
    if margin < 0:
        raise ValueError(f"margin must be >= 0, got {margin}")
    image = np.asarray(image, dtype=np.float64)
    if margin == 0:
        return image.copy()
    if 2 * margin >= image.shape[-1] or 2 * margin >= image.shape[-2]:
        raise ValueError(
            f"crop margin {margin} too large for shape {image.shape[-2:]}"
        )
    return image[..., margin:-margin, margin:-margin].copy()
