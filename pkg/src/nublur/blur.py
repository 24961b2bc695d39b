"""The spatially varying degradation operator and its adjoint.

A :class:`~nublur.types.BlurField` represents the blur matrix H as a sum of
B diagonally-weighted circulants: H x = sum_b m_b * (k_b conv x), and
H^T x = sum_b corr(m_b * x, k_b). Products are evaluated through the DFT;
:func:`dense_apply` is the direct per-pixel evaluation kept as a
brute-force cross-check.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .conv import correlate_circular, kernel_spectrum
from .types import BlurField, Image, ValidationError


@dataclass(frozen=True, eq=False)
class DenseKernelField:
    """One explicit K x K kernel per pixel, stored as an (H, W, K, K) array."""

    kernels: np.ndarray
    height: int = field(init=False)
    width: int = field(init=False)
    side: int = field(init=False)

    def __init__(self, kernels: np.ndarray, tol: float = 1e-6):
        arr = np.ascontiguousarray(kernels, dtype=np.float64)
        if arr.ndim != 4 or arr.shape[2] != arr.shape[3]:
            raise ValidationError(f"dense kernels must be (H, W, K, K), got {arr.shape}")
        if arr.min() < 0:
            raise ValidationError("negative entry in dense kernel field")
        sums = arr.sum(axis=(2, 3))
        bad = np.argwhere(np.abs(sums - 1.0) > tol)
        if bad.size:
            i, j = bad[0]
            raise ValidationError(
                f"kernel at pixel ({i}, {j}) not unit mass (sum={sums[i, j]:.8f})"
            )
        arr.flags.writeable = False
        object.__setattr__(self, "kernels", arr)
        object.__setattr__(self, "height", arr.shape[0])
        object.__setattr__(self, "width", arr.shape[1])
        object.__setattr__(self, "side", arr.shape[2])


def _check_dims(field_: BlurField, image: Image) -> None:
    if (field_.height, field_.width) != (image.height, image.width):
        raise ValueError(
            f"field size {(field_.height, field_.width)} does not match "
            f"image size {(image.height, image.width)}"
        )


def apply_planes(field_: BlurField, planes: np.ndarray) -> np.ndarray:
    """H @ planes for a (C, H, W) array, without Image wrapping."""
    kernels = field_.basis.kernels
    maps = field_.mixing.maps
    h, w = planes.shape[-2:]
    specs = [kernel_spectrum(k, (h, w)) for k in kernels]
    out = np.zeros_like(planes)
    for c in range(planes.shape[0]):
        u_hat = np.fft.rfft2(planes[c])
        acc = np.zeros((h, w))
        for b in range(len(specs)):  # ascending b: fixed reduction order
            acc += maps[b] * np.fft.irfft2(u_hat * specs[b], s=(h, w))
        out[c] = acc
    return out


def apply_adjoint_planes(field_: BlurField, planes: np.ndarray) -> np.ndarray:
    """H^T @ planes for a (C, H, W) array."""
    kernels = field_.basis.kernels
    maps = field_.mixing.maps
    h, w = planes.shape[-2:]
    specs = [kernel_spectrum(k, (h, w)) for k in kernels]
    out = np.zeros_like(planes)
    for c in range(planes.shape[0]):
        acc = np.zeros((h, w))
        for b in range(len(specs)):
            acc += np.fft.irfft2(np.fft.rfft2(maps[b] * planes[c]) * np.conj(specs[b]), s=(h, w))
        out[c] = acc
    return out


def apply(field_: BlurField, u: Image) -> Image:
    """Blur an image: out = sum_b m_b * (k_b conv u), each channel independently."""
    _check_dims(field_, u)
    return Image(apply_planes(field_, u.data))


def apply_adjoint(field_: BlurField, x: Image) -> Image:
    """Exact adjoint of :func:`apply`: out = sum_b corr(m_b * x, k_b)."""
    _check_dims(field_, x)
    return Image(apply_adjoint_planes(field_, x.data))


def assemble_kernel_at(field_: BlurField, pixel: tuple[int, int]) -> np.ndarray:
    """The per-pixel kernel sum_b m_b[pixel] * k_b at one location."""
    row, col = pixel
    if not (0 <= row < field_.height and 0 <= col < field_.width):
        raise IndexError(f"pixel {pixel} out of bounds for {field_.height}x{field_.width}")
    weights = field_.mixing.maps[:, row, col]
    return np.tensordot(weights, field_.basis.kernels, axes=1)


def densify(field_: BlurField) -> DenseKernelField:
    """Materialize the per-pixel kernel at every location (H*W*K^2 scalars)."""
    dense = np.einsum("bhw,bij->hwij", field_.mixing.maps, field_.basis.kernels)
    return DenseKernelField(dense)


def dense_apply(dense: DenseKernelField, u: Image) -> Image:
    """Direct O(H*W*K^2) evaluation of the per-pixel blur, periodic indexing.

    Spatial-domain reference for :func:`apply`; no FFTs involved.
    """
    if (dense.height, dense.width) != (u.height, u.width):
        raise ValueError(
            f"dense field size {(dense.height, dense.width)} does not match "
            f"image size {(u.height, u.width)}"
        )
    k = dense.side
    r = k // 2
    out = np.zeros_like(u.data)
    for c in range(u.channels):
        plane = u.data[c]
        acc = np.zeros_like(plane)
        for dy in range(-r, r + 1):
            for dx in range(-r, r + 1):
                # out[p] += k_p[center + d] * u[p - d]
                shifted = np.roll(plane, (dy, dx), axis=(0, 1))
                acc += dense.kernels[:, :, r + dy, r + dx] * shifted
        out[c] = acc
    return Image(out)
