"""Core domain types: images, kernel bases, mixing fields and solver configs.

All types are immutable after construction (arrays are locked read-only) and
therefore safe to share across threads. Constructors validate their
invariants and raise :class:`ValidationError` on bad input; :func:`validate`
re-runs the same checks in report form.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

#: Tolerance for "sums to one" checks on freshly constructed objects.
NORM_TOL = 1e-6


class ValidationError(ValueError):
    """Raised when a constructor receives data violating a type invariant."""


@dataclass(frozen=True)
class ValidationReport:
    """Outcome of an invariant check: ``ok`` or the first violation found."""

    ok: bool
    reason: Optional[str] = None

    def __bool__(self) -> bool:
        return self.ok


def _freeze(arr: np.ndarray) -> np.ndarray:
    out = np.ascontiguousarray(arr, dtype=np.float64)
    if out is arr:
        out = arr.copy()
    out.flags.writeable = False
    return out


@dataclass(frozen=True, eq=False)
class Image:
    """Planar floating-point raster, stored as a (channels, height, width) array.

    Values are nominally in [0, 1]; latent estimates may exceed 1. All
    samples must be finite.
    """

    data: np.ndarray
    width: int = field(init=False)
    height: int = field(init=False)
    channels: int = field(init=False)

    def __post_init__(self):
        arr = np.asarray(self.data, dtype=np.float64)
        if arr.ndim == 2:
            arr = arr[None, :, :]
        if arr.ndim != 3:
            raise ValidationError(f"image data must be 2-D or 3-D, got ndim={arr.ndim}")
        c, h, w = arr.shape
        if c not in (1, 3):
            raise ValidationError(f"image must have 1 or 3 channels, got {c}")
        if not np.isfinite(arr).all():
            raise ValidationError("image contains non-finite samples")
        object.__setattr__(self, "data", _freeze(arr))
        object.__setattr__(self, "channels", c)
        object.__setattr__(self, "height", h)
        object.__setattr__(self, "width", w)

    @classmethod
    def from_array(cls, arr: np.ndarray) -> "Image":
        return cls(np.asarray(arr))

    def plane(self, c: int) -> np.ndarray:
        return self.data[c]

    @property
    def shape(self) -> tuple[int, int, int]:
        return (self.channels, self.height, self.width)


@dataclass(frozen=True, eq=False)
class KernelBasis:
    """B blur kernels of odd side K, each non-negative with unit mass."""

    kernels: np.ndarray
    count: int = field(init=False)
    side: int = field(init=False)

    def __init__(self, kernels: np.ndarray, renormalize: bool = False, tol: float = NORM_TOL):
        arr = np.ascontiguousarray(kernels, dtype=np.float64)
        if arr.ndim != 3 or arr.shape[1] != arr.shape[2]:
            raise ValidationError(f"kernels must be (B, K, K), got shape {arr.shape}")
        if renormalize:
            sums = arr.sum(axis=(1, 2), keepdims=True)
            if np.any(sums <= 0):
                raise ValidationError("cannot renormalize kernel with non-positive mass")
            arr = arr / sums
        report = _check_kernels(arr, tol)
        if not report.ok:
            raise ValidationError(report.reason)
        object.__setattr__(self, "kernels", _freeze(arr))
        object.__setattr__(self, "count", arr.shape[0])
        object.__setattr__(self, "side", arr.shape[1])


@dataclass(frozen=True, eq=False)
class MixingField:
    """B per-pixel coefficient maps, non-negative, summing to one at each pixel."""

    maps: np.ndarray
    count: int = field(init=False)
    height: int = field(init=False)
    width: int = field(init=False)

    def __init__(self, maps: np.ndarray, renormalize: bool = False, tol: float = NORM_TOL):
        arr = np.ascontiguousarray(maps, dtype=np.float64)
        if arr.ndim != 3:
            raise ValidationError(f"mixing maps must be (B, H, W), got shape {arr.shape}")
        if renormalize:
            sums = arr.sum(axis=0, keepdims=True)
            if np.any(sums <= 0):
                raise ValidationError("cannot renormalize mixing with non-positive pixel sum")
            arr = arr / sums
        report = _check_mixing(arr, tol)
        if not report.ok:
            raise ValidationError(report.reason)
        object.__setattr__(self, "maps", _freeze(arr))
        object.__setattr__(self, "count", arr.shape[0])
        object.__setattr__(self, "height", arr.shape[1])
        object.__setattr__(self, "width", arr.shape[2])


@dataclass(frozen=True, eq=False)
class BlurField:
    """Low-rank spatially varying blur: a kernel basis plus per-pixel mixing maps.

    The per-pixel kernel at pixel i is the convex combination
    sum_b mixing[b, i] * basis[b].
    """

    basis: KernelBasis
    mixing: MixingField

    def __post_init__(self):
        if self.basis.count != self.mixing.count:
            raise ValidationError(
                f"basis count {self.basis.count} != mixing count {self.mixing.count}"
            )

    @property
    def count(self) -> int:
        return self.basis.count

    @property
    def side(self) -> int:
        return self.basis.side

    @property
    def height(self) -> int:
        return self.mixing.height

    @property
    def width(self) -> int:
        return self.mixing.width

    @property
    def storage_scalars(self) -> int:
        """Number of scalars held: B*(K^2 + H*W), vs K^2*H*W for a dense field."""
        b, k = self.basis.count, self.basis.side
        return b * (k * k + self.mixing.height * self.mixing.width)


@dataclass(frozen=True, eq=False)
class SegmentLabels:
    """Dense per-pixel object ids; 0 is background."""

    labels: np.ndarray
    height: int = field(init=False)
    width: int = field(init=False)

    def __post_init__(self):
        arr = np.ascontiguousarray(self.labels)
        if arr.ndim != 2:
            raise ValidationError(f"labels must be (H, W), got shape {arr.shape}")
        if not np.issubdtype(arr.dtype, np.integer):
            if not np.all(arr == np.round(arr)):
                raise ValidationError("labels must be integers")
            arr = arr.astype(np.int64)
        else:
            arr = arr.astype(np.int64)
        if arr.min() < 0:
            raise ValidationError("labels must be non-negative")
        arr.flags.writeable = False
        object.__setattr__(self, "labels", arr)
        object.__setattr__(self, "height", arr.shape[0])
        object.__setattr__(self, "width", arr.shape[1])

    def object_ids(self) -> np.ndarray:
        """Distinct non-zero labels, ascending."""
        ids = np.unique(self.labels)
        return ids[ids > 0]


@dataclass(frozen=True)
class ResponseParams:
    """Camera response parameters: saturation smoothness, gamma, clip threshold."""

    a: float = 50.0
    gamma: float = 2.2
    sat_threshold: float = 0.99

    def __post_init__(self):
        if not self.a > 0:
            raise ValidationError(f"a must be > 0, got {self.a}")
        if not self.gamma >= 1:
            raise ValidationError(f"gamma must be >= 1, got {self.gamma}")
        if not 0 < self.sat_threshold <= 1:
            raise ValidationError(f"sat_threshold must be in (0, 1], got {self.sat_threshold}")


@dataclass(frozen=True)
class RLConfig:
    """Richardson-Lucy solver configuration."""

    max_iters: int = 30
    lambda_tv: float = 0.002
    tv_epsilon: float = 1e-3
    sat_mask_sigma: float = 2.0
    denom_floor: float = 1e-3
    use_saturation_model: bool = True
    work_in_linear: bool = True

    def __post_init__(self):
        if self.max_iters < 1:
            raise ValidationError(f"max_iters must be >= 1, got {self.max_iters}")
        if self.lambda_tv < 0:
            raise ValidationError(f"lambda_tv must be >= 0, got {self.lambda_tv}")
        for name in ("tv_epsilon", "sat_mask_sigma", "denom_floor"):
            if not getattr(self, name) > 0:
                raise ValidationError(f"{name} must be > 0, got {getattr(self, name)}")


def _check_kernels(kernels: np.ndarray, tol: float) -> ValidationReport:
    if kernels.shape[1] % 2 == 0:
        return ValidationReport(False, f"kernel side must be odd, got {kernels.shape[1]}")
    neg = np.argwhere(kernels < 0)
    if neg.size:
        b, i, j = neg[0]
        return ValidationReport(False, f"negative kernel entry at kernel {b}, ({i}, {j})")
    sums = kernels.sum(axis=(1, 2))
    bad = np.argwhere(np.abs(sums - 1.0) > tol)
    if bad.size:
        b = int(bad[0][0])
        return ValidationReport(False, f"kernel {b} not unit mass (sum={sums[b]:.8f})")
    return ValidationReport(True)


def _check_mixing(maps: np.ndarray, tol: float) -> ValidationReport:
    neg = np.argwhere(maps < 0)
    if neg.size:
        b, i, j = neg[0]
        return ValidationReport(False, f"negative mixing coefficient at map {b}, pixel ({i}, {j})")
    sums = maps.sum(axis=0)
    bad = np.argwhere(np.abs(sums - 1.0) > tol)
    if bad.size:
        i, j = bad[0]
        return ValidationReport(
            False, f"mixing not normalized at pixel ({i}, {j}) (sum={sums[i, j]:.8f})"
        )
    return ValidationReport(True)


def validate_arrays(kernels: np.ndarray, maps: np.ndarray, tol: float = NORM_TOL) -> ValidationReport:
    """Check raw kernel/mixing arrays against the BlurField invariants.

    Returns the first violation found, mirroring exactly what the
    constructors enforce. Useful for data read from lossy files.
    """
    kernels = np.asarray(kernels, dtype=np.float64)
    maps = np.asarray(maps, dtype=np.float64)
    if kernels.ndim != 3 or kernels.shape[1] != kernels.shape[2]:
        return ValidationReport(False, f"kernels must be (B, K, K), got shape {kernels.shape}")
    if maps.ndim != 3:
        return ValidationReport(False, f"mixing maps must be (B, H, W), got shape {maps.shape}")
    if kernels.shape[0] != maps.shape[0]:
        return ValidationReport(
            False, f"basis count {kernels.shape[0]} != mixing count {maps.shape[0]}"
        )
    report = _check_kernels(kernels, tol)
    if not report.ok:
        return report
    return _check_mixing(maps, tol)


def validate(field: BlurField, tol: float = NORM_TOL) -> ValidationReport:
    """Re-check a constructed BlurField; reproduces constructor decisions."""
    return validate_arrays(field.basis.kernels, field.mixing.maps, tol)
