"""Spatial transforms over activation tensors and their parameter sampling.

Transforms act directly at the representation level: each (batch, channel)
slice of a tensor is warped by the same affine map. Warping uses a single
composed inverse map with bilinear interpolation, so a composite transform
is resampled once rather than blurred by repeated interpolation.

All randomness flows through named, counter-based Philox streams so a
(master seed, trial, role) triple yields the same draws on any machine and
regardless of execution order.
"""

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import ShapeError, ValidationError
from .tensor_io import validate_tensor

# Sampling ranges for the stochastic transform parameters.
TRANSLATION_LIMIT = 0.15        # fraction of each spatial dimension
SCALE_RANGE = (0.8, 1.2)
ROTATION_RANGE = (0.0, 360.0)   # degrees


class ConditionKind(str, Enum):
    """The six experimental conditions."""

    IDENTITY = "identity"
    TRANSLATION = "translation"
    SCALING = "scaling"
    ROTATION = "rotation"
    AFFINE = "affine"
    RANDOM_BASELINE = "random_baseline"


CONDITION_ORDER = (
    ConditionKind.IDENTITY,
    ConditionKind.TRANSLATION,
    ConditionKind.SCALING,
    ConditionKind.ROTATION,
    ConditionKind.AFFINE,
    ConditionKind.RANDOM_BASELINE,
)

GEOMETRIC_CONDITIONS = (
    ConditionKind.TRANSLATION,
    ConditionKind.SCALING,
    ConditionKind.ROTATION,
    ConditionKind.AFFINE,
)


@dataclass(frozen=True)
class AffineParams:
    """Affine warp parameters.

    tx/ty are signed fractions of the width/height, scale is isotropic
    about the grid center, and positive angles rotate counter-clockwise
    about the grid center (a +90 degree rotation of a square slice equals
    numpy.rot90 by one quarter turn).
    """

    tx: float = 0.0
    ty: float = 0.0
    scale: float = 1.0
    angle_deg: float = 0.0

    def is_identity(self) -> bool:
        return self.tx == 0.0 and self.ty == 0.0 and self.scale == 1.0 and (
            self.angle_deg % 360.0 == 0.0
        )


IDENTITY_PARAMS = AffineParams()


def make_stream(master_seed: int, trial: int = 0, role: int = 0) -> np.random.Generator:
    """Independent deterministic random stream for a (seed, trial, role) triple.

    Streams are Philox4x32-10 counter-based generators keyed by two 64-bit
    words: the master seed and (trial << 1) | role. Distinct keys give
    statistically independent streams, so trials can run in any order or
    in parallel and still reproduce the same draws. Role 0 is the
    reference draw, role 1 the alternate/parameter draw.
    """
    if not (0 <= master_seed < 2**64):
        raise ValidationError(f"master seed must be a uint64, got {master_seed}")
    if not (0 <= trial < 2**63):
        raise ValidationError(f"trial index out of range: {trial}")
    if role not in (0, 1):
        raise ValidationError(f"role must be 0 or 1, got {role}")
    key = np.array([master_seed, (trial << 1) | role], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def sample_params(kind, rng: np.random.Generator) -> AffineParams:
    """Draw transform parameters for a condition from the given stream.

    identity yields the identity parameters without consuming randomness;
    random_baseline has no affine parametrization and is rejected. The
    draw order is fixed (tx, ty, scale, angle) so one stream always yields
    the same parameters.
    """
    kind = ConditionKind(kind)
    if kind is ConditionKind.RANDOM_BASELINE:
        raise ValidationError("random_baseline has no affine parameters")
    if kind is ConditionKind.IDENTITY:
        return IDENTITY_PARAMS
    tx = ty = 0.0
    scale = 1.0
    angle = 0.0
    if kind in (ConditionKind.TRANSLATION, ConditionKind.AFFINE):
        tx = float(rng.uniform(-TRANSLATION_LIMIT, TRANSLATION_LIMIT))
        ty = float(rng.uniform(-TRANSLATION_LIMIT, TRANSLATION_LIMIT))
    if kind in (ConditionKind.SCALING, ConditionKind.AFFINE):
        scale = float(rng.uniform(*SCALE_RANGE))
    if kind in (ConditionKind.ROTATION, ConditionKind.AFFINE):
        angle = float(rng.uniform(*ROTATION_RANGE))
    return AffineParams(tx=tx, ty=ty, scale=scale, angle_deg=angle)


def apply_affine(z, params: AffineParams) -> np.ndarray:
    """Warp every (batch, channel) slice of a tensor by the same affine map.

    Forward model: scale about the grid center, rotate about the center,
    then translate by (tx*w, ty*h) pixels. The center is at
    ((h-1)/2, (w-1)/2) with pixel centers on integer coordinates, which
    makes right-angle rotations of square grids exact permutations.
    Sampling goes through the composed inverse map with bilinear
    interpolation; reads outside the grid contribute zero. Identity
    parameters return a bit-exact copy, and the trig factors of
    right-angle rotations are snapped to integers so those paths reduce
    to exact index remaps.
    """
    z = validate_tensor(z)
    b, c, h, w = z.shape
    if h < 2 or w < 2:
        raise ShapeError(f"warping needs h >= 2 and w >= 2, got ({h}, {w})")
    for name in ("tx", "ty", "scale", "angle_deg"):
        if not math.isfinite(getattr(params, name)):
            raise ValidationError(f"non-finite affine parameter {name}")
    if params.scale <= 0.0:
        raise ValidationError(f"scale must be positive, got {params.scale}")
    if params.is_identity():
        return z.copy()

    angle = params.angle_deg % 360.0
    theta = math.radians(angle)
    cos_t, sin_t = math.cos(theta), math.sin(theta)
    if angle % 90.0 == 0.0:
        cos_t, sin_t = float(round(cos_t)), float(round(sin_t))

    cy, cx = (h - 1) / 2.0, (w - 1) / 2.0
    ys, xs = np.meshgrid(
        np.arange(h, dtype=np.float64), np.arange(w, dtype=np.float64), indexing="ij"
    )
    # invert: undo the translation, rotate back, unscale
    ux = xs - cx - params.tx * w
    uy = ys - cy - params.ty * h
    src_x = (cos_t * ux - sin_t * uy) / params.scale + cx
    src_y = (sin_t * ux + cos_t * uy) / params.scale + cy

    x0 = np.floor(src_x).astype(np.intp)
    y0 = np.floor(src_y).astype(np.intp)
    fx = src_x - x0
    fy = src_y - y0

    flat = z.reshape(b * c, h, w)
    out = np.zeros_like(flat)
    for dy in (0, 1):
        for dx in (0, 1):
            yy = y0 + dy
            xx = x0 + dx
            weight = (fy if dy else 1.0 - fy) * (fx if dx else 1.0 - fx)
            inside = (yy >= 0) & (yy < h) & (xx >= 0) & (xx < w)
            yc = np.clip(yy, 0, h - 1)
            xc = np.clip(xx, 0, w - 1)
            out += flat[:, yc, xc] * (weight * inside)
    return out.reshape(b, c, h, w)


def permute_spatial(z, perm) -> np.ndarray:
    """Move flattened spatial cell i of every slice to position perm[i].

    A permutation is the exactness probe for spatial transforms: it is a
    lossless linear operator on the feature axis, so equivariance scores
    across it should be indistinguishable from the identity case.
    """
    z = validate_tensor(z)
    b, c, h, w = z.shape
    d = h * w
    perm = np.asarray(perm)
    if perm.shape != (d,) or perm.dtype.kind not in "iu":
        raise ValidationError(f"perm must be {d} integer indices")
    if not np.array_equal(np.sort(perm), np.arange(d)):
        raise ValidationError("perm is not a bijection on the spatial cells")
    flat = z.reshape(b, c, d)
    out = np.empty_like(flat)
    out[:, :, perm] = flat
    return out.reshape(b, c, h, w)


def random_baseline(dims, rng: np.random.Generator) -> np.ndarray:
    """Tensor of i.i.d. standard normal entries (a no-shared-structure null)."""
    dims = tuple(int(v) for v in dims)
    if len(dims) != 4 or min(dims) < 1:
        raise ShapeError(f"dims must be four positive integers, got {dims}")
    return rng.standard_normal(dims)
