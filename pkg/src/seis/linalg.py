"""Thin SVD, variance truncation, and a numerically stable CCA.

Raw CCA on high-dimensional activations is notoriously fragile: sample
covariances come out ill-conditioned and generalized eigensolvers fail to
converge. The implementation here therefore keeps the classic stable
recipe: truncate each side to the subspace holding 99% of its squared
singular spectrum, whiten both covariance blocks with symmetric inverse
square roots (plus a tiny relative ridge), and read the canonical system
off the SVD of the whitened cross covariance. A brute-force generalized
eigenproblem oracle is included for cross-checking; it shares nothing with
the whitening path beyond covariance formation.
"""

from dataclasses import dataclass

import numpy as np

from .errors import (
    DegenerateRankError,
    DegenerateSampleError,
    NumericalError,
    OracleError,
    ShapeError,
    ValidationError,
)

# Fraction of the squared singular spectrum the retained subspace must cover.
VARIANCE_THRESHOLD = 0.99

# Singular values below RANK_FLOOR * sigma_max are numerically zero and are
# dropped before the variance budget, so noise directions never consume it.
RANK_FLOOR = 1e-12

# Relative ridge added to each covariance diagonal before inversion.
COVARIANCE_RIDGE = 1e-10

# Clamping correlations into [0, 1] may move a value at most this far;
# anything larger is a real numerical failure and must not be hidden.
CLAMP_GUARD = 1e-10


@dataclass(frozen=True)
class TruncatedSubspace:
    """Leading principal subspace of a centered spatial matrix.

    basis has orthonormal columns; projected = basis.T @ centered are the
    coordinates of the data in that subspace (rows stay centered because
    the projection is a linear map over the observation axis).
    """

    basis: np.ndarray            # (d, k)
    singular_values: np.ndarray  # (k,) positive, non-increasing
    projected: np.ndarray        # (k, n)
    retained_variance: float
    k: int


@dataclass(frozen=True)
class CcaResult:
    """Canonical system between two projected data sets.

    correlations are non-increasing values in [0, 1]; column i of
    proj_left / proj_right maps its side's projected data to the variate
    pair (variates_left[i], variates_right[i]), each scaled to unit sample
    variance.
    """

    correlations: np.ndarray    # (r,)
    proj_left: np.ndarray       # (k_a, r)
    proj_right: np.ndarray      # (k_a_prime, r)
    variates_left: np.ndarray   # (r, n)
    variates_right: np.ndarray  # (r, n)
    r: int


def thin_svd(m):
    """Thin SVD via LAPACK: returns (U, S, V) with V holding right vectors as columns.

    U @ diag(S) @ V.T reconstructs the input to a relative Frobenius error
    of a few machine epsilons.
    """
    m = np.asarray(m, dtype=np.float64)
    if m.ndim != 2:
        raise ShapeError(f"expected a 2-D matrix, got ndim={m.ndim}")
    if not np.all(np.isfinite(m)):
        raise ValidationError("matrix contains non-finite entries")
    u, s, vt = np.linalg.svd(m, full_matrices=False)
    return u, s, vt.T


def row_cosines(a, b) -> np.ndarray:
    """Absolute cosine similarity between matching rows of two matrices.

    Raises NumericalError on any zero-norm row; silent zeros would be
    indistinguishable from genuine orthogonality. Rounding can push a
    cosine past 1 by a few machine epsilons; such values are clamped back,
    but an excess beyond CLAMP_GUARD is a real failure and raises.
    """
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise ShapeError(f"row shapes differ: {a.shape} vs {b.shape}")
    na = np.linalg.norm(a, axis=1)
    nb = np.linalg.norm(b, axis=1)
    if np.any(na == 0.0) or np.any(nb == 0.0):
        raise NumericalError("zero-norm vector in cosine computation")
    cos = np.abs(np.einsum("ij,ij->i", a, b)) / (na * nb)
    if not np.all(np.isfinite(cos)):
        raise NumericalError("non-finite cosine")
    if np.any(cos > 1.0 + CLAMP_GUARD):
        raise NumericalError(
            f"cosine exceeds 1 by {float(np.max(cos) - 1.0):.3e}, beyond the clamp guard"
        )
    return np.minimum(cos, 1.0)


def _variance_truncate(u, s, centered) -> TruncatedSubspace:
    """Shared truncation core: rank floor, 99% budget, projection."""
    if s.size == 0 or s[0] <= 0.0:
        raise DegenerateRankError("all singular values are zero")
    kept = int(np.count_nonzero(s >= RANK_FLOOR * s[0]))
    s = s[:kept]
    power = s**2
    frac = np.cumsum(power) / np.sum(power)
    k = int(np.searchsorted(frac, VARIANCE_THRESHOLD) + 1)
    basis = np.ascontiguousarray(u[:, :k])
    return TruncatedSubspace(
        basis=basis,
        singular_values=s[:k].copy(),
        projected=basis.T @ centered,
        retained_variance=float(frac[k - 1]),
        k=k,
    )


def truncate_99(u, s, centered) -> TruncatedSubspace:
    """Keep the smallest leading set of directions covering 99% of sigma^2.

    u, s come from thin_svd of `centered`; k is the smallest index whose
    cumulative squared singular mass reaches the threshold, computed after
    numerically-zero singular values are dropped.
    """
    u = np.asarray(u, dtype=np.float64)
    s = np.asarray(s, dtype=np.float64)
    centered = np.asarray(centered, dtype=np.float64)
    if u.ndim != 2 or s.ndim != 1 or u.shape[1] != s.size:
        raise ShapeError(f"inconsistent factor shapes: u {u.shape}, s {s.shape}")
    if u.shape[0] != centered.shape[0]:
        raise ShapeError(
            f"basis rows {u.shape[0]} do not match matrix rows {centered.shape[0]}"
        )
    if np.any(s < 0.0) or np.any(np.diff(s) > 0.0):
        raise ValidationError("singular values must be non-negative and non-increasing")
    return _variance_truncate(u, s, centered)


def spatial_subspace(centered) -> TruncatedSubspace:
    """Truncated principal subspace of a centered matrix, via the Gram route.

    Identical in content to thin_svd + truncate_99 but computed from the
    smaller Gram matrix, which is several times faster on the wide
    matrices the scoring pipeline produces. The Gram route is less
    accurate only for directions far below the rank floor, and those never
    enter the retained subspace.
    """
    centered = np.asarray(centered, dtype=np.float64)
    if centered.ndim != 2:
        raise ShapeError(f"expected a 2-D matrix, got ndim={centered.ndim}")
    if not np.all(np.isfinite(centered)):
        raise ValidationError("matrix contains non-finite entries")
    d, n = centered.shape
    if d <= n:
        gram = centered @ centered.T
        lam, u = np.linalg.eigh(gram)
        lam = lam[::-1]
        u = u[:, ::-1]
        s = np.sqrt(np.clip(lam, 0.0, None))
    else:
        gram = centered.T @ centered
        lam, v = np.linalg.eigh(gram)
        lam = lam[::-1]
        v = v[:, ::-1]
        s = np.sqrt(np.clip(lam, 0.0, None))
        if s.size == 0 or s[0] <= 0.0:
            raise DegenerateRankError("all singular values are zero")
        kept = s >= RANK_FLOOR * s[0]
        s = s[kept]
        u = (centered @ v[:, kept]) / s
    return _variance_truncate(u, s, centered)


def _sym_inv_sqrt(c):
    """Symmetric inverse square root of a symmetric positive definite matrix."""
    w, v = np.linalg.eigh(c)
    if w[0] <= 0.0 or not np.all(np.isfinite(w)):
        raise NumericalError(
            "covariance is not positive definite even after regularization"
        )
    return (v / np.sqrt(w)) @ v.T


def cca(left: TruncatedSubspace, right: TruncatedSubspace) -> CcaResult:
    """Canonical correlation analysis between two truncated subspaces.

    Sample covariances of the projected rows are formed without re-centering
    (rows are centered upstream and projection preserves that), each block
    is regularized by COVARIANCE_RIDGE times its mean diagonal, and the
    canonical directions come from the SVD of the whitened cross
    covariance, mapped back through the inverse square roots. Variates are
    rescaled to unit sample variance, and the reported correlations are the
    realized correlations of the variate pairs, which keeps them consistent
    to machine precision with any cosine computed on the variates. Sign
    conventions (largest entry of each left vector positive, each pair's
    correlation non-negative) make the output deterministic.
    """
    x = np.asarray(left.projected, dtype=np.float64)
    y = np.asarray(right.projected, dtype=np.float64)
    kx, n = x.shape
    ky, n2 = y.shape
    if n != n2:
        raise ShapeError(f"observation counts differ: {n} vs {n2}")
    if n < 2:
        raise DegenerateSampleError(f"CCA needs at least 2 observations, got {n}")

    cxx = x @ x.T / (n - 1)
    cyy = y @ y.T / (n - 1)
    cxy = x @ y.T / (n - 1)
    cxx[np.diag_indices(kx)] += COVARIANCE_RIDGE * np.trace(cxx) / kx
    cyy[np.diag_indices(ky)] += COVARIANCE_RIDGE * np.trace(cyy) / ky

    inv_sqrt_x = _sym_inv_sqrt(cxx)
    inv_sqrt_y = _sym_inv_sqrt(cyy)
    whitened = inv_sqrt_x @ cxy @ inv_sqrt_y
    if not np.all(np.isfinite(whitened)):
        raise NumericalError("whitened cross covariance contains non-finite entries")

    e, _, ft = np.linalg.svd(whitened)
    r = min(kx, ky)
    w_left = inv_sqrt_x @ e[:, :r]
    v_right = inv_sqrt_y @ ft[:r].T

    p = w_left.T @ x
    q = v_right.T @ y
    sp = np.linalg.norm(p, axis=1) / np.sqrt(n - 1)
    sq = np.linalg.norm(q, axis=1) / np.sqrt(n - 1)
    if np.any(sp == 0.0) or np.any(sq == 0.0):
        raise NumericalError("zero-variance canonical variate")
    w_left /= sp
    v_right /= sq
    p /= sp[:, None]
    q /= sq[:, None]

    # sign conventions: dominant entry of each w positive, then flip v so
    # the pair correlates non-negatively
    peak = np.argmax(np.abs(w_left), axis=0)
    sign_w = np.sign(w_left[peak, np.arange(r)])
    sign_w[sign_w == 0.0] = 1.0
    w_left *= sign_w
    p *= sign_w[:, None]
    dots = np.einsum("ij,ij->i", p, q)
    sign_v = np.where(dots < 0.0, -1.0, 1.0)
    v_right *= sign_v
    q *= sign_v[:, None]

    rho = row_cosines(p, q)
    order = np.argsort(-rho, kind="stable")
    return CcaResult(
        correlations=rho[order],
        proj_left=np.ascontiguousarray(w_left[:, order]),
        proj_right=np.ascontiguousarray(v_right[:, order]),
        variates_left=np.ascontiguousarray(p[order]),
        variates_right=np.ascontiguousarray(q[order]),
        r=r,
    )


def cca_oracle(left: TruncatedSubspace, right: TruncatedSubspace) -> np.ndarray:
    """Reference canonical correlations via the generalized eigenproblem.

    Brute force and test-oriented: explicit inverses, dense eigen-solve,
    no regularization. rho_i^2 are the eigenvalues of
    Cxx^-1 Cxy Cyy^-1 Cyx, sorted descending. Intended for small, well
    conditioned instances; on a singular covariance it raises OracleError
    and the caller should regenerate the instance.
    """
    x = np.asarray(left.projected, dtype=np.float64)
    y = np.asarray(right.projected, dtype=np.float64)
    kx = x.shape[0]
    cov = np.cov(x, y)
    cxx = cov[:kx, :kx]
    cxy = cov[:kx, kx:]
    cyx = cov[kx:, :kx]
    cyy = cov[kx:, kx:]
    try:
        m = np.linalg.inv(cxx) @ cxy @ np.linalg.inv(cyy) @ cyx
    except np.linalg.LinAlgError as exc:
        raise OracleError(f"singular covariance: {exc}") from exc
    lam = np.linalg.eigvals(m)
    if np.max(np.abs(lam.imag)) > 1e-6:
        raise OracleError("eigenvalues are not numerically real")
    rho = np.sqrt(np.clip(lam.real, 0.0, None))
    rho = np.sort(rho)[::-1]
    return rho[: min(kx, y.shape[0])]
