"""Dense complex linear-algebra kernels.

Shifted solves, singular-value extremes, the matrix exponential and
principal-branch fractional matrix powers, plus operator norms on the
sequence spaces l^p.  Everything here is a pure function of immutable
inputs and safe to call concurrently.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla
from scipy.linalg import lapack

from .errors import (
    ConvergenceFailure,
    DimensionMismatch,
    DomainError,
    NonSquare,
    Overflow,
    SingularShift,
    SpectrumOnCut,
)

#: condition-estimate threshold separating genuine spectrum hits from
#: benign ill-conditioning at double precision
COND_LIMIT = 1e14

#: conditioning beyond this is reported as a convergence failure
ILL_COND_LIMIT = 1e15

_PADE13_B = np.array(
    [
        64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
        1187353796428800.0, 129060195264000.0, 10559470521600.0,
        670442572800.0, 33522128640.0, 1323241920.0, 40840800.0,
        960960.0, 16380.0, 182.0, 1.0,
    ]
)
_THETA13 = 5.371920351148152


def as_complex_matrix(a, name: str = "matrix") -> np.ndarray:
    """Validate and return a 2-d complex array with finite entries."""
    arr = np.atleast_2d(np.asarray(a, dtype=complex))
    if arr.ndim != 2 or arr.size == 0:
        raise DimensionMismatch(f"{name} must be a nonempty 2-d array")
    if not np.all(np.isfinite(arr)):
        raise DimensionMismatch(f"{name} contains non-finite entries")
    return arr


def _require_square(arr: np.ndarray, name: str = "matrix") -> None:
    if arr.shape[0] != arr.shape[1]:
        raise NonSquare(f"{name} must be square, got {arr.shape}")


@dataclass(frozen=True)
class SingularTriple:
    """Largest and smallest singular values of a matrix.

    ``iterations`` counts the inverse-iteration refinement steps applied
    to the smallest singular value (0 when the direct factorization was
    accepted as-is).
    """

    sigma_max: float
    sigma_min: float
    iterations: int


def solve_shifted(a, z: complex, b) -> np.ndarray:
    """Solve (z*I - a) x = b with a partial-pivoted LU factorization.

    Raises SingularShift when the 1-norm condition estimate of z*I - a
    exceeds ``COND_LIMIT``, which signals that z lies in the numerical
    spectrum of ``a``.
    """
    a = as_complex_matrix(a, "a")
    _require_square(a, "a")
    b_arr = np.asarray(b, dtype=complex)
    vector_input = b_arr.ndim == 1
    if vector_input:
        b_arr = b_arr[:, None]
    if b_arr.ndim != 2 or b_arr.shape[0] != a.shape[0]:
        raise DimensionMismatch(
            f"rhs has {b_arr.shape[0]} rows, expected {a.shape[0]}"
        )

    m = z * np.eye(a.shape[0], dtype=complex) - a
    anorm = np.abs(m).sum(axis=0).max() if m.size else 0.0
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")  # exact singularity handled below
            lu, piv = sla.lu_factor(m, check_finite=False)
    except sla.LinAlgError as exc:  # exactly singular
        raise SingularShift(z, np.inf) from exc
    rcond, info = lapack.zgecon(lu, anorm, norm="1")
    if info != 0 or not np.isfinite(rcond) or rcond <= 1.0 / COND_LIMIT:
        cond = np.inf if rcond == 0 else 1.0 / max(rcond, 1e-300)
        raise SingularShift(z, cond)

    x = sla.lu_solve((lu, piv), b_arr, check_finite=False)
    # one step of iterative refinement keeps the componentwise residual
    # near the 1e-10 * ||b|| contract even for mildly ill-conditioned shifts
    resid = b_arr - m @ x
    bnorm = np.abs(b_arr).max() if b_arr.size else 0.0
    if bnorm > 0 and np.abs(resid).max() > 1e-13 * bnorm:
        x = x + sla.lu_solve((lu, piv), resid, check_finite=False)
    return x[:, 0] if vector_input else x


def singular_extremes(m) -> SingularTriple:
    """Extreme singular values of ``m``.

    Uses a full dense SVD, then refines the smallest singular value of a
    square nonsingular input by inverse iteration on the Gram matrix
    through the LU factors of ``m``.
    """
    arr = as_complex_matrix(m, "m")
    try:
        u, s, vh = np.linalg.svd(arr)
    except np.linalg.LinAlgError as exc:
        raise ConvergenceFailure("SVD did not converge") from exc
    sigma_max = float(s[0])
    sigma_min = float(s[-1])
    iterations = 0

    if arr.shape[0] == arr.shape[1] and sigma_min > 0.0:
        sigma_min, iterations = _refine_sigma_min(
            arr, vh[-1].conj(), sigma_min
        )
        if sigma_min > 0 and sigma_max / sigma_min > ILL_COND_LIMIT:
            raise ConvergenceFailure(
                f"conditioning {sigma_max / sigma_min:.3e} beyond "
                f"{ILL_COND_LIMIT:.0e}"
            )
    return SingularTriple(sigma_max, sigma_min, iterations)


def _refine_sigma_min(arr, v0, sigma0, max_iter: int = 50):
    """Inverse iteration for the smallest singular value.

    Applies (M^H M)^{-1} via two triangular solves per step, starting from
    the SVD's right singular vector.  Falls back to the unrefined value if
    the factorization degenerates.
    """
    try:
        lu, piv = sla.lu_factor(arr, check_finite=False)
    except sla.LinAlgError:
        return sigma0, 0
    v = v0 / np.linalg.norm(v0)
    sigma = sigma0
    with np.errstate(all="ignore"):
        for it in range(1, max_iter + 1):
            w = sla.lu_solve((lu, piv), v, trans=2, check_finite=False)
            w = sla.lu_solve((lu, piv), w, trans=0, check_finite=False)
            norm_w = np.linalg.norm(w)
            if not np.isfinite(norm_w) or norm_w == 0.0:
                return sigma0, 0
            new_sigma = 1.0 / np.sqrt(norm_w)
            v = w / norm_w
            if abs(new_sigma - sigma) <= 1e-13 * sigma:
                return float(new_sigma), it
            sigma = new_sigma
    raise ConvergenceFailure(
        f"inverse iteration for sigma_min hit the {max_iter}-step cap"
    )


def _is_numerically_normal(a: np.ndarray, tol: float = 1e-12) -> bool:
    scale = np.linalg.norm(a, "fro")
    if scale == 0.0:
        return True
    comm = a.conj().T @ a - a @ a.conj().T
    return np.linalg.norm(comm, "fro") <= tol * scale**2


def matrix_exponential(a, t: float = 1.0) -> np.ndarray:
    """Compute exp(t*a).

    Normal matrices (commutator below 1e-12 * ||a||^2) go through a unitary
    Schur diagonalization; everything else uses scaling-and-squaring with
    the order-13 diagonal Pade approximant, scale set by the 1-norm.
    """
    a = as_complex_matrix(a, "a")
    _require_square(a, "a")
    if t < 0:
        raise DomainError(f"time must be nonnegative, got {t}")
    n = a.shape[0]
    if t == 0.0:
        return np.eye(n, dtype=complex)

    with np.errstate(over="ignore", invalid="ignore"):
        if _is_numerically_normal(a):
            tvals, z = sla.schur(a, output="complex")
            w = np.diag(tvals)
            result = (z * np.exp(t * w)) @ z.conj().T
        else:
            result = _expm_pade13(t * a)

    if not np.all(np.isfinite(result)) or np.abs(result).max() > 1e300:
        raise Overflow(
            f"exp({t}*A) exceeds the representable range; growth bound too "
            "large for the requested horizon"
        )
    return result


def _expm_pade13(a: np.ndarray) -> np.ndarray:
    norm1 = np.abs(a).sum(axis=0).max()
    squarings = 0
    if norm1 > _THETA13:
        squarings = int(np.ceil(np.log2(norm1 / _THETA13)))
        a = a / (2.0**squarings)
    b = _PADE13_B
    n = a.shape[0]
    ident = np.eye(n, dtype=complex)
    a2 = a @ a
    a4 = a2 @ a2
    a6 = a4 @ a2
    u = a @ (a6 @ (b[13] * a6 + b[11] * a4 + b[9] * a2)
             + b[7] * a6 + b[5] * a4 + b[3] * a2 + b[1] * ident)
    v = (a6 @ (b[12] * a6 + b[10] * a4 + b[8] * a2)
         + b[6] * a6 + b[4] * a4 + b[2] * a2 + b[0] * ident)
    f = np.linalg.solve(v - u, u + v)
    for _ in range(squarings):
        f = f @ f
    return f


def fractional_power(aneg, tau: float) -> np.ndarray:
    """Principal-branch power ``aneg**tau`` of a matrix with spectrum in
    the open right half-plane.

    Route: complex Schur form, then on the triangular factor a square-root
    staircase (Bjorck-Hammarling recurrence) brings the spectrum near 1,
    a truncated logarithm series and the matrix exponential finish the
    fractional part; integer parts are exact matrix powers.
    """
    a = as_complex_matrix(aneg, "aneg")
    _require_square(a, "aneg")
    tau = float(tau)
    n = a.shape[0]

    tmat, q = sla.schur(a, output="complex")
    diag = np.diag(tmat)
    if np.any(diag.real <= 1e-13 * max(np.abs(diag).max(), 1.0)):
        bad = diag[np.argmin(diag.real)]
        raise SpectrumOnCut(
            f"eigenvalue {bad} has nonpositive real part; principal branch "
            "undefined"
        )

    if tau == round(tau):
        return _integer_power(a, int(round(tau)))

    k = int(np.floor(tau))
    s = tau - k
    ts = _triangular_fractional(tmat, s)
    frac = q @ ts @ q.conj().T
    if k == 0:
        return frac
    return _integer_power(a, k) @ frac


def _integer_power(a: np.ndarray, k: int) -> np.ndarray:
    if k >= 0:
        return np.linalg.matrix_power(a, k)
    inv = np.linalg.solve(a, np.eye(a.shape[0], dtype=complex))
    return np.linalg.matrix_power(inv, -k)


def _triangular_fractional(tmat: np.ndarray, s: float) -> np.ndarray:
    """t**s for upper-triangular t with spectrum in Re > 0 and s in (0,1)."""
    n = tmat.shape[0]
    ident = np.eye(n, dtype=complex)
    if n == 1:
        return np.array([[tmat[0, 0] ** s]], dtype=complex)

    # square-root staircase until within the series radius
    r = tmat.copy()
    roots = 0
    while np.abs(r - ident).sum(axis=0).max() > 0.25 and roots < 64:
        r = _sqrtm_triu(r)
        roots += 1

    log_small = _logm_near_identity(r - ident)
    return _expm_pade13((s * 2.0**roots) * log_small)


def _sqrtm_triu(t: np.ndarray) -> np.ndarray:
    """Principal square root of an upper-triangular matrix.

    Column recurrence vectorized over superdiagonals; valid because the
    spectrum sits in the open right half-plane (no cancellation in
    r_ii + r_jj).
    """
    n = t.shape[0]
    r = np.zeros_like(t)
    d = np.sqrt(np.diag(t))
    np.fill_diagonal(r, d)
    for off in range(1, n):
        i = np.arange(n - off)
        j = i + off
        if off == 1:
            s = t[i, j]
        else:
            s = t[i, j] - np.array(
                [r[ii, ii + 1: jj] @ r[ii + 1: jj, jj] for ii, jj in zip(i, j)]
            )
        r[i, j] = s / (d[i] + d[j])
    return r


def _logm_near_identity(e: np.ndarray, terms: int = 40) -> np.ndarray:
    """log(I + e) by the Mercator series; requires ||e|| <= ~0.25."""
    acc = np.zeros_like(e)
    power = np.eye(e.shape[0], dtype=complex)
    for j in range(1, terms + 1):
        power = power @ e
        acc += ((-1.0) ** (j + 1) / j) * power
    return acc


def lp_operator_norm(m, p: float, samples: int = 200, seed: int = 0):
    """Operator norm of ``m`` on l^p, as a (lower, upper) interval.

    Exact (lower == upper) for p in {1, 2, inf}.  Otherwise the upper
    bound interpolates the exact l^1/l^2/l^inf norms (Riesz-Thorin) and
    the lower bound maximizes over canonical basis vectors plus ``samples``
    seeded random unit vectors.
    """
    arr = as_complex_matrix(m, "m")
    if p == 2:
        v = float(np.linalg.svd(arr, compute_uv=False)[0])
        return v, v
    if p == 1:
        v = float(np.abs(arr).sum(axis=0).max())
        return v, v
    if np.isinf(p):
        v = float(np.abs(arr).sum(axis=1).max())
        return v, v
    if p < 1:
        raise DimensionMismatch(f"p must be >= 1, got {p}")

    if p > 2:  # duality: ||M||_p = ||M^T||_{p'} on l^p
        q = p / (p - 1.0)
        lo, hi = lp_operator_norm(arr.T, q, samples=samples, seed=seed)
        return lo, hi

    theta = 2.0 / p - 1.0  # p in (1, 2)
    n1 = np.abs(arr).sum(axis=0).max()
    n2 = np.linalg.svd(arr, compute_uv=False)[0]
    upper = float(n1**theta * n2 ** (1.0 - theta))

    lower = 0.0
    cols = np.abs(arr)
    # canonical vectors give the column p-norms exactly
    colnorms = (cols**p).sum(axis=0) ** (1.0 / p)
    lower = float(colnorms.max())
    rng = np.random.default_rng(seed)
    for _ in range(samples):
        v = rng.standard_normal(arr.shape[1]) + 1j * rng.standard_normal(
            arr.shape[1]
        )
        v /= np.linalg.norm(v, ord=p)
        lower = max(lower, float(np.linalg.norm(arr @ v, ord=p)))
    return min(lower, upper), upper


def operator_norm(m, p: float = 2, samples: int = 200, seed: int = 0) -> float:
    """Certified upper bound for the l^p operator norm (exact for 1, 2, inf)."""
    return lp_operator_norm(m, p, samples=samples, seed=seed)[1]
