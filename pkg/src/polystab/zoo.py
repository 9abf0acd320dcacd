"""Families of finite-section generators with known resolvent growth.

Every model is a stable complex matrix (spectrum in the open left
half-plane) carrying family metadata: the analytic resolvent-growth
exponent when one is known in closed form, the growth bound of the
semigroup, normality flags, and the ambient l^p norm.  Block-diagonal
structure is recorded so that downstream sweeps and orbits can use exact
per-block computations.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

import numpy as np

from . import linalg
from .errors import DimensionMismatch, UnstableDamping, UnstableEigenvalue


@dataclass(eq=False)
class GeneratorModel:
    """A generator matrix plus family metadata.

    Instances are immutable after construction (the matrix buffer is
    frozen) and hash by identity, so they can key caches safely.
    """

    matrix: np.ndarray
    family: str
    params: dict = field(default_factory=dict)
    space_p: float = 2.0
    beta_analytic: float | None = None
    omega_analytic: float | None = None
    is_normal: bool = False
    block_dims: tuple[int, ...] | None = None

    def __post_init__(self):
        self.matrix = linalg.as_complex_matrix(self.matrix)
        if self.matrix.shape[0] != self.matrix.shape[1]:
            raise DimensionMismatch("generator must be square")
        if self.block_dims is not None and sum(self.block_dims) != self.dim:
            raise DimensionMismatch("block_dims do not tile the matrix")
        eigs = self.eigenvalues()
        worst = eigs[np.argmax(eigs.real)]
        if worst.real >= 0:
            raise UnstableEigenvalue(worst)
        if self.is_normal:
            a = self.matrix
            comm = a.conj().T @ a - a @ a.conj().T
            scale = np.linalg.norm(a, "fro") ** 2
            if scale > 0 and np.linalg.norm(comm, "fro") > 1e-10 * scale:
                raise DimensionMismatch("matrix flagged normal is not normal")
        self.matrix.flags.writeable = False

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def eigenvalues(self) -> np.ndarray:
        if self.block_dims is not None:
            return np.concatenate(
                [np.linalg.eigvals(blk) for _, blk in self.blocks()]
            )
        return np.linalg.eigvals(self.matrix)

    def blocks(self):
        """Yield (slice, submatrix) pairs; a single dense block if no
        structure is recorded."""
        if self.block_dims is None:
            yield slice(0, self.dim), self.matrix
            return
        start = 0
        for d in self.block_dims:
            sl = slice(start, start + d)
            yield sl, self.matrix[sl, sl]
            start += d

    def to_dict(self) -> dict:
        mat = self.matrix.reshape(-1)
        return {
            "family": self.family,
            "params": {k: _plain(v) for k, v in self.params.items()},
            "dim": self.dim,
            "space_p": _plain(self.space_p),
            "matrix": [[float(z.real), float(z.imag)] for z in mat],
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "GeneratorModel":
        dim = int(doc["dim"])
        flat = np.array(
            [complex(re, im) for re, im in doc["matrix"]], dtype=complex
        )
        if flat.size != dim * dim:
            raise DimensionMismatch("matrix payload does not match dim")
        family = doc["family"]
        block = _FAMILY_BLOCK_SIZE.get(family)
        block_dims = tuple([block] * (dim // block)) if block else None
        return cls(
            matrix=flat.reshape(dim, dim),
            family=family,
            params=dict(doc.get("params", {})),
            space_p=float(doc.get("space_p", 2.0)),
            is_normal=(block == 1),
            block_dims=block_dims,
        )


def _plain(v):
    if isinstance(v, (np.floating, np.integer)):
        return v.item()
    return v


def make_diagonal(eigs: Sequence[complex], space_p: float = 2.0) -> GeneratorModel:
    """Diagonal (normal) baseline model from prescribed eigenvalues.

    All finite diagonal stable matrices have a uniformly bounded resolvent
    on the closed right half-plane, so the analytic growth exponent is 0.
    """
    eigs = np.asarray(list(eigs), dtype=complex)
    if eigs.size == 0:
        raise DimensionMismatch("need at least one eigenvalue")
    bad = eigs[eigs.real >= 0]
    if bad.size:
        raise UnstableEigenvalue(bad[0])
    return GeneratorModel(
        matrix=np.diag(eigs),
        family="diagonal",
        params={"dim": int(eigs.size)},
        space_p=space_p,
        beta_analytic=0.0,
        omega_analytic=float(eigs.real.max()),
        is_normal=True,
        block_dims=tuple([1] * eigs.size),
    )


def make_borichev_tomilov(alpha: float, n: int, space_p: float = 2.0) -> GeneratorModel:
    """Normal family with eigenvalues -k^(-alpha) + i*k, k = 1..n.

    The resolvent peaks at height k^alpha near frequency k, so the growth
    exponent along the imaginary axis is alpha; the semigroup is a
    contraction.
    """
    if alpha <= 0:
        raise UnstableEigenvalue(0.0, "alpha must be positive")
    if n < 2:
        raise DimensionMismatch("need n >= 2")
    k = np.arange(1, n + 1, dtype=float)
    eigs = -(k**-alpha) + 1j * k
    return GeneratorModel(
        matrix=np.diag(eigs),
        family="borichev_tomilov",
        params={"alpha": float(alpha), "n": int(n)},
        space_p=space_p,
        beta_analytic=float(alpha),
        omega_analytic=0.0,
        is_normal=True,
        block_dims=tuple([1] * n),
    )


def make_jordan_growth(
    mu_spacing: float,
    a_decay: float,
    c_gain: float,
    n: int,
    space_p: float = 2.0,
) -> GeneratorModel:
    """Block family of 2x2 Jordan-type blocks with tunable coupling.

    Block k is [[i*mu_k - a_k, c_k], [0, i*mu_k - a_k]] with
    mu_k = k*mu_spacing, a_k = k^(-a_decay), c_k = k^c_gain.  The block
    resolvent peaks like c_k / a_k^2 near frequency mu_k, which gives the
    analytic exponent max(a_decay, 2*a_decay + c_gain); the semigroup is
    unbounded with a polynomial envelope whenever c_gain >= 0.
    """
    if mu_spacing <= 0 or a_decay <= 0:
        raise UnstableEigenvalue(0.0, "mu_spacing and a_decay must be positive")
    if n < 1:
        raise DimensionMismatch("need n >= 1")
    mat = np.zeros((2 * n, 2 * n), dtype=complex)
    for k in range(1, n + 1):
        mu = k * mu_spacing
        a = float(k) ** (-a_decay)
        c = float(k) ** c_gain
        if a <= 0:
            raise UnstableEigenvalue(1j * mu, "damping a_k must be positive")
        i0 = 2 * (k - 1)
        mat[i0, i0] = 1j * mu - a
        mat[i0 + 1, i0 + 1] = 1j * mu - a
        mat[i0, i0 + 1] = c
    beta = max(a_decay, 2.0 * a_decay + c_gain) / 1.0
    return GeneratorModel(
        matrix=mat,
        family="jordan_growth",
        params={
            "mu_spacing": float(mu_spacing),
            "a_decay": float(a_decay),
            "c_gain": float(c_gain),
            "n": int(n),
        },
        space_p=space_p,
        beta_analytic=float(beta),
        omega_analytic=0.0,
        is_normal=False,
        block_dims=tuple([2] * n),
    )


def make_damped_wave(n: int, damping) -> GeneratorModel:
    """First-order damped wave system on n interior grid points of (0, 1).

    The generator is [[0, I], [L, -diag(a)]] where L is the Dirichlet
    second-difference operator on the uniform grid and ``damping`` is
    either a callable a(x) or an array of n samples at the interior nodes.
    The spectrum is verified to lie in the open left half-plane.
    """
    if n < 4:
        raise DimensionMismatch("need n >= 4 interior points")
    h = 1.0 / (n + 1)
    x = h * np.arange(1, n + 1)
    if callable(damping):
        a = np.asarray([damping(xi) for xi in x], dtype=float)
    else:
        a = np.asarray(damping, dtype=float)
        if a.shape != (n,):
            raise DimensionMismatch(f"damping must have {n} samples")
    if not np.all(np.isfinite(a)):
        raise DimensionMismatch("damping samples must be finite")

    lap = (
        np.diag(-2.0 * np.ones(n))
        + np.diag(np.ones(n - 1), 1)
        + np.diag(np.ones(n - 1), -1)
    ) / h**2
    gen = np.zeros((2 * n, 2 * n), dtype=complex)
    gen[:n, n:] = np.eye(n)
    gen[n:, :n] = lap
    gen[n:, n:] = -np.diag(a)

    eigs = np.linalg.eigvals(gen)
    worst = eigs[np.argmax(eigs.real)]
    if worst.real >= 0:
        raise UnstableDamping(worst, f"unstable mode at {worst}")
    return GeneratorModel(
        matrix=gen,
        family="damped_wave",
        params={"n": int(n), "mean_damping": float(a.mean())},
        space_p=2.0,
        beta_analytic=None,
        omega_analytic=float(eigs.real.max()),
        is_normal=False,
        block_dims=None,
    )


def truncation_ladder(family, params: dict, dims: Sequence[int]) -> list[GeneratorModel]:
    """One model per dimension with otherwise identical parameters.

    ``family`` is a registry name or a constructor taking (dim, **params).
    """
    dims = list(dims)
    if any(b <= a for a, b in zip(dims, dims[1:])):
        raise DimensionMismatch("dims must be strictly increasing")
    if isinstance(family, str):
        if family not in FAMILIES:
            raise DimensionMismatch(f"unknown family {family!r}")
        ctor = lambda d: build_model(family, dim=d, **params)  # noqa: E731
    else:
        ctor = lambda d: family(d, **params)  # noqa: E731
    return [ctor(d) for d in dims]


def build_model(family: str, dim: int | None = None, **params) -> GeneratorModel:
    """Construct a registry family at the given dimension."""
    if family == "diagonal":
        eigs = params.get("eigs")
        if eigs is None:
            d = dim or 8
            eigs = [-(1.0 + j) + 1j * j for j in range(d)]
        return make_diagonal(eigs, space_p=params.get("space_p", 2.0))
    if family == "borichev_tomilov":
        return make_borichev_tomilov(
            params.get("alpha", 1.0), dim or params.get("n", 64),
            space_p=params.get("space_p", 2.0),
        )
    if family == "jordan_growth":
        n = (dim // 2) if dim else params.get("n", 32)
        return make_jordan_growth(
            params.get("mu_spacing", 1.0),
            params.get("a_decay", 1.0),
            params.get("c_gain", 0.0),
            n,
            space_p=params.get("space_p", 2.0),
        )
    if family == "damped_wave":
        n = (dim // 2) if dim else params.get("n", 16)
        damping = params.get("damping", 1.0)
        if isinstance(damping, (int, float)):
            const = float(damping)
            damping = lambda x: const  # noqa: E731
        return make_damped_wave(n, damping)
    raise DimensionMismatch(f"unknown family {family!r}")


#: registry: family name -> (parameter sketch, what the family exercises)
FAMILIES = {
    "diagonal": (
        {"eigs": "list of stable eigenvalues", "space_p": "ambient p"},
        "normal-operator baseline with uniformly bounded resolvent",
    ),
    "borichev_tomilov": (
        {"alpha": "resolvent growth exponent", "n": "dimension"},
        "Borichev-Tomilov polynomial rate family (Hilbert space, "
        "contraction semigroup, sharp rates)",
    ),
    "jordan_growth": (
        {
            "mu_spacing": "frequency spacing",
            "a_decay": "damping decay exponent",
            "c_gain": "coupling growth exponent",
            "n": "block count",
        },
        "Wrobel-type block family: unbounded semigroup where decay fails "
        "below the critical smoothness exponent",
    ),
    "damped_wave": (
        {"n": "interior grid points", "damping": "a(x) callable or samples"},
        "damped wave equation with variable damping, finite-difference "
        "Dirichlet discretization",
    ),
}

_FAMILY_BLOCK_SIZE = {
    "diagonal": 1,
    "borichev_tomilov": 1,
    "jordan_growth": 2,
    "damped_wave": None,
}


# ---------------------------------------------------------------------------
# structure-aware operator evaluations


@lru_cache(maxsize=32)
def _stacked_blocks(model: GeneratorModel) -> np.ndarray | None:
    """(nblocks, d, d) view of a uniform block-diagonal model, else None."""
    bd = model.block_dims
    if bd is None or len(set(bd)) != 1:
        return None
    d = bd[0]
    arr = np.array([blk for _, blk in model.blocks()])
    assert arr.shape == (len(bd), d, d)
    arr.flags.writeable = False
    return arr


def resolvent_matrix(model: GeneratorModel, z: complex) -> np.ndarray:
    """Dense (z - A)^{-1} assembled blockwise."""
    out = np.zeros((model.dim, model.dim), dtype=complex)
    for sl, blk in model.blocks():
        ident = np.eye(blk.shape[0], dtype=complex)
        out[sl, sl] = linalg.solve_shifted(blk, z, ident)
    return out


def resolvent_norm(model: GeneratorModel, z: complex) -> float:
    """Operator norm of the resolvent at z in the model's ambient norm.

    For block models on l^2 this is max over blocks of 1/sigma_min of the
    shifted block; for p not in {1, 2, inf} the certified upper bound of
    the interval estimate is returned.
    """
    return resolvent_norm_interval(model, z)[1]


def resolvent_norm_interval(model: GeneratorModel, z: complex):
    p = model.space_p
    if p == 2:
        stacked = _stacked_blocks(model)
        if stacked is not None:
            d = stacked.shape[1]
            if d == 1:
                smin = np.abs(z - stacked[:, 0, 0]).min()
            else:
                shifted = z * np.eye(d, dtype=complex)[None] - stacked
                svals = np.linalg.svd(shifted, compute_uv=False)
                smin = svals[:, -1].min()
            val = float(1.0 / smin)
            return val, val
        shifted = z * np.eye(model.dim, dtype=complex) - model.matrix
        val = 1.0 / linalg.singular_extremes(shifted).sigma_min
        return float(val), float(val)
    lo = hi = 0.0
    for sl, blk in model.blocks():
        ident = np.eye(blk.shape[0], dtype=complex)
        res = linalg.solve_shifted(blk, z, ident)
        blo, bhi = linalg.lp_operator_norm(res, p)
        lo, hi = max(lo, float(blo)), max(hi, float(bhi))
    return lo, hi


def resolvent_apply(
    model: GeneratorModel, z: complex, x: np.ndarray, power: int = 1
) -> np.ndarray:
    """Apply (z - A)^{-power} to columns of x, blockwise."""
    x = np.asarray(x, dtype=complex)
    vector_input = x.ndim == 1
    cols = x[:, None] if vector_input else x
    stacked = _stacked_blocks(model)
    if stacked is not None:
        nb, d = stacked.shape[0], stacked.shape[1]
        seg = np.ascontiguousarray(cols).reshape(nb, d, cols.shape[1])
        if d == 1:
            fac = (z - stacked[:, 0, 0]) ** power
            seg = seg / fac[:, None, None]
        else:
            shifted = z * np.eye(d, dtype=complex)[None] - stacked
            for _ in range(power):
                seg = np.linalg.solve(shifted, seg)
        out = seg.reshape(cols.shape)
    else:
        out = cols
        for _ in range(power):
            out = linalg.solve_shifted(model.matrix, z, out)
    return out[:, 0] if vector_input else out


def _stacked_semigroup(model: GeneratorModel, t: float) -> np.ndarray | None:
    """(nblocks, d, d) stack of per-block exp(t*B_k), or None if dense."""
    stacked = _stacked_blocks(model)
    if stacked is None:
        return None
    d = stacked.shape[1]
    if d == 1:
        return np.exp(t * stacked)
    return np.array(
        [linalg.matrix_exponential(blk, t) for blk in stacked]
    )


@lru_cache(maxsize=16)
def semigroup_matrix(model: GeneratorModel, t: float) -> np.ndarray:
    """Dense exp(t*A) assembled blockwise (cached on the model identity)."""
    out = np.zeros((model.dim, model.dim), dtype=complex)
    for sl, blk in model.blocks():
        if blk.shape[0] == 1:
            out[sl, sl] = np.exp(t * blk[0, 0])
        else:
            out[sl, sl] = linalg.matrix_exponential(blk, t)
    out.flags.writeable = False
    return out


def semigroup_apply(model: GeneratorModel, t: float, x: np.ndarray) -> np.ndarray:
    """exp(t*A) x for columns of x."""
    x = np.asarray(x, dtype=complex)
    vector_input = x.ndim == 1
    cols = x[:, None] if vector_input else x
    stacked_e = _stacked_semigroup(model, t)
    if stacked_e is not None:
        nb, d = stacked_e.shape[0], stacked_e.shape[1]
        seg = np.ascontiguousarray(cols).reshape(nb, d, cols.shape[1])
        out = (stacked_e @ seg).reshape(cols.shape)
    else:
        out = semigroup_matrix(model, t) @ cols
    return out[:, 0] if vector_input else out


def semigroup_norm(model: GeneratorModel, t: float) -> float:
    """Operator norm of exp(t*A) in the ambient norm (certified upper)."""
    p = model.space_p
    stacked_e = _stacked_semigroup(model, t)
    if stacked_e is not None and p == 2:
        if stacked_e.shape[1] == 1:
            return float(np.abs(stacked_e).max())
        svals = np.linalg.svd(stacked_e, compute_uv=False)
        return float(svals[:, 0].max())
    best = 0.0
    for sl, blk in model.blocks():
        if blk.shape[0] == 1:
            val = abs(np.exp(t * blk[0, 0]))
        else:
            e = linalg.matrix_exponential(blk, t)
            val = linalg.operator_norm(e, p)
        best = max(best, float(val))
    return best


def orbit_samples(model: GeneratorModel, x: np.ndarray, ts) -> np.ndarray:
    """exp(t*A) x for many times at once, shape (len(ts), dim).

    Diagonal models vectorize exactly; dense diagonalizable models go
    through a cached eigendecomposition when the eigenvector basis is
    well conditioned, with a per-time blockwise fallback otherwise.
    """
    ts = np.asarray(ts, dtype=float)
    x = np.asarray(x, dtype=complex).reshape(-1)
    stacked = _stacked_blocks(model)
    if stacked is not None and stacked.shape[1] == 1:
        lam = stacked[:, 0, 0]
        return np.exp(np.outer(ts, lam)) * x[None, :]
    eig = _eigenbasis(model)
    if eig is not None:
        w, v = eig
        c = np.linalg.solve(v, x)
        return (np.exp(np.outer(ts, w)) * c[None, :]) @ v.T
    return np.array([semigroup_apply(model, float(t), x) for t in ts])


@lru_cache(maxsize=16)
def _eigenbasis(model: GeneratorModel):
    """(eigenvalues, eigenvectors) when diagonalization is trustworthy."""
    w, v = np.linalg.eig(model.matrix)
    if np.linalg.cond(v) < 1e8:
        return w, v
    return None


@lru_cache(maxsize=64)
def minus_a_power(model: GeneratorModel, tau: float) -> np.ndarray:
    """(-A)^tau assembled blockwise (principal branch, cached)."""
    out = np.zeros((model.dim, model.dim), dtype=complex)
    for sl, blk in model.blocks():
        if blk.shape[0] == 1:
            out[sl, sl] = (-blk[0, 0]) ** tau
        else:
            out[sl, sl] = linalg.fractional_power(-blk, tau)
    out.flags.writeable = False
    return out


def minus_a_power_apply(model: GeneratorModel, tau: float, x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=complex)
    vector_input = x.ndim == 1
    cols = x[:, None] if vector_input else x
    out = minus_a_power(model, tau) @ cols
    return out[:, 0] if vector_input else out
