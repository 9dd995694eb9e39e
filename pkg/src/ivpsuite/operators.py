"""Sparse spatial operators for the semi-discretized PDE problems.

Grids store interior points only (homogeneous Dirichlet values are
implicit) in row-major order: index ``i`` maps to ``(iy, ix)`` with
``ix = i % nx``.  The x coordinate runs along columns, y along rows.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np
import scipy.sparse as sp
from scipy.linalg import cho_factor, cho_solve, cho_solve_banded, cholesky_banded
from scipy.sparse.linalg import gmres as _gmres
from scipy.sparse.linalg import splu

from .errors import IndexOutOfRange, NonConvergence, SingularMass, ValidationError

__all__ = [
    "Grid1D",
    "Grid2D",
    "SparseOperator",
    "laplacian_1d_dirichlet",
    "laplacian_2d_dirichlet",
    "periodic_laplacian_apply",
    "ddx_central",
    "arakawa_jacobian",
    "arakawa_adjoint_first",
    "arakawa_adjoint_second",
    "HelmholtzSolver",
    "grid_distance",
]


# ---------------------------------------------------------------------------
# grids


@dataclass(frozen=True)
class Grid1D:
    """Interior points of [0, 1] with zero Dirichlet boundaries."""

    nx: int

    @property
    def hx(self) -> float:
        return 1.0 / (self.nx + 1)

    @property
    def coords(self) -> np.ndarray:
        return (np.arange(self.nx) + 1.0) * self.hx


@dataclass(frozen=True)
class Grid2D:
    """Uniform 2D grid on [0, 1]^2, row-major interior-only flattening.

    ``dirichlet_zero`` grids have spacing 1/(n+1) and implicit zero
    boundary values; ``periodic`` grids have spacing 1/n.
    """

    nx: int
    ny: int
    boundary: str = "dirichlet_zero"

    def __post_init__(self):
        if self.boundary not in ("dirichlet_zero", "periodic"):
            raise ValueError(f"unknown boundary '{self.boundary}'")
        if self.nx < 3 or self.ny < 3:
            raise ValueError("grids need at least 3 points per direction")

    @property
    def hx(self) -> float:
        return 1.0 / (self.nx + 1) if self.boundary == "dirichlet_zero" else 1.0 / self.nx

    @property
    def hy(self) -> float:
        return 1.0 / (self.ny + 1) if self.boundary == "dirichlet_zero" else 1.0 / self.ny

    @property
    def size(self) -> int:
        return self.nx * self.ny

    def unflatten(self, i: int) -> tuple:
        """Grid coordinates ``(ix, iy)`` of flat state index ``i``."""
        if not 0 <= i < self.size:
            raise IndexOutOfRange(i, self.size)
        return i % self.nx, i // self.nx

    def to_field(self, v: np.ndarray) -> np.ndarray:
        return np.asarray(v).reshape(self.ny, self.nx)

    def to_vector(self, field: np.ndarray) -> np.ndarray:
        return np.asarray(field).reshape(self.size)

    @cached_property
    def x(self) -> np.ndarray:
        """x coordinate of every interior point, as a (ny, nx) field."""
        if self.boundary == "dirichlet_zero":
            col = (np.arange(self.nx) + 1.0) * self.hx
        else:
            col = np.arange(self.nx) * self.hx
        return np.broadcast_to(col, (self.ny, self.nx))

    @cached_property
    def y(self) -> np.ndarray:
        if self.boundary == "dirichlet_zero":
            row = (np.arange(self.ny) + 1.0) * self.hy
        else:
            row = np.arange(self.ny) * self.hy
        return np.broadcast_to(row[:, None], (self.ny, self.nx))


def grid_distance(i: int, j: int, grid: Grid2D) -> float:
    """Euclidean distance between two state indices, in grid-index units."""
    ix, iy = grid.unflatten(i)
    jx, jy = grid.unflatten(j)
    return float(np.hypot(ix - jx, iy - jy))


# ---------------------------------------------------------------------------
# sparse operators


class SparseOperator:
    """A sparse matrix with an optional cached factorization."""

    def __init__(self, matrix):
        self.matrix = sp.csr_matrix(matrix)
        self._factor = None

    @property
    def dimension(self) -> int:
        return self.matrix.shape[0]

    def apply(self, v: np.ndarray) -> np.ndarray:
        return self.matrix @ v

    __matmul__ = apply

    def solve(self, b: np.ndarray) -> np.ndarray:
        if self._factor is None:
            try:
                self._factor = splu(self.matrix.tocsc())
            except RuntimeError as exc:
                raise SingularMass(str(exc)) from exc
        return self._factor.solve(b)

    def cube(self) -> "SparseOperator":
        m = self.matrix
        return SparseOperator(m @ m @ m)


def laplacian_1d_dirichlet(n: int, h: float) -> SparseOperator:
    main = np.full(n, -2.0)
    off = np.ones(n - 1)
    return SparseOperator(sp.diags([off, main, off], [-1, 0, 1]) / (h * h))


def laplacian_2d_dirichlet(nx: int, ny: int, h: float) -> SparseOperator:
    """Five-point Laplacian on the interior, row-major ordering."""
    dxx = sp.diags([np.ones(nx - 1), np.full(nx, -2.0), np.ones(nx - 1)], [-1, 0, 1])
    dyy = sp.diags([np.ones(ny - 1), np.full(ny, -2.0), np.ones(ny - 1)], [-1, 0, 1])
    lap = sp.kron(sp.identity(ny), dxx) + sp.kron(dyy, sp.identity(nx))
    return SparseOperator(lap / (h * h))


def periodic_laplacian_apply(field: np.ndarray, hx: float, hy: float) -> np.ndarray:
    """Five-point Laplacian of a periodic (ny, nx) field."""
    out = (np.roll(field, 1, axis=1) + np.roll(field, -1, axis=1) - 2.0 * field) / (
        hx * hx
    )
    out += (np.roll(field, 1, axis=0) + np.roll(field, -1, axis=0) - 2.0 * field) / (
        hy * hy
    )
    return out


def ddx_central(field: np.ndarray, h: float, order: int = 2) -> np.ndarray:
    """Central x-derivative of a Dirichlet field with zero extension."""
    pad = 1 if order == 2 else 2
    fp = np.pad(field, ((0, 0), (pad, pad)))
    n = field.shape[1]
    if order == 2:
        return (fp[:, 2 : n + 2] - fp[:, 0:n]) / (2.0 * h)
    if order == 4:
        return (
            -fp[:, 4 : n + 4]
            + 8.0 * fp[:, 3 : n + 3]
            - 8.0 * fp[:, 1 : n + 1]
            + fp[:, 0:n]
        ) / (-12.0 * h)
    raise ValidationError("fd_order", "one of 2, 4")


# ---------------------------------------------------------------------------
# Arakawa bracket
#
# The nine-point discretization of psi_x q_y - psi_y q_x, written as a sum
# of elementary antisymmetric pairs a_X b_Y - a_Y b_X so that swapping the
# arguments negates the result bit for bit and J(a, a) is exactly zero.
# Stencil values at the boundary ring (where the inputs extend by zero)
# are folded into the nearest interior cells; that closure makes the
# interior sum vanish identically, recovering the discrete integral
# conservation of the periodic scheme on the Dirichlet grid.

_OFFS = {
    "E": (0, 1),
    "W": (0, -1),
    "N": (1, 0),
    "S": (-1, 0),
    "NE": (1, 1),
    "NW": (1, -1),
    "SE": (-1, 1),
    "SW": (-1, -1),
}
_PAIRS = [
    ("E", "N"),
    ("S", "E"),
    ("N", "W"),
    ("W", "S"),
    ("E", "NE"),
    ("SE", "E"),
    ("NW", "W"),
    ("W", "SW"),
    ("NE", "N"),
    ("N", "NW"),
    ("S", "SE"),
    ("SW", "S"),
]


def _pair_kernel(ap: np.ndarray, bp: np.ndarray, h: float) -> np.ndarray:
    """Evaluate the pair sum at the centers of 1-padded inputs."""
    my, mx = ap.shape[0] - 2, ap.shape[1] - 2
    out = np.zeros((my, mx))
    views_a = {}
    views_b = {}
    for key, (dy, dx) in _OFFS.items():
        views_a[key] = ap[1 + dy : 1 + dy + my, 1 + dx : 1 + dx + mx]
        views_b[key] = bp[1 + dy : 1 + dy + my, 1 + dx : 1 + dx + mx]
    for X, Y in _PAIRS:
        out += views_a[X] * views_b[Y] - views_a[Y] * views_b[X]
    return out / (12.0 * h * h)


def _fold_ring(j_ext: np.ndarray) -> np.ndarray:
    out = j_ext[1:-1, 1:-1].copy()
    out[0, :] += j_ext[0, 1:-1]
    out[-1, :] += j_ext[-1, 1:-1]
    out[:, 0] += j_ext[1:-1, 0]
    out[:, -1] += j_ext[1:-1, -1]
    out[0, 0] += j_ext[0, 0]
    out[0, -1] += j_ext[0, -1]
    out[-1, 0] += j_ext[-1, 0]
    out[-1, -1] += j_ext[-1, -1]
    return out


def arakawa_jacobian(a: np.ndarray, b: np.ndarray, h: float) -> np.ndarray:
    """Conservative Arakawa bracket of two interior (ny, nx) fields."""
    if a.shape != b.shape:
        raise ValueError("fields must share a grid")
    return _fold_ring(_pair_kernel(np.pad(a, 2), np.pad(b, 2), h))


def arakawa_adjoint_first(w: np.ndarray, b: np.ndarray, h: float) -> np.ndarray:
    """Adjoint of ``v -> arakawa_jacobian(v, b)`` applied to ``w``."""
    return -_pair_kernel(np.pad(w, 1, mode="edge"), np.pad(b, 1), h)


def arakawa_adjoint_second(w: np.ndarray, a: np.ndarray, h: float) -> np.ndarray:
    """Adjoint of ``u -> arakawa_jacobian(a, u)`` applied to ``w``."""
    return _pair_kernel(np.pad(w, 1, mode="edge"), np.pad(a, 1), h)


# ---------------------------------------------------------------------------
# Helmholtz solvers for (lap - F) psi = q


def _is_pow2_minus_1(n: int) -> bool:
    return n >= 7 and ((n + 1) & n) == 0


class _MultigridHierarchy:
    """Geometric multigrid for (F - lap) on square 2^k-1 Dirichlet grids.

    V(2, 2) cycles with damped-Jacobi smoothing (weight 4/5), full
    weighting restriction, bilinear prolongation, and a direct solve on
    the 7x7 coarsest level.  The operator is rediscretized per level.
    """

    OMEGA = 0.8
    PRE, POST = 2, 2

    def __init__(self, n: int, shift: float):
        self.levels = []
        while n >= 7:
            h = 1.0 / (n + 1)
            self.levels.append((n, h, shift + 4.0 / (h * h)))
            if n == 7:
                break
            n = (n - 1) // 2
        self.shift = shift
        n_c, h_c, _ = self.levels[-1]
        dense = -laplacian_2d_dirichlet(n_c, n_c, h_c).matrix.toarray()
        dense[np.diag_indices_from(dense)] += shift
        self._coarse = cho_factor(dense)

    def apply(self, u: np.ndarray, h: float) -> np.ndarray:
        """(F - lap) u for an interior field u."""
        up = np.pad(u, 1)
        n = u.shape[0]
        lap = (
            up[1 : n + 1, 2 : n + 2]
            + up[1 : n + 1, 0:n]
            + up[2 : n + 2, 1 : n + 1]
            + up[0:n, 1 : n + 1]
            - 4.0 * u
        ) / (h * h)
        return self.shift * u - lap

    def _smooth(self, u, b, h, diag, sweeps):
        for _ in range(sweeps):
            u += self.OMEGA * (b - self.apply(u, h)) / diag
        return u

    @staticmethod
    def _restrict(r: np.ndarray) -> np.ndarray:
        rp = np.pad(r, 1)
        c = rp[2:-2:2, 2:-2:2]
        out = 0.25 * c
        out = out + 0.125 * (
            rp[1:-3:2, 2:-2:2]
            + rp[3:-1:2, 2:-2:2]
            + rp[2:-2:2, 1:-3:2]
            + rp[2:-2:2, 3:-1:2]
        )
        out = out + 0.0625 * (
            rp[1:-3:2, 1:-3:2]
            + rp[1:-3:2, 3:-1:2]
            + rp[3:-1:2, 1:-3:2]
            + rp[3:-1:2, 3:-1:2]
        )
        return out

    @staticmethod
    def _prolong(c: np.ndarray, n_fine: int) -> np.ndarray:
        cp = np.pad(c, 1)
        out = np.zeros((n_fine, n_fine))
        out[1::2, 1::2] = c
        out[0::2, 1::2] = 0.5 * (cp[0:-1, 1:-1] + cp[1:, 1:-1])
        out[1::2, 0::2] = 0.5 * (cp[1:-1, 0:-1] + cp[1:-1, 1:])
        out[0::2, 0::2] = 0.25 * (
            cp[0:-1, 0:-1] + cp[0:-1, 1:] + cp[1:, 0:-1] + cp[1:, 1:]
        )
        return out

    def _vcycle(self, level: int, b: np.ndarray) -> np.ndarray:
        n, h, diag = self.levels[level]
        if level == len(self.levels) - 1:
            return cho_solve(self._coarse, b.ravel()).reshape(n, n)
        u = self._smooth(np.zeros_like(b), b, h, diag, self.PRE)
        resid = b - self.apply(u, h)
        correction = self._vcycle(level + 1, self._restrict(resid))
        u += self._prolong(correction, n)
        return self._smooth(u, b, h, diag, self.POST)

    def solve(self, b: np.ndarray, tol: float, max_cycles: int = 100) -> np.ndarray:
        bnorm = float(np.linalg.norm(b))
        if bnorm == 0.0:
            return np.zeros_like(b)
        _, h, _ = self.levels[0]
        x = np.zeros_like(b)
        resid = b.copy()
        for _ in range(max_cycles):
            x += self._vcycle(0, resid)
            resid = b - self.apply(x, h)
            rnorm = float(np.linalg.norm(resid))
            if rnorm <= tol * bnorm:
                return x
        raise NonConvergence(max_cycles, rnorm / bnorm)


class HelmholtzSolver:
    """Solves (lap - F) psi = q on a square Dirichlet grid.

    ``method`` selects a cached banded Cholesky factorization of the
    symmetric positive definite form F*I - lap, V(2,2) multigrid cycles,
    or unrestarted GMRES; the iterative methods stop at a relative
    residual of ``tol``.
    """

    MAX_GMRES = 500

    def __init__(self, n: int, shift: float, method: str = "cholesky", tol: float = 1e-8):
        if method not in ("cholesky", "multigrid", "gmres"):
            raise ValidationError("linearsolver", "one of cholesky, multigrid, gmres")
        if method == "multigrid" and not _is_pow2_minus_1(n):
            raise ValidationError("nx", "a power of two minus one for multigrid")
        self.n = n
        self.h = 1.0 / (n + 1)
        self.shift = float(shift)
        self.method = method
        self.tol = float(tol)
        self.laplacian = laplacian_2d_dirichlet(n, n, self.h)
        self._spd = (self.shift * sp.identity(n * n) - self.laplacian.matrix).tocsr()
        if method == "cholesky":
            self._factor = cholesky_banded(self._banded_upper(self._spd, n))
        elif method == "multigrid":
            self._mg = _MultigridHierarchy(n, self.shift)

    @staticmethod
    def _banded_upper(a: sp.spmatrix, n: int) -> np.ndarray:
        bw = n
        dia = sp.dia_matrix(a)
        ab = np.zeros((bw + 1, a.shape[0]))
        for offset, data in zip(dia.offsets, dia.data):
            if 0 <= offset <= bw:
                ab[bw - offset, :] = data
        return ab

    def solve(self, q: np.ndarray) -> np.ndarray:
        """psi with (lap - F) psi = q; input and output are flat vectors."""
        b = -np.asarray(q, dtype=float).ravel()
        if self.method == "cholesky":
            return cho_solve_banded((self._factor, False), b)
        if self.method == "multigrid":
            return self._mg.solve(b.reshape(self.n, self.n), self.tol).ravel()
        x, info = _gmres(
            self._spd,
            b,
            rtol=self.tol,
            atol=0.0,
            restart=self.MAX_GMRES,
            maxiter=1,
        )
        if info != 0:
            resid = np.linalg.norm(b - self._spd @ x)
            bnorm = np.linalg.norm(b)
            raise NonConvergence(self.MAX_GMRES, resid / bnorm if bnorm else resid)
        return x

    def apply_helmholtz(self, psi: np.ndarray) -> np.ndarray:
        """(lap - F) psi for a flat vector psi."""
        return -(self._spd @ psi)
