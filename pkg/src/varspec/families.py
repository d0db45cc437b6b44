"""Built-in operator families: shifted weighted shift, Galerkin truncation,
perforated interval, thin strip.

Each constructor returns ``(LimitProblem, [FamilyMember, ...])`` with members
ordered by decreasing ``eps``. Discretizations carrying a measure (cell
volume ``h`` in 1D, cell area in 2D) are converted to orthonormal coordinates
by the similarity ``u -> sqrt(w) u`` before they are returned, so every norm
downstream is Euclidean and still mirrors the continuum L^2 norm.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .convergence import FamilyMember, LimitProblem
from .operators import DiscreteOperator, as_operator, graph_weight, norm_V_to_H, resolvent_norm


# --------------------------------------------------------------------------- 1D stencils

def chain_laplacian(gaps, h: float) -> np.ndarray:
    """Neumann Laplacian ``-u''`` on a chain of cells of volume ``h``.

    ``gaps[k]`` is the distance between cell ``k`` and ``k+1``; ``None`` cuts
    the chain (no flux). Symmetric positive semidefinite, constants in the kernel.
    """
    n = len(gaps) + 1
    A = np.zeros((n, n))
    for k, d in enumerate(gaps):
        if d is None:
            continue
        w = 1.0 / (h * d)
        A[k, k] += w
        A[k + 1, k + 1] += w
        A[k, k + 1] -= w
        A[k + 1, k] -= w
    return A


def neumann_laplacian_1d(n: int, h: float) -> np.ndarray:
    """Cell-centred Neumann Laplacian on ``n`` uniform cells of width ``h``."""
    if n < 1:
        raise ValueError("need at least one cell")
    return chain_laplacian([h] * (n - 1), h)


def neumann_eigenvalues_1d(n: int, h: float) -> np.ndarray:
    """Closed form ``(4/h^2) sin^2(k pi / (2n))``, ``k = 0..n-1``."""
    k = np.arange(n)
    return 4.0 / h**2 * np.sin(k * np.pi / (2 * n)) ** 2


# --------------------------------------------------------------------------- shift family

@dataclass(frozen=True)
class ShiftFamilySpec:
    n_list: tuple[int, ...] = (2, 5, 10, 100)
    window_N: int = 128
    wrap: bool = False

    def __post_init__(self):
        n_list = tuple(int(n) for n in self.n_list)
        object.__setattr__(self, "n_list", n_list)
        if not n_list or any(n < 1 for n in n_list):
            raise ValueError("n_list must contain positive integers")
        if len(set(n_list)) != len(n_list):
            raise ValueError("n_list entries must be distinct")
        if int(self.window_N) < max(n_list):
            raise ValueError(f"window_N={self.window_N} must be >= max(n_list)={max(n_list)}")

    @property
    def dim(self) -> int:
        return 2 * self.window_N + 1


def shift_matrix(N: int, coupling: float = 0.0, wrap: bool = False) -> np.ndarray:
    """Backward shift ``e_i -> e_{i-1}`` on ``e_{-N}..e_N`` with ``e_0 -> coupling * e_{-1}``.

    Basis vector ``e_i`` sits at position ``i + N``. Without ``wrap`` the last
    vector ``e_{-N}`` is sent to 0; with ``wrap`` it is sent to ``e_N``.
    """
    dim = 2 * N + 1
    T = np.zeros((dim, dim))
    for i in range(-N + 1, N + 1):
        T[i - 1 + N, i + N] = coupling if i == 0 else 1.0
    if wrap and N > 0:
        T[2 * N, 0] = 1.0
    return T


def make_shift_family(spec: ShiftFamilySpec) -> tuple[LimitProblem, list[FamilyMember]]:
    """``T_n`` (weight ``1/n`` on ``e_0``) converging in norm to ``T`` (``e_0 -> 0``); ``I = J = Id``."""
    N = spec.window_N
    T = shift_matrix(N, 0.0, spec.wrap)
    limit = LimitProblem(DiscreteOperator(T, label=f"T (N={N}, wrap={spec.wrap})"), z0=2.0)
    eye = np.eye(spec.dim)
    members = [
        FamilyMember(eps=1.0 / n, A_eps=DiscreteOperator(shift_matrix(N, 1.0 / n, spec.wrap), label=f"T_{n}"),
                     I_eps=eye, J_eps=eye, label=f"n={n}")
        for n in sorted(spec.n_list)
    ]
    return limit, members


def shift_residual_bound(lam: complex, N: int) -> tuple[float, float]:
    """Residual of the truncated geometric eigenvector ``x_N = sum_{k<=N} lam^k e_k`` of ``T``.

    Returns ``(||(T - lam) x_N|| / ||x_N||, 1 / residual)``; the second entry is a
    lower bound for ``||(lam - T)^{-1}||`` on the truncation.
    """
    lam = complex(lam)
    N = int(N)
    if not abs(lam) < 1:
        raise ValueError(f"|lambda| must be < 1, got {abs(lam)}")
    if N < 1:
        raise ValueError("N must be >= 1")
    T = shift_matrix(N)
    x = np.zeros(2 * N + 1, dtype=complex)
    x[N:] = lam ** np.arange(N + 1)
    res = float(np.linalg.norm(T @ x - lam * x) / np.linalg.norm(x))
    return res, (math.inf if res == 0 else 1.0 / res)


# --------------------------------------------------------------------------- Galerkin family

@dataclass(frozen=True, eq=False)
class GalerkinSpec:
    base: DiscreteOperator
    dims: tuple[int, ...]
    z0: complex | None = None

    def __post_init__(self):
        base = as_operator(self.base)
        object.__setattr__(self, "base", base)
        dims = tuple(int(m) for m in self.dims)
        object.__setattr__(self, "dims", dims)
        if not dims:
            raise ValueError("dims is empty")
        if any(b <= a for a, b in zip(dims, dims[1:])):
            raise ValueError("dims must be strictly increasing")
        if dims[0] < 1 or dims[-1] > base.dim:
            raise ValueError(f"dims must lie in [1, {base.dim}]")


def make_galerkin_family(spec: GalerkinSpec) -> tuple[LimitProblem, list[FamilyMember]]:
    """Compressions ``P_m A P_m`` onto the first ``m`` coordinates, ``eps = 1/m``."""
    A = spec.base
    n = A.dim
    members = []
    for m in spec.dims:
        I = np.eye(n)[:m]
        J = I.T.copy()
        members.append(FamilyMember(eps=1.0 / m, A_eps=DiscreteOperator(I @ A.entries @ J, label=f"P_{m} A P_{m}"),
                                    I_eps=I, J_eps=J, label=f"m={m}"))
    if spec.z0 is not None:
        candidates = [complex(spec.z0)]
    else:
        base = 1.0 + A.norm
        candidates = [complex(1.0, base * (k + 1)) for k in range(10)]
    for z0 in candidates:
        if resolvent_norm(A, z0).is_singular:
            continue
        if any(resolvent_norm(m.A_eps, z0).is_singular for m in members):
            continue
        return LimitProblem(A, z0), members
    raise ValueError(f"no z0 off all spectra among {len(candidates)} candidates")


# --------------------------------------------------------------------------- perforated interval

@dataclass(frozen=True)
class PerforatedSpec:
    """Interval (0, 1) on ``n_cells`` cells with holes of width ``hole_scale * eps`` at ``hole_centers``.

    ``closure="bridge"`` couples the cells on either side of a hole through a
    flux across the gap; ``closure="neumann"`` cuts the chain at every hole,
    which in 1D splits the interval into decoupled pieces.
    """

    n_cells: int = 200
    hole_centers: tuple[float, ...] = (0.3, 0.7)
    hole_scale: float = 0.5
    eps_list: tuple[float, ...] = (0.2, 0.1, 0.05)
    closure: str = "bridge"
    z0: complex = -1.0

    def __post_init__(self):
        object.__setattr__(self, "hole_centers", tuple(float(c) for c in self.hole_centers))
        object.__setattr__(self, "eps_list", tuple(float(e) for e in self.eps_list))
        if self.n_cells < 3:
            raise ValueError("n_cells must be >= 3")
        if self.closure not in ("bridge", "neumann"):
            raise ValueError(f"closure must be 'bridge' or 'neumann', got {self.closure!r}")
        if not self.eps_list or any(e <= 0 for e in self.eps_list):
            raise ValueError("eps_list must contain positive values")
        if any(b >= a for a, b in zip(self.eps_list, self.eps_list[1:])):
            raise ValueError("eps_list must be strictly decreasing")
        if not self.hole_scale > 0:
            raise ValueError("hole_scale must be positive")
        measures = []
        for eps in self.eps_list:
            holes = self.holes(eps)
            for (a, b), (c, d) in zip(holes, holes[1:]):
                if c <= b:
                    raise ValueError(f"holes overlap at eps={eps}")
            if any(a <= 0 or b >= 1 for a, b in holes):
                raise ValueError(f"holes must lie inside (0, 1) at eps={eps}")
            mask = self.hole_mask(eps)
            if mask[0] or mask[-1]:
                raise ValueError(f"a hole swallows a boundary cell at eps={eps}")
            measures.append(mask.sum() * self.grid_h)
        if any(b >= a for a, b in zip(measures, measures[1:])):
            raise ValueError(f"discrete hole measure must strictly decrease along eps_list, got {measures}")

    @property
    def grid_h(self) -> float:
        return 1.0 / self.n_cells

    @property
    def centers(self) -> np.ndarray:
        return (np.arange(self.n_cells) + 0.5) * self.grid_h

    def holes(self, eps: float) -> list[tuple[float, float]]:
        half = 0.5 * self.hole_scale * eps
        return sorted((c - half, c + half) for c in self.hole_centers)

    def hole_mask(self, eps: float) -> np.ndarray:
        x = self.centers
        mask = np.zeros(self.n_cells, dtype=bool)
        for a, b in self.holes(eps):
            mask |= (x >= a) & (x <= b)
        return mask

    def hole_measure(self, eps: float) -> float:
        return float(self.hole_mask(eps).sum() * self.grid_h)


def make_perforated_family(spec: PerforatedSpec) -> tuple[LimitProblem, list[FamilyMember]]:
    """Neumann Laplacian on (0, 1) and on (0, 1) minus holes; ``J`` extends by zero, ``I`` restricts."""
    n, h = spec.n_cells, spec.grid_h
    x = spec.centers
    limit = LimitProblem(DiscreteOperator(neumann_laplacian_1d(n, h), label="Neumann Laplacian on (0,1)"), spec.z0)
    members = []
    for eps in spec.eps_list:
        keep = np.flatnonzero(~spec.hole_mask(eps))
        gaps = []
        for a, b in zip(keep, keep[1:]):
            if b == a + 1:
                gaps.append(h)
            else:
                gaps.append(None if spec.closure == "neumann" else float(x[b] - x[a]))
        A_eps = DiscreteOperator(chain_laplacian(gaps, h), label=f"perforated eps={eps}")
        J = np.zeros((n, keep.size))
        J[keep, np.arange(keep.size)] = 1.0
        members.append(FamilyMember(eps=eps, A_eps=A_eps, I_eps=J.T.copy(), J_eps=J, label=f"eps={eps}"))
    return limit, members


def hole_norm_bound(spec: PerforatedSpec, eps: float) -> tuple[float, float, float]:
    """``sup ||f||_{L^2(T_eps)} / ||f||_V`` over the limit graph-norm space.

    Returns ``(sum_lower, sum_upper, |T_eps|)``.
    """
    mask = spec.hole_mask(eps)
    P = np.eye(spec.n_cells)[mask]
    A = neumann_laplacian_1d(spec.n_cells, spec.grid_h)
    _, lower, upper = norm_V_to_H(P, graph_weight(A))
    return lower, upper, spec.hole_measure(eps)


# --------------------------------------------------------------------------- thin strip

@dataclass(frozen=True)
class ThinStripSpec:
    """Strip ``(0, eps) x (0, 1)`` on an ``nx x nt`` cell grid reducing to the interval (0, 1).

    With ``normalized_measure`` the strip's L^2 inner product is divided by
    the cross-section width ``eps`` (so ``||I|| = ||J|| = 1``); otherwise the
    plain area measure is used and ``||J|| = eps^{-1/2}``.
    """

    eps_list: tuple[float, ...] = (0.5, 0.25, 0.125)
    nx: int = 24
    nt: int = 24
    normalized_measure: bool = True
    z0: complex = -1.0

    def __post_init__(self):
        object.__setattr__(self, "eps_list", tuple(float(e) for e in self.eps_list))
        if self.nx < 3 or self.nt < 3:
            raise ValueError("nx and nt must be >= 3")
        if not self.eps_list or any(e <= 0 for e in self.eps_list):
            raise ValueError("eps_list must contain positive values")
        if any(b >= a for a, b in zip(self.eps_list, self.eps_list[1:])):
            raise ValueError("eps_list must be strictly decreasing")


def thin_strip_eigenvalues(spec: ThinStripSpec, eps: float) -> np.ndarray:
    """Tensor-sum eigenvalues ``nu_m(eps) + mu_k`` of the strip discretization, sorted."""
    mu = neumann_eigenvalues_1d(spec.nt, 1.0 / spec.nt)
    nu = neumann_eigenvalues_1d(spec.nx, eps / spec.nx)
    return np.sort((nu[:, None] + mu[None, :]).ravel())


def make_thin_strip_family(spec: ThinStripSpec) -> tuple[LimitProblem, list[FamilyMember]]:
    """5-point Neumann Laplacian on the strip; ``J`` averages across, ``I`` extends constantly.

    Unknowns are ordered transverse-major: cell ``(i, j)`` sits at ``i * nt + j``.
    """
    nx, nt = spec.nx, spec.nt
    ht = 1.0 / nt
    L_t = neumann_laplacian_1d(nt, ht)
    limit = LimitProblem(DiscreteOperator(L_t, label="Neumann Laplacian on (0,1)"), spec.z0)
    avg = np.kron(np.full((1, nx), 1.0 / nx), np.eye(nt))
    ext = np.kron(np.ones((nx, 1)), np.eye(nt))
    members = []
    for eps in spec.eps_list:
        hx = eps / nx
        L_x = neumann_laplacian_1d(nx, hx)
        A_eps = np.kron(L_x, np.eye(nt)) + np.kron(np.eye(nx), L_t)
        w_strip = hx * ht / eps if spec.normalized_measure else hx * ht
        scale = math.sqrt(w_strip / ht)
        members.append(FamilyMember(eps=eps, A_eps=DiscreteOperator(A_eps, label=f"strip eps={eps}"),
                                    I_eps=scale * ext, J_eps=avg / scale, label=f"eps={eps}"))
    return limit, members
