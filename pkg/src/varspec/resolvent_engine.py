"""Pseudospectral grids, the graph-norm resolvent inequality, and the resolvent commutator.

The commutator between the two resolvents, intertwined by the identification
operator ``J`` (H_eps -> H), is

    V(z) = J R_eps(z) - R(z) J,     R(z) = (z - A)^{-1}.

It is always evaluated from explicitly computed resolvents. The algebraic
propagation identity that relates ``V(z)`` to ``V(z0)`` is only ever used
as a check (``verify_commutator_propagation``, ``propagation_identity_residual``).
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
import scipy.linalg
from scipy.optimize import minimize_scalar

from .operators import (
    DiscreteOperator,
    SpectralWindow,
    as_operator,
    graph_weight,
    operator_norm,
    resolvent,
    resolvent_norm,
)


@dataclass(frozen=True, eq=False)
class PseudospectrumGrid:
    window: SpectralWindow
    resolution: tuple[int, int]
    re: np.ndarray
    im: np.ndarray
    samples: np.ndarray  # object array (nx, ny) of ResolventSample

    @property
    def nodes(self) -> np.ndarray:
        return self.re[:, None] + 1j * self.im[None, :]

    @property
    def sigma_min(self) -> np.ndarray:
        return np.vectorize(lambda s: s.sigma_min, otypes=[float])(self.samples)

    @property
    def resolvent_norm(self) -> np.ndarray:
        return np.vectorize(lambda s: s.resolvent_norm, otypes=[float])(self.samples)


def _axis(center: float, radius: float, n: int) -> np.ndarray:
    # integer numerator/denominator keep shared nodes bit-identical under refinement
    k = np.arange(n)
    return center + radius * ((2 * k - (n - 1)) / (n - 1))


def pseudospectrum(A, window: SpectralWindow, resolution=(41, 41), max_workers: int | None = None) -> PseudospectrumGrid:
    """Evaluate ``resolvent_norm(A, z)`` on an ``nx x ny`` grid over the window's bounding square.

    Nodes on the spectrum carry the INFINITE sentinel instead of aborting.
    """
    A = as_operator(A)
    if not isinstance(window, SpectralWindow):
        window = SpectralWindow(*window)
    nx, ny = (int(r) for r in resolution)
    if nx < 2 or ny < 2:
        raise ValueError(f"resolution must be at least (2, 2), got {resolution}")
    re = _axis(window.center.real, window.radius, nx)
    im = _axis(window.center.imag, window.radius, ny)
    zs = [complex(x, y) for x in re for y in im]
    if max_workers and max_workers > 1:
        with ThreadPoolExecutor(max_workers=max_workers) as pool:
            flat = list(pool.map(lambda z: resolvent_norm(A, z), zs))
    else:
        flat = [resolvent_norm(A, z) for z in zs]
    samples = np.empty((nx, ny), dtype=object)
    for idx, s in enumerate(flat):
        samples[idx // ny, idx % ny] = s
    return PseudospectrumGrid(window=window, resolution=(nx, ny), re=re, im=im, samples=samples)


def max_norm_sum(B, C) -> tuple[float, np.ndarray]:
    """``sup_{||u||=1} ||Bu|| + ||Cu||`` and a unit vector attaining it.

    Uses ``(p + q)^2 = min_t p^2/t + q^2/(1-t)`` and swaps sup and min, which is
    exact over complex unit vectors because the joint numerical range of two
    Hermitian forms is convex. The inner problem is a largest eigenvalue that
    is convex in ``t``.
    """
    B = np.asarray(B, dtype=complex)
    C = np.asarray(C, dtype=complex)
    X = B.conj().T @ B
    Y = C.conj().T @ C
    X = 0.5 * (X + X.conj().T)
    Y = 0.5 * (Y + Y.conj().T)

    def top(t):
        M = X / t + Y / (1.0 - t)
        w, v = scipy.linalg.eigh(0.5 * (M + M.conj().T))
        return w[-1], v[:, -1]

    if not np.any(Y):
        w, v = scipy.linalg.eigh(X)
        return math.sqrt(max(w[-1], 0.0)), v[:, -1]
    if not np.any(X):
        w, v = scipy.linalg.eigh(Y)
        return math.sqrt(max(w[-1], 0.0)), v[:, -1]
    res = minimize_scalar(lambda t: top(t)[0], bounds=(1e-14, 1.0 - 1e-14), method="bounded",
                          options={"xatol": 1e-13})
    lam, vec = top(res.x)
    return math.sqrt(max(lam, 0.0)), vec


def max_norm_sum_diagonal(b2, c2) -> tuple[float, int]:
    """``max_norm_sum`` for ``B``, ``C`` diagonal in one orthonormal basis, given ``|b_k|^2`` and ``|c_k|^2``.

    Returns the value and the index of the basis vector that is largest at the
    optimal ``t``.
    """
    b2 = np.asarray(b2, dtype=float)
    c2 = np.asarray(c2, dtype=float)
    if not np.any(c2):
        return math.sqrt(b2.max()), int(np.argmax(b2))
    if not np.any(b2):
        return math.sqrt(c2.max()), int(np.argmax(c2))
    res = minimize_scalar(lambda t: np.max(b2 / t + c2 / (1.0 - t)), bounds=(1e-14, 1.0 - 1e-14),
                          method="bounded", options={"xatol": 1e-13})
    vals = b2 / res.x + c2 / (1.0 - res.x)
    k = int(np.argmax(vals))
    return math.sqrt(vals[k]), k


@dataclass(frozen=True)
class GraphResolventCheck:
    """Graph-norm resolvent inequality at one point ``z``.

    ``lhs_bracket`` brackets ``||(z-A)^{-1}||_{L(H, V)}`` with V carrying the
    sum graph norm. ``sampled`` is the best per-vector evaluation of the sum
    norm found (a certified lower bound); ``hilbert_value`` is the exact
    norm against the Hilbertian graph norm.
    """

    z: complex
    hilbert_value: float
    sampled: float
    lhs_bracket: tuple[float, float]
    rhs: float
    holds: bool

    @property
    def holds_sampled(self) -> bool:
        return self.sampled <= self.rhs * (1.0 + 1e-10)


def check_graph_resolvent_bound(A, z: complex, *, n_samples: int = 64, seed: int = 0) -> GraphResolventCheck:
    """Check ``||R(z)||_{L(H,V)} <= 1 + (1 + |z|) ||R(z)||_{L(H)}`` for the sum graph norm."""
    A = as_operator(A)
    z = complex(z)
    sample = resolvent_norm(A, z)
    if sample.is_singular:
        raise ValueError(f"z={z} lies in the spectrum of {A.label or 'operator'}")
    R = resolvent(A, z)
    AR = A.entries @ R
    rhs = 1.0 + (1.0 + abs(z)) * sample.resolvent_norm

    if A.hermitian_eigenvalues is not None:
        # R and AR are diagonal in the eigenbasis of A
        lam, vecs = scipy.linalg.eigh(A.entries)
        d2 = np.abs(z - lam) ** 2
        b2, c2 = 1.0 / d2, lam**2 / d2
        hilbert = math.sqrt(float(np.max(b2 + c2)))
        exact_upper, k = max_norm_sum_diagonal(b2, c2)
        candidates = [vecs[:, k]] + [vecs[:, int(np.argmax(w))] for w in (b2, c2, b2 + c2)]
    else:
        W = graph_weight(A).weight
        hilbert = operator_norm(W @ R)
        exact_upper, u_star = max_norm_sum(R, AR)
        candidates = [u_star]
        for M in (R, AR, W @ R):
            _, _, vh = scipy.linalg.svd(M)
            candidates.append(vh[0].conj())

    def sum_norm(u):
        u = u / np.linalg.norm(u)
        return np.linalg.norm(R @ u) + np.linalg.norm(AR @ u)

    rng = np.random.default_rng(seed)
    n = A.dim
    for _ in range(n_samples):
        candidates.append(rng.standard_normal(n) + 1j * rng.standard_normal(n))
    sampled = float(max(sum_norm(u) for u in candidates))

    lower = float(max(hilbert, sampled))
    upper = float(max(min(math.sqrt(2.0) * hilbert, exact_upper), lower))
    holds = upper <= rhs * (1.0 + 1e-10)
    return GraphResolventCheck(z=z, hilbert_value=hilbert, sampled=sampled,
                               lhs_bracket=(lower, upper), rhs=rhs, holds=holds)


@dataclass(frozen=True)
class CommutatorDefect:
    z: complex
    value: float


def _limit_operator(limit) -> DiscreteOperator:
    return as_operator(getattr(limit, "A", limit))


def _resolvents(member, limit, z):
    A = _limit_operator(limit)
    A_eps = member.A_eps
    z = complex(z)
    if resolvent_norm(A_eps, z).is_singular:
        raise ValueError(f"z={z} lies in the spectrum of A_eps (eps={member.eps})")
    if resolvent_norm(A, z).is_singular:
        raise ValueError(f"z={z} lies in the spectrum of the limit operator")
    return resolvent(A, z), resolvent(A_eps, z)


def commutator_matrix(member, limit, z: complex) -> np.ndarray:
    """``J R_eps(z) - R(z) J`` as an explicit matrix."""
    R, R_eps = _resolvents(member, limit, z)
    J = member.J_eps
    return J @ R_eps - R @ J


def commutator_defect(member, limit, z: complex) -> CommutatorDefect:
    return CommutatorDefect(z=complex(z), value=operator_norm(commutator_matrix(member, limit, z)))


@dataclass(frozen=True)
class PropagationCheck:
    lhs: float
    rhs: float
    holds: bool


def verify_commutator_propagation(member, limit, z: complex, z0: complex) -> PropagationCheck:
    """``||V(z)|| <= ||V(z0)|| (1 + |z-z0| ||R(z)||) (1 + |z-z0| ||R_eps(z)||)``."""
    z, z0 = complex(z), complex(z0)
    lhs = commutator_defect(member, limit, z).value
    base = commutator_defect(member, limit, z0).value
    d = abs(z - z0)
    r = resolvent_norm(_limit_operator(limit), z).resolvent_norm
    r_eps = resolvent_norm(member.A_eps, z).resolvent_norm
    rhs = base * (1.0 + d * r) * (1.0 + d * r_eps)
    return PropagationCheck(lhs=lhs, rhs=rhs, holds=lhs <= rhs + 1e-10 * (1.0 + rhs))


def propagation_identity_residual(member, limit, z: complex, z0: complex) -> tuple[float, float]:
    """Return ``(||V(z) - (Id - (z-z0)R(z)) V(z0) (Id - (z-z0)R_eps(z))||, ||V(z)||)``."""
    z, z0 = complex(z), complex(z0)
    R, R_eps = _resolvents(member, limit, z)
    Vz = commutator_matrix(member, limit, z)
    Vz0 = commutator_matrix(member, limit, z0)
    left = np.eye(R.shape[0]) - (z - z0) * R
    right = np.eye(R_eps.shape[0]) - (z - z0) * R_eps
    return operator_norm(Vz - left @ Vz0 @ right), operator_norm(Vz)
