"""Dense operators on finite-dimensional Hilbert spaces.

Every space is represented in orthonormal coordinates, so the Hilbert norm
is the Euclidean norm and operator norms are largest singular values.
Weighted (measure-carrying) discretizations are brought into this form by
the family constructors before they reach this module.

In finite dimension every operator is bounded with full domain; "closed
operator" reduces to "square matrix".
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
import scipy.linalg

#: Sentinel resolvent norm for points numerically inside the spectrum.
INFINITE = math.inf

# z counts as spectral when sigma_min(z - A) < SINGULAR_RTOL * (1 + ||A||)
SINGULAR_RTOL = 1e-12


class NumericalFailure(RuntimeError):
    """A dense factorization did not converge or produced non-finite output."""


@dataclass(frozen=True, eq=False)
class DiscreteOperator:
    """Square complex matrix standing in for a closed operator."""

    entries: np.ndarray
    label: str = ""

    def __post_init__(self):
        a = np.array(self.entries, dtype=complex)
        if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] == 0:
            raise ValueError(f"operator must be a non-empty square matrix, got shape {a.shape}")
        if not np.all(np.isfinite(a)):
            raise ValueError("operator entries must be finite")
        a.setflags(write=False)
        object.__setattr__(self, "entries", a)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    @cached_property
    def norm(self) -> float:
        return operator_norm(self.entries)

    def is_hermitian(self) -> bool:
        return bool(np.array_equal(self.entries, self.entries.conj().T))

    @cached_property
    def hermitian_eigenvalues(self) -> np.ndarray | None:
        """Real eigenvalues when ``entries`` is exactly Hermitian, else ``None``."""
        if not self.is_hermitian():
            return None
        try:
            vals = scipy.linalg.eigvalsh(self.entries)
        except (np.linalg.LinAlgError, ValueError) as exc:
            raise NumericalFailure(f"Hermitian eigensolver failed: {exc}") from exc
        vals.setflags(write=False)
        return vals

    def __repr__(self):
        return f"DiscreteOperator(dim={self.dim}, label={self.label!r})"


def as_operator(a, label: str = "") -> DiscreteOperator:
    if isinstance(a, DiscreteOperator):
        return a
    return DiscreteOperator(np.asarray(a), label=label)


@dataclass(frozen=True, eq=False)
class GraphNormContext:
    """Hilbertian graph norm of ``base``: ``||u||_A^2 = ||u||^2 + ||Au||^2 = ||W u||^2``."""

    base: DiscreteOperator
    weight: np.ndarray
    weight_inv: np.ndarray = field(repr=False)

    @property
    def dim(self) -> int:
        return self.base.dim


def graph_weight(A) -> GraphNormContext:
    """Return ``W = (Id + A*A)^{1/2}`` computed from a Hermitian eigendecomposition."""
    A = as_operator(A)
    a = A.entries
    gram = np.eye(A.dim) + a.conj().T @ a
    gram = 0.5 * (gram + gram.conj().T)
    try:
        evals, vecs = scipy.linalg.eigh(gram)
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise NumericalFailure(f"eigendecomposition of Id + A*A failed: {exc}") from exc
    if not np.all(np.isfinite(evals)):
        raise NumericalFailure("eigendecomposition of Id + A*A returned non-finite values")
    # eigenvalues of Id + A*A are >= 1 in exact arithmetic
    roots = np.sqrt(np.maximum(evals, 1.0))
    w = (vecs * roots) @ vecs.conj().T
    w_inv = (vecs / roots) @ vecs.conj().T
    w = 0.5 * (w + w.conj().T)
    w_inv = 0.5 * (w_inv + w_inv.conj().T)
    w.setflags(write=False)
    w_inv.setflags(write=False)
    return GraphNormContext(base=A, weight=w, weight_inv=w_inv)


def operator_norm(T) -> float:
    """Largest singular value of a (possibly rectangular) matrix."""
    t = np.asarray(T, dtype=complex)
    if t.ndim == 1:
        t = t.reshape(-1, 1)
    if t.size == 0:
        raise ValueError("operator_norm of an empty matrix is undefined")
    if not np.all(np.isfinite(t)):
        raise ValueError("matrix entries must be finite")
    try:
        s = scipy.linalg.svdvals(t)
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise NumericalFailure(f"singular value computation failed: {exc}") from exc
    return float(s[0])


def norm_V_to_H(T, source_graph: GraphNormContext) -> tuple[float, float, float]:
    """Norm of ``T`` with the source space carrying the graph norm of ``source_graph.base``.

    Returns ``(hilbert_value, sum_lower, sum_upper)``. ``hilbert_value`` is exact
    for the Hilbertian graph norm ``(||u||^2 + ||Au||^2)^{1/2}``. Since that norm
    and the sum norm ``||u|| + ||Au||`` satisfy ``h <= s <= sqrt(2) h``, the norm
    against the sum norm lies in ``[hilbert_value / sqrt(2), hilbert_value]``.
    """
    t = np.asarray(T, dtype=complex)
    if t.ndim != 2 or t.shape[1] != source_graph.dim:
        raise ValueError(
            f"column dimension {t.shape[-1] if t.ndim else 0} does not match "
            f"graph-norm space dimension {source_graph.dim}"
        )
    value = operator_norm(t @ source_graph.weight_inv)
    return value, value / math.sqrt(2.0), value


@dataclass(frozen=True)
class ResolventSample:
    z: complex
    sigma_min: float
    resolvent_norm: float

    @property
    def is_singular(self) -> bool:
        return math.isinf(self.resolvent_norm)


def singular_threshold(A: DiscreteOperator) -> float:
    return SINGULAR_RTOL * (1.0 + A.norm)


def resolvent_norm(A, z: complex) -> ResolventSample:
    """``||(z - A)^{-1}||`` as ``1 / sigma_min(z Id - A)``, or INFINITE on the spectrum.

    For exactly Hermitian ``A`` the matrix ``z - A`` is normal and its singular
    values are ``|z - lambda_k|``; the cached eigenvalues are used instead of an SVD.
    """
    A = as_operator(A)
    z = complex(z)
    evals = A.hermitian_eigenvalues
    if evals is not None:
        sigma_min = float(np.min(np.abs(z - evals)))
    else:
        shifted = z * np.eye(A.dim) - A.entries
        try:
            s = scipy.linalg.svdvals(shifted)
        except (np.linalg.LinAlgError, ValueError) as exc:
            raise NumericalFailure(f"singular values of zId - A failed at z={z}: {exc}") from exc
        sigma_min = float(max(s[-1], 0.0))
    norm = 1.0 / sigma_min if sigma_min > singular_threshold(A) else INFINITE
    return ResolventSample(z=z, sigma_min=sigma_min, resolvent_norm=norm)


def resolvent(A, z: complex) -> np.ndarray:
    """Explicit ``(z Id - A)^{-1}``; raises ``ValueError`` when z is spectral."""
    A = as_operator(A)
    sample = resolvent_norm(A, z)
    if sample.is_singular:
        raise ValueError(f"z={complex(z)} lies in the spectrum of {A.label or 'operator'}")
    return np.linalg.solve(complex(z) * np.eye(A.dim) - A.entries, np.eye(A.dim, dtype=complex))


@dataclass(frozen=True)
class SpectralWindow:
    """Closed disc ``|z - center| <= radius`` in the complex plane."""

    center: complex
    radius: float

    def __post_init__(self):
        object.__setattr__(self, "center", complex(self.center))
        r = float(self.radius)
        if not (r > 0 and math.isfinite(r)):
            raise ValueError(f"window radius must be positive and finite, got {self.radius}")
        object.__setattr__(self, "radius", r)

    def contains(self, z) -> np.ndarray | bool:
        d = np.abs(np.asarray(z, dtype=complex) - self.center)
        out = d <= self.radius
        return bool(out) if np.ndim(out) == 0 else out
