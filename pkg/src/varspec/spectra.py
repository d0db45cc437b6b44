"""Windowed spectra, Hausdorff distances, and certificates for spectral convergence.

Compact sets are finite node lists and curves are polylines, so every
certificate holds at grid granularity only and records the nodes it used.

Empty-set convention: the distance to an empty set is ``inf``. The Hausdorff
distance between two empty sets is 0, and between an empty and a non-empty
set it is ``inf``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .convergence import FamilyMember, LimitProblem, lemma_constants
from .operators import NumericalFailure, SpectralWindow, as_operator, resolvent_norm

__all__ = [
    "SpectralWindow",
    "SpectralSet",
    "HausdorffResult",
    "CertificateKind",
    "CertificateOutcome",
    "spectral_set",
    "hausdorff_distance",
    "certify_no_pollution",
    "certify_inclusion_bounded_resolvent",
    "certify_isolated_eigenvalue",
    "windowed_hausdorff_run",
    "circle_nodes",
    "segment_nodes",
    "polyline_samples",
]


@dataclass(frozen=True)
class SpectralSet:
    points: tuple[complex, ...]
    window: SpectralWindow | None = None
    clipped: bool = False

    def __len__(self):
        return len(self.points)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.points, dtype=complex)


def _sorted_points(values) -> tuple[complex, ...]:
    vals = [complex(v) for v in values]
    # stable sort keeps the eigensolver order among exact ties
    return tuple(sorted(vals, key=lambda c: (c.real, c.imag)))


def spectral_set(A, window: SpectralWindow | None = None) -> SpectralSet:
    """Eigenvalues of ``A`` with multiplicity, sorted by (Re, Im), optionally clipped to a closed window."""
    A = as_operator(A)
    try:
        if A.hermitian_eigenvalues is not None:
            vals = A.hermitian_eigenvalues.astype(complex)
        else:
            vals = scipy.linalg.eigvals(A.entries)
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise NumericalFailure(f"eigenvalue computation failed: {exc}") from exc
    if not np.all(np.isfinite(vals)):
        raise NumericalFailure("eigensolver returned non-finite eigenvalues")
    if window is not None:
        vals = vals[np.asarray(window.contains(vals))]
    return SpectralSet(points=_sorted_points(vals), window=window, clipped=window is not None)


@dataclass(frozen=True)
class HausdorffResult:
    """``d_forward = sup_{S1} dist(., S2)``, ``d_backward = sup_{S2} dist(., S1)``."""

    d_forward: float
    d_backward: float
    d_H: float
    pollution_witnesses: tuple[complex, ...] = ()
    inclusion_defect_witnesses: tuple[complex, ...] = ()


def _points(S) -> np.ndarray:
    if isinstance(S, SpectralSet):
        return S.as_array()
    return np.asarray(list(S), dtype=complex).reshape(-1)


def _one_sided(P: np.ndarray, Q: np.ndarray) -> tuple[float, np.ndarray]:
    """``sup_{p in P} dist(p, Q)`` and the per-point distances."""
    if P.size == 0:
        return 0.0, np.zeros(0)
    if Q.size == 0:
        return math.inf, np.full(P.size, math.inf)
    diff = P[:, None] - Q[None, :]
    # libm hypot, the same arithmetic as Python's abs() on a complex number
    d = np.hypot(diff.real, diff.imag).min(axis=1)
    return float(d.max()), d


def hausdorff_distance(S1, S2, tol: float = 1e-8) -> HausdorffResult:
    """Exact all-pairs Hausdorff distance between two finite point sets.

    Points of ``S1`` farther than ``tol`` from ``S2`` are pollution witnesses;
    points of ``S2`` farther than ``tol`` from ``S1`` witness an inclusion defect.
    Multiplicity is irrelevant.
    """
    P, Q = _points(S1), _points(S2)
    d_fwd, dp = _one_sided(P, Q)
    d_bwd, dq = _one_sided(Q, P)
    return HausdorffResult(
        d_forward=d_fwd,
        d_backward=d_bwd,
        d_H=max(d_fwd, d_bwd),
        pollution_witnesses=_sorted_points(set(P[dp > tol].tolist())),
        inclusion_defect_witnesses=_sorted_points(set(Q[dq > tol].tolist())),
    )


def circle_nodes(center: complex, radius: float, count: int) -> list[complex]:
    k = np.arange(count)
    return [complex(center) + radius * complex(math.cos(t), math.sin(t)) for t in 2 * math.pi * k / count]


def segment_nodes(start: complex, end: complex, count: int) -> list[complex]:
    if count < 2:
        return [complex(start)]
    return [complex(start) + (complex(end) - complex(start)) * (k / (count - 1)) for k in range(count)]


class CertificateKind(str, enum.Enum):
    NO_POLLUTION = "NO_POLLUTION"
    INCLUSION_BOUNDED_RESOLVENT = "INCLUSION_BOUNDED_RESOLVENT"
    ISOLATED_EIGENVALUE = "ISOLATED_EIGENVALUE"


@dataclass(frozen=True)
class CertificateOutcome:
    kind: CertificateKind
    verdict: str  # "pass" | "fail" | "skipped"
    witnesses: dict = field(default_factory=dict)
    tolerances: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.verdict == "fail" and not self.witnesses:
            raise ValueError("a failed certificate must carry witnesses")

    @property
    def witness_count(self) -> int:
        main = {CertificateKind.NO_POLLUTION: "violations",
                CertificateKind.INCLUSION_BOUNDED_RESOLVENT: "violations",
                CertificateKind.ISOLATED_EIGENVALUE: "sequence"}[self.kind]
        if self.verdict == "skipped":
            return len(self.witnesses.get("hypothesis_failures", ()))
        return len(self.witnesses.get(main, ()))


def _check_schedule(family) -> list[FamilyMember]:
    family = list(family)
    if not family:
        raise ValueError("family is empty")
    eps = [m.eps for m in family]
    if any(b >= a for a, b in zip(eps, eps[1:])):
        raise ValueError("family must be sorted by strictly decreasing eps")
    return family


def _family_M(family) -> float:
    return max(m.M for m in family)


def certify_no_pollution(family, limit: LimitProblem, K_nodes, L_threshold: float | None = None) -> CertificateOutcome:
    """Resolvent bound on ``K`` along a tail of the family.

    Passes iff some non-empty tail of the (decreasing-eps) family has
    ``||R_eps(z)|| <= L_threshold`` at every node. The default threshold is
    the forward-lemma constant with ``l = max_K ||R(z)||``, ``r = max_K |z| + 1``
    and ``M`` the largest identification norm over the family.
    """
    family = _check_schedule(family)
    nodes = [complex(z) for z in K_nodes]
    if not nodes:
        raise ValueError("K_nodes is empty")
    limit_norms = [resolvent_norm(limit.A, z).resolvent_norm for z in nodes]
    bad = [z for z, v in zip(nodes, limit_norms) if math.isinf(v)]
    if bad:
        raise ValueError(f"K meets the spectrum of the limit operator at {bad[:5]}")
    l = max(limit_norms)
    r = max(abs(z) for z in nodes) + 1.0
    M = _family_M(family)
    if L_threshold is None:
        L_threshold = lemma_constants(M, l, r, limit.z0).L_forward

    per_member = []
    for m in family:
        norms = [resolvent_norm(m.A_eps, z).resolvent_norm for z in nodes]
        per_member.append(norms)
    ok = [all(v <= L_threshold for v in norms) for norms in per_member]
    tail_start = len(family)
    while tail_start > 0 and ok[tail_start - 1]:
        tail_start -= 1
    tolerances = {"L_threshold": L_threshold, "l": l, "r": r, "M": M,
                  "nodes": [[z.real, z.imag] for z in nodes]}
    max_norms = [{"eps": m.eps, "max_resolvent_norm": max(n)} for m, n in zip(family, per_member)]
    if tail_start < len(family):
        return CertificateOutcome(
            CertificateKind.NO_POLLUTION, "pass",
            witnesses={"eps0": family[tail_start].eps, "per_member": max_norms, "violations": []},
            tolerances=tolerances,
        )
    final = family[-1]
    violations = [{"eps": final.eps, "z": [z.real, z.imag], "resolvent_norm": v}
                  for z, v in zip(nodes, per_member[-1]) if not v <= L_threshold]
    return CertificateOutcome(CertificateKind.NO_POLLUTION, "fail",
                              witnesses={"per_member": max_norms, "violations": violations},
                              tolerances=tolerances)


def polyline_samples(path_nodes, per_segment: int) -> list[complex]:
    pts = [complex(p) for p in path_nodes]
    out = [pts[0]]
    for a, b in zip(pts, pts[1:]):
        out.extend(segment_nodes(a, b, per_segment + 1)[1:])
    return out


def certify_inclusion_bounded_resolvent(family, limit: LimitProblem, K_nodes, path_nodes, l: float,
                                        per_segment: int = 8, r: float | None = None) -> CertificateOutcome:
    """Spectral inclusion under a uniform resolvent bound along ``K`` and a path to ``z0``.

    Hypotheses: every node of ``K`` and of the sampled polyline is in the
    resolvent set of every member with ``||R_eps(z)|| <= l``. If they hold the
    certificate passes iff ``||R(z)|| <= L_reverse_safe`` on every node of ``K``.
    """
    family = _check_schedule(family)
    nodes = [complex(z) for z in K_nodes]
    path = [complex(p) for p in path_nodes]
    if len(path) < 1 or abs(path[-1] - limit.z0) > 1e-12 * (1.0 + abs(limit.z0)):
        raise ValueError(f"path must be a polyline ending at z0={limit.z0}")
    if not nodes:
        raise ValueError("K_nodes is empty")
    path_pts = polyline_samples(path, per_segment)
    checked = nodes + path_pts
    if r is None:
        r = max(abs(z) for z in checked) + 1.0
    M = _family_M(family)
    consts = lemma_constants(M, l, r, limit.z0)
    tolerances = {"l": l, "r": r, "M": M, "L_reverse_safe": consts.L_reverse_safe,
                  "L_reverse_stated": consts.L_reverse_stated,
                  "nodes": [[z.real, z.imag] for z in nodes],
                  "path": [[z.real, z.imag] for z in path]}

    failures = []
    for m in family:
        for z in checked:
            v = resolvent_norm(m.A_eps, z).resolvent_norm
            if not v <= l:
                failures.append({"eps": m.eps, "z": [z.real, z.imag], "resolvent_norm": v})
    if failures:
        return CertificateOutcome(CertificateKind.INCLUSION_BOUNDED_RESOLVENT, "skipped",
                                  witnesses={"hypothesis_failures": failures,
                                             "reason": "resolvent of the family not bounded by l on K and path"},
                                  tolerances=tolerances)
    observed = [(z, resolvent_norm(limit.A, z).resolvent_norm) for z in nodes]
    violations = [{"z": [z.real, z.imag], "resolvent_norm": v} for z, v in observed
                  if not v <= consts.L_reverse_safe]
    stated_ok = all(v <= consts.L_reverse_stated for _, v in observed)
    witnesses = {"violations": violations, "max_limit_resolvent_norm": max(v for _, v in observed),
                 "holds_stated_constant": stated_ok}
    return CertificateOutcome(CertificateKind.INCLUSION_BOUNDED_RESOLVENT,
                              "fail" if violations else "pass", witnesses=witnesses, tolerances=tolerances)


def certify_isolated_eigenvalue(family, limit: LimitProblem, lam: complex, delta: float,
                                tolerance_schedule=None) -> CertificateOutcome:
    """Track the eigenvalue of each member nearest an isolated eigenvalue ``lam`` of the limit.

    Passes iff a non-empty tail of the family has ``|lam_eps - lam|`` within the
    tolerance schedule (default ``delta * eps / eps_first``) and the final gap is
    below ``delta``.
    """
    family = _check_schedule(family)
    lam = complex(lam)
    if not delta > 0:
        raise ValueError("delta must be positive")
    limit_vals = spectral_set(limit.A).as_array()
    d = np.abs(limit_vals - lam)
    same = d <= 1e-8 * (1.0 + abs(lam))
    if not np.any(same):
        raise ValueError(f"lambda={lam} is not an eigenvalue of the limit operator")
    others = d[~same]
    if others.size and others.min() < delta:
        raise ValueError(f"lambda={lam} is not isolated at scale delta={delta}: "
                         f"another eigenvalue at distance {others.min():.6g}")
    ring = circle_nodes(lam, delta / 2, 16) + circle_nodes(lam, delta, 16)
    if any(resolvent_norm(limit.A, z).is_singular for z in ring):
        raise ValueError("punctured ball around lambda meets the spectrum of the limit operator")

    if tolerance_schedule is None:
        tolerance_schedule = [delta * m.eps / family[0].eps for m in family]
    tol = [float(t) for t in tolerance_schedule]
    if len(tol) != len(family):
        raise ValueError("tolerance schedule must have one entry per family member")

    sequence = []
    for m, t in zip(family, tol):
        vals = spectral_set(m.A_eps).as_array()
        k = int(np.argmin(np.abs(vals - lam)))
        gap = float(abs(vals[k] - lam))
        sequence.append({"eps": m.eps, "lambda_eps": [vals[k].real, vals[k].imag], "gap": gap,
                         "tolerance": t, "within": gap <= t})
    tail_start = len(family)
    while tail_start > 0 and sequence[tail_start - 1]["within"]:
        tail_start -= 1
    ok = tail_start < len(family) and sequence[-1]["gap"] < delta
    witnesses = {"sequence": sequence}
    if ok:
        witnesses["eps0"] = family[tail_start].eps
    return CertificateOutcome(CertificateKind.ISOLATED_EIGENVALUE, "pass" if ok else "fail",
                              witnesses=witnesses,
                              tolerances={"delta": delta, "lambda": [lam.real, lam.imag], "schedule": tol})


def windowed_hausdorff_run(family, limit: LimitProblem, window: SpectralWindow,
                           tol: float = 1e-8) -> list[tuple[float, HausdorffResult]]:
    """Hausdorff distance between windowed spectra of each member and of the limit, by decreasing eps."""
    target = spectral_set(limit.A, window)
    members = sorted(family, key=lambda m: -m.eps)
    return [(m.eps, hausdorff_distance(spectral_set(m.A_eps, window), target, tol=tol)) for m in members]
