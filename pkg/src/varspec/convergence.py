"""Defects of the four extended norm-resolvent conditions and the lemma constants.

A family member carries its own space ``H_eps`` (dimension ``n_eps``) and the
identification operators ``I_eps: H -> H_eps`` and ``J_eps: H_eps -> H``. The
four conditions are measured as

    (i)   ||I J - Id||  from the graph-norm space V_eps into H_eps
    (ii)  sup over probes of ||J I u - u|| / ||u||   (strong convergence, sampled)
    (iii) max(||I||, ||J||)
    (iv)  ||J R_eps(z0) - R(z0) J||

Lemma checks are implications. A node where a hypothesis fails is reported
with status ``"skipped"`` together with the failed hypothesis, never as a
violation of the bound.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .operators import (
    DiscreteOperator,
    as_operator,
    graph_weight,
    norm_V_to_H,
    operator_norm,
    resolvent,
    resolvent_norm,
)
from .resolvent_engine import commutator_defect

PASS, FAIL, SKIPPED = "pass", "fail", "skipped"


@dataclass(frozen=True, eq=False)
class FamilyMember:
    eps: float
    A_eps: DiscreteOperator
    I_eps: np.ndarray
    J_eps: np.ndarray
    label: str = ""

    def __post_init__(self):
        eps = float(self.eps)
        if not eps > 0:
            raise ValueError(f"eps must be positive, got {self.eps}")
        object.__setattr__(self, "eps", eps)
        A = as_operator(self.A_eps)
        object.__setattr__(self, "A_eps", A)
        I = np.array(self.I_eps, dtype=complex)
        J = np.array(self.J_eps, dtype=complex)
        if I.ndim != 2 or J.ndim != 2:
            raise ValueError("identification operators must be matrices")
        if I.shape[0] != A.dim or J.shape[1] != A.dim:
            raise ValueError(f"I_eps {I.shape} / J_eps {J.shape} do not act on H_eps of dimension {A.dim}")
        if I.shape[1] != J.shape[0]:
            raise ValueError(f"I_eps {I.shape} and J_eps {J.shape} disagree on dim H")
        I.setflags(write=False)
        J.setflags(write=False)
        object.__setattr__(self, "I_eps", I)
        object.__setattr__(self, "J_eps", J)

    @property
    def dim_h(self) -> int:
        return self.I_eps.shape[1]

    @property
    def M(self) -> float:
        return max(operator_norm(self.I_eps), operator_norm(self.J_eps))


@dataclass(frozen=True, eq=False)
class LimitProblem:
    A: DiscreteOperator
    z0: complex

    def __post_init__(self):
        A = as_operator(self.A)
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "z0", complex(self.z0))
        if resolvent_norm(A, self.z0).is_singular:
            raise ValueError(f"z0={self.z0} lies in the spectrum of the limit operator")

    @property
    def dim(self) -> int:
        return self.A.dim


def _check_member(member: FamilyMember, limit: LimitProblem):
    if member.dim_h != limit.dim:
        raise ValueError(f"member acts on H of dimension {member.dim_h}, limit has {limit.dim}")


@dataclass(frozen=True)
class Thresholds:
    """Upper thresholds for the condition defects; ``None`` means unchecked."""

    cond_i: float | None = None
    cond_ii: float | None = None
    cond_iii: float | None = None
    cond_iv: float | None = None

    @classmethod
    def from_lemma(cls, z0: complex, M: float, l: float, r: float, cond_ii: float | None = None):
        """Thresholds taken from the forward lemma's hypotheses."""
        consts = lemma_constants(M, l, r, z0)
        return cls(cond_i=1.0 / (2.0 * (abs(complex(z0)) + r)), cond_ii=cond_ii, cond_iii=M, cond_iv=consts.delta)


@dataclass(frozen=True)
class ConvergenceReport:
    eps: float
    cond_i: tuple[float, float]
    cond_ii: float
    cond_iii_M: float
    cond_iv: float
    probes_used: int
    default_probes: bool
    verdicts: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool | None:
        checked = [v for v in self.verdicts.values() if v is not None]
        return all(checked) if checked else None


def default_probes(n: int, n_random: int = 20, seed: int = 0) -> list[np.ndarray]:
    """Canonical basis of C^n plus ``n_random`` seeded random unit vectors."""
    rng = np.random.default_rng(seed)
    probes = [np.eye(n, dtype=complex)[k] for k in range(n)]
    for _ in range(n_random):
        v = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        probes.append(v / np.linalg.norm(v))
    return probes


def _as_probes(probes, n: int) -> list[np.ndarray]:
    out = []
    for p in probes:
        v = np.asarray(p, dtype=complex).reshape(-1)
        if v.shape[0] != n:
            raise ValueError(f"probe of length {v.shape[0]} does not live in H of dimension {n}")
        nv = np.linalg.norm(v)
        if not nv > 0:
            raise ValueError("probes must be nonzero")
        out.append(v)
    if not out:
        raise ValueError("probe set is empty")
    return out


def condition_i(member: FamilyMember) -> tuple[float, float]:
    """``||I J - Id||_{L(V_eps, H_eps)}`` as a (lower, upper) bracket for the sum graph norm."""
    n_eps = member.A_eps.dim
    T = member.I_eps @ member.J_eps - np.eye(n_eps)
    _, lower, upper = norm_V_to_H(T, graph_weight(member.A_eps))
    return lower, upper


def condition_ii(member: FamilyMember, probes) -> float:
    JI = member.J_eps @ member.I_eps
    return max(float(np.linalg.norm(JI @ u - u) / np.linalg.norm(u)) for u in probes)


def condition_report(member: FamilyMember, limit: LimitProblem, probes=None,
                     thresholds: Thresholds | None = None) -> ConvergenceReport:
    _check_member(member, limit)
    use_default = probes is None
    probes = default_probes(limit.dim) if use_default else _as_probes(probes, limit.dim)
    c1 = condition_i(member)
    c2 = condition_ii(member, probes)
    c3 = member.M
    c4 = commutator_defect(member, limit.A, limit.z0).value
    t = thresholds or Thresholds()
    verdicts = {
        "cond_i": None if t.cond_i is None else c1[1] < t.cond_i,
        "cond_ii": None if t.cond_ii is None else c2 <= t.cond_ii,
        "cond_iii": None if t.cond_iii is None else c3 <= t.cond_iii,
        "cond_iv": None if t.cond_iv is None else c4 < t.cond_iv,
    }
    return ConvergenceReport(eps=member.eps, cond_i=c1, cond_ii=c2, cond_iii_M=c3, cond_iv=c4,
                             probes_used=len(probes), default_probes=use_default, verdicts=verdicts)


@dataclass(frozen=True)
class LemmaConstants:
    M: float
    l: float
    r: float
    z0: complex
    delta: float
    L_forward: float
    L_reverse_stated: float
    L_reverse_safe: float


def lemma_constants(M: float, l: float, r: float, z0: complex) -> LemmaConstants:
    """Constants of the forward and reverse resolvent lemmas.

    ``delta`` is an open bound: the commutator defect at ``z0`` must be strictly
    smaller. ``L_reverse_safe`` is four times the stated reverse constant,
    which is what absorbing the ``||R(z)|| / 4`` term actually yields.
    """
    M, l, r = float(M), float(l), float(r)
    for name, v in (("M", M), ("l", l), ("r", r)):
        if not (v > 0 and math.isfinite(v)):
            raise ValueError(f"{name} must be positive and finite, got {v}")
    z0 = complex(z0)
    s = abs(z0) + r
    delta = 1.0 / (4.0 * M * (1.0 + s * l) * s)
    L_forward = 4.0 * M * M * l + 3.0 / (2.0 * s)
    L_rev = 1.0 / (4.0 * s) + M * M * l
    return LemmaConstants(M=M, l=l, r=r, z0=z0, delta=delta, L_forward=L_forward,
                          L_reverse_stated=L_rev, L_reverse_safe=4.0 * L_rev)


@dataclass(frozen=True)
class ForwardCheck:
    z: complex
    L: float
    observed: float
    holds: bool
    status: str
    reason: str = ""


def _spectral_guard(member, limit, z):
    if resolvent_norm(member.A_eps, z).is_singular:
        raise ValueError(f"z={z} lies in the spectrum of A_eps (eps={member.eps})")
    if resolvent_norm(limit.A, z).is_singular:
        raise ValueError(f"z={z} lies in the spectrum of the limit operator")


@dataclass(frozen=True)
class MemberDefects:
    """Per-member quantities the lemma hypotheses need; independent of ``z``."""

    M: float
    cond_i_upper: float
    cond_iv: float


def member_defects(member: FamilyMember, limit: LimitProblem) -> MemberDefects:
    _check_member(member, limit)
    return MemberDefects(M=member.M, cond_i_upper=condition_i(member)[1],
                         cond_iv=commutator_defect(member, limit.A, limit.z0).value)


def verify_forward_bound(member: FamilyMember, limit: LimitProblem, z: complex, l: float, r: float,
                         M: float | None = None, defects: MemberDefects | None = None) -> ForwardCheck:
    """Check ``||R_eps(z)|| <= L_forward`` at a node where the forward lemma applies."""
    _check_member(member, limit)
    z = complex(z)
    _spectral_guard(member, limit, z)
    d = defects or member_defects(member, limit)
    consts = lemma_constants(d.M if M is None else M, l, r, limit.z0)
    observed = resolvent_norm(member.A_eps, z).resolvent_norm
    holds = observed <= consts.L_forward * (1.0 + 1e-8)

    failed = []
    if not d.cond_iv < consts.delta:
        failed.append(f"commutator defect {d.cond_iv:.3g} >= delta {consts.delta:.3g}")
    limit_norm = resolvent_norm(limit.A, z).resolvent_norm
    if not limit_norm <= l:
        failed.append(f"||R(z)|| = {limit_norm:.6g} > l = {l:.6g}")
    cap = 1.0 / (2.0 * (abs(limit.z0) + r))
    if not d.cond_i_upper < cap:
        failed.append(f"cond (i) upper {d.cond_i_upper:.3g} >= {cap:.3g}")
    if not abs(z) < r:
        failed.append(f"|z| = {abs(z):.6g} not inside B_r(0), r = {r:.6g}")
    if failed:
        return ForwardCheck(z=z, L=consts.L_forward, observed=observed, holds=holds,
                            status=SKIPPED, reason="; ".join(failed))
    return ForwardCheck(z=z, L=consts.L_forward, observed=observed, holds=holds,
                        status=PASS if holds else FAIL)


def verify_forward_nodes(member, limit, nodes, l, r, M=None) -> list[ForwardCheck]:
    d = member_defects(member, limit)
    return [verify_forward_bound(member, limit, z, l, r, M, defects=d) for z in nodes]


@dataclass(frozen=True)
class ReverseCheck:
    z: complex
    observed: float
    L_safe: float
    L_stated: float
    holds_safe: bool
    holds_stated: bool
    status: str
    reason: str = ""


def verify_reverse_bound(member: FamilyMember, limit: LimitProblem, K_nodes, l: float, r: float,
                         M: float | None = None, probes=None) -> list[ReverseCheck]:
    """Check ``||R(z)|| <= L_reverse`` on nodes where the reverse lemma applies.

    The per-vector estimate behind the lemma is applied at the top right
    singular vector ``u*`` of ``R(z)``; it needs ``||u* - J I u*|| < 1/2``. When
    ``probes`` are supplied their worst ``J I`` defect must be below 1/2 too.
    ``status`` follows ``holds_safe``; ``holds_stated`` is recorded only.
    """
    _check_member(member, limit)
    nodes = [complex(z) for z in K_nodes]
    for z in nodes:
        _spectral_guard(member, limit, z)
    M = member.M if M is None else float(M)
    consts = lemma_constants(M, l, r, limit.z0)
    cond_iv = commutator_defect(member, limit.A, limit.z0).value
    JI = member.J_eps @ member.I_eps
    probe_defect = None if probes is None else condition_ii(member, _as_probes(probes, limit.dim))

    out = []
    for z in nodes:
        observed = resolvent_norm(limit.A, z).resolvent_norm
        holds_safe = observed <= consts.L_reverse_safe * (1.0 + 1e-8)
        holds_stated = observed <= consts.L_reverse_stated * (1.0 + 1e-8)
        failed = []
        if not cond_iv < consts.delta:
            failed.append(f"commutator defect {cond_iv:.3g} >= delta {consts.delta:.3g}")
        eps_norm = resolvent_norm(member.A_eps, z).resolvent_norm
        if not eps_norm <= l:
            failed.append(f"||R_eps(z)|| = {eps_norm:.6g} > l = {l:.6g}")
        if not abs(z) < r:
            failed.append(f"|z| = {abs(z):.6g} not inside B_r(0), r = {r:.6g}")
        _, _, vh = np.linalg.svd(resolvent(limit.A, z))
        u = vh[0].conj()
        top_defect = float(np.linalg.norm(JI @ u - u))
        if not top_defect < 0.5:
            failed.append(f"||u* - J I u*|| = {top_defect:.3g} >= 1/2")
        if probe_defect is not None and not probe_defect < 0.5:
            failed.append(f"probe J I defect {probe_defect:.3g} >= 1/2")
        if failed:
            status, reason = SKIPPED, "; ".join(failed)
        else:
            status, reason = (PASS if holds_safe else FAIL), ""
        out.append(ReverseCheck(z=z, observed=observed, L_safe=consts.L_reverse_safe,
                                L_stated=consts.L_reverse_stated, holds_safe=holds_safe,
                                holds_stated=holds_stated, status=status, reason=reason))
    return out


@dataclass(frozen=True)
class StrongVariantCheck:
    residual: float
    bound: float
    holds: bool
    status: str
    reason: str = ""


def verify_strong_variant(member: FamilyMember, limit: LimitProblem, probes, z: complex, l: float,
                          M: float | None = None) -> list[StrongVariantCheck]:
    """Per-probe inequality from the strong-resolvent variant.

    For unit ``u``: ``||R(z)u|| <= M ||V_eps(z)u|| + M^2 l + ||(Id - J I) R(z) u||``
    with ``V_eps(z) = I R(z) - R_eps(z) I``. It follows from the decomposition
    ``R = J V_eps + J R_eps I + (Id - J I) R`` whenever ``||R_eps(z)|| <= l``,
    so a violation points at a bug rather than at the family.
    """
    _check_member(member, limit)
    z = complex(z)
    _spectral_guard(member, limit, z)
    probes = _as_probes(probes, limit.dim)
    M = member.M if M is None else float(M)
    R = resolvent(limit.A, z)
    R_eps = resolvent(member.A_eps, z)
    I, J = member.I_eps, member.J_eps
    V = I @ R - R_eps @ I
    JI = J @ I
    eps_norm = resolvent_norm(member.A_eps, z).resolvent_norm
    out = []
    for u in probes:
        u = u / np.linalg.norm(u)
        Ru = R @ u
        residual = float(np.linalg.norm(Ru))
        bound = float(M * np.linalg.norm(V @ u) + M * M * l + np.linalg.norm(Ru - JI @ Ru))
        holds = residual <= bound + 1e-10 * (1.0 + bound)
        if not eps_norm <= l:
            out.append(StrongVariantCheck(residual, bound, holds, SKIPPED,
                                          f"||R_eps(z)|| = {eps_norm:.6g} > l = {l:.6g}"))
        else:
            out.append(StrongVariantCheck(residual, bound, holds, PASS if holds else FAIL))
    return out
