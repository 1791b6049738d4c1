"""Delta-supported current action on the level-zero eigenbasis.

The raising and lowering series act on an eigenbasis vector through
finitely many delta distributions pinned at the module's spectral
points, while the diagonal series acts pointwise in the spectral
variable.  This module keeps the coefficient bookkeeping of those
finitely many terms and the consistency checks that make the family a
representation: the partial fraction identity behind the diagonal
residues, support-wise commutativity of raising and lowering
operators with distinct labels, the closed residue form of the
equal-label commutator, and the highest weight data.

Charge bookkeeping: a raising or diagonal operator with label j also
shifts the dynamical parameter along the j-th simple root, the
lowering operator does not.  None of the coefficients below depend on
the dynamical parameter, and the accumulated shift of a composite is
determined by its labels alone, so equal-label comparisons never need
the shift tracked explicitly.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .partitions import IndexPartition
from .theta import EllipticParams, bracket, bracket_deriv_zero, pochhammer_inf

_DENOM_FLOOR = 1e-12

LOWERING_NORMALIZATION = 1.0 + 0.0j


def scaling_constant(params: EllipticParams, p_star: complex | None = None) -> complex:
    """Overall diagonal normalization.

    Computed from the ratio of theta constants at the two nomes; the
    level-zero regime has equal nomes, where the value is exactly one.
    """
    p = params.p
    if p_star is None:
        p_star = p
    q2 = params.qpow(2.0)
    num = pochhammer_inf(p, p) * pochhammer_inf(p_star * q2, p_star)
    den = pochhammer_inf(p_star, p_star) * pochhammer_inf(p * q2, p)
    return num / den


def raising_normalization(params: EllipticParams) -> complex:
    """Companion constant of the raising series.

    Only the product of the two normalizations is constrained; the
    lowering one is fixed to unity, so this carries the full constant.
    """
    qq = complex(params.q) - 1.0 / complex(params.q)
    return (
        -scaling_constant(params)
        * bracket_deriv_zero(params)
        / (qq * bracket(params, 1.0) * LOWERING_NORMALIZATION)
    )


def commutator_constant(params: EllipticParams) -> complex:
    """Coefficient carried by every composite of one raising and one
    lowering term."""
    ratio = bracket(params, 1.0) / bracket_deriv_zero(params)
    return LOWERING_NORMALIZATION * raising_normalization(params) * ratio * ratio


def _ratio(params: EllipticParams, top: complex, bottom: complex) -> complex:
    den = bracket(params, bottom)
    if abs(den) < _DENOM_FLOOR:
        raise ValueError("bracket ratio evaluated at a lattice zero")
    return bracket(params, top) / den


@dataclass(frozen=True)
class DeltaTerm:
    """One delta-supported contribution: ``coeff`` times the basis
    vector of ``word``, supported where the current variable meets the
    spectral point of ``site`` (1-based)."""

    site: int
    word: tuple[int, ...]
    coeff: complex


def h_function(
    params: EllipticParams,
    j: int,
    part: IndexPartition,
    v: complex,
    us: Sequence[complex],
) -> complex:
    """Bare diagonal eigenvalue profile in the additive variable."""
    if not 1 <= j <= params.N - 1:
        raise ValueError("diagonal label out of range")
    us = tuple(complex(u) for u in us)
    v = complex(v)
    value = 1.0 + 0.0j
    for a in part.blocks[j - 1]:
        x = us[a - 1] - v
        value *= _ratio(params, x + 1, x)
    for b in part.blocks[j]:
        x = us[b - 1] - v
        value *= _ratio(params, x - 1, x)
    return value


def diagonal_eigenvalue(
    params: EllipticParams,
    j: int,
    part: IndexPartition,
    v: complex,
    us: Sequence[complex],
) -> complex:
    """Eigenvalue of the diagonal current with label j on the
    eigenbasis vector of ``part``; both signs coincide pointwise at
    level zero."""
    return scaling_constant(params) * h_function(params, j, part, v, us)


def h_residue(
    params: EllipticParams,
    j: int,
    part: IndexPartition,
    site: int,
    us: Sequence[complex],
) -> complex:
    """Closed-form residue of the diagonal profile at the spectral
    point of ``site``, which must lie in block j or block j + 1."""
    us = tuple(complex(u) for u in us)
    upper = part.blocks[j - 1]
    lower = part.blocks[j]
    if site in upper:
        head = -bracket(params, 1.0) / bracket_deriv_zero(params)
    elif site in lower:
        head = -bracket(params, -1.0) / bracket_deriv_zero(params)
    else:
        raise ValueError("site is not in the two blocks of this label")
    u_c = us[site - 1]
    value = head
    for a in upper:
        if a == site:
            continue
        diff = us[a - 1] - u_c
        value *= _ratio(params, diff + 1, diff)
    for b in lower:
        if b == site:
            continue
        diff = us[b - 1] - u_c
        value *= _ratio(params, diff - 1, diff)
    return value


def raising_terms(
    params: EllipticParams,
    j: int,
    part: IndexPartition,
    us: Sequence[complex],
) -> tuple[DeltaTerm, ...]:
    """Delta expansion of the raising current with label j applied to
    one eigenbasis vector: one term per site of block j + 1."""
    if not 1 <= j <= params.N - 1:
        raise ValueError("raising label out of range")
    us = tuple(complex(u) for u in us)
    head = (
        raising_normalization(params)
        * bracket(params, 1.0)
        / bracket_deriv_zero(params)
    )
    terms = []
    block = part.blocks[j]
    for i in block:
        tail = 1.0 + 0.0j
        for k in block:
            if k == i:
                continue
            diff = us[i - 1] - us[k - 1]
            tail *= _ratio(params, diff + 1, diff)
        terms.append(DeltaTerm(i, part.move_up(i).word, head * tail))
    return tuple(terms)


def lowering_terms(
    params: EllipticParams,
    j: int,
    part: IndexPartition,
    us: Sequence[complex],
) -> tuple[DeltaTerm, ...]:
    """Delta expansion of the lowering current with label j applied to
    one eigenbasis vector: one term per site of block j."""
    if not 1 <= j <= params.N - 1:
        raise ValueError("lowering label out of range")
    us = tuple(complex(u) for u in us)
    head = (
        LOWERING_NORMALIZATION
        * bracket(params, 1.0)
        / bracket_deriv_zero(params)
    )
    terms = []
    block = part.blocks[j - 1]
    for i in block:
        tail = 1.0 + 0.0j
        for k in block:
            if k == i:
                continue
            diff = us[k - 1] - us[i - 1]
            tail *= _ratio(params, diff + 1, diff)
        terms.append(DeltaTerm(i, part.move_down(i).word, head * tail))
    return tuple(terms)


def _compose(
    params: EllipticParams,
    i: int,
    j: int,
    part: IndexPartition,
    us: Sequence[complex],
    raising_first: bool,
) -> dict[tuple[int, int, tuple[int, ...]], complex]:
    """Terms of a raising(i)/lowering(j) composite on one eigenbasis
    vector, keyed by (lowering site, raising site, final word)."""
    terms: dict[tuple[int, int, tuple[int, ...]], complex] = {}
    if raising_first:
        for e_term in raising_terms(params, i, part, us):
            mid = IndexPartition(e_term.word, params.N)
            for f_term in lowering_terms(params, j, mid, us):
                key = (f_term.site, e_term.site, f_term.word)
                terms[key] = terms.get(key, 0j) + e_term.coeff * f_term.coeff
    else:
        for f_term in lowering_terms(params, j, part, us):
            mid = IndexPartition(f_term.word, params.N)
            for e_term in raising_terms(params, i, mid, us):
                key = (f_term.site, e_term.site, e_term.word)
                terms[key] = terms.get(key, 0j) + e_term.coeff * f_term.coeff
    return terms


def ef_commutator_report(
    params: EllipticParams,
    i: int,
    j: int,
    part: IndexPartition,
    us: Sequence[complex],
) -> dict[str, float]:
    """Support-wise commutator of raising(i) with lowering(j).

    Equal delta supports are compared term by term.  For distinct
    labels every term must cancel; for equal labels the mixed-site
    terms cancel and the equal-site diagonal must match the closed
    residue form.  Returns the worst relative defect of each part.
    """
    ef = _compose(params, i, j, part, us, raising_first=False)
    fe = _compose(params, i, j, part, us, raising_first=True)
    keys = set(ef) | set(fe)
    scale = max(
        [1.0]
        + [abs(c) for c in ef.values()]
        + [abs(c) for c in fe.values()]
    )
    offdiag = 0.0
    diag = 0.0
    expected_head = (
        -bracket_deriv_zero(params)
        * commutator_constant(params)
        / bracket(params, 1.0)
    )
    for key in keys:
        f_site, e_site, word = key
        value = ef.get(key, 0j) - fe.get(key, 0j)
        if i == j and f_site == e_site and word == part.word:
            expected = expected_head * h_residue(params, j, part, f_site, us)
            diag = max(diag, abs(value - expected) / scale)
        else:
            offdiag = max(offdiag, abs(value) / scale)
    return {"offdiag": offdiag, "diag": diag}


def partial_fraction_defect(
    params: EllipticParams,
    us: Sequence[complex],
    m: int,
    v: complex,
) -> float:
    """Relative defect of the partial fraction expansion splitting a
    product of shifted bracket ratios into first-order poles.

    The expansion balances m raised factors against the remaining
    lowered ones and is undefined where the balance bracket vanishes
    (2m - n on the zero lattice); that degenerate case raises.
    """
    us = tuple(complex(u) for u in us)
    n = len(us)
    if not 1 <= m <= n:
        raise ValueError("need 1 <= m <= n")
    v = complex(v)
    balance = bracket(params, float(2 * m - n))
    if abs(balance) < 1e-9:
        raise ValueError(
            "balance bracket vanishes for this (m, n); expansion undefined"
        )
    lhs = 1.0 + 0.0j
    for k in range(1, m + 1):
        x = v - us[k - 1]
        lhs *= _ratio(params, x + 1, x)
    for l in range(m + 1, n + 1):
        x = v - us[l - 1]
        lhs *= _ratio(params, x - 1, x)
    rhs = 0.0 + 0.0j
    for a in range(1, n + 1):
        u_a = us[a - 1]
        term = bracket(params, v - u_a + 2 * m - n) / (
            balance * bracket(params, v - u_a)
        )
        for k in range(1, m + 1):
            if k != a:
                term *= bracket(params, u_a - us[k - 1] + 1)
            else:
                term *= bracket(params, 1.0)
        for l in range(m + 1, n + 1):
            if l != a:
                term *= bracket(params, u_a - us[l - 1] - 1)
            else:
                term *= bracket(params, -1.0)
        for b in range(1, n + 1):
            if b != a:
                term /= bracket(params, u_a - us[b - 1])
        rhs += term
    return abs(lhs - rhs) / max(1.0, abs(lhs), abs(rhs))


def residue_limit_defect(
    params: EllipticParams,
    j: int,
    part: IndexPartition,
    us: Sequence[complex],
    eps: float = 1e-5,
) -> float:
    """Closed residue values against a symmetric numerical limit of
    the diagonal profile; worst relative defect over supported sites."""
    us = tuple(complex(u) for u in us)
    worst = 0.0
    for site in tuple(part.blocks[j - 1]) + tuple(part.blocks[j]):
        u_c = us[site - 1]
        plus = eps * h_function(params, j, part, u_c + eps, us)
        minus = -eps * h_function(params, j, part, u_c - eps, us)
        numeric = 0.5 * (plus + minus)
        closed = h_residue(params, j, part, site, us)
        worst = max(worst, abs(numeric - closed) / max(1.0, abs(closed)))
    return worst


def drinfeld_polynomial(
    params: EllipticParams,
    l: int,
    v: complex,
    us: Sequence[complex],
) -> complex:
    """Classifying polynomial of the one-row module: nontrivial only
    in the first slot, where it is the product of raised brackets over
    all spectral points."""
    if l < 1:
        raise ValueError("label must be positive")
    if l > 1:
        return 1.0 + 0.0j
    value = 1.0 + 0.0j
    for u in us:
        value *= bracket(params, complex(u) - complex(v) + 1)
    return value


def highest_weight_report(
    params: EllipticParams,
    us: Sequence[complex],
    v: complex,
) -> dict[str, float]:
    """Highest weight data of the module generated by the all-ones
    word: every raising current kills it (an empty term list, reported
    as an exact count), and the diagonal eigenvalues are the ratio of
    classifying polynomials at unit shift."""
    us = tuple(complex(u) for u in us)
    part = IndexPartition((1,) * len(us), params.N)
    raising_count = 0
    for j in range(1, params.N):
        raising_count += len(raising_terms(params, j, part, us))
    h_defect = 0.0
    rho = scaling_constant(params)
    for j in range(1, params.N):
        got = diagonal_eigenvalue(params, j, part, v, us)
        top = drinfeld_polynomial(params, j, v, us)
        bottom = drinfeld_polynomial(params, j, v + 1, us)
        want = rho * top / bottom
        h_defect = max(h_defect, abs(got - want) / max(1.0, abs(want)))
    return {"raising_terms": float(raising_count), "h_defect": h_defect}
