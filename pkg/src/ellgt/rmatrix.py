"""The basic dynamical elliptic R-matrix and its consistency checks.

The matrix acts on the tensor square of the N-dimensional vector space
with basis v_1, ..., v_N.  Its entries are ratios of theta brackets in
the additive spectral variable u (the multiplicative one is z = q^{2u})
and in the dynamical parameter, which we realize as an N-vector of
complex numbers: the scalar entering an entry attached to the ordered
pair (j, k) is the difference of the j-th and k-th components.  Weight
shifts of the dynamical parameter are then plain vector additions.

Conventions: matrix element M[row, col] maps input column to output row;
the pair (mu, nu) is flattened as N * (mu - 1) + (nu - 1).  At u = 0 the
matrix is exactly the permutation operator, and the exchange entries are
arranged so this holds in floating point without rounding error.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .theta import EllipticParams, bracket, rho_minus, rho_plus

_DENOM_FLOOR = 1e-12


@dataclass(frozen=True)
class DynamicalParameter:
    """Dynamical parameter as an N-vector; pair values are differences."""

    values: tuple[complex, ...]

    @classmethod
    def from_values(cls, values: Sequence[complex]) -> "DynamicalParameter":
        return cls(tuple(complex(v) for v in values))

    @property
    def size(self) -> int:
        return len(self.values)

    def pair(self, j: int, k: int) -> complex:
        """Difference of components j and k (1-based)."""
        return self.values[j - 1] - self.values[k - 1]

    def shifted(self, weight: Sequence[float]) -> "DynamicalParameter":
        """Add a weight vector componentwise."""
        if len(weight) != self.size:
            raise ValueError("weight length must match parameter size")
        return DynamicalParameter(
            tuple(v + w for v, w in zip(self.values, weight))
        )

    def shifted_unit(self, component: int, amount: float = 1.0) -> "DynamicalParameter":
        """Add ``amount`` to a single 1-based component."""
        values = list(self.values)
        values[component - 1] += amount
        return DynamicalParameter(tuple(values))

    def negated(self) -> "DynamicalParameter":
        return DynamicalParameter(tuple(-v for v in self.values))


def _checked_div(num: complex, den: complex, what: str) -> complex:
    if abs(den) < _DENOM_FLOOR:
        raise ValueError(f"near-singular denominator in {what}")
    return num / den


def entry_b(params: EllipticParams, u: complex, s: complex) -> complex:
    """Diagonal exchange entry [s+1][s-1][u] / ([s]^2 [u+1])."""
    num = bracket(params, s + 1) * bracket(params, s - 1) * bracket(params, u)
    den = bracket(params, s) ** 2 * bracket(params, u + 1)
    return _checked_div(num, den, "entry_b")


def entry_b_bar(params: EllipticParams, u: complex) -> complex:
    """Diagonal exchange entry [u] / [u+1]."""
    return _checked_div(
        bracket(params, u), bracket(params, u + 1), "entry_b_bar"
    )


def entry_c(params: EllipticParams, u: complex, s: complex) -> complex:
    """Off-diagonal entry [1][s+u] / ([s][u+1]).

    Evaluated as ([1] * [s+u]) / ([s] * [u+1]): at u = 0 with real data
    the numerator and denominator are identical float products, so the
    quotient is exactly 1.0 and the matrix degenerates to an exact
    permutation.
    """
    num = bracket(params, 1.0) * bracket(params, s + u)
    den = bracket(params, s) * bracket(params, u + 1)
    return _checked_div(num, den, "entry_c")


def entry_c_bar(params: EllipticParams, u: complex, s: complex) -> complex:
    """Off-diagonal entry [1][s-u] / ([s][u+1])."""
    num = bracket(params, 1.0) * bracket(params, s - u)
    den = bracket(params, s) * bracket(params, u + 1)
    return _checked_div(num, den, "entry_c_bar")


def pair_index(params: EllipticParams, mu: int, nu: int) -> int:
    """Flatten the ordered pair (mu, nu) of 1-based labels."""
    return params.N * (mu - 1) + (nu - 1)


def permutation_matrix(params: EllipticParams) -> np.ndarray:
    """The flip operator v_a x v_b -> v_b x v_a on the tensor square."""
    size = params.N * params.N
    perm = np.zeros((size, size), dtype=complex)
    for a in range(1, params.N + 1):
        for b in range(1, params.N + 1):
            perm[pair_index(params, b, a), pair_index(params, a, b)] = 1.0
    return perm


def rbar_matrix(
    params: EllipticParams, u: complex, dyn: DynamicalParameter
) -> np.ndarray:
    """The basic R-matrix on the tensor square, in the pair basis.

    For j1 < j2 the 2x2 exchange block sends column (j1, j2) to
    b * (j1, j2) + c_bar * (j2, j1) and column (j2, j1) to
    c * (j1, j2) + b_bar * (j2, j1), with the dynamical scalar taken for
    the ordered pair (j1, j2); columns (j, j) are fixed.
    """
    if dyn.size != params.N:
        raise ValueError("dynamical parameter size must equal N")
    size = params.N * params.N
    mat = np.zeros((size, size), dtype=complex)
    for j in range(1, params.N + 1):
        mat[pair_index(params, j, j), pair_index(params, j, j)] = 1.0
    for j1 in range(1, params.N + 1):
        for j2 in range(j1 + 1, params.N + 1):
            s = dyn.pair(j1, j2)
            lo_hi = pair_index(params, j1, j2)
            hi_lo = pair_index(params, j2, j1)
            mat[lo_hi, lo_hi] = entry_b(params, u, s)
            mat[hi_lo, hi_lo] = entry_b_bar(params, u)
            mat[lo_hi, hi_lo] = entry_c(params, u, s)
            mat[hi_lo, lo_hi] = entry_c_bar(params, u, s)
    return mat


def dressed_r_matrix(
    params: EllipticParams,
    u: complex,
    dyn: DynamicalParameter,
    dressing: str = "bar",
) -> np.ndarray:
    """R-matrix with a choice of scalar prefactor.

    dressing: "bar" (no prefactor), "plus", "minus_plain" (the plus
    prefactor at shifted argument), or "minus_power" (the same with an
    extra power of z).
    """
    mat = rbar_matrix(params, u, dyn)
    if dressing == "bar":
        return mat
    if dressing == "plus":
        return rho_plus(params, u) * mat
    if dressing == "minus_plain":
        return rho_minus(params, u, variant="plain") * mat
    if dressing == "minus_power":
        return rho_minus(params, u, variant="power") * mat
    raise ValueError(f"unknown dressing {dressing!r}")


def _weight_vector(params: EllipticParams, component: int) -> np.ndarray:
    weight = np.zeros(params.N)
    weight[component - 1] = 1.0
    return weight


def embedded_rbar(
    params: EllipticParams,
    u: complex,
    dyn: DynamicalParameter,
    num_sites: int,
    active: tuple[int, int],
    weight_shift_sites: Sequence[int] = (),
    dressing: str = "bar",
) -> np.ndarray:
    """R-matrix on two sites of an ``num_sites``-fold tensor product.

    ``active`` holds the 1-based site indices (first acts as the left
    tensor factor of the two-site matrix).  For every basis column the
    dynamical parameter is shifted by the unit weight of the component
    sitting on each site listed in ``weight_shift_sites``; those sites
    are untouched by the operator, so the result is block diagonal in
    them.
    """
    a, b = active
    if a == b or not (1 <= a <= num_sites and 1 <= b <= num_sites):
        raise ValueError("active sites must be distinct and in range")
    for site in weight_shift_sites:
        if site in (a, b):
            raise ValueError("weight shift sites must be spectators")
    n_dim = params.N
    dim = n_dim**num_sites
    out = np.zeros((dim, dim), dtype=complex)
    r_cache: dict[tuple[float, ...], np.ndarray] = {}

    for col in range(dim):
        digits = _to_digits(col, n_dim, num_sites)
        shift = np.zeros(params.N)
        for site in weight_shift_sites:
            shift += _weight_vector(params, digits[site - 1])
        key = tuple(shift)
        if key not in r_cache:
            r_cache[key] = dressed_r_matrix(
                params, u, dyn.shifted(shift), dressing
            )
        rmat = r_cache[key]
        col_pair = pair_index(params, digits[a - 1], digits[b - 1])
        for mu in range(1, n_dim + 1):
            for nu in range(1, n_dim + 1):
                coeff = rmat[pair_index(params, mu, nu), col_pair]
                if coeff == 0.0:
                    continue
                new_digits = list(digits)
                new_digits[a - 1] = mu
                new_digits[b - 1] = nu
                out[_from_digits(new_digits, n_dim), col] += coeff
    return out


def _to_digits(index: int, base: int, length: int) -> tuple[int, ...]:
    """Mixed-radix digits of a flat index, 1-based, leftmost fastest-last."""
    digits = []
    for position in range(length - 1, -1, -1):
        digits.append(index // base**position % base + 1)
    return tuple(digits)


def _from_digits(digits: Sequence[int], base: int) -> int:
    index = 0
    for digit in digits:
        index = index * base + (digit - 1)
    return index


def dybe_residual(
    params: EllipticParams,
    u_values: tuple[complex, complex, complex],
    dyn: DynamicalParameter,
    dressing: str = "bar",
) -> float:
    """Max-norm defect of the dynamical Yang-Baxter equation.

    Both sides act on a threefold tensor product; the outer factors are
    evaluated with the dynamical parameter shifted by the weight of the
    untouched site, per basis component.
    """
    u1, u2, u3 = u_values
    lhs = (
        embedded_rbar(params, u1 - u2, dyn, 3, (1, 2), (3,), dressing)
        @ embedded_rbar(params, u1 - u3, dyn, 3, (1, 3), (), dressing)
        @ embedded_rbar(params, u2 - u3, dyn, 3, (2, 3), (1,), dressing)
    )
    rhs = (
        embedded_rbar(params, u2 - u3, dyn, 3, (2, 3), (), dressing)
        @ embedded_rbar(params, u1 - u3, dyn, 3, (1, 3), (2,), dressing)
        @ embedded_rbar(params, u1 - u2, dyn, 3, (1, 2), (), dressing)
    )
    return relative_defect(lhs, rhs)


def unitarity_residual(
    params: EllipticParams,
    u: complex,
    dyn: DynamicalParameter,
    dressing: str = "bar",
) -> float:
    """Max-norm defect of R(u) P R(-u) P against the identity."""
    perm = permutation_matrix(params)
    left = dressed_r_matrix(params, u, dyn, dressing)
    right = perm @ dressed_r_matrix(params, -u, dyn, dressing) @ perm
    product = left @ right
    eye = np.eye(params.N * params.N, dtype=complex)
    return relative_defect(product, eye)


def relative_defect(lhs: np.ndarray, rhs: np.ndarray) -> float:
    """Max entry difference scaled by the larger of the two sides and 1."""
    scale = max(1.0, float(np.max(np.abs(lhs))), float(np.max(np.abs(rhs))))
    return float(np.max(np.abs(lhs - rhs))) / scale


def random_dynamical(
    rng: np.random.Generator,
    params: EllipticParams,
    margin: float = 0.12,
) -> DynamicalParameter:
    """Generic real dynamical vector with well-conditioned pair values.

    Components are resampled until every pairwise difference stays at
    least ``margin`` away from all integers, so brackets of the pair
    values and their small integer shifts are bounded away from zero.
    """
    for _ in range(1000):
        values = rng.uniform(0.0, params.r, size=params.N)
        good = True
        for i in range(params.N):
            for j in range(i + 1, params.N):
                frac = (values[i] - values[j]) % 1.0
                if frac < margin or frac > 1.0 - margin:
                    good = False
        if good:
            return DynamicalParameter.from_values(
                [complex(v) for v in values]
            )
    raise RuntimeError("failed to sample a generic dynamical parameter")


def random_spectral(
    rng: np.random.Generator,
    count: int,
    margin: float = 0.1,
) -> list[complex]:
    """Generic spectral variables whose differences avoid integers."""
    for _ in range(1000):
        reals = rng.uniform(0.0, 1.0, size=count)
        imags = rng.uniform(-0.1, 0.1, size=count)
        good = True
        for i in range(count):
            for j in range(i + 1, count):
                frac = (reals[i] - reals[j]) % 1.0
                if frac < margin or frac > 1.0 - margin:
                    good = False
        if good:
            return [complex(re, im) for re, im in zip(reals, imags)]
    raise RuntimeError("failed to sample generic spectral variables")


DRESSINGS: tuple[str, ...] = ("bar", "plus", "minus_plain", "minus_power")
