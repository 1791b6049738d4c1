"""Deterministic residual checks bundled into named suites.

Every check draws its random data from a generator seeded jointly by the
global seed and the check's name, so a report depends only on the
configuration: worker count, scheduling order, and suite selection
cannot change any number in it.  Checks return their worst residual
together with the number of evaluated cases; the runner compares the
residual against the configured tolerance.

The ``inject_bug`` switch negates one exchange-matrix entry for the
duration of a run.  It exists to demonstrate that the harness fails
when the library is wrong; with it enabled the exchange-consistency
checks must report large residuals.
"""

from __future__ import annotations

import hashlib
from concurrent.futures import ProcessPoolExecutor
from contextlib import contextmanager
from dataclasses import dataclass, fields
from typing import Callable, Iterator, Sequence

import numpy as np

from . import __version__
from . import rmatrix as _rmatrix_module
from .currents import (
    ef_commutator_report,
    highest_weight_report,
    partial_fraction_defect,
)
from .gtrep import (
    ResampleNeeded,
    check_center,
    gauss_extract,
    gt_commutativity_defect,
    half_current_coefficients,
    halfcurrent_oracle_defect,
    l_operator_blocks,
    reassembly_defect,
    verify_halfcurrent_relations,
    verify_rll,
    x_matrix_via_recursion,
    x_matrix_via_weights,
)
from .partitions import (
    IndexPartition,
    all_partitions,
    compositions,
    dynamical_shift,
    dynamical_shift_closed,
    leq,
    max_partition,
    partitions_with_shape,
)
from .rmatrix import (
    dybe_residual,
    entry_b_bar,
    entry_c,
    entry_c_bar,
    permutation_matrix,
    random_dynamical,
    random_spectral,
    rbar_matrix,
    relative_defect,
    unitarity_residual,
)
from .shuffle import (
    expansion_residual,
    from_weight_function,
    star,
    star_product,
    symmetry_defect,
    tilde_expansion,
    unit,
)
from .theta import (
    EllipticParams,
    bracket,
    bracket_deriv_zero,
    bracket_ratio_minus,
    bracket_ratio_plus,
)
from .weights import (
    diagonal_value,
    orthogonality_defect,
    quasi_periodicity_defect,
    specialization_point,
    stab_restriction,
    stable_basis_round_trip_defect,
    stable_envelope,
    transition_defect,
    weight_function,
)

SUITES: tuple[str, ...] = ("theta", "rmatrix", "weights", "shuffle", "gt")

_RESAMPLE_ATTEMPTS = 12


@dataclass(frozen=True)
class VerifyConfig:
    """Resolved inputs of one verification run.

    ``rank`` (the matrix size N) and ``shape``/``n`` may be left unset;
    checks then sweep their default case lists (ranks 2 and 3, module
    sizes small enough for the stated runtime budgets).  All random
    draws are derived from ``seed``.
    """

    q: float = 0.5
    r: float = 3.0
    rank: int | None = None
    shape: tuple[int, ...] | None = None
    n: int | None = None
    seed: int = 2026
    tol: float = 1e-8
    samples: int = 50
    truncation_order: int | None = None
    inject_bug: bool = False

    def __post_init__(self) -> None:
        if self.shape is not None and self.rank is not None:
            if len(self.shape) != self.rank:
                raise ValueError("shape length must equal the rank N")
        if self.shape is not None and self.n is not None:
            if sum(self.shape) != self.n:
                raise ValueError("shape must sum to the module size n")
        if self.samples < 1:
            raise ValueError("samples must be positive")
        if self.tol <= 0:
            raise ValueError("tolerance must be positive")

    def ranks(self) -> tuple[int, ...]:
        if self.rank is not None:
            return (self.rank,)
        if self.shape is not None:
            return (len(self.shape),)
        return (2, 3)

    def params(self, rank: int) -> EllipticParams:
        return EllipticParams(
            q=self.q,
            r=self.r,
            N=rank,
            truncation_order=self.truncation_order,
        )

    def sizes(self, cap: int) -> tuple[int, ...]:
        if self.n is not None:
            return (self.n,)
        if self.shape is not None:
            return (sum(self.shape),)
        return tuple(range(1, cap + 1))

    def shapes(self, rank: int, cap: int) -> list[tuple[int, ...]]:
        if self.shape is not None:
            if len(self.shape) != rank:
                return []
            return [tuple(self.shape)]
        out: list[tuple[int, ...]] = []
        for n in self.sizes(cap):
            out.extend(compositions(n, rank))
        return out


@dataclass(frozen=True)
class CheckResult:
    name: str
    relation: str
    residual: float
    samples: int
    tol: float
    passed: bool


def config_lines(cfg: VerifyConfig) -> list[str]:
    """Canonical flat key=value rendering of a configuration."""
    out = []
    for field in fields(cfg):
        value = getattr(cfg, field.name)
        if isinstance(value, tuple):
            rendered = ",".join(str(part) for part in value)
        else:
            rendered = repr(value)
        out.append(f"{field.name}={rendered}")
    return out


def config_digest(cfg: VerifyConfig) -> str:
    blob = "\n".join(config_lines(cfg)).encode()
    return hashlib.sha256(blob).hexdigest()[:16]


def _rng(cfg: VerifyConfig, name: str) -> np.random.Generator:
    blob = f"{cfg.seed}:{name}".encode()
    digest = hashlib.sha256(blob).digest()
    return np.random.default_rng(int.from_bytes(digest[:8], "big"))


def _generic_real(rng: np.random.Generator, margin: float = 0.12) -> float:
    for _ in range(1000):
        value = float(rng.uniform(-1.5, 1.5))
        frac = value % 1.0
        if margin < frac < 1.0 - margin:
            return value
    raise RuntimeError("failed to sample a generic real value")


def _generic_complex(rng: np.random.Generator) -> complex:
    return complex(_generic_real(rng), float(rng.uniform(-0.25, 0.25)))


@contextmanager
def negated_exchange_entry() -> Iterator[None]:
    """Temporarily negate one entry function of the exchange matrix."""
    original = _rmatrix_module.entry_b

    def negated(params: EllipticParams, u: complex, s: complex) -> complex:
        return -original(params, u, s)

    _rmatrix_module.entry_b = negated
    try:
        yield
    finally:
        _rmatrix_module.entry_b = original


# ---------------------------------------------------------------------------
# theta suite


def _check_bracket_oddness(cfg: VerifyConfig) -> tuple[float, int]:
    params = cfg.params(cfg.ranks()[0])
    rng = _rng(cfg, "theta:bracket-oddness")
    worst = 0.0
    for _ in range(cfg.samples):
        u = _generic_complex(rng)
        lhs = bracket(params, -u)
        rhs = -bracket(params, u)
        worst = max(worst, abs(lhs - rhs) / max(1.0, abs(rhs)))
    return worst, cfg.samples


def _check_bracket_real_shift(cfg: VerifyConfig) -> tuple[float, int]:
    params = cfg.params(cfg.ranks()[0])
    rng = _rng(cfg, "theta:bracket-real-shift")
    worst = 0.0
    for _ in range(cfg.samples):
        u = _generic_complex(rng)
        lhs = bracket(params, u + params.r)
        rhs = -bracket(params, u)
        worst = max(worst, abs(lhs - rhs) / max(1.0, abs(rhs)))
    return worst, cfg.samples


def _check_bracket_modular_shift(cfg: VerifyConfig) -> tuple[float, int]:
    params = cfg.params(cfg.ranks()[0])
    rng = _rng(cfg, "theta:bracket-modular-shift")
    tau = params.tau
    worst = 0.0
    for _ in range(cfg.samples):
        u = _generic_complex(rng)
        lhs = bracket(params, u + params.r * tau)
        mult = -np.exp(-1j * np.pi * tau) * np.exp(
            -2j * np.pi * u / params.r
        )
        rhs = mult * bracket(params, u)
        worst = max(worst, abs(lhs - rhs) / max(1.0, abs(rhs)))
    return worst, cfg.samples


def _check_bracket_derivative(cfg: VerifyConfig) -> tuple[float, int]:
    count = 0
    worst = 0.0
    step = 1e-5
    for rank in cfg.ranks():
        params = cfg.params(rank)
        finite = (bracket(params, step) - bracket(params, -step)) / (
            2.0 * step
        )
        closed = bracket_deriv_zero(params)
        worst = max(worst, abs(finite - closed) / max(1.0, abs(closed)))
        count += 1
    return worst, count


def _check_truncation_stability(cfg: VerifyConfig) -> tuple[float, int]:
    rank = cfg.ranks()[0]
    adaptive = EllipticParams(q=cfg.q, r=cfg.r, N=rank)
    forced = EllipticParams(q=cfg.q, r=cfg.r, N=rank, truncation_order=96)
    rng = _rng(cfg, "theta:truncation-stability")
    worst = 0.0
    for _ in range(cfg.samples):
        u = _generic_complex(rng)
        lhs = bracket(adaptive, u)
        rhs = bracket(forced, u)
        worst = max(worst, abs(lhs - rhs) / max(1.0, abs(rhs)))
    return worst, cfg.samples


def _check_ratio_sign_agreement(cfg: VerifyConfig) -> tuple[float, int]:
    params = cfg.params(cfg.ranks()[0])
    rng = _rng(cfg, "theta:ratio-sign-agreement")
    worst = 0.0
    for _ in range(cfg.samples):
        s = _generic_complex(rng)
        v = _generic_complex(rng)
        plus = bracket_ratio_plus(params, s, v)
        minus = bracket_ratio_minus(params, s, v)
        worst = max(worst, abs(plus - minus) / max(1.0, abs(plus)))
    return worst, cfg.samples


# ---------------------------------------------------------------------------
# rmatrix suite


def _check_exchange_consistency(cfg: VerifyConfig) -> tuple[float, int]:
    rng = _rng(cfg, "rmatrix:exchange-consistency")
    worst = 0.0
    count = 0
    for rank in cfg.ranks():
        params = cfg.params(rank)
        for _ in range(cfg.samples):
            dyn = random_dynamical(rng, params)
            us = tuple(random_spectral(rng, 3))
            worst = max(worst, dybe_residual(params, us, dyn))
            count += 1
    return worst, count


def _check_dressed_exchange(cfg: VerifyConfig) -> tuple[float, int]:
    rng = _rng(cfg, "rmatrix:dressed-exchange-consistency")
    reps = max(3, cfg.samples // 10)
    worst = 0.0
    count = 0
    for rank in cfg.ranks():
        params = cfg.params(rank)
        for dressing in ("plus", "minus_plain", "minus_power"):
            for _ in range(reps):
                dyn = random_dynamical(rng, params)
                us = tuple(random_spectral(rng, 3))
                worst = max(
                    worst, dybe_residual(params, us, dyn, dressing)
                )
                count += 1
    return worst, count


def _check_inversion(cfg: VerifyConfig) -> tuple[float, int]:
    rng = _rng(cfg, "rmatrix:inversion")
    worst = 0.0
    count = 0
    for rank in cfg.ranks():
        params = cfg.params(rank)
        for _ in range(cfg.samples):
            dyn = random_dynamical(rng, params)
            (u,) = random_spectral(rng, 1)
            worst = max(worst, unitarity_residual(params, u, dyn))
            count += 1
    return worst, count


def _check_permutation_limit(cfg: VerifyConfig) -> tuple[float, int]:
    rng = _rng(cfg, "rmatrix:zero-point-permutation")
    worst = 0.0
    count = 0
    for rank in cfg.ranks():
        params = cfg.params(rank)
        dyn = random_dynamical(rng, params)
        got = rbar_matrix(params, 0.0, dyn)
        want = permutation_matrix(params)
        worst = max(worst, float(np.max(np.abs(got - want))))
        count += 1
    return worst, count


# ---------------------------------------------------------------------------
# weights suite


def _check_index_shift(cfg: VerifyConfig) -> tuple[float, int]:
    worst = 0.0
    count = 0
    for rank in cfg.ranks():
        for n in cfg.sizes(5):
            for part in all_partitions(n, rank):
                for position in range(1, n + 1):
                    for label in range(1, rank + 1):
                        lhs = dynamical_shift(part, position, label)
                        rhs = dynamical_shift_closed(part, position, label)
                        worst = max(worst, float(abs(lhs - rhs)))
                        count += 1
    return worst, count


def _check_triangularity(cfg: VerifyConfig) -> tuple[float, int]:
    rng = _rng(cfg, "weights:triangularity")
    worst = 0.0
    count = 0
    for rank in cfg.ranks():
        params = cfg.params(rank)
        for shape in cfg.shapes(rank, 4):
            parts = partitions_with_shape(shape)
            if len(parts) < 2:
                continue
            n = sum(shape)
            us = random_spectral(rng, n)
            dyn = random_dynamical(rng, params)
            for lower in parts:
                point = specialization_point(lower, us)
                for upper in parts:
                    if leq(lower, upper):
                        continue
                    value = weight_function(params, upper, point, us, dyn)
                    worst = max(worst, abs(value))
                    count += 1
    return worst, count


def _check_diagonal_value(cfg: VerifyConfig) -> tuple[float, int]:
    rng = _rng(cfg, "weights:diagonal-closed-form")
    worst = 0.0
    count = 0
    for rank in cfg.ranks():
        params = cfg.params(rank)
        for shape in cfg.shapes(rank, 4):
            n = sum(shape)
            if n == 0:
                continue
            us = random_spectral(rng, n)
            dyn = random_dynamical(rng, params)
            for part in partitions_with_shape(shape):
                point = specialization_point(part, us)
                got = weight_function(params, part, point, us, dyn)
                want = diagonal_value(params, part, us)
                worst = max(
                    worst, abs(got - want) / max(1.0, abs(want))
                )
                count += 1
    return worst, count


def _check_transition(cfg: VerifyConfig) -> tuple[float, int]:
    rng = _rng(cfg, "weights:transition")
    worst = 0.0
    count = 0
    for rank in cfg.ranks():
        params = cfg.params(rank)
        for shape in cfg.shapes(rank, 3):
            n = sum(shape)
            if n < 2:
                continue
            us = random_spectral(rng, n)
            dyn = random_dynamical(rng, params)
            levels = [
                list(random_spectral(rng, size)) if size else []
                for size in max_partition(shape).cumulative_shape[:-1]
            ]
            for part in partitions_with_shape(shape):
                for position in range(1, n):
                    worst = max(
                        worst,
                        transition_defect(
                            params, part, position, levels, us, dyn
                        ),
                    )
                    count += 1
    return worst, count


def _check_orthogonality(cfg: VerifyConfig) -> tuple[float, int]:
    rng = _rng(cfg, "weights:orthogonality")
    worst = 0.0
    count = 0
    for rank in cfg.ranks():
        params = cfg.params(rank)
        for shape in cfg.shapes(rank, 3):
            n = sum(shape)
            if n == 0:
                continue
            us = random_spectral(rng, n)
            dyn = random_dynamical(rng, params)
            worst = max(
                worst, orthogonality_defect(params, shape, us, dyn)
            )
            count += 1
    return worst, count


def _check_quasi_periodicity(cfg: VerifyConfig) -> tuple[float, int]:
    rng = _rng(cfg, "weights:quasi-periodicity")
    worst = 0.0
    count = 0
    for rank in cfg.ranks():
        params = cfg.params(rank)
        for shape in cfg.shapes(rank, 3):
            n = sum(shape)
            if n < 2 or 0 in shape:
                continue
            part = max_partition(shape)
            us = random_spectral(rng, n)
            dyn = random_dynamical(rng, params)
            levels = [
                list(random_spectral(rng, size)) if size else []
                for size in part.cumulative_shape[:-1]
            ]
            for level in range(1, rank):
                for position in range(
                    1, part.cumulative_shape[level - 1] + 1
                ):
                    defect_r, defect_t = quasi_periodicity_defect(
                        params, part, level, position, levels, us, dyn
                    )
                    worst = max(worst, defect_r, defect_t)
                    count += 1
    return worst, count


def _check_envelope_restriction(cfg: VerifyConfig) -> tuple[float, int]:
    rng = _rng(cfg, "weights:envelope-restriction")
    worst = 0.0
    count = 0
    for rank in cfg.ranks():
        params = cfg.params(rank)
        for shape in cfg.shapes(rank, 2):
            parts = partitions_with_shape(shape)
            n = sum(shape)
            if n == 0:
                continue
            us = random_spectral(rng, n)
            dyn = random_dynamical(rng, params)
            minus_us = [-u for u in us]
            for part in parts:
                for at in parts:
                    direct = stab_restriction(params, part, at, us, dyn)
                    point = specialization_point(at, minus_us)
                    via = stable_envelope(params, part, point, us, dyn)
                    worst = max(
                        worst, abs(via - direct) / max(1.0, abs(direct))
                    )
                    if not leq(part, at):
                        worst = max(worst, abs(direct))
                    count += 1
    return worst, count


def _check_stable_round_trip(cfg: VerifyConfig) -> tuple[float, int]:
    rng = _rng(cfg, "weights:stable-round-trip")
    worst = 0.0
    count = 0
    for rank in cfg.ranks():
        cap = 3 if rank == 2 else 2
        params = cfg.params(rank)
        for shape in cfg.shapes(rank, cap):
            n = sum(shape)
            if n == 0:
                continue
            us = random_spectral(rng, n)
            dyn = random_dynamical(rng, params)
            worst = max(
                worst,
                stable_basis_round_trip_defect(params, shape, us, dyn),
            )
            count += 1
    return worst, count


# ---------------------------------------------------------------------------
# shuffle suite


def _check_unit_laws(cfg: VerifyConfig) -> tuple[float, int]:
    rng = _rng(cfg, "shuffle:unit-laws")
    worst = 0.0
    count = 0
    for rank in cfg.ranks():
        params = cfg.params(rank)
        for word in ("1", "2", "12"):
            part = IndexPartition.from_word(word, rank)
            element = from_weight_function(params, part)
            us = random_spectral(rng, part.n)
            dyn = random_dynamical(rng, params)
            levels = [
                list(random_spectral(rng, size)) if size else []
                for size in part.cumulative_shape[:-1]
            ]
            base = element.evaluate(levels, us, dyn)
            left = star_product(
                params, unit(rank), element, levels, us, dyn
            )
            right = star_product(
                params, element, unit(rank), levels, us, dyn
            )
            scale = max(1.0, abs(base))
            worst = max(
                worst, abs(left - base) / scale, abs(right - base) / scale
            )
            count += 1
    return worst, count


def _check_associativity(cfg: VerifyConfig) -> tuple[float, int]:
    rng = _rng(cfg, "shuffle:associativity")
    worst = 0.0
    count = 0
    for rank in cfg.ranks():
        params = cfg.params(rank)
        words = ("1", "2", "1") if rank == 2 else ("1", "2", "3")
        elements = [
            from_weight_function(
                params, IndexPartition.from_word(word, rank)
            )
            for word in words
        ]
        combined_shape = [0] * rank
        for word in words:
            combined_shape[int(word) - 1] += 1
        cumulative = np.cumsum(combined_shape)
        us = random_spectral(rng, 3)
        dyn = random_dynamical(rng, params)
        levels = [
            list(random_spectral(rng, int(size))) if size else []
            for size in cumulative[:-1]
        ]
        a, b, c = elements
        left = star_product(params, star(params, a, b), c, levels, us, dyn)
        right = star_product(params, a, star(params, b, c), levels, us, dyn)
        worst = max(
            worst, abs(left - right) / max(1.0, abs(left), abs(right))
        )
        count += 1
    return worst, count


def _check_closure_expansion(cfg: VerifyConfig) -> tuple[float, int]:
    rng = _rng(cfg, "shuffle:closure-expansion")
    worst = 0.0
    count = 0
    for rank in cfg.ranks():
        params = cfg.params(rank)
        pairs = (
            [("1", "2"), ("2", "1"), ("1", "1")]
            if rank == 2
            else [("1", "2"), ("2", "3")]
        )
        for left_word, right_word in pairs:
            left = from_weight_function(
                params, IndexPartition.from_word(left_word, rank)
            )
            right = from_weight_function(
                params, IndexPartition.from_word(right_word, rank)
            )
            product = star(params, left, right)
            us = random_spectral(rng, 2)
            dyn = random_dynamical(rng, params)
            parts, coeffs = tilde_expansion(params, product, us, dyn)
            for _ in range(2):
                levels = [
                    list(random_spectral(rng, int(size))) if size else []
                    for size in product.level_sizes
                ]
                worst = max(
                    worst,
                    expansion_residual(
                        params, product, parts, coeffs, levels, us, dyn
                    ),
                )
                count += 1
    return worst, count


def _check_level_symmetry(cfg: VerifyConfig) -> tuple[float, int]:
    rng = _rng(cfg, "shuffle:level-symmetry")
    worst = 0.0
    count = 0
    for rank in cfg.ranks():
        params = cfg.params(rank)
        part = IndexPartition.from_word("11", rank)
        element = from_weight_function(params, part)
        us = random_spectral(rng, 2)
        dyn = random_dynamical(rng, params)
        levels = [
            list(random_spectral(rng, size)) if size else []
            for size in part.cumulative_shape[:-1]
        ]
        worst = max(
            worst, symmetry_defect(element, levels, us, dyn, 1, 1, 2)
        )
        count += 1
    return worst, count


# ---------------------------------------------------------------------------
# gt suite


def _module_sizes(cfg: VerifyConfig, cap: int) -> Iterator[tuple[EllipticParams, int]]:
    for rank in cfg.ranks():
        params = cfg.params(rank)
        for n in cfg.sizes(cap):
            yield params, n


def _sample_until(draw: Callable[[], float]) -> float:
    """Redraw all inputs until the evaluation accepts them.

    ``draw`` samples its own inputs and either returns a residual or
    raises ResampleNeeded when a pivot is too ill conditioned.  Running
    out of attempts is reported as an error, never as a silent pass.
    """
    last: Exception | None = None
    for _ in range(_RESAMPLE_ATTEMPTS):
        try:
            return draw()
        except ResampleNeeded as exc:
            last = exc
    raise RuntimeError(
        "no well-conditioned sample after"
        f" {_RESAMPLE_ATTEMPTS} attempts: {last}"
    )


def _check_rll(cfg: VerifyConfig) -> tuple[float, int]:
    rng = _rng(cfg, "gt:exchange-on-module")
    worst = 0.0
    count = 0
    for params, n in _module_sizes(cfg, cap=2):
        us = tuple(random_spectral(rng, n))
        v1, v2 = random_spectral(rng, 2)
        dyn = random_dynamical(rng, params)
        worst = max(worst, verify_rll(params, us, v1, v2, dyn))
        count += 1
    return worst, count


def _check_reassembly(cfg: VerifyConfig) -> tuple[float, int]:
    rng = _rng(cfg, "gt:gauss-reassembly")
    worst = 0.0
    count = 0
    for params, n in _module_sizes(cfg, cap=3):

        def draw() -> float:
            us = tuple(random_spectral(rng, n))
            (v,) = random_spectral(rng, 1)
            dyn = random_dynamical(rng, params)
            blocks = l_operator_blocks(params, us, v, dyn)
            comps = gauss_extract(blocks)
            return reassembly_defect(blocks, comps)

        worst = max(worst, _sample_until(draw))
        count += 1
    return worst, count


def _check_eigenbasis_recursion(cfg: VerifyConfig) -> tuple[float, int]:
    rng = _rng(cfg, "gt:eigenbasis-recursion")
    worst = 0.0
    count = 0
    for rank in cfg.ranks():
        params = cfg.params(rank)
        for shape in cfg.shapes(rank, 4):
            n = sum(shape)
            if n == 0:
                continue
            us = random_spectral(rng, n)
            dyn = random_dynamical(rng, params)
            via_recursion = x_matrix_via_recursion(params, shape, us, dyn)
            via_weights = x_matrix_via_weights(params, shape, us, dyn)
            worst = max(
                worst, relative_defect(via_recursion, via_weights)
            )
            count += 1
    return worst, count


def _check_half_current_oracle(cfg: VerifyConfig) -> tuple[float, int]:
    rng = _rng(cfg, "gt:half-current-oracle")
    worst = 0.0
    count = 0
    for params, n in _module_sizes(cfg, cap=4):
        for sign in ("+", "-"):

            def draw() -> float:
                us = tuple(random_spectral(rng, n))
                (v,) = random_spectral(rng, 1)
                dyn = random_dynamical(rng, params)
                report = halfcurrent_oracle_defect(params, us, v, dyn, sign)
                return max(report.values())

            worst = max(worst, _sample_until(draw))
            count += 1
    return worst, count


def _check_half_current_relations(cfg: VerifyConfig) -> tuple[float, int]:
    rng = _rng(cfg, "gt:half-current-relations")
    worst = 0.0
    count = 0
    for params, n in _module_sizes(cfg, cap=4):
        us = tuple(random_spectral(rng, n))
        v1, v2 = random_spectral(rng, 2)
        dyn = random_dynamical(rng, params)
        report = verify_halfcurrent_relations(params, us, dyn, v1, v2)
        worst = max(worst, max(report.values()))
        count += 1
    return worst, count


def _check_central_element(cfg: VerifyConfig) -> tuple[float, int]:
    rng = _rng(cfg, "gt:central-element")
    worst = 0.0
    count = 0
    for params, n in _module_sizes(cfg, cap=3):

        def draw() -> float:
            us = tuple(random_spectral(rng, n))
            (v,) = random_spectral(rng, 1)
            dyn = random_dynamical(rng, params)
            return check_center(params, us, v, dyn)["defect"]

        worst = max(worst, _sample_until(draw))
        count += 1
    return worst, count


def _check_diagonal_commutativity(cfg: VerifyConfig) -> tuple[float, int]:
    rng = _rng(cfg, "gt:diagonal-commutativity")
    worst = 0.0
    count = 0
    for params, n in _module_sizes(cfg, cap=3):

        def draw() -> float:
            us = tuple(random_spectral(rng, n))
            v1, v2 = random_spectral(rng, 2)
            dyn = random_dynamical(rng, params)
            return gt_commutativity_defect(params, us, v1, v2, dyn)

        worst = max(worst, _sample_until(draw))
        count += 1
    return worst, count


def _check_printed_actions(cfg: VerifyConfig) -> tuple[float, int]:
    """The four closed five-site actions on the decreasing word 32211."""
    params = EllipticParams(
        q=cfg.q, r=cfg.r, N=3, truncation_order=cfg.truncation_order
    )
    rng = _rng(cfg, "gt:five-site-printed-actions")
    part = IndexPartition((3, 2, 2, 1, 1), 3)
    us = tuple(random_spectral(rng, 5))
    (v,) = random_spectral(rng, 1)
    dyn = random_dynamical(rng, params)
    p23 = dyn.pair(2, 3)

    def bb(x: complex) -> complex:
        return entry_b_bar(params, x)

    worst = 0.0
    got = half_current_coefficients(params, "K", 3, part, v, us, dyn)
    want = bb(us[1] - v) * bb(us[2] - v) * bb(us[3] - v) * bb(us[4] - v)
    if set(got) != {part.word}:
        return 1.0, 4
    worst = max(worst, abs(got[part.word] - want) / max(1.0, abs(want)))

    got = half_current_coefficients(params, "E", 2, part, v, us, dyn)
    want = entry_c_bar(params, us[0] - v, p23) / bb(us[0] - v)
    if set(got) != {(2, 2, 2, 1, 1)}:
        return 1.0, 4
    worst = max(
        worst, abs(got[(2, 2, 2, 1, 1)] - want) / max(1.0, abs(want))
    )

    got = half_current_coefficients(params, "F", 2, part, v, us, dyn)
    want_1 = (
        entry_c(params, us[1] - v, p23) / bb(us[1] - v) / bb(us[2] - us[1])
    )
    want_2 = (
        entry_c(params, us[2] - v, p23) / bb(us[2] - v) / bb(us[1] - us[2])
    )
    if set(got) != {(3, 3, 2, 1, 1), (3, 2, 3, 1, 1)}:
        return 1.0, 4
    worst = max(
        worst,
        abs(got[(3, 3, 2, 1, 1)] - want_1) / max(1.0, abs(want_1)),
        abs(got[(3, 2, 3, 1, 1)] - want_2) / max(1.0, abs(want_2)),
    )

    got = half_current_coefficients(params, "K", 2, part, v, us, dyn)
    want = bb(us[3] - v) * bb(us[4] - v) / bb(-us[0] + v)
    worst = max(worst, abs(got[part.word] - want) / max(1.0, abs(want)))
    return worst, 4


def _check_partial_fractions(cfg: VerifyConfig) -> tuple[float, int]:
    params = cfg.params(cfg.ranks()[0])
    rng = _rng(cfg, "gt:partial-fractions")
    worst = 0.0
    count = 0
    for m, n in ((1, 1), (1, 3), (2, 3), (3, 4)):
        for _ in range(max(2, cfg.samples // 10)):
            us = tuple(random_spectral(rng, n))
            (v,) = random_spectral(rng, 1)
            worst = max(
                worst, partial_fraction_defect(params, us, m, v)
            )
            count += 1
    return worst, count


def _check_ef_commutator(cfg: VerifyConfig) -> tuple[float, int]:
    rng = _rng(cfg, "gt:current-commutators")
    worst = 0.0
    count = 0
    for rank in cfg.ranks():
        params = cfg.params(rank)
        shapes = cfg.shapes(rank, 2)
        if cfg.shape is None:
            shapes = (
                [(1, 1), (2, 1), (2, 2)]
                if rank == 2
                else [(1, 1, 1), (2, 1, 1)]
            )
        for shape in shapes:
            if 0 in shape:
                continue
            n = sum(shape)
            us = tuple(random_spectral(rng, n))
            for part in partitions_with_shape(shape):
                for i in range(1, rank):
                    for j in range(1, rank):
                        report = ef_commutator_report(
                            params, i, j, part, us
                        )
                        worst = max(
                            worst, report["offdiag"], report["diag"]
                        )
                        count += 1
    return worst, count


def _check_highest_weight(cfg: VerifyConfig) -> tuple[float, int]:
    rng = _rng(cfg, "gt:highest-weight")
    worst = 0.0
    count = 0
    for rank in cfg.ranks():
        params = cfg.params(rank)
        n = cfg.n if cfg.n is not None else 3
        us = tuple(random_spectral(rng, n))
        (v,) = random_spectral(rng, 1)
        report = highest_weight_report(params, us, v)
        worst = max(worst, report["raising_terms"], report["h_defect"])
        count += 1
    return worst, count


# ---------------------------------------------------------------------------
# registry and runner

# Each entry: (name, relation, tolerance floor, function).  The floor is
# the minimum effective tolerance; it is nonzero exactly for checks that
# solve linear systems, where conditioning, not the identity itself,
# limits the attainable residual.
_INVERSION_TOL = 1e-6

Check = tuple[str, str, float, Callable[[VerifyConfig], tuple[float, int]]]

REGISTRY: dict[str, tuple[Check, ...]] = {
    "theta": (
        ("bracket-oddness", "odd-function", 0.0, _check_bracket_oddness),
        (
            "bracket-real-shift",
            "quasi-periodicity-real-period",
            0.0,
            _check_bracket_real_shift,
        ),
        (
            "bracket-modular-shift",
            "quasi-periodicity-modular-period",
            0.0,
            _check_bracket_modular_shift,
        ),
        (
            "bracket-derivative-zero",
            "derivative-closed-form",
            0.0,
            _check_bracket_derivative,
        ),
        (
            "truncation-stability",
            "product-truncation-convergence",
            0.0,
            _check_truncation_stability,
        ),
        (
            "ratio-sign-agreement",
            "expansion-coefficient-signs",
            0.0,
            _check_ratio_sign_agreement,
        ),
    ),
    "rmatrix": (
        (
            "exchange-consistency",
            "dynamical-yang-baxter",
            0.0,
            _check_exchange_consistency,
        ),
        (
            "dressed-exchange-consistency",
            "dynamical-yang-baxter-dressed",
            0.0,
            _check_dressed_exchange,
        ),
        ("inversion", "unitarity", 0.0, _check_inversion),
        (
            "zero-point-permutation",
            "permutation-limit",
            0.0,
            _check_permutation_limit,
        ),
    ),
    "weights": (
        (
            "index-shift-closed-form",
            "dynamical-shift-closed-form",
            0.0,
            _check_index_shift,
        ),
        (
            "triangularity",
            "specialization-triangularity",
            0.0,
            _check_triangularity,
        ),
        (
            "diagonal-closed-form",
            "specialization-diagonal",
            0.0,
            _check_diagonal_value,
        ),
        ("transition", "adjacent-exchange", 0.0, _check_transition),
        (
            "orthogonality",
            "biorthogonality-grid",
            0.0,
            _check_orthogonality,
        ),
        (
            "quasi-periodicity",
            "level-variable-shifts",
            0.0,
            _check_quasi_periodicity,
        ),
        (
            "envelope-restriction",
            "restriction-triangularity",
            0.0,
            _check_envelope_restriction,
        ),
        (
            "stable-round-trip",
            "expand-restrict-identity",
            0.0,
            _check_stable_round_trip,
        ),
    ),
    "shuffle": (
        ("unit-laws", "two-sided-unit", 0.0, _check_unit_laws),
        ("associativity", "star-associativity", 0.0, _check_associativity),
        (
            "closure-expansion",
            "basis-closure",
            _INVERSION_TOL,
            _check_closure_expansion,
        ),
        (
            "level-symmetry",
            "variable-exchange-symmetry",
            0.0,
            _check_level_symmetry,
        ),
    ),
    "gt": (
        ("exchange-on-module", "operator-exchange", 0.0, _check_rll),
        (
            "gauss-reassembly",
            "block-factorization",
            _INVERSION_TOL,
            _check_reassembly,
        ),
        (
            "eigenbasis-recursion",
            "change-of-basis-agreement",
            _INVERSION_TOL,
            _check_eigenbasis_recursion,
        ),
        (
            "half-current-oracle",
            "closed-action-vs-blocks",
            _INVERSION_TOL,
            _check_half_current_oracle,
        ),
        (
            "half-current-relations",
            "adjacent-operator-relations",
            0.0,
            _check_half_current_relations,
        ),
        (
            "central-element",
            "scalar-action",
            _INVERSION_TOL,
            _check_central_element,
        ),
        (
            "diagonal-commutativity",
            "commuting-family",
            _INVERSION_TOL,
            _check_diagonal_commutativity,
        ),
        (
            "five-site-printed-actions",
            "closed-five-site-actions",
            0.0,
            _check_printed_actions,
        ),
        (
            "partial-fractions",
            "ratio-product-expansion",
            0.0,
            _check_partial_fractions,
        ),
        (
            "current-commutators",
            "raising-lowering-commutator",
            0.0,
            _check_ef_commutator,
        ),
        (
            "highest-weight",
            "generating-vector-data",
            0.0,
            _check_highest_weight,
        ),
    ),
}


def run_check(cfg: VerifyConfig, suite: str, name: str) -> CheckResult:
    """Run one named check and grade it against the effective tolerance."""
    for check_name, relation, floor, fn in REGISTRY[suite]:
        if check_name == name:
            if cfg.inject_bug:
                with negated_exchange_entry():
                    residual, count = fn(cfg)
            else:
                residual, count = fn(cfg)
            effective_tol = max(cfg.tol, floor)
            return CheckResult(
                name=name,
                relation=relation,
                residual=float(residual),
                samples=count,
                tol=effective_tol,
                passed=bool(residual <= effective_tol),
            )
    raise KeyError(f"unknown check {suite}:{name}")


def _run_task(task: tuple[VerifyConfig, str, str]) -> tuple[str, str, CheckResult]:
    cfg, suite, name = task
    return suite, name, run_check(cfg, suite, name)


def run_suites(
    cfg: VerifyConfig,
    suites: Sequence[str] | None = None,
    workers: int = 1,
) -> dict:
    """Run the selected suites and assemble the report dictionary.

    Results are keyed and ordered by the registry, so the report is
    identical for any worker count.
    """
    selected = tuple(suites) if suites else SUITES
    for suite in selected:
        if suite not in REGISTRY:
            raise KeyError(f"unknown suite {suite!r}")
    tasks = [
        (cfg, suite, name)
        for suite in selected
        for name, _, _, _ in REGISTRY[suite]
    ]
    results: dict[tuple[str, str], CheckResult] = {}
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for suite, name, result in pool.map(_run_task, tasks):
                results[(suite, name)] = result
    else:
        for task in tasks:
            suite, name, result = _run_task(task)
            results[(suite, name)] = result

    suite_reports = []
    overall_max = 0.0
    overall_pass = True
    for suite in selected:
        cases = []
        suite_max = 0.0
        for name, _, _, _ in REGISTRY[suite]:
            result = results[(suite, name)]
            cases.append(
                {
                    "name": result.name,
                    "relation": result.relation,
                    "residual": result.residual,
                    "samples": result.samples,
                    "tol": result.tol,
                    "pass": result.passed,
                }
            )
            suite_max = max(suite_max, result.residual)
            overall_pass = overall_pass and result.passed
        overall_max = max(overall_max, suite_max)
        suite_reports.append(
            {
                "suite": suite,
                "cases": cases,
                "max_residual": suite_max,
                "seed": cfg.seed,
            }
        )
    return {
        "version": __version__,
        "config_digest": config_digest(cfg),
        "seed": cfg.seed,
        "tol": cfg.tol,
        "suites": suite_reports,
        "max_residual": overall_max,
        "pass": overall_pass,
    }
