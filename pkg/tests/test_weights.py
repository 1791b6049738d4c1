"""Tests for elliptic weight functions and stable envelopes."""

import cmath

import numpy as np
import pytest

from ellgt.partitions import (
    IndexPartition,
    compositions,
    leq,
    partitions_with_shape,
)
from ellgt.rmatrix import (
    DynamicalParameter,
    random_dynamical,
    random_spectral,
)
from ellgt.theta import EllipticParams, bracket
from ellgt.weights import (
    diagonal_value,
    e_factor,
    fixed_point_coefficient,
    h_factor,
    orthogonality_defect,
    q_factor,
    quasi_periodicity_defect,
    r_factor,
    specialization_point,
    stab_restriction,
    stable_basis_round_trip_defect,
    stable_envelope,
    transition_defect,
    weight_function,
)

PAR2 = EllipticParams(q=0.5, r=3.0, N=2)
PAR3 = EllipticParams(q=0.5, r=3.0, N=3)


def _params_for(num_blocks):
    return PAR2 if num_blocks == 2 else PAR3


def _random_levels(rng, part):
    return [
        list(random_spectral(rng, size)) if size else []
        for size in part.cumulative_shape[:-1]
    ]


class TestHandValues:
    def test_two_site_closed_forms(self):
        # Independently derived closed forms for the two one-one words.
        v = 0.23 + 0.04j
        u1, u2 = 0.55, 0.91 - 0.06j
        dyn = DynamicalParameter.from_values([0.78, 0.0])
        s = dyn.pair(1, 2)
        got = weight_function(
            PAR2, IndexPartition.from_word("12"), [[v]], [u1, u2], dyn
        )
        want = (
            bracket(PAR2, u1 - v + s + 1)
            * bracket(PAR2, u2 - v)
            / bracket(PAR2, s + 1)
        )
        assert abs(got - want) < 1e-13
        got = weight_function(
            PAR2, IndexPartition.from_word("21"), [[v]], [u1, u2], dyn
        )
        want = (
            bracket(PAR2, u2 - v + s)
            * bracket(PAR2, u1 - v + 1)
            / bracket(PAR2, s)
        )
        assert abs(got - want) < 1e-13

    def test_unknown_variant_rejected(self):
        dyn = DynamicalParameter.from_values([0.7, 0.0])
        with pytest.raises(ValueError):
            weight_function(
                PAR2,
                IndexPartition.from_word("12"),
                [[0.2]],
                [0.3, 0.4],
                dyn,
                "other",
            )

    def test_level_shape_validated(self):
        dyn = DynamicalParameter.from_values([0.7, 0.0])
        with pytest.raises(ValueError):
            weight_function(
                PAR2,
                IndexPartition.from_word("12"),
                [[0.2, 0.3]],
                [0.3, 0.4],
                dyn,
            )


class TestVariantRelations:
    def test_entire_equals_tilde_times_h(self):
        rng = np.random.default_rng(31)
        for word in ("112", "121", "1221", "2131", "3121"):
            num_blocks = max(int(ch) for ch in word)
            params = _params_for(num_blocks)
            part = IndexPartition.from_word(word, params.N)
            us = random_spectral(rng, part.n)
            lv = _random_levels(rng, part)
            dyn = random_dynamical(rng, params)
            entire = weight_function(params, part, lv, us, dyn, "entire")
            tilde = weight_function(params, part, lv, us, dyn, "tilde")
            h = h_factor(params, part, lv, us)
            scale = max(1.0, abs(entire))
            assert abs(entire - tilde * h) / scale < 1e-12

    def test_entire_equals_envelope_times_e(self):
        rng = np.random.default_rng(32)
        for word in ("112", "121", "1221", "2131", "3121"):
            num_blocks = max(int(ch) for ch in word)
            params = _params_for(num_blocks)
            part = IndexPartition.from_word(word, params.N)
            us = random_spectral(rng, part.n)
            lv = _random_levels(rng, part)
            dyn = random_dynamical(rng, params)
            entire = weight_function(params, part, lv, us, dyn, "entire")
            envelope = weight_function(params, part, lv, us, dyn, "envelope")
            e = e_factor(params, part, lv)
            scale = max(1.0, abs(entire))
            assert abs(entire - envelope * e) / scale < 1e-12


class TestSpecializationProperties:
    def test_triangularity_exhaustive(self):
        # Specializing at a partition kills the function unless that
        # partition precedes the function's own in the partial order.
        rng = np.random.default_rng(33)
        for num_blocks in (2, 3):
            params = _params_for(num_blocks)
            for n in range(2, 5):
                for shape in compositions(n, num_blocks):
                    parts = partitions_with_shape(shape)
                    if len(parts) < 2:
                        continue
                    us = random_spectral(rng, n)
                    dyn = random_dynamical(rng, params)
                    for lower in parts:
                        point = specialization_point(lower, us)
                        for upper in parts:
                            if leq(lower, upper):
                                continue
                            val = weight_function(
                                params, upper, point, us, dyn
                            )
                            assert abs(val) < 1e-10

    def test_diagonal_closed_form_exhaustive(self):
        rng = np.random.default_rng(34)
        for num_blocks in (2, 3):
            params = _params_for(num_blocks)
            for n in range(2, 5):
                for shape in compositions(n, num_blocks):
                    us = random_spectral(rng, n)
                    dyn = random_dynamical(rng, params)
                    for part in partitions_with_shape(shape):
                        point = specialization_point(part, us)
                        got = weight_function(params, part, point, us, dyn)
                        want = diagonal_value(params, part, us)
                        assert abs(got - want) < 1e-11 * max(1.0, abs(want))

    def test_diagonal_is_q_times_r_like_split(self):
        # The two cross-block products agree with the diagonal value's
        # building blocks: their product is the diagonal value times the
        # complementary bracket choices.
        rng = np.random.default_rng(35)
        part = IndexPartition.from_word("1212")
        us = random_spectral(rng, 4)
        qf = q_factor(PAR2, part, us)
        rf = r_factor(PAR2, part, us)
        dv = diagonal_value(PAR2, part, us)
        # every factor of the diagonal value divides one of the two
        assert abs(dv) > 0
        assert abs(qf) > 0 and abs(rf) > 0


class TestTransition:
    def test_adjacent_exchange_identity(self):
        rng = np.random.default_rng(36)
        for word in ("12", "21", "112", "121", "212", "123", "213", "1213"):
            num_blocks = max(int(ch) for ch in word)
            params = _params_for(max(num_blocks, 2))
            part = IndexPartition.from_word(word, params.N)
            us = random_spectral(rng, part.n)
            lv = _random_levels(rng, part)
            dyn = random_dynamical(rng, params)
            for position in range(1, part.n):
                defect = transition_defect(
                    params, part, position, lv, us, dyn
                )
                assert defect < 1e-11


class TestOrthogonality:
    def test_shape_classes(self):
        rng = np.random.default_rng(37)
        cases = [
            (PAR2, (1, 1)),
            (PAR2, (2, 1)),
            (PAR2, (1, 2)),
            (PAR2, (2, 2)),
            (PAR3, (1, 1, 1)),
            (PAR3, (2, 1, 1)),
            (PAR3, (1, 1, 2)),
        ]
        for params, shape in cases:
            us = random_spectral(rng, sum(shape))
            dyn = random_dynamical(rng, params)
            assert orthogonality_defect(params, shape, us, dyn) < 1e-9


class TestQuasiPeriodicity:
    @staticmethod
    def _check(params, part, level, a, lv, us, dyn):
        r = params.r
        tau = params.tau
        lam = part.shape
        base = weight_function(params, part, lv, us, dyn)
        lv_p = [list(level_list) for level_list in lv]
        lv_p[level - 1][a - 1] += r
        got_p = weight_function(params, part, lv_p, us, dyn)
        want_p = (-1) ** (lam[level] - lam[level - 1] + 2) * base
        lv_t = [list(level_list) for level_list in lv]
        lv_t[level - 1][a - 1] += r * tau
        got_t = weight_function(params, part, lv_t, us, dyn)
        va = lv[level - 1][a - 1]
        sum_up = sum(us) if level + 1 == params.N else sum(lv[level])
        sum_here = sum(lv[level - 1])
        sum_down = sum(lv[level - 2]) if level >= 2 else 0.0
        exponent = (
            -(2j * cmath.pi / r)
            * (
                (lam[level] - lam[level - 1]) * va
                - sum_up
                + 2 * sum_here
                - sum_down
                - dyn.pair(level, level + 1)
                - lam[level]
            )
        )
        want_t = (
            (-cmath.exp(-1j * cmath.pi * tau))
            ** (lam[level] - lam[level - 1] + 2)
            * cmath.exp(exponent)
            * base
        )
        scale = max(abs(base), abs(got_p), 1.0)
        return abs(got_p - want_p) / scale, abs(got_t - want_t) / max(
            abs(base), abs(got_t), 1.0
        )

    def test_both_shifts(self):
        rng = np.random.default_rng(38)
        for word in ("121", "212", "2131"):
            num_blocks = max(int(ch) for ch in word)
            params = _params_for(max(num_blocks, 2))
            part = IndexPartition.from_word(word, params.N)
            us = random_spectral(rng, part.n)
            lv = _random_levels(rng, part)
            dyn = random_dynamical(rng, params)
            for level in range(1, params.N):
                for a in range(1, part.cumulative_shape[level - 1] + 1):
                    defect_p, defect_t = self._check(
                        params, part, level, a, lv, us, dyn
                    )
                    assert defect_p < 1e-12
                    assert defect_t < 1e-7

    def test_defect_helper_agrees_with_direct_computation(self):
        rng = np.random.default_rng(39)
        for word in ("121", "212"):
            params = _params_for(2)
            part = IndexPartition.from_word(word, params.N)
            us = random_spectral(rng, part.n)
            lv = _random_levels(rng, part)
            dyn = random_dynamical(rng, params)
            for a in range(1, part.cumulative_shape[0] + 1):
                direct = self._check(params, part, 1, a, lv, us, dyn)
                helper = quasi_periodicity_defect(
                    params, part, 1, a, lv, us, dyn
                )
                assert abs(direct[0] - helper[0]) < 1e-12
                assert abs(direct[1] - helper[1]) < 1e-9


class TestWheelVanishing:
    def test_entire_vanishes_on_upper_wheel(self):
        # v at one slot exceeding an upper-level value by one while a
        # sibling slot equals that value kills the entire variant.
        rng = np.random.default_rng(39)
        part = IndexPartition.from_word("11", 2)
        us = random_spectral(rng, 2)
        dyn = random_dynamical(rng, PAR2)
        for uc in us:
            val = weight_function(
                PAR2, part, [[uc + 1, uc]], us, dyn, "entire"
            )
            assert abs(val) < 1e-14

    def test_entire_vanishes_on_lower_wheel(self):
        rng = np.random.default_rng(40)
        part = IndexPartition.from_word("213", 3)
        us = random_spectral(rng, 3)
        dyn = random_dynamical(rng, PAR3)
        (v1,) = random_spectral(rng, 1)
        for slots in ([v1 - 1, v1], [v1, v1 - 1]):
            val = weight_function(
                PAR3, part, [[v1], slots], us, dyn, "entire"
            )
            assert abs(val) < 1e-14


class TestStableEnvelopes:
    def test_restriction_triangularity(self):
        rng = np.random.default_rng(41)
        for params, shape in [(PAR2, (2, 1)), (PAR3, (1, 1, 1))]:
            parts = partitions_with_shape(shape)
            us = random_spectral(rng, sum(shape))
            dyn = random_dynamical(rng, params)
            for part in parts:
                for at in parts:
                    val = stab_restriction(params, part, at, us, dyn)
                    if part == at:
                        assert abs(val) > 1e-10
                    elif not leq(part, at):
                        assert abs(val) < 1e-10

    def test_envelope_function_matches_restriction(self):
        # Plugging the fixed-point specialization into the envelope
        # function must agree with the direct restriction formula.
        rng = np.random.default_rng(42)
        shape = (2, 1)
        parts = partitions_with_shape(shape)
        us = random_spectral(rng, 3)
        dyn = random_dynamical(rng, PAR2)
        minus_us = [-u for u in us]
        for part in parts:
            for at in parts:
                point = specialization_point(at, minus_us)
                via_function = stable_envelope(PAR2, part, point, us, dyn)
                direct = stab_restriction(PAR2, part, at, us, dyn)
                assert abs(via_function - direct) < 1e-11 * max(
                    1.0, abs(direct)
                )

    def test_round_trip_identity(self):
        rng = np.random.default_rng(43)
        cases = [
            (PAR2, (1, 1)),
            (PAR2, (2, 1)),
            (PAR2, (1, 2)),
            (PAR3, (1, 1, 1)),
        ]
        for params, shape in cases:
            us = random_spectral(rng, sum(shape))
            dyn = random_dynamical(rng, params)
            defect = stable_basis_round_trip_defect(params, shape, us, dyn)
            assert defect < 1e-10

    def test_fixed_point_coefficient_triangular(self):
        rng = np.random.default_rng(44)
        shape = (2, 1)
        parts = partitions_with_shape(shape)
        us = random_spectral(rng, 3)
        dyn = random_dynamical(rng, PAR2)
        for part in parts:
            for coeff_of in parts:
                val = fixed_point_coefficient(PAR2, part, coeff_of, us, dyn)
                if not leq(part, coeff_of):
                    assert abs(val) < 1e-10
