import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bibrace import f2core
from bibrace.errors import UsageError
from bibrace.f2core import (
    F2Matrix,
    SkewMatrix,
    congruence,
    decode_matrix_hex,
    encode_matrix_hex,
    flat_bits,
    flatten,
    hconcat_rank,
    lambda_dim,
    normal_form_matrix,
    pair_at,
    pair_index,
    rank,
    skew_normal_form,
    standard_basis,
    standard_basis_element,
    unflat_bits,
    unflatten,
)

from .oracles import dense_congruence, dense_hconcat_rank, dense_rank


def E(i, j, m):
    # 1-indexed like the written tables; internal indices are 0-based
    return standard_basis_element(i - 1, j - 1, m)


def random_skew(m, rng):
    return unflat_bits(rng.randrange(1 << lambda_dim(m)), m)


def random_invertible(m, rng):
    while True:
        M = F2Matrix(m, m, tuple(rng.randrange(1 << m) for _ in range(m)))
        if M.is_invertible():
            return M


class TestRank:
    def test_zero_matrix(self):
        assert rank(SkewMatrix.zero(4)) == 0

    def test_single_basis_matrix(self):
        assert rank(E(1, 2, 4)) == 2

    def test_paper_rank4_example(self):
        # row "4 | E_13+E_24" of the ranks table
        assert rank(E(1, 3, 4) + E(2, 4, 4)) == 4

    def test_matches_dense_oracle(self):
        rng = random.Random(101)
        for _ in range(200):
            m = rng.randrange(2, 7)
            B = random_skew(m, rng)
            assert rank(B) == dense_rank(B.as_matrix().to_lists())

    def test_skew_rank_always_even(self):
        rng = random.Random(7)
        for m in range(2, 7):
            for _ in range(200):
                assert rank(random_skew(m, rng)) % 2 == 0


class TestHconcatRank:
    def test_single_invertible(self):
        assert hconcat_rank([E(1, 2, 2)]) == 2

    def test_single_in_lambda4(self):
        assert hconcat_rank([E(1, 2, 4)]) == 2

    def test_pair_spanning(self):
        # frozen from dense_hconcat_rank([E_12, E_34]) == 4
        assert hconcat_rank([E(1, 2, 4), E(3, 4, 4)]) == 4

    def test_size_mismatch(self):
        with pytest.raises(UsageError):
            hconcat_rank([E(1, 2, 3), E(1, 2, 4)])

    def test_matches_dense_oracle(self):
        rng = random.Random(11)
        for _ in range(100):
            m = rng.randrange(2, 7)
            mats = [random_skew(m, rng) for _ in range(rng.randrange(1, 4))]
            expected = dense_hconcat_rank([B.as_matrix().to_lists() for B in mats])
            assert hconcat_rank(mats) == expected


class TestCongruence:
    def test_identity(self):
        B = E(1, 3, 4) + E(2, 4, 4)
        assert congruence(F2Matrix.identity(4), B) == B

    def test_swap_fixes_e12(self):
        perm = F2Matrix.from_rows([[0, 1, 0, 0], [1, 0, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]])
        assert congruence(perm, E(1, 2, 4)) == E(1, 2, 4)

    def test_transvection_example(self):
        # A = I + e_31 (adds row 1 to row 3); frozen from the dense oracle
        A = F2Matrix(4, 4, (0b0001, 0b0010, 0b0101, 0b1000))
        got = congruence(A, E(1, 2, 4))
        assert got == E(1, 2, 4) + E(2, 3, 4)
        expected = dense_congruence(A.to_lists(), E(1, 2, 4).as_matrix().to_lists())
        assert got.as_matrix().to_lists() == expected.tolist()

    def test_singular_rejected(self):
        with pytest.raises(UsageError):
            congruence(F2Matrix.zero(4, 4), E(1, 2, 4))

    def test_rank_preserved(self):
        rng = random.Random(23)
        for _ in range(150):
            m = rng.randrange(2, 7)
            B = random_skew(m, rng)
            A = random_invertible(m, rng)
            assert rank(congruence(A, B)) == rank(B)

    def test_group_action_axiom(self):
        rng = random.Random(31)
        for _ in range(150):
            m = rng.randrange(2, 6)
            B = random_skew(m, rng)
            A1 = random_invertible(m, rng)
            A2 = random_invertible(m, rng)
            assert congruence(A2, congruence(A1, B)) == congruence(A2.mul(A1), B)


class TestNormalForm:
    def test_zero(self):
        A, r = skew_normal_form(SkewMatrix.zero(4))
        assert r == 0 and A.is_invertible()
        assert congruence(A, SkewMatrix.zero(4)) == SkewMatrix.zero(4)

    def test_already_normal(self):
        A, r = skew_normal_form(E(1, 2, 2))
        assert r == 2
        assert congruence(A, E(1, 2, 2)) == E(1, 2, 2)

    def test_rank4_reaches_canonical_form(self):
        rng = random.Random(47)
        found = 0
        while found < 25:
            B = random_skew(4, rng)
            if rank(B) != 4:
                continue
            found += 1
            A, r = skew_normal_form(B)
            assert r == 4
            assert congruence(A, B) == normal_form_matrix(4, 4)

    def test_recompute_matches_claim(self):
        rng = random.Random(53)
        for _ in range(150):
            m = rng.randrange(2, 7)
            B = random_skew(m, rng)
            A, r = skew_normal_form(B)
            assert r == rank(B)
            assert A.is_invertible()
            assert congruence(A, B) == normal_form_matrix(m, r)


class TestStandardBasisAndFlatten:
    def test_m2(self):
        assert standard_basis(2) == (E(1, 2, 2),)

    def test_m3_order(self):
        assert standard_basis(3) == (E(1, 2, 3), E(1, 3, 3), E(2, 3, 3))

    def test_m6_length(self):
        assert len(standard_basis(6)) == 15

    def test_degenerate_sizes_rejected(self):
        for m in (0, 1):
            with pytest.raises(UsageError):
                standard_basis(m)
            with pytest.raises(UsageError):
                lambda_dim(m)

    def test_flatten_zero(self):
        assert flatten(SkewMatrix.zero(5)).bits == 0

    def test_flatten_is_unit_vector(self):
        for m in range(2, 7):
            for idx, B in enumerate(standard_basis(m)):
                assert flat_bits(B) == 1 << idx

    def test_ordering_convention(self):
        assert flatten(E(1, 2, 3)).to_tuple() == (1, 0, 0)

    def test_unflatten_linearity(self):
        assert unflat_bits(0b011, 3) == E(1, 2, 3) + E(1, 3, 3)

    def test_roundtrip_exhaustive_small(self):
        for m in (2, 3, 4):
            for bits in range(1 << lambda_dim(m)):
                assert flat_bits(unflat_bits(bits, m)) == bits

    def test_roundtrip_sampled_m5_m6(self):
        rng = random.Random(3)
        for m in (5, 6):
            for _ in range(500):
                bits = rng.randrange(1 << lambda_dim(m))
                assert flat_bits(unflat_bits(bits, m)) == bits
                B = unflat_bits(bits, m)
                assert unflatten(flatten(B), m) == B

    def test_wrong_length_rejected(self):
        with pytest.raises(UsageError):
            unflat_bits(1 << lambda_dim(3), 3)

    def test_pair_index_roundtrip(self):
        for m in range(2, 8):
            for idx in range(lambda_dim(m)):
                i, j = pair_at(idx, m)
                assert pair_index(i, j, m) == idx


class TestHexEncoding:
    def test_spec_examples(self):
        assert encode_matrix_hex(E(1, 2, 3)) == "1"
        assert encode_matrix_hex(E(1, 2, 3) + E(2, 3, 3)) == "5"

    def test_roundtrip(self):
        rng = random.Random(5)
        for _ in range(100):
            m = rng.randrange(2, 7)
            B = random_skew(m, rng)
            assert decode_matrix_hex(encode_matrix_hex(B), m) == B

    def test_malformed(self):
        with pytest.raises(UsageError):
            decode_matrix_hex("xyz", 4)


@given(st.integers(min_value=2, max_value=6), st.data())
@settings(max_examples=60, deadline=None)
def test_flatten_additive(m, data):
    D = lambda_dim(m)
    a = data.draw(st.integers(min_value=0, max_value=(1 << D) - 1))
    b = data.draw(st.integers(min_value=0, max_value=(1 << D) - 1))
    assert unflat_bits(a, m) + unflat_bits(b, m) == unflat_bits(a ^ b, m)


@given(st.integers(min_value=2, max_value=5), st.integers(min_value=0, max_value=2**32))
@settings(max_examples=60, deadline=None)
def test_inverse_roundtrip(m, seed):
    A = random_invertible(m, random.Random(seed))
    assert A.mul(A.inverse()) == F2Matrix.identity(m)


def test_matrix_shape_errors():
    with pytest.raises(UsageError):
        F2Matrix(2, 2, (1, 2, 3))
    with pytest.raises(UsageError):
        F2Matrix(1, 1, (2,))
    with pytest.raises(UsageError):
        SkewMatrix(2, (1, 0))  # asymmetric
    with pytest.raises(UsageError):
        SkewMatrix(2, (1, 2))  # diagonal entry


def test_invariant_skew_diag_zero():
    with pytest.raises(UsageError):
        SkewMatrix(3, (0b010, 0b011, 0b000))
