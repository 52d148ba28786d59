import json
from fractions import Fraction

import numpy as np
import pytest

from storagecode import algebra
from storagecode.algebra import AlgebraElement, elem_from_monomials, shifted, shifted_product
from storagecode.code import code_rate, connection_set_from_element, coset_matrix
from storagecode.errors import ArityError, ResourceError
from storagecode.families import hamming_element
from storagecode.gf2 import BitMatrix, elements_to_rows, rank, subspace_intersection
from storagecode.ideals import (
    IdealHandle,
    annihilator_basis,
    annihilator_contains,
    annihilator_dim,
    block_product_ideal,
    ideal_basis,
    ideal_dim,
    ideal_product,
    ideal_rate,
    ideal_sum,
    random_blocks,
    shifted_product_ideal,
    shifted_sum_ideal,
    verify_ideal_identities,
)

P = IdealHandle.principal


def random_on(n: int, mask: int, rng, count: int) -> list[AlgebraElement]:
    """``count`` random nonzero elements using only the variables in ``mask``."""
    subs = np.array([s for s in range(1 << n) if s & ~mask == 0])
    out = []
    while len(out) < count:
        pick = subs[rng.integers(0, 2, subs.size).astype(bool)]
        f = elem_from_monomials(n, pick.tolist())
        if f:
            out.append(f)
    return out


class TestDimensions:
    @pytest.mark.parametrize("n", [1, 4, 9])
    def test_unit_ideal(self, n):
        assert ideal_dim(P(algebra.one(n))) == 1 << n

    @pytest.mark.parametrize("n,k", [(3, 1), (4, 2), (6, 3), (8, 8), (10, 4)])
    def test_shift_product(self, n, k):
        assert ideal_dim(P(shifted_product(n, range(1, k + 1)))) == 1 << (n - k)

    def test_shift_sum_p2(self):
        assert ideal_dim(P(shifted(2, 1)) + P(shifted(2, 2))) == 3

    def test_zero_annihilator(self):
        assert annihilator_dim(algebra.zero(5)) == 32

    @pytest.mark.parametrize("n", [1, 3, 7])
    def test_shift_annihilator(self, n):
        assert annihilator_dim(shifted(n, 1)) == 1 << (n - 1)

    def test_f4_annihilator_matches_code(self):
        f4 = hamming_element(4).element
        h_rank = rank(coset_matrix(connection_set_from_element(f4)))
        assert annihilator_dim(f4) == 32 - h_rank
        assert code_rate(connection_set_from_element(f4)).code_dim == annihilator_dim(f4)

    @pytest.mark.parametrize("n", range(1, 13))
    def test_rank_nullity(self, n):
        rng = np.random.default_rng(n)
        f = AlgebraElement(n, rng.integers(0, 2, 1 << n))
        assert ideal_dim(P(f)) + annihilator_dim(f) == 1 << n

    def test_rate(self):
        assert ideal_rate(P(shifted(3, 2))) == Fraction(1, 2)
        assert P(shifted(3, 2)).rate == Fraction(1, 2)

    def test_basis_is_closed(self, rng):
        # the span is an ideal: multiplying a basis vector by x_i stays inside
        f = AlgebraElement(6, rng.integers(0, 2, 64))
        g = AlgebraElement(6, rng.integers(0, 2, 64))
        basis = ideal_basis(IdealHandle(6, (f, g)))
        dense = basis.vectors.to_dense()
        for row in dense[:10]:
            for i in range(1, 7):
                moved = AlgebraElement(6, row) * algebra.variable(6, i)
                assert basis.contains(elements_to_rows([moved]))

    def test_dense_ceiling(self):
        with pytest.raises(ResourceError):
            ideal_dim(P(algebra.one(16)))

    def test_arity_mismatch(self):
        with pytest.raises(ArityError):
            ideal_sum(P(algebra.one(2)), P(algebra.one(3)))
        with pytest.raises(ArityError):
            IdealHandle(2, (algebra.one(3),))


class TestProducts:
    def test_unit_product(self, rng):
        f = AlgebraElement(5, rng.integers(0, 2, 32))
        a = P(f)
        b = ideal_product(a, P(algebra.one(5)))
        assert a.basis().same_span(b.basis())

    def test_two_shifts_p2(self):
        assert ideal_dim(P(shifted(2, 1)) * P(shifted(2, 2))) == 1

    def test_sum_times_sum_p4(self):
        alpha = P(shifted(4, 1)) + P(shifted(4, 2))
        beta = P(shifted(4, 3)) + P(shifted(4, 4))
        prod = alpha * beta
        assert ideal_dim(prod) == 9
        assert prod.rate == Fraction(3, 4) ** 2

    def test_block_product_three_pairs_p12(self):
        ideal = block_product_ideal(12, [[1, 2], [3, 4], [5, 6]])
        assert ideal_rate(ideal) == Fraction(3, 4) ** 3

    @pytest.mark.parametrize("seed", range(25))
    def test_disjoint_generators_multiply(self, seed):
        # dim(alpha beta) * 2^n = dim(alpha) * dim(beta) for generators on disjoint variables
        rng = np.random.default_rng([seed, 38])
        n = int(rng.integers(2, 9))
        perm = rng.permutation(n)
        a_size = int(rng.integers(1, n))
        b_size = int(rng.integers(1, n - a_size + 1))
        mask_a = sum(1 << int(i) for i in perm[:a_size])
        mask_b = sum(1 << int(i) for i in perm[a_size : a_size + b_size])
        alpha = IdealHandle(n, tuple(random_on(n, mask_a, rng, int(rng.integers(1, 4)))))
        beta = IdealHandle(n, tuple(random_on(n, mask_b, rng, int(rng.integers(1, 4)))))
        assert ideal_dim(alpha * beta) * (1 << n) == ideal_dim(alpha) * ideal_dim(beta)

    @pytest.mark.parametrize("seed", range(20))
    def test_disjoint_independent_products(self, seed):
        # products of independent families on disjoint variables stay independent
        rng = np.random.default_rng([seed, 37])
        n = int(rng.integers(2, 9))
        split = int(rng.integers(1, n))
        mask_a, mask_b = (1 << split) - 1, ((1 << n) - 1) ^ ((1 << split) - 1)

        def independent(mask, count):
            while True:
                fs = random_on(n, mask, rng, count)
                if rank(BitMatrix.from_dense(np.stack([f.coeffs for f in fs]))) == count:
                    return fs

        k = int(rng.integers(1, min(4, 1 << split) + 1))
        l = int(rng.integers(1, min(4, 1 << (n - split)) + 1))
        fs, gs = independent(mask_a, k), independent(mask_b, l)
        prods = np.stack([(f * g).coeffs for f in fs for g in gs])
        assert rank(BitMatrix.from_dense(prods)) == k * l


class TestAnnihilator:
    def test_shift_self(self):
        assert annihilator_contains(shifted(3, 1), shifted(3, 1))

    def test_f4_inclusion_generator(self):
        assert annihilator_contains(hamming_element(4).element, shifted_product(5, [4, 1]))

    def test_not_contained(self):
        assert not annihilator_contains(shifted(2, 1), algebra.variable(2, 2))

    @pytest.mark.parametrize("n", range(1, 9))
    def test_shift_annihilator_is_principal(self, n):
        for i in range(1, n + 1):
            g = shifted(n, i)
            assert annihilator_basis(g).same_span(ideal_basis(P(g)))

    def test_annihilator_basis_kills(self, rng):
        f = AlgebraElement(7, rng.integers(0, 2, 128))
        for row in annihilator_basis(f).vectors.to_dense():
            assert not (f * AlgebraElement(7, row))


class TestShiftIdeals:
    @pytest.mark.parametrize("n", [4, 7, 10])
    def test_sum_dimension(self, n):
        for k in range(1, n + 1):
            assert ideal_dim(shifted_sum_ideal(n, range(1, k + 1))) == (1 << n) - (1 << (n - k))

    @pytest.mark.parametrize("n", [3, 6, 9])
    def test_intersection_is_product(self, n):
        for k in range(1, n):
            left = shifted_product_ideal(n, range(1, k + 1)).basis()
            cap = subspace_intersection(left, P(shifted(n, k + 1)).basis())
            assert cap.same_span(shifted_product_ideal(n, range(1, k + 2)).basis())

    def test_random_blocks_disjoint(self):
        rng = np.random.default_rng(0)
        for _ in range(200):
            n = int(rng.integers(2, 13))
            blocks = random_blocks(n, rng)
            flat = [i for b in blocks for i in b]
            assert 2 <= len(blocks) <= 3
            assert len(flat) == len(set(flat)) and all(1 <= i <= n for i in flat)
            assert all(blocks)


class TestVerification:
    def test_n2(self):
        report = verify_ideal_identities(2)
        assert report.passed
        assert {it.name for it in report.items} == {
            "annihilator_equals_ideal",
            "product_rate",
            "intersection_equals_product",
            "sum_rate",
            "rate_multiplicative",
        }

    def test_n10_sum_dims(self):
        report = verify_ideal_identities(10, partitions=5)
        assert report.passed
        dims = [d["dim"] for d in report.item("sum_rate").details]
        assert dims == [1024 - (1024 >> k) for k in range(1, 11)]

    def test_n1(self):
        assert verify_ideal_identities(1).passed

    def test_cap(self):
        with pytest.raises(ResourceError):
            verify_ideal_identities(13)

    def test_json_deterministic(self):
        a = verify_ideal_identities(5, seed=3, partitions=10).to_json()
        b = verify_ideal_identities(5, seed=3, partitions=10).to_json()
        assert a == b
        data = json.loads(a)
        assert data["seed"] == 3 and data["passed"]
