import math

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from conftest import a_chain, config, path_edges, single_minus_two
from fiberlattice.chain_classify import chain_configuration
from fiberlattice.errors import (
    CapExceededError,
    IndexMismatchError,
    InvariantError,
    NotEffectiveError,
    NotNegativeDefiniteError,
)
from fiberlattice.lattice_core import (
    CurveClass,
    Divisor,
    canonical_pairing,
    dualizing_degree,
    is_1_connected,
    is_connected,
    is_negative_definite,
    leading_minors,
    matrix_is_negative_definite,
    pairing,
    self_intersection,
    subcurve_array,
    subcurve_count,
    subcurves,
)


def f4(n=1):
    return chain_configuration([n, n, 2 * n, 2 * n], path_edges(4))


class TestPairing:
    def test_zero_divisor(self):
        cfg = a_chain(3)
        E = Divisor((1, 2, 1))
        assert pairing(Divisor.zero(3), E, cfg) == 0

    def test_a2_fundamental_cycle(self):
        cfg = a_chain(2)
        D = Divisor((1, 1))
        assert pairing(D, D, cfg) == -2

    def test_f4_listed_vector_square(self):
        cfg = f4()
        D = Divisor((1, 2, 2, 1))
        assert self_intersection(D, cfg) == -2

    def test_length_mismatch(self):
        with pytest.raises(IndexMismatchError):
            pairing(Divisor((1, 1)), Divisor((1, 1)), a_chain(3))


class TestCanonical:
    def test_minus_two_support(self):
        assert canonical_pairing(Divisor((3, 1, 2)), a_chain(3)) == 0

    def test_central_curve(self):
        cfg = config([(2, -6, 2, 1)], [])
        assert canonical_pairing(Divisor((1,)), cfg) == 2

    def test_linearity(self):
        m = 2
        cfg = config([(1, -2, 0, 3), (m, -3 * m, m, 1)], [(0, 1, 2)])
        assert canonical_pairing(Divisor((3, 1)), cfg) == m


class TestDualizingDegree:
    def test_single_curve(self):
        assert dualizing_degree(Divisor((1,)), single_minus_two()) == -2

    def test_case5b_total(self, corpus):
        cfg = corpus["case5b_a5"]
        Y = cfg.fiber_divisor()
        m = cfg.curves[-1].canonical_deg
        assert self_intersection(Y, cfg) == 0
        assert dualizing_degree(Y, cfg) == m

    def test_a2_cycle(self):
        assert dualizing_degree(Divisor((1, 1)), a_chain(2)) == -2

    def test_not_effective(self):
        with pytest.raises(NotEffectiveError):
            dualizing_degree(Divisor((1, -1)), a_chain(2))


class TestSubcurves:
    def test_single(self):
        assert list(subcurves(Divisor((1,)))) == [Divisor((1,))]

    def test_counts(self):
        assert subcurve_count(Divisor((2, 1))) == 5
        assert len(list(subcurves(Divisor((2, 1))))) == 5
        assert subcurve_count(Divisor((1, 1, 1))) == 7

    def test_cap(self):
        with pytest.raises(CapExceededError):
            list(subcurves(Divisor((9, 9, 9)), cap=100))

    @given(st.lists(st.integers(0, 3), min_size=1, max_size=5))
    def test_count_formula_and_array(self, coeffs):
        assume(any(coeffs))
        D = Divisor(tuple(coeffs))
        expected = math.prod(a + 1 for a in coeffs) - 1
        assert subcurve_count(D) == expected
        listed = list(subcurves(D))
        assert len(listed) == expected
        assert len(set(listed)) == expected
        arr = subcurve_array(D)
        assert arr.shape[0] == expected
        assert {tuple(r) for r in arr.tolist()} == {B.coeffs for B in listed}
        assert all(B.leq(D) and not B.is_zero() for B in listed)


class TestConnectivity:
    def test_single(self):
        assert is_connected(Divisor((1,)), single_minus_two())

    def test_disjoint(self):
        cfg = config([(1, -2, 0, 1), (1, -2, 0, 1)], [])
        assert not is_connected(Divisor((1, 1)), cfg)

    def test_a3(self):
        assert is_connected(Divisor((1, 1, 1)), a_chain(3))


class TestNegativeDefinite:
    def test_single(self):
        assert is_negative_definite([0], single_minus_two())

    def test_a2_minors(self):
        assert leading_minors([[-2, 1], [1, -2]]) == [-2, 3]
        assert is_negative_definite([0, 1], a_chain(2))

    def test_double_edge(self):
        assert not matrix_is_negative_definite([[-2, 2], [2, -2]])

    def test_full_fiber_semidefinite(self, corpus):
        cfg = corpus["elliptic_triangle"]
        assert not is_negative_definite(range(cfg.size), cfg)
        cfg.validate_definiteness()

    def test_validate_definiteness_rejects(self):
        cfg = config([(1, -2, 0, 1), (1, -2, 0, 1)], [(0, 1, 2)])
        with pytest.raises(NotNegativeDefiniteError):
            cfg.validate_definiteness()


class TestOneConnected:
    def test_irreducible(self, corpus):
        cfg = corpus["irreducible_genus2"]
        assert is_1_connected(cfg.fiber_divisor(), cfg)

    def test_disjoint(self):
        cfg = config([(1, -2, 0, 1), (1, -2, 0, 1)], [])
        assert not is_1_connected(Divisor((1, 1)), cfg)

    def test_a2(self):
        assert is_1_connected(Divisor((1, 1)), a_chain(2))

    def test_multiple_fiber(self, corpus):
        cfg = corpus["double_fiber"]
        assert not is_1_connected(cfg.fiber_divisor(), cfg)


class TestCurveInvariants:
    def test_divisibility(self):
        with pytest.raises(InvariantError, match="does not divide"):
            CurveClass(0, 2, -3, 0, 1)

    def test_minus_one_curve(self):
        with pytest.raises(InvariantError):
            CurveClass(0, 1, -1, -1, 1)

    def test_parity(self):
        with pytest.raises(InvariantError):
            CurveClass(0, 1, -3, 0, 1)

    def test_radical(self):
        # C0 + C1 with an A2 pairing is not in the radical
        with pytest.raises(InvariantError):
            config([(1, -2, 0, 1), (1, -2, 0, 1)], [(0, 1, 1)], full=True)


def random_chain():
    @st.composite
    def build(draw):
        k = draw(st.integers(1, 6))
        degrees = draw(st.lists(st.sampled_from([1, 2, 4]), min_size=k, max_size=k))
        parents = [draw(st.integers(0, i - 1)) for i in range(1, k)]
        edges = [(p, i + 1) for i, p in enumerate(parents)]
        return chain_configuration(degrees, edges)
    return build()


def divisor_for(cfg, draw, lo=-3, hi=3):
    return Divisor(tuple(draw(st.lists(st.integers(lo, hi), min_size=cfg.size, max_size=cfg.size))))


class TestProperties:
    @settings(max_examples=60)
    @given(st.data())
    def test_symmetric_bilinear(self, data):
        cfg = data.draw(random_chain())
        D, E, G = (divisor_for(cfg, data.draw) for _ in range(3))
        a, b = data.draw(st.integers(-4, 4)), data.draw(st.integers(-4, 4))
        assert pairing(D, E, cfg) == pairing(E, D, cfg)
        assert pairing(D * a + E * b, G, cfg) == a * pairing(D, G, cfg) + b * pairing(E, G, cfg)

    def test_fiber_in_radical(self, corpus):
        for name, cfg in corpus.items():
            F = cfg.fiber_divisor()
            for i in range(cfg.size):
                assert pairing(F, Divisor.unit(cfg.size, i), cfg) == 0, name

    def test_proper_supports_negative_definite(self, corpus):
        for name, cfg in corpus.items():
            for drop in range(cfg.size):
                rest = [i for i in range(cfg.size) if i != drop]
                if rest:
                    assert is_negative_definite(rest, cfg), (name, drop)

    @settings(max_examples=80)
    @given(data=st.data())
    def test_dualizing_degree_even(self, data, corpus):
        name = data.draw(st.sampled_from(sorted(corpus)))
        cfg = corpus[name]
        D = divisor_for(cfg, data.draw, 0, 3)
        assume(not D.is_zero())
        assert dualizing_degree(D, cfg) % 2 == 0

    def test_subcurve_array_matches_forms(self, corpus):
        cfg = corpus["triple_fiber"]
        B = subcurve_array(cfg.fiber_divisor())
        P = np.asarray(cfg.pairing)
        for row in B[:50]:
            D = Divisor(tuple(int(x) for x in row))
            assert int(row @ P @ row) == self_intersection(D, cfg)
