import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import a_chain, config
from fiberlattice.chain_classify import Family, chain_configuration, enumerate_valid_chains, template
from fiberlattice.errors import NotNegativeDefiniteError
from fiberlattice.fundamental_cycle import (
    _laufer,
    check_self_intersection,
    compute_fundamental_cycle,
    verify_minimality,
)
from fiberlattice.lattice_core import Divisor, pairing
from golden import expected_cycle, table_instances


def template_cycle(fam, k, n):
    degrees, edges = template(fam, k, n)
    cfg = chain_configuration(degrees, edges)
    return compute_fundamental_cycle(range(k), cfg), cfg


class TestExamples:
    @pytest.mark.parametrize("k", range(1, 9))
    def test_a_all_ones(self, k):
        fc, _ = template_cycle(Family.A, k, 2)
        assert fc.multiplicities == (1,) * k

    def test_e8(self):
        fc, _ = template_cycle(Family.E8, 8, 1)
        assert fc.multiplicities == (2, 4, 6, 5, 4, 3, 2, 3)

    def test_g2(self):
        fc, _ = template_cycle(Family.G2, 2, 1)
        assert fc.multiplicities == (1, 2)

    def test_not_negative_definite(self):
        cfg = config([(1, -2, 0, 1), (1, -2, 0, 1)], [(0, 1, 2)])
        with pytest.raises(NotNegativeDefiniteError):
            compute_fundamental_cycle([0, 1], cfg)


class TestMinimality:
    def test_a2(self):
        cfg = a_chain(2)
        assert verify_minimality(Divisor((1, 1)), [0, 1], cfg)
        assert not verify_minimality(Divisor((2, 2)), [0, 1], cfg)

    def test_d4(self):
        degrees, edges = template(Family.D, 4, 1)
        cfg = chain_configuration(degrees, edges)
        assert verify_minimality(Divisor((1, 2, 1, 1)), range(4), cfg)

    def test_f4_listed_vector_fails_defining_inequality(self):
        # (1,2,2,1) meets the second node positively, so it is not a candidate
        degrees, edges = template(Family.F4, 4, 1)
        cfg = chain_configuration(degrees, edges)
        Z = Divisor((1, 2, 2, 1))
        assert pairing(Z, Divisor.unit(4, 1), cfg) == 1
        assert not verify_minimality(Z, range(4), cfg)
        assert verify_minimality(Divisor((2, 3, 2, 1)), range(4), cfg)


class TestSelfIntersection:
    def test_a1(self):
        fc, _ = template_cycle(Family.A, 1, 1)
        assert fc.self_intersection == -2 and check_self_intersection(fc)

    def test_f4(self):
        fc, _ = template_cycle(Family.F4, 4, 1)
        assert check_self_intersection(fc)

    @pytest.mark.parametrize("k", range(3, 9))
    def test_c_series(self, k):
        fc, _ = template_cycle(Family.C, k, 2)
        assert fc.multiplicities == (1,) + (2,) * (k - 2) + (1,)
        assert fc.self_intersection == -4


class TestProperties:
    @pytest.mark.parametrize("fam,k,n", list(table_instances(8, (1, 2, 3))))
    def test_defining_inequality_and_square(self, fam, k, n):
        fc, cfg = template_cycle(fam, k, n)
        Z = fc.cycle
        for i in range(k):
            assert pairing(Z, Divisor.unit(k, i), cfg) <= 0
        assert fc.self_intersection == -2 * n

    @pytest.mark.parametrize("fam,k,n", list(table_instances(8, (1,))))
    def test_scaling_in_n(self, fam, k, n):
        base, _ = template_cycle(fam, k, 1)
        for m in (2, 3):
            other, _ = template_cycle(fam, k, m)
            assert other.multiplicities == base.multiplicities

    @settings(max_examples=40, deadline=None)
    @given(st.data())
    def test_start_independence(self, data):
        chains = enumerate_valid_chains(6, 2)
        cfg = data.draw(st.sampled_from(chains))
        chain = tuple(range(cfg.size))
        start = data.draw(st.sampled_from(chain))
        assert _laufer(chain, start, cfg, 20) == list(compute_fundamental_cycle(chain, cfg).cycle.coeffs)

    def test_table_agrees_except_f4(self):
        mismatched = []
        for fam, k, n in table_instances(8, (1,)):
            fc, _ = template_cycle(fam, k, n)
            if fc.multiplicities != expected_cycle(fam, k):
                mismatched.append(fam)
        assert mismatched == [Family.F4]

    def test_subchain(self):
        # a (-2)-chain inside a larger configuration
        cfg = config(
            [(1, -2, 0, 1), (1, -2, 0, 1), (1, -2, 0, 1), (2, -6, 2, 1)],
            [(0, 1, 1), (1, 2, 1), (2, 3, 2)],
        )
        fc = compute_fundamental_cycle([0, 1, 2], cfg)
        assert fc.cycle == Divisor((1, 1, 1, 0))

