import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import a_chain, config, path_edges
from fiberlattice.chain_classify import (
    FIXED_LENGTH,
    MIN_LENGTH,
    Family,
    admissible_characteristics,
    cartan_matrix,
    chain_configuration,
    classify,
    enumerate_valid_chains,
    template,
    validate_pairwise,
)
from fiberlattice.errors import BoundTooLargeError, UnclassifiableError
from fiberlattice.lattice_core import is_negative_definite


def all_templates(max_k=9, max_n=3):
    for fam in Family:
        lengths = [FIXED_LENGTH[fam]] if fam in FIXED_LENGTH else range(MIN_LENGTH[fam], max_k + 1)
        for k in lengths:
            for n in range(1, max_n + 1):
                yield fam, k, n


class TestValidatePairwise:
    def test_ok(self):
        assert validate_pairwise([0, 1], a_chain(2)) == []

    def test_strict_lemma(self):
        cfg = config([(1, -2, 0, 1), (1, -2, 0, 1)], [(0, 1, 2)])
        (v,) = validate_pairwise([0, 1], cfg)
        assert v.lemma == "strict-lemma"

    def test_ratio_lemma(self):
        cfg = config([(4, -8, 0, 1), (1, -2, 0, 1)], [(0, 1, 4)])
        lemmas = {v.lemma for v in validate_pairwise([0, 1], cfg)}
        assert "ratio-lemma" in lemmas


class TestCartan:
    def test_g2(self):
        cfg = chain_configuration([3, 1], [(0, 1)])
        assert cartan_matrix([0, 1], cfg).entries == ((2, -1), (-3, 2))

    @pytest.mark.parametrize("n", [1, 2, 3])
    def test_a2(self, n):
        M = cartan_matrix([0, 1], a_chain(2, n)).entries
        assert M[0][1] == M[1][0] == -1

    def test_single(self):
        assert cartan_matrix([0], a_chain(1)).entries == ((2,),)

    @pytest.mark.parametrize("fam,k,n", list(all_templates(8, 2)))
    def test_products(self, fam, k, n):
        degrees, edges = template(fam, k, n)
        cfg = chain_configuration(degrees, edges)
        M = cartan_matrix(range(k), cfg).entries
        for i in range(k):
            assert M[i][i] == 2
            for j in range(k):
                if i != j:
                    assert M[i][j] <= 0
                    assert (M[i][j] == 0) == (M[j][i] == 0)
                    assert M[i][j] * M[j][i] in (0, 1, 2, 3)


class TestClassify:
    def test_a3(self):
        d = classify([0, 1, 2], a_chain(3))
        assert (d.family, d.length, d.base_degree) == (Family.A, 3, 1)

    def test_g2(self):
        d = classify([0, 1], chain_configuration([3, 1], [(0, 1)]))
        assert str(d) == "G2, n=1"

    def test_b3(self):
        d = classify([0, 1, 2], chain_configuration([2, 2, 1], path_edges(3)))
        assert (d.family, d.length, d.base_degree) == (Family.B, 3, 1)

    def test_unclassifiable(self):
        # degree pattern n, 2n, n violates no pairwise lemma but matches no family
        cfg = chain_configuration([1, 2, 1], path_edges(3))
        with pytest.raises(UnclassifiableError):
            classify([0, 1, 2], cfg)

    @pytest.mark.parametrize("fam,k,n", list(all_templates()))
    def test_template_round_trip(self, fam, k, n):
        degrees, edges = template(fam, k, n)
        cfg = chain_configuration(degrees, edges)
        assert is_negative_definite(range(k), cfg)
        d = classify(list(range(k)), cfg)
        assert (d.family, d.length, d.base_degree) == (fam, k, n)
        assert sorted(d.nodes) == list(range(k))

    @settings(max_examples=60, deadline=None)
    @given(st.sampled_from(list(all_templates(8, 2))), st.randoms(use_true_random=False))
    def test_permutation_invariance(self, spec, rnd):
        fam, k, n = spec
        degrees, edges = template(fam, k, n)
        perm = list(range(k))
        rnd.shuffle(perm)
        inv = {old: new for new, old in enumerate(perm)}
        cfg = chain_configuration([degrees[p] for p in perm], [(inv[a], inv[b]) for a, b in edges])
        d = classify(list(range(k)), cfg)
        assert (d.family, d.length, d.base_degree) == (fam, k, n)
        # node positions carry the template degrees
        assert tuple(cfg.curves[i].field_degree for i in d.nodes) == d.node_degrees


class TestCharacteristics:
    def test_e8_any(self):
        assert all(p in admissible_characteristics(Family.E8) for p in (0, 2, 3, 5))

    def test_f4(self):
        chars = admissible_characteristics(Family.F4)
        assert 2 in chars and 0 not in chars and 3 not in chars

    def test_g2(self):
        chars = admissible_characteristics(Family.G2)
        assert 3 in chars and 2 not in chars


class TestEnumeration:
    def test_one_node(self):
        chains = enumerate_valid_chains(1, 3)
        assert [c.name for c in chains] == ["A1, n=1", "A1, n=2", "A1, n=3"]

    def test_two_nodes(self):
        labels = {c.name.split(",")[0] for c in enumerate_valid_chains(2, 3)}
        assert labels == {"A1", "A2", "B2", "G2"}

    def test_eight_nodes(self):
        chains = enumerate_valid_chains(8, 1)
        names = {c.name for c in chains}
        assert "E8, n=1" in names
        for c in chains:
            edges = sum(1 for i in range(c.size) for j in range(i + 1, c.size) if c.pairing[i][j])
            assert edges == c.size - 1

    def test_deterministic_with_workers(self):
        serial = [c.name for c in enumerate_valid_chains(6, 3)]
        parallel = [c.name for c in enumerate_valid_chains(6, 3, workers=3)]
        assert serial == parallel

    def test_bound(self):
        with pytest.raises(BoundTooLargeError):
            enumerate_valid_chains(10, 1)
