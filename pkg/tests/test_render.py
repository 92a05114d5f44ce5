from conftest import config
from fiberlattice.case_enumerator import listed_shapes
from fiberlattice.chain_classify import Family, chain_configuration, template
from fiberlattice.render import diagram


def test_path_rows():
    degrees, edges = template(Family.B, 3, 1)
    lines = diagram(chain_configuration(degrees, edges)).splitlines()
    assert lines[1] == "o------o------o"
    assert lines[2].split() == ["2n", "2n", "n"]
    assert lines[3].split() == ["C0", "C1", "C2"]


def test_branch_hangs_below():
    degrees, edges = template(Family.E8, 8, 1)
    text = diagram(chain_configuration(degrees, edges))
    assert "o[C7 r=1 n]" in text


def test_marked_component_and_legend():
    (cfg,) = listed_shapes(1)["A: 3,2,1 (m=4n)"]
    text = diagram(cfg, 1)
    assert "*" in text.splitlines()[1]
    assert "*C3: C^2=-12, K.C=4, deg=4n" in text


def test_nondefault_edge_and_cycle():
    cfg = config([(1, -2, 2, 1), (1, -2, 0, 1), (1, -2, 0, 1)], [(0, 1, 1), (1, 2, 1), (0, 2, 1)])
    assert "cycle" in diagram(cfg)
    cfg = config([(1, -6, 6, 1), (1, -2, 0, 2), (1, -2, 0, 1)], [(0, 1, 3), (1, 2, 1)])
    assert "-3-" in diagram(cfg)
