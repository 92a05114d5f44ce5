"""Classification of connected chains of (-2)-curves into Dynkin families.

Nodes of a chain carry field degrees n, 2n or 3n.  Two meeting nodes must
meet in exactly ``max(n_i, n_j)`` and their degrees may differ by a factor
of at most three; the resulting Cartan matrix is then of finite type and the
chain matches one of nine labelled templates.
"""

from __future__ import annotations

import enum
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Callable, Iterable, Iterator, Sequence

from .canonical import canonical_form
from .errors import BoundTooLargeError, InvariantError, UnclassifiableError, ValidationError
from .lattice_core import CurveClass, FiberConfiguration, is_connected, Divisor, matrix_is_negative_definite

MAX_ENUMERATION_NODES = 9


class Family(str, enum.Enum):
    A = "A"
    B = "B"
    C = "C"
    D = "D"
    E6 = "E6"
    E7 = "E7"
    E8 = "E8"
    F4 = "F4"
    G2 = "G2"

    def __str__(self) -> str:
        return self.value


FIXED_LENGTH = {Family.E6: 6, Family.E7: 7, Family.E8: 8, Family.F4: 4, Family.G2: 2}
# smallest length at which a series is distinct from the others (C2 is B2)
MIN_LENGTH = {Family.A: 1, Family.B: 2, Family.C: 3, Family.D: 4}


@dataclass(frozen=True)
class Characteristics:
    """Set of residue characteristics; ``allowed=None`` means unrestricted."""

    allowed: frozenset[int] | None = None

    def __contains__(self, p: object) -> bool:
        return self.allowed is None or p in self.allowed

    def __str__(self) -> str:
        if self.allowed is None:
            return "any"
        return "{" + ",".join(map(str, sorted(self.allowed))) + "}"


@dataclass(frozen=True)
class DynkinDiagram:
    family: Family
    length: int
    base_degree: int
    node_degrees: tuple[int, ...]
    # nodes[p] is the configuration curve id sitting at template position p
    nodes: tuple[int, ...] = ()

    @property
    def label(self) -> str:
        if self.family in FIXED_LENGTH:
            return str(self.family)
        return f"{self.family}{self.length}"

    def __str__(self) -> str:
        return f"{self.label}, n={self.base_degree}"


@dataclass(frozen=True)
class CartanMatrix:
    entries: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        M = self.entries
        for i, row in enumerate(M):
            if row[i] != 2:
                raise InvariantError(f"Cartan diagonal entry {i} is {row[i]}")
            for j, x in enumerate(row):
                if j != i and (x > 0 or (x == 0) != (M[j][i] == 0)):
                    raise InvariantError(f"Cartan entries ({i},{j}) and ({j},{i}) are inconsistent")


@dataclass(frozen=True)
class PairViolation:
    lemma: str  # "strict-lemma" or "ratio-lemma"
    i: int
    j: int
    detail: str


def template(family: Family | str, k: int | None = None, n: int = 1) -> tuple[tuple[int, ...], tuple[tuple[int, int], ...]]:
    """Node degrees and edges of a family's labelled diagram, in diagram order.

    The three-armed families list the long arm first and put the branch node
    last.
    """
    family = Family(family)
    if family in FIXED_LENGTH:
        if k is not None and k != FIXED_LENGTH[family]:
            raise ValidationError(f"{family} has exactly {FIXED_LENGTH[family]} nodes, not {k}")
        k = FIXED_LENGTH[family]
    elif k is None or k < MIN_LENGTH[family]:
        raise ValidationError(f"{family}_k needs k >= {MIN_LENGTH[family]}, got {k}")
    if n < 1:
        raise ValidationError(f"base degree must be positive, got {n}")

    path = tuple((i, i + 1) for i in range(k - 1))
    if family is Family.A:
        return (n,) * k, path
    if family is Family.B:
        return (2 * n,) * (k - 1) + (n,), path
    if family is Family.C:
        return (n,) * (k - 1) + (2 * n,), path
    if family is Family.F4:
        return (n, n, 2 * n, 2 * n), path
    if family is Family.G2:
        return (3 * n, n), path
    spine = tuple((i, i + 1) for i in range(k - 2))
    attach = k - 3 if family is Family.D else 2
    return (n,) * k, spine + ((attach, k - 1),)


def pairing_from_degrees(degrees: Sequence[int], edges: Iterable[tuple[int, int]]) -> list[list[int]]:
    """Pairing of a (-2)-chain: diagonal -2n_i, meeting pairs max(n_i, n_j)."""
    s = len(degrees)
    P = [[0] * s for _ in range(s)]
    for i, d in enumerate(degrees):
        P[i][i] = -2 * d
    for a, b in edges:
        P[a][b] = P[b][a] = max(degrees[a], degrees[b])
    return P


def chain_configuration(
    degrees: Sequence[int],
    edges: Iterable[tuple[int, int]],
    characteristic: int = 0,
    name: str = "",
) -> FiberConfiguration:
    curves = [CurveClass(i, d, -2 * d, 0, 1) for i, d in enumerate(degrees)]
    P = pairing_from_degrees(degrees, edges)
    return FiberConfiguration(tuple(curves), tuple(map(tuple, P)), characteristic, False, name)


def _require_minus_two(chain: Sequence[int], cfg: FiberConfiguration) -> None:
    if not chain:
        raise ValidationError("empty chain")
    bad = [i for i in chain if not cfg.curves[i].is_minus_two]
    if bad:
        raise ValidationError(f"curves {bad} are not (-2)-curves")


def validate_pairwise(chain: Sequence[int], cfg: FiberConfiguration) -> list[PairViolation]:
    _require_minus_two(chain, cfg)
    out = []
    for a, i in enumerate(chain):
        for j in chain[a + 1:]:
            x = cfg.pairing[i][j]
            if x <= 0:
                continue
            ni, nj = cfg.curves[i].field_degree, cfg.curves[j].field_degree
            hi, lo = max(ni, nj), min(ni, nj)
            if x != hi:
                out.append(PairViolation("strict-lemma", i, j, f"C{i}.C{j} = {x}, expected max({ni},{nj}) = {hi}"))
            if hi % lo or hi // lo not in (1, 2, 3):
                out.append(PairViolation("ratio-lemma", i, j, f"degree ratio {hi}/{lo} is not 1, 2 or 3"))
    return out


def cartan_matrix(chain: Sequence[int], cfg: FiberConfiguration) -> CartanMatrix:
    _require_minus_two(chain, cfg)
    rows = []
    for i in chain:
        d = cfg.pairing[i][i]
        row = []
        for j in chain:
            num = 2 * cfg.pairing[i][j]
            if num % d:
                raise InvariantError(f"2*C{i}.C{j} = {num} is not divisible by C{i}^2 = {d}")
            row.append(num // d)
        rows.append(tuple(row))
    return CartanMatrix(tuple(rows))


def _candidates(k: int) -> Iterator[Family]:
    for fam in Family:
        if fam in FIXED_LENGTH:
            if FIXED_LENGTH[fam] == k:
                yield fam
        elif k >= MIN_LENGTH[fam]:
            yield fam


def _key(degrees: Sequence[int], P: Sequence[Sequence[int]]):
    return canonical_form(list(degrees), P)


def classify(chain: Sequence[int], cfg: FiberConfiguration) -> DynkinDiagram:
    chain = list(chain)
    _require_minus_two(chain, cfg)
    if not is_connected(Divisor.on(cfg.size, {i: 1 for i in chain}), cfg):
        raise ValidationError(f"chain {chain} is not connected")
    problems = validate_pairwise(chain, cfg)
    if problems:
        raise UnclassifiableError("; ".join(p.detail for p in problems))
    degrees = [cfg.curves[i].field_degree for i in chain]
    n = min(degrees)
    key, order = _key(degrees, cfg.restrict(chain))
    k = len(chain)
    for fam in _candidates(k):
        t_deg, t_edges = template(fam, k, n)
        t_key, t_order = _key(t_deg, pairing_from_degrees(t_deg, t_edges))
        if t_key == key:
            nodes = [0] * k
            for pos in range(k):
                nodes[t_order[pos]] = chain[order[pos]]
            return DynkinDiagram(fam, k, n, t_deg, tuple(nodes))
    raise UnclassifiableError(
        f"chain with degrees {degrees} matches none of the nine families; "
        "it cannot occur in a fiber of genus >= 2"
    )


def admissible_characteristics(d: DynkinDiagram | Family) -> Characteristics:
    fam = d.family if isinstance(d, DynkinDiagram) else Family(d)
    if fam in (Family.B, Family.C, Family.F4):
        return Characteristics(frozenset({2}))
    if fam is Family.G2:
        return Characteristics(frozenset({3}))
    return Characteristics()


def default_characteristic(fam: Family) -> int:
    allowed = admissible_characteristics(fam).allowed
    return min(allowed) if allowed else 0


def grow_trees(
    max_nodes: int,
    degrees: Sequence[int],
    edge_ok: Callable[[int, int], bool],
) -> list[tuple[tuple[int, ...], tuple[tuple[int, int], ...]]]:
    """All negative-definite trees with node degrees drawn from ``degrees``.

    Trees grow one leaf at a time; a subgraph of a negative-definite graph is
    negative definite, so pruning at every size loses nothing.
    """
    level = {}
    for d in degrees:
        t = ((d,), ())
        level[_key(*_tree_pairing(t))[0]] = t
    out = list(level.values())
    for _ in range(max_nodes - 1):
        nxt = {}
        for degs, edges in level.values():
            s = len(degs)
            for v in range(s):
                for d in degrees:
                    if not edge_ok(degs[v], d):
                        continue
                    t = (degs + (d,), edges + ((v, s),))
                    degs2, P = _tree_pairing(t)
                    if not matrix_is_negative_definite(P):
                        continue
                    key = _key(degs2, P)[0]
                    if key not in nxt:
                        nxt[key] = t
        level = nxt
        out.extend(level.values())
    return out


def _tree_pairing(t):
    degs, edges = t
    return degs, pairing_from_degrees(degs, edges)


def lemma_edge_ok(a: int, b: int) -> bool:
    hi, lo = max(a, b), min(a, b)
    return hi % lo == 0 and hi // lo in (1, 2, 3)


def _chains_for_base(args) -> list[tuple]:
    max_nodes, n = args
    found = []
    for degs, edges in grow_trees(max_nodes, (n, 2 * n, 3 * n), lemma_edge_ok):
        if min(degs) != n:
            continue
        found.append((n, len(degs), _key(degs, pairing_from_degrees(degs, edges))[0], degs, edges))
    return found


def enumerate_valid_chains(max_nodes: int, max_base_degree: int, workers: int = 1) -> list[FiberConfiguration]:
    """Every connected acyclic valid chain up to the bounds, one per isomorphism class."""
    if max_nodes > MAX_ENUMERATION_NODES:
        raise BoundTooLargeError(f"max_nodes {max_nodes} exceeds {MAX_ENUMERATION_NODES}")
    if max_nodes < 1 or max_base_degree < 1:
        raise ValidationError("bounds must be positive")
    jobs = [(max_nodes, n) for n in range(1, max_base_degree + 1)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_chains_for_base, jobs))
    else:
        parts = [_chains_for_base(j) for j in jobs]
    rows = sorted(r for part in parts for r in part)
    out = []
    for _, _, _, degs, edges in rows:
        d = classify(range(len(degs)), chain_configuration(degs, edges))
        out.append(chain_configuration(degs, edges, default_characteristic(d.family), name=str(d)))
    return out
