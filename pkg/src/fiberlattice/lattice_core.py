"""Exact-integer intersection data for the special fiber of a fibered surface.

All intersection numbers are measured over the residue field ``k``.  A curve
carries its own field degree ``n = [k_i : k]`` separately; every degree of a
line bundle on that curve is then a multiple of ``n``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

import numpy as np

from .errors import (
    CapExceededError,
    IndexMismatchError,
    InvariantError,
    NotEffectiveError,
    NotNegativeDefiniteError,
    ValidationError,
)

DEFAULT_SUBCURVE_CAP = 10**6


@dataclass(frozen=True)
class CurveClass:
    id: int
    field_degree: int
    self_int: int
    canonical_deg: int
    multiplicity: int = 1

    def __post_init__(self) -> None:
        problems = self.violations()
        if problems:
            raise InvariantError(f"curve {self.id}: " + "; ".join(problems))

    def violations(self) -> list[str]:
        n = self.field_degree
        out = []
        if n < 1:
            return [f"field_degree {n} < 1"]
        if self.multiplicity < 1:
            out.append(f"multiplicity {self.multiplicity} < 1")
        if self.self_int % n:
            out.append(f"field_degree {n} does not divide self_int {self.self_int}")
        if self.canonical_deg % n:
            out.append(f"field_degree {n} does not divide canonical_deg {self.canonical_deg}")
        if out:
            return out
        w = (self.self_int + self.canonical_deg) // n
        if w % 2:
            out.append(f"dualizing degree over k_i is {w}, which is odd")
        elif w < -2:
            out.append(f"dualizing degree over k_i is {w} < -2")
        if self.canonical_deg < 0:
            # K.C < 0 on a fiber component forces a (-1)-curve
            out.append(f"canonical_deg {self.canonical_deg} < 0 (a (-1)-curve; not relatively minimal)")
        return out

    @property
    def omega_degree(self) -> int:
        """deg omega_C over k, by adjunction."""
        return self.self_int + self.canonical_deg

    @property
    def is_minus_two(self) -> bool:
        return self.canonical_deg == 0 and self.self_int == -2 * self.field_degree

    def minus_d(self) -> int | None:
        """d if this is a rational (-d)-curve, else None."""
        if self.omega_degree != -2 * self.field_degree:
            return None
        return -self.self_int // self.field_degree


@dataclass(frozen=True)
class FiberConfiguration:
    """Weighted dual graph: curves, symmetric pairing matrix, characteristic."""

    curves: tuple[CurveClass, ...]
    pairing: tuple[tuple[int, ...], ...]
    characteristic: int = 0
    is_full_fiber: bool = False
    name: str = ""

    def __post_init__(self) -> None:
        object.__setattr__(self, "curves", tuple(self.curves))
        object.__setattr__(self, "pairing", tuple(tuple(int(x) for x in row) for row in self.pairing))
        problems = self.violations()
        if problems:
            raise InvariantError("; ".join(problems))

    @classmethod
    def from_graph(
        cls,
        curves: Sequence[CurveClass],
        edges: Iterable[tuple[int, int, int]],
        characteristic: int = 0,
        is_full_fiber: bool = False,
        name: str = "",
    ) -> "FiberConfiguration":
        s = len(curves)
        P = [[0] * s for _ in range(s)]
        for c in curves:
            if not 0 <= c.id < s:
                raise InvariantError(f"curve id {c.id} out of range 0..{s - 1}")
            P[c.id][c.id] = c.self_int
        for a, b, x in edges:
            if not (0 <= a < s and 0 <= b < s):
                raise InvariantError(f"edge ({a},{b}) references a missing curve")
            if a == b:
                raise InvariantError(f"edge ({a},{b}) is a self-loop")
            P[a][b] += x
            P[b][a] += x
        return cls(tuple(curves), tuple(map(tuple, P)), characteristic, is_full_fiber, name)

    def violations(self) -> list[str]:
        s = len(self.curves)
        if s == 0:
            return ["empty curve list"]
        out = []
        for i, c in enumerate(self.curves):
            if c.id != i:
                out.append(f"curve at position {i} has id {c.id}")
        if len(self.pairing) != s or any(len(r) != s for r in self.pairing):
            return out + [f"pairing matrix is not {s}x{s}"]
        ch = self.characteristic
        if ch < 0 or (ch > 0 and not _is_prime(ch)):
            out.append(f"characteristic {ch} is neither 0 nor prime")
        P = self.pairing
        for i in range(s):
            if P[i][i] != self.curves[i].self_int:
                out.append(f"pairing[{i}][{i}] = {P[i][i]} differs from self_int {self.curves[i].self_int}")
            for j in range(i + 1, s):
                if P[i][j] != P[j][i]:
                    out.append(f"pairing not symmetric at ({i},{j})")
                elif P[i][j] < 0:
                    out.append(f"curves {i},{j} meet negatively ({P[i][j]})")
                elif P[i][j]:
                    for k in (i, j):
                        n = self.curves[k].field_degree
                        if P[i][j] % n:
                            out.append(f"C{i}.C{j} = {P[i][j]} is not a multiple of n_{k} = {n}")
        if self.is_full_fiber and not out:
            F = self.fiber_divisor()
            for i, v in enumerate(_matvec(P, F.coeffs)):
                if v:
                    out.append(f"fiber radical: F.C{i} = {v}, expected 0")
            kf = canonical_pairing(F, self)
            if kf < 2 or kf % 2:
                out.append(f"K.F = {kf} must be even and >= 2 (genus >= 2)")
        return out

    @property
    def size(self) -> int:
        return len(self.curves)

    @property
    def degrees(self) -> tuple[int, ...]:
        return tuple(c.field_degree for c in self.curves)

    def fiber_divisor(self) -> "Divisor":
        return Divisor(tuple(c.multiplicity for c in self.curves))

    def genus(self) -> int:
        """Arithmetic genus of the generic fiber, from K.F = 2g - 2."""
        if not self.is_full_fiber:
            raise ValidationError("genus is only defined for a declared full fiber")
        return canonical_pairing(self.fiber_divisor(), self) // 2 + 1

    def neighbors(self, i: int) -> list[int]:
        return [j for j in range(self.size) if j != i and self.pairing[i][j] > 0]

    def restrict(self, subset: Sequence[int]) -> list[list[int]]:
        return [[self.pairing[i][j] for j in subset] for i in subset]

    def minus_two_curves(self) -> list[int]:
        return [c.id for c in self.curves if c.is_minus_two]

    def validate_definiteness(self) -> None:
        """Every proper sub-support must be negative definite (genus >= 2 setting)."""
        s = self.size
        if s == 1:
            if not self.is_full_fiber and not is_negative_definite([0], self):
                raise NotNegativeDefiniteError("single curve with nonnegative self-intersection")
            return
        if not self.is_full_fiber:
            if not is_negative_definite(range(s), self):
                raise NotNegativeDefiniteError("configuration pairing is not negative definite")
            return
        # subsets of a negative-definite set are negative definite
        for drop in range(s):
            rest = [i for i in range(s) if i != drop]
            if not is_negative_definite(rest, self):
                raise NotNegativeDefiniteError(f"removing curve {drop} leaves a non-negative-definite pairing")

    def with_characteristic(self, characteristic: int) -> "FiberConfiguration":
        return FiberConfiguration(self.curves, self.pairing, characteristic, self.is_full_fiber, self.name)


@dataclass(frozen=True, order=True)
class Divisor:
    coeffs: tuple[int, ...] = field(default=())

    def __post_init__(self) -> None:
        object.__setattr__(self, "coeffs", tuple(int(x) for x in self.coeffs))

    @classmethod
    def zero(cls, size: int) -> "Divisor":
        return cls((0,) * size)

    @classmethod
    def unit(cls, size: int, i: int, coeff: int = 1) -> "Divisor":
        c = [0] * size
        c[i] = coeff
        return cls(tuple(c))

    @classmethod
    def on(cls, size: int, coeffs: dict[int, int]) -> "Divisor":
        c = [0] * size
        for i, a in coeffs.items():
            c[i] = a
        return cls(tuple(c))

    def __len__(self) -> int:
        return len(self.coeffs)

    def __getitem__(self, i: int) -> int:
        return self.coeffs[i]

    def __add__(self, other: "Divisor") -> "Divisor":
        _same_length(self, other)
        return Divisor(tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    def __sub__(self, other: "Divisor") -> "Divisor":
        _same_length(self, other)
        return Divisor(tuple(a - b for a, b in zip(self.coeffs, other.coeffs)))

    def __mul__(self, k: int) -> "Divisor":
        return Divisor(tuple(k * a for a in self.coeffs))

    __rmul__ = __mul__

    def __neg__(self) -> "Divisor":
        return self * -1

    @property
    def support(self) -> list[int]:
        return [i for i, a in enumerate(self.coeffs) if a]

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def is_effective(self) -> bool:
        return all(a >= 0 for a in self.coeffs) and not self.is_zero()

    def leq(self, other: "Divisor") -> bool:
        _same_length(self, other)
        return all(a <= b for a, b in zip(self.coeffs, other.coeffs))


def _same_length(D: Divisor, E: Divisor) -> None:
    if len(D) != len(E):
        raise IndexMismatchError(f"divisors of length {len(D)} and {len(E)}")


def _check_index(D: Divisor, cfg: FiberConfiguration) -> None:
    if len(D) != cfg.size:
        raise IndexMismatchError(f"divisor has {len(D)} coefficients, configuration has {cfg.size} curves")


def require_effective(D: Divisor) -> None:
    if not D.is_effective():
        raise NotEffectiveError(f"divisor {D.coeffs} is not a nonzero effective divisor")


def _matvec(P, v) -> list[int]:
    return [sum(p * x for p, x in zip(row, v)) for row in P]


def _is_prime(p: int) -> bool:
    return p >= 2 and all(p % q for q in range(2, math.isqrt(p) + 1))


def pairing(D: Divisor, E: Divisor, cfg: FiberConfiguration) -> int:
    _check_index(D, cfg)
    _check_index(E, cfg)
    P = cfg.pairing
    return sum(d * sum(p * e for p, e in zip(P[i], E.coeffs)) for i, d in enumerate(D.coeffs) if d)


def self_intersection(D: Divisor, cfg: FiberConfiguration) -> int:
    return pairing(D, D, cfg)


def canonical_pairing(D: Divisor, cfg: FiberConfiguration) -> int:
    """K.D as a linear functional."""
    _check_index(D, cfg)
    return sum(d * c.canonical_deg for d, c in zip(D.coeffs, cfg.curves))


def dualizing_degree(D: Divisor, cfg: FiberConfiguration) -> int:
    """deg omega_D = D^2 + K.D over k."""
    require_effective(D)
    return pairing(D, D, cfg) + canonical_pairing(D, cfg)


def subcurve_count(D: Divisor) -> int:
    return math.prod(a + 1 for a in D.coeffs) - 1


def _check_cap(D: Divisor, cap: int) -> None:
    require_effective(D)
    count = subcurve_count(D)
    if count > cap:
        raise CapExceededError(f"configuration too large: {count} subcurves exceeds cap {cap}")


def subcurves(D: Divisor, cap: int = DEFAULT_SUBCURVE_CAP) -> Iterator[Divisor]:
    """Every B with 0 < B <= D, in lexicographic order."""
    _check_cap(D, cap)
    it = itertools.product(*(range(a + 1) for a in D.coeffs))
    next(it)  # the zero divisor
    for c in it:
        yield Divisor(c)


def subcurve_array(D: Divisor, cap: int = DEFAULT_SUBCURVE_CAP) -> np.ndarray:
    """Same rows as :func:`subcurves`, as an int64 array for bulk evaluation."""
    _check_cap(D, cap)
    axes = [np.arange(a + 1, dtype=np.int64) for a in D.coeffs]
    grid = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, len(D))
    return grid[1:]


def quadratic_forms(B: np.ndarray, cfg: FiberConfiguration) -> np.ndarray:
    P = np.asarray(cfg.pairing, dtype=np.int64)
    return np.einsum("ij,ij->i", B @ P, B)


def is_connected(D: Divisor, cfg: FiberConfiguration) -> bool:
    _check_index(D, cfg)
    require_effective(D)
    supp = D.support
    seen = {supp[0]}
    stack = [supp[0]]
    inside = set(supp)
    while stack:
        i = stack.pop()
        for j in supp:
            if j not in seen and cfg.pairing[i][j] > 0:
                seen.add(j)
                stack.append(j)
    return seen == inside


def leading_minors(M: Sequence[Sequence[int]]) -> list[int]:
    """Leading principal minors by fraction-free (Bareiss) elimination.

    Stops after the first zero minor, since elimination cannot continue
    without pivoting and definiteness has already failed.
    """
    a = [list(r) for r in M]
    s = len(a)
    prev = 1
    minors = []
    for k in range(s):
        piv = a[k][k]
        minors.append(piv)
        if piv == 0:
            break
        for i in range(k + 1, s):
            for j in range(k + 1, s):
                a[i][j] = (a[i][j] * piv - a[i][k] * a[k][j]) // prev
        prev = piv
    return minors


def matrix_is_negative_definite(M: Sequence[Sequence[int]]) -> bool:
    minors = leading_minors(M)
    if len(minors) < len(M):
        return False
    return all((m < 0) if k % 2 == 0 else (m > 0) for k, m in enumerate(minors))


def is_negative_definite(subset: Iterable[int], cfg: FiberConfiguration) -> bool:
    idx = list(subset)
    if not idx:
        raise ValidationError("negative definiteness of an empty set of curves")
    return matrix_is_negative_definite(cfg.restrict(idx))


def is_1_connected(D: Divisor, cfg: FiberConfiguration, cap: int = DEFAULT_SUBCURVE_CAP) -> bool:
    """True iff D1.D2 >= 1 for every splitting D = D1 + D2 into effective parts."""
    _check_index(D, cfg)
    B = subcurve_array(D, cap)[:-1]  # drop B = D itself
    if len(B) == 0:
        return True
    P = np.asarray(cfg.pairing, dtype=np.int64)
    d = np.asarray(D.coeffs, dtype=np.int64)
    # B.(D - B) = B.D - B^2
    cross = B @ (P @ d) - quadratic_forms(B, cfg)
    return bool((cross >= 1).all())
