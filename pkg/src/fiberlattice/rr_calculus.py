"""Degree bookkeeping for line bundles on vertical divisors.

Every criterion here is a sufficient condition decided from degrees alone.
``True`` certifies the conclusion; ``False`` only means the criterion is not
met and says nothing about the cohomology itself.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import IndexMismatchError, InvariantError, ValidationError
from .lattice_core import (
    DEFAULT_SUBCURVE_CAP,
    CurveClass,
    Divisor,
    FiberConfiguration,
    canonical_pairing,
    dualizing_degree,
    is_1_connected,
    pairing,
    quadratic_forms,
    require_effective,
    subcurve_array,
)

UNKNOWN = "unknown"


@dataclass(frozen=True)
class LineBundleClass:
    """The class a*K + sum b_i C_i, optionally twisted down at points.

    ``point_twists`` holds ``(curve id, degree)`` pairs, one per point
    ``O(-y)`` with ``y`` on that curve; the degree is the residue-field degree
    of ``y`` over k.  A twist lowers the degree on every divisor whose support
    contains its curve.
    """

    canonical: int = 0
    components: tuple[int, ...] = ()
    point_twists: tuple[tuple[int, int], ...] = field(default=())

    @classmethod
    def power_of_omega(cls, m: int, size: int, minus: Divisor | None = None) -> "LineBundleClass":
        """omega^m(-minus)."""
        b = tuple(-x for x in minus.coeffs) if minus is not None else (0,) * size
        return cls(m, b)

    def twisted_at(self, curve: int, degree: int) -> "LineBundleClass":
        return LineBundleClass(self.canonical, self.components, self.point_twists + ((curve, degree),))


def _component_divisor(L: LineBundleClass, cfg: FiberConfiguration) -> Divisor:
    if not L.components:
        return Divisor.zero(cfg.size)
    if len(L.components) != cfg.size:
        raise IndexMismatchError(f"line bundle has {len(L.components)} component coefficients, configuration has {cfg.size}")
    return Divisor(L.components)


def degree_on(L: LineBundleClass, D: Divisor, cfg: FiberConfiguration) -> int:
    require_effective(D)
    deg = L.canonical * canonical_pairing(D, cfg) + pairing(_component_divisor(L, cfg), D, cfg)
    return deg - sum(d for c, d in L.point_twists if D[c] > 0)


def twisted_bundle(m: int, C: int, Y: Divisor, cfg: FiberConfiguration) -> LineBundleClass:
    """omega^m(-Y') with Y' = Y - C."""
    return LineBundleClass.power_of_omega(m, cfg.size, Y - Divisor.unit(cfg.size, C))


def twist_degree_formula(m: int, C: CurveClass | int, Y: Divisor, cfg: FiberConfiguration) -> int:
    """deg omega_C + (m-1) K.C - Y.C, cross-checked against the direct degree."""
    idx = C if isinstance(C, int) else C.id
    curve = cfg.curves[idx]
    if Y[idx] < 1:
        raise ValidationError(f"C{idx} is not in the support of Y")
    unit = Divisor.unit(cfg.size, idx)
    value = curve.omega_degree + (m - 1) * curve.canonical_deg - pairing(Y, unit, cfg)
    direct = degree_on(twisted_bundle(m, idx, Y, cfg), unit, cfg)
    if value != direct:
        raise InvariantError(f"twist degree {value} disagrees with direct degree {direct} on C{idx}")
    return value


def _degrees_bulk(L: LineBundleClass, B: np.ndarray, cfg: FiberConfiguration) -> np.ndarray:
    P = np.asarray(cfg.pairing, dtype=np.int64)
    K = np.asarray([c.canonical_deg for c in cfg.curves], dtype=np.int64)
    b = np.asarray(_component_divisor(L, cfg).coeffs, dtype=np.int64)
    deg = L.canonical * (B @ K) + B @ (P @ b)
    for c, d in L.point_twists:
        deg -= d * (B[:, c] > 0)
    return deg


def h1_vanishing_failures(
    L: LineBundleClass, D: Divisor, cfg: FiberConfiguration, cap: int = DEFAULT_SUBCURVE_CAP
) -> np.ndarray:
    """Subcurves B of D with deg(L|B) <= deg omega_B, as rows."""
    B = subcurve_array(D, cap)
    K = np.asarray([c.canonical_deg for c in cfg.curves], dtype=np.int64)
    omega = quadratic_forms(B, cfg) + B @ K
    return B[_degrees_bulk(L, B, cfg) <= omega]


def h1_vanishing_predicate(
    L: LineBundleClass, D: Divisor, cfg: FiberConfiguration, cap: int = DEFAULT_SUBCURVE_CAP
) -> bool:
    """True iff deg(L|B) > deg omega_B for every subcurve 0 < B <= D."""
    return len(h1_vanishing_failures(L, D, cfg, cap)) == 0


def euler_characteristic(L: LineBundleClass, D: Divisor, cfg: FiberConfiguration) -> int:
    w = dualizing_degree(D, cfg)
    if w % 2:
        raise InvariantError(f"D^2 + K.D = {w} is odd; configuration is invalid")
    return degree_on(L, D, cfg) - w // 2


def h0_under_vanishing(
    L: LineBundleClass, D: Divisor, cfg: FiberConfiguration, cap: int = DEFAULT_SUBCURVE_CAP
) -> int | str:
    """h0 over k via Riemann-Roch when H1 vanishing is certified, else "unknown"."""
    chi = euler_characteristic(L, D, cfg)
    if not h1_vanishing_predicate(L, D, cfg, cap):
        return UNKNOWN
    return chi


def gg_criterion(L: LineBundleClass, C: int, cfg: FiberConfiguration) -> bool:
    """deg(L|C) >= deg omega_C + 2 n_C on an integral curve C."""
    curve = cfg.curves[C]
    return degree_on(L, Divisor.unit(cfg.size, C), cfg) >= curve.omega_degree + 2 * curve.field_degree


@dataclass(frozen=True)
class ConicReport:
    is_conic: bool
    omega_degree_over_constant_field: int
    # a conic has Pic = Z, so a degree-0 restriction of omega is trivial
    omega_trivial_when_degree_zero: bool


def conic_test(C: CurveClass) -> ConicReport:
    w = C.omega_degree
    rel = w // C.field_degree
    return ConicReport(w < 0, rel, w < 0)


@dataclass(frozen=True)
class KoszulIndex:
    i: int
    j: int
    r: int

    def __post_init__(self) -> None:
        if self.r < 0:
            raise ValidationError(f"r = {self.r} < 0")
        if not 0 <= self.i <= self.r:
            raise ValidationError(f"i = {self.i} outside 0..{self.r}")


def koszul_dual_index(idx: KoszulIndex) -> KoszulIndex:
    """(i, j) -> (r-1-i, 2-j); needs i <= r-1 so that the image is again valid."""
    if idx.i > idx.r - 1:
        raise ValidationError(f"i = {idx.i} has no dual index for r = {idx.r}")
    return KoszulIndex(idx.r - 1 - idx.i, 2 - idx.j, idx.r)


def bicanonical_space_rank(genus_prime: int) -> int:
    """r with r + 1 = h0(2K) = 3g' - 3 on a curve of arithmetic genus g' >= 2."""
    if genus_prime < 2:
        raise ValidationError("needs g' >= 2")
    return 3 * genus_prime - 4


def koszul_vanishing(idx: KoszulIndex, h0_of_M_plus_jL: int, is_trivial_bundle: bool) -> bool:
    if h0_of_M_plus_jL < 0:
        raise ValidationError(f"negative h0 {h0_of_M_plus_jL}")
    return h0_of_M_plus_jL == 0 or (h0_of_M_plus_jL == 1 and is_trivial_bundle)


def generation_degree_bound(cfg: FiberConfiguration, cap: int = DEFAULT_SUBCURVE_CAP) -> int:
    """4 if the fiber divisor is 1-connected, otherwise 5."""
    if not cfg.is_full_fiber:
        raise ValidationError("generation degree bound needs a declared full fiber")
    return 4 if is_1_connected(cfg.fiber_divisor(), cfg, cap) else 5


def reduced_multiple(cfg: FiberConfiguration) -> tuple[int, Divisor]:
    """(r, Y) with F = rY and Y primitive."""
    F = cfg.fiber_divisor()
    r = math.gcd(*F.coeffs)
    return r, Divisor(tuple(a // r for a in F.coeffs))


def omega_fiber_power(m: int, cfg: FiberConfiguration, minus: Divisor | None = None) -> LineBundleClass:
    """omega_{X0}^m(-minus); on fiber components it pairs like m*K since F.C_i = 0."""
    return LineBundleClass.power_of_omega(m, cfg.size, minus)


def vanishing_table(cfg: FiberConfiguration, ms: Sequence[int] = (2, 3, 4, 5, 6), cap: int = DEFAULT_SUBCURVE_CAP) -> dict:
    """Lemma-style checks on a full fiber: omega^m(-X0) on X0, and the multiple-fiber instances."""
    F = cfg.fiber_divisor()
    out = {"omega_m_minus_fiber": {}, "multiple_fiber": {}}
    for m in ms:
        out["omega_m_minus_fiber"][m] = h1_vanishing_predicate(omega_fiber_power(m, cfg, F), F, cfg, cap)
    r, Y = reduced_multiple(cfg)
    for m in ms:
        for i in range(2, r + 1):
            for j in range(1, i):
                L = omega_fiber_power(m, cfg, Y * j)
                out["multiple_fiber"][(m, i, j)] = h1_vanishing_predicate(L, Y * (i - j), cfg, cap)
    return out
