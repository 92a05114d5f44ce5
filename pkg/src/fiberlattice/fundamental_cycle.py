"""Fundamental cycles of connected (-2)-chains."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Sequence

from .errors import CapExceededError, InvariantError, NotNegativeDefiniteError, ValidationError
from .lattice_core import (
    DEFAULT_SUBCURVE_CAP,
    Divisor,
    FiberConfiguration,
    is_connected,
    is_negative_definite,
    pairing,
    subcurve_count,
)

COEFFICIENT_CAP = 20


@dataclass(frozen=True)
class FundamentalCycle:
    cycle: Divisor
    chain: tuple[int, ...]
    min_degree: int
    cfg: FiberConfiguration

    @property
    def multiplicities(self) -> tuple[int, ...]:
        """Coefficients on the chain, in chain order."""
        return tuple(self.cycle[i] for i in self.chain)

    @property
    def self_intersection(self) -> int:
        return pairing(self.cycle, self.cycle, self.cfg)


def _check_chain(chain: Sequence[int], cfg: FiberConfiguration) -> tuple[int, ...]:
    chain = tuple(sorted(set(chain)))
    if not chain:
        raise ValidationError("empty chain")
    bad = [i for i in chain if not cfg.curves[i].is_minus_two]
    if bad:
        raise ValidationError(f"curves {bad} are not (-2)-curves")
    if not is_connected(Divisor.on(cfg.size, {i: 1 for i in chain}), cfg):
        raise ValidationError(f"chain {list(chain)} is not connected")
    # semidefinite chains can stop early with Z^2 = 0, so the cap alone is not enough
    if not is_negative_definite(chain, cfg):
        raise NotNegativeDefiniteError(f"chain {list(chain)}: pairing not negative definite")
    return chain


def _laufer(chain: tuple[int, ...], start: int, cfg: FiberConfiguration, cap: int) -> list[int]:
    P = cfg.pairing
    z = [0] * cfg.size
    z[start] = 1
    while True:
        for i in chain:
            if sum(P[i][j] * z[j] for j in chain) > 0:
                z[i] += 1
                if z[i] > cap:
                    raise NotNegativeDefiniteError(
                        f"coefficient of C{i} exceeded {cap}: pairing not negative definite"
                    )
                break
        else:
            return z


def compute_fundamental_cycle(
    chain: Sequence[int],
    cfg: FiberConfiguration,
    cap: int = COEFFICIENT_CAP,
    all_starts: bool = True,
) -> FundamentalCycle:
    """Minimal effective Z on the chain with Z.C_i <= 0 for every chain curve.

    Grows Z from the lowest-index curve by repeatedly adding the lowest-index
    curve that Z meets positively.  With ``all_starts`` the growth is rerun
    from every curve and any disagreement is an error, since on a
    negative-definite chain the minimum is unique.
    """
    chain = _check_chain(chain, cfg)
    z = _laufer(chain, chain[0], cfg, cap)
    if all_starts:
        for s in chain[1:]:
            other = _laufer(chain, s, cfg, cap)
            if other != z:
                raise InvariantError(f"starting at C{chain[0]} gives {z}, starting at C{s} gives {other}")
    if cfg.is_full_fiber:
        for i in chain:
            if z[i] > cfg.curves[i].multiplicity:
                raise InvariantError(
                    f"fundamental cycle coefficient {z[i]} on C{i} exceeds its fiber multiplicity"
                )
    n = min(cfg.curves[i].field_degree for i in chain)
    return FundamentalCycle(Divisor(tuple(z)), chain, n, cfg)


def _satisfies(z: Sequence[int], chain: Sequence[int], cfg: FiberConfiguration) -> bool:
    P = cfg.pairing
    return all(sum(P[i][j] * z[j] for j in chain) <= 0 for i in chain)


def verify_minimality(
    Z: Divisor,
    chain: Sequence[int],
    cfg: FiberConfiguration,
    cap: int = DEFAULT_SUBCURVE_CAP,
) -> bool:
    """Brute-force oracle: Z qualifies and no smaller full-support divisor does."""
    chain = tuple(sorted(set(chain)))
    if not Z.is_effective() or any(Z[i] for i in range(len(Z)) if i not in chain):
        raise ValidationError("Z must be effective and supported on the chain")
    if not _satisfies(Z.coeffs, chain, cfg):
        return False
    if any(Z[i] == 0 for i in chain):
        return False
    count = subcurve_count(Z)
    if count > cap:
        raise CapExceededError(f"configuration too large: {count} subcurves exceeds cap {cap}")
    z = list(Z.coeffs)
    for vals in itertools.product(*(range(1, Z[i] + 1) for i in chain)):
        cand = [0] * len(z)
        for i, v in zip(chain, vals):
            cand[i] = v
        if cand != z and _satisfies(cand, chain, cfg):
            return False
    return True


def check_self_intersection(fc: FundamentalCycle) -> bool:
    return fc.self_intersection == -2 * fc.min_degree
