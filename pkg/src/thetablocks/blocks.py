"""Theta blocks: one-variable products of eta and odd theta factors, and their lattice analogues.

A block is written as ``eta^e * prod theta(l_j)^{m_j}`` (the displayed form, ``e``
the *net* eta exponent).  In the ``eta^{f(0)} prod (theta_a/eta)^{f(a)}``
normalization this is ``f(0) = e + sum m_j``.
"""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .lattice import GramLattice, named_lattice
from .qseries import A1, QDEN, FourierSeries, eta_power, mul, pow_int, specialize, theta_odd

log = logging.getLogger(__name__)

__all__ = [
    "ThetaBlockSpec",
    "BlockReport",
    "parse_block",
    "build_block",
    "block_report",
    "holomorphy_check",
    "hyperbolic_norm_numerators",
    "LATTICE_BLOCKS",
    "lattice_block",
    "wt2_args",
    "wt3_args",
    "wt2_corollary_args",
    "wt3_corollary_args",
    "wt2_vector",
    "wt3_vector",
    "N_wt2",
    "N_wt3",
    "build_family_wt2",
    "build_family_wt3",
    "build_corollary_blocks",
    "riemann_theta_relation_check",
]


@dataclass(frozen=True)
class ThetaBlockSpec:
    eta_pow: int
    thetas: tuple[tuple[tuple[int, ...], int], ...]  # (dual coordinates of argument, multiplicity)
    lattice: GramLattice = field(default=A1)

    @classmethod
    def one_variable(cls, eta_pow: int, args: Sequence[int] | dict[int, int]) -> "ThetaBlockSpec":
        items = args.items() if isinstance(args, dict) else ((a, 1) for a in args)
        return cls(eta_pow, tuple(((int(a),), int(m)) for a, m in items), A1)

    @classmethod
    def on_lattice(cls, lattice: GramLattice, eta_pow: int, args: Sequence[Sequence[int]]) -> "ThetaBlockSpec":
        return cls(eta_pow, tuple((tuple(int(x) for x in a), 1) for a in args), lattice)

    @property
    def f0(self) -> int:
        return self.eta_pow + sum(m for _, m in self.thetas)

    @property
    def is_zero(self) -> bool:
        return any(m > 0 and not any(a) for a, m in self.thetas)

    @property
    def is_pure(self) -> bool:
        return all(m >= 0 for _, m in self.thetas)

    def normalized(self) -> tuple[int, "ThetaBlockSpec"]:
        """Merge arguments up to sign (``theta(-x) = -theta(x)``); returns ``(sign, spec)``."""
        sign = 1
        merged: dict[tuple[int, ...], int] = {}
        for a, m in self.thetas:
            first = next((x for x in a if x), 0)
            if first < 0:
                a = tuple(-x for x in a)
                if m % 2:
                    sign = -sign
            merged[a] = merged.get(a, 0) + m
        thetas = tuple(sorted((a, m) for a, m in merged.items() if m))
        return sign, ThetaBlockSpec(self.eta_pow, thetas, self.lattice)

    @property
    def index_form(self) -> tuple[tuple[Fraction, ...], ...]:
        r = self.lattice.rank
        return tuple(
            tuple(Fraction(sum(m * a[i] * a[j] for a, m in self.thetas)) for j in range(r)) for i in range(r)
        )

    @property
    def index(self) -> Fraction | None:
        g, form = self.lattice.gram, self.index_form
        t = form[0][0] / g[0][0]
        r = range(self.lattice.rank)
        return t if all(form[i][j] == t * g[i][j] for i in r for j in r) else None

    @property
    def weight(self) -> Fraction:
        return Fraction(self.f0, 2)

    @property
    def q_order(self) -> Fraction:
        return Fraction(self.f0, 24) + Fraction(sum(m for _, m in self.thetas), 12)

    def __str__(self):
        parts = [f"eta^{self.eta_pow}"] if self.eta_pow else []
        for a, m in self.thetas:
            arg = str(a[0]) if len(a) == 1 else ",".join(map(str, a))
            parts.append(f"th({arg})" + (f"^{m}" if m != 1 else ""))
        return " ".join(parts) or "1"


@dataclass(frozen=True)
class BlockReport:
    weight: Fraction
    index: Fraction | None
    q_order: Fraction
    holomorphic_up_to_prec: bool | None
    q_vanishing_order: Fraction | None


_TOKEN = re.compile(r"\s*(?:(\*)|eta\s*\^\s*(-?\d+)|(eta)\b|th\s*\(\s*(-?\d+)\s*\)(?:\s*\^\s*(\d+))?)")


def parse_block(text: str) -> ThetaBlockSpec:
    """Parse ``"eta^-6 * th(8) th(1)^3 ..."`` into a one-variable spec.

    Grammar: whitespace-separated factors, optional ``*`` separators;
    ``eta^<int>`` (or bare ``eta``) and ``th(<int>)`` with optional ``^<int>``.
    """
    pos, eta_pow, args = 0, 0, {}
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ValueError(f"cannot parse block at position {pos}: {text[pos:pos + 12]!r}")
        if m.group(2) is not None:
            eta_pow += int(m.group(2))
        elif m.group(3):
            eta_pow += 1
        elif m.group(4) is not None:
            a = int(m.group(4))
            args[a] = args.get(a, 0) + int(m.group(5) or 1)
        pos = m.end()
    return ThetaBlockSpec.one_variable(eta_pow, args)


def build_block(spec: ThetaBlockSpec, qprec) -> FourierSeries:
    """Expand the block so that every coefficient below ``qprec`` is exact."""
    qprec = Fraction(qprec)
    if not spec.is_pure:
        raise ValueError("theta factors with negative multiplicity have no Fourier expansion here")
    lat = spec.lattice
    sign, norm = spec.normalized()
    n_theta = sum(m for _, m in norm.thetas)
    total = Fraction(norm.eta_pow, 24) + Fraction(n_theta, 8)
    meta = dict(weight=spec.weight, index_form=spec.index_form)
    if norm.is_zero:
        log.info("block %s vanishes identically (zero theta argument)", spec)
        return FourierSeries.zero(lat, qprec, **meta)
    if qprec <= total:
        return FourierSeries.zero(lat, qprec, **meta)  # the block starts at q^total
    result = FourierSeries.one(lat)
    if n_theta:
        theta_prec = qprec - total + Fraction(1, 8)
        for a, m in sorted(norm.thetas, key=lambda am: am[1]):
            result = mul(result, pow_int(theta_odd(lat, a, theta_prec), m))
    if norm.eta_pow:
        result = mul(result, eta_power(norm.eta_pow, qprec - total + Fraction(norm.eta_pow, 24)))
    result = result.truncate(qprec)
    if result.zden != 1:
        raise ValueError(f"block {spec} has half-integral zeta exponents")
    if sign < 0:
        result = -result
    return result.with_meta(**meta)


def hyperbolic_norm_numerators(s: FourierSeries, t=None) -> tuple[np.ndarray, int]:
    """Return ``(num, den)`` with ``2 t n - (l, l) = num / den`` for every stored term."""
    t = Fraction(s.index if t is None else t)
    q = s.lattice.dual_gram
    qden = 1
    for row in q:
        for x in row:
            qden = qden * x.denominator // np.gcd(qden, x.denominator)
    qint = np.array([[int(x * qden) for x in row] for row in q], dtype=np.int64).reshape(s.rank, s.rank)
    c = s.exps[:, 1:]
    norms = np.einsum("ij,jk,ik->i", c, qint, c) if s.rank else np.zeros(len(s), dtype=np.int64)
    # (l,l) = norms / (qden zden^2);  2 t n = t q24 / 12
    den = 12 * qden * s.zden**2 * t.denominator
    num = s.exps[:, 0] * (t.numerator * qden * s.zden**2) - norms * 12 * t.denominator
    return num, int(den)


def holomorphy_check(s: FourierSeries) -> bool:
    """Finite-precision support certificate ``2 t n - (l, l) >= 0`` for every stored term.

    Supported for lattice index 1 and for one-variable (Eichler-Zagier) series on ``A1``
    where it reads ``4 N n - r^2 >= 0``.
    """
    t = s.index
    if t is None or (t != 1 and s.lattice.gram != A1.gram):
        raise NotImplementedError("holomorphy check needs lattice index 1 or a one-variable EZ series")
    num, _ = hyperbolic_norm_numerators(s, t)
    return bool((num >= 0).all())


# -- named lattice blocks ---------------------------------------------------------

LATTICE_BLOCKS: dict[str, tuple[str, int, list[tuple[int, ...]]]] = {
    "thetaL4": ("L4", -6, [
        (2, 1, 1, 1), (0, 1, -1, 0), (0, 1, 1, 0), (0, 1, 0, -1), (0, 1, 0, 1),
        (0, 0, 1, -1), (0, 0, 1, 1), (0, 1, 0, 0), (0, 0, 1, 0), (0, 0, 0, 1),
    ]),
    "thetaL4_1": ("L4", -6, [
        (1, 1, 1, 1), (0, 1, -1, 0), (0, 1, 1, 0), (0, 1, 0, -1), (0, 1, 0, 1),
        (0, 0, 1, -1), (0, 0, 1, 1), (1, 1, 0, 0), (1, 0, 1, 0), (1, 0, 0, 1),
    ]),
    "thetaL4_2": ("L4", -6, [
        (1, 0, 0, 0), (0, 1, -1, 0), (0, 1, 1, 0), (0, 1, 0, -1), (0, 1, 0, 1),
        (0, 0, 1, -1), (0, 0, 1, 1), (1, 1, 1, 0), (1, 1, 0, 1), (1, 0, 1, 1),
    ]),
    "thetaL6": ("L6", -3, [
        (0, 0, 1, 0, 0, 0), (0, 0, 0, 1, 0, 0), (0, 0, 1, -1, 0, 0), (0, 1, 0, 0, 0, -1),
        (0, 1, 0, 0, 0, 1), (2, 1, 0, 0, -1, 0), (0, 0, 0, 0, 1, 1), (0, 1, 0, 0, 0, 0),
        (0, 0, 0, 0, 0, 1),
    ]),
    "thetaL6_1": ("L6", -3, [
        (0, 0, 1, 0, 0, 0), (0, 0, 0, 1, 0, 0), (0, 0, 1, -1, 0, 0), (0, 1, 0, 0, 0, -1),
        (0, 1, 0, 0, 0, 1), (1, 0, 0, 0, 0, 0), (1, 1, 0, 0, 0, 1), (1, 0, 0, 0, -1, 0),
        (1, 1, 0, 0, -1, -1),
    ]),
    "thetaL6_2": ("L6", -3, [
        (0, 0, 1, 0, 0, 0), (0, 0, 0, 1, 0, 0), (0, 0, 1, -1, 0, 0), (0, 1, 0, 0, 0, -1),
        (0, 1, 0, 0, 0, 1), (1, 0, 0, 0, -1, -1), (1, 1, 0, 0, -1, 0), (1, 1, 0, 0, 0, 0),
        (1, 0, 0, 0, 0, 1),
    ]),
}


def lattice_block_spec(name: str) -> ThetaBlockSpec:
    lat, e, args = LATTICE_BLOCKS[name]
    return ThetaBlockSpec.on_lattice(named_lattice(lat), e, args)


def lattice_block(name: str, qprec) -> FourierSeries:
    """One of ``thetaL4``, ``thetaL4_1``, ``thetaL4_2``, ``thetaL6``, ``thetaL6_1``, ``thetaL6_2``."""
    return build_block(lattice_block_spec(name), qprec)


def lattice_block_L4(qprec):
    return lattice_block("thetaL4", qprec)


def lattice_block_L4_1(qprec):
    return lattice_block("thetaL4_1", qprec)


def lattice_block_L4_2(qprec):
    return lattice_block("thetaL4_2", qprec)


def lattice_block_L6(qprec):
    return lattice_block("thetaL6", qprec)


def lattice_block_L6_1(qprec):
    return lattice_block("thetaL6_1", qprec)


def lattice_block_L6_2(qprec):
    return lattice_block("thetaL6_2", qprec)


# -- the two infinite families and their corollary splittings -----------------

def wt2_args(a: Sequence[int]) -> list[int]:
    a1, a2, a3, a4 = a
    return [2 * a1 + a2 + a4, a2, a2 + a3, a2 + 2 * a3 + 2 * a4, a2 + a3 + a4,
            a2 + a3 + 2 * a4, a3, a3 + a4, a3 + 2 * a4, a4]


def wt2_corollary_args(a: Sequence[int], which: int) -> list[int]:
    a1, a2, a3, a4 = a
    if which == 1:
        return [a1, a2, a2 + a3, a2 + 2 * a3 + 2 * a4, a1 + a2, a2 + a3 + 2 * a4, a3,
                a1 - a3, a3 + 2 * a4, a1 + a2 + a3 + 2 * a4]
    if which == 2:
        return [a1 - a3 - a4, a2, a2 + a3, a2 + 2 * a3 + 2 * a4, a1 + a2 + a3 + a4,
                a2 + a3 + 2 * a4, a3, a1 + a4, a3 + 2 * a4, a1 + a2 + a4]
    raise ValueError("which must be 1 or 2")


def wt3_args(b: Sequence[int]) -> list[int]:
    b1, b2, b3, b4, b5, b6 = b
    return [b1, 2 * b2 + b3 - b1, b3, b3 + b4, b3 + 2 * b4, b4, b5, b6, b5 + b6]


def wt3_corollary_args(b: Sequence[int], which: int) -> list[int]:
    b1, b2, b3, b4, b5, b6 = b
    common = [b5, b6, b5 + b6, b3 + 2 * b4, b3]
    if which == 1:
        return common + [b2 - b4, b2 + b3 + b4, b2 - b1, b2 + b3 - b1]
    if which == 2:
        return common + [b2 - b1 - b4, b2 + b3 + b4 - b1, b2 + b3, b2]
    raise ValueError("which must be 1 or 2")


def wt2_vector(a: Sequence[int]) -> tuple[int, ...]:
    """L4-coordinates of the specialization direction for the weight-2 family."""
    a1, a2, a3, a4 = a
    return (a1 - a3 - a4, a2 + a3 + a4, a3 + a4, a4)


def wt3_vector(b: Sequence[int]) -> tuple[int, ...]:
    b1, b2, b3, b4, b5, b6 = b
    return (b2 - b4, b3 + b4, b5, -b6, b1 - b4, b4)


# theta(z4) specializes to theta(-b6 z): the L6 route carries one sign flip
WT3_SPECIALIZATION_SIGN = -1


def N_wt2(a: Sequence[int]) -> int:
    a1, a2, a3, a4 = a
    return (2 * a1 * a1 + 2 * a1 * a2 + 2 * a1 * a4 + 3 * a2 * a2 + 5 * a2 * a3 + 6 * a2 * a4
            + 5 * a3 * a3 + 10 * a3 * a4 + 8 * a4 * a4)


def N_wt3(b: Sequence[int]) -> int:
    b1, b2, b3, b4, b5, b6 = b
    return (b1 * b1 - 2 * b1 * b2 - b1 * b3 + 2 * b2 * b2 + 2 * b2 * b3 + 2 * b3 * b3
            + 3 * b3 * b4 + 3 * b4 * b4 + b5 * b5 + b5 * b6 + b6 * b6)


def family_spec(weight: int, params: Sequence[int], which: int | None = None) -> ThetaBlockSpec:
    if weight == 2:
        args = wt2_args(params) if which is None else wt2_corollary_args(params, which)
        return ThetaBlockSpec.one_variable(-6, args)
    if weight == 3:
        args = wt3_args(params) if which is None else wt3_corollary_args(params, which)
        return ThetaBlockSpec.one_variable(-3, args)
    raise ValueError("weight must be 2 or 3")


def build_family_wt2(a: Sequence[int], qprec, via: str = "direct") -> FourierSeries:
    if via == "direct":
        return build_block(family_spec(2, a), qprec)
    if via == "lattice":
        return specialize(lattice_block("thetaL4", qprec), wt2_vector(a))
    raise ValueError(f"unknown route {via!r}")


def build_family_wt3(b: Sequence[int], qprec, via: str = "direct") -> FourierSeries:
    if via == "direct":
        return build_block(family_spec(3, b), qprec)
    if via == "lattice":
        return specialize(lattice_block("thetaL6", qprec), wt3_vector(b)).scale(WT3_SPECIALIZATION_SIGN)
    raise ValueError(f"unknown route {via!r}")


def build_corollary_blocks(params: Sequence[int], which: int, qprec) -> FourierSeries:
    weight = {4: 2, 6: 3}.get(len(params))
    if weight is None:
        raise ValueError("expected 4 (weight 2) or 6 (weight 3) parameters")
    return build_block(family_spec(weight, params, which), qprec)


def block_report(spec: ThetaBlockSpec, qprec=None) -> BlockReport:
    """Weight, index and q-order read off the factor list; optionally a holomorphy scan."""
    holo = vanishing = None
    if qprec is not None:
        s = build_block(spec, qprec)
        holo = holomorphy_check(s) if not s.is_zero() else True
        vanishing = s.qorder
    return BlockReport(spec.weight, spec.index, spec.q_order, holo, vanishing)


# -- Riemann theta relation ------------------------------------------------------

_RTR = [[1, 1, 1, 1], [1, 1, -1, -1], [1, -1, 1, -1], [1, -1, -1, 1]]


def _rtr_transform(x: Sequence[int]) -> list[int]:
    out = []
    for j in range(4):
        s = sum(x[i] * _RTR[i][j] for i in range(4))
        if s % 2:
            raise ValueError(f"transformed arguments of {tuple(x)} are not integral")
        out.append(s // 2)
    return out


def riemann_theta_relation_sides(x: Sequence[int], qprec):
    x = [int(v) for v in x]
    m = _rtr_transform([x[0], x[1], x[2], -x[3]])
    p = _rtr_transform(x)

    def prod_theta(args):
        s = FourierSeries.one(A1)
        for a in args:
            s = mul(s, theta_odd(A1, (a,), Fraction(qprec) - Fraction(3, 8)))
        return s.truncate(qprec)

    return prod_theta(x), prod_theta(m), prod_theta(p)


def riemann_theta_relation_check(x: Sequence[int], qprec) -> bool:
    """``prod theta(x_j z) + prod theta(m_j z) == prod theta(p_j z)`` up to ``qprec``."""
    lhs1, lhs2, rhs = riemann_theta_relation_sides(x, qprec)
    return (lhs1 + lhs2).agrees_with(rhs)
