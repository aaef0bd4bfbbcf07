"""Gritsenko lifts, the weight-0 quotient Psi, and Borcherds products as Fourier-Jacobi expansions."""

from __future__ import annotations

import heapq
import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .blocks import ThetaBlockSpec, build_block
from .hecke import apply_T_minus, divisors
from .lattice import DualVector, GramLattice, load_lattice
from .qseries import QDEN, FourierSeries, PrecisionError, mul

__all__ = [
    "FJExpansion",
    "BorcherdsData",
    "grit",
    "quotient_psi",
    "weak_support_ok",
    "borcherds_data",
    "borcherds_expand",
    "divisor_multiplicity",
    "psi_coefficient",
    "is_positive",
    "compare_fj",
]


@dataclass
class FJExpansion:
    lattice: GramLattice
    weight: Fraction
    coeffs: list[FourierSeries]  # coeffs[i] multiplies xi^(offset + i)
    fj_order: int
    offset: int = 0
    symmetric: bool = False
    meta: dict = field(default_factory=dict)

    def at(self, m: int) -> FourierSeries:
        i = m - self.offset
        if not 0 <= i < len(self.coeffs):
            raise KeyError(f"xi^{m} not in this expansion (orders {self.offset}..{self.offset + len(self.coeffs) - 1})")
        return self.coeffs[i]

    @property
    def orders(self) -> range:
        return range(self.offset, self.offset + len(self.coeffs))

    def to_json(self) -> dict:
        return {
            "lattice": self.lattice.to_json(),
            "weight": str(self.weight),
            "fj_order": self.fj_order,
            "offset": self.offset,
            "symmetric": self.symmetric,
            **{k: v for k, v in self.meta.items()},
            "coefficients": [c.to_json() for c in self.coeffs],
        }

    @classmethod
    def from_json(cls, doc: dict) -> "FJExpansion":
        extra = {k: v for k, v in doc.items()
                 if k not in ("lattice", "weight", "fj_order", "offset", "symmetric", "coefficients")}
        return cls(load_lattice(doc["lattice"]), Fraction(doc["weight"]),
                   [FourierSeries.from_json(c) for c in doc["coefficients"]],
                   doc["fj_order"], doc.get("offset", 0), doc.get("symmetric", False), extra)


@dataclass(frozen=True)
class BorcherdsData:
    A: Fraction
    B: DualVector
    C: Fraction
    leading_block: ThetaBlockSpec
    sign_datum_D: int

    def to_json(self) -> dict:
        return {"A": str(self.A), "B": [str(x) for x in self.B.coords], "C": str(self.C),
                "D": self.sign_datum_D, "leading_block": str(self.leading_block)}


def is_positive(dual: Sequence[int]) -> bool:
    """Fixed ordering on the dual lattice: first nonzero dual coordinate positive."""
    for x in dual:
        if x:
            return x > 0
    return False


# -- Gritsenko lift ------------------------------------------------------------

def grit(phi: FourierSeries, M: int, qprec=None) -> FJExpansion:
    """Fourier-Jacobi coefficients ``[0, phi, phi|T_-(2), ..., phi|T_-(M)]``."""
    if phi.index != 1:
        raise ValueError("the additive lift takes a Jacobi form of lattice index 1")
    k = phi.weight
    if k is None or k.denominator != 1:
        raise ValueError("the additive lift needs an integral weight")
    if phi.coeff(0, (0,) * phi.rank) != 0:
        raise ValueError("f(0,0) != 0: the Eisenstein term is not supported")
    coeffs = [FourierSeries.zero(phi.lattice, phi.qprec, weight=k,
                                 index_form=tuple(tuple(Fraction(0) for _ in r) for r in phi.index_form))]
    for m in range(1, M + 1):
        c = apply_T_minus(phi, m, k)
        if qprec is not None:
            if c.qprec < Fraction(qprec):
                raise PrecisionError(f"xi^{m} coefficient known only below q^{c.qprec}; need {qprec}")
            c = c.truncate(qprec)
        coeffs.append(c)
    return FJExpansion(phi.lattice, k, coeffs, M, symmetric=True)


# -- exact Laurent division and the quotient Psi --------------------------------

def _slice_dict(s: FourierSeries, q24: int) -> dict[tuple[int, ...], object]:
    rows = np.flatnonzero(s.exps[:, 0] == q24)
    return {tuple(s.exps[i, 1:].tolist()): s.coeffs[i] for i in rows.tolist()}


def _exact_divide(num: dict, den: dict) -> dict:
    """Exact quotient of Laurent polynomials (dicts exponent -> coefficient); raises if not exact."""
    if not num:
        return {}
    r = len(next(iter(den)))
    dkeys = list(den)
    lo = [min(min(k[i] for k in num), 0) for i in range(r)]
    hi = [max(k[i] for k in num) for i in range(r)]
    dlo = [min(k[i] for k in dkeys) for i in range(r)]
    dhi = [max(k[i] for k in dkeys) for i in range(r)]
    qlo = [lo[i] - dlo[i] for i in range(r)]
    qhi = [hi[i] - dhi[i] for i in range(r)]
    widths = [hi[i] - lo[i] + 1 for i in range(r)]
    weights = [1] * r
    for i in range(r - 2, -1, -1):
        weights[i] = weights[i + 1] * widths[i + 1]

    def enc(v):
        return sum((v[i] - lo[i]) * weights[i] for i in range(r))

    def dec(code):
        out = []
        for i in range(r):
            d, code = divmod(code, weights[i])
            out.append(d + lo[i])
        return out

    dlead = max(dkeys)
    clead = den[dlead]
    dterms = [(sum(k[i] * weights[i] for i in range(r)), c) for k, c in den.items() if k != dlead]
    dlead_lin = sum(dlead[i] * weights[i] for i in range(r))
    rem = {enc(k): c for k, c in num.items() if c}
    heap = [-c for c in rem]
    heapq.heapify(heap)
    quotient = {}
    integral = clead in (1, -1)
    while heap:
        code = -heapq.heappop(heap)
        c = rem.pop(code)
        if not c:
            continue
        k = dec(code)
        mono = tuple(k[i] - dlead[i] for i in range(r))
        if any(mono[i] < qlo[i] or mono[i] > qhi[i] for i in range(r)):
            raise ArithmeticError(f"division is not exact (quotient term {mono} outside the Newton box)")
        coef = c * clead if integral else Fraction(c) / clead
        quotient[mono] = coef
        base = code - dlead_lin
        for dl, dc in dterms:
            t = base + dl
            old = rem.get(t)
            if old is None:
                rem[t] = -coef * dc
                heapq.heappush(heap, -t)
            else:
                rem[t] = old - coef * dc
    return quotient


def _series_from_slices(lattice, slices: dict[int, dict], qprec, **meta) -> FourierSeries:
    rows, cs = [], []
    for n, poly in sorted(slices.items()):
        for l, c in poly.items():
            rows.append((QDEN * n, *l))
            cs.append(c)
    exps = np.array(rows, dtype=np.int64).reshape(-1, lattice.rank + 1)
    coeffs = np.array(cs + [0], dtype=object)[:-1]
    if all(isinstance(c, int) or (isinstance(c, Fraction) and c.denominator == 1) for c in cs):
        coeffs = np.array([int(c) for c in cs] + [0], dtype=object)[:-1]
    return FourierSeries(lattice, exps, coeffs, qprec, **meta)


def quotient_psi(theta: FourierSeries, qprec=None, *, check: bool = True) -> FourierSeries:
    """``Psi = -(Theta | T_-(2)) / Theta``, solved one q-level at a time.

    With ``Theta`` known below ``Q`` the quotient is known below ``Q/2 - 1``.
    The defining relation ``Psi * Theta + Theta|T_-(2) = 0`` is re-verified on
    the whole known range (``check=True``).
    """
    if theta.is_zero():
        raise ZeroDivisionError("theta is identically zero")
    if theta.qorder != 1:
        raise ValueError(f"theta must have q-order exactly 1, got {theta.qorder}")
    if theta.index != 1 or theta.weight is None:
        raise ValueError("theta must be a weighted series of lattice index 1")
    known = theta.qprec / 2 - 1
    if qprec is None:
        qprec = known
    qprec = Fraction(qprec)
    if qprec > known:
        raise PrecisionError(f"Psi below q^{qprec} needs Theta below q^{2 * qprec + 2}; have {theta.qprec}")
    hecke = apply_T_minus(theta, 2, theta.weight)
    lat = theta.lattice
    meta = dict(weight=0, index_form=lat.gram)
    hecke_slices = {int(q): {tuple(r.tolist()): c for r, c in zip(sl.exps[:, 1:], sl.coeffs.tolist())}
                    for q, sl in hecke.q_slices()}
    lead = _slice_dict(theta, QDEN)
    psi: dict[int, dict] = {}
    n = 0
    while n < qprec:
        rhs = {l: -c for l, c in hecke_slices.get(n + 1, {}).items()}
        if n:
            partial = _series_from_slices(lat, psi, n + 1, **meta)  # a polynomial: exact up to q^n
            for l, c in _slice_dict(mul(partial, theta.truncate(n + 2)), QDEN * (n + 1)).items():
                rhs[l] = rhs.get(l, 0) - c
        rhs = {k: v for k, v in rhs.items() if v}
        psi[n] = _exact_divide(rhs, lead)
        n += 1
    out = _series_from_slices(lat, psi, qprec, **meta)
    if check:
        residual = mul(out, theta).truncate(qprec + 1) + hecke.truncate(qprec + 1)
        if not residual.is_zero():
            raise ArithmeticError(f"quotient residual is nonzero: {residual.difference_terms(FourierSeries.zero(lat, residual.qprec), 3)}")
    return out


def weak_support_ok(psi: FourierSeries) -> bool:
    """Every stored ``(n, l)`` satisfies ``(l, l) <= 2 n + m(L)`` (m(L) the largest minimal coset norm)."""
    bound = psi.lattice.max_minimal_norm
    for qe, l, _ in psi.terms():
        if psi.lattice.norm(l) > 2 * qe + bound:
            return False
    return True


# -- Borcherds products ---------------------------------------------------------

def _q0_slice(psi: FourierSeries) -> dict[tuple[int, ...], object]:
    if psi.zden != 1:
        raise ValueError("Psi must have integral zeta exponents")
    return _slice_dict(psi, 0)


def borcherds_data(psi: FourierSeries) -> BorcherdsData:
    """Weyl-vector data ``A, B, C``, the sign datum ``D`` and the leading theta block of ``Borch(psi)``."""
    lat = psi.lattice
    nden = lat.norm_denominator
    # 2n - (l, l) <= 0, scaled by 12 * nden * zden^2
    hyp = psi.exps[:, 0] * nden * psi.zden**2 - 12 * lat.norm_numerators(psi.exps[:, 1:])
    for i in np.flatnonzero(hyp <= 0).tolist():
        c = psi.coeffs[i]
        if Fraction(c).denominator != 1:
            qe, l = Fraction(int(psi.exps[i, 0]), QDEN), [Fraction(int(x), psi.zden) for x in psi.exps[i, 1:]]
            raise ValueError(f"singular coefficient f({qe},{l}) = {c} is not integral")
    if psi.qorder is not None and psi.qorder < 0:
        # D = sum over n < 0 of sigma_0(-n) f(n, 0)
        D = sum(len(divisors(int(-qe))) * int(c) for qe, l, c in psi.terms()
                if qe < 0 and not any(l))
    else:
        D = 0
    q0 = _q0_slice(psi)
    f00 = int(q0.get((0,) * lat.rank, 0))
    A = Fraction(sum(int(c) for c in q0.values()), 24)
    positive = sorted((l, int(c)) for l, c in q0.items() if is_positive(l))
    B = DualVector.from_dual(lat, [sum(Fraction(c * l[i], 2) for l, c in positive) for i in range(lat.rank)])
    C = Fraction(sum(int(c) * lat.norm(l) for l, c in q0.items()), 2 * lat.rank)
    spec = ThetaBlockSpec(f00 - sum(c for _, c in positive), tuple(positive), lat)
    return BorcherdsData(A, B, C, spec, D)


def psi_coefficient(psi: FourierSeries, n: int, dual: Sequence[int]) -> int:
    """``f(n, l)`` read from the table, or through the orbit rule beyond its precision.

    The orbit rule: for an index-1 form the coefficient depends only on
    ``2n - (l, l)`` and the class of ``l`` in ``D(L)``.
    """
    dual = tuple(int(x) for x in dual)
    if n < psi.qprec:
        return psi.coeff(n, dual)
    lat = psi.lattice
    hyp = 2 * n - lat.norm(dual)
    rep, rep_norm = lat.minimal_coset_reps[lat.coset_key(dual)]
    n2 = (hyp + rep_norm) / 2
    if n2.denominator != 1:
        raise ValueError("inconsistent coset representative")
    if n2 < 0:
        return 0
    if n2 >= psi.qprec:
        raise PrecisionError(f"f({n}, {dual}) maps to f({n2}, {rep}) beyond qprec {psi.qprec}")
    return psi.coeff(n2, rep)


def divisor_multiplicity(psi: FourierSeries, n: int, ell: DualVector | Sequence[int]) -> int:
    """``sum over d > 0 of f(d^2 n, d l)`` for a singular index ``2n - (l, l) < 0``."""
    dual = ell.int_dual() if isinstance(ell, DualVector) else tuple(int(x) for x in ell)
    lat = psi.lattice
    hyp = 2 * n - lat.norm(dual)
    if hyp >= 0:
        raise ValueError(f"index ({n}, {dual}) is not singular (hyperbolic norm {hyp})")
    floor = -lat.max_minimal_norm
    total, d = 0, 1
    while d * d * hyp >= floor:
        total += int(psi_coefficient(psi, d * d * n, tuple(d * x for x in dual)))
        d += 1
    return total


def _log_factor(psi: FourierSeries, m: int, qlimit: Fraction) -> FourierSeries:
    """``xi^m``-coefficient ``L_m`` of ``log prod_{m' > 0} prod_{n, l} (1 - q^n zeta^l xi^{m'})^{f(n m', l)}``."""
    lat = psi.lattice
    parts = []
    for k in divisors(m):
        mk = m // k
        # f(n m/k, l) for n >= 0 with n k < qlimit
        n = 0
        while n * k < qlimit:
            big = n * mk
            if big >= psi.qprec:
                raise PrecisionError(f"Borcherds expansion needs f({big}, *) but Psi is known below q^{psi.qprec}")
            rows = np.flatnonzero(psi.exps[:, 0] == QDEN * big)
            if len(rows):
                e = np.column_stack([np.full(len(rows), QDEN * n * k, dtype=np.int64),
                                     k * psi.exps[rows, 1:]])
                c = psi.coeffs[rows].astype(object) * Fraction(-1, k)
                parts.append((e, c))
            n += 1
    if not parts:
        return FourierSeries.zero(lat, qlimit, weight=0)
    exps = np.vstack([p[0] for p in parts])
    coeffs = np.concatenate([p[1] for p in parts])
    return FourierSeries(lat, exps, coeffs, qlimit, weight=0, index_form=tuple(
        tuple(m * x for x in row) for row in lat.gram))


def borcherds_expand(psi: FourierSeries, M: int, qprec, *, data: BorcherdsData | None = None,
                     leading: FourierSeries | None = None) -> FJExpansion:
    """Fourier-Jacobi coefficients of ``Borch(psi)`` at ``xi^C, ..., xi^{C+M}`` known below ``qprec``.

    Uses ``Borch = Theta_{f(0,*)} xi^C exp(sum_{m >= 1} L_m xi^m)``.
    """
    qprec = Fraction(qprec)
    data = data or borcherds_data(psi)
    if data.C.denominator != 1:
        raise ValueError(f"C = {data.C} is not integral")
    if leading is None:
        leading = build_block(data.leading_block, qprec)
    elif leading.qprec < qprec:
        raise PrecisionError("leading block is not known to the requested precision")
    leading = leading.truncate(qprec)
    inner = qprec - data.A  # the leading block has q-order A
    logs = [None] + [_log_factor(psi, m, inner) for m in range(1, M + 1)]
    exps = [FourierSeries.one(psi.lattice, inner)]
    for j in range(1, M + 1):
        acc = FourierSeries.zero(psi.lattice, inner)
        for i in range(1, j + 1):
            acc = acc + mul(logs[i], exps[j - i]).scale(i).truncate(inner)
        exps.append(acc.scale(Fraction(1, j)).truncate(inner))
    coeffs = []
    for j, e in enumerate(exps):
        c = mul(leading, e).truncate(qprec)
        t = data.C + j
        c = c.with_meta(weight=leading.weight, index_form=tuple(tuple(t * x for x in row) for row in psi.lattice.gram))
        coeffs.append(c)
    return FJExpansion(psi.lattice, leading.weight, coeffs, M, offset=int(data.C),
                       meta={"A": str(data.A), "B": [str(x) for x in data.B.coords],
                             "C": str(data.C), "D": data.sign_datum_D})


def compare_fj(a: FJExpansion, b: FJExpansion, orders: Sequence[int], sign: int = 1) -> dict[int, bool]:
    """Coefficientwise comparison ``a_m == sign * b_m`` on the common known range."""
    out = {}
    for m in orders:
        x, y = a.at(m), b.at(m)
        p = min(x.qprec, y.qprec)
        out[m] = x.truncate(p).agrees_with(y.truncate(p).scale(sign))
    return out
