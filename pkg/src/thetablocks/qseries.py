"""Sparse exact Fourier series in ``q`` and the lattice variables ``zeta``.

Exponents are stored as an integer array with one row per term:
column 0 is ``24 * qexp`` and the remaining columns are the dual coordinates
``(l, alpha_i)`` of the zeta-exponent, scaled by ``zden`` (1, or 2 while a
product still carries the half-integral exponents of odd theta factors).
Rows are kept sorted lexicographically and unique, coefficients nonzero.

Coefficients are exact: ``int64`` while provably no overflow can occur,
otherwise numpy object arrays of Python ints / Fractions.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import cached_property
from typing import Iterator, Sequence

import numpy as np

from .lattice import RANK0, GramLattice, load_lattice, named_lattice

__all__ = [
    "FourierSeries", "PrecisionError", "QDEN", "A1", "mul", "pow_int",
    "eta", "eta_power", "theta_odd", "specialize",
]

QDEN = 24
_INT_LIMIT = 2**62
_CHUNK = 3_000_000

A1 = named_lattice("A1")


class PrecisionError(ArithmeticError):
    """A coefficient outside the known (truncated) range was required."""


def _frac_json(x) -> list[int]:
    x = Fraction(x)
    return [x.numerator, x.denominator]


def _as_object(c: np.ndarray) -> np.ndarray:
    return c if c.dtype == object else c.astype(object)


def _maxabs(c: np.ndarray):
    if len(c) == 0:
        return 0
    if c.dtype == object:
        return max(abs(x) for x in c)
    return int(np.abs(c).max())


def _tighten(c: np.ndarray) -> np.ndarray:
    """Return an int64 array when every object coefficient is a small integer."""
    if c.dtype != object or len(c) == 0:
        return c
    vals = []
    for x in c:
        if isinstance(x, Fraction):
            if x.denominator != 1:
                return c
            x = x.numerator
        if abs(x) >= _INT_LIMIT:
            return c
        vals.append(int(x))
    return np.array(vals, dtype=np.int64)


def _combine(exps: np.ndarray, coeffs: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Sort rows, merge duplicates by summing, drop zeros."""
    if len(exps) == 0:
        return exps, coeffs
    lo = exps.min(axis=0)
    span = exps.max(axis=0) - lo + 1
    if math.prod(int(s) for s in span) < 2**62:
        strides = np.ones(len(span), dtype=np.int64)
        for i in range(len(span) - 2, -1, -1):
            strides[i] = strides[i + 1] * span[i + 1]
        key = (exps - lo) @ strides
        order = np.argsort(key, kind="stable")
        key = key[order]
        new = np.empty(len(key), dtype=bool)
        new[0] = True
        np.not_equal(key[1:], key[:-1], out=new[1:])
    else:
        order = np.lexsort(exps.T[::-1])
        srt = exps[order]
        new = np.empty(len(srt), dtype=bool)
        new[0] = True
        np.any(srt[1:] != srt[:-1], axis=1, out=new[1:])
    starts = np.flatnonzero(new)
    exps = exps[order][starts]
    coeffs = np.add.reduceat(coeffs[order], starts)
    keep = coeffs != 0
    if coeffs.dtype == object:
        keep = keep.astype(bool)
    return exps[keep], coeffs[keep]


class FourierSeries:
    """Truncated sparse series ``sum f(n, l) q^n zeta^l`` with exact coefficients.

    ``qprec`` is a hard bound: coefficients with ``n >= qprec`` are unknown.
    ``index_form`` is the symmetric matrix ``M`` (in basis coordinates) of the
    transformation law; the series has lattice index ``t`` when ``M = t G``.
    """

    __slots__ = ("lattice", "exps", "coeffs", "qprec", "zden", "weight", "index_form", "__dict__")

    def __init__(self, lattice: GramLattice, exps, coeffs, qprec, *, zden: int = 1,
                 weight=None, index_form=None, _canonical: bool = False):
        self.lattice = lattice
        r = lattice.rank
        exps = np.asarray(exps, dtype=np.int64).reshape(-1, r + 1)
        coeffs = np.asarray(coeffs)
        if coeffs.dtype != object and coeffs.dtype != np.int64:
            coeffs = coeffs.astype(object) if coeffs.dtype.kind not in "iu" else coeffs.astype(np.int64)
        self.qprec = Fraction(qprec)
        if not _canonical:
            qlim = math.ceil(QDEN * self.qprec)
            mask = exps[:, 0] < qlim
            exps, coeffs = _combine(exps[mask], coeffs[mask])
            coeffs = _tighten(coeffs)
        self.exps, self.coeffs = exps, coeffs
        self.zden = zden
        self.weight = None if weight is None else Fraction(weight)
        if index_form is None:
            index_form = tuple(tuple(Fraction(0) for _ in range(r)) for _ in range(r))
        self.index_form = tuple(tuple(Fraction(x) for x in row) for row in index_form)
        self._normalize_zden()

    def _normalize_zden(self):
        if self.zden == 2 and (len(self.exps) == 0 or not (self.exps[:, 1:] % 2).any()):
            self.exps = self.exps.copy()
            self.exps[:, 1:] //= 2
            self.zden = 1

    # -- construction -------------------------------------------------------

    @classmethod
    def from_terms(cls, lattice: GramLattice, terms: dict, qprec, **meta) -> "FourierSeries":
        """``terms`` maps ``(qexp, dual_coords)`` to coefficients; dual coords may be half-integers."""
        r = lattice.rank
        zden = 1
        for _, l in terms:
            if any(Fraction(x).denominator != 1 for x in l):
                zden = 2
        rows, cs = [], []
        for (qe, l), c in terms.items():
            qe = Fraction(qe) * QDEN
            zl = [Fraction(x) * zden for x in l]
            if qe.denominator != 1 or any(x.denominator != 1 for x in zl):
                raise ValueError(f"exponent {(qe / QDEN, l)} not representable")
            rows.append([int(qe)] + [int(x) for x in zl])
            cs.append(c)
        exps = np.array(rows, dtype=np.int64).reshape(-1, r + 1)
        coeffs = np.array(cs + [0], dtype=object)[:-1]
        return cls(lattice, exps, coeffs, qprec, zden=zden, **meta)

    @classmethod
    def zero(cls, lattice: GramLattice, qprec, **meta) -> "FourierSeries":
        return cls(lattice, np.zeros((0, lattice.rank + 1), dtype=np.int64),
                   np.zeros(0, dtype=np.int64), qprec, _canonical=True, **meta)

    @classmethod
    def one(cls, lattice: GramLattice = RANK0, qprec=math.inf) -> "FourierSeries":
        qprec = Fraction(10**9) if qprec == math.inf else qprec
        return cls(lattice, np.zeros((1, lattice.rank + 1), dtype=np.int64),
                   np.ones(1, dtype=np.int64), qprec, weight=0)

    def _replace(self, exps, coeffs, qprec=None, *, canonical=True, **meta) -> "FourierSeries":
        kw = dict(zden=self.zden, weight=self.weight, index_form=self.index_form)
        kw.update(meta)
        return FourierSeries(self.lattice, exps, coeffs, self.qprec if qprec is None else qprec,
                             _canonical=canonical, **kw)

    # -- basic properties ---------------------------------------------------

    @property
    def rank(self) -> int:
        return self.lattice.rank

    def __len__(self):
        return len(self.coeffs)

    def is_zero(self) -> bool:
        return len(self.coeffs) == 0

    @property
    def qorder(self) -> Fraction | None:
        """Least stored q-exponent, ``None`` for the zero series."""
        if self.is_zero():
            return None
        return Fraction(int(self.exps[0, 0]), QDEN)

    @property
    def index(self) -> Fraction | None:
        """Scalar lattice index ``t`` with ``index_form = t * G`` (``None`` if not proportional)."""
        if self.rank == 0:
            return Fraction(0)
        g = self.lattice.gram
        t = self.index_form[0][0] / g[0][0]
        r = range(self.rank)
        if all(self.index_form[i][j] == t * g[i][j] for i in r for j in r):
            return t
        return None

    def terms(self) -> Iterator[tuple[Fraction, tuple[Fraction, ...], object]]:
        for row, c in zip(self.exps.tolist(), self.coeffs.tolist()):
            yield (Fraction(row[0], QDEN), tuple(Fraction(x, self.zden) for x in row[1:]), c)

    @cached_property
    def _lookup(self) -> dict:
        return {tuple(row): c for row, c in zip(self.exps.tolist(), self.coeffs.tolist())}

    def coeff(self, qexp, dual: Sequence = ()):
        """Coefficient of ``q^qexp zeta^dual``; raises ``PrecisionError`` beyond ``qprec``."""
        qexp = Fraction(qexp)
        if qexp >= self.qprec:
            raise PrecisionError(f"q^{qexp} is beyond qprec {self.qprec}")
        q24 = qexp * QDEN
        zl = [Fraction(x) * self.zden for x in dual]
        if q24.denominator != 1 or any(x.denominator != 1 for x in zl):
            return 0
        return self._lookup.get((int(q24), *map(int, zl)), 0)

    def q_slices(self) -> Iterator[tuple[Fraction, "FourierSeries"]]:
        if self.is_zero():
            return
        q = self.exps[:, 0]
        bounds = np.flatnonzero(np.diff(q)) + 1
        for sl in np.split(np.arange(len(q)), bounds):
            yield Fraction(int(q[sl[0]]), QDEN), self._replace(self.exps[sl], self.coeffs[sl])

    def q_exponents(self) -> list[Fraction]:
        return [Fraction(int(x), QDEN) for x in np.unique(self.exps[:, 0])]

    def hyperbolic_norms(self) -> list[Fraction]:
        """``2 t n - (l, l)`` for every stored term (``t`` the scalar index)."""
        t = self.index
        if t is None:
            raise ValueError("series has no scalar lattice index")
        out = []
        for qe, l, _ in self.terms():
            out.append(2 * t * qe - self.lattice.norm(l))
        return out

    # -- arithmetic ---------------------------------------------------------

    def _check_compatible(self, other: "FourierSeries"):
        if self.rank and other.rank and self.lattice.gram != other.lattice.gram:
            raise ValueError(f"lattice mismatch: {self.lattice} vs {other.lattice}")

    def _lift(self, lattice: GramLattice, zden: int) -> tuple[np.ndarray, np.ndarray]:
        exps = self.exps
        if self.rank == 0 and lattice.rank:
            exps = np.hstack([exps, np.zeros((len(exps), lattice.rank), dtype=np.int64)])
        if zden != self.zden:
            exps = exps.copy()
            exps[:, 1:] *= zden // self.zden
        return exps, self.coeffs

    def _target(self, other: "FourierSeries") -> GramLattice:
        self._check_compatible(other)
        return self.lattice if self.rank else other.lattice

    def _index_of(self, lattice: GramLattice):
        if self.rank == 0:
            return tuple(tuple(Fraction(0) for _ in range(lattice.rank)) for _ in range(lattice.rank))
        return self.index_form

    def __add__(self, other: "FourierSeries") -> "FourierSeries":
        if not isinstance(other, FourierSeries):
            return NotImplemented
        lat = self._target(other)
        zden = max(self.zden, other.zden)
        ea, ca = self._lift(lat, zden)
        eb, cb = other._lift(lat, zden)
        if ca.dtype != cb.dtype or (ca.dtype == np.int64 and max(_maxabs(ca), _maxabs(cb)) >= 2**61):
            ca, cb = _as_object(ca), _as_object(cb)
        weight = self.weight if self.weight == other.weight else None
        if self.is_zero():
            index_form = other._index_of(lat)
        elif other.is_zero():
            index_form = self._index_of(lat)
        else:
            index_form = self._index_of(lat)
            if index_form != other._index_of(lat):
                raise ValueError("cannot add series of different index")
        return FourierSeries(lat, np.vstack([ea, eb]), np.concatenate([ca, cb]),
                             min(self.qprec, other.qprec), zden=zden, weight=weight, index_form=index_form)

    def __neg__(self) -> "FourierSeries":
        return self._replace(self.exps, -self.coeffs)

    def __sub__(self, other: "FourierSeries") -> "FourierSeries":
        return self + (-other)

    def scale(self, c) -> "FourierSeries":
        c = Fraction(c)
        if c == 0:
            return self._replace(self.exps[:0], self.coeffs[:0])
        if c.denominator == 1 and self.coeffs.dtype == np.int64 and _maxabs(self.coeffs) * abs(c) < _INT_LIMIT:
            return self._replace(self.exps, self.coeffs * int(c))
        coeffs = _tighten(np.array([x * c for x in self.coeffs.tolist()] + [0], dtype=object)[:-1])
        return self._replace(self.exps, coeffs)

    def __rmul__(self, c):
        return self.scale(c)

    def __mul__(self, other):
        if not isinstance(other, FourierSeries):
            return self.scale(other)
        return mul(self, other)

    def __pow__(self, e: int) -> "FourierSeries":
        return pow_int(self, e)

    def truncate(self, qprec) -> "FourierSeries":
        qprec = min(Fraction(qprec), self.qprec)
        mask = self.exps[:, 0] < math.ceil(QDEN * qprec)
        return self._replace(self.exps[mask], self.coeffs[mask], qprec)

    def with_meta(self, **meta) -> "FourierSeries":
        return self._replace(self.exps, self.coeffs, **meta)

    def agrees_with(self, other: "FourierSeries") -> bool:
        """Exact coefficientwise equality on the common known q-range."""
        return self.difference_terms(other, limit=1) == []

    def difference_terms(self, other: "FourierSeries", limit: int | None = None) -> list:
        prec = min(self.qprec, other.qprec)
        diff = self.truncate(prec) - other.truncate(prec)
        out = []
        for t in diff.terms():
            out.append(t)
            if limit is not None and len(out) >= limit:
                break
        return out

    # -- serialization ------------------------------------------------------

    def to_json(self) -> dict:
        t = self.index
        doc = {
            "lattice": self.lattice.to_json() if self.rank else [],
            "index": None if t is None else _frac_json(t),
            "weight": None if self.weight is None else _frac_json(self.weight),
            "qprec": _frac_json(self.qprec),
            "terms": [
                {"q": _frac_json(qe), "l": [_frac_json(x) for x in l], "c": _frac_json(c)}
                for qe, l, c in self.terms()
            ],
        }
        if t is None:
            doc["index_form"] = [[_frac_json(x) for x in row] for row in self.index_form]
        return doc

    @classmethod
    def from_json(cls, doc: dict) -> "FourierSeries":
        lat = load_lattice(doc["lattice"]) if doc["lattice"] else RANK0
        terms = {
            (Fraction(*t["q"]), tuple(Fraction(*x) for x in t["l"])): Fraction(*t["c"]) for t in doc["terms"]
        }
        if doc.get("index_form") is not None:
            index_form = [[Fraction(*x) for x in row] for row in doc["index_form"]]
        else:
            t = Fraction(*doc["index"]) if doc.get("index") else Fraction(0)
            index_form = [[t * x for x in row] for row in lat.gram]
        weight = Fraction(*doc["weight"]) if doc.get("weight") else None
        return cls.from_terms(lat, terms, Fraction(*doc["qprec"]), weight=weight, index_form=index_form)

    def __repr__(self):
        return (f"FourierSeries({self.lattice!r}, terms={len(self)}, qprec={self.qprec}, "
                f"weight={self.weight}, index={self.index})")


def _add_forms(a, b):
    return tuple(tuple(x + y for x, y in zip(ra, rb)) for ra, rb in zip(a, b))


def _lowest(s: FourierSeries) -> Fraction:
    # lowest exponent that may be nonzero; for a zero series that is its precision
    return s.qorder if not s.is_zero() else s.qprec


def mul(a: FourierSeries, b: FourierSeries) -> FourierSeries:
    lat = a._target(b)
    weight = None if a.weight is None or b.weight is None else a.weight + b.weight
    index_form = _add_forms(a._index_of(lat), b._index_of(lat))
    zden = max(a.zden, b.zden)
    prec = min(a.qprec + _lowest(b), b.qprec + _lowest(a))
    if a.is_zero() or b.is_zero():
        return FourierSeries.zero(lat, prec, weight=weight, index_form=index_form)
    qlim = math.ceil(QDEN * prec)
    if len(a) < len(b):
        a, b = b, a
    ea, ca = a._lift(lat, zden)
    eb, cb = b._lift(lat, zden)
    bound = _maxabs(ca) * _maxabs(cb) * min(len(ca), len(cb))
    if ca.dtype == object or cb.dtype == object or bound >= _INT_LIMIT:
        ca, cb = _as_object(ca), _as_object(cb)
    qa = ea[:, 0]
    parts_e, parts_c, pending = [], [], 0
    acc_e = np.zeros((0, lat.rank + 1), dtype=np.int64)
    acc_c = np.zeros(0, dtype=ca.dtype)
    for row, c in zip(eb, cb):
        stop = np.searchsorted(qa, qlim - row[0], side="left")
        if stop == 0:
            continue
        parts_e.append(ea[:stop] + row)
        parts_c.append(ca[:stop] * c)
        pending += stop
        if pending > _CHUNK:
            acc_e, acc_c = _combine(np.vstack([acc_e] + parts_e), np.concatenate([acc_c] + parts_c))
            parts_e, parts_c, pending = [], [], 0
    if parts_e:
        acc_e, acc_c = _combine(np.vstack([acc_e] + parts_e), np.concatenate([acc_c] + parts_c))
    return FourierSeries(lat, acc_e, _tighten(acc_c), prec, zden=zden, weight=weight,
                         index_form=index_form, _canonical=True)


def _invert(a: FourierSeries) -> FourierSeries:
    slices = iter(a.q_slices())
    try:
        q0, lead = next(slices)
    except StopIteration:
        raise ZeroDivisionError("cannot invert the zero series") from None
    if len(lead) != 1 or lead.exps[0, 1:].any():
        raise ValueError("leading q-slice is not a zeta-free monomial; no inverse as a Fourier series")
    c = Fraction(lead.coeffs[0])
    q24 = int(lead.exps[0, 0])
    # a = c q^s (1 + h)
    shifted = a._replace(a.exps - np.array([q24] + [0] * a.rank), a.coeffs, a.qprec - q0)
    unit = shifted.scale(1 / c)
    h = unit - FourierSeries.one(a.lattice, unit.qprec)
    neg_h = -h
    total = FourierSeries.one(a.lattice, unit.qprec)
    if not h.is_zero():
        power = FourierSeries.one(a.lattice, unit.qprec)
        kmax = math.ceil(unit.qprec / h.qorder)
        for _ in range(kmax):
            power = mul(power, neg_h).truncate(unit.qprec)
            if power.is_zero():
                break
            total = total + power
    inv = total.scale(1 / c)
    exps = inv.exps + np.array([-q24] + [0] * a.rank)
    weight = None if a.weight is None else -a.weight
    index_form = tuple(tuple(-x for x in row) for row in a.index_form)
    return FourierSeries(a.lattice, exps, inv.coeffs, unit.qprec - q0, zden=a.zden, weight=weight,
                         index_form=index_form, _canonical=True)


def pow_int(a: FourierSeries, e: int) -> FourierSeries:
    if e < 0:
        return pow_int(_invert(a), -e)
    result = FourierSeries.one(a.lattice, a.qprec + 10**6)
    base = a
    while e:
        if e & 1:
            result = mul(result, base)
        e >>= 1
        if e:
            base = mul(base, base)
    return result


def _pentagonal_eta(qprec: Fraction) -> dict[int, int]:
    """Coefficients of prod (1 - q^n) indexed by n, for n + 1/24 < qprec."""
    out: dict[int, int] = {}
    k = 0
    while True:
        hits = [kk for kk in {k, -k} if Fraction(kk * (3 * kk - 1) // 2) + Fraction(1, 24) < qprec]
        for kk in hits:
            out[kk * (3 * kk - 1) // 2] = -1 if kk % 2 else 1
        if not hits and k > 0:
            return out
        k += 1


def eta(qprec) -> FourierSeries:
    """Dedekind eta ``q^{1/24} prod (1 - q^n)`` truncated below ``qprec``."""
    qprec = Fraction(qprec)
    coeffs = _pentagonal_eta(qprec)
    ns = sorted(coeffs)
    exps = np.array([[QDEN * n + 1] for n in ns], dtype=np.int64).reshape(-1, 1)
    return FourierSeries(RANK0, exps, np.array([coeffs[n] for n in ns], dtype=np.int64),
                         qprec, weight=Fraction(1, 2))


def eta_power(e: int, qprec) -> FourierSeries:
    """``eta^e`` known below ``qprec`` (negative ``e`` allowed)."""
    qprec = Fraction(qprec)
    step = Fraction(1, QDEN)
    if e == 0:
        return FourierSeries.one(RANK0, qprec)
    if qprec <= Fraction(e, QDEN):
        return FourierSeries.zero(RANK0, qprec)  # nothing below the leading term
    if e > 0:
        return pow_int(eta(qprec - (e - 1) * step), e).truncate(qprec)
    # eta^{-1} loses 2/24 of precision, each further factor of order -1/24 one more
    return pow_int(eta(qprec + (-e + 1) * step), e).truncate(qprec)


def theta_odd(lattice: GramLattice, dual: Sequence[int], qprec) -> FourierSeries:
    """Odd Jacobi theta ``theta(tau, (l, z))`` for the dual vector with coordinates ``dual``.

    Uses the series ``sum_n (-1)^n q^{(2n+1)^2/8} zeta^{(2n+1) l / 2}``.
    """
    qprec = Fraction(qprec)
    dual = tuple(int(x) for x in dual)
    if len(dual) != lattice.rank:
        raise ValueError("argument length does not match lattice rank")
    index_form = tuple(tuple(Fraction(a * b) for b in dual) for a in dual)
    if not any(dual):
        return FourierSeries.zero(lattice, qprec, weight=Fraction(1, 2), index_form=index_form)
    rows, cs = [], []
    n = 0
    while Fraction((2 * n + 1) ** 2, 8) < qprec:
        for m in {n, -n - 1}:
            k = 2 * m + 1
            rows.append([3 * k * k] + [k * x for x in dual])
            cs.append(-1 if m % 2 else 1)
        n += 1
    return FourierSeries(lattice, np.array(rows, dtype=np.int64).reshape(-1, lattice.rank + 1),
                         np.array(cs, dtype=np.int64), qprec, zden=2, weight=Fraction(1, 2),
                         index_form=index_form)


def specialize(s: FourierSeries, v: Sequence[int]) -> FourierSeries:
    """Restrict ``z = z * sum v_i alpha_i`` (``v`` integral) to a one-variable series on ``A1``."""
    v = np.array([int(x) for x in v], dtype=np.int64)
    if len(v) != s.rank:
        raise ValueError("vector length does not match lattice rank")
    exps = np.column_stack([s.exps[:, 0], s.exps[:, 1:] @ v])
    vv = sum(s.index_form[i][j] * int(v[i]) * int(v[j]) for i in range(s.rank) for j in range(s.rank))
    return FourierSeries(A1, exps, s.coeffs, s.qprec, zden=s.zden, weight=s.weight,
                         index_form=((Fraction(vv),),))
