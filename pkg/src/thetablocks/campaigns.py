"""Verification campaigns: each one runs a family of exact checks and returns a report."""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

from . import reference
from .blocks import (
    N_wt2,
    N_wt3,
    build_block,
    build_corollary_blocks,
    build_family_wt2,
    build_family_wt3,
    family_spec,
    holomorphy_check,
    lattice_block,
    parse_block,
    riemann_theta_relation_check,
    wt2_vector,
    wt3_vector,
)
from .lattice import check_embedding, named_lattice
from .lifts import borcherds_data, borcherds_expand, compare_fj, divisor_multiplicity, grit, quotient_psi
from .hecke import apply_T_minus
from .qseries import PrecisionError, mul, specialize
from .weil import od_class_invariance, orbit_invariance_report, reconstruct, theta_decompose

__all__ = ["Check", "VerifyReport", "CAMPAIGNS", "run_campaign", "DEFAULTS"]


@dataclass
class Check:
    description: str
    anchor: str
    status: str  # pass / fail / skipped
    detail: str = ""

    def to_json(self) -> dict:
        return {"description": self.description, "anchor": self.anchor, "status": self.status, "detail": self.detail}


@dataclass
class VerifyReport:
    campaign: str
    qprec: Fraction
    fj_order: int | None
    grid_bound: int | None
    checks: list[Check] = field(default_factory=list)
    wall_time: float = 0.0  # console only: kept out of the JSON so reports are reproducible

    def add(self, description: str, anchor: str, ok: bool, detail: str = "") -> bool:
        self.checks.append(Check(description, anchor, "pass" if ok else "fail", detail))
        return ok

    def attempt(self, description: str, anchor: str, fn: Callable[[], bool | tuple[bool, str]]):
        try:
            out = fn()
        except PrecisionError as exc:
            self.checks.append(Check(description, anchor, "skipped", f"precision exhausted: {exc}"))
            return None
        ok, detail = out if isinstance(out, tuple) else (out, "")
        return self.add(description, anchor, bool(ok), detail)

    @property
    def status(self) -> str:
        states = {c.status for c in self.checks}
        if "fail" in states:
            return "fail"
        if "skipped" in states:
            return "skipped"
        return "pass"

    @property
    def exit_code(self) -> int:
        return {"pass": 0, "fail": 1, "skipped": 3}[self.status]

    def to_json(self) -> dict:
        return {
            "campaign": self.campaign,
            "qprec": str(self.qprec),
            "fj_order": self.fj_order,
            "grid_bound": self.grid_bound,
            "status": self.status,
            "checks": [c.to_json() for c in self.checks],
        }


DEFAULTS = {"qprec": Fraction(8), "fj_order": 2, "grid_bound": 2, "grit_borch_qprec": Fraction(4)}


# -- lattice data -------------------------------------------------------------------

def _vectors(rep: VerifyReport, name: str):
    lat = named_lattice(name)
    pub = reference.PUBLISHED_LATTICE_DATA[name]
    rep.add(f"det({name}) = {pub['determinant']}", f"{name} lattice data", lat.determinant == pub["determinant"],
            str(lat.determinant))
    rep.add(f"level({name}) = {pub['level']}", f"{name} lattice data", lat.level == pub["level"], str(lat.level))
    for (norm, order), vecs in reference.REFLECTIVE_TYPES[name].items():
        found = {v.int_dual() for v in lat.enumerate_dual_by_norm_order(norm, order)}
        expected = {tuple(v) for v in vecs} | {tuple(-x for x in v) for v in vecs}
        rep.add(f"{name} vectors of norm {norm}, order {order}", f"{name} reflective vector list",
                found == expected, f"{len(found) // 2} up to sign")
    if name == "L4":
        census = lat.census_table()
        for key, count in reference.PUBLISHED_CENSUS_L4.items():
            got = census.get(key, 0)
            rep.add(f"D(L4) classes of norm {key[0]} mod 2, order {key[1]}: {count}", "L4 discriminant census",
                    got == count, f"counted {got}")
    target, bases = reference.EMBEDDINGS[name]
    for i, basis in enumerate(bases, 1):
        rep.add(f"embedding {i} of {name} into {target}", f"{name} overlattice bases",
                check_embedding(named_lattice(target).gram, basis, lat))


# -- one-variable identities -------------------------------------------------------------

def _display_identity(rep: VerifyReport, data, weight: int, index: int, anchor: str):
    params, lhs, first, second = data
    q = rep.qprec
    a, b, c = (build_block(parse_block(s), q) for s in (lhs, first, second))
    rep.add(f"{lhs} has index {index}", anchor, a.index == index, str(a.index))
    rep.add(f"N{tuple(params)} = {index}", anchor, (N_wt2 if weight == 2 else N_wt3)(params) == index)
    rep.add(f"{lhs} = {first} - {second} below q^{q}", anchor, a.agrees_with(b - c))
    family = (build_family_wt2 if weight == 2 else build_family_wt3)(params, q)
    rep.add(f"left side is the family member at {tuple(params)}", anchor, a.agrees_with(family))
    cor = build_corollary_blocks(params, 1, q) - build_corollary_blocks(params, 2, q)
    rep.add(f"family member splits as the corollary difference at {tuple(params)}", anchor, family.agrees_with(cor))


def _rtr_tuples(bound: int) -> list[tuple[int, ...]]:
    out = []
    rng = range(-bound, bound + 1)
    for x in itertools.product(rng, repeat=4):
        if sum(x) % 2 or not all(x) or x[0] < 0:
            continue
        out.append(x)
    return out


def _rtr(rep: VerifyReport):
    tuples = _rtr_tuples(max(rep.grid_bound or 2, 2))
    nontrivial = 0
    for x in tuples:
        ok = riemann_theta_relation_check(x, rep.qprec)
        nontrivial += 1
        rep.add(f"Riemann theta relation at x = {x}", "Riemann theta relation", ok)
    rep.add("at least 20 admissible tuples checked", "Riemann theta relation", nontrivial >= 20, str(nontrivial))


def _grid(dim: int, bound: int):
    return itertools.product(range(-bound, bound + 1), repeat=dim)


def _family(rep: VerifyReport, weight: int):
    bound = rep.grid_bound if rep.grid_bound is not None else DEFAULTS["grid_bound"]
    dim = 4 if weight == 2 else 6
    N = N_wt2 if weight == 2 else N_wt3
    vec = wt2_vector if weight == 2 else wt3_vector
    lat = named_lattice("L4" if weight == 2 else "L6")
    bad_index, bad_weight, bad_order, bad_lattice, nonzero = [], [], [], [], 0
    for p in _grid(dim, bound):
        spec = family_spec(weight, p)
        if spec.normalized()[1].is_zero:
            continue
        nonzero += 1
        if spec.index != N(p):
            bad_index.append(p)
        v = vec(p)
        if Fraction(sum(v[i] * lat.gram[i][j] * v[j] for i in range(dim) for j in range(dim)), 2) != N(p):
            bad_lattice.append(p)
        if spec.weight != weight:
            bad_weight.append(p)
        if spec.q_order != 1:
            bad_order.append(p)
    anchor = f"weight-{weight} family"
    rep.add(f"EZ index equals N for all nonzero blocks in [-{bound},{bound}]^{dim}", anchor, not bad_index,
            f"{nonzero} blocks; mismatches {bad_index[:5]}")
    rep.add("index of the lattice specialization equals N", anchor, not bad_lattice, str(bad_lattice[:5]))
    rep.add(f"weight {weight}", anchor, not bad_weight, str(bad_weight[:5]))
    rep.add("q-order 1", anchor, not bad_order, str(bad_order[:5]))
    # expansions: direct product against the specialized lattice block, on the unit cube
    q = min(rep.qprec, Fraction(6))
    base = lattice_block("thetaL4" if weight == 2 else "thetaL6", q)
    sign = 1 if weight == 2 else -1
    mism, holo_bad, order_bad, count = [], [], [], 0
    for p in _grid(dim, 1):
        spec = family_spec(weight, p)
        if spec.normalized()[1].is_zero:
            continue
        count += 1
        direct = build_block(spec, q)
        if not direct.agrees_with(specialize(base, vec(p)).scale(sign)):
            mism.append(p)
        if not holomorphy_check(direct):
            holo_bad.append(p)
        if direct.qorder != 1:
            order_bad.append(p)
    rep.add(f"direct expansion equals the lattice specialization below q^{q} on [-1,1]^{dim}", anchor, not mism,
            f"{count} blocks; mismatches {mism[:5]}")
    rep.add("expansions are holomorphic on the computed range", anchor, not holo_bad, str(holo_bad[:5]))
    rep.add("expansions vanish to q-order exactly 1", anchor, not order_bad, str(order_bad[:5]))


def _corollary(rep: VerifyReport, weight: int):
    bound = max(rep.grid_bound if rep.grid_bound is not None else DEFAULTS["grid_bound"], 1)
    dim = 4 if weight == 2 else 6
    build = build_family_wt2 if weight == 2 else build_family_wt3
    count = 0
    params = [reference.IDENTITY_67[0] if weight == 2 else reference.IDENTITY_49[0]]
    params += [p for p in itertools.product(range(1, bound + 1), repeat=dim) if p not in params]
    for p in params:
        lhs = build(p, rep.qprec)
        rhs = build_corollary_blocks(p, 1, rep.qprec) - build_corollary_blocks(p, 2, rep.qprec)
        count += 1
        rep.add(f"phi = phi1 - phi2 at {p}", f"weight-{weight} corollary", lhs.agrees_with(rhs))
    rep.add("at least 10 parameter tuples", f"weight-{weight} corollary", count >= 10, str(count))


# -- lattice blocks ----------------------------------------------------------------------------

def _basis(rep: VerifyReport, name: str):
    q = rep.qprec
    th, th1, th2 = (lattice_block(f"theta{name}{s}", q) for s in ("", "_1", "_2"))
    anchor = f"{name} basis identity"
    rep.add(f"Theta_{name} = Theta_{name}^(1) - Theta_{name}^(2) below q^{q}", anchor, th.agrees_with(th1 - th2))
    for label, s in (("", th), ("^(1)", th1), ("^(2)", th2)):
        rep.add(f"Theta_{name}{label} has weight {s.weight}, lattice index 1", anchor, s.index == 1)
        rep.add(f"Theta_{name}{label} holomorphic on the computed range", anchor, holomorphy_check(s))
        rep.add(f"Theta_{name}{label} orbit invariant", "orbit invariance", orbit_invariance_report(s).passed)
    small = min(q, Fraction(3))
    s_small = th.truncate(small)
    rep.add(f"theta decomposition of Theta_{name} round-trips below q^{small}", "theta decomposition",
            reconstruct(theta_decompose(s_small)).agrees_with(s_small))
    od = od_class_invariance(s_small)
    rep.add(f"Theta_{name} class-level O(D) invariance (absolute values)", "O(D) invariance up to a character",
            od.passed, f"{len(od.classes)} classes")
    od1 = od_class_invariance(th1.truncate(small))
    rep.add(f"Theta_{name}^(1) alone is not class-level invariant", "O(D) invariance up to a character",
            not od1.passed, f"{len(od1.violations)} violations")


# -- Gritsenko lift against Borcherds product -----------------------------------------------------

def grit_borch_theta_precision(qprec: Fraction, M: int) -> Fraction:
    """Precision of Theta needed for FJ orders ``1..M+1`` below ``qprec`` on both sides."""
    qprec = Fraction(qprec)
    inner = qprec - 1
    top = -(-inner.numerator // inner.denominator) - 1  # largest n with n < inner
    psi_needed = top * M + 1  # Psi must be known below this
    return max((M + 1) * qprec, 2 * psi_needed + 2)


def _grit_borch(rep: VerifyReport, name: str):
    q, M = rep.qprec, rep.fj_order
    lat = named_lattice(name)
    theta = lattice_block(f"theta{name}", grit_borch_theta_precision(q, M))
    anchor = f"Borch(Psi_{name}) = Grit(Theta_{name})"
    psi = quotient_psi(theta)
    q0 = {tuple(l): c for qe, l, c in ((qe, tuple(int(x) for x in l), c) for qe, l, c in psi.terms()) if qe == 0}
    f00 = q0.pop((0,) * lat.rank, 0)
    rep.add(f"f(0,0) = {lat.rank}", anchor, f00 == lat.rank, str(f00))
    expected = set()
    for vecs in reference.REFLECTIVE_TYPES[name].values():
        expected |= {tuple(v) for v in vecs} | {tuple(-x for x in v) for v in vecs}
    rep.add("q^0 support of Psi is the reflective vector list, coefficient 1", anchor,
            set(q0) == expected and set(q0.values()) == {1}, f"{len(q0)} vectors")
    top = psi.qprec + 1
    residual = mul(psi, theta).truncate(top) + apply_T_minus(theta, 2, theta.weight).truncate(top)
    rep.add(f"Psi * Theta + Theta|T_-(2) = 0 below q^{top}", anchor, residual.is_zero())
    data = borcherds_data(psi)
    rep.add("A = 1", anchor, data.A == 1, str(data.A))
    rep.add("C = 1", anchor, data.C == 1, str(data.C))
    rep.add("A equals the q-order of the leading block", anchor, data.leading_block.q_order == data.A)
    leading = build_block(data.leading_block, q)
    sign = 1 if leading.agrees_with(theta.truncate(q)) else -1 if leading.agrees_with(-theta.truncate(q)) else 0
    rep.add("leading block equals Theta up to a global sign", anchor, sign != 0, f"sign {sign}")
    (type_a,) = reference.REFLECTIVE_TYPES[name][(Fraction(1), 2)][:1]
    rep.attempt("multiplicity of the order-2 reflective divisor is 1", anchor,
                lambda: (divisor_multiplicity(psi, 0, type_a) == 1, ""))
    g = grit(theta, M + 1, q)
    b = borcherds_expand(psi, M, q, data=data, leading=leading)
    cmp = compare_fj(g, b, range(int(data.C), int(data.C) + M + 1), sign or 1)
    for m, ok in cmp.items():
        rep.add(f"FJ coefficient at xi^{m} agrees below q^{q}", anchor, ok)


CAMPAIGNS: dict[str, Callable[[VerifyReport], None]] = {
    "rtr": _rtr,
    "identity67": lambda r: _display_identity(r, reference.IDENTITY_67, 2, 67, "index-67 identity"),
    "identity49": lambda r: _display_identity(r, reference.IDENTITY_49, 3, 49, "index-49 identity"),
    "basis-L4": lambda r: _basis(r, "L4"),
    "basis-L6": lambda r: _basis(r, "L6"),
    "vectors-L4": lambda r: _vectors(r, "L4"),
    "vectors-L6": lambda r: _vectors(r, "L6"),
    "family-wt2": lambda r: _family(r, 2),
    "family-wt3": lambda r: _family(r, 3),
    "grit-borch-L4": lambda r: _grit_borch(r, "L4"),
    "grit-borch-L6": lambda r: _grit_borch(r, "L6"),
    "corollary-wt2": lambda r: _corollary(r, 2),
    "corollary-wt3": lambda r: _corollary(r, 3),
}


def run_campaign(name: str, qprec=None, fj_order=None, grid_bound=None) -> VerifyReport:
    if name not in CAMPAIGNS:
        raise KeyError(f"unknown campaign {name!r}")
    if qprec is None:
        qprec = DEFAULTS["grit_borch_qprec"] if name.startswith("grit-borch") else DEFAULTS["qprec"]
    if name.startswith("grit-borch") and fj_order is None:
        fj_order = DEFAULTS["fj_order"]
    rep = VerifyReport(name, Fraction(qprec), fj_order, grid_bound)
    start = time.perf_counter()
    try:
        if rep.qprec <= 1 and not name.startswith("vectors"):
            # every block here starts at q^1: below that all comparisons are empty
            raise PrecisionError(f"qprec {rep.qprec} does not exceed the q-order 1 of the blocks")
        CAMPAIGNS[name](rep)
    except PrecisionError as exc:
        rep.checks.append(Check(f"{name} campaign", name, "skipped", f"precision exhausted: {exc}"))
    rep.wall_time = time.perf_counter() - start
    return rep
