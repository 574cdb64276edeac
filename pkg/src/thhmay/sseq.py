"""A multiplicative bigraded spectral-sequence runner.

Pages are free graded-commutative presentations placed at (degree, weight).
A page's differential is given on generators and extended by the Leibniz
rule; the next page is the homology, re-presented by named survivors whose
products are checked to form a basis of ker/im in every resolved bidegree.

Total degree always drops by one under d_r, so the only bidegrees whose
incoming differentials leave the window are those of degree N; they are
reported as unresolved.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Mapping, Sequence

from .algebra import (AlgebraElement, AlgebraPresentation, GeneratorSpec, Kind,
                      Monomial, PresentationError, StructureTable, gamma_name,
                      poincare_series)
from .fp import Echelon, InconsistentDifferential, axpy, sparse_kernel

Bidegree = tuple[int, int]  # (degree, weight)


class RuleError(ValueError):
    """A differential rule is malformed or lands in the wrong bidegree."""


class ReassemblyError(ValueError):
    """Proposed survivors do not present the homology."""


@dataclass(frozen=True)
class BidegreeConvention:
    """How d_r moves (degree, weight) and how that maps to chart (s, t).

    ``may``: s = degree, t = weight, d_r: (s, t) -> (s - 1, t + r).
    ``bokstedt``: s = Hochschild filtration (the weight), t = degree - s,
    d_r: (s, t) -> (s - r, t + r - 1).
    """
    name: str

    def shift(self, r: int) -> Bidegree:
        if self.name == "may":
            return (-1, r)
        if self.name == "bokstedt":
            return (-1, -r)
        raise ValueError(self.name)

    def page_of(self, source: Bidegree, target: Bidegree) -> int | None:
        """The r with target = source + shift(r), if any."""
        if target[0] != source[0] - 1:
            return None
        dw = target[1] - source[1]
        return dw if self.name == "may" else -dw

    def coords(self, b: Bidegree) -> tuple[int, int]:
        deg, wt = b
        return (deg, wt) if self.name == "may" else (wt, deg - wt)

    def st_shift(self, r: int) -> tuple[int, int]:
        return (-1, r) if self.name == "may" else (-r, r - 1)


MAY = BidegreeConvention("may")
BOKSTEDT = BidegreeConvention("bokstedt")


@dataclass(frozen=True)
class Rule:
    """d_r(source) = unit * target, with source a generator slot name."""
    source: str
    target: AlgebraElement
    unit: int = 1


@dataclass(frozen=True)
class DifferentialRuleFamily:
    r: int
    rules: tuple[Rule, ...]
    name: str = ""


@dataclass(frozen=True)
class ExtensionRule:
    """lower^power = upper among survivors."""
    lower: str
    upper: str
    power: int


@dataclass(frozen=True)
class Survivor:
    """A named class of the next page with a representative cycle.

    For divided-power survivors ``slot_reps`` gives representatives of the
    γ_{p^k} slots (keyed by k); slot 1 is ``rep``.
    """
    name: str
    rep: AlgebraElement
    kind: Kind | None = None
    height: int | None = None
    slot_reps: Mapping[int, AlgebraElement] | None = None


@dataclass(frozen=True)
class Obstruction:
    source: tuple[int, int]
    target: tuple[int, int]
    r: int
    generator: str


@dataclass
class SSPage:
    r: int
    pres: AlgebraPresentation
    convention: BidegreeConvention
    d: dict | None = None  # monomial -> sparse vector of monomials
    rule_family: DifferentialRuleFamily | None = None
    renaming: dict = field(default_factory=dict)  # generator -> name on previous page

    @property
    def cutoff(self) -> int:
        return self.pres.cutoff

    @property
    def p(self) -> int:
        return self.pres.p

    def bidegree(self, m: Monomial) -> Bidegree:
        return self.pres.degree(m), self.pres.weight(m)

    @cached_property
    def by_bidegree(self) -> dict[Bidegree, list[Monomial]]:
        out: dict[Bidegree, list[Monomial]] = {}
        for m in self.pres.basis():
            out.setdefault(self.bidegree(m), []).append(m)
        return out

    def basis_at(self, b: Bidegree) -> list[Monomial]:
        return self.by_bidegree.get(b, [])

    def dims(self) -> dict[Bidegree, int]:
        return {b: len(v) for b, v in self.by_bidegree.items()}

    def chart_dims(self) -> dict[tuple[int, int], int]:
        return {self.convention.coords(b): n for b, n in sorted(self.dims().items())}

    def degree_dims(self) -> list[int]:
        return list(poincare_series(self.pres))

    def differential(self, x: AlgebraElement) -> AlgebraElement:
        if self.d is None:
            return self.pres.element()
        out: dict = {}
        for m, c in x.terms.items():
            axpy(out, c, self.d[m], self.p)
        return self.pres.element(out)

    def generator_bidegrees(self) -> list[tuple[str, Bidegree]]:
        out = [(s.name, (s.degree, s.weight)) for s in self.pres.slots]
        if self.pres.table is not None:
            t = self.pres.table
            out += [(n, (d, w)) for n, d, w in t.classes]
        return out


def init_page(pres: AlgebraPresentation, convention: BidegreeConvention,
              N: int | None = None, r: int = 1) -> SSPage:
    if N is not None and N != pres.cutoff:
        pres = pres.with_cutoff(N)
    if not pres.is_connected():
        raise PresentationError("pages need a connected presentation")
    return SSPage(r, pres, convention)


def _slot_differentials(page: SSPage, family: DifferentialRuleFamily) -> dict[str, AlgebraElement]:
    pres = page.pres
    p = pres.p
    explicit = {}
    for rule in family.rules:
        if rule.source not in pres.slot_index:
            raise RuleError(f"rule source {rule.source} is not a generator of the page")
        if rule.target.alg != pres:
            raise RuleError(f"target of d({rule.source}) lives in another presentation")
        explicit[rule.source] = rule.target * (rule.unit % p)
    out = {}
    for s in pres.slots:
        if s.name in explicit:
            out[s.name] = explicit[s.name]
        elif s.power > 1 and s.source in explicit:
            # divided-power derivation: d γ_k(x) = γ_{k-1}(x) d(x)
            out[s.name] = pres.gamma(s.source, s.power - 1) * explicit[s.source]
        else:
            out[s.name] = pres.element()
    dd, dw = page.convention.shift(family.r)
    for s in pres.slots:
        for m in out[s.name].terms:
            if pres.degree(m) != s.degree + dd or pres.weight(m) != s.weight + dw:
                raise RuleError(
                    f"d_{family.r}({s.name}) has a term {pres.monomial_name(m)} in bidegree "
                    f"{(pres.degree(m), pres.weight(m))}, expected {(s.degree + dd, s.weight + dw)}")
    return out


def apply_rules(page: SSPage, family: DifferentialRuleFamily) -> SSPage:
    """Populate d_r from generator rules by the graded Leibniz rule; verify d∘d = 0."""
    if family.r != page.r:
        raise RuleError(f"rules are for d_{family.r} but the page is E_{page.r}")
    pres = page.pres
    if pres.table is not None:
        raise RuleError("differentials are only applied on free pages")
    p = pres.p
    slot_d = _slot_differentials(page, family)
    slot_d = {k: dict(v.terms) for k, v in slot_d.items()}
    d: dict[Monomial, dict] = {pres.one: {}}

    def mul(x: dict, y: dict) -> dict:
        out: dict = {}
        for a, c in x.items():
            for b, e in y.items():
                for k, m in pres.mul_monomials(a, b):
                    out[m] = (out.get(m, 0) + k * c * e) % p
        return {m: c for m, c in out.items() if c}

    def dmono(m: Monomial) -> dict:
        got = d.get(m)
        if got is not None:
            return got
        i = next(i for i, e in enumerate(m[1:]) if e)
        s = pres.slots[i]
        e = m[i + 1]
        head = [0] * len(m)
        head[i + 1] = e
        head = tuple(head)
        rest = list(m)
        rest[i + 1] = 0
        rest = tuple(rest)
        # d(s^e) = e s^{e-1} d(s)
        lower = list(head)
        lower[i + 1] = e - 1
        dhead = {k: (v * e) % p for k, v in mul({tuple(lower): 1}, slot_d[s.name]).items()}
        dhead = {k: v for k, v in dhead.items() if v}
        out = mul(dhead, {rest: 1})
        sign = -1 if (e * s.degree) % 2 else 1
        axpy(out, sign, mul({head: 1}, dmono(rest)), p)
        d[m] = out
        return out

    for m in pres.basis():
        dmono(m)
    result = SSPage(page.r, pres, page.convention, d, family, dict(page.renaming))
    check_d_squared(result)
    return result


def check_d_squared(page: SSPage) -> None:
    p = page.p
    for m, img in page.d.items():
        acc: dict = {}
        for x, c in img.items():
            axpy(acc, c, page.d.get(x, {}), p)
        if acc:
            raise InconsistentDifferential(
                f"d∘d is nonzero on {page.pres.monomial_name(m)}")


def check_leibniz(page: SSPage, max_degree: int | None = None) -> list[tuple[Monomial, Monomial]]:
    """Monomial pairs (a, b) violating d(ab) = d(a)b + (-1)^{|a|} a d(b)."""
    pres = page.pres
    N = pres.cutoff if max_degree is None else max_degree
    bad = []
    basis = [m for m in pres.basis() if pres.degree(m) <= N]
    for a in basis:
        for b in basis:
            if pres.degree(a) + pres.degree(b) > N:
                continue
            A, B = pres.element({a: 1}), pres.element({b: 1})
            lhs = page.differential(A * B)
            sign = -1 if pres.degree(a) % 2 else 1
            rhs = page.differential(A) * B + A * page.differential(B) * sign
            if lhs != rhs:
                bad.append((a, b))
    return bad


@dataclass
class Homology:
    """ker d_r / im d_r of a populated page, bidegree by bidegree."""
    page: SSPage
    reps: dict[Bidegree, list[dict]]
    boundaries: dict[Bidegree, Echelon]
    unresolved: set[Bidegree]

    def dims(self) -> dict[Bidegree, int]:
        return {b: len(v) for b, v in self.reps.items() if v}

    def degree_dims(self) -> list[int]:
        out = [0] * (self.page.cutoff + 1)
        for (deg, _), v in self.reps.items():
            out[deg] += len(v)
        return out

    def is_cycle(self, x: AlgebraElement) -> bool:
        return not self.page.differential(x)

    def classes(self, b: Bidegree) -> Echelon:
        """Echelon of boundaries plus labelled homology representatives."""
        ech = self.boundaries[b]
        out = Echelon(ech.p)
        out.rows = dict(ech.rows)
        for i, v in enumerate(self.reps.get(b, [])):
            out.add(v, i)
        return out


def turn_page(page: SSPage) -> Homology:
    pres = page.pres
    p = pres.p
    if page.d is None:
        page = SSPage(page.r, pres, page.convention, {m: {} for m in pres.basis()},
                      None, dict(page.renaming))
    dd, dw = page.convention.shift(page.r)
    reps: dict[Bidegree, list[dict]] = {}
    bounds: dict[Bidegree, Echelon] = {}
    unresolved = set()
    for b, monos in page.by_bidegree.items():
        deg, wt = b
        ech = Echelon(p)
        if deg + 1 > pres.cutoff:
            unresolved.add(b)
        else:
            for m in page.basis_at((deg - dd, wt - dw)):
                ech.add(page.d[m])
        bounds[b] = Echelon(p)
        bounds[b].rows = dict(ech.rows)
        images = [page.d[m] for m in monos]
        cycles = [{monos[j]: c for j, c in v.items()} for v in sparse_kernel(images, p)]
        for z in cycles:
            if ech.add(z):
                reps.setdefault(b, []).append(z)
    return Homology(page, reps, bounds, unresolved)


def _gamma_slot_names(name, pres_new):
    return [s for s in pres_new.slots if s.source == name]


def reassemble(hom: Homology, survivors: Sequence[Survivor],
               table: Mapping[str, AlgebraElement] | None = None,
               products: Mapping[tuple[str, str], Mapping[str, int]] | None = None) -> SSPage:
    """The next page presented by named survivors, verified against ``hom``.

    ``table`` names finitely many extra classes (with representatives) that
    carry the multiplication in ``products``; without ``products`` the table
    is derived from the representatives.
    """
    page = hom.page
    old = page.pres
    p = old.p
    gens = []
    reps: dict[str, AlgebraElement] = {}
    for s in survivors:
        if not s.rep.is_homogeneous():
            raise ReassemblyError(f"representative of {s.name} is not homogeneous")
        (deg, wt), = s.rep.bidegrees()
        kind = s.kind or (Kind.EXTERIOR if deg % 2 else Kind.POLYNOMIAL)
        gens.append(GeneratorSpec(s.name, deg, wt, kind, s.height))
        reps[s.name] = s.rep
    tab = None
    if table:
        classes = []
        for name, rep in table.items():
            (deg, wt), = rep.bidegrees()
            classes.append((name, deg, wt))
        if products is None:
            products = derive_products(hom, table)
        tab = StructureTable.build(classes, products)
    new = AlgebraPresentation(p, tuple(gens), old.cutoff, tab)
    for s in survivors:
        if s.kind is Kind.DIVIDED_POWER:
            for slot in _gamma_slot_names(s.name, new):
                if slot.power == 1:
                    continue
                k = slot.power
                if not s.slot_reps or k not in s.slot_reps:
                    raise ReassemblyError(f"no representative for {slot.name}")
                reps[slot.name] = s.slot_reps[k]
    cache: dict[Monomial, AlgebraElement] = {}
    tnames = tab.names if tab else ["1"]

    def evaluate(m: Monomial) -> AlgebraElement:
        got = cache.get(m)
        if got is not None:
            return got
        val = table[tnames[m[0]]] if m[0] else old.unit()
        for e, slot in zip(m[1:], new.slots):
            if e:
                val = val * reps[slot.name] ** e
        cache[m] = val
        return val

    by_b: dict[Bidegree, list[Monomial]] = {}
    for m in new.basis():
        by_b.setdefault((new.degree(m), new.weight(m)), []).append(m)
    for b in sorted(set(by_b) | set(hom.reps)):
        if b in hom.unresolved:
            continue
        monos = by_b.get(b, [])
        if len(monos) != len(hom.reps.get(b, [])):
            raise ReassemblyError(
                f"bidegree {b}: {len(monos)} survivor monomials vs homology dimension "
                f"{len(hom.reps.get(b, []))}")
        ech = Echelon(p)
        ech.rows = dict(hom.boundaries[b].rows)
        for m in monos:
            v = evaluate(m)
            if v and (not v.is_homogeneous() or v.bidegrees() != {b}):
                raise ReassemblyError(f"{new.monomial_name(m)} evaluates outside bidegree {b}")
            if not hom.is_cycle(v):
                raise ReassemblyError(f"{new.monomial_name(m)} does not evaluate to a cycle")
            if not ech.add(dict(v.terms)):
                raise ReassemblyError(
                    f"{new.monomial_name(m)} is dependent modulo boundaries in bidegree {b}")
    renaming = {s.name: old.element(s.rep.terms) for s in survivors}
    if table:
        renaming.update(table)
    return SSPage(page.r + 1, new, page.convention, None, None, renaming)


def derive_products(hom: Homology, table: Mapping[str, AlgebraElement]) -> dict:
    """Products among table classes, read off modulo boundaries.

    Each product must be a combination of table classes (or zero).
    """
    p = hom.page.p
    names = list(table)
    by_b: dict[Bidegree, list[str]] = {}
    for n in names:
        (b,) = table[n].bidegrees()
        by_b.setdefault(b, []).append(n)
    out = {}
    for a in names:
        for c in names:
            prod = table[a] * table[c]
            if not prod:
                continue
            (b,) = prod.bidegrees()
            if b[0] > hom.page.cutoff or b in hom.unresolved:
                continue  # outside the window
            ech = Echelon(p)
            ech.rows = dict(hom.boundaries[b].rows)
            for n in by_b.get(b, []):
                ech.add(dict(table[n].terms), n)
            rem, combo = ech.reduce(dict(prod.terms))
            if rem:
                raise ReassemblyError(f"{a}·{c} is not a combination of table classes")
            if combo:
                out[(a, c)] = dict(combo)
    return out


def auto_survivors(hom: Homology) -> list[Survivor]:
    """Indecomposable survivors with inferred kinds.

    Odd classes are exterior; an even class is truncated at the first
    power that vanishes modulo boundaries inside the window, and
    polynomial if no power does.
    """
    page = hom.page
    pres = page.pres
    p = pres.p
    chosen: list[Survivor] = []
    all_reps = {b: [pres.element(v) for v in vs] for b, vs in hom.reps.items()}
    for b in sorted(hom.reps, key=lambda b: (b[0], b[1])):
        if b in hom.unresolved or b[0] == 0:
            continue
        ech = Echelon(p)
        ech.rows = dict(hom.boundaries[b].rows)
        for s in chosen:
            (sb,) = s.rep.bidegrees()
            other = (b[0] - sb[0], b[1] - sb[1])
            for h in all_reps.get(other, []):
                ech.add(dict((s.rep * h).terms))
        for v in all_reps[b]:
            if ech.add(dict(v.terms)):
                name = pres.monomial_name(min(v.terms))
                kind, height = Kind.EXTERIOR, None
                if b[0] % 2 == 0:
                    kind, height = _power_height(hom, v)
                chosen.append(Survivor(name, v, kind, height))
    return chosen


def _power_height(hom, v):
    pres = hom.page.pres
    k = 1
    power = v
    while True:
        k += 1
        power = power * v
        if pres.degree(min(v.terms)) * k > pres.cutoff - 1:
            return Kind.POLYNOMIAL, None
        if not power:
            return Kind.TRUNCATED, k
        (b,) = power.bidegrees()
        if hom.boundaries[b].contains(dict(power.terms)):
            return Kind.TRUNCATED, k


def bidegree_obstruction_report(page: SSPage, N: int | None = None) -> list[Obstruction]:
    """Generator-level differentials d_r (r >= page r) not excluded by emptiness."""
    N = page.cutoff if N is None else N
    conv = page.convention
    occupied: dict[int, set[int]] = {}
    for (deg, wt) in page.by_bidegree:
        occupied.setdefault(deg, set()).add(wt)
    out = []
    for name, (deg, wt) in page.generator_bidegrees():
        if deg > N:
            continue
        for twt in sorted(occupied.get(deg - 1, ())):
            r = conv.page_of((deg, wt), (deg - 1, twt))
            if r is not None and r >= page.r:
                out.append(Obstruction(conv.coords((deg, wt)), conv.coords((deg - 1, twt)), r, name))
    return sorted(out, key=lambda o: (o.source, o.target, o.r, o.generator))


def apply_extensions(pres: AlgebraPresentation, exts: Sequence[ExtensionRule]) -> AlgebraPresentation:
    """Splice truncated towers joined by lower^power = upper into one generator."""
    gm = dict(pres.generator_map)
    absorbed = {}
    for e in exts:
        lo, up = gm.get(e.lower), gm.get(e.upper)
        if lo is None:
            raise PresentationError(f"unknown class {e.lower}")
        if up is None:
            if e.power * lo.degree <= pres.cutoff:
                raise PresentationError(f"{e.upper} missing although its degree is in range")
            continue
        # hidden extensions jump filtration, so only the degree is checked
        if up.degree != e.power * lo.degree:
            raise PresentationError(f"{e.lower}^{e.power} = {e.upper} is not homogeneous")
        if lo.kind is not Kind.TRUNCATED or lo.height != e.power:
            raise PresentationError(f"{e.lower} must be truncated at height {e.power}")
        absorbed[e.upper] = e.lower
    heads = {}
    for g in pres.generators:
        if g.name in absorbed:
            continue
        heads[g.name] = g
    # a tower still running at the window edge is indistinguishable from P(head)
    up_of = {v: k for k, v in absorbed.items()}
    result = []
    for name, g in heads.items():
        chain = [g]
        while chain[-1].name in up_of:
            chain.append(gm[up_of[chain[-1].name]])
        if len(chain) == 1:
            result.append(g)
            continue
        last = chain[-1]
        open_ended = last.kind is Kind.POLYNOMIAL or last.name not in absorbed.values() and \
            last.height * last.degree > pres.cutoff
        if open_ended:
            result.append(GeneratorSpec(g.name, g.degree, g.weight, Kind.POLYNOMIAL))
        else:
            h = 1
            for c in chain:
                h *= c.height
            result.append(GeneratorSpec(g.name, g.degree, g.weight, Kind.TRUNCATED, h))
    new = AlgebraPresentation(pres.p, tuple(result), pres.cutoff, pres.table)
    if tuple(poincare_series(new)) != tuple(poincare_series(pres)):
        raise PresentationError("extensions changed the Poincaré series")
    return new
