"""Graded-commutative F_p algebras on typed generators.

A presentation is a list of generators, each exterior, polynomial,
truncated polynomial or divided power, optionally tensored with a finite
*structure table* (an explicitly multiplied set of basis classes) for
answers that are not free.

Divided powers are stored in repacked form: a divided-power generator ``z``
of degree ``d`` expands into internal height-p truncated slots
``γ_{p^k}(z)`` for every ``p^k d <= cutoff``, so that a monomial is just a
tuple of bounded exponents.  :func:`gamma_repack` converts ``γ_e(z)`` into
this basis.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Iterator, Mapping, Sequence

from .fp import PrimeField


class Kind(enum.Enum):
    EXTERIOR = "exterior"
    POLYNOMIAL = "polynomial"
    TRUNCATED = "truncated"
    DIVIDED_POWER = "divided_power"


class PresentationError(ValueError):
    pass


@dataclass(frozen=True)
class GeneratorSpec:
    name: str
    degree: int
    weight: int = 0
    kind: Kind = Kind.POLYNOMIAL
    height: int | None = None  # only for TRUNCATED

    def __post_init__(self):
        if self.degree < 0 or self.weight < 0:
            raise PresentationError(f"{self.name}: negative degree or weight")
        odd = self.degree % 2 == 1
        if self.kind is Kind.EXTERIOR:
            if not odd:
                raise PresentationError(f"exterior generator {self.name} must have odd degree")
        elif odd:
            raise PresentationError(f"{self.kind.value} generator {self.name} must have even degree")
        if self.kind is Kind.TRUNCATED:
            if self.height is None or self.height < 2:
                raise PresentationError(f"{self.name}: truncation height must be >= 2")
        elif self.height is not None:
            raise PresentationError(f"{self.name}: height only applies to truncated generators")


def exterior(name, degree, weight=0):
    return GeneratorSpec(name, degree, weight, Kind.EXTERIOR)


def polynomial(name, degree, weight=0):
    return GeneratorSpec(name, degree, weight, Kind.POLYNOMIAL)


def truncated(name, degree, height, weight=0):
    return GeneratorSpec(name, degree, weight, Kind.TRUNCATED, height)


def divided(name, degree, weight=0):
    return GeneratorSpec(name, degree, weight, Kind.DIVIDED_POWER)


def binom_mod_p(i: int, j: int, p: int) -> int:
    """(i+j choose j) mod p, by Lucas' theorem."""
    n, k = i + j, j
    out = 1
    while n or k:
        a, b = n % p, k % p
        if b > a:
            return 0
        # small binomial by multiplicative formula mod p
        num = den = 1
        for t in range(b):
            num = num * (a - t) % p
            den = den * (t + 1) % p
        out = out * num * pow(den, p - 2, p) % p
        n //= p
        k //= p
    return out


@dataclass(frozen=True)
class Slot:
    """An internal generator: what monomial exponents are indexed by."""
    name: str
    degree: int
    weight: int
    bound: int | None  # exponents < bound; None for polynomial
    source: str  # originating generator name
    power: int = 1  # p^k for divided-power slots

    @property
    def odd(self) -> bool:
        return self.degree % 2 == 1


def gamma_name(base: str, k: int) -> str:
    return base if k == 1 else f"γ_{k}({base})"


@dataclass(frozen=True)
class StructureTable:
    """Finitely many basis classes with an explicit multiplication table.

    ``classes`` lists (name, degree, weight) of the non-unit basis classes;
    the unit is implicit and has index 0.  ``products`` maps an ordered
    pair of class names to {class name: coefficient}; missing pairs
    multiply to zero.
    """
    classes: tuple[tuple[str, int, int], ...]
    products: tuple[tuple[tuple[str, str], tuple[tuple[str, int], ...]], ...] = ()

    @classmethod
    def build(cls, classes: Sequence[tuple[str, int, int]],
              products: Mapping[tuple[str, str], Mapping[str, int]]) -> "StructureTable":
        prods = tuple(sorted((k, tuple(sorted(v.items()))) for k, v in products.items()))
        return cls(tuple(classes), prods)

    @cached_property
    def index(self) -> dict[str, int]:
        return {name: i + 1 for i, (name, _, _) in enumerate(self.classes)}

    @cached_property
    def degrees(self) -> list[int]:
        return [0] + [d for _, d, _ in self.classes]

    @cached_property
    def weights(self) -> list[int]:
        return [0] + [w for _, _, w in self.classes]

    @cached_property
    def names(self) -> list[str]:
        return ["1"] + [n for n, _, _ in self.classes]

    @cached_property
    def _table(self) -> dict[tuple[int, int], list[tuple[int, int]]]:
        idx = self.index
        out = {}
        for (a, b), terms in self.products:
            out[(idx[a], idx[b])] = [(idx[c], k) for c, k in terms]
        return out

    def multiply(self, i: int, j: int) -> list[tuple[int, int]]:
        if i == 0:
            return [(j, 1)]
        if j == 0:
            return [(i, 1)]
        return list(self._table.get((i, j), ()))

    def check(self, p: int) -> None:
        """Degree, graded-commutativity and associativity on the finite table."""
        deg = self.degrees
        n = len(deg)
        for (i, j), terms in self._table.items():
            for k, _ in terms:
                if deg[k] != deg[i] + deg[j]:
                    raise PresentationError("structure table product is not graded")
        for i in range(1, n):
            for j in range(1, n):
                ab = {k: c % p for k, c in self.multiply(i, j) if c % p}
                sign = -1 if deg[i] % 2 and deg[j] % 2 else 1
                ba = {k: (sign * c) % p for k, c in self.multiply(j, i) if c % p}
                if ab != ba:
                    raise PresentationError(f"structure table not graded-commutative at {i},{j}")
        for i, j, k in itertools.product(range(1, n), repeat=3):
            left: dict[int, int] = {}
            for a, c in self.multiply(i, j):
                for b, c2 in self.multiply(a, k):
                    left[b] = (left.get(b, 0) + c * c2) % p
            right: dict[int, int] = {}
            for a, c in self.multiply(j, k):
                for b, c2 in self.multiply(i, a):
                    right[b] = (right.get(b, 0) + c * c2) % p
            if {a: c for a, c in left.items() if c} != {a: c for a, c in right.items() if c}:
                raise PresentationError(f"structure table not associative at {i},{j},{k}")


Monomial = tuple  # (table index, exponent per slot...)


@dataclass(frozen=True)
class AlgebraPresentation:
    """A connected graded-commutative algebra over F_p, truncated at ``cutoff``."""
    p: int
    generators: tuple[GeneratorSpec, ...]
    cutoff: int
    table: StructureTable | None = None

    def __post_init__(self):
        PrimeField(self.p)
        object.__setattr__(self, "generators", tuple(self.generators))
        names = [g.name for g in self.generators]
        if self.table is not None:
            names += [n for n, _, _ in self.table.classes]
            self.table.check(self.p)
        if len(set(names)) != len(names):
            raise PresentationError("generator names must be unique")

    # -- slots -----------------------------------------------------------

    @cached_property
    def slots(self) -> tuple[Slot, ...]:
        out = []
        for g in self.generators:
            if g.kind is Kind.DIVIDED_POWER:
                k = 1
                while g.degree == 0 or k * g.degree <= self.cutoff:
                    out.append(Slot(gamma_name(g.name, k), k * g.degree, k * g.weight,
                                    self.p, g.name, k))
                    if g.degree == 0:
                        break
                    k *= self.p
            else:
                bound = {Kind.EXTERIOR: 2, Kind.POLYNOMIAL: None,
                         Kind.TRUNCATED: g.height}[g.kind]
                out.append(Slot(g.name, g.degree, g.weight, bound, g.name))
        return tuple(out)

    @cached_property
    def slot_index(self) -> dict[str, int]:
        return {s.name: i for i, s in enumerate(self.slots)}

    @cached_property
    def generator_map(self) -> dict[str, GeneratorSpec]:
        return {g.name: g for g in self.generators}

    @property
    def nslots(self) -> int:
        return len(self.slots)

    def is_connected(self) -> bool:
        return all(g.degree > 0 for g in self.generators)

    def with_cutoff(self, cutoff: int) -> "AlgebraPresentation":
        return AlgebraPresentation(self.p, self.generators, cutoff, self.table)

    def with_weights(self, weights: Mapping[str, int]) -> "AlgebraPresentation":
        gens = tuple(GeneratorSpec(g.name, g.degree, weights.get(g.name, 0), g.kind, g.height)
                     for g in self.generators)
        return AlgebraPresentation(self.p, gens, self.cutoff, self.table)

    # -- monomials -------------------------------------------------------

    @property
    def one(self) -> Monomial:
        return (0,) + (0,) * self.nslots

    def degree(self, m: Monomial) -> int:
        d = self.table.degrees[m[0]] if self.table else 0
        return d + sum(e * s.degree for e, s in zip(m[1:], self.slots) if e)

    def weight(self, m: Monomial) -> int:
        w = self.table.weights[m[0]] if self.table else 0
        return w + sum(e * s.weight for e, s in zip(m[1:], self.slots) if e)

    def slot_monomial(self, name: str, exponent: int = 1) -> Monomial:
        i = self.slot_index[name]
        m = [0] * (self.nslots + 1)
        m[i + 1] = exponent
        self._check_bound(i, exponent)
        return tuple(m)

    def _check_bound(self, i, e):
        b = self.slots[i].bound
        if b is not None and e >= b:
            raise PresentationError(f"exponent {e} exceeds bound of {self.slots[i].name}")

    def mul_monomials(self, a: Monomial, b: Monomial) -> list[tuple[int, Monomial]]:
        """Product of two basis monomials as a list of (coefficient, monomial)."""
        exps = []
        sign = 0
        odd_after = 0  # number of odd factors of a in slots after the current one
        slots = self.slots
        # sign: moving b's odd factors past later odd factors of a
        for i in range(len(slots) - 1, -1, -1):
            ea, eb = a[i + 1], b[i + 1]
            s = slots[i]
            if s.odd:
                if eb:
                    sign += eb * odd_after
                odd_after += ea
        for i, s in enumerate(slots):
            e = a[i + 1] + b[i + 1]
            if s.bound is not None and e >= s.bound:
                return []
            exps.append(e)
        tail = tuple(exps)
        if self.table is None or (a[0] == 0 and b[0] == 0):
            if a[0] or b[0]:
                return [(-1 if sign % 2 else 1, (a[0] or b[0],) + tail)]
            return [(-1 if sign % 2 else 1, (0,) + tail)]
        # a = t_a f_a, b = t_b f_b ; f_a t_b = (-1)^{|f_a||t_b|} t_b f_a
        fa_odd = sum(a[i + 1] for i, s in enumerate(slots) if s.odd)
        tb_odd = self.table.degrees[b[0]] % 2
        sign += fa_odd * tb_odd
        sgn = -1 if sign % 2 else 1
        return [(sgn * c, (k,) + tail) for k, c in self.table.multiply(a[0], b[0])]

    def monomial_name(self, m: Monomial) -> str:
        parts = []
        if self.table is not None and m[0]:
            parts.append(self.table.names[m[0]])
        for e, s in zip(m[1:], self.slots):
            if e == 1:
                parts.append(s.name)
            elif e:
                parts.append(f"{s.name}^{e}")
        return "·".join(parts) if parts else "1"

    # -- enumeration -----------------------------------------------------

    @cached_property
    def _basis_by_degree(self) -> dict[int, list[Monomial]]:
        if not self.is_connected():
            raise PresentationError("basis enumeration needs positive-degree generators")
        N = self.cutoff
        slots = self.slots
        out: dict[int, list[Monomial]] = {d: [] for d in range(N + 1)}
        tables = [(0, 0)]
        if self.table is not None:
            tables += [(i, d) for i, d in enumerate(self.table.degrees) if i]

        def rec(i: int, deg: int, acc: list[int]):
            if i == len(slots):
                yield deg, tuple(acc)
                return
            s = slots[i]
            e = 0
            while deg + e * s.degree <= N and (s.bound is None or e < s.bound):
                acc.append(e)
                yield from rec(i + 1, deg + e * s.degree, acc)
                acc.pop()
                e += 1

        for t, d0 in tables:
            if d0 > N:
                continue
            for deg, exps in rec(0, d0, []):
                out[deg].append((t,) + exps)
        for d in out:
            out[d].sort()
        return out

    def basis_in_degree(self, n: int) -> list[Monomial]:
        if n < 0:
            return []
        if n > self.cutoff:
            raise PresentationError(f"degree {n} exceeds cutoff {self.cutoff}")
        return list(self._basis_by_degree[n])

    def basis(self) -> Iterator[Monomial]:
        for d in range(self.cutoff + 1):
            yield from self._basis_by_degree[d]

    # -- elements --------------------------------------------------------

    def element(self, terms: Mapping[Monomial, int] | None = None) -> "AlgebraElement":
        return AlgebraElement(self, terms or {})

    def gen(self, name: str) -> "AlgebraElement":
        if self.table is not None and name in self.table.index:
            m = list(self.one)
            m[0] = self.table.index[name]
            return self.element({tuple(m): 1})
        if name in self.slot_index:
            return self.element({self.slot_monomial(name): 1})
        g = self.generator_map.get(name)
        if g is not None and g.kind is Kind.DIVIDED_POWER:
            return self.element({self.slot_monomial(name): 1})
        raise KeyError(name)

    def unit(self) -> "AlgebraElement":
        return self.element({self.one: 1})

    def gamma(self, name: str, e: int) -> "AlgebraElement":
        return gamma_repack(self, name, e)


class AlgebraElement:
    """A finite F_p-linear combination of monomials of one presentation."""

    __slots__ = ("alg", "terms")

    def __init__(self, alg: AlgebraPresentation, terms: Mapping[Monomial, int]):
        p = alg.p
        self.alg = alg
        self.terms = {m: c % p for m, c in terms.items() if c % p}

    def _coerce(self, other) -> "AlgebraElement":
        if isinstance(other, AlgebraElement):
            if other.alg is not self.alg and other.alg != self.alg:
                raise PresentationError("elements belong to different presentations")
            return other
        if isinstance(other, int):
            return AlgebraElement(self.alg, {self.alg.one: other})
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        t = dict(self.terms)
        for m, c in other.terms.items():
            t[m] = t.get(m, 0) + c
        return AlgebraElement(self.alg, t)

    __radd__ = __add__

    def __neg__(self):
        return AlgebraElement(self.alg, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, int):
            return AlgebraElement(self.alg, {m: c * other for m, c in self.terms.items()})
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        alg = self.alg
        out: dict[Monomial, int] = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                for c, m in alg.mul_monomials(m1, m2):
                    out[m] = out.get(m, 0) + c * c1 * c2
        return AlgebraElement(alg, out)

    def __rmul__(self, other):
        if isinstance(other, int):
            return self * other
        return NotImplemented

    def __pow__(self, n: int):
        out = self.alg.unit()
        for _ in range(n):
            out = out * self
        return out

    def __eq__(self, other):
        if isinstance(other, int):
            other = self._coerce(other)
        if not isinstance(other, AlgebraElement):
            return NotImplemented
        return self.alg == other.alg and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __bool__(self):
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def degrees(self) -> set[int]:
        return {self.alg.degree(m) for m in self.terms}

    def bidegrees(self) -> set[tuple[int, int]]:
        return {(self.alg.degree(m), self.alg.weight(m)) for m in self.terms}

    def is_homogeneous(self) -> bool:
        return len(self.degrees()) <= 1

    def degree(self) -> int:
        ds = self.degrees()
        if len(ds) != 1:
            raise PresentationError("element is zero or not homogeneous")
        return ds.pop()

    def __repr__(self):
        if not self.terms:
            return "0"
        parts = []
        for m in sorted(self.terms):
            c = self.terms[m]
            name = self.alg.monomial_name(m)
            parts.append(name if c == 1 else f"{c}*{name}")
        return " + ".join(parts)


def gamma_repack(alg: AlgebraPresentation, name: str, e: int) -> AlgebraElement:
    """γ_e(z) for a divided-power generator z, in the repacked basis.

    With e = sum d_k p^k, the product prod_k γ_{p^k}(z)^{d_k} equals
    c·γ_e(z) for a unit c obtained from the product rule; so
    γ_e(z) = c^{-1} prod_k γ_{p^k}(z)^{d_k}.
    """
    g = alg.generator_map[name]
    if g.kind is not Kind.DIVIDED_POWER:
        raise PresentationError(f"{name} is not a divided-power generator")
    if e < 0:
        raise ValueError("negative divided power")
    p = alg.p
    if e == 0:
        return alg.unit()
    if e * g.degree > alg.cutoff:
        return alg.element()
    m = list(alg.one)
    coef = 1
    acc = 0
    k = 1
    rest = e
    while rest:
        d = rest % p
        if d:
            m[alg.slot_index[gamma_name(name, k)] + 1] = d
            for _ in range(d):
                coef = coef * binom_mod_p(acc, k, p) % p
                acc += k
        rest //= p
        k *= p
    return alg.element({tuple(m): pow(coef, p - 2, p)})


def gamma_unpack(alg: AlgebraPresentation, name: str, m: Monomial) -> tuple[int, int]:
    """Inverse of :func:`gamma_repack` on the ``name`` part of a monomial.

    Returns (e, c) such that the γ-part of m equals c·γ_e(z).
    """
    p = alg.p
    acc = 0
    coef = 1
    for i, s in enumerate(alg.slots):
        if s.source == name and m[i + 1]:
            for _ in range(m[i + 1]):
                coef = coef * binom_mod_p(acc, s.power, p) % p
                acc += s.power
    return acc, coef


@dataclass(frozen=True)
class PoincareSeries:
    cutoff: int
    dims: tuple[int, ...]

    def __getitem__(self, k):
        return self.dims[k]

    def __len__(self):
        return len(self.dims)


def poincare_series(alg: AlgebraPresentation, N: int | None = None) -> PoincareSeries:
    N = alg.cutoff if N is None else N
    if N > alg.cutoff:
        alg = alg.with_cutoff(N)
    return PoincareSeries(N, tuple(len(alg.basis_in_degree(k)) for k in range(N + 1)))


def series_product(*series: Sequence[int]) -> tuple[int, ...]:
    """Convolution of dimension vectors, truncated to the shortest length."""
    n = min(len(s) for s in series)
    out = [1] + [0] * (n - 1)
    for s in series:
        new = [0] * n
        for i, a in enumerate(out):
            if a:
                for j in range(n - i):
                    new[i + j] += a * s[j]
        out = new
    return tuple(out)


def tensor(*algs: AlgebraPresentation) -> AlgebraPresentation:
    p = algs[0].p
    cutoff = min(a.cutoff for a in algs)
    tables = [a.table for a in algs if a.table is not None]
    if len(tables) > 1:
        raise PresentationError("at most one structure table per presentation")
    gens = tuple(itertools.chain.from_iterable(a.generators for a in algs))
    return AlgebraPresentation(p, gens, cutoff, tables[0] if tables else None)


def free_algebra(p: int, cutoff: int, generators: Iterable[GeneratorSpec],
                 table: StructureTable | None = None) -> AlgebraPresentation:
    return AlgebraPresentation(p, tuple(g for g in generators if g.degree <= cutoff), cutoff, table)
