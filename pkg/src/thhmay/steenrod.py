"""The odd-primary dual Steenrod algebra and comodule algebras over it.

Generators are the conjugate Milnor classes ``xi_n`` (n >= 1, degree
2(p^n - 1)) and ``tau_n`` (n >= 0, degree 2p^n - 1) with

    Δ(xi_n)  = sum_i xi_i ⊗ xi_{n-i}^{p^i}
    Δ(tau_n) = 1 ⊗ tau_n + sum_i tau_i ⊗ xi_{n-i}^{p^i}

Elements of A⊗M are dicts ``{(a, m): c}`` of monomial pairs.  The
Koszul rule (a⊗m)(a'⊗m') = (-1)^{|m||a'|} aa' ⊗ mm' governs products.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Mapping

from .algebra import (AlgebraElement, AlgebraPresentation, GeneratorSpec, Kind,
                      Monomial, PresentationError, exterior, polynomial)
from .fp import Echelon, axpy, sparse_kernel

Tensor = dict  # {(mono_left, mono_right): coef}


class CoactionError(ValueError):
    pass


def xi(n):
    return f"xi_{n}"


def tau(n):
    return f"tau_{n}"


def xi_degree(p, n):
    return 2 * (p ** n - 1)


def tau_degree(p, n):
    return 2 * p ** n - 1


def tensor_mul(left: AlgebraPresentation, right: AlgebraPresentation,
               x: Tensor, y: Tensor) -> Tensor:
    p = left.p
    out: Tensor = {}
    for (a1, m1), c1 in x.items():
        dm1 = right.degree(m1) % 2
        for (a2, m2), c2 in y.items():
            sgn = -1 if dm1 and left.degree(a2) % 2 else 1
            for ca, a in left.mul_monomials(a1, a2):
                for cm, m in right.mul_monomials(m1, m2):
                    key = (a, m)
                    out[key] = (out.get(key, 0) + sgn * ca * cm * c1 * c2) % p
    return {k: v for k, v in out.items() if v}


def tensor_add(x: Tensor, y: Tensor, p: int, scale: int = 1) -> Tensor:
    out = dict(x)
    axpy(out, scale, y, p)
    return out


def pure(alg_left, m_elem: AlgebraElement) -> Tensor:
    """1 ⊗ m."""
    return {(alg_left.one, m): c for m, c in m_elem.terms.items()}


def simple(a_elem: AlgebraElement, m_elem: AlgebraElement) -> Tensor:
    """a ⊗ m for two elements."""
    p = a_elem.alg.p
    out: Tensor = {}
    for a, c in a_elem.terms.items():
        for m, d in m_elem.terms.items():
            out[(a, m)] = (out.get((a, m), 0) + c * d) % p
    return {k: v for k, v in out.items() if v}


class DualSteenrodAlgebra:
    """A_* at an odd prime, instantiated up to ``cutoff``."""

    def __init__(self, p: int, cutoff: int):
        self.p = p
        self.cutoff = cutoff
        gens = []
        n = 0
        while tau_degree(p, n) <= cutoff:
            gens.append(exterior(tau(n), tau_degree(p, n)))
            if n >= 1:
                gens.append(polynomial(xi(n), xi_degree(p, n)))
            n += 1
        if n >= 1 and xi_degree(p, n) <= cutoff:
            gens.append(polynomial(xi(n), xi_degree(p, n)))
        gens.sort(key=lambda g: (g.degree, g.name))
        self.alg = AlgebraPresentation(p, tuple(gens), cutoff)
        self._delta_cache: dict[Monomial, Tensor] = {}

    def __repr__(self):
        return f"DualSteenrodAlgebra(p={self.p}, cutoff={self.cutoff})"

    def el(self, name: str) -> AlgebraElement:
        return self.alg.gen(name)

    def has(self, name: str) -> bool:
        return name in self.alg.slot_index

    @cached_property
    def generator_coproducts(self) -> dict[str, Tensor]:
        A = self.alg
        p = self.p
        out = {}
        for s in A.slots:
            kind, n = s.name.split("_")
            n = int(n)
            if kind == "xi":
                terms = [(self.el(xi(i)) if i else A.unit(), self.el(xi(n - i)) ** (p ** i)
                          if n - i else A.unit()) for i in range(n + 1)]
            else:
                terms = [(A.unit(), self.el(tau(n)))]
                terms += [(self.el(tau(i)), self.el(xi(n - i)) ** (p ** i) if n - i else A.unit())
                          for i in range(n + 1)]
            t: Tensor = {}
            for a, b in terms:
                axpy(t, 1, simple(a, b), p)
            out[s.name] = t
        return out

    def coproduct_monomial(self, m: Monomial) -> Tensor:
        cached = self._delta_cache.get(m)
        if cached is not None:
            return cached
        A = self.alg
        if m == A.one:
            res = {(A.one, A.one): 1}
        else:
            i = next(i for i, e in enumerate(m[1:]) if e)
            e = m[i + 1]
            rest = list(m)
            rest[i + 1] = e - 1
            rest = tuple(rest)
            g = self.generator_coproducts[A.slots[i].name]
            # m = g * rest exactly (g is the first factor)
            res = tensor_mul(A, A, g, self.coproduct_monomial(rest))
        self._delta_cache[m] = res
        return res

    def coproduct(self, x: AlgebraElement) -> Tensor:
        out: Tensor = {}
        for m, c in x.terms.items():
            axpy(out, c, self.coproduct_monomial(m), self.p)
        return out

    def counit(self, m: Monomial) -> int:
        return 1 if m == self.alg.one else 0

    # -- Hopf axioms -----------------------------------------------------

    def check_coassociative(self, m: Monomial) -> bool:
        p = self.p
        d = self.coproduct_monomial(m)
        left: dict = {}
        right: dict = {}
        for (a, b), c in d.items():
            for (a1, a2), c1 in self.coproduct_monomial(a).items():
                key = (a1, a2, b)
                left[key] = (left.get(key, 0) + c * c1) % p
            for (b1, b2), c2 in self.coproduct_monomial(b).items():
                key = (a, b1, b2)
                right[key] = (right.get(key, 0) + c * c2) % p
        clean = lambda t: {k: v for k, v in t.items() if v}
        return clean(left) == clean(right)

    def check_counit(self, m: Monomial) -> bool:
        d = self.coproduct_monomial(m)
        left = {b: c for (a, b), c in d.items() if a == self.alg.one}
        right = {a: c for (a, b), c in d.items() if b == self.alg.one}
        return left == {m: 1} and right == {m: 1}

    # -- pairing with the Steenrod algebra -----------------------------------

    def p_power_pairing(self, a: Monomial) -> tuple[int, int] | None:
        """(n, c) with <P^n, a> = c, or None if a pairs to zero with every P^n.

        Reduction to P(xi_1) (Milnor generators) sends the conjugate xi_k to
        (-1)^k xi_1^{1+p+...+p^{k-1}} and every tau to zero.
        """
        A = self.alg
        n = 0
        sign = 0
        for e, s in zip(a[1:], A.slots):
            if not e:
                continue
            kind, k = s.name.split("_")
            if kind == "tau":
                return None
            k = int(k)
            n += e * (p_geom(self.p, k))
            sign += e * k
        return n, (-1 if sign % 2 else 1)

    def beta_pairing(self, a: Monomial) -> int:
        if a == self.alg.slot_monomial(tau(0)):
            return -1
        return 0


def p_geom(p, k):
    return (p ** k - 1) // (p - 1)


def milnor_tau(A: DualSteenrodAlgebra, n: int) -> AlgebraElement:
    """The unconjugated Milnor generator tau_n in the conjugate basis.

    Apply m(1 ⊗ chi)Δ = ηε to tau_bar_n: chi(tau_bar_n) is minus the sum of
    tau_bar_i chi(xi_bar_{n-i})^{p^i}, and chi(xi_bar_k) = xi_k.
    """
    out = -A.el(tau(n))
    for i in range(n):
        out = out - A.el(tau(i)) * (milnor_xi(A, n - i) ** (A.p ** i))
    return out


def milnor_xi(A: DualSteenrodAlgebra, n: int) -> AlgebraElement:
    # m(1 ⊗ chi)Δ(xi_bar_n) = 0: sum_i xi_bar_i * chi(xi_bar_{n-i}^{p^i}) = 0
    if n == 0:
        return A.alg.unit()
    out = -A.el(xi(n))
    for i in range(1, n):
        out = out - A.el(xi(i)) * (milnor_xi(A, n - i) ** (A.p ** i))
    return out


@dataclass
class ComoduleAlgebra:
    """An algebra ``M`` with a left A_*-coaction given on generators.

    ``coaction`` maps generator names of M to tensors in A⊗M.  Divided-power
    generators must be primitive; their γ-slots are then primitive too.
    """
    steenrod: DualSteenrodAlgebra
    M: AlgebraPresentation
    coaction_table: Mapping[str, Tensor]
    _cache: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        A = self.steenrod.alg
        M = self.M
        table = {}
        for s in M.slots:
            if s.power > 1:
                base = self.coaction_table.get(s.source)
                if base is None:
                    raise CoactionError(f"no coaction given for {s.source}")
                if base != pure(A, M.gen(s.source)):
                    raise CoactionError(f"divided-power generator {s.source} must be primitive")
                table[s.name] = pure(A, M.gen(s.name))
                continue
            t = self.coaction_table.get(s.name)
            if t is None:
                raise CoactionError(f"no coaction given for {s.name}")
            table[s.name] = t
        self._slot_coaction = table
        for name, t in table.items():
            deg = M.degree(M.slot_monomial(name))
            for (a, m), c in t.items():
                if A.degree(a) + M.degree(m) != deg:
                    raise CoactionError(f"coaction of {name} is not homogeneous")
        for s in M.slots:
            if s.bound is None or s.power > 1:
                continue
            t = self._slot_coaction[s.name]
            acc = {(A.one, M.one): 1}
            for _ in range(s.bound):
                acc = tensor_mul(A, M, acc, t)
            if acc:
                raise CoactionError(f"coaction of {s.name} does not respect its height {s.bound}")

    @property
    def p(self):
        return self.M.p

    def coaction_monomial(self, m: Monomial) -> Tensor:
        cached = self._cache.get(m)
        if cached is not None:
            return cached
        A, M = self.steenrod.alg, self.M
        if m == M.one:
            res = {(A.one, M.one): 1}
        else:
            i = next(i for i, e in enumerate(m[1:]) if e)
            rest = list(m)
            rest[i + 1] -= 1
            g = self._slot_coaction[M.slots[i].name]
            res = tensor_mul(A, M, g, self.coaction_monomial(tuple(rest)))
            # g^e: the first slot exponent was peeled once; the product of
            # generator powers in the exponent basis carries no coefficient
            # except for divided-power slots, which are primitive.
        self._cache[m] = res
        return res

    def coaction(self, x: AlgebraElement) -> Tensor:
        if x.alg != self.M:
            raise PresentationError("element does not belong to the comodule")
        out: Tensor = {}
        for m, c in x.terms.items():
            axpy(out, c, self.coaction_monomial(m), self.p)
        return out

    def check_counit(self) -> bool:
        A = self.steenrod.alg
        for name, t in self._slot_coaction.items():
            part = {m: c for (a, m), c in t.items() if a == A.one}
            if part != {self.M.slot_monomial(name): 1}:
                return False
        return True

    def check_comodule_axiom(self, m: Monomial) -> bool:
        """(Δ⊗1)ψ = (1⊗ψ)ψ on a monomial of M."""
        p = self.p
        st = self.steenrod
        psi = self.coaction_monomial(m)
        left: dict = {}
        right: dict = {}
        for (a, x), c in psi.items():
            for (a1, a2), c1 in st.coproduct_monomial(a).items():
                key = (a1, a2, x)
                left[key] = (left.get(key, 0) + c * c1) % p
            for (a2, x2), c2 in self.coaction_monomial(x).items():
                key = (a, a2, x2)
                right[key] = (right.get(key, 0) + c * c2) % p
        clean = lambda t: {k: v for k, v in t.items() if v}
        return clean(left) == clean(right)

    def generator_monomials(self):
        return [self.M.slot_monomial(s.name) for s in self.M.slots]

    # -- primitives ----------------------------------------------------------

    def reduced_coaction(self, m: Monomial) -> dict:
        """ψ(m) - 1⊗m as a sparse vector over (a, x) pairs."""
        A = self.steenrod.alg
        t = dict(self.coaction_monomial(m))
        key = (A.one, m)
        v = (t.get(key, 0) - 1) % self.p
        if v:
            t[key] = v
        else:
            t.pop(key, None)
        return t

    @cached_property
    def _operation_tables(self):
        """Per-slot total reduced power Σ_n P^n(g) and Bockstein β(g)."""
        st = self.steenrod
        M = self.M
        p = self.p
        ptot = {}
        beta = {}
        for s in M.slots:
            t = self._slot_coaction[s.name]
            pt: dict = {}
            bt: dict = {}
            for (a, x), c in t.items():
                pr = st.p_power_pairing(a)
                if pr is not None:
                    pt[x] = (pt.get(x, 0) + c * pr[1]) % p
                b = st.beta_pairing(a)
                if b:
                    bt[x] = (bt.get(x, 0) + c * b) % p
            ptot[s.name] = {k: v for k, v in pt.items() if v}
            beta[s.name] = {k: v for k, v in bt.items() if v}
        return ptot, beta

    def total_power(self, m: Monomial) -> dict:
        """Σ_n P^n(m) by the Cartan formula; P is multiplicative."""
        key = ("P", m)
        cached = self._cache.get(key)
        if cached is not None:
            return cached
        M = self.M
        if m == M.one:
            res = {m: 1}
        else:
            i = next(i for i, e in enumerate(m[1:]) if e)
            rest = list(m)
            rest[i + 1] -= 1
            g = self._operation_tables[0][M.slots[i].name]
            res = _mul_sparse(M, g, self.total_power(tuple(rest)))
        self._cache[key] = res
        return res

    def bockstein(self, m: Monomial) -> dict:
        key = ("B", m)
        cached = self._cache.get(key)
        if cached is not None:
            return cached
        M = self.M
        p = self.p
        if m == M.one:
            res = {}
        else:
            i = next(i for i, e in enumerate(m[1:]) if e)
            rest = list(m)
            rest[i + 1] -= 1
            rest = tuple(rest)
            gname = M.slots[i].name
            gm = M.slot_monomial(gname)
            res = _mul_sparse(M, self._operation_tables[1][gname], {rest: 1})
            sgn = -1 if M.degree(gm) % 2 else 1
            axpy(res, sgn, _mul_sparse(M, {gm: 1}, self.bockstein(rest)), p)
        self._cache[key] = res
        return res

    def operation_image(self, m: Monomial) -> dict:
        """Images of m under β and P^{p^i}, keyed by (operation, monomial)."""
        M = self.M
        p = self.p
        deg = M.degree(m)
        out = {(-1, x): c for x, c in self.bockstein(m).items()}
        targets = set()
        k = 1
        while 2 * (p - 1) * k <= deg:
            targets.add(deg - 2 * (p - 1) * k)
            k *= p
        if targets:
            for x, c in self.total_power(m).items():
                d = M.degree(x)
                if d in targets:
                    out[(d, x)] = c
        return out

    def primitives(self, N: int | None = None, method: str = "steenrod") -> dict[int, list[AlgebraElement]]:
        """Basis of the comodule primitives in each degree <= N.

        ``method="coaction"`` takes the kernel of ψ - 1⊗id directly;
        ``method="steenrod"`` takes the common kernel of β and the P^{p^i},
        which generate the dual action.
        """
        N = self.M.cutoff if N is None else N
        M = self.M
        out = {}
        for k in range(N + 1):
            basis = M.basis_in_degree(k)
            if method == "coaction":
                imgs = [self.reduced_coaction(m) for m in basis]
            elif method == "steenrod":
                imgs = [self.operation_image(m) for m in basis]
            else:
                raise ValueError(method)
            ker = sparse_kernel(imgs, self.p)
            out[k] = [M.element({basis[j]: c for j, c in v.items()}) for v in ker]
        return out

    def is_primitive(self, x: AlgebraElement) -> bool:
        t = self.coaction(x)
        return t == pure(self.steenrod.alg, x)


def _mul_sparse(M: AlgebraPresentation, x: dict, y: dict) -> dict:
    p = M.p
    out: dict = {}
    for m1, c1 in x.items():
        for m2, c2 in y.items():
            for c, m in M.mul_monomials(m1, m2):
                out[m] = (out.get(m, 0) + c * c1 * c2) % p
    return {k: v for k, v in out.items() if v}


def suspend(M: AlgebraPresentation, x: AlgebraElement, sigma_names: Mapping[str, str]) -> AlgebraElement:
    """σ applied to an element, σ a degree-one derivation killing the unit.

    σ(g) is the generator named ``sigma_names[g]`` (zero if absent);
    σ(xy) = σ(x)y + (-1)^{|x|} xσ(y).
    """
    src = x.alg
    out = M.element()
    for m, c in x.terms.items():
        out = out + _suspend_monomial(src, M, m, sigma_names) * c
    return out


def _suspend_monomial(src, M, m, sigma_names):
    if m == src.one:
        return M.element()
    i = next(i for i, e in enumerate(m[1:]) if e)
    s = src.slots[i]
    rest = list(m)
    rest[i + 1] -= 1
    rest = tuple(rest)
    gname = sigma_names.get(s.name)
    rest_el = _transport(src, M, rest)
    g_el = _transport(src, M, src.slot_monomial(s.name))
    sg = M.gen(gname) if gname and gname in M.slot_index else M.element()
    sign = -1 if s.degree % 2 else 1
    return sg * rest_el + g_el * _suspend_monomial(src, M, rest, sigma_names) * sign


def suspend_tensor(src, M, t: Tensor, sigma_names: Mapping[str, str]) -> Tensor:
    """(1⊗σ) applied to a tensor with right factors in ``src``.

    No Koszul sign is introduced when σ passes the left factor.
    """
    p = M.p
    out: Tensor = {}
    for (a, m), c in t.items():
        for x, d in _suspend_monomial(src, M, m, sigma_names).terms.items():
            out[(a, x)] = (out.get((a, x), 0) + c * d) % p
    return {k: v for k, v in out.items() if v}


def transport_tensor(src, M, t: Tensor) -> Tensor:
    """Re-express right factors of ``t`` in M, matching generators by name."""
    p = M.p
    out: Tensor = {}
    for (a, m), c in t.items():
        for x, d in _transport(src, M, m).terms.items():
            out[(a, x)] = (out.get((a, x), 0) + c * d) % p
    return {k: v for k, v in out.items() if v}


def _transport(src, M, m) -> AlgebraElement:
    """The monomial m of src viewed in M (generators matched by name)."""
    out = M.unit()
    for e, s in zip(m[1:], src.slots):
        if e:
            out = out * (M.gen(s.name) ** e)
    return out


def package_primitives(comodule: ComoduleAlgebra, prims: Mapping[int, list[AlgebraElement]],
                       target: AlgebraPresentation,
                       reps: Mapping[str, AlgebraElement]) -> dict[int, tuple[int, int, bool]]:
    """Check that ``target`` (with slot representatives ``reps``) is the primitive algebra.

    For each degree returns (dim target, dim primitives, ok) where ok means
    the evaluated target monomials are primitive, independent, and as many
    as the primitive basis.
    """
    M = comodule.M
    p = M.p
    reps = dict(reps)
    for s in target.slots:
        # γ-slots of a generator represented by itself are represented by themselves
        if s.name not in reps and s.power > 1 and s.name in M.slot_index \
                and reps.get(s.source) == M.gen(s.source):
            reps[s.name] = M.gen(s.name)
    cache: dict[Monomial, AlgebraElement] = {target.one: M.unit()}

    def evaluate(m):
        got = cache.get(m)
        if got is not None:
            return got
        i = next(i for i, e in enumerate(m[1:]) if e)
        rest = list(m)
        rest[i + 1] -= 1
        val = reps[target.slots[i].name] * evaluate(tuple(rest))
        cache[m] = val
        return val

    result = {}
    for k in range(min(target.cutoff, max(prims)) + 1):
        ech = Echelon(p)
        ok = True
        tb = target.basis_in_degree(k)
        for m in tb:
            v = evaluate(m)
            if not comodule.is_primitive(v):
                ok = False
            if not ech.add(dict(v.terms)):
                ok = False
        ok = ok and len(tb) == len(prims[k])
        result[k] = (len(tb), len(prims[k]), ok)
    return result


def coproduct(A: DualSteenrodAlgebra, x: AlgebraElement) -> Tensor:
    return A.coproduct(x)


def coaction(c: ComoduleAlgebra, x: AlgebraElement) -> Tensor:
    return c.coaction(x)


def primitives(c: ComoduleAlgebra, N: int | None = None) -> dict[int, list[AlgebraElement]]:
    return c.primitives(N)
