"""Input presentations, coaction tables and target algebras for the scenarios.

Naming: ``xi_i``/``tau_i`` are the conjugate generators, ``xit_*``/``taut_*``
the tilde-decorated classes of H_*(j) (same degrees, different coactions),
``σx`` the suspension of ``x``.  Weights follow the May filtration in which
the classes coming from the first Whitehead-tower layer (``alpha_1``,
``v_1``) and everything built from them carry weight one per factor.
"""

from __future__ import annotations

from .algebra import (AlgebraElement, AlgebraPresentation, GeneratorSpec, Kind,
                      divided, exterior, polynomial)
from .fp import PrimeField
from .hochschild import hh_free, sigma
from .steenrod import (ComoduleAlgebra, DualSteenrodAlgebra, milnor_tau, simple,
                       suspend_tensor, tau, tau_degree, transport_tensor, xi,
                       xi_degree)


def _quotient_gens(p, N, first_xi=1, first_tau=1, weight=0):
    gens = []
    n = first_xi
    while xi_degree(p, n) <= N:
        gens.append(polynomial(xi(n), xi_degree(p, n), weight))
        n += 1
    n = first_tau
    while tau_degree(p, n) <= N:
        gens.append(exterior(tau(n), tau_degree(p, n), weight))
        n += 1
    return gens


def _pres(p, N, gens):
    gens = sorted((g for g in gens if g.degree <= N), key=lambda g: (g.degree, g.name))
    return AlgebraPresentation(p, tuple(gens), N)


def class_degrees(p: int) -> dict[str, int]:
    """Degrees of the named classes that the scenarios refer to."""
    return {
        "alpha_1": 2 * p - 3,
        "v_1": 2 * p - 2,
        "b": 2 * p * p - 2 * p - 1,
        "σb": 2 * p * p - 2 * p,
        "lambda_1'": 2 * p * p - 2 * p + 1,
        "lambda_2": 2 * p * p - 1,
        "mu_2": 2 * p * p,
        "lambda_1": 2 * p - 1,
        "mu_1": 2 * p,
        "epsilon_1": 2 * p - 1,
        "vt_1": 2 * p - 2,
        "σalpha_1": 2 * p - 2,
        "σvt_1": 2 * p - 1,
    }


def lemma_input(p: int, N: int, may_weights: bool = False) -> AlgebraPresentation:
    """(A//E(0))_* ⊗ P(v_1) ⊗ E(alpha_1), the homology of the associated graded of j."""
    PrimeField(p)
    w = 1 if may_weights else 0
    gens = _quotient_gens(p, N)
    gens += [polynomial("v_1", 2 * p - 2, w), exterior("alpha_1", 2 * p - 3, w)]
    return _pres(p, N, gens)


def hh_input(p: int, N: int) -> AlgebraPresentation:
    """Bökstedt E^2: HH of the lemma input, filtered by Hochschild degree."""
    base = lemma_input(p, N)
    hh = hh_free(base, N)
    return hh.with_weights({g.name: (1 if g.name.startswith("σ") else 0)
                            for g in hh.generators})


def bokstedt_target(p: int, N: int) -> AlgebraPresentation:
    gens = _quotient_gens(p, N)
    gens += [polynomial("v_1", 2 * p - 2), exterior("alpha_1", 2 * p - 3),
             exterior(sigma(xi(1)), 2 * p - 1), exterior("σv_1", 2 * p - 1),
             polynomial(sigma(tau(1)), 2 * p), divided("σalpha_1", 2 * p - 2)]
    return _pres(p, N, gens)


MAY_WEIGHT_ONE = ("alpha_1", "v_1", "σalpha_1", "σv_1", "vt_1", "σvt_1")


def may_weights(pres: AlgebraPresentation) -> AlgebraPresentation:
    return pres.with_weights({g.name: (1 if g.name in MAY_WEIGHT_ONE else 0)
                              for g in pres.generators})


def a_mod_a1_gens(p, N):
    """(A//A(1))_* = P(xit_1^p, xit_2, xi_3, ...) ⊗ E(taut_2, tau_3, ...)."""
    gens = []
    if 2 * p * (p - 1) <= N:
        gens.append(polynomial("xit_1^p", 2 * p * (p - 1)))
    if xi_degree(p, 2) <= N:
        gens.append(polynomial("xit_2", xi_degree(p, 2)))
    if tau_degree(p, 2) <= N:
        gens.append(exterior("taut_2", tau_degree(p, 2)))
    gens += _quotient_gens(p, N, first_xi=3, first_tau=3)
    return gens


def thh_j_answer(p: int, N: int) -> AlgebraPresentation:
    """H_*(j) ⊗ E(σxit_1^p, σxit_2) ⊗ P(σtaut_2) ⊗ Γ(σb)."""
    d = class_degrees(p)
    gens = a_mod_a1_gens(p, N) + [
        exterior("b", d["b"]),
        exterior("σxit_1^p", d["lambda_1'"]),
        exterior("σxit_2", d["lambda_2"]),
        polynomial("σtaut_2", d["mu_2"]),
        divided("σb", d["σb"]),
    ]
    return _pres(p, N, gens)


def primitives_target(p: int, N: int) -> AlgebraPresentation:
    """E(alpha_1, lambda_1, epsilon_1, σvt_1) ⊗ P(mu_1, vt_1) ⊗ Γ(σalpha_1)."""
    d = class_degrees(p)
    gens = [exterior("alpha_1", d["alpha_1"], 1), exterior("lambda_1", d["lambda_1"]),
            exterior("epsilon_1", d["epsilon_1"]), exterior("σvt_1", d["σvt_1"], 1),
            polynomial("mu_1", d["mu_1"]), polynomial("vt_1", d["vt_1"], 1),
            divided("σalpha_1", d["σalpha_1"], 1)]
    return _pres(p, N, gens)


def v1_e2_target(p: int, N: int) -> AlgebraPresentation:
    """E(alpha_1, lambda_1 γ_{p-1}(σalpha_1), mu_1^{p-1} σvt_1) ⊗ P(mu_1^p) ⊗ Γ(σb)."""
    d = class_degrees(p)
    gens = [exterior("alpha_1", d["alpha_1"], 1),
            exterior("lambda_1'", d["lambda_1'"], p - 1),
            exterior("lambda_2", d["lambda_2"], 1),
            polynomial("mu_2", d["mu_2"], 0),
            divided("σb", d["σb"], p)]
    return _pres(p, N, gens)


def thh_j_ell_target(p: int, N: int) -> AlgebraPresentation:
    d = class_degrees(p)
    gens = [exterior("lambda_1'", d["lambda_1'"]), exterior("lambda_2", d["lambda_2"]),
            polynomial("mu_2", d["mu_2"]), divided("σb", d["σb"])]
    return _pres(p, N, gens)


# -- comodule models -------------------------------------------------------

def _steenrod_table(A: DualSteenrodAlgebra, M: AlgebraPresentation, names):
    """Coactions of the A_* (or quotient) generators inside M, via Δ."""
    return {n: transport_tensor(A.alg, M, A.generator_coproducts[n]) for n in names}


def v1_comodule(p: int, N: int) -> tuple[ComoduleAlgebra, dict[str, AlgebraElement]]:
    """H_*(V(1) ∧ THH(E_0^*J)) as a comodule algebra, with candidate primitives.

    Bökstedt answer ⊗ E(tauV_0, tauV_1) where tauV_i are the classes of
    H_*(V(1)) = E(tau_0, tau_1).
    """
    A = DualSteenrodAlgebra(p, N)
    base = bokstedt_target(p, N)
    gens = list(base.generators) + [exterior("tauV_0", 1), exterior("tauV_1", 2 * p - 1)]
    M = _pres(p, N, gens)
    quotient = [g.name for g in base.generators if g.name.startswith(("xi_", "tau_"))]
    table = _steenrod_table(A, M, quotient)
    one = A.alg.unit()
    t0 = A.el(tau(0))
    has = M.generator_map.__contains__
    g = M.gen
    table["tauV_0"] = {**simple(t0, M.unit()), **simple(one, g("tauV_0"))}
    if has("tauV_1"):
        tv1 = simple(one, g("tauV_1"))
        for k, v in simple(t0, g(xi(1))).items():
            tv1[k] = v
        for k, v in simple(A.el(tau(1)), M.unit()).items():
            tv1[k] = v
        table["tauV_1"] = tv1
    if has("alpha_1"):
        table["alpha_1"] = simple(one, g("alpha_1"))
        table["σalpha_1"] = simple(one, M.gen("σalpha_1")) if has("σalpha_1") else {}
    if has("v_1"):
        table["v_1"] = {**simple(t0, g("alpha_1")), **simple(one, g("v_1"))}
    snames = {xi(1): sigma(xi(1)), tau(1): sigma(tau(1)), "v_1": "σv_1", "alpha_1": "σalpha_1"}
    for src in (xi(1), tau(1), "v_1"):
        if has(snames[src]):
            table[snames[src]] = suspend_tensor(M, M, table[src], snames)
    C = ComoduleAlgebra(A, M, table)
    forms = {
        "alpha_1": lambda: g("alpha_1"),
        "vt_1": lambda: g("v_1") - g("tauV_0") * g("alpha_1"),
        "mu_1": lambda: g("σtau_1") - g("tauV_0") * g("σxi_1"),
        "lambda_1": lambda: g("σxi_1"),
        "σalpha_1": lambda: g("σalpha_1"),
        "σvt_1": lambda: g("σv_1") - g("tauV_0") * g("σalpha_1"),
        "epsilon_1": lambda: g("tau_1") - g("tauV_1"),
    }
    degs = class_degrees(p)
    cands = {n: f() for n, f in forms.items() if degs[n] <= N}
    return C, cands


def thh_j_ell_comodule(p: int, N: int) -> tuple[ComoduleAlgebra, dict[str, AlgebraElement]]:
    """A_* ⊗ E(σxit_1^p, σxit_2) ⊗ P(σtaut_2) ⊗ Γ(σb) with the suspended coactions.

    The un-barred tau_0, tau_1 in the coaction formulas are the Milnor
    generators, rewritten in the conjugate basis.
    """
    A = DualSteenrodAlgebra(p, N)
    d = class_degrees(p)
    gens = list(A.alg.generators) + [
        exterior("σxit_1^p", d["lambda_1'"]), exterior("σxit_2", d["lambda_2"]),
        polynomial("σtaut_2", d["mu_2"]), divided("σb", d["σb"])]
    M = _pres(p, N, gens)
    table = _steenrod_table(A, M, [s.name for s in A.alg.slots])
    one = A.alg.unit()
    t0 = milnor_tau(A, 0)
    t1 = milnor_tau(A, 1) if A.has(tau(1)) else None

    def add(*parts):
        out = {}
        for part in parts:
            for k, v in part.items():
                out[k] = (out.get(k, 0) + v) % p
        return {k: v for k, v in out.items() if v}

    def gen(n):
        return M.gen(n) if n in M.slot_index else M.element()

    table["σb"] = simple(one, gen("σb"))
    table["σxit_1^p"] = add(simple(one, gen("σxit_1^p")), simple(-t0, gen("σb")))
    if "σxit_2" in M.slot_index:
        table["σxit_2"] = add(simple(one, gen("σxit_2")),
                              simple(A.el(xi(1)), gen("σxit_1^p")),
                              simple(t1, gen("σb")))
    if "σtaut_2" in M.slot_index:
        table["σtaut_2"] = add(simple(one, gen("σtaut_2")),
                               simple(A.el(tau(1)), gen("σxit_1^p")),
                               simple(A.el(tau(0)), gen("σxit_2")),
                               # the comodule axiom forces +tau_1 tau_0 here
                               simple(A.el(tau(1)) * A.el(tau(0)), gen("σb")))
    C = ComoduleAlgebra(A, M, {k: v for k, v in table.items() if k in M.slot_index})
    g = M.gen
    cands = {}
    if "σxit_1^p" in M.slot_index:
        cands["lambda_1'"] = g("σxit_1^p") - g(tau(0)) * g("σb")
    if "σxit_2" in M.slot_index:
        cands["lambda_2"] = g("σxit_2") - g(xi(1)) * g("σxit_1^p") + g(tau(1)) * g("σb")
    if "σtaut_2" in M.slot_index:
        # found as the degree-2p^2 primitive; not printed in closed form upstream
        cands["mu_2"] = (g("σtaut_2") - g(tau(1)) * g("σxit_1^p") - g(tau(0)) * g("σxit_2")
                         - g(tau(0)) * g(tau(1)) * g("σb")
                         + g(tau(0)) * g(xi(1)) * g("σxit_1^p"))
    if "σb" in M.generator_map:
        cands["σb"] = g("σb")
    return C, cands
