"""The computation pipeline: Bökstedt, HF_p-May, primitives, V(1)-May,
THH(j;ℓ) primitives and the long exact sequence check.

Each ``run_*`` returns a :class:`ScenarioResult` whose verdicts compare
computed dimensions with the target algebra degree by degree.  Degree N
is never resolved (its incoming differentials start outside the window).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import inputs
from .algebra import (AlgebraPresentation, Kind, StructureTable, divided,
                      exterior, poincare_series, polynomial)
from .fp import FpMatrix, PrimeField, rank, sparse_rank
from .hochschild import sigma
from .sseq import (BOKSTEDT, MAY, DifferentialRuleFamily, ExtensionRule, Homology,
                   Obstruction, Rule, SSPage, Survivor, apply_extensions, apply_rules,
                   bidegree_obstruction_report, init_page, reassemble, turn_page)
from .steenrod import tau, xi

SCENARIOS = ("bokstedt", "hfp-may", "primitives", "v1-may", "thh-j-ell", "les")


@dataclass(frozen=True)
class Verdict:
    degree: int
    expected: int
    got: int

    @property
    def ok(self) -> bool:
        return self.expected == self.got


@dataclass
class ScenarioResult:
    scenario: str
    p: int
    N: int
    verdicts: list[Verdict] = field(default_factory=list)
    unresolved: list[int] = field(default_factory=list)
    checks: dict[str, bool] = field(default_factory=dict)
    renaming: dict[str, str] = field(default_factory=dict)
    obstructions: list[Obstruction] = field(default_factory=list)
    excluded: list[tuple[Obstruction, str]] = field(default_factory=list)
    pages: dict[str, SSPage] = field(default_factory=dict)
    presentations: dict[str, AlgebraPresentation] = field(default_factory=dict)
    data: dict = field(default_factory=dict)
    notes: list[str] = field(default_factory=list)
    chart_page: str | None = None

    @property
    def ok(self) -> bool:
        return all(v.ok for v in self.verdicts) and all(self.checks.values())

    @property
    def status(self) -> str:
        if not self.ok:
            return "mismatch"
        return "match (window)" if self.unresolved else "match"

    def failures(self) -> list[str]:
        out = [f"degree {v.degree}: expected {v.expected}, got {v.got}"
               for v in self.verdicts if not v.ok]
        out += [f"check failed: {k}" for k, ok in self.checks.items() if not ok]
        return out


def compare(got, expected, degrees) -> list[Verdict]:
    return [Verdict(k, expected[k], got[k]) for k in degrees]


def _resolved(N):
    return range(N)


def _series(pres, N):
    return list(poincare_series(pres, N))


def _validate(p, N):
    PrimeField(p)
    if N < 1:
        raise ValueError("cutoff must be positive")


def build_inputs(p: int, N: int) -> dict:
    """Every input presentation and comodule the scenarios start from."""
    _validate(p, N)
    v1, v1_cands = inputs.v1_comodule(p, N)
    jl, jl_cands = inputs.thh_j_ell_comodule(p, N)
    return {
        "lemma": inputs.lemma_input(p, N),
        "hh": inputs.hh_input(p, N),
        "thh_j": inputs.thh_j_answer(p, N),
        "v1_comodule": v1, "v1_candidates": v1_cands,
        "thh_j_ell_comodule": jl, "thh_j_ell_candidates": jl_cands,
        "degrees": inputs.class_degrees(p),
    }


# -- Bökstedt ---------------------------------------------------------------

def bokstedt_family(pres: AlgebraPresentation, p: int) -> DifferentialRuleFamily:
    """d_{p-1} γ_{p^m}(στ_i) = γ_{p^m - p}(στ_i) σξ_{i+1} for m >= 1."""
    rules = []
    for s in pres.slots:
        if s.power == 1 or not s.source.startswith(sigma("tau_")):
            continue
        i = int(s.source.split("_")[1])
        target = pres.gamma(s.source, s.power - p) * pres.gen(sigma(xi(i + 1)))
        rules.append(Rule(s.name, target))
    return DifferentialRuleFamily(p - 1, tuple(rules), "bokstedt d_{p-1}")


def _dp_survivor(page_pres, name, base, shift=1):
    """Survivor Γ(name) represented by γ_{shift·k}(base) on the page."""
    p = page_pres.p
    reps = {}
    k = p
    while shift * k * page_pres.generator_map[base].degree <= page_pres.cutoff:
        reps[k] = page_pres.gamma(base, shift * k)
        k *= p
    return Survivor(name, page_pres.gamma(base, shift), Kind.DIVIDED_POWER, slot_reps=reps)


def run_bokstedt(p: int, N: int) -> ScenarioResult:
    _validate(p, N)
    res = ScenarioResult("bokstedt", p, N)
    E = init_page(inputs.hh_input(p, N), BOKSTEDT, r=p - 1)
    res.notes.append(f"the d_{p - 1} family is the first differential; E_2 = E_{p - 1}")
    fam = bokstedt_family(E.pres, p)
    E = apply_rules(E, fam)
    hom = turn_page(E)
    pres = E.pres
    survivors = []
    for g in pres.generators:
        name = g.name
        if name.startswith(sigma("xi_")) and name != sigma(xi(1)):
            continue  # boundaries
        if name.startswith(sigma("tau_")):
            survivors.append(Survivor(name, pres.gen(name), Kind.TRUNCATED, p))
        elif g.kind is Kind.DIVIDED_POWER:
            survivors.append(_dp_survivor(pres, name, name))
        else:
            survivors.append(Survivor(name, pres.gen(name), g.kind))
    Ep = reassemble(hom, survivors)
    report = bidegree_obstruction_report(Ep)
    residual = []
    for ob in report:
        slot = Ep.pres.slots[Ep.pres.slot_index[ob.generator]]
        if slot.source == "σalpha_1":
            res.excluded.append((ob, "excluded by the known answer: all dimensions of the "
                                     "target are already attained without it"))
        else:
            residual.append(ob)
    res.obstructions = residual
    res.checks["obstruction report empty after exclusions"] = not residual
    exts = []
    i = 1
    while sigma(tau(i)) in Ep.pres.generator_map:
        exts.append(ExtensionRule(sigma(tau(i)), sigma(tau(i + 1)), p))
        i += 1
    final = apply_extensions(Ep.pres, exts)
    target = inputs.bokstedt_target(p, N)
    got = hom.degree_dims()
    exp = _series(target, N)
    res.verdicts = compare(got, exp, _resolved(N))
    res.checks["extended presentation equals target"] = _series(final, N)[:N] == exp[:N]
    if sigma(tau(1)) in final.generator_map:
        st1 = final.generator_map[sigma(tau(1))]
        # a truncation above the window cannot be seen
        res.checks["polynomial στ_1 after extensions"] = (
            st1.kind is Kind.POLYNOMIAL or st1.height * st1.degree > N)
    res.unresolved = [N]
    res.pages = {"E_bokstedt": E, "E_inf": Ep}
    res.presentations = {"final": final, "target": target}
    res.chart_page = "E_bokstedt"
    return res


# -- HF_p-May -----------------------------------------------------------------

def hfp_may_family(pres):
    pairs = [(xi(1), "alpha_1"), (sigma(xi(1)), "σalpha_1"),
             (tau(1), "v_1"), (sigma(tau(1)), "σv_1")]
    return DifferentialRuleFamily(1, tuple(Rule(s, pres.gen(t)) for s, t in pairs
                                           if s in pres.slot_index), "HF_p-May d_1")


def run_hfp_may(p: int, N: int, bokstedt: ScenarioResult | None = None) -> ScenarioResult:
    _validate(p, N)
    res = ScenarioResult("hfp-may", p, N)
    base = bokstedt.presentations["final"] if bokstedt else inputs.bokstedt_target(p, N)
    E1 = init_page(inputs.may_weights(base), MAY, r=1)
    E1 = apply_rules(E1, hfp_may_family(E1.pres))
    hom = turn_page(E1)
    pr = E1.pres
    g = pr.gen
    survivors = []
    ren = {}
    for gen in pr.generators:
        n = gen.name
        if n in (xi(1), tau(1), "alpha_1", "v_1", sigma(xi(1)), sigma(tau(1)), "σv_1", "σalpha_1"):
            continue
        survivors.append(Survivor({xi(2): "xit_2", tau(2): "taut_2"}.get(n, n), g(n), gen.kind))
    d = inputs.class_degrees(p)
    if 2 * p * (p - 1) <= N:
        survivors.append(Survivor("xit_1^p", g(xi(1)) ** p))
        ren["xit_1^p"] = f"xi_1^{p}"
    if d["b"] <= N:
        survivors.append(Survivor("b", g(xi(1)) ** (p - 1) * g("alpha_1")))
        ren["b"] = f"xi_1^{p - 1}·alpha_1"
    if d["σb"] <= N:
        survivors.append(_dp_survivor(pr, "σb", "σalpha_1", p))
        ren["σb"] = f"γ_{p}(σalpha_1)"
    if d["lambda_1'"] <= N:
        survivors.append(Survivor("σxit_1^p", g(sigma(xi(1))) * pr.gamma("σalpha_1", p - 1)))
        ren["σxit_1^p"] = f"σxi_1·γ_{p - 1}(σalpha_1)"
    if d["lambda_2"] <= N:
        survivors.append(Survivor("σxit_2", g(sigma(tau(1))) ** (p - 1) * g("σv_1")))
        ren["σxit_2"] = f"σtau_1^{p - 1}·σv_1"
    if d["mu_2"] <= N:
        survivors.append(Survivor("σtaut_2", g(sigma(tau(1))) ** p, Kind.POLYNOMIAL))
        ren["σtaut_2"] = f"σtau_1^{p}"
    ren.update({"xit_2": xi(2), "taut_2": tau(2)})
    E2 = reassemble(hom, survivors)
    target = inputs.thh_j_answer(p, N)
    got = hom.degree_dims()
    res.verdicts = compare(got, _series(target, N), _resolved(N))
    gap = range(1, min(2 * p * p - 2 * p - 1, N))
    res.checks["E_2 columns vanish below |b|"] = all(got[s] == 0 for s in gap)
    res.renaming = ren
    res.obstructions = bidegree_obstruction_report(E2)
    res.notes.append("E_2 = E_inf: its dimensions already equal the known answer")
    res.unresolved = [N]
    res.pages = {"E_1": E1, "E_2": E2}
    res.presentations = {"E_2": E2.pres, "target": target}
    res.chart_page = "E_1"
    return res


# -- primitives -----------------------------------------------------------------

def _primitives_scenario(name, p, N, build, target):
    from .steenrod import package_primitives
    res = ScenarioResult(name, p, N)
    C, cands = build(p, N)
    res.checks["comodule axiom"] = all(C.check_comodule_axiom(m) for m in C.generator_monomials())
    res.checks["counit"] = C.check_counit()
    prims = C.primitives(N)
    got = [len(prims[k]) for k in range(N + 1)]
    res.verdicts = compare(got, _series(target, N), range(N + 1))
    packed = package_primitives(C, prims, target, cands)
    res.checks["named classes are primitive and span"] = all(ok for _, _, ok in packed.values())
    res.renaming = {k: repr(v) for k, v in cands.items()}
    res.data = {"comodule": C, "primitives": prims, "candidates": cands}
    res.presentations = {"target": target}
    return res


def run_primitives(p: int, N: int) -> ScenarioResult:
    _validate(p, N)
    return _primitives_scenario("primitives", p, N, inputs.v1_comodule,
                                inputs.primitives_target(p, N))


def run_thh_j_ell(p: int, N: int) -> ScenarioResult:
    _validate(p, N)
    return _primitives_scenario("thh-j-ell", p, N, inputs.thh_j_ell_comodule,
                                inputs.thh_j_ell_target(p, N))


# -- V(1)-May -------------------------------------------------------------------

TABLE_CLASSES = ("alpha_1", "lambda_1'", "lambda_2·alpha_1", "lambda_2·lambda_1'",
                 "lambda_2·lambda_1'·alpha_1")


def theorem_presentation(p: int, N: int) -> AlgebraPresentation:
    """P(mu_2) ⊗ Γ(σb) ⊗ F_p{1, α_1, λ_1', λ_2α_1, λ_2λ_1', λ_2λ_1'α_1}."""
    d = inputs.class_degrees(p)
    a, l1, l2 = d["alpha_1"], d["lambda_1'"], d["lambda_2"]
    classes = [("alpha_1", a, 1), ("lambda_1'", l1, p - 1), ("lambda_2·alpha_1", l2 + a, 2),
               ("lambda_2·lambda_1'", l2 + l1, p), ("lambda_2·lambda_1'·alpha_1", l2 + l1 + a, p + 1)]
    top = "lambda_2·lambda_1'·alpha_1"
    products = {("alpha_1", "lambda_2·lambda_1'"): {top: 1},
                ("lambda_2·lambda_1'", "alpha_1"): {top: 1},
                ("lambda_1'", "lambda_2·alpha_1"): {top: 1},
                ("lambda_2·alpha_1", "lambda_1'"): {top: 1}}
    table = StructureTable.build(classes, products)
    gens = [g for g in (polynomial("mu_2", d["mu_2"]), divided("σb", d["σb"], p))
            if g.degree <= N]
    return AlgebraPresentation(p, tuple(gens), N, table)


def dense_homology(page: SSPage) -> list[int]:
    """Homology dimensions by total degree from dense matrices of d."""
    pres = page.pres
    p = pres.p
    N = pres.cutoff
    basis = {k: pres.basis_in_degree(k) for k in range(N + 1)}
    ranks = [0] * (N + 2)
    for k in range(1, N + 1):
        src, tgt = basis[k], basis[k - 1]
        if not src or not tgt:
            continue
        idx = {m: i for i, m in enumerate(tgt)}
        a = np.zeros((len(tgt), len(src)), dtype=np.int64)
        for j, m in enumerate(src):
            for x, c in page.d[m].items():
                a[idx[x], j] = c
        ranks[k] = rank(FpMatrix(p, a))
    return [len(basis[k]) - ranks[k] - ranks[k + 1] for k in range(N + 1)]


def run_v1_may(p: int, N: int) -> ScenarioResult:
    _validate(p, N)
    res = ScenarioResult("v1-may", p, N)
    d = inputs.class_degrees(p)
    E1 = init_page(inputs.primitives_target(p, N), MAY, r=1)
    g = E1.pres.gen
    pairs = [("lambda_1", "σalpha_1"), ("epsilon_1", "vt_1"), ("mu_1", "σvt_1")]
    fam = DifferentialRuleFamily(1, tuple(Rule(a, g(b)) for a, b in pairs
                                          if a in E1.pres.slot_index), "V(1)-May d_1")
    E1 = apply_rules(E1, fam)
    hom1 = turn_page(E1)
    res.checks["E_2 equals dense homology of E_1"] = (
        dense_homology(E1)[:N] == hom1.degree_dims()[:N])
    pr = E1.pres
    survivors = [Survivor("alpha_1", g("alpha_1"))] if d["alpha_1"] <= N else []
    if d["lambda_1'"] <= N:
        survivors.append(Survivor("lambda_1'", g("lambda_1") * pr.gamma("σalpha_1", p - 1)))
    if d["lambda_2"] <= N:
        survivors.append(Survivor("lambda_2", g("mu_1") ** (p - 1) * g("σvt_1")))
    if d["mu_2"] <= N:
        survivors.append(Survivor("mu_2", g("mu_1") ** p, Kind.POLYNOMIAL))
    if d["σb"] <= N:
        survivors.append(_dp_survivor(pr, "σb", "σalpha_1", p))
    E2 = reassemble(hom1, survivors)
    e2_target = inputs.v1_e2_target(p, N)
    e2_dims = hom1.degree_dims()
    res.checks["E_2 equals the stated algebra"] = e2_dims[:N] == _series(e2_target, N)[:N]
    res.data["E_2 dims"] = e2_dims
    report = bidegree_obstruction_report(E2)
    res.data["E_2 report"] = report
    res.checks["E_2 report is the d_{p-1} family"] = (
        all(o.r == p - 1 and o.generator == "lambda_2" for o in report)
        and (len(report) == 1 or d["lambda_2"] > N))
    # pages E_2 .. E_{p-2} carry no differential on generators
    Ep1 = SSPage(p - 1, E2.pres, MAY, renaming=E2.renaming)
    g2 = Ep1.pres.gen
    rules = ()
    if d["lambda_2"] <= N:
        rules = (Rule("lambda_2", g2("alpha_1") * g2("lambda_1'")),)
    Ep1 = apply_rules(Ep1, DifferentialRuleFamily(p - 1, rules, "V(1)-May d_{p-1}"))
    hom = turn_page(Ep1)
    free = []
    if "mu_2" in Ep1.pres.generator_map:
        free.append(Survivor("mu_2", g2("mu_2"), Kind.POLYNOMIAL))
    if "σb" in Ep1.pres.generator_map:
        free.append(_dp_survivor(Ep1.pres, "σb", "σb"))
    reps = {"alpha_1": g2("alpha_1")} if "alpha_1" in Ep1.pres.generator_map else {}
    if "lambda_1'" in Ep1.pres.generator_map:
        reps["lambda_1'"] = g2("lambda_1'")
    if "lambda_2" in Ep1.pres.generator_map:
        reps["lambda_2·alpha_1"] = g2("lambda_2") * g2("alpha_1")
        reps["lambda_2·lambda_1'"] = g2("lambda_2") * g2("lambda_1'")
        reps["lambda_2·lambda_1'·alpha_1"] = g2("lambda_2") * g2("lambda_1'") * g2("alpha_1")
    reps = {k: v for k, v in reps.items() if v and v.degree() <= N}
    Einf = reassemble(hom, free, table=reps)
    res.obstructions = bidegree_obstruction_report(Einf)
    res.checks["obstruction report empty"] = not res.obstructions
    target = theorem_presentation(p, N)
    res.data["E_inf dims"] = hom.degree_dims()
    res.verdicts = compare(hom.degree_dims(), _series(target, N), _resolved(N))
    res.data["products"] = _products(Einf.pres)
    if Einf.pres.table is not None and len(Einf.pres.table.classes) == 5:
        res.checks["products match the structure table"] = _products_ok(res.data["products"])
    res.unresolved = [N]
    res.pages = {"E_1": E1, "E_2": E2, "E_p-1": Ep1, "E_inf": Einf}
    res.presentations = {"E_2 target": e2_target, "target": target, "E_inf": Einf.pres}
    res.renaming = {"lambda_1'": f"lambda_1·γ_{p - 1}(σalpha_1)",
                    "lambda_2": f"mu_1^{p - 1}·σvt_1", "mu_2": f"mu_1^{p}",
                    "σb": f"γ_{p}(σalpha_1)"}
    res.chart_page = "E_p-1"
    return res


def _products(pres):
    t = pres.table
    if t is None:
        return {}
    out = {}
    for a in TABLE_CLASSES:
        for b in TABLE_CLASSES:
            if a in t.index and b in t.index:
                out[(a, b)] = {t.names[k]: c % pres.p
                               for k, c in t.multiply(t.index[a], t.index[b]) if c % pres.p}
    return out


def _products_ok(products):
    top = "lambda_2·lambda_1'·alpha_1"
    nonzero = {("alpha_1", "lambda_2·lambda_1'"), ("lambda_2·lambda_1'", "alpha_1"),
               ("lambda_1'", "lambda_2·alpha_1"), ("lambda_2·alpha_1", "lambda_1'")}
    for pair, val in products.items():
        if pair in nonzero:
            if set(val) != {top}:
                return False
        elif val:
            return False
    return True


# -- long exact sequence ----------------------------------------------------

def p1_derivation(M: AlgebraPresentation):
    """The right P^1 action on A_* ⊗ N: xi_1 -> -1, tau_1 -> -tau_0, others 0."""
    p = M.p
    images = {xi(1): -M.unit(), tau(1): -M.gen(tau(0))}
    cache = {M.one: M.element()}

    def D(m):
        got = cache.get(m)
        if got is not None:
            return got
        i = next(i for i, e in enumerate(m[1:]) if e)
        s = M.slots[i]
        rest = list(m)
        rest[i + 1] -= 1
        rest = tuple(rest)
        head = M.gen(s.name) if s.power == 1 else M.element({M.slot_monomial(s.name): 1})
        r = M.element({rest: 1})
        val = head * D(rest)
        img = images.get(s.name)
        if img is not None:
            val = val + img * r
        cache[m] = val
        return val

    def apply(x):
        out = M.element()
        for m, c in x.terms.items():
            out = out + D(m) * c
        return out
    return apply


def les_check(p: int, N: int, v1: ScenarioResult | None = None,
              jl: ScenarioResult | None = None) -> ScenarioResult:
    _validate(p, N)
    res = ScenarioResult("les", p, N)
    v1 = v1 or run_v1_may(p, N)
    jl = jl or run_thh_j_ell(p, N)
    C = jl.data["comodule"]
    prims = jl.data["primitives"]
    D = p1_derivation(C.M)
    shift = 2 * p - 2
    A_dims = v1.data["E_inf dims"]
    Cd = [len(prims[k]) for k in range(N + 1)]
    ranks = [0] * (N + 1)
    maps_primitive = True
    for k in range(N + 1):
        imgs = [D(x) for x in prims[k]]
        for y in imgs:
            if y and not C.is_primitive(y):
                maps_primitive = False
        if k - shift >= 0:
            ranks[k] = sparse_rank([dict(y.terms) for y in imgs], p)
    res.checks["boundary preserves primitives"] = maps_primitive
    verdicts = []
    for k in range(N):
        lower = k - 2 * p + 3
        coker = (Cd[lower] - ranks[k + 1]) if lower >= 0 else 0
        ker = Cd[k] - ranks[k]
        verdicts.append(Verdict(k, A_dims[k], coker + ker))
    res.verdicts = verdicts
    k0 = 2 * p * p - 1
    cands = jl.data["candidates"]
    if k0 <= N and "lambda_2" in cands:
        img = D(cands["lambda_2"])
        res.checks["boundary(lambda_2) = lambda_1'"] = img == cands["lambda_1'"]
        res.data["witness"] = {"degree": k0, "rank": ranks[k0]}
        res.checks["nonzero boundary in degree 2p^2-1"] = ranks[k0] > 0
        e2 = v1.data["E_2 dims"]
        fails = [k for k in range(N) if e2[k] != verdicts[k].got]
        res.data["E_2 collapse fails at"] = fails
        res.checks["collapse at E_2 contradicts exactness"] = bool(fails)
    res.data["ranks"] = ranks
    res.data["C dims"] = Cd
    res.unresolved = [N]
    return res


def full_run(p: int, N: int) -> dict[str, ScenarioResult]:
    _validate(p, N)
    out = {}
    out["bokstedt"] = run_bokstedt(p, N)
    out["hfp-may"] = run_hfp_may(p, N, out["bokstedt"])
    out["primitives"] = run_primitives(p, N)
    out["v1-may"] = run_v1_may(p, N)
    out["thh-j-ell"] = run_thh_j_ell(p, N)
    out["les"] = les_check(p, N, out["v1-may"], out["thh-j-ell"])
    return out


def run(scenario: str, p: int, N: int) -> dict[str, ScenarioResult]:
    if scenario == "all":
        return full_run(p, N)
    fn = {"bokstedt": run_bokstedt, "hfp-may": run_hfp_may, "primitives": run_primitives,
          "v1-may": run_v1_may, "thh-j-ell": run_thh_j_ell, "les": les_check}[scenario]
    return {scenario: fn(p, N)}
