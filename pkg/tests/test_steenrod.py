import itertools

import pytest

from thhmay.algebra import AlgebraPresentation, exterior, poincare_series, polynomial
from thhmay.inputs import primitives_target, thh_j_ell_comodule, v1_comodule
from thhmay.steenrod import (CoactionError, ComoduleAlgebra, DualSteenrodAlgebra,
                             milnor_tau, milnor_xi, pure, simple, tau, tensor_add, xi)


@pytest.fixture(scope="module")
def A3():
    return DualSteenrodAlgebra(3, 30)


def test_generator_degrees(A3):
    degs = {s.name: s.degree for s in A3.alg.slots}
    assert degs == {"tau_0": 1, "xi_1": 4, "tau_1": 5, "xi_2": 16, "tau_2": 17}


def test_coproduct_low_degree(A3):
    A = A3.alg
    t0 = A3.el(tau(0))
    assert A3.coproduct(t0) == tensor_add(simple(t0, A.unit()), simple(A.unit(), t0), 3)
    assert A3.coproduct(A.unit()) == {(A.one, A.one): 1}


def test_coproduct_xi2(A3):
    x1, x2, one = A3.el(xi(1)), A3.el(xi(2)), A3.alg.unit()
    want = {}
    for a, b in [(one, x2), (x1, x1 ** 3), (x2, one)]:
        want = tensor_add(want, simple(a, b), 3)
    assert A3.coproduct(x2) == want


def test_hopf_axioms_p3(A3):
    for m in A3.alg.basis():
        assert A3.check_counit(m)
        assert A3.check_coassociative(m)


def test_hopf_axioms_p5():
    A = DualSteenrodAlgebra(5, 50)
    for m in A.alg.basis():
        assert A.check_counit(m) and A.check_coassociative(m)


def test_milnor_generators(A3):
    t0, t1, x1 = A3.el(tau(0)), A3.el(tau(1)), A3.el(xi(1))
    assert milnor_tau(A3, 0) == -t0
    assert milnor_tau(A3, 1) == -t1 + t0 * x1
    assert milnor_xi(A3, 1) == -x1
    assert milnor_xi(A3, 2) == -A3.el(xi(2)) + x1 ** 4


def test_milnor_coproduct_shape(A3):
    # unconjugated: Δ(xi_1) = xi_1 ⊗ 1 + 1 ⊗ xi_1, Δ(tau_1) = tau_1 ⊗ 1 + xi_1 ⊗ tau_0 + 1 ⊗ tau_1
    one = A3.alg.unit()
    x1, t0, t1 = milnor_xi(A3, 1), milnor_tau(A3, 0), milnor_tau(A3, 1)
    want = {}
    for a, b in [(t1, one), (x1, t0), (one, t1)]:
        want = tensor_add(want, simple(a, b), 3)
    assert A3.coproduct(t1) == want


def test_pairings(A3):
    A = A3.alg
    assert A3.p_power_pairing(A.slot_monomial(xi(1))) == (1, -1)
    assert A3.p_power_pairing(A.slot_monomial(xi(2))) == (4, 1)
    assert A3.p_power_pairing(A.slot_monomial(tau(1))) is None
    assert A3.beta_pairing(A.slot_monomial(tau(0))) == -1


@pytest.fixture(scope="module")
def V():
    return v1_comodule(3, 24)


def test_v1_coactions(V):
    C, _ = V
    M, A = C.M, C.steenrod
    a, v = M.gen("alpha_1"), M.gen("v_1")
    t0, one = A.el(tau(0)), A.alg.unit()
    assert C.coaction(a) == simple(one, a)
    assert C.coaction(v) == tensor_add(simple(t0, a), simple(one, v), 3)
    want = tensor_add(simple(one, v * v), simple(t0, a * v), 3, scale=2)
    assert C.coaction(v * v) == want


def test_comodule_axiom_on_generators(V):
    C, _ = V
    assert C.check_counit()
    for m in C.generator_monomials():
        assert C.check_comodule_axiom(m)


def test_primitive_routes_agree(V):
    C, _ = V
    a = C.primitives(20, method="coaction")
    b = C.primitives(20, method="steenrod")
    for k in range(21):
        assert len(a[k]) == len(b[k]), k
        for x in b[k]:
            assert C.is_primitive(x)


def test_primitives_low_degrees(V):
    C, cands = V
    prims = C.primitives(12, method="coaction")
    assert [len(prims[k]) for k in range(7)] == [1, 0, 0, 1, 2, 3, 1]
    assert [len(prims[k]) for k in range(13)] == list(poincare_series(primitives_target(3, 12)))
    for x in cands.values():
        assert C.is_primitive(x)


def test_primitives_form_a_subalgebra(V):
    C, _ = V
    prims = C.primitives(14, method="coaction")
    low = [x for k in range(1, 8) for x in prims[k]]
    for x, y in itertools.combinations_with_replacement(low, 2):
        if (x * y).terms and (x * y).degree() <= 14:
            assert C.is_primitive(x * y)


def test_trivial_comodule():
    A = DualSteenrodAlgebra(3, 12)
    M = AlgebraPresentation(3, (exterior("x", 3), polynomial("y", 4)), 12)
    C = ComoduleAlgebra(A, M, {g: pure(A.alg, M.gen(g)) for g in ("x", "y")})
    prims = C.primitives(12)
    assert [len(prims[k]) for k in range(13)] == [len(M.basis_in_degree(k)) for k in range(13)]


def test_missing_coaction():
    A = DualSteenrodAlgebra(3, 12)
    M = AlgebraPresentation(3, (exterior("x", 3), polynomial("y", 4)), 12)
    with pytest.raises(CoactionError):
        ComoduleAlgebra(A, M, {"x": pure(A.alg, M.gen("x"))})


def test_inhomogeneous_coaction_is_rejected():
    A = DualSteenrodAlgebra(3, 12)
    M = AlgebraPresentation(3, (exterior("x", 3), polynomial("y", 4)), 12)
    bad = tensor_add(pure(A.alg, M.gen("y")), simple(A.el(tau(0)), M.gen("y")), 3)
    with pytest.raises(CoactionError):
        ComoduleAlgebra(A, M, {"x": pure(A.alg, M.gen("x")), "y": bad})


@pytest.fixture(scope="module")
def J():
    return thh_j_ell_comodule(3, 24)


def with_entry(C, name, t):
    table = dict(C.coaction_table)
    table[name] = t
    return ComoduleAlgebra(C.steenrod, C.M, table)


def test_thh_j_ell_table_is_a_comodule(J):
    C, cands = J
    for m in C.generator_monomials():
        assert C.check_comodule_axiom(m)
    for x in cands.values():
        assert C.is_primitive(x)


def test_barred_reading_of_tau1_fails(J):
    # reading tau_1 in ψ(σxit_2) as the conjugate breaks coassociativity
    C, _ = J
    A, M = C.steenrod, C.M
    one = A.alg.unit()
    t = {}
    for a, b in [(one, M.gen("σxit_2")), (A.el(xi(1)), M.gen("σxit_1^p")),
                 (A.el(tau(1)), M.gen("σb"))]:
        t = tensor_add(t, simple(a, b), 3)
    bad = with_entry(C, "σxit_2", t)
    assert not bad.check_comodule_axiom(M.slot_monomial("σxit_2"))


def test_sign_of_last_term_in_sigma_taut2(J):
    C, _ = J
    A, M = C.steenrod, C.M
    term = simple(A.el(tau(1)) * A.el(tau(0)), M.gen("σb"))
    flipped = tensor_add(C.coaction_table["σtaut_2"], term, 3, scale=-2)
    bad = with_entry(C, "σtaut_2", flipped)
    assert not bad.check_comodule_axiom(M.slot_monomial("σtaut_2"))
