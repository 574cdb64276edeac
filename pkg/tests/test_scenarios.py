import pytest

from thhmay.algebra import poincare_series
from thhmay.chart import chart_from_page
from thhmay.scenarios import build_inputs, full_run, les_check, run, theorem_presentation
from thhmay.steenrod import tau


@pytest.fixture(scope="module")
def R():
    return full_run(3, 40)


def test_build_inputs_degrees():
    d = build_inputs(3, 20)["degrees"]
    assert (d["alpha_1"], d["v_1"], d["b"]) == (3, 4, 11)
    A = build_inputs(3, 20)["v1_comodule"].steenrod.alg
    degs = {s.name: s.degree for s in A.slots}
    assert degs["xi_1"] == 4 and degs["tau_2"] == 17


@pytest.mark.parametrize("p", [2, 4, 9])
def test_bad_primes(p):
    with pytest.raises(ValueError):
        build_inputs(p, 20)


def test_everything_matches_at_p3(R):
    for name, res in R.items():
        assert res.ok, (name, res.failures())
        assert res.verdicts[0].got == 1


def test_bokstedt(R):
    res = R["bokstedt"]
    assert res.excluded and all(o.generator.startswith("γ") or "σalpha_1" in o.generator
                                for o, _ in res.excluded)
    assert not res.obstructions


def test_hfp_may_renaming_and_gap(R):
    res = R["hfp-may"]
    assert res.renaming["b"] == "xi_1^2·alpha_1"
    assert res.renaming["σb"] == "γ_3(σalpha_1)"
    assert res.renaming["σtaut_2"] == "σtau_1^3"
    assert res.renaming["σxit_2"] == "σtau_1^2·σv_1"
    assert res.renaming["σxit_1^p"] == "σxi_1·γ_2(σalpha_1)"
    got = [v.got for v in res.verdicts]
    assert got[1:11] == [0] * 10
    E2 = res.presentations["E_2"]
    assert E2.generator_map["b"].degree == 11 and E2.generator_map["σb"].degree == 12


def test_primitives_examples(R):
    res = R["primitives"]
    got = [v.got for v in res.verdicts]
    assert got[3] == 1 and got[4] == 2
    C, cands = res.data["comodule"], res.data["candidates"]
    assert C.is_primitive(cands["mu_1"]) and cands["mu_1"].degree() == 6
    prims4 = res.data["primitives"][4]
    assert len(prims4) == 2


def test_v1_may_e2_columns(R):
    res = R["v1-may"]
    e2 = res.data["E_2 dims"]
    assert [k for k in range(22) if e2[k]] == [0, 3, 12, 13, 15, 16, 17, 18, 20, 21]
    assert all(e2[k] == 1 for k in (0, 3, 12, 13, 15, 16, 17, 18, 20, 21))


def test_v1_may_d2_stroke(R):
    chart = chart_from_page(R["v1-may"].pages["E_p-1"])
    assert [(s.source[0], s.target[0], s.r) for s in chart.strokes if s.source[0] <= 21] == [(17, 16, 2)]


def test_v1_may_reports(R):
    res = R["v1-may"]
    (o,) = res.data["E_2 report"]
    assert (o.generator, o.r, o.source[0], o.target[0]) == ("lambda_2", 2, 17, 16)
    assert res.obstructions == []
    # degree 33 holds λ_2λ_1'α_1 and also α_1·μ_2·σb
    assert res.data["E_inf dims"][33] == 2
    top = res.pages["E_inf"].pres
    names = {top.monomial_name(m) for m in top.basis_in_degree(33)}
    assert "lambda_2·lambda_1'·alpha_1" in names
    assert res.checks["products match the structure table"]


def test_v1_may_obstructions_empty_at_36():
    (res,) = run("v1-may", 3, 36).values()
    assert res.obstructions == []


def test_theorem_presentation_low_degrees():
    assert list(poincare_series(theorem_presentation(3, 3))) == [1, 0, 0, 1]


def test_thh_j_ell(R):
    res = R["thh-j-ell"]
    C, cands = res.data["comodule"], res.data["candidates"]
    assert [cands[n].degree() for n in ("lambda_1'", "lambda_2", "mu_2")] == [13, 17, 18]
    M = C.M
    assert cands["lambda_1'"] == M.gen("σxit_1^p") - M.gen(tau(0)) * M.gen("σb")
    assert len(res.data["primitives"][13]) == 1
    assert res.verdicts[0].got == 1


def test_les(R):
    res = R["les"]
    assert res.checks["boundary(lambda_2) = lambda_1'"]
    assert res.data["witness"]["rank"] > 0
    assert res.data["E_2 collapse fails at"]
    assert res.verdicts[0].got == res.verdicts[0].expected == 1


def test_p5_all_match():
    for name, res in full_run(5, 60).items():
        assert res.ok, (name, res.failures())


def test_les_standalone_small():
    res = les_check(3, 20)
    assert res.ok
