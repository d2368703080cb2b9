"""Representations, pushed cocycles, associated sections, morphisms."""

import numpy as np
import pytest

from sheafgauge import (
    AssociatedSection,
    EmptyOverlapError,
    EquivarianceError,
    FieldMismatchError,
    Jet,
    JetMatrix,
    MatrixField,
    PrincipalSectionLocal,
    ScalarField,
    TensorialMorphismData,
    catalog_elements,
    check_components,
    check_lie_type,
    check_representation,
    check_vector_cocycle,
    evaluate_tensorial,
    gl1_diag_powers,
    group_mul,
    mat_inv,
    mat_mul,
    quotient_reduce,
    random_element,
    random_principal_section,
    random_scalar_field,
    random_section,
    random_vector_data,
    rep_by_name,
    section_add,
    section_smul,
    section_to_tensorial,
    section_transition,
    so2_in_gl2,
    tensorial_to_section,
    trivial_rep,
)
from sheafgauge.associated import push_cocycle
from sheafgauge.errors import ScenarioError

REPS = {
    "mobius": gl1_diag_powers(1, 2),
    "so2": so2_in_gl2(),
    "shear-frame": trivial_rep(2),
}


def field_gap(f, g):
    return max(f.data[p].max_abs_diff(g.data[p]) for p in f.points)


def section_gap(s, t):
    return max(field_gap(s.components[a], t.components[a])
               for a in s.components)


class TestRepresentations:
    def test_standard_rep_is_identity_map(self, shear_pipe):
        R = trivial_rep(2)
        g = catalog_elements(R.source, shear_pipe.cover, "alpha")[2]
        assert field_gap(R.phi(g), g) == 0.0
        assert R.injective

    def test_so2_inclusion_keeps_entries(self, so2_pipe):
        R = so2_in_gl2()
        g = so2_pipe.P.entry("alpha", "beta")
        assert field_gap(R.phi(g), g) == 0.0
        assert R.injective

    def test_diag_powers_oracle(self):
        R = gl1_diag_powers(1, 2)
        g = MatrixField("u", 1, 1, {0: JetMatrix([[2.0]], [[[0.5]]])})
        img = R.phi(g).data[0]
        assert np.array_equal(img.value, np.diag([2.0, 4.0]))
        # d(x^2) = 2x dx jetwise
        assert np.array_equal(img.grad[0], np.diag([0.5, 2.0]))

    def test_homomorphism_over_catalog(self, pipeline):
        R = REPS[pipeline.scn.name]
        elems = catalog_elements(R.source, pipeline.cover, "alpha")
        pairs = list(zip(elems, elems[1:]))
        r = check_representation(R, pairs)
        assert r.passed and r.residual <= 1e-10

    def test_rep_by_name_grammar(self):
        assert rep_by_name("trivial(3)").n == 3
        assert rep_by_name("gl1_diag_powers(2, -1)").n == 2
        assert rep_by_name("so2_in_gl2").injective
        assert not rep_by_name("gl1_diag_powers(0)").injective
        with pytest.raises(ScenarioError):
            rep_by_name("fourier")

    def test_rep_by_name_checks_ambient(self, so2_pipe, mobius_pipe):
        rep_by_name("so2_in_gl2", source=so2_pipe.group)
        with pytest.raises(ScenarioError):
            rep_by_name("so2_in_gl2", source=mobius_pipe.group)


class TestLieType:
    def test_both_conditions_pass(self, pipeline):
        R = REPS[pipeline.scn.name]
        elems = catalog_elements(R.source, pipeline.cover, "alpha")
        parts = check_lie_type(R, elems)
        assert set(parts) == {"mc", "rho"}
        assert parts["mc"].passed and parts["mc"].residual <= 1e-9
        assert parts["rho"].passed and parts["rho"].residual <= 1e-9

    def test_cocycle_entries_are_valid_elements(self, so2_pipe):
        parts = check_lie_type(so2_in_gl2(),
                               [so2_pipe.P.entry("alpha", "beta")])
        assert all(r.passed for r in parts.values())


class TestPushCocycle:
    def test_standard_rep_pushes_verbatim(self, shear_pipe):
        E = push_cocycle(shear_pipe.P, trivial_rep(2))
        for pair, f in E.cocycle.items():
            assert field_gap(f, shear_pipe.P.cocycle[pair]) == 0.0

    def test_inclusion_pushes_verbatim(self, so2_pipe):
        assert field_gap(so2_pipe.E.entry("alpha", "beta"),
                         so2_pipe.P.entry("alpha", "beta")) <= 1e-14

    def test_mobius_flip_becomes_diag(self, mobius_pipe):
        e = mobius_pipe.E.entry("gamma", "alpha")
        for p in e.points:
            assert np.array_equal(e.data[p].value, np.diag([-1.0, 1.0]))
            assert not e.data[p].grad.any()

    def test_pushed_cocycle_identities(self, pipeline):
        parts = check_vector_cocycle(pipeline.E)
        assert all(r.passed and r.residual <= 1e-10 for r in parts.values())

    def test_rank_matches_representation(self, pipeline):
        assert pipeline.E.rank == REPS[pipeline.scn.name].n

    def test_as_principal_reuses_group_checks(self, mobius_pipe):
        from sheafgauge import check_cocycle
        P2 = mobius_pipe.E.as_principal()
        assert P2.group.ambient == mobius_pipe.E.rank
        assert all(r.passed for r in check_cocycle(P2).values())


class TestQuotientReduce:
    def vector_data(self, P, R, chart, rng):
        pts = P.cover.regions[chart]
        data = random_vector_data(pts, R.n, P.cover.dim(chart), rng)
        return MatrixField(chart, R.n, 1, data)

    def test_unit_section_keeps_data(self, so2_pipe):
        P, R = so2_pipe.P, so2_pipe.R
        pts = P.cover.regions["alpha"]
        s = PrincipalSectionLocal(
            "alpha", P.group.unit_field("alpha", pts, 1))
        h = self.vector_data(P, R, "alpha", np.random.default_rng(0))
        assert field_gap(quotient_reduce(P, R, s, h), h) == 0.0

    def test_equivalent_pairs_reduce_alike(self, pipeline):
        P, R = pipeline.P, pipeline.R
        rng = np.random.default_rng(11)
        s = random_principal_section(P, "alpha", rng)
        h = self.vector_data(P, R, "alpha", rng)
        base = quotient_reduce(P, R, s, h)
        for g in catalog_elements(P.group, P.cover, "alpha"):
            moved = PrincipalSectionLocal("alpha", group_mul(s.factor, g))
            hg = mat_mul(R.phi(mat_inv(g)), h)
            assert field_gap(quotient_reduce(P, R, moved, hg), base) <= 1e-12

    def test_shape_and_domain_validated(self, so2_pipe):
        P, R = so2_pipe.P, so2_pipe.R
        rng = np.random.default_rng(1)
        s = random_principal_section(P, "alpha", rng)
        wide = MatrixField("alpha", 2, 2, {
            p: JetMatrix(np.eye(2), np.zeros((1, 2, 2))) for p in s.points})
        with pytest.raises(FieldMismatchError):
            quotient_reduce(P, R, s, wide)
        short = self.vector_data(P, R, "alpha", rng)
        short = short.restrict(sorted(s.points)[:2])
        with pytest.raises(FieldMismatchError):
            quotient_reduce(P, R, s, short)


def zero_section(E):
    comps = {}
    for rid in E.cover.region_ids():
        dim = E.cover.dim(rid)
        comps[rid] = MatrixField(rid, E.rank, 1, {
            p: JetMatrix(np.zeros((E.rank, 1)), np.zeros((dim, E.rank, 1)))
            for p in E.cover.regions[rid]})
    return AssociatedSection(comps)


def ones_field(points):
    return ScalarField("base", {p: Jet(1.0, [0.0]) for p in points})


class TestSectionArithmetic:
    def test_zero_is_neutral(self, pipeline):
        E = pipeline.E
        s = random_section(E, np.random.default_rng(3))
        out = section_add(E, s, zero_section(E))
        assert section_gap(out, s) == 0.0

    def test_one_is_neutral(self, pipeline):
        E = pipeline.E
        s = random_section(E, np.random.default_rng(4))
        out = section_smul(E, ones_field(E.cover.points), s)
        assert section_gap(out, s) == 0.0

    def test_scalar_distributes_over_add(self, pipeline):
        E = pipeline.E
        rng = np.random.default_rng(5)
        s = random_section(E, rng)
        t = random_section(E, rng)
        a = random_scalar_field("base", E.cover.points, 1, rng)
        lhs = section_smul(E, a, section_add(E, s, t))
        rhs = section_add(E, section_smul(E, a, s), section_smul(E, a, t))
        assert section_gap(lhs, rhs) <= 1e-14

    def test_results_stay_compatible(self, mobius_pipe):
        E = mobius_pipe.E
        rng = np.random.default_rng(6)
        s = random_section(E, rng)
        t = random_section(E, rng)
        a = random_scalar_field("base", E.cover.points, 1, rng)
        out = section_add(E, section_smul(E, a, s), t)
        assert check_components(E, out.components).residual <= 1e-12

    def test_incompatible_section_rejected(self, so2_pipe):
        E = so2_pipe.E
        s = random_section(E, np.random.default_rng(7))
        p0 = sorted(E.cover.overlap_points("alpha", "beta"))[0]
        bad = dict(s.components)
        bad["alpha"] = bad["alpha"].map_entries(
            lambda p, m: JetMatrix(m.value + (1e-3 if p == p0 else 0.0),
                                   m.grad))
        broken = AssociatedSection(bad)
        with pytest.raises(EquivarianceError) as exc:
            section_add(E, broken, s)
        assert exc.value.residual >= 5e-4
        assert exc.value.point == p0

    def test_scalar_must_cover_components(self, so2_pipe):
        E = so2_pipe.E
        s = random_section(E, np.random.default_rng(8))
        partial = ones_field(sorted(E.cover.points)[:3])
        with pytest.raises(FieldMismatchError):
            section_smul(E, partial, s)

    def test_chart_families_must_match(self, so2_pipe):
        E = so2_pipe.E
        s = random_section(E, np.random.default_rng(9))
        t = AssociatedSection({"alpha": s.components["alpha"]})
        with pytest.raises(FieldMismatchError):
            section_add(E, s, t)


class TestMobiusOddSection:
    """The flip bundle carries a half-angle section.

    With a single sign flip in the cocycle, sin(t/2) continued past the
    wrap needs its sign reversed on the wrapped points of the closing
    chart; the square of the half-angle sine is single valued and fills
    the square-power component.
    """

    def build(self, cover):
        comps = {}
        for rid in cover.region_ids():
            data = {}
            for p in cover.regions[rid]:
                t = float(cover.coord(rid, p)[0])
                flip = -1.0 if rid == "gamma" and p in (0, 1) else 1.0
                v1, g1 = flip * np.sin(t / 2), flip * np.cos(t / 2) / 2
                v2, g2 = np.sin(t / 2) ** 2, np.sin(t / 2) * np.cos(t / 2)
                data[p] = JetMatrix([[v1], [v2]], [[[g1], [g2]]])
            comps[rid] = MatrixField(rid, 2, 1, data)
        return AssociatedSection(comps)

    def test_half_angle_section_is_compatible(self, mobius_pipe):
        s = self.build(mobius_pipe.cover)
        assert check_components(mobius_pipe.E, s.components).residual == 0.0

    def test_unflipped_variant_is_not(self, mobius_pipe):
        cover = mobius_pipe.cover
        s = self.build(cover)
        naive = dict(s.components)
        naive["gamma"] = naive["gamma"].map_entries(
            lambda p, m: JetMatrix(np.abs(m.value) * np.sign(m.value)
                                   if p not in (0, 1)
                                   else m.value * np.array([[-1.0], [1.0]]),
                                   m.grad))
        r = check_components(mobius_pipe.E, naive)
        assert not r.passed
        assert r.worst_point in (0, 1)


class TestMorphismRoundTrips:
    def test_section_tensorial_roundtrip(self, pipeline):
        E, P, R = pipeline.E, pipeline.P, pipeline.R
        s = random_section(E, np.random.default_rng(12))
        f = section_to_tensorial(E, P, R, s)
        back = tensorial_to_section(E, P, R, f)
        assert section_gap(back, s) == 0.0

    def test_tensorial_section_roundtrip(self, pipeline):
        E, P, R = pipeline.E, pipeline.P, pipeline.R
        s = random_section(E, np.random.default_rng(13))
        f = section_to_tensorial(E, P, R, s)
        again = section_to_tensorial(E, P, R, tensorial_to_section(E, P, R, f))
        assert all(field_gap(again.values[a], f.values[a]) == 0.0
                   for a in f.values)

    def test_incompatible_values_rejected(self, so2_pipe):
        E, P, R = so2_pipe.E, so2_pipe.P, so2_pipe.R
        s = random_section(E, np.random.default_rng(14))
        vals = dict(s.components)
        vals["beta"] = vals["beta"].map_entries(
            lambda p, m: JetMatrix(m.value + 1e-2, m.grad))
        with pytest.raises(EquivarianceError):
            tensorial_to_section(E, P, R, TensorialMorphismData(vals))

    def test_evaluate_on_natural_section(self, so2_pipe):
        E, P, R = so2_pipe.E, so2_pipe.P, so2_pipe.R
        s = random_section(E, np.random.default_rng(15))
        f = section_to_tensorial(E, P, R, s)
        nat = PrincipalSectionLocal("alpha", P.group.unit_field(
            "alpha", P.cover.regions["alpha"], 1))
        out = evaluate_tensorial(P, R, f, nat)
        assert field_gap(out, s.components["alpha"]) <= 1e-15

    def test_evaluate_twists_by_factor(self, pipeline):
        E, P, R = pipeline.E, pipeline.P, pipeline.R
        rng = np.random.default_rng(16)
        s = random_section(E, rng)
        f = section_to_tensorial(E, P, R, s)
        g = random_element(P.group, P.cover, "alpha", rng)
        out = evaluate_tensorial(P, R, f, PrincipalSectionLocal("alpha", g))
        want = mat_mul(R.phi(mat_inv(g)), s.components["alpha"])
        assert field_gap(out, want) <= 1e-12

    def test_evaluate_off_domain_rejected(self, mobius_pipe):
        E, P, R = mobius_pipe.E, mobius_pipe.P, mobius_pipe.R
        s = random_section(E, np.random.default_rng(17))
        only_beta = TensorialMorphismData({
            "beta": s.components["beta"].restrict(
                [p for p in P.cover.regions["beta"]
                 if p not in P.cover.regions["alpha"]])})
        inner = [p for p in P.cover.regions["alpha"]
                 if p not in P.cover.regions["beta"]]
        nat = PrincipalSectionLocal(
            "alpha", P.group.unit_field("alpha", inner, 1))
        with pytest.raises(EmptyOverlapError):
            evaluate_tensorial(P, R, only_beta, nat)
