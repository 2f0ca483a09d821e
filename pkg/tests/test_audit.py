from fractions import Fraction

import pytest

import oracles
from bsconvex import audit, cayley, group
from bsconvex.audit import (
    Constants,
    ac_table,
    audit_lemma1,
    audit_lemma2,
    build_witnesses,
    certify_divergence,
    choose_j,
    derived_constants,
    distance_lower_bound,
    witness_audit,
)
from bsconvex.cayley import ball
from bsconvex.errors import ConfigError
from bsconvex.group import element

from conftest import make_std_gset
from test_cayley import make_custom_gset, make_wide_gset, to_state


class TestConstants:
    def test_p2_values(self, gset2):
        K = derived_constants(gset2)
        assert (K.c, K.f_star_abs, K.f_dstar, K.ell, K.eps) == (1, 1, 1, 1, 0)
        # kappa: floor-exponent dominator, recomputed independently over a
        # range far past the provable cutoff
        want = max(Fraction(n, 2 ** (n // 4)) for n in range(2000))
        assert K.kappa == want == Fraction(7, 2)
        assert K.kappa_at == 7
        assert K.M == Fraction(7, 2) + Fraction(8) == Fraction(23, 2)

    def test_p3_values(self):
        K = derived_constants(make_std_gset(3))
        want = max(Fraction(n, 3 ** (n // 4)) for n in range(2000))
        assert K.kappa == want == 3
        assert K.M == 3 + Fraction(2 * 9, 2) == 12

    def test_negative_p_matches_positive(self):
        # all constants depend on |p| only for the standard generators
        K2 = derived_constants(make_std_gset(2))
        K2n = derived_constants(make_std_gset(-2))
        assert (K2.kappa, K2.M) == (K2n.kappa, K2n.M)

    def test_m_dominates_fdstar(self):
        for p in (2, 3, -2, 5):
            K = derived_constants(make_std_gset(p))
            assert K.M >= K.f_dstar

    def test_kappa_dominates_true_maximand(self, gset2):
        # n * |p|**(-nc/4) <= kappa for all n, via fourth powers
        K = derived_constants(gset2)
        for n in range(200):
            assert Fraction(n) ** 4 <= K.kappa**4 * 2**n


class TestChooseJ:
    def test_p2_frozen(self, gset2):
        # least j with (23/2)**4 * 2**(6-j) <= 1, i.e. 2**(j-6) >= 279841/16
        assert choose_j(derived_constants(gset2), 2) == 21

    def test_minimality_contract(self):
        for p in (2, 3, -2, 5):
            K = derived_constants(make_std_gset(p))
            j = choose_j(K, p)
            assert audit._j_condition(K, abs(p), j)
            assert not audit._j_condition(K, abs(p), j - 1)

    def test_consequence_for_small_k(self, gset2):
        # M * |p|**(c(k + (2l+e)/4 - j/4)) <= |p|**(kc-1), checked with
        # fourth powers for k = j+1 .. j+4
        K = derived_constants(gset2)
        j = choose_j(K, 2)
        for k in range(j + 1, j + 5):
            e = 4 * k * K.c + K.c * (2 * K.ell + K.eps) - K.c * j
            assert K.M**4 * Fraction(2) ** e <= Fraction(2) ** (4 * (k * K.c - 1))

    def test_unit_m_closed_form(self):
        for c, ell, eps in [(1, 1, 0), (2, 1, 0), (2, 3, 2), (3, 2, 1)]:
            K = Constants(
                p=2, c=c, f_star_abs=Fraction(1), f_dstar=1, ell=ell, eps=eps,
                kappa=Fraction(1), kappa_at=0, M=Fraction(1),
            )
            want = (2 * ell + eps) + -(-4 // c)
            assert choose_j(K, 2) == want


class TestDistanceLowerBound:
    def test_equal_elements(self, gset2):
        K = derived_constants(gset2)
        lb = distance_lower_bound(element(5, 2, 0, 2), element(5, 2, 0, 2), K, 2)
        assert lb.delta == 0 and lb.value == 0.0
        assert lb.consistent_with(0)

    def test_abs_branch(self, gset2):
        K = derived_constants(gset2)
        lb = distance_lower_bound(element(64, 0, 0, 2), group.identity(), K, 2)
        assert lb.delta == 64
        assert lb.certifies(4) and not lb.certifies(5)
        assert 4.9 < lb.value < 5.0
        # BFS gives l((64,0)) = 12 (two a-steps at level -5 beat t^-6 a t^6),
        # consistent with the bound
        d = cayley.word_length(element(64, 0, 0, 2), gset2, 13)
        assert d == 12
        assert lb.consistent_with(d) and not lb.consistent_with(4)

    def test_denominator_branch(self, gset2):
        K = derived_constants(gset2)
        lb = distance_lower_bound(element(1, 6, 0, 2), group.identity(), K, 2)
        assert lb.delta == 63
        assert lb.certifies(4) and not lb.certifies(5)

    def test_precondition(self, gset2):
        K = derived_constants(gset2)
        with pytest.raises(ConfigError):
            distance_lower_bound(element(1, 0, 1, 2), group.identity(), K, 2)

    def test_soundness_on_small_ball(self, gset2, ball12):
        K = derived_constants(gset2)
        horo = ball12.restrict(6).horocyclic_keys()
        for i, hk in enumerate(horo):
            for hk2 in horo[i + 1 :]:
                lb = distance_lower_bound(
                    group.from_key(hk), group.from_key(hk2), K, 2
                )
                diff = group.mul_key(group.inv_key(hk, 2), hk2, 2)
                d = ball12.lengths.get(diff)
                assert lb.consistent_with(d if d is not None else 13)


class TestLemmaAudits:
    @pytest.mark.parametrize("p", [2, 3, -2])
    def test_lemma1_no_violations(self, p):
        C = make_std_gset(p)
        B = ball(8, C)
        for n in range(9):
            rep = audit_lemma1(n, C, B)
            assert rep.ok, rep.violations[:3]
            assert rep.max_ratio_dichotomy <= 1 and rep.max_ratio_joint <= 1
        assert rep.checked == len(B.horocyclic_keys())

    @pytest.mark.parametrize("p", [2, 3, -2])
    def test_lemma2_no_violations(self, p):
        C = make_std_gset(p)
        B = ball(6, C)
        B_big = ball(4, C)
        for r in range(1, 5):
            rep = audit_lemma2(r, C, B, B_big)
            assert rep.ok, rep.violations[:3]
            assert rep.pairs_checked > 0

    def test_lemma1_radius_precondition(self, gset2):
        with pytest.raises(ConfigError):
            audit_lemma1(9, gset2, ball(4, gset2))

    def test_lemma2_certifier_precondition(self, gset2):
        with pytest.raises(ConfigError):
            audit_lemma2(4, gset2, ball(4, gset2), ball(2, gset2))

    def test_lemma1_custom_generators(self):
        C = make_custom_gset()
        B = ball(7, C)
        for n in range(8):
            assert audit_lemma1(n, C, B).ok

    def test_lemma2_pair_pool_matches_oracle_count(self, gset2):
        B = ball(5, gset2)
        B_big = ball(3, gset2)
        rep = audit_lemma2(3, gset2, B, B_big)
        odist = oracles.brute_ball(2, oracles.std_gens(2), 3)
        horo = [to_state(k, 2) for k in B.horocyclic_keys()]
        want = 0
        for i, h in enumerate(horo):
            for h2 in horo[i + 1 :]:
                diff = oracles.mul(oracles.inv(h, 2), h2, 2)
                if odist.get(diff, 99) <= 3:
                    want += 1
        assert rep.pairs_checked == want


class TestWitnesses:
    def test_family_k3_j2(self, gset2):
        W = build_witnesses(3, 2, gset2)
        assert W.T == element(8, 0, 0, 2)
        assert W.S == element(1, 3, 0, 2)
        assert W.ST == element(65, 3, 0, 2)
        assert W.alpha == element(65, 3, -2, 2)
        assert W.beta == element(65, 3, 2, 2)
        assert W.radius == 12
        assert len(W.alpha_word) == 12 and len(W.beta_word) == 12

    @pytest.mark.parametrize("p", [2, 3, -2])
    def test_identities_all_k(self, p):
        C = make_std_gset(p)
        g0 = C.gens[C.f_star_gen]
        for k in range(2, 7):
            for j in (1, 2):
                if k <= j:
                    continue
                W = build_witnesses(k, j, C)
                q = abs(p)
                ck = k * C.c_max
                assert W.T.f.as_fraction(p) == Fraction(p) ** ck
                assert W.S.f.as_fraction(p) == Fraction(p) ** (-ck)
                assert group.multiply(W.S, W.T, p) == group.multiply(W.T, W.S, p)
                ab = group.multiply(group.inverse(W.alpha, p), W.beta, p)
                assert ab == group.power(g0, 2 * j, p)
                assert W.alpha.c == -j * C.c_max and W.beta.c == j * C.c_max

    @pytest.mark.parametrize("p", [2, 3, -2])
    def test_st_magnitudes_without_balls(self, p):
        # |S_k T_k| = |p|^kc + |p|^-kc and denom = |p|^kc, k <= 12
        C = make_std_gset(p)
        g0 = C.gens[C.f_star_gen]
        one = element(1, 0, 0, p)
        q = abs(p)
        for k in range(1, 13):
            gk = group.power(g0, k, p)
            T = group.conjugate(one, gk, p)
            S = group.conjugate(one, group.inverse(gk, p), p)
            ST = group.multiply(S, T, p)
            from bsconvex import arith

            assert arith.abs_fraction(ST.f, p) == Fraction(q) ** k + Fraction(q) ** -k
            assert arith.denom(ST.f, p) == q**k

    def test_precondition(self, gset2):
        with pytest.raises(ConfigError):
            build_witnesses(2, 2, gset2)
        with pytest.raises(ConfigError):
            build_witnesses(1, 2, gset2)

    def test_audit_k3_j2(self, gset2):
        W = build_witnesses(3, 2, gset2)
        rep = witness_audit(W, gset2)
        assert rep.identities_ok
        assert rep.st_abs == Fraction(65, 8) and rep.st_denom == 8
        assert rep.d_alpha_beta == 4
        assert not rep.partial
        assert rep.ell_alpha == 11 and rep.ell_alpha <= W.radius
        assert rep.ell_beta == 11
        assert rep.L == 11 and rep.L >= rep.d_alpha_beta
        assert rep.p_prime.c == 0
        assert rep.projection == rep.p_prime  # eps = 0, projection is direct
        assert rep.soundness_ok
        assert rep.gap_threshold == 4

    def test_audit_L_matches_oracle(self, gset2):
        W = build_witnesses(3, 2, gset2)
        rep = witness_audit(W, gset2)
        members = set(oracles.brute_ball(2, oracles.std_gens(2), 12))
        want = oracles.brute_inside_distance(
            2,
            oracles.std_gens(2),
            members,
            to_state(W.alpha.key(), 2),
            to_state(W.beta.key(), 2),
        )
        assert rep.L == want

    def test_budget_exhaustion_gives_partial_report(self, gset2):
        W = build_witnesses(3, 2, gset2)
        rep = witness_audit(W, gset2, budget_bytes=20_000)
        assert rep.partial
        assert rep.completed_radius < W.radius
        assert rep.L is None and rep.d_p_st is None
        assert rep.identities_ok  # the exact part is still present

    def test_wide_generating_set_full_audit(self):
        # c_max = 2 exercises a nonzero midpoint offset and the eps-word
        # projection; radius 4*2 + 2*1 - 1 = 9
        C = make_wide_gset()
        W = build_witnesses(2, 1, C)
        assert W.T == element(16, 0, 0, 2)
        assert W.alpha.c == -2 and W.beta.c == 2
        rep = witness_audit(W, C)
        assert rep.identities_ok and not rep.partial
        assert rep.projection.c == 0
        assert rep.projection_word is not None
        assert len(rep.projection_word) <= C.eps
        assert rep.soundness_ok
        assert rep.L >= rep.d_alpha_beta == 2


class TestAcTable:
    def test_row_zero(self, gset2):
        tab = ac_table(0, 2, gset2)
        assert tab.rows[0].N == 0 and tab.rows[0].witness is None

    def test_n1_k2(self, gset2):
        tab = ac_table(1, 2, gset2)
        assert tab.rows[1].N == 2
        assert tab.rows[1].max_pair_distance == 2

    @pytest.mark.parametrize("p", [2, 3])
    def test_matches_oracle(self, p):
        C = make_std_gset(p)
        tab = ac_table(5, 2, C)
        want = oracles.brute_detour_table(p, oracles.std_gens(p), 5, 2)
        assert [row.N for row in tab.rows] == want

    def test_custom_gens_match_oracle(self):
        C = make_custom_gset()
        tab = ac_table(4, 2, C)
        want = oracles.brute_detour_table(
            2, [(Fraction(1), 0), (Fraction(0), 1), (Fraction(1, 2), 1)], 4, 2
        )
        assert [row.N for row in tab.rows] == want

    def test_k3_matches_oracle(self, gset2):
        tab = ac_table(4, 3, gset2)
        want = oracles.brute_detour_table(2, oracles.std_gens(2), 4, 3)
        assert [row.N for row in tab.rows] == want

    def test_invariants(self, gset2):
        tab = ac_table(8, 2, gset2)
        for row in tab.rows:
            assert row.N <= 2 * row.n
            assert row.N >= row.max_pair_distance
            if row.witness is not None:
                g, h = row.witness
                assert cayley.canonical(g.key()) < cayley.canonical(h.key())

    def test_deterministic_and_worker_independent(self, gset2):
        a = ac_table(7, 2, gset2)
        b = ac_table(7, 2, gset2)
        c = ac_table(7, 2, gset2, workers=2)
        assert a == b == c

    def test_budget_truncation(self, gset2):
        tab = ac_table(9, 2, gset2, budget_bytes=20_000)
        assert tab.truncated
        assert tab.completed_radius < 9
        assert len(tab.rows) == tab.completed_radius + 1
        full = ac_table(tab.completed_radius, 2, gset2)
        assert [r.N for r in tab.rows] == [r.N for r in full.rows]


class TestDivergence:
    @pytest.mark.parametrize("p", [2, 3, -2])
    def test_certificate(self, p):
        C = make_std_gset(p)
        K = derived_constants(C)
        cert = certify_divergence(K, p, 12)
        assert cert.all_ok and cert.monotone
        assert len(cert.rows) == 12
        assert cert.j_star == choose_j(K, p)
        values = [r.lower_bound for r in cert.rows]
        assert values == sorted(values)
        assert values[-1] > 0
