"""Quantitative convexity audits: distance bounds, witnesses, detour tables.

All inequalities here are checked exactly.  Quarter- and half-integer
exponents of |p| are never evaluated as reals: an inequality of the form
``v <= M * |p|**(e/4)`` is checked as ``v**4 <= M**4 * |p|**e`` over exact
rationals, and similarly with squares for half exponents.

The audit constant M is a concrete rational that provably dominates the
horocyclic bounds for every radius n:

    M = max( f*_abs * (kappa + 2*x**2/(x - 1)),  f** * x ),   x = |p|**c_max

where kappa = max_{n>=0} n * |p|**(-floor(n*c/4)) is a rational upper
dominator of max n * x**(-n/4).  The x**2/(x-1) and f**·x factors absorb the
ceiling slack that appears when n is not a multiple of 4 (the positive
partial-sum exponents of a length-n product are dominated, in sorted order,
by the tent c, 2c, ..., ceil(P/2)c with P <= floor(n/2) positive entries,
and ceil(P/2) <= n/4 + 1/2; the denominator side reaches at most
|p|**(ceil(n/4)c)).  Every bound is monotone in M, so any dominating
rational keeps the audits sound.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from . import arith, group
from .arith import PFraction
from .cayley import (
    Ball,
    GeneratingSet,
    ball,
    bidir_inside_distance,
    canonical,
    inside_ball_path,
    word_length,
    word_length_with_word,
)
from .errors import BudgetExceededError, ConfigError
from .group import GroupElement, Key, inv_key, mul_key


@dataclass(frozen=True)
class Constants:
    """Derived audit constants for a generating set (all exact)."""

    p: int
    c: int
    f_star_abs: Fraction
    f_dstar: int
    ell: int
    eps: int
    kappa: Fraction
    kappa_at: int
    M: Fraction


def derived_constants(C: GeneratingSet) -> Constants:
    q = abs(C.p)
    c = C.c_max
    x = q**c
    kappa, kappa_at = _kappa(q, c)
    m_prime = C.f_star_abs * (kappa + Fraction(2 * x * x, x - 1))
    M = max(m_prime, Fraction(C.f_dstar * x))
    return Constants(
        p=C.p,
        c=c,
        f_star_abs=C.f_star_abs,
        f_dstar=C.f_dstar,
        ell=C.ell,
        eps=C.eps,
        kappa=kappa,
        kappa_at=kappa_at,
        M=M,
    )


def _kappa(q: int, c: int) -> tuple[Fraction, int]:
    """max over n >= 0 of n * q**(-floor(n*c/4)), with its argmax.

    Finite scan with a provable cutoff: with B = ceil(4/c), f(n + B) <=
    f(n) * (n + B) / (n * q) which is <= 1 once n >= 2B (q >= 2), so every
    n beyond the scanned range chains down into it without increasing f.
    """
    B = -(-4 // c)
    hi = 4 * B + 4
    best = Fraction(0)
    best_at = 0
    for n in range(hi + 1):
        val = Fraction(n, q ** (n * c // 4))
        if val > best:
            best = val
            best_at = n
    return best, best_at


def choose_j(K: Constants, p: int) -> int:
    """Least j >= 1 making M * |p|**(c(k + (2l+e)/4 - j/4)) <= |p|**(kc-1) for all k.

    The k terms cancel, leaving M**4 * |p|**(c(2l+e) - cj + 4) <= 1, which is
    monotone in j; this searches the exact integer form.
    """
    q = abs(p)
    j = 1
    while not _j_condition(K, q, j):
        j += 1
    return j


def _j_condition(K: Constants, q: int, j: int) -> bool:
    e = K.c * (2 * K.ell + K.eps) - K.c * j + 4
    m4 = K.M**4
    if e >= 0:
        return m4 * q**e <= 1
    return m4 <= q**-e


class DistanceLowerBound:
    """The exact lower bound r* with d_C(h, h') >= r* from the Lipschitz bounds.

    r* = max(0, (2/c) * log_{|p|}(delta / M)) where delta is the larger of
    the |.|-gap and the denominator gap.  Stored exactly; ``value`` is an
    advisory float rendering.  Queries are answered by raising both sides of
    delta/M compared with |p|**(x c/2) to an integer power.
    """

    def __init__(self, delta: Fraction, K: Constants):
        if delta < 0:
            raise ValueError("gap must be nonnegative")
        self.delta = delta
        self.M = K.M
        self.c = K.c
        self.q = abs(K.p)

    @property
    def value(self) -> float:
        if self.delta <= self.M:
            return 0.0
        return (2 / self.c) * math.log(self.delta / self.M) / math.log(self.q)

    def certifies(self, x: Fraction | int) -> bool:
        """Exactly: is r* >= x (so d_C >= x is certified)?"""
        x = Fraction(x)
        if x <= 0:
            return True
        if self.delta == 0:
            return False
        t = x * self.c  # need delta/M >= q**(t/2)
        num, den = t.numerator, t.denominator
        return (self.delta / self.M) ** (2 * den) >= Fraction(self.q) ** num

    def consistent_with(self, d: int) -> bool:
        """Exactly: is d >= r*?  (Lemma-2 soundness check for a measured d.)"""
        if d < 0:
            return False
        return self.delta**2 <= self.M**2 * self.q ** (d * self.c)


def distance_lower_bound(
    h: GroupElement, h2: GroupElement, K: Constants, p: int
) -> DistanceLowerBound:
    if h.c != 0 or h2.c != 0:
        raise ConfigError("distance lower bound requires horocyclic elements")
    abs_gap = abs(arith.abs_fraction(h.f, p) - arith.abs_fraction(h2.f, p))
    den_gap = Fraction(abs(arith.denom(h.f, p) - arith.denom(h2.f, p)))
    return DistanceLowerBound(max(abs_gap, den_gap), K)


# ---------------------------------------------------------------------------
# Lemma audits over concrete balls


@dataclass
class Lemma1Report:
    p: int
    n: int
    M: Fraction
    checked: int = 0
    violations: list[dict] = field(default_factory=list)
    max_ratio_dichotomy: float = 0.0
    max_ratio_joint: float = 0.0
    worst_dichotomy: Optional[GroupElement] = None
    worst_joint: Optional[GroupElement] = None

    @property
    def ok(self) -> bool:
        return not self.violations


def audit_lemma1(n: int, C: GeneratingSet, B: Ball) -> Lemma1Report:
    """Check both horocyclic bounds over every (f, 0) in B(n).

    (i)  min(|f|, denom f) <= M |p|**(nc/4)   (checked with fourth powers)
    (ii) |f| <= M |p|**(nc/2) and denom f <= M |p|**(nc/2)   (squares)
    """
    if B.radius < n:
        raise ConfigError(f"ball radius {B.radius} is smaller than audited n={n}")
    K = derived_constants(C)
    q = abs(C.p)
    t4 = K.M**4 * q ** (n * K.c)
    t2 = K.M**2 * q ** (n * K.c)
    rep = Lemma1Report(p=C.p, n=n, M=K.M)
    for key in B.sorted_keys():
        num, exp, c = key
        if c != 0 or B.lengths[key] > n:
            continue
        rep.checked += 1
        f = PFraction(num, exp)
        fabs = arith.abs_fraction(f, C.p)
        den = Fraction(arith.denom(f, C.p))
        lhs4 = min(fabs**4, den**4)
        ratio = float(lhs4 / t4)
        if ratio > rep.max_ratio_dichotomy:
            rep.max_ratio_dichotomy = ratio
            rep.worst_dichotomy = group.from_key(key)
        if lhs4 > t4:
            rep.violations.append(
                {"element": group.from_key(key), "kind": "dichotomy", "value": str(lhs4)}
            )
        lhs2 = max(fabs**2, den**2)
        ratio = float(lhs2 / t2)
        if ratio > rep.max_ratio_joint:
            rep.max_ratio_joint = ratio
            rep.worst_joint = group.from_key(key)
        if lhs2 > t2:
            rep.violations.append(
                {"element": group.from_key(key), "kind": "joint", "value": str(lhs2)}
            )
    return rep


@dataclass
class Lemma2Report:
    p: int
    r: int
    ball_radius: int
    M: Fraction
    pairs_checked: int = 0
    violations: list[dict] = field(default_factory=list)
    max_ratio_abs: float = 0.0
    max_ratio_denom: float = 0.0
    worst_pair: Optional[tuple[GroupElement, GroupElement]] = None

    @property
    def ok(self) -> bool:
        return not self.violations


def audit_lemma2(r: int, C: GeneratingSet, B: Ball, B_big: Ball) -> Lemma2Report:
    """Check the Lipschitz bounds over all horocyclic pairs of B at distance <= r.

    Pair distances are certified exactly by looking up the difference
    element in ``B_big``, which therefore must have radius >= r.  For each
    qualifying pair:  ||h|-|h'|| <= M |p|**(rc/2)  and
    |denom h - denom h'| <= M |p|**(rc/2), both via squares.
    """
    if B_big.radius < r:
        raise ConfigError(f"certifying ball radius {B_big.radius} < r={r}")
    K = derived_constants(C)
    p, q = C.p, abs(C.p)
    t2 = K.M**2 * q ** (r * K.c)
    rep = Lemma2Report(p=p, r=r, ball_radius=B.radius, M=K.M)
    horo = B.horocyclic_keys()
    for i, hk in enumerate(horo):
        ih = inv_key(hk, p)
        for hk2 in horo[i + 1 :]:
            diff = mul_key(ih, hk2, p)
            d = B_big.lengths.get(diff)
            if d is None or d > r:
                continue
            rep.pairs_checked += 1
            f1 = PFraction(hk[0], hk[1])
            f2 = PFraction(hk2[0], hk2[1])
            abs_gap = abs(arith.abs_fraction(f1, p) - arith.abs_fraction(f2, p))
            den_gap = Fraction(abs(arith.denom(f1, p) - arith.denom(f2, p)))
            ratio = float(abs_gap**2 / t2)
            if ratio > rep.max_ratio_abs:
                rep.max_ratio_abs = ratio
                rep.worst_pair = (group.from_key(hk), group.from_key(hk2))
            ratio = float(den_gap**2 / t2)
            if ratio > rep.max_ratio_denom:
                rep.max_ratio_denom = ratio
            if abs_gap**2 > t2:
                rep.violations.append(
                    {
                        "pair": (group.from_key(hk), group.from_key(hk2)),
                        "kind": "abs",
                        "value": str(abs_gap),
                    }
                )
            if den_gap**2 > t2:
                rep.violations.append(
                    {
                        "pair": (group.from_key(hk), group.from_key(hk2)),
                        "kind": "denom",
                        "value": str(den_gap),
                    }
                )
    return rep


# ---------------------------------------------------------------------------
# Witness family


@dataclass(frozen=True)
class WitnessFamily:
    k: int
    j: int
    T: GroupElement
    S: GroupElement
    ST: GroupElement
    alpha: GroupElement
    beta: GroupElement
    radius: int
    alpha_word: tuple[int, ...]
    beta_word: tuple[int, ...]


def build_witnesses(k: int, j: int, C: GeneratingSet) -> WitnessFamily:
    """The conjugate pair T_k, S_k and the separated endpoints alpha, beta.

    T_k = g0^-k (1,0) g0^k = (p^(ck), 0) and S_k = g0^k (1,0) g0^-k =
    (p^(-ck), 0) for the designated maximal-t generator g0; the closed forms
    are verified against the conjugation products.  alpha = S T g0^-j and
    beta = T S g0^j sit in B(4k + 2 ell - j), witnessed by the explicit
    words  g0^k a g0^-2k a g0^(k-j)  and its mirror (a = any shortest word
    for (1,0)).
    """
    if not (k > j >= 1):
        raise ConfigError(f"witness family needs k > j >= 1, got k={k}, j={j}")
    p = C.p
    g0 = C.gens[C.f_star_gen]
    one = group.element(1, 0, 0, p)
    gk = group.power(g0, k, p)
    T = group.conjugate(one, gk, p)
    S = group.conjugate(one, group.inverse(gk, p), p)
    ck = C.c_max * k
    # closed forms: T = (p**ck, 0), S = (p**-ck, 0), for signed p
    T_closed = GroupElement(arith.normalize(p**ck, 0, p), 0)
    S_closed = GroupElement(arith.scale_p_pow(arith.ONE, -ck, p), 0)
    if T != T_closed or S != S_closed:
        raise AssertionError("conjugate closed form failed")
    ST = group.multiply(S, T, p)
    TS = group.multiply(T, S, p)
    if ST != TS:
        raise AssertionError("S_k and T_k must commute")
    alpha = group.multiply(ST, group.power(g0, -j, p), p)
    beta = group.multiply(TS, group.power(g0, j, p), p)
    radius = 4 * k + 2 * C.ell - j

    g0_idx = C.f_star_gen
    g0_inv_idx = C.index_of(inv_key(g0.key(), p))
    if g0_inv_idx is None:
        raise AssertionError("generating set is not inverse closed")
    found = word_length_with_word(one, C, C.ell)
    if found is None or found[0] != C.ell:
        raise AssertionError("length of (1,0) does not match ell")
    wa = found[1]
    alpha_word = (
        [g0_idx] * k + wa + [g0_inv_idx] * (2 * k) + wa + [g0_idx] * (k - j)
    )
    beta_word = (
        [g0_inv_idx] * k + wa + [g0_idx] * (2 * k) + wa + [g0_inv_idx] * (k - j)
    )
    if C.word_element(alpha_word) != alpha or C.word_element(beta_word) != beta:
        raise AssertionError("witness words do not evaluate to the witnesses")
    return WitnessFamily(
        k=k,
        j=j,
        T=T,
        S=S,
        ST=ST,
        alpha=alpha,
        beta=beta,
        radius=radius,
        alpha_word=tuple(alpha_word),
        beta_word=tuple(beta_word),
    )


@dataclass
class WitnessReport:
    family: WitnessFamily
    identities_ok: bool
    st_abs: Fraction
    st_denom: int
    d_alpha_beta: int
    # Ball-dependent part; None when the budget ran out first.
    partial: bool = False
    completed_radius: Optional[int] = None
    ell_alpha: Optional[int] = None
    ell_beta: Optional[int] = None
    L: Optional[int] = None
    p_prime: Optional[GroupElement] = None
    projection: Optional[GroupElement] = None
    projection_word: Optional[tuple[int, ...]] = None
    d_p_st: Optional[int] = None
    lower_bound: Optional[DistanceLowerBound] = None
    soundness_ok: Optional[bool] = None
    gap_abs: Optional[Fraction] = None
    gap_denom: Optional[int] = None
    gap_threshold: Optional[int] = None
    dichotomy_holds: Optional[bool] = None

    @property
    def ok(self) -> bool:
        if not self.identities_ok:
            return False
        return self.soundness_ok is not False


def witness_audit(
    W: WitnessFamily,
    C: GeneratingSet,
    budget_bytes: Optional[int] = None,
    workers: int = 1,
) -> WitnessReport:
    """BFS-verified facts about one witness family.

    Verifies the algebraic identities exactly, then (ball permitting)
    measures: the witnesses' exact lengths, their inside-ball separation L,
    the first near-horocyclic vertex P' of one inside geodesic, its
    projection P, the measured d(P, ST), and the Lipschitz lower bound for
    that distance.  Budget exhaustion yields a partial report with the
    completed radius marked.
    """
    p = C.p
    q = abs(p)
    K = derived_constants(C)
    kc = W.k * C.c_max

    g0 = C.gens[C.f_star_gen]
    ab = group.multiply(group.inverse(W.alpha, p), W.beta, p)
    identities_ok = (
        W.ST == group.multiply(W.T, W.S, p)
        and ab == group.power(g0, 2 * W.j, p)
        and W.alpha.c == -W.j * C.c_max
        and W.beta.c == W.j * C.c_max
    )
    st_abs = arith.abs_fraction(W.ST.f, p)
    st_denom = arith.denom(W.ST.f, p)
    identities_ok = identities_ok and st_abs == Fraction(q**kc) + Fraction(
        1, q**kc
    ) and st_denom == q**kc
    # d(alpha, beta) = 2j exactly: the t-exponent homomorphism forces >= 2j
    # and the word g0^(2j) realizes it.
    d_ab = 2 * W.j
    rep = WitnessReport(
        family=W,
        identities_ok=identities_ok,
        st_abs=st_abs,
        st_denom=st_denom,
        d_alpha_beta=d_ab,
    )
    try:
        B = ball(W.radius, C, budget_bytes, workers)
    except BudgetExceededError as e:
        rep.partial = True
        rep.completed_radius = e.completed_radius
        return rep
    rep.completed_radius = W.radius
    rep.ell_alpha = B.lengths[W.alpha.key()]
    rep.ell_beta = B.lengths[W.beta.key()]
    L, path = inside_ball_path(W.alpha, W.beta, B)
    rep.L = L
    assert path is not None
    # first vertex along the geodesic with |i| <= c/2, i.e. 2|i| <= c_max
    p_prime_key = next(k for k in path if 2 * abs(k[2]) <= C.c_max)
    rep.p_prime = group.from_key(p_prime_key)
    i = p_prime_key[2]
    proj_found = word_length_with_word(group.element(0, 0, -i, p), C, max(C.eps, 1))
    if proj_found is None:
        raise AssertionError("projection word not found within eps")
    rep.projection_word = tuple(proj_found[1])
    P = group.multiply(rep.p_prime, group.element(0, 0, -i, p), p)
    rep.projection = P
    diff = group.multiply(group.inverse(P, p), W.ST, p)
    cap = W.radius + C.eps + 4 * W.k + 2 * C.ell + 1
    d_p_st = word_length(diff, C, cap, budget_bytes)
    if d_p_st is None:
        raise AssertionError("d(P, ST) exceeded its a-priori cap")
    rep.d_p_st = d_p_st
    lb = distance_lower_bound(P, W.ST, K, p)
    rep.lower_bound = lb
    rep.soundness_ok = lb.consistent_with(d_p_st)
    thr = q ** (kc - 1)
    rep.gap_threshold = thr
    rep.gap_abs = st_abs - arith.abs_fraction(P.f, p)
    rep.gap_denom = st_denom - arith.denom(P.f, p)
    rep.dichotomy_holds = rep.gap_abs >= thr or rep.gap_denom >= thr
    return rep


# ---------------------------------------------------------------------------
# Almost-convexity detour table


@dataclass(frozen=True)
class DetourRow:
    n: int
    k: int
    N: int
    witness: Optional[tuple[GroupElement, GroupElement]]
    max_pair_distance: int


@dataclass
class AcTable:
    k: int
    n_max: int
    rows: list[DetourRow]
    truncated: bool = False
    completed_radius: Optional[int] = None


def ac_table(
    n_max: int,
    k: int,
    C: GeneratingSet,
    budget_bytes: Optional[int] = None,
    workers: int = 1,
) -> AcTable:
    """N(n, k) for each n <= n_max: the worst inside-ball distance over all
    pairs of B(n) at global distance <= k, with a canonically least
    attaining pair as witness.

    Pairs are screened cheaply: a pair at distance d with endpoint lengths
    lg, lh has a global geodesic inside B(n) whenever
    floor((lg + lh + d)/2) <= n (every geodesic vertex v satisfies
    l(v) <= min(lg + i, lh + d - i)), so its inside distance is exactly d
    there.  Only rows below that threshold need a geodesic-word walk or, if
    all geodesics leave the ball, an inside-ball BFS.
    """
    if n_max < 0:
        raise ConfigError(f"n_max must be nonnegative, got {n_max}")
    truncated = False
    completed = n_max
    try:
        B = ball(n_max, C, budget_bytes, workers)
    except BudgetExceededError as e:
        B = e.partial
        truncated = True
        completed = e.completed_radius
    small = ball(k, C, budget_bytes)
    p = C.p
    diffs = sorted(
        ((w, d) for w, d in small.lengths.items() if w != group.IDENTITY_KEY),
        key=lambda item: canonical(item[0]),
    )
    geo_words = {w: _geodesic_words(w, d, small) for w, d in diffs}

    n_hi = completed
    best: list[Optional[tuple[int, tuple, tuple[Key, Key]]]] = [None] * (n_hi + 1)
    suffix: dict[int, list[tuple[int, tuple, tuple[Key, Key]]]] = {}
    observed: list[int] = [0] * (n_hi + 1)

    def update(n: int, val: int, pairkey: tuple, pair: tuple[Key, Key]) -> None:
        cur = best[n]
        if cur is None or val > cur[0] or (val == cur[0] and pairkey < cur[1]):
            best[n] = (val, pairkey, pair)

    lengths = B.lengths
    for gk in B.sorted_keys():
        cg = canonical(gk)
        lg = lengths[gk]
        for w, d in diffs:
            hk = mul_key(gk, w, p)
            lh = lengths.get(hk)
            if lh is None:
                continue
            ch = canonical(hk)
            if ch <= cg:
                continue
            pairkey = (cg, ch)
            pair = (gk, hk)
            n0 = max(lg, lh)
            if n0 > n_hi:
                continue
            thr = (lg + lh + d) // 2
            for n in range(n0, min(thr, n_hi + 1)):
                if _has_inside_geodesic(gk, geo_words[w], lengths, n, C.gen_keys, p):
                    v = d
                else:
                    v = bidir_inside_distance(gk, hk, lengths, n, C)
                update(n, v, pairkey, pair)
            if thr <= n_hi:
                suffix.setdefault(d, []).append((max(thr, n0), pairkey, pair))
            if observed[n0] < d:
                observed[n0] = d

    for entries in suffix.values():
        entries.sort()
    rows: list[DetourRow] = []
    cursors = {d: 0 for d in suffix}
    running: dict[int, tuple[tuple, tuple[Key, Key]]] = {}
    seen_d = 0
    for n in range(n_hi + 1):
        for d, entries in suffix.items():
            i = cursors[d]
            while i < len(entries) and entries[i][0] <= n:
                _, pk, pr = entries[i]
                if d not in running or pk < running[d][0]:
                    running[d] = (pk, pr)
                i += 1
            cursors[d] = i
        cands: list[tuple[int, tuple, tuple[Key, Key]]] = []
        if best[n] is not None:
            cands.append(best[n])
        for d, (pk, pr) in running.items():
            cands.append((d, pk, pr))
        seen_d = max(seen_d, observed[n])
        if not cands:
            rows.append(DetourRow(n=n, k=k, N=0, witness=None, max_pair_distance=0))
            continue
        top = max(v for v, _, _ in cands)
        wit = min((pk, pr) for v, pk, pr in cands if v == top)[1]
        rows.append(
            DetourRow(
                n=n,
                k=k,
                N=top,
                witness=(group.from_key(wit[0]), group.from_key(wit[1])),
                max_pair_distance=seen_d,
            )
        )
    return AcTable(
        k=k, n_max=n_max, rows=rows, truncated=truncated, completed_radius=completed
    )


def _geodesic_words(w: Key, d: int, small: Ball) -> list[tuple[int, ...]]:
    """Every word of length d = l(w) spelling w, from the small ball's table."""
    p = small.gset.p
    gen_keys = small.gset.gen_keys
    lengths = small.lengths

    def rec(u: Key, depth: int) -> list[tuple[int, ...]]:
        if depth == 0:
            return [()]
        out = []
        for i, gk in enumerate(gen_keys):
            v = mul_key(u, inv_key(gk, p), p)
            if lengths.get(v) == depth - 1:
                for pre in rec(v, depth - 1):
                    out.append(pre + (i,))
        return out

    return rec(w, d)


def _has_inside_geodesic(
    gk: Key,
    words: list[tuple[int, ...]],
    lengths: dict[Key, int],
    n: int,
    gen_keys: tuple[Key, ...],
    p: int,
) -> bool:
    for word in words:
        u = gk
        ok = True
        for idx in word:
            u = mul_key(u, gen_keys[idx], p)
            lu = lengths.get(u)
            if lu is None or lu > n:
                ok = False
                break
        if ok:
            return True
    return False


# ---------------------------------------------------------------------------
# Asymptotic certification (no balls)


@dataclass(frozen=True)
class DivergenceRow:
    k: int
    reduction_ok: bool
    abs_branch_ok: bool
    denom_branch_ok: bool
    lower_bound: float


@dataclass
class DivergenceCertificate:
    j_star: int
    k_max: int
    rows: list[DivergenceRow]
    monotone: bool
    all_ok: bool


def certify_divergence(K: Constants, p: int, k_max: int = 12) -> DivergenceCertificate:
    """Exact certification that d(P_k, S_k T_k) diverges, with j = choose_j.

    Per k: (a) the Lemma-1 radius bound reduces below |p|**(kc-1) with the
    chosen j; (b) any horocyclic P with |P| <= |p|**(kc-1) has
    |ST| - |P| >= |p|**(kc-1)  (since |ST| = |p|**kc + |p|**-kc >=
    2 |p|**(kc-1)); (c) any P with denom P <= |p|**(kc-1) has
    denom ST - denom P >= |p|**(kc-1)  (since denom ST = |p|**kc).  The
    resulting guaranteed gap |p|**(kc-1) makes the Lipschitz lower bound
    strictly increasing in k.
    """
    q = abs(p)
    j = choose_j(K, p)
    rows: list[DivergenceRow] = []
    prev_delta: Optional[Fraction] = None
    monotone = True
    all_ok = True
    for k in range(1, k_max + 1):
        kc = k * K.c
        thr = Fraction(q ** (kc - 1))
        reduction_ok = _j_condition(K, q, j)
        st_abs = Fraction(q**kc) + Fraction(1, q**kc)
        abs_ok = st_abs - thr >= thr
        denom_ok = Fraction(q**kc) - thr >= thr
        lb = DistanceLowerBound(thr, K)
        rows.append(
            DivergenceRow(
                k=k,
                reduction_ok=reduction_ok,
                abs_branch_ok=abs_ok,
                denom_branch_ok=denom_ok,
                lower_bound=lb.value,
            )
        )
        all_ok = all_ok and reduction_ok and abs_ok and denom_ok
        if prev_delta is not None and not thr > prev_delta:
            monotone = False
        prev_delta = thr
    return DivergenceCertificate(
        j_star=j, k_max=k_max, rows=rows, monotone=monotone, all_ok=all_ok
    )
