"""Word metric and ball machinery over a finite inverse-closed generating set.

Balls are computed by breadth-first search over element keys with
canonical-form deduplication, so contents and lengths are independent of
traversal order.  The canonical ordering of elements used for every emitted
collection is lexicographic on ``(c, exp, num)``.

Memory budgeting is a deterministic model, not an RSS probe: each stored
state is charged ``BYTES_PER_STATE`` and searches fail cleanly with the
largest completed radius once the configured byte budget is exceeded.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from typing import Iterator, Optional, Sequence

from . import arith, group
from .arith import check_base
from .errors import BudgetExceededError, ConfigError, GenerationError
from .group import IDENTITY_KEY, GroupElement, Key, inv_key, mul_key

DEFAULT_MEMORY_BUDGET = 2 * 1024**3  # bytes
BYTES_PER_STATE = 200  # deterministic per-state charge for budget accounting
DEFAULT_CONFIRM_RADIUS = 20


def canonical(key: Key) -> tuple[int, int, int]:
    """Sort key for the canonical (c, exp, num) element ordering."""
    return (key[2], key[1], key[0])


def _states_cap(budget_bytes: Optional[int]) -> int:
    budget = DEFAULT_MEMORY_BUDGET if budget_bytes is None else budget_bytes
    if budget <= 0:
        raise ConfigError(f"memory budget must be positive, got {budget}")
    return max(64, budget // BYTES_PER_STATE)


class GeneratingSet:
    """An inverse-closed generating set with its derived metric constants.

    Built by :func:`validate_generating_set`; treat instances as immutable.

    Constants:
      c_max       largest t-exponent among the generators (> 0)
      f_star_abs  max |f_i| over the generators (exact Fraction)
      f_star_gen  index of the designated generator realizing c_max
      f_dstar     max denom(f_i) over the generators
      ell         word length of (1, 0)
      eps         max word length of (0, i) over integers with 2|i| <= c_max
    """

    def __init__(self, p: int, gens: tuple[GroupElement, ...]):
        self.p = p
        self.gens = gens
        self.gen_keys: tuple[Key, ...] = tuple(g.key() for g in gens)
        self.c_max = max(g.c for g in gens)
        self.f_star_abs = max(
            (arith.abs_fraction(g.f, p) for g in gens), default=Fraction(0)
        )
        self.f_star_gen = next(i for i, g in enumerate(gens) if g.c == self.c_max)
        self.f_dstar = max(arith.denom(g.f, p) for g in gens)
        # Filled in by validate_generating_set once reachability is confirmed.
        self.ell: int = -1
        self.eps: int = -1

    def min_length(self, key: Key) -> int:
        """Homomorphism bound: any word for ``key`` has length >= |c|/c_max."""
        return -(-abs(key[2]) // self.c_max)

    def index_of(self, key: Key) -> Optional[int]:
        try:
            return self.gen_keys.index(key)
        except ValueError:
            return None

    def word_element(self, word: Sequence[int]) -> GroupElement:
        return group.word_product(word, self.gens, self.p)

    def render_word(self, word: Sequence[int]) -> str:
        return ".".join(self.gens[i].flag() for i in word)


def validate_generating_set(
    p: int,
    raw: Sequence[GroupElement],
    confirm_radius: int = DEFAULT_CONFIRM_RADIUS,
    budget_bytes: Optional[int] = None,
) -> GeneratingSet:
    """Close ``raw`` under inverses, derive constants, confirm generation.

    Identity entries are dropped.  Generation is confirmed by checking that
    (1,0) and (0,1) are reachable within ``confirm_radius``; that also pins
    the constant ``ell``.  ``eps`` needs lengths of (0,i) for 2|i| <= c_max,
    each of which is at most |i| * length of (0,1), so a single search with
    that provable cap suffices.
    """
    check_base(p)
    if not raw:
        raise ConfigError("generating set must be nonempty")
    keys: set[Key] = set()
    for g in raw:
        k = group.element(g.f.num, g.f.exp, g.c, p).key()
        if k == IDENTITY_KEY:
            continue
        keys.add(k)
        keys.add(inv_key(k, p))
    if not keys:
        raise GenerationError("cannot generate: no non-identity generators")
    gens = tuple(group.from_key(k) for k in sorted(keys, key=canonical))
    gset = GeneratingSet(p, gens)
    if gset.c_max <= 0:
        raise GenerationError("cannot generate: no generator moves the t-coordinate")

    ell = word_length(group.element(1, 0, 0, p), gset, confirm_radius, budget_bytes)
    ell01 = word_length(group.element(0, 0, 1, p), gset, confirm_radius, budget_bytes)
    if ell is None or ell01 is None:
        raise GenerationError(f"generation unconfirmed at radius {confirm_radius}")
    gset.ell = ell
    eps = 0
    cap = max(confirm_radius, ell01 * (gset.c_max // 2) + 1)
    for i in range(1, gset.c_max // 2 + 1):
        for sign in (1, -1):
            li = word_length(group.element(0, 0, sign * i, p), gset, cap, budget_bytes)
            if li is None:
                raise GenerationError(f"generation unconfirmed at radius {cap}")
            eps = max(eps, li)
    gset.eps = eps
    return gset


class Ball:
    """The ball B(n): a map from canonical element key to exact word length."""

    def __init__(self, radius: int, lengths: dict[Key, int], gset: GeneratingSet):
        self.radius = radius
        self.lengths = lengths
        self.gset = gset
        self._sorted: Optional[list[Key]] = None

    def __len__(self) -> int:
        return len(self.lengths)

    def __contains__(self, key: Key) -> bool:
        return key in self.lengths

    def contains_element(self, g: GroupElement) -> bool:
        return g.key() in self.lengths

    def length_of(self, g: GroupElement) -> int:
        return self.lengths[g.key()]

    def sorted_keys(self) -> list[Key]:
        if self._sorted is None:
            self._sorted = sorted(self.lengths, key=canonical)
        return self._sorted

    def horocyclic_keys(self) -> list[Key]:
        return [k for k in self.sorted_keys() if k[2] == 0]

    def restrict(self, m: int) -> "Ball":
        """The sub-ball B(m) with lengths preserved."""
        if m >= self.radius:
            return self
        return Ball(m, {k: d for k, d in self.lengths.items() if d <= m}, self.gset)


def ball(
    n: int,
    gset: GeneratingSet,
    budget_bytes: Optional[int] = None,
    workers: int = 1,
) -> Ball:
    """Exact B(n) with per-element word lengths by layered BFS.

    Raises :class:`BudgetExceededError` carrying the largest completed radius
    (and that partial ball) if the state budget runs out.
    """
    if n < 0:
        raise ConfigError(f"radius must be nonnegative, got {n}")
    p = gset.p
    gen_keys = gset.gen_keys
    cap = _states_cap(budget_bytes)
    lengths: dict[Key, int] = {IDENTITY_KEY: 0}
    frontier: list[Key] = [IDENTITY_KEY]
    for d in range(1, n + 1):
        if not frontier:
            break
        candidates = _expand(frontier, gen_keys, p, workers)
        nxt: list[Key] = []
        for k in candidates:
            if k not in lengths:
                lengths[k] = d
                nxt.append(k)
        if len(lengths) > cap:
            done = d - 1
            partial = Ball(done, {k: v for k, v in lengths.items() if v <= done}, gset)
            raise BudgetExceededError(
                f"memory budget exceeded at radius {d} (completed {done})",
                completed_radius=done,
                partial=partial,
            )
        frontier = nxt
    return Ball(n, lengths, gset)


def _expand(
    frontier: list[Key], gen_keys: tuple[Key, ...], p: int, workers: int
) -> list[Key]:
    if workers <= 1 or len(frontier) < 2048:
        return [mul_key(s, g, p) for s in frontier for g in gen_keys]
    size = -(-len(frontier) // workers)
    chunks = [frontier[i : i + size] for i in range(0, len(frontier), size)]

    def run(chunk: list[Key]) -> list[Key]:
        return [mul_key(s, g, p) for s in chunk for g in gen_keys]

    with ThreadPoolExecutor(max_workers=workers) as pool:
        parts = list(pool.map(run, chunks))
    out: list[Key] = []
    for part in parts:
        out.extend(part)
    return out


def word_length(
    g: GroupElement | Key,
    gset: GeneratingSet,
    max_r: int,
    budget_bytes: Optional[int] = None,
) -> Optional[int]:
    """Exact word length of ``g`` if <= max_r, else None (NotFound).

    Bidirectional layered BFS: both sides expand by right multiplication
    (the generator set is inverse-closed, so predecessor and successor moves
    coincide).  The search stops as soon as the met distance is provably
    minimal; ``None`` is returned only when every path longer than ``max_r``
    is certified.
    """
    if max_r < 0:
        raise ConfigError(f"max radius must be nonnegative, got {max_r}")
    gk = g.key() if isinstance(g, GroupElement) else g
    if gk == IDENTITY_KEY:
        return 0
    if gset.min_length(gk) > max_r:
        return None
    p = gset.p
    gen_keys = gset.gen_keys
    cap = _states_cap(budget_bytes)
    dist_a: dict[Key, int] = {IDENTITY_KEY: 0}
    dist_b: dict[Key, int] = {gk: 0}
    front_a: list[Key] = [IDENTITY_KEY]
    front_b: list[Key] = [gk]
    da = db = 0
    best: Optional[int] = None
    while True:
        # Every meeting with depths (i, j), i <= da, j <= db has been counted,
        # so any shorter path would already be in best once best <= da + db.
        if best is not None and best <= da + db:
            return best
        if da + db >= max_r or not front_a or not front_b:
            return None
        if len(front_a) <= len(front_b):
            mine, other, front, depth = dist_a, dist_b, front_a, da + 1
        else:
            mine, other, front, depth = dist_b, dist_a, front_b, db + 1
        nxt: list[Key] = []
        for u in front:
            for gk2 in gen_keys:
                v = mul_key(u, gk2, p)
                if v in mine:
                    continue
                mine[v] = depth
                j = other.get(v)
                if j is not None and (best is None or depth + j < best):
                    best = depth + j
                nxt.append(v)
        if mine is dist_a:
            front_a, da = nxt, depth
        else:
            front_b, db = nxt, depth
        if len(dist_a) + len(dist_b) > cap:
            raise BudgetExceededError(
                f"memory budget exceeded in length search at depth {da + db}",
                completed_radius=da + db - 1,
            )


def word_length_with_word(
    g: GroupElement | Key,
    gset: GeneratingSet,
    max_r: int,
    budget_bytes: Optional[int] = None,
) -> Optional[tuple[int, list[int]]]:
    """Word length plus a witnessing word of generator indices.

    Plain layered BFS with canonically sorted frontiers, so the recovered
    word is deterministic.  Intended for small radii (constant extraction,
    witness words), not bulk queries.
    """
    gk = g.key() if isinstance(g, GroupElement) else g
    if gk == IDENTITY_KEY:
        return (0, [])
    if gset.min_length(gk) > max_r:
        return None
    p = gset.p
    gen_keys = gset.gen_keys
    cap = _states_cap(budget_bytes)
    parents: dict[Key, tuple[Key, int]] = {}
    seen: set[Key] = {IDENTITY_KEY}
    frontier: list[Key] = [IDENTITY_KEY]
    for d in range(1, max_r + 1):
        nxt: list[Key] = []
        for u in sorted(frontier, key=canonical):
            for i, gk2 in enumerate(gen_keys):
                v = mul_key(u, gk2, p)
                if v in seen:
                    continue
                seen.add(v)
                parents[v] = (u, i)
                nxt.append(v)
                if v == gk:
                    return (d, _recover_word(gk, parents))
        if len(seen) > cap:
            raise BudgetExceededError(
                f"memory budget exceeded in word search at depth {d}",
                completed_radius=d - 1,
            )
        frontier = nxt
        if not frontier:
            return None
    return None


def _recover_word(target: Key, parents: dict[Key, tuple[Key, int]]) -> list[int]:
    word: list[int] = []
    k = target
    while k != IDENTITY_KEY:
        k, idx = parents[k]
        word.append(idx)
    word.reverse()
    return word


def inside_ball_distance(g: GroupElement, h: GroupElement, B: Ball) -> int:
    """Length of the shortest path from g to h whose vertices all lie in B."""
    d, _ = inside_ball_path(g, h, B, want_path=False)
    return d


def inside_ball_path(
    g: GroupElement, h: GroupElement, B: Ball, want_path: bool = True
) -> tuple[int, Optional[list[Key]]]:
    """Inside-ball distance plus (optionally) one geodesic as a key list.

    BFS restricted to ball members; frontiers are expanded in canonical
    order so the recovered path is deterministic.  Every ball is connected
    (geodesics to the identity stay inside), so this always terminates.
    """
    gk, hk = g.key(), h.key()
    if gk not in B.lengths or hk not in B.lengths:
        raise ConfigError("inside-ball distance requires both endpoints in the ball")
    if gk == hk:
        return (0, [gk] if want_path else None)
    p = B.gset.p
    gen_keys = B.gset.gen_keys
    member = B.lengths
    parents: dict[Key, Key] = {}
    seen: set[Key] = {gk}
    frontier: list[Key] = [gk]
    d = 0
    while frontier:
        d += 1
        nxt: list[Key] = []
        for u in sorted(frontier, key=canonical) if want_path else frontier:
            for gk2 in gen_keys:
                v = mul_key(u, gk2, p)
                if v in seen or v not in member:
                    continue
                seen.add(v)
                if want_path:
                    parents[v] = u
                if v == hk:
                    if not want_path:
                        return (d, None)
                    path = [hk]
                    k = hk
                    while k != gk:
                        k = parents[k]
                        path.append(k)
                    path.reverse()
                    return (d, path)
                nxt.append(v)
        frontier = nxt
    raise RuntimeError("ball is disconnected; BFS invariant violated")


def bidir_inside_distance(
    gk: Key, hk: Key, member: dict[Key, int], limit: int, gset: GeneratingSet
) -> int:
    """Inside-ball distance where membership means ``member[v] <= limit``.

    Value-only bidirectional BFS used for bulk pair scans against a large
    ball's length table restricted to a smaller radius.
    """
    if gk == hk:
        return 0
    p = gset.p
    gen_keys = gset.gen_keys
    dist_a: dict[Key, int] = {gk: 0}
    dist_b: dict[Key, int] = {hk: 0}
    front_a: list[Key] = [gk]
    front_b: list[Key] = [hk]
    da = db = 0
    best: Optional[int] = None
    while True:
        if best is not None and best <= da + db:
            return best
        if not front_a and not front_b:
            if best is None:
                raise RuntimeError("ball is disconnected; BFS invariant violated")
            return best
        if front_a and (not front_b or len(front_a) <= len(front_b)):
            mine, other, front = dist_a, dist_b, front_a
            depth = da + 1
        else:
            mine, other, front = dist_b, dist_a, front_b
            depth = db + 1
        nxt: list[Key] = []
        for u in front:
            for gk2 in gen_keys:
                v = mul_key(u, gk2, p)
                if v in mine:
                    continue
                lv = member.get(v)
                if lv is None or lv > limit:
                    continue
                mine[v] = depth
                j = other.get(v)
                if j is not None and (best is None or depth + j < best):
                    best = depth + j
                nxt.append(v)
        if mine is dist_a:
            front_a, da = nxt, depth
        else:
            front_b, db = nxt, depth


def pairs_within(
    B: Ball, k: int, budget_bytes: Optional[int] = None
) -> Iterator[tuple[GroupElement, GroupElement, int]]:
    """All unordered pairs (g, h) in B at global distance <= k, with distances.

    The distance is the exact word length of g^-1 h, realized by looking up
    the difference element in B(k) (identical to a word_length query capped
    at k).  Pairs are emitted in canonical order: by g, then by h, each
    pair exactly once with canonical(g) < canonical(h).
    """
    if k < 1:
        raise ConfigError(f"pair distance bound must be >= 1, got {k}")
    small = ball(k, B.gset, budget_bytes)
    p = B.gset.p
    diffs = [(w, d) for w, d in small.lengths.items() if w != IDENTITY_KEY]
    diffs.sort(key=lambda item: canonical(item[0]))
    for gk in B.sorted_keys():
        ck = canonical(gk)
        found: list[tuple[tuple[int, int, int], Key, int]] = []
        for w, d in diffs:
            hk = mul_key(gk, w, p)
            if hk not in B.lengths:
                continue
            ch = canonical(hk)
            if ch <= ck:
                continue
            found.append((ch, hk, d))
        found.sort()
        for _, hk, d in found:
            yield (group.from_key(gk), group.from_key(hk), d)
