"""Desk-scale verifiers for the analytic side of mixed Tsirelson spaces.

Everything here is a finite, exact (or explicitly interval-bounded)
probe of a statement about an infinite construction: gamma searches,
dagger-condition probes, weight-sequence diagnostics, tameness checks,
spreading-model constants, shift-domination witnesses and the layered
Schreier-sum bound.  Limit statements are horizon-probed and every
horizon-limited verdict is labelled as such; a probe is evidence, not a
proof.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

from . import families as fam
from . import norm_engine as ne
from . import ordinals
from .errors import ConfigError, DomainError
from .families import Family, FiniteSet
from .ordinals import Ordinal

# -- ordinal sequence rules ----------------------------------------------------


@dataclass(frozen=True)
class IdentityOrdinalRule:
    """n as a finite ordinal."""

    def value(self, n: int) -> Ordinal:
        return ordinals.from_int(n)

    def text(self) -> str:
        return "n"


@dataclass(frozen=True)
class OmegaPowerRule:
    """w**n."""

    def value(self, n: int) -> Ordinal:
        return ordinals.omega_power(ordinals.from_int(n))

    def text(self) -> str:
        return "w^n"


@dataclass(frozen=True)
class ConstantOrdinalRule:
    constant: Ordinal

    def value(self, n: int) -> Ordinal:
        return self.constant

    def text(self) -> str:
        return ordinals.format_ordinal(self.constant)


def parse_ordinal_rule(text: str):
    stripped = text.strip()
    if stripped == "n":
        return IdentityOrdinalRule()
    if stripped == "w^n":
        return OmegaPowerRule()
    return ConstantOrdinalRule(ordinals.parse_ordinal(stripped))


# -- gamma ----------------------------------------------------------------------

GAMMA_MODES = ("ordinal_sum", "ell_of_product")


@dataclass(frozen=True)
class GammaConfig:
    """Search data for gamma(eps, m).

    ``mode`` selects between maximizing an ordinal sum of the sequence
    values and maximizing the head exponent of their ordinal product.
    ``horizon`` caps both the tuple entries and the tuple length.
    """

    theta_rule: object
    seq_rule: object
    horizon: int
    mode: str = "ordinal_sum"

    def __post_init__(self):
        if self.mode not in GAMMA_MODES:
            raise ConfigError(f"gamma mode must be one of {GAMMA_MODES}")
        if self.horizon < 1:
            raise ConfigError("gamma horizon must be >= 1")


@dataclass(frozen=True)
class GammaResult:
    value: Ordinal
    certified: bool
    argmax: tuple[int, ...] | None

    @property
    def certainty(self) -> str:
        return "exact" if self.certified else "horizon"


def gamma_ordinal(eps, m: int, cfg: GammaConfig) -> GammaResult:
    """Exact maximum over theta-feasible tuples within the horizon.

    A tuple (n_1..n_s) is feasible when eps * theta_{n_1} ... theta_{n_s}
    exceeds theta_m; the empty maximum is 0.  Extending a tuple only
    shrinks its theta product, so infeasible prefixes are pruned.  The
    result is certified complete when no tuple with an entry or a length
    beyond the horizon can be feasible.
    """
    eps = Fraction(eps)
    if eps <= 0:
        raise DomainError("eps must be positive")
    if not 1 <= m <= cfg.horizon:
        raise DomainError("m must lie within the gamma horizon")
    horizon = cfg.horizon
    theta_m = cfg.theta_rule.value(m)
    thetas = [None] + [cfg.theta_rule.value(n) for n in range(1, horizon + 2)]
    values = [None] + [cfg.seq_rule.value(n) for n in range(1, horizon + 1)]
    for n in range(1, horizon + 1):
        if cfg.mode == "ordinal_sum" and values[n].is_zero():
            raise ConfigError("the ordinal sequence must be positive")

    # The sequence rules produce constant or single-term nondecreasing
    # ordinals, for which the maximal ordering of a sum (and of the head
    # exponent of a product) adds the larger summands first.  Tuples may
    # therefore be searched as nonincreasing multisets, evaluated in
    # canonical order, and reported ascending.
    summing = cfg.mode == "ordinal_sum"
    best = ordinals.ZERO
    best_tuple: tuple[int, ...] | None = None

    def extend(prefix: tuple[int, ...], product: Fraction, acc: Ordinal):
        nonlocal best, best_tuple
        if len(prefix) == horizon:
            return
        cap = prefix[-1] if prefix else horizon
        for n in range(1, cap + 1):
            grown = product * thetas[n]
            if eps * grown <= theta_m:
                break
            if summing:
                acc2 = ordinals.add(acc, values[n])
                candidate = acc2
            else:
                acc2 = ordinals.mul(acc, values[n])
                candidate = ordinals.leading(acc2)[0]
            if ordinals.compare(candidate, best) > 0:
                best = candidate
                best_tuple = tuple(reversed(prefix + (n,)))
            extend(prefix + (n,), grown, acc2)

    start = ordinals.ZERO if summing else ordinals.ONE
    extend((), Fraction(1), start)
    certified = (
        eps * thetas[horizon + 1] <= theta_m
        and eps * thetas[1] ** (horizon + 1) <= theta_m
    )
    return GammaResult(best, certified, best_tuple)


# -- dagger ----------------------------------------------------------------------


@dataclass(frozen=True)
class DaggerRow:
    beta: Ordinal
    witness: int | None
    uncertified: tuple[int, ...] = ()


@dataclass(frozen=True)
class DaggerReport:
    """Per-beta least witnesses for gamma(eps,m) + 2 + beta < ell(alpha_m).

    A finite probe of the dagger condition: a found witness is
    conclusive for that beta (gamma values are horizon-certified before
    use), while ``witness is None`` only says no witness exists up to
    the probe horizon.
    """

    eps: Fraction
    horizon: int
    rows: tuple[DaggerRow, ...]
    certainty: str = "horizon"


def dagger_probe(eps, betas, horizon: int, cfg: GammaConfig,
                 ell_alpha_rule) -> DaggerReport:
    eps = Fraction(eps)
    if horizon < 1 or horizon > cfg.horizon:
        raise DomainError("dagger horizon must lie within the gamma horizon")
    rows = []
    gamma_cache: dict[int, GammaResult] = {}
    for beta in betas:
        if not isinstance(beta, Ordinal):
            beta = ordinals.from_int(beta)
        witness = None
        skipped = []
        for m in range(1, horizon + 1):
            if m not in gamma_cache:
                gamma_cache[m] = gamma_ordinal(eps, m, cfg)
            result = gamma_cache[m]
            if not result.certified:
                skipped.append(m)
                continue
            reach = ordinals.add(ordinals.add(result.value, ordinals.TWO), beta)
            if ordinals.compare(reach, ell_alpha_rule.value(m)) < 0:
                witness = m
                break
        rows.append(DaggerRow(beta, witness, tuple(skipped)))
    return DaggerReport(eps, horizon, tuple(rows))


# -- theta diagnostics ------------------------------------------------------------


def integer_nth_root(value: int, n: int) -> int:
    """floor(value ** (1/n)) by Newton iteration on integers."""
    if value < 0 or n < 1:
        raise DomainError("integer_nth_root needs value >= 0 and n >= 1")
    if value == 0:
        return 0
    guess = 1 << ((value.bit_length() + n - 1) // n)
    while True:
        better = ((n - 1) * guess + value // guess ** (n - 1)) // n
        if better >= guess:
            break
        guess = better
    while guess ** n > value:
        guess -= 1
    while (guess + 1) ** n <= value:
        guess += 1
    return guess


ROOT_SCALE = 10 ** 8
ROOT_WIDTH = Fraction(1, 10 ** 7)


@dataclass(frozen=True)
class DiagnosticsReport:
    """Horizon-limited diagnostics of a weight sequence.

    ``ratio_profile`` tabulates max_n theta_{m+n}/theta_n exactly;
    ``ratio_verdict`` extrapolates whether the profile stays away from
    zero (labelled by ``certainty``).  ``root_profile`` carries
    theta_n**(1/n) as a certified lower value of stated width.
    """

    horizon: int
    ratio_profile: tuple[tuple[int, Fraction], ...]
    ratio_verdict: str
    root_profile: tuple[tuple[int, Fraction], ...]
    root_width: Fraction
    submultiplicative: bool
    submultiplicative_equality: bool
    violation: tuple[int, int] | None
    certainty: str = "horizon"


def theta_diagnostics(sp: ne.SpaceSpec, horizon: int) -> DiagnosticsReport:
    if horizon < 2:
        raise DomainError("diagnostics need a horizon >= 2")
    theta = sp.theta
    max_m = min(12, horizon - 1)
    ratio_profile = []
    for m in range(1, max_m + 1):
        ratio_profile.append(
            (m, max(theta(m + n) / theta(n) for n in range(1, horizon - m + 1)))
        )
    half = ratio_profile[max(0, len(ratio_profile) // 2 - 1)][1]
    last = ratio_profile[-1][1]
    ratio_verdict = "positive" if last > half / 2 else "zero"

    root_profile = []
    for n in range(1, horizon + 1):
        th = theta(n)
        scaled = th.numerator * ROOT_SCALE ** n // th.denominator
        root_profile.append((n, Fraction(integer_nth_root(scaled, n), ROOT_SCALE)))

    submult = True
    equality = True
    violation = None
    for m in range(1, horizon):
        for n in range(1, horizon - m + 1):
            lhs = theta(m + n)
            rhs = theta(m) * theta(n)
            if lhs != rhs:
                equality = False
            if lhs < rhs:
                submult = False
                violation = (m, n)
                break
        if violation:
            break

    return DiagnosticsReport(
        horizon=horizon,
        ratio_profile=tuple(ratio_profile),
        ratio_verdict=ratio_verdict,
        root_profile=tuple(root_profile),
        root_width=ROOT_WIDTH,
        submultiplicative=submult,
        submultiplicative_equality=submult and equality,
        violation=violation,
    )


# -- tameness ----------------------------------------------------------------------


@dataclass(frozen=True)
class TameRow:
    clause: int
    n: int
    counterexample: FiniteSet | None
    note: str = ""

    @property
    def passed(self) -> bool:
        return self.counterexample is None


@dataclass(frozen=True)
class TameReport:
    """Finite-universe tameness check of a family sequence.

    Clause 1 asks each level to be an at-most-k family or to satisfy
    F[A_3] within (F)^2; clause 2 bounds the tail levels against the
    anchor level n0.  ``failure`` is the first failing row in scan
    order (clause 1 levels, then clause 2 levels).
    """

    n0: int
    n_max: int
    universe: int
    rows: tuple[TameRow, ...]

    @property
    def passed(self) -> bool:
        return all(row.passed for row in self.rows)

    @property
    def failure(self) -> TameRow | None:
        return next((row for row in self.rows if not row.passed), None)

    def row(self, clause: int, n: int) -> TameRow:
        for entry in self.rows:
            if entry.clause == clause and entry.n == n:
                return entry
        raise KeyError((clause, n))


def tame_check(family_rule, n0: int, n_max: int, universe: int) -> TameReport:
    if not 1 <= n0 <= n_max:
        raise DomainError("need 1 <= n0 <= n_max")
    rows = []
    for n in range(1, n_max + 1):
        family = family_rule.family(n)
        if isinstance(family, fam.Ank):
            rows.append(TameRow(1, n, None, "at-most-k family"))
            continue
        cex = fam.subset_check(
            fam.Apply(family, fam.Ank(3)), fam.Power(family, 2), universe
        )
        rows.append(TameRow(1, n, cex))
    anchor = family_rule.family(n0)
    for n in range(n0 + 1, n_max + 1):
        family = family_rule.family(n)
        cex = fam.subset_check(
            fam.Apply(fam.Minus(family, anchor), fam.Ank(2)), family, universe
        )
        rows.append(TameRow(2, n, cex))
    return TameReport(n0, n_max, universe, tuple(rows))


# -- spreading-model constants --------------------------------------------------


def spreading_constant(blocks, family: Family, window: tuple[int, int],
                       coeffs, sp: ne.SpaceSpec) -> Fraction:
    """Least ratio |sum_{k in F} a_k x_k| / sum_{k in F} |a_k|.

    The minimum runs over nonempty members F of the family inside the
    window of block positions (1-based).  This is the best
    reciprocal-constant certifiable on the window.
    """
    blocks = list(blocks)
    coeffs = [Fraction(c) for c in coeffs]
    if len(blocks) != len(coeffs):
        raise DomainError("need one coefficient per block")
    if any(c == 0 for c in coeffs):
        raise DomainError("coefficients must be nonzero")
    previous_max = 0
    for vec in blocks:
        if vec.is_zero():
            raise DomainError("blocks must be nonzero")
        if vec.support[0] <= previous_max:
            raise DomainError("blocks must have successive supports")
        previous_max = vec.support[-1]
    lo, hi = window
    if not 1 <= lo <= hi <= len(blocks):
        raise DomainError("window must be a nonempty range of block positions")

    best: Fraction | None = None
    for members in fam._iter_members(family, lo, hi, hi):
        if not members:
            continue
        combo = ne.Vector()
        weight = Fraction(0)
        for k in members:
            combo = combo + blocks[k - 1].scale(coeffs[k - 1])
            weight += abs(coeffs[k - 1])
        ratio = ne.norm_value(combo, sp) / weight
        if best is None or ratio < best:
            best = ratio
    if best is None:
        raise DomainError("no nonempty family member lies inside the window")
    return best


# -- shift-domination witnesses ---------------------------------------------------


def shift_witness(x: ne.Vector, y: ne.Vector, m: int, sp: ne.SpaceSpec,
                  universe: tuple[int, int]):
    """Three successive intervals E1 < E2 < E3 with |x|_m <= sum |E_i y|_m.

    ``x`` and ``y`` must be the shifted/unshifted pair built from one
    coefficient list over an increasing index sequence.  Returns the
    lexicographically first witness (trailing intervals may be empty) or
    None; None on a valid nonzero instance indicates a solver bug.  The
    zero pair returns None vacuously.
    """
    if len(x.entries) != len(y.entries):
        raise DomainError("malformed pair: supports differ in size")
    for (kx, cx), (ky, cy) in zip(x.entries, y.entries):
        if cx != cy:
            raise DomainError("malformed pair: coefficients differ")
        if ky >= kx:
            raise DomainError("malformed pair: x must be the right shift of y")
    for (kx, _), (ky2, _) in zip(x.entries, y.entries[1:]):
        if kx > ky2:
            raise DomainError("malformed pair: shifted indices interleave")
    if x.is_zero():
        return None
    lo, hi = universe
    if lo > hi:
        raise DomainError("empty universe")
    target = ne.level_norm(x, sp, m)

    spans = [
        (a, b) for a in range(lo, hi + 1) for b in range(a, hi + 1)
    ]

    def interval(a, b):
        return tuple(range(a, b + 1))

    for r in range(1, 4):
        for picks in itertools.combinations(spans, r):
            ok = all(p[1] < q[0] for p, q in zip(picks, picks[1:]))
            if not ok:
                continue
            total = sum(
                (ne.level_norm(y.restrict(interval(a, b)), sp, m)
                 for a, b in picks),
                Fraction(0),
            )
            if total >= target:
                sets = tuple(interval(a, b) for a, b in picks)
                return sets + ((),) * (3 - r)
    return None


# -- the layered Schreier-sum bound ------------------------------------------------


@dataclass(frozen=True)
class ScheduleReport:
    """Layered upper bound |x| <= sum_i pi_{i-1} * rho_i(x).

    ``pi[i]`` is the largest theta product over level multisets whose
    index sum exceeds schedule[i]; ``rho[i]`` the heaviest coefficient
    mass on a member of the depth-budgeted composed family.  The i=1
    term uses pi_0 = 1, a safe convention for the otherwise undefined
    leading factor.
    """

    schedule: tuple[int, ...]
    pi: tuple[Fraction, ...]
    rho: tuple[Fraction, ...]
    bound: Fraction
    norm_value: Fraction

    @property
    def holds(self) -> bool:
        return self.norm_value <= self.bound


def _max_theta_product(sp: ne.SpaceSpec, total: int) -> Fraction:
    """Largest product theta_{m_1}...theta_{m_r} with m_1+...+m_r = total.

    Lowering any index raises its factor and dropping an all-ones factor
    raises the product, so the maximum over sums exceeding a bound is
    attained at the exact sum bound+1.
    """
    memo: dict[tuple[int, int], Fraction] = {}

    def best(remaining: int, cap: int) -> Fraction:
        if remaining == 0:
            return Fraction(1)
        cap = min(cap, remaining)
        key = (remaining, cap)
        hit = memo.get(key)
        if hit is None:
            hit = max(
                sp.theta(m) * best(remaining - m, m) for m in range(1, cap + 1)
            )
            memo[key] = hit
        return hit

    return best(total, total)


def _min_tree_budget(sp: ne.SpaceSpec, coords: FiniteSet, cap: int) -> int | None:
    """Least level-sum of a uniform-depth admissible layering of coords.

    States are the frozen multisets of pending node sets; one step picks
    a level m, splits each node into an F_m-admissible run of chunks
    (staying whole is allowed since every family contains singletons),
    and a final level must absorb every pending node at once.
    """
    if not coords:
        return 0

    def node_splits(node: FiniteSet, family: Family):
        options = []

        def walk(pos: int, minima: FiniteSet, chunks):
            if pos == len(node):
                options.append(tuple(chunks))
                return
            grown = minima + (node[pos],)
            if not fam.member(family, grown):
                return
            for end in range(pos + 1, len(node) + 1):
                chunks.append(node[pos:end])
                walk(end, grown, chunks)
                chunks.pop()

        walk(0, (), [])
        return options

    start = frozenset({coords})
    costs: dict[frozenset, int] = {start: 0}
    frontier = [start]
    best: int | None = None
    while frontier:
        state = min(frontier, key=lambda s: costs[s])
        frontier.remove(state)
        used = costs[state]
        if best is not None and used >= best:
            continue
        for m in range(1, cap - used + 1):
            family = sp.family(m)
            if all(fam.member(family, node) for node in state):
                # Finishing here costs used+m; any deeper work at levels
                # >= m from this state is dominated, so stop the scan.
                total = used + m
                if best is None or total < best:
                    best = total
                break
            per_node = [node_splits(node, family) for node in state]
            if any(not opts for opts in per_node):
                continue
            for pick in itertools.product(*per_node):
                if all(len(chunks) == 1 for chunks in pick):
                    continue
                next_state = frozenset(
                    chunk for chunks in pick for chunk in chunks
                )
                total = used + m
                if best is not None and total >= best:
                    continue
                old = costs.get(next_state)
                if old is None or total < old:
                    costs[next_state] = total
                    if next_state not in frontier:
                        frontier.append(next_state)
    return best if best is None or best <= cap else None


def schreier_sum_bound(x: ne.Vector, sp: ne.SpaceSpec,
                       schedule) -> ScheduleReport:
    schedule = tuple(schedule)
    if not schedule or any(b >= a for a, b in zip(schedule[1:], schedule)):
        raise DomainError("the schedule must be strictly increasing")
    if schedule[0] < 1:
        raise DomainError("schedule entries must be >= 1")

    pi = tuple(_max_theta_product(sp, n_i + 1) for n_i in schedule)
    for i, value in enumerate(pi, start=1):
        if value >= Fraction(1, 2 ** i):
            raise DomainError(
                f"schedule fails pi_{i} < 2^-{i}: pi_{i} = "
                f"{ne.format_rational(value)}"
            )

    support = x.support
    weights = {k: abs(c) for k, c in x.entries}
    cap = schedule[-1]
    cache = getattr(sp, "_budget_cache", None)
    if cache is None:
        cache = sp._budget_cache = {}
    budgets: dict[FiniteSet, int | None] = {}
    for r in range(len(support) + 1):
        for subset in itertools.combinations(support, r):
            key = (subset, cap)
            if key not in cache:
                cache[key] = _min_tree_budget(sp, subset, cap)
            budgets[subset] = cache[key]

    rho = []
    for n_i in schedule:
        heaviest = Fraction(0)
        for subset, needed in budgets.items():
            if needed is not None and needed <= n_i:
                mass = sum((weights[k] for k in subset), Fraction(0))
                if mass > heaviest:
                    heaviest = mass
        rho.append(heaviest)

    bound = Fraction(0)
    previous = Fraction(1)
    for i, value in enumerate(rho):
        bound += previous * value
        previous = pi[i]

    return ScheduleReport(
        schedule=schedule,
        pi=pi,
        rho=tuple(rho),
        bound=bound,
        norm_value=ne.norm_value(x, sp),
    )
