"""Symbolic regular families of finite subsets of N.

A family expression denotes a hereditary collection of finite sets of
positive integers with decidable membership.  Constructors:

* ``Singletons()``           -- the empty set and all one-point sets
* ``Ank(k)``                 -- sets with at most k elements
* ``Schreier(a)``            -- the Schreier family of ordinal rank a
* ``Apply(F, G)``            -- unions of G-blocks whose minima form an F-set
* ``PairSum(F, G)``          -- unions F' u G' with F' < G'
* ``Power(F, n)``            -- at most n successive F-blocks
* ``Union(F, G)``            -- set union of the two families
* ``Minus(F, G)``            -- sets preceded by a maximal G-set inside F
* ``Restrict(F, rule)``      -- members whose elements all lie in the rule's range
* ``Renumber(F, rule)``      -- sets whose image under the rule lies in F
* ``Explicit(sets)``         -- a finite family, closed hereditarily

All constructors except ``Minus`` denote hereditary *and spreading*
families; ``Minus`` is hereditary only.  The empty set belongs to every
family.  Limit-rank Schreier families depend on the fundamental-sequence
assignment documented in :mod:`tsinorm.ordinals`; see
``FUNDAMENTAL_SEQUENCE_NOTE``.

Text syntax: ``S0``, ``S[a]``, ``A[k]``, ``F.apply(G)``, ``(F,G)``,
``F^n``, ``F-G``, ``F|M``, ``F@M``, ``union(F,G)``,
``explicit({1,2},{4})`` where ``M`` is a linear index rule such as
``2k+1``.  The printer round-trips.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache

from . import ordinals
from .errors import DomainError, ParseError
from .ordinals import ONE, Ordinal

FiniteSet = tuple[int, ...]

FUNDAMENTAL_SEQUENCE_NOTE = (
    "limit Schreier ranks use the fundamental sequences "
    "(g + w^(b+1))[n] = g + w^b*n and (g + w^l)[n] = g + w^(l[n])"
)

# Fallback probe bound for maximality tests when no universe is in scope.
# For spreading families a single probe already decides maximality, so the
# exact value only matters for hand-built Explicit families.
DEFAULT_PROBE_BOUND = 12


def finite_set(values) -> FiniteSet:
    """Canonical finite set: a strictly increasing tuple of ints >= 1."""
    items = tuple(values)
    for v in items:
        if not isinstance(v, int) or isinstance(v, bool) or v < 1:
            raise DomainError(f"set elements must be integers >= 1, got {v!r}")
    if len(set(items)) != len(items):
        raise DomainError("set elements must be distinct")
    return tuple(sorted(items))


def format_set(s: FiniteSet) -> str:
    return "{" + ",".join(str(v) for v in s) + "}"


def parse_set(text: str) -> FiniteSet:
    body = text.strip()
    if body.startswith("{") and body.endswith("}"):
        body = body[1:-1]
    body = body.strip()
    if not body:
        return ()
    try:
        return finite_set(int(part) for part in body.split(","))
    except ValueError as exc:
        raise ParseError(f"bad set literal {text!r}: {exc}") from None


# -- index rules -------------------------------------------------------------


@dataclass(frozen=True)
class LinearIndexRule:
    """The strictly increasing sequence p_k = step*k + offset, k >= 1."""

    step: int
    offset: int = 0

    def __post_init__(self):
        if self.step < 1:
            raise DomainError("index rule must be strictly increasing (step >= 1)")
        if self.value(1) < 1:
            raise DomainError("index rule must produce integers >= 1")

    def value(self, k: int) -> int:
        return self.step * k + self.offset

    def contains(self, m: int) -> bool:
        if m < self.value(1):
            return False
        return (m - self.offset) % self.step == 0

    def __str__(self):
        head = "k" if self.step == 1 else f"{self.step}k"
        if self.offset == 0:
            return head
        return f"{head}+{self.offset}" if self.offset > 0 else f"{head}{self.offset}"


_RULE_RE = re.compile(r"^(\d*)k([+-]\d+)?$")


def parse_index_rule(text: str) -> LinearIndexRule:
    match = _RULE_RE.match(text.strip())
    if not match:
        raise ParseError(f"bad index rule {text!r}; expected forms like k, 2k, 3k+1")
    step = int(match.group(1)) if match.group(1) else 1
    offset = int(match.group(2)) if match.group(2) else 0
    return LinearIndexRule(step, offset)


# -- expression nodes --------------------------------------------------------


class Family:
    """Base class for family expressions (immutable, hashable)."""

    def __str__(self):
        return format_family(self)


@dataclass(frozen=True)
class Singletons(Family):
    pass


@dataclass(frozen=True)
class Ank(Family):
    size: int

    def __post_init__(self):
        if self.size < 1:
            raise DomainError("Ank size must be >= 1")


@dataclass(frozen=True)
class Schreier(Family):
    rank: Ordinal

    def __post_init__(self):
        if not isinstance(self.rank, Ordinal):
            raise DomainError("Schreier rank must be an Ordinal")


@dataclass(frozen=True)
class Apply(Family):
    outer: Family
    inner: Family


@dataclass(frozen=True)
class PairSum(Family):
    first: Family
    second: Family


@dataclass(frozen=True)
class Power(Family):
    base: Family
    count: int

    def __post_init__(self):
        if self.count < 1:
            raise DomainError("Power count must be >= 1")


@dataclass(frozen=True)
class Union(Family):
    left: Family
    right: Family


@dataclass(frozen=True)
class Minus(Family):
    base: Family
    removed: Family


@dataclass(frozen=True)
class Restrict(Family):
    base: Family
    members: LinearIndexRule


@dataclass(frozen=True)
class Renumber(Family):
    base: Family
    sequence: LinearIndexRule


@dataclass(frozen=True)
class Explicit(Family):
    sets: frozenset

    @classmethod
    def of(cls, sets) -> "Explicit":
        """Build from generating sets, closing hereditarily."""
        closed = {()}
        for raw in sets:
            s = finite_set(raw)
            for mask in range(1 << len(s)):
                closed.add(tuple(s[i] for i in range(len(s)) if mask >> i & 1))
        return cls(frozenset(closed))

    def __post_init__(self):
        for s in self.sets:
            finite_set(s)
            for i in range(len(s)):
                sub = s[:i] + s[i + 1:]
                if sub not in self.sets:
                    raise DomainError(
                        "Explicit families must be hereditarily closed; "
                        "use Explicit.of"
                    )
        if self.sets and () not in self.sets:
            raise DomainError("Explicit families must contain the empty set")


def norm_grade(family: Family) -> bool:
    """True when the expression uses only scanner-capable constructors."""
    if isinstance(family, (Singletons, Ank, Schreier)):
        return True
    if isinstance(family, Apply):
        return norm_grade(family.outer) and norm_grade(family.inner)
    if isinstance(family, PairSum):
        return norm_grade(family.first) and norm_grade(family.second)
    if isinstance(family, Power):
        return norm_grade(family.base)
    if isinstance(family, Union):
        return norm_grade(family.left) and norm_grade(family.right)
    return False


def has_limit_schreier(family: Family) -> bool:
    """True when evaluating the family involves a fundamental sequence."""
    if isinstance(family, Schreier):
        rank = family.rank
        while rank.is_successor():
            rank = rank.predecessor()
        return rank.is_limit()
    for attr in ("outer", "inner", "first", "second", "base", "removed",
                 "left", "right"):
        child = getattr(family, attr, None)
        if isinstance(child, Family) and has_limit_schreier(child):
            return True
    return False


# -- membership --------------------------------------------------------------


def member(family: Family, s, probe_bound: int | None = None) -> bool:
    """Decide whether the set belongs to the family.

    ``probe_bound`` limits the single-element extension probes used for
    the maximality test inside ``Minus``; operations that know a finite
    universe pass its size, and bare calls fall back to
    ``DEFAULT_PROBE_BOUND``.
    """
    return _member(family, finite_set(s), probe_bound)


@lru_cache(maxsize=None)
def _schreier_step(rank: Ordinal) -> Family:
    return Apply(Schreier(ONE), Schreier(rank.predecessor()))


@lru_cache(maxsize=None)
def _member(family: Family, s: FiniteSet, probe: int | None) -> bool:
    if isinstance(family, Singletons):
        return len(s) <= 1
    if isinstance(family, Ank):
        return len(s) <= family.size
    if isinstance(family, Schreier):
        if not s:
            return True
        rank = family.rank
        if rank.is_zero():
            return len(s) <= 1
        if ordinals.compare(rank, ONE) == 0:
            return len(s) <= s[0]
        if rank.is_successor():
            return _member(_schreier_step(rank), s, probe)
        return any(
            _member(Schreier(rank.fundamental(n)), s, probe)
            for n in range(1, s[0] + 1)
        )
    if isinstance(family, Apply):
        return _member_apply(family, s, probe)
    if isinstance(family, PairSum):
        return any(
            _member(family.first, s[:j], probe)
            and _member(family.second, s[j:], probe)
            for j in range(len(s) + 1)
        )
    if isinstance(family, Power):
        if family.count == 1:
            return _member(family.base, s, probe)
        rest = Power(family.base, family.count - 1)
        return any(
            _member(family.base, s[:j], probe) and _member(rest, s[j:], probe)
            for j in range(len(s) + 1)
        )
    if isinstance(family, Union):
        return _member(family.left, s, probe) or _member(family.right, s, probe)
    if isinstance(family, Minus):
        return _member_minus(family, s, probe)
    if isinstance(family, Restrict):
        return all(family.members.contains(v) for v in s) and _member(
            family.base, s, probe
        )
    if isinstance(family, Renumber):
        mapped = tuple(family.sequence.value(k) for k in s)
        return _member(family.base, mapped, probe)
    if isinstance(family, Explicit):
        return s in family.sets
    raise DomainError(f"unknown family constructor {type(family).__name__}")


def _member_apply(family: Apply, s: FiniteSet, probe: int | None) -> bool:
    if not s:
        return True
    outer, inner = family.outer, family.inner
    n = len(s)
    dead = set()

    def walk(pos: int, minima: FiniteSet) -> bool:
        if pos == n:
            return True
        key = (pos, minima)
        if key in dead:
            return False
        grown = minima + (s[pos],)
        if _member(outer, grown, probe):
            for end in range(pos + 1, n + 1):
                if _member(inner, s[pos:end], probe) and walk(end, grown):
                    return True
        dead.add(key)
        return False

    return walk(0, ())


def _member_minus(family: Minus, s: FiniteSet, probe: int | None) -> bool:
    # Convention: the empty set belongs to every family, Minus included.
    if not s:
        return True
    bound = probe if probe is not None else DEFAULT_PROBE_BOUND
    for g in _iter_members(family.removed, 1, s[0] - 1, probe):
        if _is_maximal(family.removed, g, bound, probe) and _member(
            family.base, g + s, probe
        ):
            return True
    return False


def _is_maximal(family: Family, s: FiniteSet, bound: int, probe: int | None) -> bool:
    """No single-element extension within max(s)+bound is a member.

    By heredity this decides whether any proper superset with elements
    <= max(s)+bound exists; elements below max(s) are probed as well so
    the test is also complete for non-spreading Explicit families.
    """
    top = (s[-1] if s else 0) + bound
    present = set(s)
    for m in range(1, top + 1):
        if m in present:
            continue
        if _member(family, tuple(sorted(s + (m,))), probe):
            return False
    return True


def _iter_members(family: Family, lo: int, hi: int, probe: int | None):
    """Depth-first members within {lo..hi}, in lexicographic order."""

    def walk(s: FiniteSet):
        yield s
        for m in range((s[-1] + 1) if s else lo, hi + 1):
            t = s + (m,)
            if _member(family, t, probe):
                yield from walk(t)

    if _member(family, (), probe):
        yield from walk(())


# -- public set operations ---------------------------------------------------


def is_maximal(family: Family, s, probe_bound: int = DEFAULT_PROBE_BOUND) -> bool:
    """True when no proper superset within max(s)+probe_bound is a member."""
    s = finite_set(s)
    if probe_bound < 1:
        raise DomainError("probe_bound must be >= 1")
    if not _member(family, s, probe_bound):
        raise DomainError(f"{format_set(s)} is not a member of {family}")
    return _is_maximal(family, s, probe_bound, probe_bound)


def enumerate_members(
    family: Family, universe: int, probe_bound: int | None = None
) -> list[FiniteSet]:
    """All members contained in {1..universe}, in lexicographic order."""
    if universe < 1:
        raise DomainError("universe must be >= 1")
    probe = probe_bound if probe_bound is not None else universe
    return list(_iter_members(family, 1, universe, probe))


def subset_check(
    family: Family, other: Family, universe: int, probe_bound: int | None = None
) -> FiniteSet | None:
    """First member of ``family`` within {1..universe} outside ``other``.

    Returns None when the truncated inclusion holds.
    """
    if universe < 1:
        raise DomainError("universe must be >= 1")
    probe = probe_bound if probe_bound is not None else universe
    for s in _iter_members(family, 1, universe, probe):
        if not _member(other, s, probe):
            return s
    return None


def is_admissible(family: Family, sets, probe_bound: int | None = None) -> bool:
    """True when the successive sets' minima form a member of the family."""
    cleaned = [finite_set(s) for s in sets]
    if not cleaned:
        raise DomainError("admissibility requires a nonempty sequence of sets")
    minima = []
    for prev, cur in zip(cleaned, cleaned[1:]):
        if not prev or not cur:
            raise DomainError("admissibility requires nonempty sets")
        if prev[-1] >= cur[0]:
            raise DomainError("sets must be successively ordered E1 < E2 < ...")
    for cur in cleaned:
        if not cur:
            raise DomainError("admissibility requires nonempty sets")
        minima.append(cur[0])
    return _member(family, tuple(minima), probe_bound)


# -- incremental admissibility scanning ---------------------------------------


def _check_scanner_grade(family: Family):
    if not norm_grade(family):
        raise DomainError(
            "scanners support only Singletons/Ank/Schreier/Apply/PairSum/"
            f"Power/Union constructors, got {family}"
        )


def scan_start(family: Family, m: int) -> FiniteSet | None:
    """Scanner state after a first minimum m, or None when rejected."""
    return ((m,) if _member(family, (m,), None) else None)


def scan_advance(family: Family, state: FiniteSet, m: int) -> FiniteSet | None:
    """Scanner state after a further minimum m, or None when rejected.

    The state is the accepted prefix itself; heredity makes the prefix
    test sound (every prefix of a member is a member) and the memoized
    membership recursion keyed on (position, residual state) does the
    backtracking over block boundaries.
    """
    grown = state + (m,)
    return grown if _member(family, grown, None) else None


class AdmissibilityScanner:
    """Incremental left-to-right membership scan over a set's elements.

    ``extend(m)`` feeds the next (strictly larger) element and reports
    whether the enlarged set is still a member; rejected extensions leave
    the scanner unchanged.  Because every accepted prefix is itself a
    member (the families are hereditary), ``accept`` is true whenever all
    extends succeeded.
    """

    def __init__(self, family: Family):
        _check_scanner_grade(family)
        self.family = family
        self._state: FiniteSet = ()

    def extend(self, m: int) -> bool:
        if self._state and m <= self._state[-1]:
            raise DomainError("elements must be fed in strictly increasing order")
        grown = self._state + (m,)
        if not _member(self.family, grown, None):
            return False
        self._state = grown
        return True

    def accept(self) -> bool:
        return True

    def reset(self):
        self._state = ()

    @property
    def elements(self) -> FiniteSet:
        return self._state

    def scan(self, s) -> bool:
        """Convenience: reset, then feed a whole set."""
        self.reset()
        return all(self.extend(m) for m in finite_set(s))


# -- symbolic index bounds -----------------------------------------------------


def index_bound(family: Family) -> tuple[Ordinal, bool]:
    """Upper bound for the Cantor-Bendixson index, with an exactness flag."""
    if isinstance(family, Singletons):
        return ONE, True
    if isinstance(family, Ank):
        return ordinals.from_int(family.size), True
    if isinstance(family, Schreier):
        return ordinals.omega_power(family.rank), True
    if isinstance(family, Apply):
        outer, _ = index_bound(family.outer)
        inner, _ = index_bound(family.inner)
        return ordinals.mul(inner, outer), False
    if isinstance(family, Power):
        base, _ = index_bound(family.base)
        exact = isinstance(family.base, (Singletons, Ank, Schreier))
        return ordinals.mul(base, ordinals.from_int(family.count)), exact
    if isinstance(family, PairSum):
        first, _ = index_bound(family.first)
        second, _ = index_bound(family.second)
        return ordinals.add(second, first), False
    if isinstance(family, Union):
        left, _ = index_bound(family.left)
        right, _ = index_bound(family.right)
        return (left if ordinals.compare(left, right) >= 0 else right), False
    raise DomainError(f"no index bound for constructor {type(family).__name__}")


# -- text --------------------------------------------------------------------


def format_family(family: Family) -> str:
    def postfix_base(f: Family) -> str:
        text = format_family(f)
        return f"({text})" if isinstance(f, Minus) else text

    if isinstance(family, Singletons):
        return "S0"
    if isinstance(family, Ank):
        return f"A[{family.size}]"
    if isinstance(family, Schreier):
        return f"S[{ordinals.format_ordinal(family.rank)}]"
    if isinstance(family, Apply):
        return f"{postfix_base(family.outer)}.apply({format_family(family.inner)})"
    if isinstance(family, PairSum):
        return f"({format_family(family.first)},{format_family(family.second)})"
    if isinstance(family, Power):
        return f"{postfix_base(family.base)}^{family.count}"
    if isinstance(family, Union):
        return f"union({format_family(family.left)},{format_family(family.right)})"
    if isinstance(family, Minus):
        right = format_family(family.removed)
        if isinstance(family.removed, Minus):
            right = f"({right})"
        return f"{format_family(family.base)}-{right}"
    if isinstance(family, Restrict):
        return f"{postfix_base(family.base)}|{family.members}"
    if isinstance(family, Renumber):
        return f"{postfix_base(family.base)}@{family.sequence}"
    if isinstance(family, Explicit):
        maximal = sorted(
            s for s in family.sets
            if not any(s != t and set(s) <= set(t) for t in family.sets)
        )
        body = ",".join(format_set(s) for s in maximal)
        return f"explicit({body})"
    raise DomainError(f"unknown family constructor {type(family).__name__}")


class _FamilyReader:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def skip_ws(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self, width: int = 1) -> str:
        self.skip_ws()
        return self.text[self.pos:self.pos + width]

    def take(self, token: str) -> bool:
        if self.peek(len(token)) == token:
            self.pos += len(token)
            return True
        return False

    def expect(self, token: str):
        if not self.take(token):
            raise ParseError(f"expected {token!r}", column=self.pos + 1)

    def integer(self) -> int:
        self.skip_ws()
        start = self.pos
        while self.pos < len(self.text) and self.text[self.pos].isdigit():
            self.pos += 1
        if self.pos == start:
            raise ParseError("expected an integer", column=start + 1)
        return int(self.text[start:self.pos])

    def rule(self) -> LinearIndexRule:
        self.skip_ws()
        match = re.match(r"\d*k([+-]\d+)?", self.text[self.pos:])
        if not match:
            raise ParseError("expected an index rule like 2k+1", column=self.pos + 1)
        self.pos += match.end()
        return parse_index_rule(match.group(0))


def parse_family(text: str) -> Family:
    reader = _FamilyReader(text)
    value = _parse_minus(reader)
    reader.skip_ws()
    if reader.pos != len(reader.text):
        raise ParseError("trailing input after family", column=reader.pos + 1)
    return value


def _parse_minus(reader: _FamilyReader) -> Family:
    value = _parse_postfix(reader)
    while reader.take("-"):
        value = Minus(value, _parse_postfix(reader))
    return value


def _parse_postfix(reader: _FamilyReader) -> Family:
    value = _parse_atom(reader)
    while True:
        if reader.take(".apply("):
            inner = _parse_minus(reader)
            reader.expect(")")
            value = Apply(value, inner)
        elif reader.take("^"):
            value = Power(value, reader.integer())
        elif reader.take("|"):
            value = Restrict(value, reader.rule())
        elif reader.take("@"):
            value = Renumber(value, reader.rule())
        else:
            return value


def _parse_atom(reader: _FamilyReader) -> Family:
    if reader.take("S0"):
        return Singletons()
    if reader.take("S["):
        reader.skip_ws()
        depth = 0
        start = reader.pos
        while reader.pos < len(reader.text):
            ch = reader.text[reader.pos]
            if ch == "{":
                depth += 1
            elif ch == "}":
                depth -= 1
            elif ch == "]" and depth == 0:
                break
            reader.pos += 1
        rank = ordinals.parse_ordinal(reader.text[start:reader.pos])
        reader.expect("]")
        return Schreier(rank)
    if reader.take("A["):
        size = reader.integer()
        reader.expect("]")
        return Ank(size)
    if reader.take("union("):
        left = _parse_minus(reader)
        reader.expect(",")
        right = _parse_minus(reader)
        reader.expect(")")
        return Union(left, right)
    if reader.take("explicit("):
        sets = []
        if not reader.take(")"):
            while True:
                reader.skip_ws()
                if not reader.take("{"):
                    raise ParseError("expected a set literal", column=reader.pos + 1)
                end = reader.text.find("}", reader.pos)
                if end < 0:
                    raise ParseError("unterminated set literal", column=reader.pos)
                sets.append(parse_set(reader.text[reader.pos:end]))
                reader.pos = end + 1
                if reader.take(")"):
                    break
                reader.expect(",")
        return Explicit.of(sets)
    if reader.take("("):
        first = _parse_minus(reader)
        if reader.take(","):
            second = _parse_minus(reader)
            reader.expect(")")
            return PairSum(first, second)
        reader.expect(")")
        return first
    raise ParseError("expected a family expression", column=reader.pos + 1)
