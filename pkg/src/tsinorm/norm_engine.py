"""Exact evaluation of mixed Tsirelson norms on finitely supported vectors.

A space is the data (theta_n, F_n): a nonincreasing null sequence of
rational weights in (0,1) together with a sequence of admissibility
families.  The norm is the least solution of

    |x| = max( |x|_c0 , sup_n theta_n * sup sum_i |E_i x| )

with the inner sup over F_n-admissible successive sets E_1 < E_2 < ...

The solver enumerates only decompositions of a suffix of the support
into consecutive intervals.  This loses nothing: admissibility depends
only on the block minima and the norm grows under coordinate
enlargement, so interval hulls dominate every admissible sequence.  A
level n can contribute at most theta_n * |x|_l1, and theta decreases to
zero, so the level loop stops soundly once that bound cannot beat the
best value found.  All arithmetic is exact (fractions.Fraction); ties
between candidate trees are broken deterministically: a plain leaf
beats any equal-valued split, then the smaller level wins, then the
lexicographically earliest breakpoint sequence.

The full norm equals the m-th iterated norm once m >= |supp x|: a
strict increase at stage m+1 needs a split into at least two nonempty
parts, each with strictly smaller support, so the optimal tree has
depth < |supp x| and the iteration has stabilized by then.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction

from . import families as fam
from . import ordinals
from .errors import ConfigError, DomainError, ParseError
from .families import Family, FiniteSet

BRUTE_FORCE_SUPPORT_LIMIT = 8


def parse_rational(text: str) -> Fraction:
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise ParseError(f"bad rational {text!r}: {exc}") from None


def format_rational(value: Fraction) -> str:
    value = Fraction(value)
    return f"{value.numerator}/{value.denominator}"


# -- vectors -------------------------------------------------------------------


@dataclass(frozen=True)
class Vector:
    """Finitely supported rational sequence over the unit-vector basis."""

    entries: tuple[tuple[int, Fraction], ...] = ()

    def __post_init__(self):
        last = 0
        for k, c in self.entries:
            if not isinstance(k, int) or isinstance(k, bool) or k < 1:
                raise DomainError(f"basis indices must be integers >= 1, got {k!r}")
            if k <= last:
                raise DomainError("vector entries must have increasing indices")
            if not isinstance(c, Fraction) or c == 0:
                raise DomainError("coefficients must be nonzero Fractions")
            last = k

    @classmethod
    def from_pairs(cls, pairs) -> "Vector":
        seen = {}
        for k, c in pairs:
            if k in seen:
                raise DomainError(f"duplicate index {k}")
            seen[k] = Fraction(c)
        return cls(tuple((k, seen[k]) for k in sorted(seen) if seen[k] != 0))

    @classmethod
    def basis(cls, k: int) -> "Vector":
        return cls(((k, Fraction(1)),))

    @classmethod
    def from_text(cls, text: str) -> "Vector":
        pairs = []
        for token in text.split():
            if ":" not in token:
                raise ParseError(f"bad vector entry {token!r}; expected k:num/den")
            idx, _, val = token.partition(":")
            try:
                k = int(idx)
            except ValueError:
                raise ParseError(f"bad basis index {idx!r}") from None
            pairs.append((k, parse_rational(val)))
        return cls.from_pairs(pairs)

    def to_text(self) -> str:
        return " ".join(f"{k}:{format_rational(c)}" for k, c in self.entries)

    @property
    def support(self) -> FiniteSet:
        return tuple(k for k, _ in self.entries)

    def is_zero(self) -> bool:
        return not self.entries

    def coeff(self, k: int) -> Fraction:
        for idx, c in self.entries:
            if idx == k:
                return c
        return Fraction(0)

    def restrict(self, keep) -> "Vector":
        keep = set(keep)
        return Vector(tuple((k, c) for k, c in self.entries if k in keep))

    def c0_norm(self) -> Fraction:
        return max((abs(c) for _, c in self.entries), default=Fraction(0))

    def l1_norm(self) -> Fraction:
        return sum((abs(c) for _, c in self.entries), Fraction(0))

    def scale(self, factor) -> "Vector":
        factor = Fraction(factor)
        if factor == 0:
            return Vector()
        return Vector(tuple((k, c * factor) for k, c in self.entries))

    def flip(self, signs) -> "Vector":
        """Flip the signs of the coefficients at the given indices."""
        signs = set(signs)
        return Vector(
            tuple((k, -c if k in signs else c) for k, c in self.entries)
        )

    def __add__(self, other: "Vector") -> "Vector":
        total = {k: c for k, c in self.entries}
        for k, c in other.entries:
            total[k] = total.get(k, Fraction(0)) + c
        return Vector(tuple((k, total[k]) for k in sorted(total) if total[k] != 0))

    def __str__(self):
        return self.to_text()


# -- theta rules ---------------------------------------------------------------


@dataclass(frozen=True)
class GeometricTheta:
    """theta_n = ratio**n."""

    ratio: Fraction

    def value(self, n: int) -> Fraction:
        return self.ratio ** n

    def text(self) -> str:
        return f"geometric {format_rational(self.ratio)}"


@dataclass(frozen=True)
class HarmonicTheta:
    """theta_n = 1 / (n + shift)."""

    shift: int

    def value(self, n: int) -> Fraction:
        return Fraction(1, n + self.shift)

    def text(self) -> str:
        return f"harmonic {self.shift}"


@dataclass(frozen=True)
class ListTailTheta:
    """Explicit leading values followed by a geometric tail."""

    head: tuple[Fraction, ...]
    ratio: Fraction

    def value(self, n: int) -> Fraction:
        if n <= len(self.head):
            return self.head[n - 1]
        return self.head[-1] * self.ratio ** (n - len(self.head))

    def text(self) -> str:
        head = ",".join(format_rational(v) for v in self.head)
        return f"list {head} tail geometric {format_rational(self.ratio)}"


def parse_theta_rule(text: str):
    words = text.split()
    if not words:
        raise ParseError("empty theta rule")
    kind = words[0]
    if kind == "geometric" and len(words) == 2:
        return GeometricTheta(parse_rational(words[1]))
    if kind == "harmonic" and len(words) == 2:
        try:
            return HarmonicTheta(int(words[1]))
        except ValueError:
            raise ParseError(f"bad harmonic shift {words[1]!r}") from None
    if kind == "list" and len(words) == 5 and words[2] == "tail" and words[3] == "geometric":
        head = tuple(parse_rational(v) for v in words[1].split(","))
        if not head:
            raise ParseError("theta list needs at least one value")
        return ListTailTheta(head, parse_rational(words[4]))
    raise ParseError(
        f"bad theta rule {text!r}; expected 'geometric q', 'harmonic c' or "
        "'list q1,q2 tail geometric q'"
    )


# -- family rules --------------------------------------------------------------


@dataclass(frozen=True)
class SchreierLevels:
    """F_n = Schreier family of rank n."""

    def family(self, n: int) -> Family:
        return fam.Schreier(ordinals.from_int(n))

    def text(self) -> str:
        return "schreier n"


@dataclass(frozen=True)
class AnkLevels:
    """F_n has at most step*n + offset elements."""

    rule: fam.LinearIndexRule

    def family(self, n: int) -> Family:
        return fam.Ank(self.rule.value(n))

    def text(self) -> str:
        return f"ank {str(self.rule).replace('k', 'n')}"


@dataclass(frozen=True)
class ConstantLevels:
    """The same family at every level."""

    value: Family

    def family(self, n: int) -> Family:
        return self.value

    def text(self) -> str:
        return f"const {self.value}"


def parse_family_rule(text: str):
    stripped = text.strip()
    if stripped == "schreier n":
        return SchreierLevels()
    if stripped.startswith("ank "):
        return AnkLevels(fam.parse_index_rule(stripped[4:].strip().replace("n", "k")))
    if stripped.startswith("const "):
        return ConstantLevels(fam.parse_family(stripped[6:].strip()))
    raise ParseError(
        f"bad family rule {text!r}; expected 'schreier n', 'ank <linear n>' "
        "or 'const <family>'"
    )


# -- space specification -------------------------------------------------------


DEFAULT_HORIZON = 64


class SpaceSpec:
    """The data (theta_n, F_n) of a mixed Tsirelson space.

    Invariants (checked up to ``horizon``): 0 < theta_n < 1, theta
    nonincreasing with a structurally null rule, every family
    scanner-grade with index bound above 1.  Instances carry the norm
    solver's memo tables; entries are write-once so sharing a spec
    across computations is safe.
    """

    def __init__(self, theta_rule, family_rule, horizon: int = DEFAULT_HORIZON):
        if horizon < 2:
            raise ConfigError("horizon must be >= 2")
        self.theta_rule = theta_rule
        self.family_rule = family_rule
        self.horizon = horizon
        self._theta_cache: dict[int, Fraction] = {}
        self._family_cache: dict[int, Family] = {}
        self._solve_cache: dict = {}
        self._level_cache: dict = {}
        self._validate()

    def _validate(self):
        if isinstance(self.theta_rule, GeometricTheta):
            if not 0 < self.theta_rule.ratio < 1:
                raise ConfigError("theta not in (0,1): geometric ratio must be in (0,1)")
        elif isinstance(self.theta_rule, HarmonicTheta):
            if self.theta_rule.shift < 1:
                raise ConfigError("theta not in (0,1): harmonic shift must be >= 1")
        elif isinstance(self.theta_rule, ListTailTheta):
            if not 0 < self.theta_rule.ratio < 1:
                raise ConfigError("theta tail ratio must be in (0,1) so theta -> 0")
        else:
            raise ConfigError(f"unsupported theta rule {self.theta_rule!r}")
        previous = None
        for n in range(1, self.horizon + 1):
            th = self.theta(n)
            if not 0 < th < 1:
                raise ConfigError(f"theta not in (0,1) at n={n}: {format_rational(th)}")
            if previous is not None and th > previous:
                raise ConfigError(f"theta increases at n={n}")
            previous = th
            family = self.family(n)
            if not fam.norm_grade(family):
                raise ConfigError(f"family at n={n} is not norm-grade: {family}")
            bound, _ = fam.index_bound(family)
            if ordinals.compare(bound, ordinals.ONE) <= 0:
                raise ConfigError(
                    f"family at n={n} has index bound <= 1 and cannot shape the norm"
                )

    def theta(self, n: int) -> Fraction:
        if n < 1:
            raise DomainError("levels are indexed from 1")
        if n not in self._theta_cache:
            self._theta_cache[n] = self.theta_rule.value(n)
        return self._theta_cache[n]

    def family(self, n: int) -> Family:
        if n < 1:
            raise DomainError("levels are indexed from 1")
        if n not in self._family_cache:
            self._family_cache[n] = self.family_rule.family(n)
        return self._family_cache[n]

    def index_bound(self, n: int):
        return fam.index_bound(self.family(n))

    def canonical_text(self) -> str:
        return (
            f"theta = {self.theta_rule.text()}\n"
            f"family = {self.family_rule.text()}\n"
            f"horizon = {self.horizon}\n"
        )

    @classmethod
    def from_text(cls, text: str) -> "SpaceSpec":
        theta_rule = None
        family_rule = None
        horizon = DEFAULT_HORIZON
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ParseError("expected 'key = value'", line=lineno, column=1)
            key, _, value = line.partition("=")
            key = key.strip()
            value = value.strip()
            try:
                if key == "theta":
                    theta_rule = parse_theta_rule(value)
                elif key == "family":
                    family_rule = parse_family_rule(value)
                elif key == "horizon":
                    horizon = int(value)
                else:
                    raise ParseError(f"unknown key {key!r}", line=lineno,
                                     column=raw.index(key) + 1)
            except ParseError as exc:
                if exc.line is None:
                    raise ParseError(str(exc), line=lineno,
                                     column=raw.index(value) + 1 if value else 1) from None
                raise
            except ValueError:
                raise ParseError(f"bad value for {key}", line=lineno, column=1) from None
        if theta_rule is None:
            raise ConfigError("space spec is missing a theta rule")
        if family_rule is None:
            raise ConfigError("space spec is missing a family rule")
        return cls(theta_rule, family_rule, horizon)

    def __repr__(self):
        return f"SpaceSpec[{self.theta_rule.text()}; {self.family_rule.text()}]"


# -- certificates --------------------------------------------------------------


@dataclass(frozen=True)
class CertNode:
    """A node of a norming tree: a set, its tag, and its split level."""

    members: FiniteSet
    tag: Fraction
    level: int | None = None
    children: tuple["CertNode", ...] = ()

    def leaves(self):
        if not self.children:
            yield self
        else:
            for child in self.children:
                yield from child.leaves()

    def to_obj(self) -> dict:
        obj = {
            "set": list(self.members),
            "tag": format_rational(self.tag),
            "children": [child.to_obj() for child in self.children],
        }
        if self.level is not None:
            obj["level"] = self.level
        return obj

    @classmethod
    def from_obj(cls, obj) -> "CertNode":
        if not isinstance(obj, dict):
            raise DomainError("certificate nodes must be JSON objects")
        try:
            members = tuple(int(v) for v in obj["set"])
            tag = parse_rational(obj["tag"])
            children = tuple(cls.from_obj(c) for c in obj.get("children", []))
            level = obj.get("level")
        except (KeyError, TypeError) as exc:
            raise DomainError(f"malformed certificate node: {exc}") from None
        if level is not None and (not isinstance(level, int) or level < 1):
            raise DomainError(f"bad certificate level {level!r}")
        return cls(members, tag, level, children)


def certificate_to_json(node: CertNode) -> str:
    return json.dumps(node.to_obj(), indent=2, sort_keys=True)


def certificate_from_json(text: str) -> CertNode:
    try:
        return CertNode.from_obj(json.loads(text))
    except json.JSONDecodeError as exc:
        raise ParseError(f"bad certificate JSON: {exc}") from None


# -- the solver ----------------------------------------------------------------


Entries = tuple[tuple[int, Fraction], ...]


def _best_split(entries: Entries, family: Family, block_value, whole_allowed: bool):
    """Best interval decomposition of a suffix of ``entries``.

    Blocks are consecutive runs covering positions q..end; the block
    minima must stay admissible for ``family``.  ``whole_allowed``
    permits a single covering block (used by the distortion norm); the
    norm recursion itself requires at least two blocks.  Returns
    (value, breakpoints) where breakpoints = (q, e1, ..., len(entries)),
    or (None, None) when no admissible decomposition exists.  Ties keep
    the lexicographically earliest breakpoint sequence.
    """
    count = len(entries)
    mins = tuple(k for k, _ in entries)
    memo: dict = {}

    def cover(pos: int, state) -> tuple[Fraction, tuple[int, ...]]:
        key = (pos, state)
        hit = memo.get(key)
        if hit is not None:
            return hit
        best = None
        for end in range(pos + 1, count + 1):
            value = block_value(entries[pos:end])
            if end == count:
                candidate = (value, (count,))
            else:
                nxt = fam.scan_advance(family, state, mins[end])
                if nxt is None:
                    continue
                tail_value, tail_breaks = cover(end, nxt)
                candidate = (value + tail_value, (end,) + tail_breaks)
            if best is None or candidate[0] > best[0]:
                best = candidate
        memo[key] = best
        return best

    best_value = None
    best_breaks = None
    for q in range(count if whole_allowed else count - 1):
        state = fam.scan_start(family, mins[q])
        if state is None:
            continue
        if whole_allowed:
            value, breaks = cover(q, state)
            if best_value is None or value > best_value:
                best_value, best_breaks = value, (q,) + breaks
            continue
        for first_end in range(q + 1, count):
            nxt = fam.scan_advance(family, state, mins[first_end])
            if nxt is None:
                continue
            tail_value, tail_breaks = cover(first_end, nxt)
            value = block_value(entries[q:first_end]) + tail_value
            if best_value is None or value > best_value:
                best_value = value
                best_breaks = (q, first_end) + tail_breaks
    return best_value, best_breaks


def _solve(entries: Entries, sp: SpaceSpec):
    """Exact norm of the restriction together with its best split choice.

    The choice is None for a plain sup-norm leaf, else
    (level, breakpoints).  Cached per space; cache entries are
    write-once and shared across vectors.
    """
    hit = sp._solve_cache.get(entries)
    if hit is not None:
        return hit
    if not entries:
        result = (Fraction(0), None)
        sp._solve_cache[entries] = result
        return result
    best = max(abs(c) for _, c in entries)
    choice = None
    if len(entries) >= 2:
        l1 = sum(abs(c) for _, c in entries)
        seen: set[Family] = set()
        n = 1
        while True:
            theta = sp.theta(n)
            if theta * l1 <= best:
                break
            family = sp.family(n)
            if family not in seen:
                seen.add(family)
                value, breaks = _best_split(
                    entries, family,
                    lambda sub: _solve(sub, sp)[0],
                    whole_allowed=False,
                )
                if value is not None and theta * value > best:
                    best = theta * value
                    choice = (n, breaks)
            n += 1
    result = (best, choice)
    sp._solve_cache[entries] = result
    return result


def _blocks_from_breaks(entries: Entries, breaks: tuple[int, ...]):
    q = breaks[0]
    edges = (q,) + breaks[1:]
    return [entries[a:b] for a, b in zip(edges, edges[1:])]


def _certificate(entries: Entries, sp: SpaceSpec, tag: Fraction) -> CertNode:
    members = tuple(k for k, _ in entries)
    _, choice = _solve(entries, sp)
    if choice is None:
        return CertNode(members, tag)
    level, breaks = choice
    child_tag = tag * sp.theta(level)
    children = tuple(
        _certificate(block, sp, child_tag)
        for block in _blocks_from_breaks(entries, breaks)
    )
    return CertNode(members, tag, level, children)


def norm(x: Vector, sp: SpaceSpec) -> tuple[Fraction, CertNode]:
    """The exact norm and an optimal norming-tree certificate."""
    value, _ = _solve(x.entries, sp)
    return value, _certificate(x.entries, sp, Fraction(1))


def norm_value(x: Vector, sp: SpaceSpec) -> Fraction:
    return _solve(x.entries, sp)[0]


def level_norm(x: Vector, sp: SpaceSpec, m: int) -> Fraction:
    """The m-th iterated norm |x|_m (m = 0 gives the sup norm)."""
    if m < 0:
        raise DomainError("the level index must be >= 0")
    return _level(x.entries, m, sp)


def _level(entries: Entries, m: int, sp: SpaceSpec) -> Fraction:
    if not entries:
        return Fraction(0)
    key = (entries, m)
    hit = sp._level_cache.get(key)
    if hit is not None:
        return hit
    if m == 0:
        result = max(abs(c) for _, c in entries)
    else:
        result = _level(entries, m - 1, sp)
        if len(entries) >= 2:
            l1 = sum(abs(c) for _, c in entries)
            seen: set[Family] = set()
            n = 1
            while True:
                theta = sp.theta(n)
                if theta * l1 <= result:
                    break
                family = sp.family(n)
                if family not in seen:
                    seen.add(family)
                    value, _ = _best_split(
                        entries, family,
                        lambda sub: _level(sub, m - 1, sp),
                        whole_allowed=False,
                    )
                    if value is not None and theta * value > result:
                        result = theta * value
                n += 1
    sp._level_cache[key] = result
    return result


def distortion_norm(x: Vector, sp: SpaceSpec, n: int) -> Fraction:
    """sup of sum_i |E_i x| over F_n-admissible sequences (no theta factor)."""
    if n < 1:
        raise DomainError("levels are indexed from 1")
    if x.is_zero():
        return Fraction(0)
    value, _ = _best_split(
        x.entries, sp.family(n),
        lambda sub: _solve(sub, sp)[0],
        whole_allowed=True,
    )
    return value


def brute_force_norm(x: Vector, sp: SpaceSpec) -> Fraction:
    """Independent oracle: direct recursion on the implicit equation.

    Enumerates every admissible sequence of arbitrary finite sets inside
    the support (as compositions of arbitrary subsets), with no interval
    hulls and no memo table.  Length-one sequences are skipped: their
    value theta_n*|Ex| is strictly below the norm, and skipping them is
    what makes the direct recursion well-founded.  Guarded to supports
    of at most 8 points.
    """
    if len(x.entries) > BRUTE_FORCE_SUPPORT_LIMIT:
        raise DomainError(
            f"brute_force_norm is limited to supports of size "
            f"{BRUTE_FORCE_SUPPORT_LIMIT}"
        )
    return _brute(x.entries, sp)


def _brute(entries: Entries, sp: SpaceSpec) -> Fraction:
    if not entries:
        return Fraction(0)
    best = max(abs(c) for _, c in entries)
    count = len(entries)
    if count < 2:
        return best
    abs_l1 = [abs(c) for _, c in entries]
    l1 = sum(abs_l1)
    subsets = []
    for mask in range(1, 1 << count):
        positions = tuple(i for i in range(count) if mask >> i & 1)
        if len(positions) >= 2:
            subsets.append((sum(abs_l1[i] for i in positions), positions))
    subsets.sort(reverse=True)

    n = 1
    while True:
        theta = sp.theta(n)
        if theta * l1 <= best:
            break
        family = sp.family(n)
        for weight, positions in subsets:
            if theta * weight <= best:
                break

            def split(start: int, minima: FiniteSet, acc: Fraction,
                      remaining: Fraction, chunks: int) -> Fraction:
                found = Fraction(0)
                for end in range(start + 1, len(positions) + 1):
                    chunk = tuple(entries[i] for i in positions[start:end])
                    chunk_l1 = sum(abs(c) for _, c in chunk)
                    if end < len(positions):
                        grown = minima + (entries[positions[end]][0],)
                        if not fam.member(family, grown):
                            continue
                        rest = remaining - chunk_l1
                        if theta * (acc + chunk_l1 + rest) <= best:
                            continue
                        value = _brute(chunk, sp)
                        if theta * (acc + value + rest) <= best:
                            continue
                        tail = split(end, grown, acc + value, rest, chunks + 1)
                        if tail > found:
                            found = tail
                    else:
                        if chunks + 1 < 2:
                            continue
                        if theta * (acc + chunk_l1) <= best:
                            continue
                        value = acc + _brute(chunk, sp)
                        if value > found:
                            found = value
                return found

            first_min = (entries[positions[0]][0],)
            if not fam.member(family, first_min):
                continue
            total = split(0, first_min, Fraction(0), Fraction(weight), 0)
            if theta * total > best:
                best = theta * total
        n += 1
    return best


def verify_certificate(cert: CertNode, x: Vector, sp: SpaceSpec):
    """Check a norming tree and evaluate it against the vector.

    Returns (valid, value).  The value is the tag-weighted sum of leaf
    sup norms using the tags as recorded, whether or not the tree is
    valid.
    """
    coeffs = dict(x.entries)

    def leaf_value(node: CertNode) -> Fraction:
        return max(
            (abs(coeffs[k]) for k in node.members if k in coeffs),
            default=Fraction(0),
        )

    value = sum(
        (node.tag * leaf_value(node) for node in cert.leaves()), Fraction(0)
    )

    def well_formed(node: CertNode) -> bool:
        members = node.members
        if any(not isinstance(k, int) or k < 1 for k in members):
            return False
        if any(a >= b for a, b in zip(members, members[1:])):
            return False
        if not node.children:
            return node.level is None
        if node.level is None:
            return False
        parent = set(members)
        previous_max = 0
        for child in node.children:
            if not child.members:
                return False
            if child.members[0] <= previous_max:
                return False
            previous_max = child.members[-1]
            if not set(child.members) <= parent:
                return False
            if child.tag != node.tag * sp.theta(node.level):
                return False
        if not fam.is_admissible(
            sp.family(node.level), [c.members for c in node.children]
        ):
            return False
        return all(well_formed(child) for child in node.children)

    valid = cert.tag == 1 and well_formed(cert)
    return valid, value
