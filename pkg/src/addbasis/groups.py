"""Countable abelian groups and semigroups with canonical element forms.

Groups are structured direct sums described by a list of summands, each a
base (the integer line Z, or a cyclic group of order d >= 2) together with a
multiplicity (a positive integer, or ``None`` for countably infinite).
Concrete elements always have finite support.

Canonical in-memory element forms depend on the spec shape:

* exactly one factor            -> a plain ``int`` (cyclic values reduced mod d)
* finitely many factors         -> a dense ``tuple`` of ints, one per factor
* infinitely many factors       -> a sorted ``tuple`` of ``(index, value)``
                                   pairs with nonzero values

Equality of canonical forms coincides with equality in the group, and the
natural ordering of the form (numeric for ints, lexicographic for tuples) is
the stable total order used for all deterministic tie-breaking.

Factor layout: summands with all-finite multiplicities are laid out by
concatenation.  If any multiplicity is infinite, copies are interleaved by
level: copy t of every summand (for t = 0, 1, 2, ...) is assigned flat
indices in summand order before copy t+1 of anything.

Enumeration is a fixed bijection N0 -> carrier: zig-zag order on each Z
factor (0, 1, -1, 2, -2, ...), little-endian mixed radix across cyclic
factors, and a diagonal pairing to combine an infinite free part with the
rest.  The order is pinned by tests; all runs are bit-reproducible.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from math import isqrt

from .errors import (
    EnumerationRangeError,
    NoDecompositionError,
    ParseError,
    SpecMismatchError,
    UnsupportedOperationError,
)

INFINITE = None  # multiplicity sentinel for countably infinite


def zigzag(n: int) -> int:
    """Bijection N0 -> Z: 0, 1, -1, 2, -2, ..."""
    if n % 2:
        return (n + 1) // 2
    return -(n // 2)


def pair(a: int, b: int) -> int:
    """Cantor pairing N0 x N0 -> N0 (inverse of :func:`unpair`)."""
    s = a + b
    return s * (s + 1) // 2 + b


def unpair(n: int) -> tuple[int, int]:
    w = (isqrt(8 * n + 1) - 1) // 2
    b = n - w * (w + 1) // 2
    return w - b, b


@dataclass(frozen=True)
class Summand:
    """One block of a structured direct sum: ``order`` 0 means Z, else a
    cyclic group of that order; ``multiplicity`` None means countably many."""

    order: int
    multiplicity: int | None = 1

    def __post_init__(self):
        if self.order != 0 and self.order < 2:
            raise ValueError(f"cyclic order must be >= 2, got {self.order}")
        if self.multiplicity is not None and self.multiplicity < 1:
            raise ValueError("multiplicity must be positive or None (infinite)")


_Z_SUMMANDS = (Summand(0, 1),)


class GroupSpec:
    """A structured direct sum of copies of Z and finite cyclic groups."""

    def __init__(self, summands):
        summands = tuple(
            s if isinstance(s, Summand) else Summand(*s) for s in summands
        )
        if not summands:
            raise ValueError("a group spec needs at least one summand")
        self.summands = summands
        self._finite_layout = all(s.multiplicity is not None for s in summands)
        if self._finite_layout:
            self._orders = tuple(
                itertools.chain.from_iterable(
                    [s.order] * s.multiplicity for s in summands
                )
            )
            self.factor_count = len(self._orders)
        else:
            self._orders = None
            self.factor_count = None
        # flat indices of torsion (cyclic) and free (Z) factors, lazily usable
        self._torsion_finite = self._free_finite = None
        if self.factor_count is not None:
            self._torsion_finite = tuple(
                (i, d) for i, d in enumerate(self._orders) if d
            )
            self._free_finite = tuple(
                i for i, d in enumerate(self._orders) if d == 0
            )
        # invariants used on every enumeration call
        self._carrier_size = self._compute_carrier_size()
        self._t_size = self._torsion_size()
        self._has_free_flag = any(s.order == 0 for s in self.summands)
        self._free_total = self._free_count()

    # -- structure ----------------------------------------------------------

    def __eq__(self, other):
        return isinstance(other, GroupSpec) and self.summands == other.summands

    def __hash__(self):
        return hash(self.summands)

    def __repr__(self):
        parts = []
        for s in self.summands:
            base = "Z" if s.order == 0 else f"Z{s.order}"
            m = "inf" if s.multiplicity is None else s.multiplicity
            parts.append(f"{base}^{m}" if m != 1 else base)
        return f"GroupSpec({' + '.join(parts)})"

    def factor_orders(self):
        """Iterate factor orders in flat-index order (possibly infinite)."""
        if self._finite_layout:
            yield from self._orders
            return
        # level interleave: copy t of each summand, in summand order
        for t in itertools.count():
            for s in self.summands:
                if s.multiplicity is None or t < s.multiplicity:
                    yield s.order

    def factor_order(self, index: int) -> int:
        if index < 0:
            raise SpecMismatchError(f"factor index {index} is negative")
        if self._finite_layout:
            if index >= self.factor_count:
                raise SpecMismatchError(
                    f"factor index {index} out of range for {self!r}"
                )
            return self._orders[index]
        return next(itertools.islice(self.factor_orders(), index, None))

    def carrier_size(self) -> int | None:
        """Number of elements, or None when countably infinite."""
        return self._carrier_size

    def _compute_carrier_size(self) -> int | None:
        if not self._finite_layout:
            return None
        size = 1
        for d in self._orders:
            if d == 0:
                return None
            size *= d
        return size

    @property
    def is_torsion_free(self) -> bool:
        return all(s.order == 0 for s in self.summands)

    @property
    def is_integer_line(self) -> bool:
        """True when the spec is a single copy of Z (elements are ints)."""
        return self.summands == _Z_SUMMANDS

    def exponent(self) -> int | None:
        """Least n >= 1 with n*g = 0 for all g, or None if no such n."""
        n = 1
        for s in self.summands:
            if s.order == 0:
                return None
            n = n * s.order // _gcd(n, s.order)
        return n

    def truncate(self, width: int) -> "GroupSpec":
        """Replace infinite multiplicities by ``width`` (for finite probes)."""
        return GroupSpec(
            Summand(s.order, width if s.multiplicity is None else s.multiplicity)
            for s in self.summands
        )

    # -- canonical element forms ---------------------------------------------

    @property
    def form(self) -> str:
        if self.factor_count == 1:
            return "scalar"
        if self.factor_count is not None:
            return "dense"
        return "sparse"

    @property
    def zero(self):
        if self.factor_count == 1:
            return 0
        if self.factor_count is not None:
            return (0,) * self.factor_count
        return ()

    def element_from_coords(self, coords):
        """Build the canonical element from (flat index, value) pairs."""
        items = {}
        for i, v in coords:
            d = self.factor_order(i)
            v = v % d if d else v
            if v:
                items[i] = v
            elif i in items:
                del items[i]
        if self.factor_count == 1:
            return items.get(0, 0)
        if self.factor_count is not None:
            return tuple(items.get(i, 0) for i in range(self.factor_count))
        return tuple(sorted(items.items()))

    def element_coords(self, a):
        """Nonzero (flat index, value) pairs of a canonical element."""
        if self.factor_count == 1:
            return ((0, a),) if a else ()
        if self.factor_count is not None:
            return tuple((i, v) for i, v in enumerate(a) if v)
        return a

    def validate_element(self, a) -> None:
        if self.factor_count == 1:
            d = self._orders[0]
            if not isinstance(a, int) or isinstance(a, bool):
                raise SpecMismatchError(f"{a!r} is not an element of {self!r}")
            if d and not 0 <= a < d:
                raise SpecMismatchError(f"{a!r} not reduced modulo {d}")
            return
        if self.factor_count is not None:
            if not (isinstance(a, tuple) and len(a) == self.factor_count):
                raise SpecMismatchError(f"{a!r} is not an element of {self!r}")
            for v, d in zip(a, self._orders):
                if not isinstance(v, int) or isinstance(v, bool):
                    raise SpecMismatchError(f"bad coordinate {v!r} in {a!r}")
                if d and not 0 <= v < d:
                    raise SpecMismatchError(f"{a!r} not reduced modulo {d}")
            return
        if not isinstance(a, tuple):
            raise SpecMismatchError(f"{a!r} is not an element of {self!r}")
        last = -1
        for item in a:
            if not (isinstance(item, tuple) and len(item) == 2):
                raise SpecMismatchError(f"bad coordinate pair {item!r}")
            i, v = item
            if not isinstance(i, int) or not isinstance(v, int) or isinstance(v, bool):
                raise SpecMismatchError(f"bad coordinate pair {item!r}")
            if i <= last:
                raise SpecMismatchError(f"indices not strictly increasing in {a!r}")
            last = i
            d = self.factor_order(i)
            if v == 0 or (d and not 0 < v < d):
                raise SpecMismatchError(f"coordinate {item!r} not canonical")

    # -- arithmetic ----------------------------------------------------------

    def add(self, a, b):
        if self.factor_count == 1:
            d = self._orders[0]
            return (a + b) % d if d else a + b
        if self.factor_count is not None:
            return tuple(
                (x + y) % d if d else x + y
                for x, y, d in zip(a, b, self._orders)
            )
        return self._sparse_merge(a, b)

    def _sparse_merge(self, a, b):
        items = dict(a)
        for i, v in b:
            d = self.factor_order(i)
            w = items.get(i, 0) + v
            if d:
                w %= d
            if w:
                items[i] = w
            elif i in items:
                del items[i]
        return tuple(sorted(items.items()))

    def negate(self, a):
        if self.factor_count == 1:
            d = self._orders[0]
            return (-a) % d if d else -a
        if self.factor_count is not None:
            return tuple(
                (-x) % d if d else -x for x, d in zip(a, self._orders)
            )
        out = []
        for i, v in a:
            d = self.factor_order(i)
            out.append((i, (-v) % d if d else -v))
        return tuple(out)

    def sub(self, a, b):
        return self.add(a, self.negate(b))

    def scale(self, h: int, a):
        """h-fold sum of a (h >= 0); equals repeated addition."""
        if self.factor_count == 1:
            d = self._orders[0]
            return (h * a) % d if d else h * a
        if self.factor_count is not None:
            return tuple(
                (h * x) % d if d else h * x for x, d in zip(a, self._orders)
            )
        out = []
        for i, v in a:
            d = self.factor_order(i)
            w = (h * v) % d if d else h * v
            if w:
                out.append((i, w))
        return tuple(out)

    def sort_key(self, a):
        return a

    # -- enumeration ---------------------------------------------------------

    def enumerate_element(self, n: int):
        """The fixed bijection N0 -> carrier (see the module docstring)."""
        if n < 0:
            raise EnumerationRangeError("enumeration index must be >= 0")
        if self.summands == _Z_SUMMANDS:
            return zigzag(n)
        size = self._carrier_size
        if size is not None and n >= size:
            raise EnumerationRangeError(
                f"index {n} out of range for carrier of size {size}"
            )
        t_size = self._t_size
        if not self._has_free_flag:
            coords = self._decode_torsion(n)
        elif t_size == 1:
            coords = self._decode_free(n)
        elif t_size is not None:
            coords = self._decode_torsion(n % t_size)
            coords += self._decode_free(n // t_size)
        else:
            a, b = unpair(n)
            coords = self._decode_torsion(a) + self._decode_free(b)
        return self.element_from_coords(coords)

    def _torsion_size(self) -> int | None:
        if not self._finite_layout:
            if any(s.order and s.multiplicity is None for s in self.summands):
                return None
        size = 1
        for s in self.summands:
            if s.order:
                if s.multiplicity is None:
                    return None
                size *= s.order ** s.multiplicity
        return size

    def _has_free(self) -> bool:
        return any(s.order == 0 for s in self.summands)

    def _torsion_factors(self):
        if self._torsion_finite is not None:
            return iter(self._torsion_finite)
        return (
            (i, d) for i, d in enumerate(self.factor_orders()) if d
        )

    def _free_factors(self):
        if self._free_finite is not None:
            return iter(self._free_finite)
        return (i for i, d in enumerate(self.factor_orders()) if d == 0)

    def _decode_torsion(self, m: int):
        """Little-endian mixed radix over cyclic factors in flat order."""
        coords = []
        for i, d in self._torsion_factors():
            if m == 0:
                break
            m, v = divmod(m, d)
            if v:
                coords.append((i, v))
        if m:
            raise EnumerationRangeError("index exceeds torsion carrier")
        return coords

    def _free_count(self) -> int | None:
        if self._free_finite is not None:
            return len(self._free_finite)
        n = 0
        for s in self.summands:
            if s.order == 0:
                if s.multiplicity is None:
                    return None
                n += s.multiplicity
        return n

    def _decode_free(self, m: int):
        """Chained diagonal pairing over Z factors, zig-zag digits."""
        count = self._free_total
        coords = []
        for k, i in enumerate(self._free_factors()):
            if count is not None and k == count - 1:
                v = zigzag(m)
                m = 0
            else:
                if m == 0:
                    break
                a, m = unpair(m)
                v = zigzag(a)
            if v:
                coords.append((i, v))
        return coords

    # -- serialization -------------------------------------------------------

    def to_json(self) -> dict:
        out = []
        for s in self.summands:
            base = "Z" if s.order == 0 else {"cyclic": s.order}
            mult = "inf" if s.multiplicity is None else s.multiplicity
            out.append({"base": base, "multiplicity": mult})
        return {"summands": out}

    @classmethod
    def from_json(cls, doc) -> "GroupSpec":
        try:
            summands = []
            for item in doc["summands"]:
                base = item["base"]
                order = 0 if base == "Z" else int(base["cyclic"])
                mult = item.get("multiplicity", 1)
                mult = None if mult == "inf" else int(mult)
                summands.append(Summand(order, mult))
            return cls(summands)
        except (KeyError, TypeError, ValueError) as exc:
            raise ParseError(f"bad group spec document: {exc}") from exc

    def element_to_json(self, a):
        return [[i, v] for i, v in self.element_coords(a)]

    def element_from_json(self, doc):
        if isinstance(doc, int) and not isinstance(doc, bool):
            # shorthand for rank-1 specs
            if self.factor_count != 1:
                raise ParseError(f"integer shorthand invalid for {self!r}")
            a = self.element_from_coords([(0, doc)])
            return a
        try:
            coords = [(int(i), int(v)) for i, v in doc]
        except (TypeError, ValueError) as exc:
            raise ParseError(f"bad element document {doc!r}") from exc
        idxs = [i for i, _ in coords]
        if any(j <= i for i, j in zip(idxs, idxs[1:])):
            raise ParseError(f"element coordinates not strictly sorted: {doc!r}")
        try:
            return self.element_from_coords(coords)
        except SpecMismatchError as exc:
            raise ParseError(str(exc)) from exc


def _gcd(a, b):
    while b:
        a, b = b, a % b
    return a


# ---------------------------------------------------------------------------
# Semigroups
# ---------------------------------------------------------------------------


class SemigroupSpec:
    """Base for the supported semigroup kinds.

    Every kind carries a total addition law on canonical elements, a fixed
    enumeration, and (when it exists) a decomposition oracle ``split``
    returning a fixed pair (s', s'') with s' + s'' = s.
    """

    kind = None
    has_split = False

    def add(self, a, b):
        raise NotImplementedError

    def split(self, s):
        raise NoDecompositionError(
            f"semigroup {self.kind!r} has no decomposition oracle"
        )

    def enumerate_element(self, n: int):
        raise NotImplementedError

    def carrier_size(self) -> int | None:
        return None

    def validate_element(self, a) -> None:
        raise NotImplementedError

    def sort_key(self, a):
        return a

    def element_to_json(self, a):
        return a

    def element_from_json(self, doc):
        if not isinstance(doc, int) or isinstance(doc, bool):
            raise ParseError(f"bad element document {doc!r}")
        self.validate_element(doc)
        return doc

    def to_json(self):
        return {"kind": self.kind}

    @staticmethod
    def from_json(doc) -> "SemigroupSpec":
        if isinstance(doc, dict) and "kind" in doc:
            kind = doc["kind"]
        else:
            kind = doc
        if isinstance(kind, str):
            try:
                return _SCALAR_KINDS[kind]()
            except KeyError:
                raise ParseError(f"unknown semigroup kind {kind!r}") from None
        if isinstance(kind, dict) and "group" in kind:
            return GroupSemigroup(GroupSpec.from_json(kind["group"]))
        if isinstance(kind, dict) and "product" in kind:
            return ProductSemigroup(
                [SemigroupSpec.from_json(c) for c in kind["product"]]
            )
        raise ParseError(f"bad semigroup document {doc!r}")

    def __eq__(self, other):
        return type(self) is type(other)

    def __hash__(self):
        return hash(type(self))

    def __repr__(self):
        return f"{type(self).__name__}()"


class TrivialSemigroup(SemigroupSpec):
    """S = {0}."""

    kind = "trivial"
    has_split = True

    def add(self, a, b):
        return 0

    def split(self, s):
        return (0, 0)

    def enumerate_element(self, n):
        if n != 0:
            raise EnumerationRangeError("trivial semigroup has one element")
        return 0

    def carrier_size(self):
        return 1

    def validate_element(self, a):
        if a != 0 or not isinstance(a, int) or isinstance(a, bool):
            raise SpecMismatchError(f"{a!r} is not the trivial element")


class NaturalsWithZeroAdd(SemigroupSpec):
    """(N0, +); split uses the identity: s = s + 0."""

    kind = "n0-add"
    has_split = True

    def add(self, a, b):
        return a + b

    def split(self, s):
        return (s, 0)

    def enumerate_element(self, n):
        if n < 0:
            raise EnumerationRangeError("index must be >= 0")
        return n

    def validate_element(self, a):
        if not isinstance(a, int) or isinstance(a, bool) or a < 0:
            raise SpecMismatchError(f"{a!r} is not a nonnegative integer")


class NaturalsAdd(SemigroupSpec):
    """(N, +): no identity and 1 is indecomposable, so no split oracle."""

    kind = "n-add"
    has_split = False
    indecomposable_witness = 1

    def add(self, a, b):
        return a + b

    def split(self, s):
        raise NoDecompositionError(
            "(N, +) has no decomposition oracle: 1 = s' + s'' has no "
            "solution in positive integers",
            witness=1,
        )

    def enumerate_element(self, n):
        if n < 0:
            raise EnumerationRangeError("index must be >= 0")
        return n + 1

    def validate_element(self, a):
        if not isinstance(a, int) or isinstance(a, bool) or a < 1:
            raise SpecMismatchError(f"{a!r} is not a positive integer")


class NonnegativeMax(SemigroupSpec):
    """(N0, max): idempotent, so split is s = s + s."""

    kind = "n0-max"
    has_split = True

    def add(self, a, b):
        return a if a >= b else b

    def split(self, s):
        return (s, s)

    def enumerate_element(self, n):
        if n < 0:
            raise EnumerationRangeError("index must be >= 0")
        return n

    def validate_element(self, a):
        if not isinstance(a, int) or isinstance(a, bool) or a < 0:
            raise SpecMismatchError(f"{a!r} is not a nonnegative integer")


class GroupSemigroup(SemigroupSpec):
    """A group used as a semigroup; split uses the identity."""

    kind = "group"
    has_split = True

    def __init__(self, group: GroupSpec):
        self.group = group

    def add(self, a, b):
        return self.group.add(a, b)

    def split(self, s):
        return (s, self.group.zero)

    def enumerate_element(self, n):
        return self.group.enumerate_element(n)

    def carrier_size(self):
        return self.group.carrier_size()

    def validate_element(self, a):
        self.group.validate_element(a)

    def element_to_json(self, a):
        return self.group.element_to_json(a)

    def element_from_json(self, doc):
        return self.group.element_from_json(doc)

    def to_json(self):
        return {"kind": {"group": self.group.to_json()}}

    def __eq__(self, other):
        return isinstance(other, GroupSemigroup) and self.group == other.group

    def __hash__(self):
        return hash(("group", self.group))

    def __repr__(self):
        return f"GroupSemigroup({self.group!r})"


class ProductSemigroup(SemigroupSpec):
    """A finite product of semigroups; everything is componentwise."""

    kind = "product"

    def __init__(self, components):
        self.components = tuple(components)
        if not self.components:
            raise ValueError("product needs at least one component")

    @property
    def has_split(self):
        return all(c.has_split for c in self.components)

    def add(self, a, b):
        return tuple(c.add(x, y) for c, x, y in zip(self.components, a, b))

    def split(self, s):
        for i, (c, x) in enumerate(zip(self.components, s)):
            if not c.has_split:
                witness = tuple(
                    comp.indecomposable_witness
                    if not comp.has_split
                    else comp.enumerate_element(0)
                    for comp in self.components
                )
                raise NoDecompositionError(
                    f"component {i} ({c.kind}) has no decomposition oracle",
                    witness=witness,
                )
        parts = [c.split(x) for c, x in zip(self.components, s)]
        return (tuple(p[0] for p in parts), tuple(p[1] for p in parts))

    def enumerate_element(self, n):
        sizes = [c.carrier_size() for c in self.components]
        idxs = composite_decode(n, sizes)
        return tuple(
            c.enumerate_element(i) for c, i in zip(self.components, idxs)
        )

    def carrier_size(self):
        size = 1
        for c in self.components:
            s = c.carrier_size()
            if s is None:
                return None
            size *= s
        return size

    def validate_element(self, a):
        if not (isinstance(a, tuple) and len(a) == len(self.components)):
            raise SpecMismatchError(f"{a!r} is not an element of {self!r}")
        for c, x in zip(self.components, a):
            c.validate_element(x)

    def sort_key(self, a):
        return tuple(c.sort_key(x) for c, x in zip(self.components, a))

    def element_to_json(self, a):
        return [c.element_to_json(x) for c, x in zip(self.components, a)]

    def element_from_json(self, doc):
        if not (isinstance(doc, list) and len(doc) == len(self.components)):
            raise ParseError(f"bad product element {doc!r}")
        return tuple(
            c.element_from_json(x) for c, x in zip(self.components, doc)
        )

    def to_json(self):
        return {"kind": {"product": [c.to_json() for c in self.components]}}

    def __eq__(self, other):
        return (
            isinstance(other, ProductSemigroup)
            and self.components == other.components
        )

    def __hash__(self):
        return hash(("product", self.components))

    def __repr__(self):
        return f"ProductSemigroup({list(self.components)!r})"


_SCALAR_KINDS = {
    cls.kind: cls
    for cls in (TrivialSemigroup, NaturalsWithZeroAdd, NaturalsAdd, NonnegativeMax)
}


def composite_decode(n: int, sizes) -> list[int]:
    """Decode n into per-part indices for a product of carriers.

    ``sizes`` holds each part's carrier size (None = countably infinite).
    The rule is fixed so enumeration is reproducible: walking parts left to
    right, a part followed by a finite tail takes ``n // tail_size``; a part
    followed by an infinite tail takes ``n % size`` when it is finite itself,
    or one half of a Cantor unpairing when both are infinite.
    """
    sizes = list(sizes)
    total = 1
    for s in sizes:
        total = None if (s is None or total is None) else total * s
    if total is not None and n >= total:
        raise EnumerationRangeError(f"index {n} out of range ({total} elements)")
    out = []
    for k, size in enumerate(sizes):
        tail = 1
        for s in sizes[k + 1:]:
            tail = None if (s is None or tail is None) else tail * s
        if tail == 1:
            out.append(n)
            n = 0
        elif tail is not None:
            out.append(n // tail)
            n %= tail
        elif size is not None:
            out.append(n % size)
            n //= size
        else:
            a, n = unpair(n)
            out.append(a)
    return out


# ---------------------------------------------------------------------------
# The ambient product X = S (+) G
# ---------------------------------------------------------------------------


class AmbientSpec:
    """X = S (+) G with componentwise addition; elements are (s, g) pairs."""

    def __init__(self, semigroup: SemigroupSpec, group: GroupSpec):
        self.semigroup = semigroup
        self.group = group

    def __eq__(self, other):
        return (
            isinstance(other, AmbientSpec)
            and self.semigroup == other.semigroup
            and self.group == other.group
        )

    def __hash__(self):
        return hash((self.semigroup, self.group))

    def __repr__(self):
        return f"AmbientSpec({self.semigroup!r}, {self.group!r})"

    def add(self, x, y):
        return (
            self.semigroup.add(x[0], y[0]),
            self.group.add(x[1], y[1]),
        )

    @staticmethod
    def project(x):
        """Projection onto the group component."""
        return x[1]

    def carrier_size(self):
        s = self.semigroup.carrier_size()
        g = self.group.carrier_size()
        if s is None or g is None:
            return None
        return s * g

    def enumerate_element(self, n):
        si, gi = composite_decode(
            n, [self.semigroup.carrier_size(), self.group.carrier_size()]
        )
        return (
            self.semigroup.enumerate_element(si),
            self.group.enumerate_element(gi),
        )

    def validate_element(self, x):
        if not (isinstance(x, tuple) and len(x) == 2):
            raise SpecMismatchError(f"{x!r} is not an (s, g) pair")
        self.semigroup.validate_element(x[0])
        self.group.validate_element(x[1])

    def sort_key(self, x):
        return (self.semigroup.sort_key(x[0]), self.group.sort_key(x[1]))

    def element_to_json(self, x):
        return [
            self.semigroup.element_to_json(x[0]),
            self.group.element_to_json(x[1]),
        ]

    def element_from_json(self, doc):
        if not (isinstance(doc, list) and len(doc) == 2):
            raise ParseError(f"bad product element document {doc!r}")
        return (
            self.semigroup.element_from_json(doc[0]),
            self.group.element_from_json(doc[1]),
        )

    def to_json(self):
        return {
            "semigroup": self.semigroup.to_json(),
            "group": self.group.to_json(),
        }

    @classmethod
    def from_json(cls, doc) -> "AmbientSpec":
        try:
            return cls(
                SemigroupSpec.from_json(doc["semigroup"]),
                GroupSpec.from_json(doc["group"]),
            )
        except (KeyError, TypeError) as exc:
            raise ParseError(f"bad ambient spec document: {exc}") from exc


# ---------------------------------------------------------------------------
# Module-level operation surface (validating wrappers)
# ---------------------------------------------------------------------------


def add(spec, a, b):
    """Canonical a + b in any spec; validates operands first."""
    spec.validate_element(a)
    spec.validate_element(b)
    return spec.add(a, b)


def negate(spec, a):
    """Group negation; raises UnsupportedOperationError off groups."""
    fn = negation_of(spec)
    if fn is None:
        raise UnsupportedOperationError(
            f"{spec!r} is not a group: negation is undefined"
        )
    spec.validate_element(a)
    return fn(a)


def negation_of(spec):
    """The negation map when the spec's carrier is a group, else None."""
    if isinstance(spec, GroupSpec):
        return spec.negate
    if isinstance(spec, GroupSemigroup):
        return spec.group.negate
    if isinstance(spec, TrivialSemigroup):
        return lambda a: a
    if isinstance(spec, ProductSemigroup):
        parts = [negation_of(c) for c in spec.components]
        if any(p is None for p in parts):
            return None
        return lambda a: tuple(p(x) for p, x in zip(parts, a))
    if isinstance(spec, AmbientSpec):
        s_neg = negation_of(spec.semigroup)
        if s_neg is None:
            return None
        g_neg = spec.group.negate
        return lambda x: (s_neg(x[0]), g_neg(x[1]))
    return None


def enumerate_element(spec, n: int):
    """The spec's fixed bijective enumeration N0 -> carrier."""
    return spec.enumerate_element(n)


def split(spec, s):
    """A fixed decomposition s = s' + s'' (see each kind's oracle)."""
    if isinstance(spec, GroupSpec):
        spec.validate_element(s)
        return (s, spec.zero)
    spec.validate_element(s)
    return spec.split(s)
