"""Finite-set sumset algebra and exact representation counts.

This is the brute-force oracle layer: every count comes from explicit pair
enumeration over a :class:`FiniteSet`, O(|B|^2), no acceleration.  The
construction machinery is always cross-checked against these functions.

For a set B in an abelian (semi)group:

* ``sumset(A, B)``             {a + b}
* ``restricted_sumset(A, B)``  {a + b : a != b}
* ``dilation(h, B)``           {h*b}
* ``difference_set(A, B)``     {a - b} (groups only)
* ``rep_fn(B, x)``             #{unordered {b, b'} with b + b' = x}
* ``restricted_rep_fn(B, x)``  same, but b != b'

The decomposition 2B = (2^B) u (2*B) and the count identity
r(x) = r^(x) + #{b : 2b = x} hold exactly and are property-tested.
"""

from __future__ import annotations

import csv
import json

from .errors import SpecMismatchError, UnsupportedOperationError
from .groups import AmbientSpec, GroupSemigroup, GroupSpec, negation_of


class FiniteSet:
    """A deduplicated, canonically ordered finite set over a fixed spec."""

    __slots__ = ("spec", "elements", "_index")

    def __init__(self, spec, elements, *, validate=True):
        if validate:
            for e in elements:
                spec.validate_element(e)
        self.spec = spec
        self.elements = tuple(sorted(set(elements), key=spec.sort_key))
        self._index = frozenset(self.elements)

    def __len__(self):
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __contains__(self, e):
        return e in self._index

    def __eq__(self, other):
        return (
            isinstance(other, FiniteSet)
            and self.spec == other.spec
            and self.elements == other.elements
        )

    def __hash__(self):
        return hash((self.spec, self.elements))

    def __repr__(self):
        shown = ", ".join(map(repr, self.elements[:8]))
        if len(self.elements) > 8:
            shown += ", ..."
        return f"FiniteSet({shown})"

    def union(self, other):
        _check_specs(self, other)
        return FiniteSet(
            self.spec, self.elements + other.elements, validate=False
        )

    def to_json(self):
        return [self.spec.element_to_json(e) for e in self.elements]

    @classmethod
    def from_json(cls, spec, doc):
        return cls(spec, [spec.element_from_json(e) for e in doc], validate=False)


def _check_specs(a: FiniteSet, b: FiniteSet):
    if a.spec != b.spec:
        raise SpecMismatchError(
            f"operands over different specs: {a.spec!r} vs {b.spec!r}"
        )


def sumset(a: FiniteSet, b: FiniteSet) -> FiniteSet:
    """A + B by exhaustive pair enumeration."""
    _check_specs(a, b)
    add = a.spec.add
    return FiniteSet(
        a.spec, {add(x, y) for x in a for y in b}, validate=False
    )


def restricted_sumset(a: FiniteSet, b: FiniteSet) -> FiniteSet:
    """A +^ B: sums a + b over pairs with a != b only."""
    _check_specs(a, b)
    add = a.spec.add
    return FiniteSet(
        a.spec,
        {add(x, y) for x in a for y in b if x != y},
        validate=False,
    )


def dilation(h: int, b: FiniteSet) -> FiniteSet:
    """h * B = {h-fold sums b + ... + b}."""
    if h < 1:
        raise ValueError("dilation factor must be a positive integer")
    return FiniteSet(
        b.spec, {_scale(b.spec, h, x) for x in b}, validate=False
    )


def _scale(spec, h, x):
    if isinstance(spec, GroupSpec):
        return spec.scale(h, x)
    if isinstance(spec, GroupSemigroup):
        return spec.group.scale(h, x)
    if isinstance(spec, AmbientSpec):
        return (_scale(spec.semigroup, h, x[0]), _scale(spec.group, h, x[1]))
    # generic semigroup: h-fold addition
    acc = x
    for _ in range(h - 1):
        acc = spec.add(acc, x)
    return acc


def difference_set(a: FiniteSet, b: FiniteSet) -> FiniteSet:
    """A - B; defined only over groups."""
    _check_specs(a, b)
    spec = a.spec
    neg = negation_of(spec)
    if neg is None:
        raise UnsupportedOperationError(
            f"difference set needs a group, got {spec!r}"
        )
    add = spec.add
    return FiniteSet(
        spec,
        {add(x, neg(y)) for x in a for y in b},
        validate=False,
    )


def rep_fn(b: FiniteSet, x) -> int:
    """Number of unordered multisets {b, b'} (b = b' allowed) with b + b' = x."""
    b.spec.validate_element(x)
    add = b.spec.add
    els = b.elements
    n = 0
    for i, p in enumerate(els):
        for q in els[i:]:
            if add(p, q) == x:
                n += 1
    return n


def restricted_rep_fn(b: FiniteSet, x) -> int:
    """Number of unordered pairs {b, b'} with b != b' and b + b' = x."""
    b.spec.validate_element(x)
    add = b.spec.add
    els = b.elements
    n = 0
    for i, p in enumerate(els):
        for q in els[i + 1:]:
            if add(p, q) == x:
                n += 1
    return n


class RepTable:
    """Representation counts, total over a window (or over all sums).

    ``entries`` maps element -> count.  When ``window`` is given the table is
    total on it (zero counts included); otherwise it covers exactly the sums
    of B with nonzero count.
    """

    def __init__(self, spec, entries, window=None, restricted=False):
        self.spec = spec
        self.entries = dict(entries)
        self.window = window
        self.restricted = restricted

    def __getitem__(self, x):
        return self.entries.get(x, 0)

    def items(self):
        """Entries in canonical element order."""
        return sorted(self.entries.items(), key=lambda kv: self.spec.sort_key(kv[0]))

    def __len__(self):
        return len(self.entries)

    def __eq__(self, other):
        return (
            isinstance(other, RepTable)
            and self.spec == other.spec
            and self.entries == other.entries
            and self.restricted == other.restricted
        )

    def to_json(self):
        return {
            "restricted": self.restricted,
            "entries": [
                [self.spec.element_to_json(x), c] for x, c in self.items()
            ],
        }

    def write_csv(self, fileobj):
        w = csv.writer(fileobj, lineterminator="\n")
        w.writerow(["element", "count"])
        for x, c in self.items():
            w.writerow([json.dumps(self.spec.element_to_json(x)), c])


def rep_table(b: FiniteSet, window: FiniteSet, restricted: bool = False) -> RepTable:
    """Counts over a finite window, agreeing pointwise with the rep functions."""
    _check_specs(b, window)
    counts = _pair_counts(b, restricted)
    entries = {x: counts.get(x, 0) for x in window}
    return RepTable(b.spec, entries, window=window, restricted=restricted)


def full_rep_table(b: FiniteSet, restricted: bool = False) -> RepTable:
    """Counts over every sum of B (the support of the representation function)."""
    return RepTable(b.spec, _pair_counts(b, restricted), restricted=restricted)


def _pair_counts(b: FiniteSet, restricted: bool) -> dict:
    add = b.spec.add
    els = b.elements
    counts = {}
    for i, p in enumerate(els):
        for q in els[i + 1 if restricted else i:]:
            s = add(p, q)
            counts[s] = counts.get(s, 0) + 1
    return counts
