"""Structural decision procedures and closed-form count oracles.

``dilation_finite`` decides whether h * G is finite directly from the
structured description of G: the dilation is finite exactly when G has no
integer-line summand at all and every summand of infinite multiplicity is
cyclic of some order d >= 2 dividing h.  (An integer-line summand of any
multiplicity contains an element of infinite order, whose h-power orbit is
already infinite.)  When finite, the decision carries the witnessing
decomposition: a finite part collecting the cyclic summands whose order does
not divide h, and, per divisor d of h, the multiplicity of order-d summands.

``exponent2_triple`` extracts, from any element with two distinct restricted
representations in a subset of an exponent-2 group, two further elements that
also have at least two restricted representations; this is the obstruction
that rules out prescribing >= 2 on exactly one or two elements there
(``gamma2_infeasible``).

``max_semigroup_counts`` is the closed form for the (N0, max) semigroup: if
B = N0 minus t missing values then, above max(missing) and min(B),
r(n) = n + 1 - t and r^(n) = n - t.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import WitnessError
from .groups import GroupSpec
from .setalg import FiniteSet, restricted_rep_fn


@dataclass(frozen=True)
class DilationDecision:
    """Outcome of the h * G finiteness test.

    ``decomposition`` is present iff ``finite``: a dict with ``finite_part``
    (cyclic orders, with multiplicity, of summands not killed by h) and
    ``torsion_part`` mapping each divisor d of h to the multiplicity of
    order-d summands ("inf" for countably many).  ``reason`` names the
    summand forcing infiniteness otherwise.
    """

    h: int
    finite: bool
    decomposition: dict | None = None
    reason: str | None = None

    def to_json(self) -> dict:
        out = {"h": self.h, "finite": self.finite}
        if self.decomposition is not None:
            out["decomposition"] = self.decomposition
        if self.reason is not None:
            out["reason"] = self.reason
        return out


def dilation_finite(spec: GroupSpec, h: int) -> DilationDecision:
    """Decide finiteness of h * G structurally."""
    if h < 1:
        raise ValueError("dilation factor must be a positive integer")
    for k, s in enumerate(spec.summands):
        if s.order == 0:
            return DilationDecision(
                h,
                False,
                reason=(
                    f"summand {k} is a copy of Z: {h}*Z is infinite"
                ),
            )
        if s.multiplicity is None and (h % s.order != 0 or s.order < 2):
            return DilationDecision(
                h,
                False,
                reason=(
                    f"summand {k} has infinitely many cyclic factors of "
                    f"order {s.order}, which does not divide {h}"
                ),
            )
    finite_part = []
    torsion_part = {}
    for s in spec.summands:
        if h % s.order == 0:
            d = s.order
            prev = torsion_part.get(d, 0)
            if s.multiplicity is None or prev == "inf":
                torsion_part[d] = "inf"
            else:
                torsion_part[d] = prev + s.multiplicity
        else:
            finite_part.extend([s.order] * s.multiplicity)
    return DilationDecision(
        h,
        True,
        decomposition={
            "finite_part": sorted(finite_part),
            "torsion_part": {str(d): m for d, m in sorted(torsion_part.items())},
        },
    )


@dataclass(frozen=True)
class TripleWitness:
    """Three distinct elements x, y, z, each with >= 2 restricted
    representations in B, derived from one doubly-represented x.

    The underlying quadruple satisfies x = a + b = c + d with a, b, c, d
    distinct; then y = a + c (= b + d) and z = a + d (= b + c) because every
    element is its own inverse.
    """

    x: object
    y: object
    z: object
    quad: tuple

    def check(self, b: FiniteSet) -> bool:
        """Re-verify the witness against B with the oracle counts."""
        a, bb, c, d = self.quad
        spec = b.spec
        if len({a, bb, c, d}) != 4 or not all(e in b for e in self.quad):
            return False
        if len({self.x, self.y, self.z}) != 3:
            return False
        if spec.add(a, bb) != self.x or spec.add(c, d) != self.x:
            return False
        if spec.add(a, c) != self.y or spec.add(a, d) != self.z:
            return False
        return all(
            restricted_rep_fn(b, e) >= 2 for e in (self.x, self.y, self.z)
        )


def exponent2_triple(b: FiniteSet, x) -> TripleWitness:
    """Build a TripleWitness from two distinct representations of x.

    B must live in a group of exponent 2; raises WitnessError when x has
    fewer than two restricted representations.
    """
    spec = b.spec
    if not isinstance(spec, GroupSpec) or spec.exponent() != 2:
        raise WitnessError(
            f"triple extraction needs a group of exponent 2, got {spec!r}"
        )
    reps = []
    els = b.elements
    for i, p in enumerate(els):
        for q in els[i + 1:]:
            if spec.add(p, q) == x:
                reps.append((p, q))
                if len(reps) == 2:
                    (a, bb), (c, d) = reps
                    y = spec.add(a, c)
                    z = spec.add(a, d)
                    return TripleWitness(x=x, y=y, z=z, quad=(a, bb, c, d))
    raise WitnessError(
        f"element has {len(reps)} < 2 restricted representations"
    )


def gamma2_infeasible(f_values) -> bool:
    """One-directional obstruction over an exponent-2 window.

    ``f_values`` maps window elements to prescribed counts (>= 1 everywhere,
    infinity allowed).  Returns True when the number of elements prescribed
    >= 2 is exactly one or two, which no subset can realize as its restricted
    representation function.  False means only "not excluded by this test".
    """
    heavy = 0
    for x, v in f_values.items():
        if v < 1:
            raise ValueError(f"window value at {x!r} must be >= 1, got {v!r}")
        if v >= 2:
            heavy += 1
    return heavy in (1, 2)


def max_semigroup_counts(t_complement, n: int) -> tuple[int, int]:
    """Counts (r, r^) at n for B = N0 minus t_complement under (N0, max).

    Above the threshold max(t_complement ∪ {min B}) the closed form applies:
    (n + 1 - t, n - t) with t = |t_complement|.  Below it, counts are taken
    directly from the max law: a pair {b, b'} sums to n iff max(b, b') = n.
    """
    if n < 0:
        raise ValueError("n must be a nonnegative integer")
    missing = set(t_complement)
    if isinstance(t_complement, FiniteSet):
        missing = set(t_complement.elements)
    if any(m < 0 for m in missing):
        raise ValueError("t_complement must contain nonnegative integers")
    t = len(missing)
    threshold = max(missing) if missing else -1
    min_b = next(i for i in range(t + 1) if i not in missing)
    if n > threshold and n > min_b:
        return (n + 1 - t, n - t)
    # below threshold: direct counting under max
    if n in missing:
        return (0, 0)
    below = sum(1 for b in range(n + 1) if b not in missing)
    return (below, below - 1)
