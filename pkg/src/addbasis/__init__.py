"""Additive bases with prescribed representation functions.

Build subsets B of an abelian semigroup X = S (+) G whose (restricted)
representation function matches a prescribed target exactly on finite
prefixes, with machine-checked invariants at every step; plus the supporting
sumset algebra, dilation-finiteness classification, and exponent-2
obstruction checks.
"""

from .classify import (
    DilationDecision,
    TripleWitness,
    dilation_finite,
    exponent2_triple,
    gamma2_infeasible,
    max_semigroup_counts,
)
from .construct import (
    INF,
    ConstructionState,
    Problem,
    RunResult,
    TargetFunction,
    UStream,
    VerificationReport,
    new_state,
    next_u,
    run,
    schedule_targets,
    step_restricted,
    step_unrestricted,
    validate,
    verify,
)
from .errors import (
    AddbasisError,
    DilationFiniteError,
    EnumerationRangeError,
    NoDecompositionError,
    ParseError,
    PostconditionError,
    SearchBoundError,
    SpecMismatchError,
    TargetFunctionError,
    UnsupportedOperationError,
    WitnessError,
)
from .groups import (
    AmbientSpec,
    GroupSemigroup,
    GroupSpec,
    NaturalsAdd,
    NaturalsWithZeroAdd,
    NonnegativeMax,
    ProductSemigroup,
    SemigroupSpec,
    Summand,
    TrivialSemigroup,
    add,
    enumerate_element,
    negate,
    split,
)
from .setalg import (
    FiniteSet,
    RepTable,
    difference_set,
    dilation,
    full_rep_table,
    rep_fn,
    rep_table,
    restricted_rep_fn,
    restricted_sumset,
    sumset,
)

__version__ = "0.1.0"
