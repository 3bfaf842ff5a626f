"""Combine, trim, and independently validate divide-and-conquer refutations."""

from .checker import (
    CheckReport,
    PERMISSIVE,
    PivotNotInClauseError,
    NotUnitError,
    PropagationOutcome,
    STRICT,
    annotate_refutation,
    check_refutation,
    has_at,
    has_rat,
    is_preserving,
    propagate_fixpoint,
    propagate_step,
)
from .core import (
    ADD,
    AbsentClauseError,
    Clause,
    DELETE,
    EMPTY_CLAUSE,
    Formula,
    ProofStep,
    Refutation,
    negate,
)
from .formats import (
    BadCubeFilenameError,
    BundleEntry,
    Cube,
    DimacsCnf,
    DuplicateCubeError,
    DuplicateVariableInCubeError,
    FormatError,
    MalformedHeaderError,
    MissingTerminatorError,
    NonIntegerTokenError,
    ProofBundle,
    UnreadableProofError,
    cube_from_filename,
    load_bundle,
    parse_dimacs,
    parse_drat,
    write_dimacs,
    write_drat,
)
from .harness import (
    DepthTooLargeError,
    GiveUpError,
    ResourceLimitError,
    SolveOutcome,
    gen_random_unsat,
    solve_drup,
    split,
)
from .stitcher import (
    IncompletePartitionError,
    InconsistentDecisionOrderError,
    Inner,
    InvalidSubProofError,
    Leaf,
    MissingSiblingError,
    NonPreservingInputError,
    RepairError,
    SpillStore,
    StitchPlan,
    StitchRecord,
    average_clause_length,
    build_cube_tree,
    build_plan,
    combine_all,
    default_jobs,
    stitch,
    strip_deletions,
)
from .trimmer import InvalidProofError, TrimInternalError, TrimReport, trim, unsat_core

__version__ = "0.1.0"

__all__ = [
    "ADD",
    "AbsentClauseError",
    "BadCubeFilenameError",
    "BundleEntry",
    "CheckReport",
    "Clause",
    "Cube",
    "DELETE",
    "DepthTooLargeError",
    "DimacsCnf",
    "DuplicateCubeError",
    "DuplicateVariableInCubeError",
    "EMPTY_CLAUSE",
    "Formula",
    "FormatError",
    "GiveUpError",
    "IncompletePartitionError",
    "InconsistentDecisionOrderError",
    "Inner",
    "InvalidProofError",
    "InvalidSubProofError",
    "Leaf",
    "MalformedHeaderError",
    "MissingSiblingError",
    "MissingTerminatorError",
    "NonIntegerTokenError",
    "NonPreservingInputError",
    "NotUnitError",
    "PERMISSIVE",
    "PivotNotInClauseError",
    "ProofBundle",
    "ProofStep",
    "PropagationOutcome",
    "Refutation",
    "RepairError",
    "ResourceLimitError",
    "STRICT",
    "SolveOutcome",
    "SpillStore",
    "StitchPlan",
    "StitchRecord",
    "TrimInternalError",
    "TrimReport",
    "UnreadableProofError",
    "annotate_refutation",
    "average_clause_length",
    "build_cube_tree",
    "build_plan",
    "check_refutation",
    "combine_all",
    "default_jobs",
    "cube_from_filename",
    "gen_random_unsat",
    "has_at",
    "has_rat",
    "is_preserving",
    "load_bundle",
    "negate",
    "parse_dimacs",
    "parse_drat",
    "propagate_fixpoint",
    "propagate_step",
    "solve_drup",
    "split",
    "stitch",
    "strip_deletions",
    "trim",
    "unsat_core",
    "write_dimacs",
    "write_drat",
]
