"""Exact computation with tensor spaces.

Vector spaces carrying tuples of partition-indexed forms: universal and
homogeneous constructions at finite truncation depth, explicit embeddings
with machine-checkable certificates, and orbit decisions via the
classifying map.  All arithmetic is exact (rationals or finite fields).
"""

from .errors import (
    BudgetError,
    CapacityError,
    CertificateError,
    CharacteristicError,
    DimensionError,
    FieldError,
    FormatError,
    TensorSpaceError,
)
from .fields import GF, QQ, ExtensionField, PrimeField, Rationals, field_embedding
from .linalg import Matrix, enumerate_gl, gl_order, kernel_basis, solve_linear
from .partitions import (
    Partition,
    PartitionTuple,
    StandardTableau,
    canonical_tableau,
    hook_length_count,
    lr_coefficient,
    lr_coefficient_via_polynomials,
    schur_dim,
    shift_tuple,
    standard_tableaux,
)
from .forms import (
    LambdaForm,
    LambdaSpace,
    LinearEmbedding,
    MultiForm,
    decompose_form,
    direct_sum,
    enumerate_lambda_structures,
    is_embedding,
    iso_brute_force,
    restrict_tuple,
    young_projector_apply,
)
from .universal import (
    base_change,
    embed_finite_space,
    embed_into_universal_nform,
    universal_lambda_space,
    universal_nform,
)
from .shifting import (
    BlockStructure,
    PinnedBase,
    amalgamate,
    blocks_dimension_check,
    embed_over_base,
    relative_universal_extension,
    shift_structure,
    unshift,
)
from .engine import (
    LambdaInstance,
    Tower,
    back_and_forth,
    build_tower,
    empty_seed,
    jep_chain,
)
from .graphs import FiniteGraph, GraphEmbedding, GraphInstance
from .homogeneity import (
    HyperbolicInstance,
    classifying_map,
    hyperbolic_space,
    oligomorphic_witness,
    oligomorphic_witness_pinned,
    orbit_test,
    principal_type_point,
    witt_embed_quadratic,
    witt_extend,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
