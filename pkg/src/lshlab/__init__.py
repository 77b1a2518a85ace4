"""lshlab: locality-sensitive hashing library and benchmark harness.

Implements MinHash, SimHash, and b-bit minwise hashing with exact
collision-probability contracts, the cosine/resemblance bound envelope,
closed-form rho (gap) analysis, a (K, L) bucketed index, and a retrieval
benchmark comparing hash families under a common cosine gold standard.
"""

from ._kernels import active_backend, available_backends, use_backend
from .datasets import (
    DATASET_REGISTRY,
    DEFAULT_PROFILE,
    DEFAULT_QUERY_NNZ,
    Dataset,
    ProfileCell,
    SeedStream,
    check_registry,
    load_dataset,
    load_svmlight,
    planted_pair,
    synthesize,
    write_svmlight,
)
from .families import (
    BBIT_MINHASH,
    DEFAULT_SEED,
    FAMILY_KINDS,
    MINHASH,
    SIMHASH,
    HashFamilyConfig,
    bbit_minhash,
    estimate_collision,
    hash_matrix,
    minhash,
    permutation_collision_probability,
    simhash,
)
from .gaps import (
    RhoCurve,
    bbit_collision_probability,
    bounds_curve,
    rho_bbit,
    rho_curve,
    rho_minhash,
    rho_minhash_idealized,
    rho_minhash_restricted,
    rho_minhash_worst,
    rho_simhash,
    worst_case_balance,
)
from .harness import (
    BenchmarkReport,
    GoldStandard,
    Histogram,
    OverlapCurve,
    RankProfile,
    RecallTarget,
    cosine_matrix,
    gold_topk,
    ranklist_overlap,
    resemblance_matrix,
    sweep,
    top_location_profile,
    z_histogram,
)
from .index import IndexConfig, LshIndex, bucket_key, build, chain_key_columns
from .similarity import (
    PairStats,
    SparseVector,
    balance_statistic,
    cosine,
    intersection_size,
    pair_stats,
    resemblance,
    resemblance_bounds,
    restricted_lower_bound,
    tightness_witness,
)

__version__ = "0.1.0"
