"""Clustering in hyperdimensional space with similarity-driven initialization.

Query hypervectors encode the data; four initializers read cluster structure
off their mutual similarities before the iterative center refinement starts,
which removes the accuracy variance that random initial centers cause. The
bench module sweeps (dataset, algorithm, encoding, mode) grids over seed
ranges and emits machine-readable reports.
"""

from .bench import (
    Algorithm,
    ExperimentConfig,
    RunRecord,
    RunReport,
    SpaceComparison,
    compare_spaces,
    emit_report,
    load_report,
    run_experiment,
)
from .classic import ApConfig, ApResult, KMeansResult, affinity_propagation, hierarchical, kmeans
from .datasets import DatasetSpec, RawDataset, from_arrays, load, load_registry, stratified_subsample
from .encoding import (
    EncodedDataset,
    EncodingConfig,
    EncodingKind,
    encode_dataset,
    encode_ngram,
    encode_record,
    quantize,
    row_tie_breaker,
)
from .hdc_clustering import (
    ClusterModel,
    RefinementConfig,
    assign,
    height_group_assignments,
    init_bin_height,
    init_bin_width,
    init_hdcluster,
    init_sb_affinity,
    init_sb_kmeans,
    refine,
    regenerate,
    similarity_profile,
    width_bin_assignments,
)
from .hv import (
    Hypervector,
    Metric,
    Mode,
    SimilarityValue,
    bind,
    bundle,
    complement,
    permute,
    similarity,
)
from .metrics import Contingency, RunStats, accuracy, accuracy_with_method, aggregate
from .rng import RngStream
from .seeds import SeedSet, generate_level_hvs, generate_random_hvs, make_seed_set

__version__ = "0.1.0"
