"""collabnet: collaboration-graph models and analysis.

Builds bipartite authorship graphs, coauthorship projections, and
time-resolved snapshot sequences from publication records, and provides
structural statistics, eigenvector centrality, modularity clustering
with ground-truth validation, and seminar-cohort tracking.
"""

__version__ = "0.1.0"

from .centrality import (
    CentralityResult,
    ConvergenceError,
    compare_median_centrality,
    eigenvector_centrality,
    rank_authors,
    rank_publications,
)
from .clustering import (
    Clustering,
    CoverSet,
    OverlapMatrix,
    author_clusters,
    jaccard,
    louvain,
    mean_max_overlap,
    modularity,
    overlap_coefficient,
    random_baseline,
    refine,
    topical_clusters,
)
from .dynamics import (
    MEASURES,
    AuthorCohort,
    MeasureSeries,
    career_stage_split,
    classify_area_launchers,
    coauthor_set,
    copublication_set,
    emit_boxplot_series,
    first_publication_years,
    intra_copublication_set,
    measure,
    publication_set,
    sample_connected_cohorts,
    sample_random_cohorts,
    seminar_cohorts,
    track_cohorts,
)
from .graphs import (
    BipartiteAuthorshipGraph,
    CoauthorshipGraph,
    Snapshot,
    SnapshotSequence,
    build_authorship_graph,
    build_time_resolved,
    project_coauthorship,
)
from .ingest import (
    FormatError,
    NameAlignment,
    ParseResult,
    PublicationRecord,
    SeminarRecord,
    align_names,
    normalize_name,
    parse_publications,
    parse_seminars,
)
from .structure import (
    ComponentLabeling,
    CoreDecomposition,
    PowerLawFit,
    connected_components,
    core_numbers,
    degree_histogram,
    fit_power_law,
    sample_average_distance,
)
