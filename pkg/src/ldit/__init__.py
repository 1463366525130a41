"""Live Detectability, Identifiability and Trackability (L-DIT) scoring of space objects."""

__version__ = "0.1.0"

from .catalog import (  # noqa: E402
    CatalogEntry,
    GroundStation,
    MagnitudeObservation,
    OrbitClass,
    TLERecord,
    build_catalog,
    classify_orbit,
    correlate_rcs_magnitude,
    format_tle,
    load_ground_stations,
    make_tle,
    merge_rcs,
    parse_tle,
    scan_tle,
)
from .detectability import score_detectability  # noqa: E402
from .identifiability import (  # noqa: E402
    assign_observation,
    bisecting_kmeans,
    cluster_identifiability,
    score_identifiability,
)
from .ledger import append_block, read_history, verify_chain  # noqa: E402
from .orbit import angular_momentum, momentum_from_elements, propagate  # noqa: E402
from .pipeline import score_catalog  # noqa: E402
from .scoring import combine_dit, entity_scores, rank, spider_data  # noqa: E402
from .trackability import (  # noqa: E402
    TrackabilityConfig,
    combine_trackability,
    monte_carlo_trackability,
    predict_passes,
)
