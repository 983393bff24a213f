"""Industrial flexible-load modeling, demand response dispatch and an offline response database."""
from .config import RunConfig, load_config, parse_config
from .demand_response import (
    ALL_CASES,
    TARGET_IDS,
    DispatchParams,
    DispatchResult,
    FlexibleCase,
    LoadKind,
    ResponseTarget,
    brute_force_dispatch,
    check_dispatch,
    make_target,
    schedule_dispatch,
)
from .errors import FlexDRError
from .evaluation import mad, metric_row, r_square, rmsd
from .load_models import StorageSpec
from .offline_db import OfflineDatabase, build_database, query
from .profile import LoadProfile, read_profile_csv, write_profile_csv
from .scenario_gen import AugmentationConfig, augment_days, fuse_physics_data, interpolate_profile

__version__ = "0.1.0"
