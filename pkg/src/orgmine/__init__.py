"""Organizational mining (Similar-Task, Sub-Contract) over tabular and graph storage engines."""

from .backends import ENGINES, Engine, make_engine

from .event_log import (
    ColumnMapping,
    Event,
    EventLog,
    LogStats,
    Trace,
    chunk_prefixes,
    group_by_case,
    parse_csv,
    read_log,
    stats,
)
from .metrics import (
    ActorActivityMatrix,
    Sociogram,
    SubContractParams,
    build_actor_activity_matrix,
    cosine_similarity,
    similar_task,
    similar_task_log,
    sub_contract,
    sub_contract_log,
    sub_contract_oracle,
)

__version__ = "0.1.0"
