"""Service backbone: ingestion, persistence, orchestration and the read API."""

from .config import ServiceConfig, resolve_config_path
from .orchestrator import OrchestrationReport, SummaryResult, orchestrate, query_summary
from .registry import ModelRegistry
from .sources import IngestReport, RetryPolicy, SourceSpec, ingest
from .store import StoredTweet, TweetStore

__all__ = [
    "ServiceConfig",
    "resolve_config_path",
    "ModelRegistry",
    "SourceSpec",
    "RetryPolicy",
    "IngestReport",
    "ingest",
    "orchestrate",
    "OrchestrationReport",
    "query_summary",
    "SummaryResult",
    "StoredTweet",
    "TweetStore",
]
