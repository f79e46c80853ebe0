from .base import EndpointConfig, Store, term_from_json, term_to_json
from .client import SparqlClient
from .memory import MemoryQuadStore
from .server import SparqlEndpointServer

__all__ = [
    "EndpointConfig",
    "Store",
    "SparqlClient",
    "MemoryQuadStore",
    "SparqlEndpointServer",
    "term_to_json",
    "term_from_json",
]
