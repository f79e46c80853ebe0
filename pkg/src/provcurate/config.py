"""Server configuration: one YAML file, validated at startup.

Paths inside the file resolve relative to the file's directory. The
documented schema lives in docs/server-config.md; anything unknown or
inconsistent fails fast with a ConfigError.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

import yaml

from .display import OrphanPolicy
from .errors import ConfigError
from .provenance import parse_timestamp
from .store.base import EndpointConfig

__all__ = ["ServerConfig", "load_server_config"]

_TOP_KEYS = {"base_iri", "shapes", "rules", "store", "auth", "baseline", "defaults", "mint_strategy"}
_STORE_KEYS = {
    "embedded",
    "seed",
    "data_endpoint",
    "provenance_endpoint",
    "timeout_seconds",
    "max_attempts",
    "backoff_seconds",
}
_AUTH_KEYS = {"tokens", "allowlist", "allow_anonymous_reads"}
_BASELINE_KEYS = {"source", "created_at"}
_DEFAULTS_KEYS = {"orphan_policy", "lock_ttl_seconds"}


@dataclass(frozen=True, slots=True)
class ServerConfig:
    base_iri: str
    shape_paths: tuple[Path, ...]
    rule_paths: tuple[Path, ...]
    embedded: bool
    seed_path: Path | None
    endpoints: EndpointConfig | None
    tokens: dict[str, str]  # bearer token -> agent IRI
    allowlist: frozenset[str]
    allow_anonymous_reads: bool
    baseline_source: str
    baseline_created_at: datetime
    default_orphan_policy: OrphanPolicy
    lock_ttl_seconds: int
    mint_strategy: str


def _check_keys(section: dict, allowed: set[str], where: str):
    unknown = set(section) - allowed
    if unknown:
        raise ConfigError(f"unknown key(s) {sorted(unknown)} in {where}")


def load_server_config(path: str | Path) -> ServerConfig:
    path = Path(path)
    try:
        raw = yaml.safe_load(path.read_text())
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}")
    except yaml.YAMLError as exc:
        raise ConfigError(f"config file is not valid YAML: {exc}", path=str(path))
    if not isinstance(raw, dict):
        raise ConfigError("config file must contain a mapping", path=str(path))
    _check_keys(raw, _TOP_KEYS, "config root")
    base_dir = path.parent

    base_iri = raw.get("base_iri")
    if not base_iri or not isinstance(base_iri, str):
        raise ConfigError("base_iri is required", path=str(path))

    def paths_of(key: str) -> tuple[Path, ...]:
        entries = raw.get(key, [])
        if not isinstance(entries, list):
            raise ConfigError(f"{key} must be a list of file paths", path=str(path))
        resolved = []
        for entry in entries:
            p = (base_dir / entry).resolve()
            if not p.exists():
                raise ConfigError(f"{key} file does not exist: {entry}", path=str(path))
            resolved.append(p)
        return tuple(resolved)

    store_raw = raw.get("store", {}) or {}
    _check_keys(store_raw, _STORE_KEYS, "store")
    embedded = bool(store_raw.get("embedded", False))
    seed_path = None
    endpoints = None
    if embedded:
        seed = store_raw.get("seed")
        if seed is not None:
            seed_path = (base_dir / seed).resolve()
            if not seed_path.exists():
                raise ConfigError(f"store.seed file does not exist: {seed}", path=str(path))
    else:
        data = store_raw.get("data_endpoint")
        prov = store_raw.get("provenance_endpoint", data)
        if not data:
            raise ConfigError(
                "store.data_endpoint is required unless store.embedded is true", path=str(path)
            )
        endpoints = EndpointConfig(
            data_endpoint=data,
            provenance_endpoint=prov,
            timeout_seconds=float(store_raw.get("timeout_seconds", 30.0)),
            max_attempts=int(store_raw.get("max_attempts", 3)),
            backoff_seconds=float(store_raw.get("backoff_seconds", 0.5)),
        )

    auth_raw = raw.get("auth", {}) or {}
    _check_keys(auth_raw, _AUTH_KEYS, "auth")
    tokens = auth_raw.get("tokens", {}) or {}
    if not isinstance(tokens, dict) or not all(
        isinstance(k, str) and isinstance(v, str) for k, v in tokens.items()
    ):
        raise ConfigError("auth.tokens must map bearer tokens to agent IRIs", path=str(path))
    allowlist = auth_raw.get("allowlist", []) or []
    if not allowlist:
        raise ConfigError("auth.allowlist must not be empty", path=str(path))

    baseline_raw = raw.get("baseline", {}) or {}
    _check_keys(baseline_raw, _BASELINE_KEYS, "baseline")
    baseline_source = baseline_raw.get("source", base_iri)
    created_raw = baseline_raw.get("created_at")
    if created_raw is None:
        baseline_created_at = datetime(1970, 1, 1, tzinfo=timezone.utc)
    elif isinstance(created_raw, datetime):
        baseline_created_at = (
            created_raw if created_raw.tzinfo else created_raw.replace(tzinfo=timezone.utc)
        )
    else:
        try:
            baseline_created_at = parse_timestamp(str(created_raw))
        except ValueError:
            raise ConfigError(
                f"baseline.created_at is not an ISO timestamp: {created_raw!r}", path=str(path)
            )

    defaults_raw = raw.get("defaults", {}) or {}
    _check_keys(defaults_raw, _DEFAULTS_KEYS, "defaults")
    policy_raw = defaults_raw.get("orphan_policy", "ask")
    try:
        policy = OrphanPolicy(policy_raw)
    except ValueError:
        raise ConfigError(f"defaults.orphan_policy must be ask, delete, or keep", path=str(path))
    lock_ttl = int(defaults_raw.get("lock_ttl_seconds", 300))
    if lock_ttl < 10:
        raise ConfigError("defaults.lock_ttl_seconds must be at least 10", path=str(path))

    mint = raw.get("mint_strategy", "uuid")
    if mint not in ("uuid", "sequential"):
        raise ConfigError(f"mint_strategy must be uuid or sequential, got {mint!r}", path=str(path))

    return ServerConfig(
        base_iri=base_iri,
        shape_paths=paths_of("shapes"),
        rule_paths=paths_of("rules"),
        embedded=embedded,
        seed_path=seed_path,
        endpoints=endpoints,
        tokens=dict(tokens),
        allowlist=frozenset(allowlist),
        allow_anonymous_reads=bool(auth_raw.get("allow_anonymous_reads", True)),
        baseline_source=baseline_source,
        baseline_created_at=baseline_created_at,
        default_orphan_policy=policy,
        lock_ttl_seconds=lock_ttl,
        mint_strategy=mint,
    )
