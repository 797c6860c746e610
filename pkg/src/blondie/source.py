"""Loading chain records from local files or a block-explorer style HTTP API.

Setting ``BLONDIE_REPLAY_DIR`` (or passing ``replay_dir``) serves responses
from recorded files instead of the network; the file name is the
percent-encoded request path.
"""

from __future__ import annotations

import json
import os
import urllib.error
import urllib.request
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping
from urllib.parse import quote

from . import bitcoin, ethereum, fabric

CHAINS = ("bitcoin", "ethereum", "fabric")

DEFAULT_TEMPLATES = {
    "bitcoin": "/block/{ref}/raw",
    "ethereum": "/eth/block/{ref}",
    "fabric": "/fab/block/{ref}",
}

REPLAY_ENV = "BLONDIE_REPLAY_DIR"


class SourceError(Exception):
    pass


class FixtureDecodeError(SourceError):
    def __init__(self, path: str | Path, cause: Exception):
        super().__init__(f"{path}: {cause}")
        self.path = str(path)
        self.cause = cause


class FetchError(SourceError):
    pass


class HTTPStatusError(FetchError):
    def __init__(self, url: str, status: int):
        super().__init__(f"GET {url} returned HTTP {status}")
        self.url = url
        self.status = status


class ReplayMissError(FetchError):
    def __init__(self, path: str, replay_dir: Path):
        super().__init__(f"no recorded response for {path} in {replay_dir}")
        self.path = path


@dataclass(frozen=True)
class Sourced:
    """A decoded record plus where it came from."""

    record: Any
    source: str
    index: int = 0
    extra: Mapping[str, Any] = field(default_factory=dict)


def decode_payload(payload: bytes, chain: str, *, height: int | None = None, mempool: bool = False) -> list:
    """Decode raw payload bytes into records for the given chain.

    Bitcoin payloads hold one block (or one transaction when ``mempool``) per
    line when hex-encoded; consecutive blocks get consecutive heights.
    """
    if chain == "bitcoin":
        return _decode_bitcoin(payload, height, mempool)
    if chain == "ethereum":
        return ethereum.parse_eth_blocks(_text(payload))
    if chain == "fabric":
        return fabric.parse_fabric_blocks(_text(payload))
    raise ValueError(f"unknown chain {chain!r}; expected one of {', '.join(CHAINS)}")


def _text(payload: bytes) -> str:
    try:
        return payload.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise ValueError(f"payload is not UTF-8 text: {exc}") from None


def _decode_bitcoin(payload: bytes, height: int | None, mempool: bool) -> list:
    if not mempool and height is None:
        raise ValueError("bitcoin blocks need an explicit height")
    chunks = [payload]
    try:
        lines = [ln.strip() for ln in payload.decode("ascii").splitlines() if ln.strip()]
        if len(lines) > 1:
            chunks = [ln.encode() for ln in lines]
    except UnicodeDecodeError:
        pass
    records = []
    for i, chunk in enumerate(chunks):
        raw = bitcoin.read_raw(chunk)
        if mempool:
            records.append(bitcoin.decode_transaction(raw))
        else:
            records.append(bitcoin.decode_block(raw, height + i))
    return records


def load_fixture(path: str | Path, chain: str, *, height: int | None = None, mempool: bool = False) -> list[Sourced]:
    path = Path(path)
    if chain not in CHAINS:
        raise ValueError(f"unknown chain {chain!r}; expected one of {', '.join(CHAINS)}")
    payload = path.read_bytes()
    try:
        records = decode_payload(payload, chain, height=height, mempool=mempool)
    except (ValueError, KeyError) as exc:
        raise FixtureDecodeError(path, exc) from exc
    return [Sourced(rec, str(path), i) for i, rec in enumerate(records)]


# -- HTTP -------------------------------------------------------------------

def resource_path(chain: str, block_ref: str | int, templates: Mapping[str, str] | None = None) -> str:
    tmpl = {**DEFAULT_TEMPLATES, **(templates or {})}
    if chain not in tmpl:
        raise ValueError(f"no resource template for chain {chain!r}")
    return tmpl[chain].format(ref=quote(str(block_ref), safe=""))


def replay_filename(path: str) -> str:
    return quote(path, safe="")


def load_templates(path: str | Path) -> dict[str, str]:
    data = json.loads(Path(path).read_text())
    if not isinstance(data, dict) or not all(isinstance(v, str) for v in data.values()):
        raise ValueError("template config must be a JSON object of chain -> path template")
    return data


def fetch_block(
    endpoint_base: str,
    chain: str,
    block_ref: str | int,
    *,
    templates: Mapping[str, str] | None = None,
    replay_dir: str | Path | None = None,
    record_dir: str | Path | None = None,
    timeout: float = 30.0,
) -> bytes:
    """GET the raw payload for one block.

    In replay mode (``replay_dir`` or the environment variable) no network
    access happens; a missing recording raises ReplayMissError. In live mode
    the response can be saved under ``record_dir`` for later replay.
    """
    path = resource_path(chain, block_ref, templates)
    replay = replay_dir if replay_dir is not None else os.environ.get(REPLAY_ENV)
    if replay:
        replay = Path(replay)
        target = replay / replay_filename(path)
        if not target.is_file():
            raise ReplayMissError(path, replay)
        return target.read_bytes()

    if not endpoint_base.startswith(("http://", "https://")):
        raise FetchError(f"endpoint must be an http(s) URL, got {endpoint_base!r}")
    url = endpoint_base.rstrip("/") + path
    try:
        with urllib.request.urlopen(url, timeout=timeout) as resp:
            status = resp.status
            body = resp.read()
    except urllib.error.HTTPError as exc:
        raise HTTPStatusError(url, exc.code) from None
    except (urllib.error.URLError, OSError) as exc:
        raise FetchError(f"GET {url} failed: {exc}") from exc
    if status != 200:
        raise HTTPStatusError(url, status)
    if record_dir is not None:
        record_dir = Path(record_dir)
        record_dir.mkdir(parents=True, exist_ok=True)
        (record_dir / replay_filename(path)).write_bytes(body)
    return body
