"""Hyperledger Fabric block/transaction records from explorer-style JSON."""

from __future__ import annotations

import json
import re
from dataclasses import asdict, dataclass
from typing import Any

_RFC3339 = re.compile(
    r"^\d{4}-\d{2}-\d{2}[Tt ]\d{2}:\d{2}:\d{2}(\.\d+)?([Zz]|[+-]\d{2}:\d{2})$"
)

TX_FIELDS = (
    "type",
    "version",
    "timestamp",
    "channelId",
    "txId",
    "epoch",
    "payloadVisibility",
    "chaincodePath",
    "chaincodeName",
    "chaincodeVersion",
)
BLOCK_FIELDS = ("number", "currentBlockHash", "previousHash", "dataHash")


class FabricIngestError(ValueError):
    pass


@dataclass(frozen=True)
class FabricTransaction:
    type: str
    version: int
    timestamp: str
    channelId: str
    txId: str
    epoch: int
    payloadVisibility: str
    chaincodePath: str
    chaincodeName: str
    chaincodeVersion: str

    def __post_init__(self):
        if not self.txId:
            raise FabricIngestError("txId must be non-empty")
        if not self.channelId:
            raise FabricIngestError(f"transaction {self.txId}: channelId must be non-empty")
        if not _RFC3339.match(self.timestamp):
            raise FabricIngestError(f"transaction {self.txId}: timestamp {self.timestamp!r} is not RFC 3339")

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)


@dataclass(frozen=True)
class FabricBlock:
    number: int
    currentBlockHash: str
    previousHash: str
    dataHash: str
    transactions: tuple[FabricTransaction, ...] = ()

    def to_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {name: getattr(self, name) for name in BLOCK_FIELDS}
        out["transactions"] = [tx.to_dict() for tx in self.transactions]
        return out


@dataclass(frozen=True, order=True)
class ChainDiagnostic:
    block_number: int
    kind: str  # "sequence" or "link-mismatch"
    detail: str

    def __str__(self) -> str:
        return f"block {self.block_number}: {self.kind}: {self.detail}"


def _require(obj: dict, name: str, where: str) -> Any:
    if name not in obj:
        raise FabricIngestError(f"{where}: missing required field {name!r}")
    return obj[name]


def _non_negative_int(value: Any, name: str, where: str) -> int:
    if isinstance(value, bool):
        raise FabricIngestError(f"{where}: {name} must be an integer")
    if not isinstance(value, int):
        raise FabricIngestError(f"{where}: {name} must be an integer, got {value!r}")
    if value < 0:
        raise FabricIngestError(f"{where}: {name} must be non-negative, got {value}")
    return value


def _text(value: Any, name: str, where: str) -> str:
    if not isinstance(value, str):
        raise FabricIngestError(f"{where}: {name} must be a string, got {value!r}")
    return value


def _transaction_from_dict(obj: Any, where: str) -> FabricTransaction:
    if not isinstance(obj, dict):
        raise FabricIngestError(f"{where}: expected a transaction object")
    values = {name: _require(obj, name, where) for name in TX_FIELDS}
    for name in ("version", "epoch"):
        values[name] = _non_negative_int(values[name], name, where)
    for name in TX_FIELDS:
        if name not in ("version", "epoch"):
            values[name] = _text(values[name], name, where)
    return FabricTransaction(**values)


def block_from_dict(obj: Any) -> FabricBlock:
    if not isinstance(obj, dict):
        raise FabricIngestError("expected a JSON object for a block")
    where = f"block {obj.get('number', '?')}"
    number = _non_negative_int(_require(obj, "number", where), "number", where)
    txs = obj.get("transactions", [])
    if not isinstance(txs, list):
        raise FabricIngestError(f"{where}: transactions must be a list")
    return FabricBlock(
        number=number,
        currentBlockHash=_text(_require(obj, "currentBlockHash", where), "currentBlockHash", where).lower(),
        previousHash=_text(_require(obj, "previousHash", where), "previousHash", where).lower(),
        dataHash=_text(_require(obj, "dataHash", where), "dataHash", where).lower(),
        transactions=tuple(
            _transaction_from_dict(t, f"{where}, transaction {i}") for i, t in enumerate(txs)
        ),
    )


def parse_fabric_block(text: str) -> FabricBlock:
    try:
        return block_from_dict(json.loads(text))
    except json.JSONDecodeError as exc:
        raise FabricIngestError(f"invalid JSON: {exc}") from None


def parse_fabric_blocks(text: str) -> list[FabricBlock]:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FabricIngestError(f"invalid JSON: {exc}") from None
    if isinstance(obj, list):
        return [block_from_dict(item) for item in obj]
    return [block_from_dict(obj)]


def validate_chain_links(blocks: list[FabricBlock]) -> list[ChainDiagnostic]:
    diagnostics = []
    for prev, cur in zip(blocks, blocks[1:]):
        if cur.number != prev.number + 1:
            diagnostics.append(ChainDiagnostic(
                cur.number, "sequence",
                f"block {cur.number} follows block {prev.number}; expected {prev.number + 1}",
            ))
        if cur.previousHash != prev.currentBlockHash:
            diagnostics.append(ChainDiagnostic(
                cur.number, "link-mismatch",
                f"block {cur.number} previousHash {cur.previousHash} != "
                f"block {prev.number} currentBlockHash {prev.currentBlockHash}",
            ))
    return sorted(diagnostics)
