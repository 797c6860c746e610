"""Ethereum block/transaction records read from node-RPC shaped JSON."""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Any

ZERO_ADDRESS = "0x" + "00" * 20
ZERO_HASH = "0x" + "00" * 32


class IngestError(ValueError):
    pass


class ConstraintError(IngestError):
    pass


@dataclass(frozen=True)
class ContractCreation:
    init: bytes


@dataclass(frozen=True)
class MessageCall:
    data: bytes


@dataclass(frozen=True)
class EthereumTransaction:
    nonce: int
    gas_price: int
    gas_limit: int
    to: str
    value: int
    v: str
    r: str
    s: str
    kind: ContractCreation | MessageCall
    hash: str | None = None
    sender: str | None = None

    @property
    def is_contract_creation(self) -> bool:
        return isinstance(self.kind, ContractCreation)


@dataclass(frozen=True)
class EthereumBlock:
    parent_hash: str
    ommers_hash: str
    beneficiary: str
    state_root: str
    transactions_root: str
    receipts_root: str
    logs_bloom: str
    difficulty: int
    number: int
    gas_limit: int
    gas_used: int
    timestamp: int
    extra_data: bytes
    mix_hash: str
    nonce: str
    transactions: tuple[EthereumTransaction, ...] = ()
    ommers: tuple[str, ...] = ()
    hash: str | None = None

    def __post_init__(self):
        if self.gas_used > self.gas_limit:
            raise ConstraintError(f"gasUsed {self.gas_used} exceeds gasLimit {self.gas_limit}")
        if len(self.extra_data) > 32:
            raise ConstraintError(f"extraData is {len(self.extra_data)} bytes, limit is 32")
        if self.number == 0 and self.parent_hash != ZERO_HASH:
            raise ConstraintError("genesis block (number 0) must have an all-zero parentHash")


def classify_transaction(to: str, payload: bytes) -> ContractCreation | MessageCall:
    if to == ZERO_ADDRESS:
        return ContractCreation(payload)
    return MessageCall(payload)


# -- field decoding ---------------------------------------------------------

def _strip(text: str) -> str:
    return text[2:] if text[:2] in ("0x", "0X") else text


def _quantity(obj: dict, name: str) -> int:
    raw = obj[name]
    if isinstance(raw, bool):
        raise IngestError(f"{name}: expected a hex quantity, got {raw!r}")
    if isinstance(raw, int):
        if raw < 0:
            raise IngestError(f"{name}: negative quantity {raw}")
        return raw
    if not isinstance(raw, str):
        raise IngestError(f"{name}: expected a hex quantity, got {raw!r}")
    digits = _strip(raw)
    if not digits:
        raise IngestError(f"{name}: empty hex quantity")
    try:
        return int(digits, 16)
    except ValueError:
        raise IngestError(f"{name}: malformed hex quantity {raw!r}") from None


def _data(obj: dict, name: str, size: int | None = None) -> bytes:
    raw = obj[name]
    if not isinstance(raw, str):
        raise IngestError(f"{name}: expected hex data, got {raw!r}")
    digits = _strip(raw)
    if len(digits) % 2:
        raise IngestError(f"{name}: odd-length hex {raw!r}")
    try:
        value = bytes.fromhex(digits)
    except ValueError:
        raise IngestError(f"{name}: malformed hex {raw!r}") from None
    if size is not None and len(value) != size:
        raise IngestError(f"{name}: expected {size} bytes, got {len(value)}")
    return value


def _hex(obj: dict, name: str, size: int | None = None) -> str:
    return "0x" + _data(obj, name, size).hex()


def _signature_part(obj: dict, name: str) -> str:
    raw = obj[name]
    if isinstance(raw, int) and not isinstance(raw, bool):
        return hex(raw)
    if not isinstance(raw, str):
        raise IngestError(f"{name}: expected hex text, got {raw!r}")
    digits = _strip(raw).lower()
    if not digits or any(c not in "0123456789abcdef" for c in digits):
        raise IngestError(f"{name}: malformed hex {raw!r}")
    return "0x" + digits


def _pick(obj: dict, *names: str, required: bool = True) -> str | None:
    """First alias present in obj; the Table-style name comes first."""
    for name in names:
        if name in obj:
            return name
    if required:
        raise IngestError(f"missing required field {names[0]!r}")
    return None


def _parse_transaction(obj: Any) -> EthereumTransaction:
    if not isinstance(obj, dict):
        raise IngestError("transactions must be full transaction objects, not hashes")
    to_key = _pick(obj, "to", required=False)
    if to_key is None or obj[to_key] is None:
        to = ZERO_ADDRESS
    else:
        to = _hex(obj, to_key, 20)
    payload_key = _pick(obj, "init", "data", "input", required=False)
    payload = _data(obj, payload_key) if payload_key else b""
    from_key = _pick(obj, "from", required=False)
    hash_key = _pick(obj, "hash", required=False)
    return EthereumTransaction(
        nonce=_quantity(obj, _pick(obj, "nonce", "once")),
        gas_price=_quantity(obj, _pick(obj, "gasPrice")),
        gas_limit=_quantity(obj, _pick(obj, "gasLimit", "gas")),
        to=to,
        value=_quantity(obj, _pick(obj, "value")),
        v=_signature_part(obj, _pick(obj, "v")),
        r=_signature_part(obj, _pick(obj, "r")),
        s=_signature_part(obj, _pick(obj, "s")),
        kind=classify_transaction(to, payload),
        hash=_hex(obj, hash_key, 32) if hash_key and obj[hash_key] is not None else None,
        sender=_hex(obj, from_key, 20) if from_key and obj[from_key] is not None else None,
    )


def block_from_dict(obj: Any) -> EthereumBlock:
    if not isinstance(obj, dict):
        raise IngestError(f"expected a JSON object for a block, got {type(obj).__name__}")
    txs = obj.get("transactions", [])
    if not isinstance(txs, list):
        raise IngestError("transactions must be a list")
    ommers_key = _pick(obj, "ommers", "uncles", required=False)
    ommers = obj[ommers_key] if ommers_key else []
    if not isinstance(ommers, list):
        raise IngestError("ommers must be a list of header hashes")
    hash_key = _pick(obj, "hash", required=False)
    return EthereumBlock(
        parent_hash=_hex(obj, _pick(obj, "parentHash"), 32),
        ommers_hash=_hex(obj, _pick(obj, "ommersHash", "sha3Uncles"), 32),
        beneficiary=_hex(obj, _pick(obj, "beneficiary", "miner"), 20),
        state_root=_hex(obj, _pick(obj, "stateRoot"), 32),
        transactions_root=_hex(obj, _pick(obj, "transactionsRoot"), 32),
        receipts_root=_hex(obj, _pick(obj, "receiptsRoot"), 32),
        logs_bloom=_hex(obj, _pick(obj, "logsBloom"), 256),
        difficulty=_quantity(obj, _pick(obj, "difficulty")),
        number=_quantity(obj, _pick(obj, "number")),
        gas_limit=_quantity(obj, _pick(obj, "gasLimit")),
        gas_used=_quantity(obj, _pick(obj, "gasUsed")),
        timestamp=_quantity(obj, _pick(obj, "timestamp")),
        extra_data=_data(obj, _pick(obj, "extraData")),
        mix_hash=_hex(obj, _pick(obj, "mixHash"), 32),
        nonce=_hex(obj, _pick(obj, "nonce"), 8),
        transactions=tuple(_parse_transaction(t) for t in txs),
        ommers=tuple(_hex({"ommer": h}, "ommer", 32) for h in ommers),
        hash=_hex(obj, hash_key, 32) if hash_key and obj[hash_key] is not None else None,
    )


def parse_eth_block(text: str) -> EthereumBlock:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise IngestError(f"invalid JSON: {exc}") from None
    return block_from_dict(obj)


def parse_eth_blocks(text: str) -> list[EthereumBlock]:
    """One block object, or an array of them."""
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise IngestError(f"invalid JSON: {exc}") from None
    if isinstance(obj, list):
        return [block_from_dict(item) for item in obj]
    return [block_from_dict(obj)]
