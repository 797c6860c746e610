"""Legacy (pre-segwit) Bitcoin block and transaction wire format."""

from __future__ import annotations

import hashlib
import struct
import warnings
from dataclasses import dataclass, field

import base58
from Crypto.Hash import RIPEMD160

MAX_MONEY = 21_000_000 * 100_000_000
COIN = 100_000_000
NULL_HASH = bytes(32)
COINBASE_INDEX = 0xFFFFFFFF


class DecodeError(ValueError):
    pass


class TruncatedInputError(DecodeError):
    pass


class MerkleMismatchError(DecodeError):
    pass


class TrailingDataError(DecodeError):
    pass


class NonCanonicalVarintWarning(UserWarning):
    pass


def double_sha256(data: bytes) -> bytes:
    return hashlib.sha256(hashlib.sha256(data).digest()).digest()


def display_hex(digest: bytes) -> str:
    """Byte-reversed lowercase hex, the explorer convention for hashes."""
    return digest[::-1].hex()


def satoshi_to_btc(amount: int) -> str:
    """Display-only conversion: 1 satoshi = 10^-8 BTC."""
    sign = "-" if amount < 0 else ""
    whole, frac = divmod(abs(amount), COIN)
    return f"{sign}{whole}.{frac:08d}"


# -- varint -----------------------------------------------------------------

def decode_varint(data: bytes, offset: int = 0) -> tuple[int, int]:
    if offset >= len(data):
        raise TruncatedInputError(f"varint at offset {offset}: no bytes left")
    prefix = data[offset]
    if prefix < 0xFD:
        return prefix, 1
    width = {0xFD: 2, 0xFE: 4, 0xFF: 8}[prefix]
    end = offset + 1 + width
    if end > len(data):
        raise TruncatedInputError(
            f"varint at offset {offset}: need {width} bytes after 0x{prefix:02x}, have {len(data) - offset - 1}"
        )
    value = int.from_bytes(data[offset + 1:end], "little")
    minimum = {2: 0xFD, 4: 0x10000, 8: 0x100000000}[width]
    if value < minimum:
        warnings.warn(
            f"non-canonical varint at offset {offset}: {value} encoded in {width + 1} bytes",
            NonCanonicalVarintWarning,
            stacklevel=2,
        )
    return value, width + 1


def encode_varint(value: int) -> bytes:
    if value < 0 or value > 0xFFFFFFFFFFFFFFFF:
        raise ValueError(f"varint out of range: {value}")
    if value < 0xFD:
        return bytes([value])
    if value <= 0xFFFF:
        return b"\xfd" + value.to_bytes(2, "little")
    if value <= 0xFFFFFFFF:
        return b"\xfe" + value.to_bytes(4, "little")
    return b"\xff" + value.to_bytes(8, "little")


# -- records ----------------------------------------------------------------

@dataclass(frozen=True)
class BitcoinBlockHeader:
    n_version: int
    hash_prev_block: bytes
    hash_merkle_root: bytes
    n_time: int
    n_bits: int
    n_nonce: int

    def serialize(self) -> bytes:
        return (
            struct.pack("<i", self.n_version)
            + self.hash_prev_block
            + self.hash_merkle_root
            + struct.pack("<III", self.n_time, self.n_bits, self.n_nonce)
        )

    @property
    def block_hash(self) -> bytes:
        return double_sha256(self.serialize())


@dataclass(frozen=True)
class BitcoinTxInput:
    source_hash: bytes
    source_index: int
    script_sig: bytes
    n_sequence: int

    @property
    def is_coinbase(self) -> bool:
        return self.source_hash == NULL_HASH and self.source_index == COINBASE_INDEX

    def serialize(self) -> bytes:
        return (
            self.source_hash
            + struct.pack("<I", self.source_index)
            + encode_varint(len(self.script_sig))
            + self.script_sig
            + struct.pack("<I", self.n_sequence)
        )


@dataclass(frozen=True)
class BitcoinTxOutput:
    n_value: int
    script_pubkey: bytes

    def __post_init__(self):
        if not 0 <= self.n_value <= MAX_MONEY:
            raise DecodeError(f"output value {self.n_value} outside [0, {MAX_MONEY}]")

    def serialize(self) -> bytes:
        return struct.pack("<q", self.n_value) + encode_varint(len(self.script_pubkey)) + self.script_pubkey


@dataclass(frozen=True)
class BitcoinTransaction:
    n_version: int
    inputs: tuple[BitcoinTxInput, ...]
    outputs: tuple[BitcoinTxOutput, ...]
    n_lock_time: int
    txid: bytes = field(init=False)

    def __post_init__(self):
        if not self.inputs:
            raise DecodeError("transaction has no inputs")
        if not self.outputs:
            raise DecodeError("transaction has no outputs")
        object.__setattr__(self, "txid", double_sha256(self.serialize()))

    @property
    def txid_hex(self) -> str:
        return display_hex(self.txid)

    @property
    def is_coinbase(self) -> bool:
        return len(self.inputs) == 1 and self.inputs[0].is_coinbase

    def serialize(self) -> bytes:
        parts = [struct.pack("<i", self.n_version), encode_varint(len(self.inputs))]
        parts += [i.serialize() for i in self.inputs]
        parts.append(encode_varint(len(self.outputs)))
        parts += [o.serialize() for o in self.outputs]
        parts.append(struct.pack("<I", self.n_lock_time))
        return b"".join(parts)


@dataclass(frozen=True)
class BitcoinBlock:
    header: BitcoinBlockHeader
    transactions: tuple[BitcoinTransaction, ...]
    height: int
    block_hash: bytes = field(init=False)

    def __post_init__(self):
        if self.height < 0:
            raise ValueError("height must be non-negative")
        object.__setattr__(self, "block_hash", self.header.block_hash)

    @property
    def block_hash_hex(self) -> str:
        return display_hex(self.block_hash)

    def serialize(self) -> bytes:
        parts = [self.header.serialize(), encode_varint(len(self.transactions))]
        parts += [tx.serialize() for tx in self.transactions]
        return b"".join(parts)


# -- decoding ---------------------------------------------------------------

class _Reader:
    def __init__(self, data: bytes, offset: int = 0):
        self.data = data
        self.offset = offset

    def take(self, n: int, what: str) -> bytes:
        end = self.offset + n
        if end > len(self.data):
            raise TruncatedInputError(
                f"{what} at offset {self.offset}: need {n} bytes, have {len(self.data) - self.offset}"
            )
        chunk = self.data[self.offset:end]
        self.offset = end
        return chunk

    def unpack(self, fmt: str, what: str) -> int:
        return struct.unpack(fmt, self.take(struct.calcsize(fmt), what))[0]

    def varint(self, what: str) -> int:
        try:
            value, used = decode_varint(self.data, self.offset)
        except TruncatedInputError as exc:
            raise TruncatedInputError(f"{what}: {exc}") from None
        self.offset += used
        return value


def _read_header(r: _Reader) -> BitcoinBlockHeader:
    return BitcoinBlockHeader(
        n_version=r.unpack("<i", "nVersion"),
        hash_prev_block=r.take(32, "hashPrevBlock"),
        hash_merkle_root=r.take(32, "hashMerkleRoot"),
        n_time=r.unpack("<I", "nTime"),
        n_bits=r.unpack("<I", "nBits"),
        n_nonce=r.unpack("<I", "nNonce"),
    )


def _read_transaction(r: _Reader) -> BitcoinTransaction:
    version = r.unpack("<i", "tx nVersion")
    n_in = r.varint("#vin")
    if n_in == 0:
        raise DecodeError(
            f"transaction at offset {r.offset}: zero inputs (segwit serialization is not supported)"
        )
    inputs = []
    for _ in range(n_in):
        source_hash = r.take(32, "vin hash")
        source_index = r.unpack("<I", "vin n")
        script_sig = r.take(r.varint("scriptSigLen"), "scriptSig")
        sequence = r.unpack("<I", "nSequence")
        inputs.append(BitcoinTxInput(source_hash, source_index, script_sig, sequence))
    n_out = r.varint("#vout")
    outputs = []
    for _ in range(n_out):
        value = r.unpack("<q", "nValue")
        script = r.take(r.varint("scriptPubkeyLen"), "scriptPubkey")
        outputs.append(BitcoinTxOutput(value, script))
    lock_time = r.unpack("<I", "nLockTime")
    return BitcoinTransaction(version, tuple(inputs), tuple(outputs), lock_time)


def decode_transaction(raw: bytes) -> BitcoinTransaction:
    r = _Reader(bytes(raw))
    tx = _read_transaction(r)
    if r.offset != len(r.data):
        raise TrailingDataError(f"{len(r.data) - r.offset} trailing bytes after transaction")
    return tx


def decode_block(raw: bytes, height: int) -> BitcoinBlock:
    r = _Reader(bytes(raw))
    header = _read_header(r)
    count = r.varint("#vtx")
    transactions = tuple(_read_transaction(r) for _ in range(count))
    if r.offset != len(r.data):
        raise TrailingDataError(f"{len(r.data) - r.offset} trailing bytes after block")
    if not transactions:
        raise DecodeError("block has no transactions")
    root = merkle_root([tx.txid for tx in transactions])
    if root != header.hash_merkle_root:
        raise MerkleMismatchError(
            f"merkle root {display_hex(root)} does not match header {display_hex(header.hash_merkle_root)}"
        )
    return BitcoinBlock(header, transactions, height)


def merkle_root(txids: list[bytes]) -> bytes:
    if not txids:
        raise ValueError("merkle root of an empty list is undefined")
    level = list(txids)
    while len(level) > 1:
        if len(level) % 2:
            level.append(level[-1])
        level = [double_sha256(level[i] + level[i + 1]) for i in range(0, len(level), 2)]
    return level[0]


def read_raw(payload: bytes) -> bytes:
    """Accept either raw binary or hex text (whitespace tolerated)."""
    try:
        text = payload.decode("ascii")
    except UnicodeDecodeError:
        return payload
    compact = "".join(text.split())
    if compact and len(compact) % 2 == 0 and all(c in "0123456789abcdefABCDEF" for c in compact):
        return bytes.fromhex(compact)
    return payload


# -- standard output scripts -------------------------------------------------

def _hash160(data: bytes) -> bytes:
    # hashlib's ripemd160 depends on the OpenSSL build, so use pycryptodome
    return RIPEMD160.new(hashlib.sha256(data).digest()).digest()


def script_address(script: bytes, version_byte: int = 0x00) -> str | None:
    """Base58check address for pay-to-pubkey and pay-to-pubkey-hash scripts.

    Returns None for any other script shape.
    """
    if len(script) in (35, 67) and script[0] == len(script) - 2 and script[-1] == 0xAC:
        pubkey = script[1:-1]
        if (len(pubkey) == 33 and pubkey[0] in (2, 3)) or (len(pubkey) == 65 and pubkey[0] == 4):
            return base58.b58encode_check(bytes([version_byte]) + _hash160(pubkey)).decode()
        return None
    if len(script) == 25 and script[:3] == b"\x76\xa9\x14" and script[23:] == b"\x88\xac":
        return base58.b58encode_check(bytes([version_byte]) + script[3:23]).decode()
    return None
