"""Shared test helpers: fixture paths and synthetic data generators."""

from __future__ import annotations

import hashlib
import random
from pathlib import Path

from blondie.bitcoin import (
    COINBASE_INDEX,
    NULL_HASH,
    BitcoinBlock,
    BitcoinBlockHeader,
    BitcoinTransaction,
    BitcoinTxInput,
    BitcoinTxOutput,
)

FIXTURES = Path(__file__).parent / "fixtures"


def fixture(name: str) -> Path:
    return FIXTURES / name


def raw_fixture(name: str) -> bytes:
    return bytes.fromhex(fixture(name).read_text().strip())


def sha256d(data: bytes) -> bytes:
    return hashlib.sha256(hashlib.sha256(data).digest()).digest()


def oracle_merkle(leaves: list[bytes]) -> bytes:
    """Textbook merkle root: pair up, duplicating the last node on odd levels."""
    level = list(leaves)
    while len(level) > 1:
        if len(level) % 2:
            level.append(level[-1])
        level = [sha256d(level[i] + level[i + 1]) for i in range(0, len(level), 2)]
    return level[0]


def p2pkh_script(h160: bytes) -> bytes:
    return b"\x76\xa9\x14" + h160 + b"\x88\xac"


def synthetic_chain(n_blocks: int, seed: int = 7, max_extra_txs: int = 0) -> list[BitcoinBlock]:
    """A linked chain of structurally valid legacy blocks (no proof of work)."""
    rng = random.Random(seed)
    blocks = []
    prev = NULL_HASH
    for height in range(n_blocks):
        coinbase = BitcoinTransaction(
            1,
            (BitcoinTxInput(NULL_HASH, COINBASE_INDEX, height.to_bytes(4, "little") + b"\x01", 0xFFFFFFFF),),
            (BitcoinTxOutput(50 * 10**8, p2pkh_script(rng.randbytes(20))),),
            0,
        )
        txs = [coinbase]
        for _ in range(rng.randint(0, max_extra_txs)):
            spend = BitcoinTxInput(rng.randbytes(32), rng.randint(0, 3), rng.randbytes(rng.randint(1, 80)), 0xFFFFFFFF)
            outs = tuple(
                BitcoinTxOutput(rng.randint(0, 10**10), p2pkh_script(rng.randbytes(20)))
                for _ in range(rng.randint(1, 3))
            )
            txs.append(BitcoinTransaction(1, (spend,), outs, 0))
        header = BitcoinBlockHeader(
            1, prev, oracle_merkle([t.txid for t in txs]),
            1231006505 + 600 * height, 0x1D00FFFF, rng.getrandbits(32),
        )
        block = BitcoinBlock(header, tuple(txs), height)
        blocks.append(block)
        prev = block.block_hash
    return blocks


def _hex(rng: random.Random, n_bytes: int) -> str:
    return "0x" + rng.randbytes(n_bytes).hex()


def random_eth_tx(rng: random.Random, i: int, zero_to_rate: float = 0.3) -> dict:
    r = rng.random()
    if r < zero_to_rate / 2:
        to = None
    elif r < zero_to_rate:
        to = "0x" + "00" * 20
    else:
        to = _hex(rng, 20)
    return {
        "hash": _hex(rng, 32),
        "nonce": hex(i),
        "gasPrice": hex(rng.randint(1, 10**11)),
        "gas": hex(rng.randint(21000, 10**6)),
        "to": to,
        "value": hex(rng.randint(0, 10**20)),
        "input": _hex(rng, rng.randint(0, 40)),
        "from": _hex(rng, 20),
        "v": hex(rng.choice((27, 28))),
        "r": _hex(rng, 32),
        "s": _hex(rng, 32),
    }


def random_eth_block(rng: random.Random, number: int, n_txs: int | None = None) -> dict:
    n_txs = rng.randint(0, 4) if n_txs is None else n_txs
    gas_limit = rng.randint(5000, 10**7)
    return {
        "number": hex(number),
        "hash": _hex(rng, 32),
        "parentHash": "0x" + "00" * 32 if number == 0 else _hex(rng, 32),
        "sha3Uncles": _hex(rng, 32),
        "miner": _hex(rng, 20),
        "stateRoot": _hex(rng, 32),
        "transactionsRoot": _hex(rng, 32),
        "receiptsRoot": _hex(rng, 32),
        "logsBloom": _hex(rng, 256),
        "difficulty": hex(rng.randint(1, 10**15)),
        "gasLimit": hex(gas_limit),
        "gasUsed": hex(rng.randint(0, gas_limit)),
        "timestamp": hex(1438269988 + number * 15),
        "extraData": _hex(rng, rng.randint(0, 32)),
        "mixHash": _hex(rng, 32),
        "nonce": _hex(rng, 8),
        "transactions": [random_eth_tx(rng, i) for i in range(n_txs)],
        "uncles": [],
    }
