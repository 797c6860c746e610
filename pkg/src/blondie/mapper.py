"""Turn decoded chain records into BLONDiE instance graphs.

Instance IRIs follow ``urn:blondie:<chain>:<kind>:<key>``. Values stay in
native units (satoshi, wei); nothing here converts currencies.
"""

from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass, field
from urllib.parse import quote

from .bitcoin import BitcoinBlock, BitcoinTransaction, display_hex, script_address
from .ethereum import ZERO_ADDRESS, EthereumBlock, EthereumTransaction
from .fabric import FabricBlock, FabricTransaction
from .rdf import RDF_TYPE, Graph, Iri, Literal, Triple
from .vocabulary import term

CHAIN_TAGS = ("btc", "eth", "fab")
KINDS = ("block", "tx", "account", "channel", "chaincode", "chain")

CONFIRMED = "confirmed"
UNCONFIRMED = "unconfirmed"

_TYPE = Iri(RDF_TYPE)
_KEY_SAFE = re.compile(r"[^A-Za-z0-9._~:@!$&'*+,;=\-]")


def instance_iri(chain: str, kind: str, key: str, *, preserve_case: bool = False) -> Iri:
    if chain not in CHAIN_TAGS:
        raise ValueError(f"unknown chain tag {chain!r}")
    if kind not in KINDS:
        raise ValueError(f"unknown IRI kind {kind!r}")
    if not key:
        raise ValueError("empty IRI key")
    if not preserve_case:
        key = key.lower()
    key = quote(key, safe="._~:@!$&'*+,;=-")
    return Iri(f"urn:blondie:{chain}:{kind}:{key}")


def _strip0x(text: str) -> str:
    return text[2:] if text.startswith("0x") else text


@dataclass
class MappingReport:
    triples_emitted: int = 0
    subjects_by_class: dict[str, int] = field(default_factory=dict)
    warnings: list[str] = field(default_factory=list)

    def summary(self) -> str:
        lines = [f"triples: {self.triples_emitted}"]
        for cls, n in sorted(self.subjects_by_class.items()):
            lines.append(f"  {cls}: {n}")
        lines += [f"warning: {w}" for w in self.warnings]
        return "\n".join(lines)


class _Builder:
    def __init__(self):
        self.triples: set[Triple] = set()
        self.warnings: list[str] = []

    def type(self, subject: Iri, cls: str):
        self.triples.add(Triple(subject, _TYPE, term(cls)))

    def link(self, subject: Iri, prop: str, obj: Iri):
        self.triples.add(Triple(subject, term(prop), obj))

    def num(self, subject: Iri, prop: str, value: int):
        self.triples.add(Triple(subject, term(prop), Literal.decimal(value)))

    def text(self, subject: Iri, prop: str, value: str):
        self.triples.add(Triple(subject, term(prop), Literal(value)))

    def graph(self) -> Graph:
        return Graph(self.triples)


def _report(graph: Graph, warnings: list[str]) -> MappingReport:
    counts: Counter[str] = Counter()
    for t in graph.match(predicate=_TYPE):
        counts[t.object.value.rsplit("#", 1)[-1]] += 1
    return MappingReport(len(graph), dict(counts), list(warnings))


# -- bitcoin ----------------------------------------------------------------

def _btc_tx(b: _Builder, tx: BitcoinTransaction, status: str) -> Iri:
    txid = tx.txid_hex
    tx_iri = instance_iri("btc", "tx", txid)
    b.type(tx_iri, "BitcoinTransaction")
    b.text(tx_iri, "txId", txid)
    b.num(tx_iri, "btcTxVersion", tx.n_version)
    b.num(tx_iri, "inputCounter", len(tx.inputs))
    b.num(tx_iri, "outputCounter", len(tx.outputs))
    b.num(tx_iri, "nLockTime", tx.n_lock_time)
    b.text(tx_iri, "confirmationStatus", status)
    for i, vin in enumerate(tx.inputs):
        in_iri = instance_iri("btc", "tx", f"{txid}:in:{i}")
        b.type(in_iri, "TransactionInput")
        b.link(tx_iri, "hasInput", in_iri)
        b.text(in_iri, "prevTxHash", display_hex(vin.source_hash))
        b.num(in_iri, "prevTxOutputIndex", vin.source_index)
        b.num(in_iri, "scriptSigLength", len(vin.script_sig))
        b.text(in_iri, "scriptSig", vin.script_sig.hex())
        b.num(in_iri, "nSequence", vin.n_sequence)
    for i, vout in enumerate(tx.outputs):
        out_iri = instance_iri("btc", "tx", f"{txid}:out:{i}")
        b.type(out_iri, "TransactionOutput")
        b.link(tx_iri, "hasOutput", out_iri)
        b.num(out_iri, "nValue", vout.n_value)
        b.num(out_iri, "scriptPubkeyLength", len(vout.script_pubkey))
        b.text(out_iri, "scriptPubkey", vout.script_pubkey.hex())
    return tx_iri


def bitcoin_miner_address(block: BitcoinBlock) -> str | None:
    """Address paid by the coinbase's first standard output, if any."""
    coinbase = block.transactions[0]
    if not coinbase.is_coinbase:
        return None
    for out in coinbase.outputs:
        address = script_address(out.script_pubkey)
        if address is not None:
            return address
    return None


def _map_bitcoin(block: BitcoinBlock) -> tuple[Graph, list[str]]:
    b = _Builder()
    h = block.header
    block_hex = block.block_hash_hex
    iri = instance_iri("btc", "block", block_hex)
    b.type(iri, "BitcoinBlock")
    b.num(iri, "btcBlockVersion", h.n_version)
    b.text(iri, "hashPrevBlock", display_hex(h.hash_prev_block))
    b.text(iri, "hashMerkleRoot", display_hex(h.hash_merkle_root))
    b.num(iri, "nTime", h.n_time)
    b.num(iri, "nBits", h.n_bits)
    b.num(iri, "nNonce", h.n_nonce)
    b.num(iri, "transactionCounter", len(block.transactions))
    b.num(iri, "height", block.height)
    b.text(iri, "blockHash", block_hex)
    b.num(iri, "totalTransactions", len(block.transactions))
    b.num(iri, "totalValueTransferred", sum(o.n_value for tx in block.transactions for o in tx.outputs))

    chain = instance_iri("btc", "chain", "bitcoin")
    b.type(chain, "Blockchain")
    b.link(iri, "partOfChain", chain)
    if any(h.hash_prev_block):
        parent = instance_iri("btc", "block", display_hex(h.hash_prev_block))
        b.type(parent, "BitcoinBlock")
        b.link(iri, "hasParentBlock", parent)

    for tx in block.transactions:
        b.link(iri, "hasTransaction", _btc_tx(b, tx, CONFIRMED))

    address = bitcoin_miner_address(block)
    if address is None:
        b.warnings.append(f"block {block_hex}: coinbase pays no standard script; minedBy omitted")
    else:
        # base58 is case-sensitive, so the key keeps its case
        miner = instance_iri("btc", "account", address, preserve_case=True)
        b.type(miner, "BitcoinAccount")
        b.type(miner, "Miner")
        b.link(iri, "minedBy", miner)
    return b.graph(), b.warnings


def map_bitcoin_block(block: BitcoinBlock) -> Graph:
    return _map_bitcoin(block)[0]


def map_mempool_transaction(tx: BitcoinTransaction) -> Graph:
    b = _Builder()
    _btc_tx(b, tx, UNCONFIRMED)
    return b.graph()


# -- ethereum ---------------------------------------------------------------

def _eth_account(b: _Builder, address: str, *classes: str) -> Iri:
    iri = instance_iri("eth", "account", _strip0x(address))
    for cls in classes:
        b.type(iri, cls)
    return iri


def _eth_tx(b: _Builder, block: EthereumBlock, index: int, tx: EthereumTransaction) -> Iri:
    key = _strip0x(tx.hash) if tx.hash else f"{block.number}.{index}"
    iri = instance_iri("eth", "tx", key)
    if tx.is_contract_creation:
        b.type(iri, "EthereumContractCreation")
        b.text(iri, "init", tx.kind.init.hex())
    else:
        b.type(iri, "EthereumMessageCall")
        b.text(iri, "data", tx.kind.data.hex())
    if tx.hash:
        b.text(iri, "txId", tx.hash)
    b.num(iri, "txNonce", tx.nonce)
    b.num(iri, "gasPrice", tx.gas_price)
    b.num(iri, "txGasLimit", tx.gas_limit)
    b.text(iri, "toAddress", tx.to)
    b.num(iri, "value", tx.value)
    b.text(iri, "v", tx.v)
    b.text(iri, "r", tx.r)
    b.text(iri, "s", tx.s)
    b.text(iri, "confirmationStatus", CONFIRMED)
    if tx.to != ZERO_ADDRESS:
        b.link(iri, "toAccount", _eth_account(b, tx.to, "EthereumAccount"))
    if tx.sender:
        b.link(iri, "fromAccount", _eth_account(b, tx.sender, "EthereumAccount", "ExternalOwnedAccount"))
    return iri


def _map_ethereum(block: EthereumBlock) -> tuple[Graph, list[str]]:
    b = _Builder()
    key = _strip0x(block.hash) if block.hash else str(block.number)
    iri = instance_iri("eth", "block", key)
    b.type(iri, "EthereumBlock")
    for prop, value in (
        ("parentHash", block.parent_hash),
        ("ommersHash", block.ommers_hash),
        ("beneficiary", block.beneficiary),
        ("stateRoot", block.state_root),
        ("transactionsRoot", block.transactions_root),
        ("receiptsRoot", block.receipts_root),
        ("logsBloom", block.logs_bloom),
        ("extraData", "0x" + block.extra_data.hex()),
        ("mixHash", block.mix_hash),
        ("nonce", block.nonce),
    ):
        b.text(iri, prop, value)
    for prop, value in (
        ("difficulty", block.difficulty),
        ("number", block.number),
        ("gasLimit", block.gas_limit),
        ("gasUsed", block.gas_used),
        ("timestamp", block.timestamp),
        ("height", block.number),
        ("totalTransactions", len(block.transactions)),
        ("totalValueTransferred", sum(tx.value for tx in block.transactions)),
    ):
        b.num(iri, prop, value)
    if block.hash:
        b.text(iri, "blockHash", block.hash)

    chain = instance_iri("eth", "chain", "ethereum")
    b.type(chain, "Blockchain")
    b.link(iri, "partOfChain", chain)
    if block.number > 0:
        parent = instance_iri("eth", "block", _strip0x(block.parent_hash))
        b.type(parent, "EthereumBlock")
        b.link(iri, "hasParentBlock", parent)
    b.link(iri, "minedBy", _eth_account(b, block.beneficiary, "EthereumAccount", "Miner"))
    for ommer in block.ommers:
        ommer_iri = instance_iri("eth", "block", _strip0x(ommer))
        b.type(ommer_iri, "OmmerHeader")
        b.link(iri, "hasOmmer", ommer_iri)
    for i, tx in enumerate(block.transactions):
        b.link(iri, "hasTransaction", _eth_tx(b, block, i, tx))
    return b.graph(), b.warnings


def map_ethereum_block(block: EthereumBlock) -> Graph:
    return _map_ethereum(block)[0]


# -- fabric -----------------------------------------------------------------

def _fab_tx(b: _Builder, tx: FabricTransaction) -> Iri:
    iri = instance_iri("fab", "tx", tx.txId)
    b.type(iri, "HyperledgerTransaction")
    b.text(iri, "txId", tx.txId)
    b.text(iri, "fabricTxId", tx.txId)
    b.text(iri, "txType", tx.type)
    b.num(iri, "txVersion", tx.version)
    b.text(iri, "txTimestamp", tx.timestamp)
    b.num(iri, "epoch", tx.epoch)
    b.text(iri, "payloadVisibility", tx.payloadVisibility)
    b.text(iri, "confirmationStatus", CONFIRMED)

    channel = instance_iri("fab", "channel", tx.channelId)
    b.type(channel, "Channel")
    b.text(channel, "channelId", tx.channelId)
    b.link(iri, "belongsToChannel", channel)

    chaincode = instance_iri("fab", "chaincode", f"{tx.chaincodeName}@{tx.chaincodeVersion}")
    b.type(chaincode, "Chaincode")
    b.text(chaincode, "chaincodeName", tx.chaincodeName)
    b.text(chaincode, "chaincodeVersion", tx.chaincodeVersion)
    b.text(chaincode, "chaincodePath", tx.chaincodePath)
    b.link(iri, "invokesChaincode", chaincode)
    return iri


def _map_fabric(block: FabricBlock) -> tuple[Graph, list[str]]:
    b = _Builder()
    iri = instance_iri("fab", "block", block.currentBlockHash or str(block.number))
    b.type(iri, "HyperledgerBlock")
    b.num(iri, "blockNumber", block.number)
    b.num(iri, "height", block.number)
    b.text(iri, "currentBlockHash", block.currentBlockHash)
    b.text(iri, "blockHash", block.currentBlockHash)
    b.text(iri, "previousHash", block.previousHash)
    b.text(iri, "dataHash", block.dataHash)
    b.num(iri, "totalTransactions", len(block.transactions))
    # no native currency on Fabric
    b.num(iri, "totalValueTransferred", 0)

    chain = instance_iri("fab", "chain", "fabric")
    b.type(chain, "Blockchain")
    b.link(iri, "partOfChain", chain)
    if block.number > 0 and block.previousHash:
        parent = instance_iri("fab", "block", block.previousHash)
        b.type(parent, "HyperledgerBlock")
        b.link(iri, "hasParentBlock", parent)
    for tx in block.transactions:
        b.link(iri, "hasTransaction", _fab_tx(b, tx))
    return b.graph(), b.warnings


def map_fabric_block(block: FabricBlock) -> Graph:
    return _map_fabric(block)[0]


# -- dispatch ---------------------------------------------------------------

def map_record(record) -> tuple[Graph, MappingReport]:
    """Map any decoded record, returning the graph and its report."""
    if isinstance(record, BitcoinBlock):
        graph, warnings = _map_bitcoin(record)
    elif isinstance(record, BitcoinTransaction):
        graph, warnings = map_mempool_transaction(record), []
    elif isinstance(record, EthereumBlock):
        graph, warnings = _map_ethereum(record)
    elif isinstance(record, FabricBlock):
        graph, warnings = _map_fabric(record)
    else:
        raise TypeError(f"cannot map {type(record).__name__}")
    return graph, _report(graph, warnings)


def map_records(records) -> tuple[Graph, MappingReport]:
    graphs, warnings = [], []
    for record in records:
        g, rep = map_record(record)
        graphs.append(g)
        warnings += rep.warnings
    graph = Graph().union(*graphs)
    return graph, _report(graph, warnings)
