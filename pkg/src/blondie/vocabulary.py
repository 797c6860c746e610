"""The BLONDiE term set: classes, object/data properties and disjointness axioms."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations

from .rdf import (
    DECIMAL,
    OWL,
    RDF,
    RDF_TYPE,
    RDFS,
    STRING,
    XSD,
    XSD_DECIMAL,
    XSD_STRING,
    Graph,
    Iri,
    Literal,
    Triple,
    serialize_turtle,
)

BLONDIE = "https://w3id.org/blondie#"
ONTOLOGY_IRI = "https://w3id.org/blondie"


class UnknownClassError(KeyError):
    pass


def term(local: str) -> Iri:
    return Iri(BLONDIE + local)


@dataclass(frozen=True)
class ClassTerm:
    iri: Iri
    label: str
    parent: Iri | None = None


@dataclass(frozen=True)
class ObjectPropertyTerm:
    iri: Iri
    domain: Iri
    range: Iri
    sources: tuple[str, ...] = ()


@dataclass(frozen=True)
class DataPropertyTerm:
    iri: Iri
    domain: Iri
    datatype: str
    sources: tuple[str, ...] = ()

    def __post_init__(self):
        if self.datatype not in (DECIMAL, STRING):
            raise ValueError(f"data property datatype must be decimal or string, got {self.datatype!r}")


@dataclass(frozen=True)
class DisjointnessAxiom:
    left: Iri
    right: Iri

    def __post_init__(self):
        if self.left == self.right:
            raise ValueError("a class cannot be disjoint with itself")
        # normalise so that {a, b} and {b, a} compare equal
        if self.right < self.left:
            left, right = self.right, self.left
            object.__setattr__(self, "left", left)
            object.__setattr__(self, "right", right)

    def covers(self, a: Iri, b: Iri) -> bool:
        return {a, b} == {self.left, self.right}


@dataclass(frozen=True)
class Vocabulary:
    classes: frozenset[ClassTerm]
    object_properties: frozenset[ObjectPropertyTerm]
    data_properties: frozenset[DataPropertyTerm]
    disjointness: frozenset[DisjointnessAxiom]
    base_namespace: Iri = Iri(BLONDIE)

    def __post_init__(self):
        by_iri = {c.iri: c for c in self.classes}
        if len(by_iri) != len(self.classes):
            raise ValueError("duplicate class IRIs")
        object.__setattr__(self, "_class_index", by_iri)
        props = {p.iri: p for p in self.object_properties} | {p.iri: p for p in self.data_properties}
        if len(props) != len(self.object_properties) + len(self.data_properties):
            raise ValueError("duplicate property IRIs")
        object.__setattr__(self, "_property_index", props)
        for c in self.classes:
            self._check_acyclic(c)
        for p in self.object_properties:
            for ref in (p.domain, p.range):
                if ref not in by_iri:
                    raise ValueError(f"{p.iri} refers to undeclared class {ref}")
        for p in self.data_properties:
            if p.domain not in by_iri:
                raise ValueError(f"{p.iri} refers to undeclared class {p.domain}")
        for ax in self.disjointness:
            for ref in (ax.left, ax.right):
                if ref not in by_iri:
                    raise ValueError(f"disjointness axiom refers to undeclared class {ref}")

    def _check_acyclic(self, cls: ClassTerm):
        seen = {cls.iri}
        parent = cls.parent
        while parent is not None:
            if parent in seen:
                raise ValueError(f"class hierarchy cycle through {parent}")
            if parent not in self._class_index:
                raise ValueError(f"{cls.iri} has undeclared parent {parent}")
            seen.add(parent)
            parent = self._class_index[parent].parent

    def get_class(self, iri: Iri) -> ClassTerm:
        try:
            return self._class_index[iri]
        except KeyError:
            raise UnknownClassError(f"undeclared class {iri}") from None

    def has_class(self, iri: Iri) -> bool:
        return iri in self._class_index

    def get_property(self, iri: Iri) -> ObjectPropertyTerm | DataPropertyTerm | None:
        return self._property_index.get(iri)

    def ancestors(self, iri: Iri) -> list[Iri]:
        """The class itself followed by its superclasses up to the root."""
        chain = []
        cls: ClassTerm | None = self.get_class(iri)
        while cls is not None:
            chain.append(cls.iri)
            cls = self._class_index[cls.parent] if cls.parent is not None else None
        return chain

    def stats(self) -> dict[str, int]:
        return {
            "classes": len(self.classes),
            "object-properties": len(self.object_properties),
            "data-properties": len(self.data_properties),
        }


def is_subclass_of(voc: Vocabulary, sub: Iri, sup: Iri) -> bool:
    voc.get_class(sup)
    return sup in voc.ancestors(sub)


def are_disjoint(voc: Vocabulary, a: Iri, b: Iri) -> bool:
    chain_a = voc.ancestors(a)
    chain_b = voc.ancestors(b)
    return any(
        ax.covers(x, y) for ax in voc.disjointness for x in chain_a for y in chain_b
    )


# -- the shipped term set ---------------------------------------------------

_CLASSES = [
    ("Blockchain", None),
    ("Block", None),
    ("BitcoinBlock", "Block"),
    ("EthereumBlock", "Block"),
    ("HyperledgerBlock", "Block"),
    ("Transaction", None),
    ("BitcoinTransaction", "Transaction"),
    ("EthereumTransaction", "Transaction"),
    ("HyperledgerTransaction", "Transaction"),
    ("EthereumContractCreation", "EthereumTransaction"),
    ("EthereumMessageCall", "EthereumTransaction"),
    ("TransactionInput", None),
    ("TransactionOutput", None),
    ("Account", None),
    ("BitcoinAccount", "Account"),
    ("EthereumAccount", "Account"),
    ("HyperledgerAccount", "Account"),
    ("ExternalOwnedAccount", "EthereumAccount"),
    ("ContractAccount", "EthereumAccount"),
    ("Miner", "Account"),
    ("OmmerHeader", None),
    ("Channel", None),
    ("Chaincode", None),
]

# name, domain, range, native fields it carries
_OBJECT_PROPERTIES = [
    ("hasTransaction", "Block", "Transaction", ("bitcoin-block:vtx", "ethereum-block:transactions")),
    ("hasParentBlock", "Block", "Block", ()),
    ("partOfChain", "Block", "Blockchain", ()),
    ("minedBy", "Block", "Account", ()),
    ("hasInput", "BitcoinTransaction", "TransactionInput", ("bitcoin-transaction:vin",)),
    ("hasOutput", "BitcoinTransaction", "TransactionOutput", ("bitcoin-transaction:vout",)),
    ("fromAccount", "Transaction", "Account", ()),
    ("toAccount", "Transaction", "Account", ()),
    ("hasOmmer", "EthereumBlock", "OmmerHeader", ("ethereum-block:ommersblockheaders",)),
    ("belongsToChannel", "HyperledgerTransaction", "Channel", ()),
    ("invokesChaincode", "HyperledgerTransaction", "Chaincode", ()),
]

D, S = DECIMAL, STRING

# name, domain, datatype, native field (None for derived properties)
_DATA_PROPERTIES = [
    # bitcoin block header
    ("btcBlockVersion", "BitcoinBlock", D, "bitcoin-block:nVersion"),
    ("hashPrevBlock", "BitcoinBlock", S, "bitcoin-block:HashPrevBlock"),
    ("hashMerkleRoot", "BitcoinBlock", S, "bitcoin-block:HashMerkleRoot"),
    ("nTime", "BitcoinBlock", D, "bitcoin-block:nTime"),
    ("nBits", "BitcoinBlock", D, "bitcoin-block:nBits"),
    ("nNonce", "BitcoinBlock", D, "bitcoin-block:nNonce"),
    ("transactionCounter", "BitcoinBlock", D, "bitcoin-block:#vtx"),
    # bitcoin transaction
    ("btcTxVersion", "BitcoinTransaction", D, "bitcoin-transaction:nVersion"),
    ("inputCounter", "BitcoinTransaction", D, "bitcoin-transaction:#vin"),
    ("prevTxHash", "TransactionInput", S, "bitcoin-transaction:vin.hash"),
    ("prevTxOutputIndex", "TransactionInput", D, "bitcoin-transaction:vin.n"),
    ("scriptSigLength", "TransactionInput", D, "bitcoin-transaction:vin.scriptSigLen"),
    ("scriptSig", "TransactionInput", S, "bitcoin-transaction:vin.scriptSig"),
    ("nSequence", "TransactionInput", D, "bitcoin-transaction:vin.nSequence"),
    ("outputCounter", "BitcoinTransaction", D, "bitcoin-transaction:#vout"),
    ("nValue", "TransactionOutput", D, "bitcoin-transaction:vout.nvalue"),
    ("scriptPubkeyLength", "TransactionOutput", D, "bitcoin-transaction:vout.scriptPubkeyLen"),
    ("scriptPubkey", "TransactionOutput", S, "bitcoin-transaction:vout.scriptPubkey"),
    ("nLockTime", "BitcoinTransaction", D, "bitcoin-transaction:nLockTime"),
    # ethereum block
    ("parentHash", "EthereumBlock", S, "ethereum-block:parentHash"),
    ("ommersHash", "EthereumBlock", S, "ethereum-block:ommersHash"),
    ("beneficiary", "EthereumBlock", S, "ethereum-block:beneficiary"),
    ("stateRoot", "EthereumBlock", S, "ethereum-block:stateRoot"),
    ("transactionsRoot", "EthereumBlock", S, "ethereum-block:transactionsRoot"),
    ("receiptsRoot", "EthereumBlock", S, "ethereum-block:receiptsRoot"),
    ("logsBloom", "EthereumBlock", S, "ethereum-block:logsBloom"),
    ("difficulty", "EthereumBlock", D, "ethereum-block:difficulty"),
    ("number", "EthereumBlock", D, "ethereum-block:number"),
    ("gasLimit", "EthereumBlock", D, "ethereum-block:gasLimit"),
    ("gasUsed", "EthereumBlock", D, "ethereum-block:gasUsed"),
    ("timestamp", "EthereumBlock", D, "ethereum-block:timestamp"),
    ("extraData", "EthereumBlock", S, "ethereum-block:extraData"),
    ("mixHash", "EthereumBlock", S, "ethereum-block:mixHash"),
    ("nonce", "EthereumBlock", S, "ethereum-block:nonce"),
    # ethereum transaction
    ("txNonce", "EthereumTransaction", D, "ethereum-transaction:once"),
    ("gasPrice", "EthereumTransaction", D, "ethereum-transaction:gasPrice"),
    ("txGasLimit", "EthereumTransaction", D, "ethereum-transaction:gasLimit"),
    ("toAddress", "EthereumTransaction", S, "ethereum-transaction:to"),
    ("value", "EthereumTransaction", D, "ethereum-transaction:value"),
    ("v", "EthereumTransaction", S, "ethereum-transaction:v"),
    ("r", "EthereumTransaction", S, "ethereum-transaction:r"),
    ("s", "EthereumTransaction", S, "ethereum-transaction:s"),
    ("init", "EthereumContractCreation", S, "ethereum-contract-creation:init"),
    ("data", "EthereumMessageCall", S, "ethereum-message-call:data"),
    # fabric block
    ("blockNumber", "HyperledgerBlock", D, "fabric-block:number"),
    ("currentBlockHash", "HyperledgerBlock", S, "fabric-block:currentBlockHash"),
    ("previousHash", "HyperledgerBlock", S, "fabric-block:previousHash"),
    ("dataHash", "HyperledgerBlock", S, "fabric-block:dataHash"),
    # fabric transaction
    ("txType", "HyperledgerTransaction", S, "fabric-transaction:type"),
    ("txVersion", "HyperledgerTransaction", D, "fabric-transaction:version"),
    ("txTimestamp", "HyperledgerTransaction", S, "fabric-transaction:timestamp"),
    ("channelId", "Channel", S, "fabric-transaction:channelId"),
    ("fabricTxId", "HyperledgerTransaction", S, "fabric-transaction:txId"),
    ("epoch", "HyperledgerTransaction", D, "fabric-transaction:epoch"),
    ("payloadVisibility", "HyperledgerTransaction", S, "fabric-transaction:payloadVisibility"),
    ("chaincodePath", "Chaincode", S, "fabric-transaction:chaincodePath"),
    ("chaincodeName", "Chaincode", S, "fabric-transaction:chaincodeName"),
    ("chaincodeVersion", "Chaincode", S, "fabric-transaction:chaincodeVersion"),
    # derived
    ("blockHash", "Block", S, None),
    ("txId", "Transaction", S, None),
    ("height", "Block", D, None),
    ("totalTransactions", "Block", D, None),
    ("totalValueTransferred", "Block", D, None),
    ("confirmationStatus", "Transaction", S, None),
]

# sibling groups whose members are pairwise disjoint
_DISJOINT_GROUPS = [
    ["Blockchain", "Block", "Transaction", "TransactionInput", "TransactionOutput",
     "Account", "OmmerHeader", "Channel", "Chaincode"],
    ["BitcoinBlock", "EthereumBlock", "HyperledgerBlock"],
    ["BitcoinTransaction", "EthereumTransaction", "HyperledgerTransaction"],
    ["EthereumContractCreation", "EthereumMessageCall"],
    ["BitcoinAccount", "EthereumAccount", "HyperledgerAccount"],
    ["ExternalOwnedAccount", "ContractAccount"],
]


def _label(name: str) -> str:
    out = []
    for i, ch in enumerate(name):
        if ch.isupper() and i and not name[i - 1].isupper():
            out.append(" ")
        out.append(ch)
    return "".join(out)


@lru_cache(maxsize=None)
def builtin_vocabulary() -> Vocabulary:
    classes = frozenset(
        ClassTerm(term(name), _label(name), term(parent) if parent else None)
        for name, parent in _CLASSES
    )
    obj_props = frozenset(
        ObjectPropertyTerm(term(name), term(dom), term(rng), sources)
        for name, dom, rng, sources in _OBJECT_PROPERTIES
    )
    data_props = frozenset(
        DataPropertyTerm(term(name), term(dom), dt, (src,) if src else ())
        for name, dom, dt, src in _DATA_PROPERTIES
    )
    axioms = frozenset(
        DisjointnessAxiom(term(a), term(b))
        for group in _DISJOINT_GROUPS
        for a, b in combinations(group, 2)
    )
    return Vocabulary(classes, obj_props, data_props, axioms)


def field_mapping(voc: Vocabulary) -> dict[str, list[Iri]]:
    """Native structure field -> properties documenting it as their source."""
    mapping: dict[str, list[Iri]] = {}
    for prop in (*voc.object_properties, *voc.data_properties):
        for src in prop.sources:
            mapping.setdefault(src, []).append(prop.iri)
    return mapping


# -- ontology export --------------------------------------------------------

_ONTOLOGY_PREFIXES = {
    "blondie": BLONDIE,
    "owl": OWL,
    "rdf": RDF,
    "rdfs": RDFS,
    "xsd": XSD,
}

_XSD_RANGE = {DECIMAL: XSD_DECIMAL, STRING: XSD_STRING}


def ontology_graph(voc: Vocabulary) -> Graph:
    a = Iri(RDF_TYPE)
    sub_class = Iri(RDFS + "subClassOf")
    label = Iri(RDFS + "label")
    domain = Iri(RDFS + "domain")
    rng = Iri(RDFS + "range")
    triples = [Triple(Iri(ONTOLOGY_IRI), a, Iri(OWL + "Ontology"))]
    for c in voc.classes:
        triples.append(Triple(c.iri, a, Iri(OWL + "Class")))
        triples.append(Triple(c.iri, label, Literal(c.label)))
        if c.parent is not None:
            triples.append(Triple(c.iri, sub_class, c.parent))
    for p in voc.object_properties:
        triples += [
            Triple(p.iri, a, Iri(OWL + "ObjectProperty")),
            Triple(p.iri, domain, p.domain),
            Triple(p.iri, rng, p.range),
        ]
    for p in voc.data_properties:
        triples += [
            Triple(p.iri, a, Iri(OWL + "DatatypeProperty")),
            Triple(p.iri, domain, p.domain),
            Triple(p.iri, rng, Iri(_XSD_RANGE[p.datatype])),
        ]
    for ax in voc.disjointness:
        triples.append(Triple(ax.left, Iri(OWL + "disjointWith"), ax.right))
    return Graph(triples)


def export_ontology(voc: Vocabulary) -> str:
    return serialize_turtle(ontology_graph(voc), _ONTOLOGY_PREFIXES)
