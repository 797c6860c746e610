import itertools

import pytest

from blondie.rdf import OWL, RDF_TYPE, Iri, parse_turtle
from blondie.vocabulary import (
    BLONDIE,
    ClassTerm,
    DataPropertyTerm,
    DisjointnessAxiom,
    ObjectPropertyTerm,
    UnknownClassError,
    Vocabulary,
    are_disjoint,
    builtin_vocabulary,
    export_ontology,
    field_mapping,
    is_subclass_of,
)


def b(local):
    return Iri(BLONDIE + local)


# Native field names of the eight documented structures, transcribed by hand.
NATIVE_FIELDS = {
    "bitcoin-block": ["nVersion", "HashPrevBlock", "HashMerkleRoot", "nTime", "nBits", "nNonce", "#vtx", "vtx"],
    "bitcoin-transaction": [
        "nVersion", "#vin", "vin", "vin.hash", "vin.n", "vin.scriptSigLen", "vin.scriptSig", "vin.nSequence",
        "#vout", "vout", "vout.nvalue", "vout.scriptPubkeyLen", "vout.scriptPubkey", "nLockTime",
    ],
    "ethereum-block": [
        "parentHash", "ommersHash", "beneficiary", "stateRoot", "transactionsRoot", "receiptsRoot",
        "logsBloom", "difficulty", "number", "gasLimit", "gasUsed", "timestamp", "extraData", "mixHash",
        "nonce", "transactions", "ommersblockheaders",
    ],
    "ethereum-transaction": ["once", "gasPrice", "gasLimit", "to", "value", "v", "r", "s"],
    "ethereum-contract-creation": ["init"],
    "ethereum-message-call": ["data"],
    "fabric-block": ["number", "currentBlockHash", "previousHash", "dataHash"],
    "fabric-transaction": [
        "type", "version", "timestamp", "channelId", "txId", "epoch", "payloadVisibility",
        "chaincodePath", "chaincodeName", "chaincodeVersion",
    ],
}


@pytest.fixture(scope="module")
def voc():
    return builtin_vocabulary()


def test_counts_exact(voc):
    assert len(voc.classes) == 23
    assert len(voc.object_properties) == 11
    assert len(voc.data_properties) == 64
    assert voc.stats() == {"classes": 23, "object-properties": 11, "data-properties": 64}


def test_deterministic(voc):
    assert builtin_vocabulary() == voc
    assert export_ontology(builtin_vocabulary()) == export_ontology(voc)


def test_every_native_field_maps_to_exactly_one_property(voc):
    mapping = field_mapping(voc)
    expected = {f"{struct}:{name}" for struct, names in NATIVE_FIELDS.items() for name in names}
    for src in sorted(expected):
        assert len(mapping.get(src, [])) == 1, src
    # no property claims a field that is not documented
    assert set(mapping) <= expected


def test_subclass_examples(voc):
    assert is_subclass_of(voc, b("EthereumContractCreation"), b("Transaction"))
    assert is_subclass_of(voc, b("BitcoinBlock"), b("Block"))
    assert not is_subclass_of(voc, b("Block"), b("BitcoinBlock"))
    assert is_subclass_of(voc, b("Miner"), b("Account"))


def test_subclass_is_partial_order(voc):
    names = [c.iri for c in voc.classes]
    for a in names:
        assert is_subclass_of(voc, a, a)
    for a, c in itertools.permutations(names, 2):
        assert not (is_subclass_of(voc, a, c) and is_subclass_of(voc, c, a)), (a, c)
    for a, m, c in itertools.product(names, repeat=3):
        if is_subclass_of(voc, a, m) and is_subclass_of(voc, m, c):
            assert is_subclass_of(voc, a, c)


def test_disjointness_symmetric_and_irreflexive(voc):
    names = [c.iri for c in voc.classes]
    for a, c in itertools.product(names, repeat=2):
        assert are_disjoint(voc, a, c) == are_disjoint(voc, c, a)
    for a in names:
        assert not are_disjoint(voc, a, a)


def test_disjointness_examples(voc):
    assert are_disjoint(voc, b("EthereumBlock"), b("BitcoinBlock"))
    assert are_disjoint(voc, b("EthereumBlock"), b("HyperledgerBlock"))
    # inherited through the hierarchy
    assert are_disjoint(voc, b("EthereumContractCreation"), b("BitcoinTransaction"))
    assert are_disjoint(voc, b("BitcoinBlock"), b("Transaction"))
    assert not are_disjoint(voc, b("Miner"), b("BitcoinAccount"))
    assert not are_disjoint(voc, b("BitcoinBlock"), b("Block"))


def test_disjoint_classes_share_no_subclass(voc):
    names = [c.iri for c in voc.classes]
    for a, c in itertools.combinations(names, 2):
        if are_disjoint(voc, a, c):
            assert not any(is_subclass_of(voc, x, a) and is_subclass_of(voc, x, c) for x in names)


def test_property_references_declared(voc):
    for prop in voc.object_properties:
        assert voc.has_class(prop.domain) and voc.has_class(prop.range)
    for prop in voc.data_properties:
        assert voc.has_class(prop.domain)
        assert prop.datatype in ("string", "decimal")


def test_unknown_class(voc):
    with pytest.raises(UnknownClassError):
        voc.get_class(b("Payload"))
    assert voc.get_property(b("nope")) is None


def test_axiom_validation():
    with pytest.raises(ValueError):
        DisjointnessAxiom(b("A"), b("A"))
    assert DisjointnessAxiom(b("A"), b("B")) == DisjointnessAxiom(b("B"), b("A"))


def test_data_property_facets():
    with pytest.raises(ValueError):
        DataPropertyTerm(b("p"), b("A"), "integer")


def test_vocabulary_rejects_cycles_and_dangling_references():
    a, c = ClassTerm(b("A"), "A", b("C")), ClassTerm(b("C"), "C", b("A"))
    with pytest.raises(ValueError):
        Vocabulary(frozenset({a, c}), frozenset(), frozenset(), frozenset())
    root = ClassTerm(b("A"), "A")
    with pytest.raises(ValueError):
        Vocabulary(frozenset({root}), frozenset({ObjectPropertyTerm(b("p"), b("A"), b("Missing"))}),
                   frozenset(), frozenset())
    with pytest.raises(ValueError):
        Vocabulary(frozenset({ClassTerm(b("A"), "A", b("Missing"))}), frozenset(), frozenset(), frozenset())


def test_export_round_trip(voc):
    g = parse_turtle(export_ontology(voc))
    rdf_type = Iri(RDF_TYPE)
    owl_classes = {t.subject for t in g.match(predicate=rdf_type, obj=Iri(OWL + "Class"))}
    assert owl_classes == {c.iri for c in voc.classes}
    assert len(owl_classes) == 23
    obj_props = {t.subject for t in g.match(predicate=rdf_type, obj=Iri(OWL + "ObjectProperty"))}
    data_props = {t.subject for t in g.match(predicate=rdf_type, obj=Iri(OWL + "DatatypeProperty"))}
    assert len(obj_props) == 11 and len(data_props) == 64
    disjoint = list(g.match(predicate=Iri(OWL + "disjointWith")))
    assert any({t.subject, t.object} == {b("BitcoinBlock"), b("EthereumBlock")} for t in disjoint)


def test_export_empty_vocabulary():
    empty = Vocabulary(frozenset(), frozenset(), frozenset(), frozenset())
    text = export_ontology(empty)
    g = parse_turtle(text)
    # only the ontology header remains
    assert {t.subject for t in g} <= {Iri("https://w3id.org/blondie")}
    assert not list(g.match(obj=Iri(OWL + "Class")))
