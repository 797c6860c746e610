"""Blockchain records (Bitcoin, Ethereum, Hyperledger Fabric) as RDF graphs
under the BLONDiE vocabulary, with validation and a small SPARQL engine."""

from .rdf import Graph, Iri, Literal, Triple
from .store import TripleStore
from .vocabulary import builtin_vocabulary

__all__ = ["Graph", "Iri", "Literal", "Triple", "TripleStore", "builtin_vocabulary"]
__version__ = "0.1.0"
