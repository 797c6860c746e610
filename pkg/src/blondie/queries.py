"""Shipped queries answering the five competency questions, plus the
"first thousand blocks" listing."""

from __future__ import annotations

from .sparql import Query, parse_query

_PREFIX = "PREFIX blondie: <https://w3id.org/blondie#>\n"

COMPETENCY_QUERIES = {
    # Who was the miner of each block?
    "CQ1": _PREFIX + """SELECT ?block ?miner WHERE {
  ?block blondie:minedBy ?miner .
}
""",
    # What is the height of each block?
    "CQ2": _PREFIX + """SELECT ?block ?height WHERE {
  ?block blondie:height ?height .
}
ORDER BY ?height
""",
    # How many transactions were included in a block?
    "CQ3": _PREFIX + """SELECT ?block (COUNT(?tx) AS ?transactions) WHERE {
  ?block blondie:hasTransaction ?tx .
}
GROUP BY ?block
""",
    # Is a transaction confirmed or unconfirmed?
    "CQ4": _PREFIX + """SELECT ?tx ?status WHERE {
  ?tx blondie:confirmationStatus ?status .
}
""",
    # How many coins in total were transferred in a block? (native units)
    "CQ5": _PREFIX + """SELECT ?block (SUM(?value) AS ?total) WHERE {
  ?block blondie:totalValueTransferred ?value .
}
GROUP BY ?block
""",
}

FIRST_THOUSAND_BLOCKS = _PREFIX + """SELECT ?block ?height WHERE {
  ?block a blondie:BitcoinBlock ;
         blondie:height ?height .
  FILTER(?height < 1000)
}
ORDER BY ?height
"""


def named_competency_query(cq_id: str) -> Query:
    key = cq_id.upper()
    if key not in COMPETENCY_QUERIES:
        raise KeyError(f"unknown competency question {cq_id!r}; expected one of {', '.join(COMPETENCY_QUERIES)}")
    return parse_query(COMPETENCY_QUERIES[key])
