"""Question answering over the DBLP knowledge graph.

The pipeline turns a natural-language question into a logical form, links
the entity mentions it contains through the DBLP search API, corrects the
form against a template base mined from training data, and runs the
resulting SPARQL query against a DBLP endpoint.
"""

from .errors import DblpNlqError
from .logicform import LogicalForm, Term, parse, serialize, tokenize
from .vocab import Vocabulary, load_manifest

__all__ = [
    "DblpNlqError",
    "LogicalForm",
    "Term",
    "Vocabulary",
    "load_manifest",
    "parse",
    "serialize",
    "tokenize",
]

__version__ = "0.1.0"
