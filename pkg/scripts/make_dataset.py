#!/usr/bin/env python3
"""Build the bundled corpus and test fixtures.

Everything derives from one small synthetic bibliography graph: the
question/SPARQL dataset splits, the packaged template base, and the
recorded search/endpoint fixtures that the test suite replays.  Gold
answers come from a tiny independent SPARQL interpreter over the graph,
so pipeline results can be checked against something that shares no code
with the pipeline's own query path.

Run from the repo root:  python3 scripts/make_dataset.py
"""

from __future__ import annotations

import json
import random
import re
import shutil
import sys
from pathlib import Path
from urllib.parse import urlsplit

ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(ROOT / "src"))

from dblpnlq.config import AppConfig, build_components          # noqa: E402
from dblpnlq.errors import DblpNlqError                         # noqa: E402
from dblpnlq.logicform import (                                 # noqa: E402
    BindAssign,
    CountAggregate,
    FilterComparison,
    FilterNotExists,
    LogicalForm,
    TriplePattern,
    UnionBlock,
    parse,
)
from dblpnlq.evalharness import load_dataset, run_full          # noqa: E402
from dblpnlq.session import SessionStore                        # noqa: E402
from dblpnlq.sparqlgen import (instantiate, reverse_tokenize,   # noqa: E402
                               to_sparql)
from dblpnlq.templates import build_template_base, templatize   # noqa: E402
from dblpnlq.vocab import load_default, placeholder_token       # noqa: E402

SCHEMA = "https://dblp.org/rdf/schema#"
AUTHORED = SCHEMA + "authoredBy"
VENUE = SCHEMA + "publishedIn"
YEAR = SCHEMA + "yearOfPublication"
TITLE = SCHEMA + "title"
AFFIL = SCHEMA + "primaryAffiliation"

REFERENCE_YEAR = 2024

BERT_TITLE = ("BERT: Pre-training of Deep Bidirectional Transformers "
              "for Language Understanding")
BERT_FORMAL = "https://dblp.org/rec/conf/naacl/DevlinCLT19"
BERT_PREPRINT = "https://dblp.org/rec/journals/corr/abs-1810-04805"
CHANG = "https://dblp.org/pid/69/4618"
TBL = "https://dblp.org/pid/b/TimBerners_Lee"

BERT_QUESTION = (
    "please enumerate the authors of 'BERT: Pre-training of Deep Bidirectional"
    " Transformers for Language Understanding' along with the venues where they"
    " have published other papers."
)
TBL_QUESTION = "what papers has Tim Berners-Lee published in the last 5 years?"


# --- synthetic bibliography graph ---------------------------------------

FIRST = ["Elena", "Marcus", "Priya", "Hideo", "Ingrid", "Tomas", "Amara",
         "Viktor", "Leila", "Santiago", "Freya", "Dmitri", "Noor", "Casper",
         "Yuki", "Bram", "Selma", "Rafael"]
LAST = ["Okafor", "Lindqvist", "Marchetti", "Novak", "Takeda", "Bergstrom",
        "Castellanos", "Petrov", "Oduya", "Hartmann", "Vasquez", "Kowalski",
        "Moreau", "Iversen"]
ADJ = ["Neural", "Probabilistic", "Distributed", "Incremental", "Robust",
       "Scalable", "Adaptive", "Symbolic", "Sparse", "Compositional",
       "Differentiable", "Streaming", "Federated", "Typed"]
NOUN = ["Parsing", "Retrieval", "Inference", "Scheduling", "Verification",
        "Alignment", "Summarization", "Clustering", "Caching", "Sampling",
        "Indexing", "Planning", "Reasoning", "Translation"]
TAIL = ["Graphs", "Streams", "Transformers", "Databases", "Programs",
        "Networks", "Corpora", "Pipelines", "Automata", "Embeddings"]
VENUES = ["ICLR", "ACL", "NAACL", "EMNLP", "ICESS", "KDD", "VLDB", "SIGIR",
          "WWW", "ICSE", "POPL", "CHI", "AAAI", "IJCAI", "SIGMOD"]
ORGS = ["University of Helsinki", "ETH Zurich", "Kyoto University",
        "TU Delft", "University of Edinburgh", "KTH Stockholm",
        "National University of Singapore", "University of Toronto"]


class Graph:
    def __init__(self):
        self.triples = []            # (subject uri, predicate uri, object)
        self.person_name = {}        # uri -> name
        self.pub_title = {}          # uri -> title
        self.pub_venue = {}
        self.pub_year = {}
        self.pub_authors = {}

    def add_person(self, name, uri, affiliation=None):
        self.person_name[uri] = name
        if affiliation:
            self.triples.append((uri, AFFIL, affiliation))

    def add_pub(self, uri, title, authors, venue, year):
        self.pub_title[uri] = title
        self.pub_venue[uri] = venue
        self.pub_year[uri] = str(year)
        self.pub_authors[uri] = list(authors)
        self.triples.append((uri, TITLE, title))
        self.triples.append((uri, VENUE, venue))
        self.triples.append((uri, YEAR, str(year)))
        for a in authors:
            self.triples.append((uri, AUTHORED, a))


def build_graph(rng: random.Random) -> Graph:
    g = Graph()
    g.add_person("Jacob Devlin", "https://dblp.org/pid/184/3733",
                 "Google Research")
    g.add_person("Ming-Wei Chang", CHANG, "Google DeepMind")
    g.add_person("Kenton Lee", "https://dblp.org/pid/121/7560")
    g.add_person("Kristina Toutanova", "https://dblp.org/pid/25/1520",
                 "Google Research")
    g.add_person("Tim Berners-Lee", TBL, "Massachusetts Institute of Technology")
    g.add_person("Ashish Vaswani", "https://dblp.org/pid/164/5629")

    names = set(g.person_name.values())
    block = 100
    while len(g.person_name) < 42:
        name = f"{rng.choice(FIRST)} {rng.choice(LAST)}"
        if name in names:
            continue
        names.add(name)
        block += rng.randrange(1, 9)
        uri = f"https://dblp.org/pid/{block // 10}/{1000 + block * 7 % 9000}"
        g.add_person(name, uri,
                     rng.choice(ORGS) if rng.random() < 0.7 else None)

    # the worked-example publications
    bert_authors = ["https://dblp.org/pid/184/3733", CHANG,
                    "https://dblp.org/pid/121/7560",
                    "https://dblp.org/pid/25/1520"]
    g.add_pub(BERT_FORMAL, BERT_TITLE, bert_authors, "NAACL", 2019)
    g.add_pub(BERT_PREPRINT, BERT_TITLE, bert_authors, "CoRR", 2018)
    g.add_pub("https://dblp.org/rec/conf/acl/YihCHG15",
              "Semantic Parsing via Staged Query Graphs", [CHANG], "ACL", 2015)
    g.add_pub("https://dblp.org/rec/conf/icess/Chang12",
              "Timed Automata Scheduling for Embedded Control",
              [CHANG], "ICESS", 2012)
    g.add_pub("https://dblp.org/rec/conf/emnlp/DevlinZ17",
              "Sequence Models for Synthetic Translation",
              ["https://dblp.org/pid/184/3733"], "EMNLP", 2017)
    g.add_pub("https://dblp.org/rec/conf/conll/ToutanovaL16",
              "Compositional Reasoning over Text",
              ["https://dblp.org/pid/25/1520",
               "https://dblp.org/pid/121/7560"], "EMNLP", 2016)
    g.add_pub("https://dblp.org/rec/conf/nips/VaswaniSPUJGKP17",
              "Attention Is All You Need",
              ["https://dblp.org/pid/164/5629"], "NIPS", 2017)
    for year, slug in [(2017, "www/Berners-Lee17"), (2019, "www/Berners-Lee19"),
                       (2021, "semweb/Berners-Lee21"),
                       (2023, "www/Berners-Lee23")]:
        g.add_pub(f"https://dblp.org/rec/conf/{slug}",
                  f"{rng.choice(ADJ)} Provenance for Linked {rng.choice(TAIL)}",
                  [TBL], rng.choice(["WWW", "SIGIR"]), year)

    people = list(g.person_name)
    titles = {g.pub_title[p] for p in g.pub_title}
    serial = 0
    while len(g.pub_title) < 150:
        title = f"{rng.choice(ADJ)} {rng.choice(NOUN)} for {rng.choice(TAIL)}"
        if title in titles:
            continue
        titles.add(title)
        serial += 1
        authors = rng.sample(people, rng.randrange(1, 4))
        venue = rng.choice(VENUES)
        year = rng.randrange(1998, REFERENCE_YEAR + 1)
        kind = rng.choice(["conf", "journals"])
        uri = (f"https://dblp.org/rec/{kind}/{venue.lower()}/"
               f"P{serial:03d}-{year % 100:02d}")
        g.add_pub(uri, title, authors, venue, year)
    return g


# --- search API double ---------------------------------------------------

def build_search_index(g: Graph) -> dict:
    index = {"publication": {}, "person": {}, "venue": {}}
    for uri, title in g.pub_title.items():
        row = {"url": uri, "title": title}
        # formal publications outrank preprint records for the same title
        score = 55 if "/journals/corr/" in uri else 80
        index["publication"].setdefault(title, []).append((score, row))
    for uri, name in g.person_name.items():
        index["person"].setdefault(name, []).append(
            (90, {"url": uri, "author": name}))
    for venue in VENUES + ["CoRR", "NIPS"]:
        url = f"https://dblp.org/db/conf/{venue.lower()}/index.html"
        index["venue"].setdefault(venue, []).append(
            (70, {"url": url, "venue": venue}))
    return index


_PATH_KIND = {"/search/publ/api": "publication",
              "/search/author/api": "person",
              "/search/venue/api": "venue"}


def make_search_transport(index: dict):
    def send(url, params, timeout):
        path = urlsplit(url).path
        kind = _PATH_KIND[path]
        rows = sorted(index[kind].get(params["q"], ()),
                      key=lambda r: -r[0])[:int(params["h"])]
        hits = {"@total": str(len(rows)), "@sent": str(len(rows))}
        if rows:
            hits["hit"] = [{"@score": str(score), "info": info}
                           for score, info in rows]
        return 200, json.dumps({"result": {"hits": hits}})
    return send


# --- reference SPARQL interpreter ---------------------------------------

_INT = re.compile(r"^-?[0-9]+$")


def _lex_value(term):
    if term.kind == "literal":
        text = term.text
        if text.startswith('"'):
            return text[1:-1].replace('\\"', '"').replace("\\\\", "\\")
        return text
    if term.kind == "uri":
        return term.text
    raise ValueError(f"cannot execute a {term.kind} term: {term.text}")


class Interpreter:
    """Straight-line solver for the query subset the corpus uses."""

    def __init__(self, graph: Graph, vocab):
        self.vocab = vocab
        self.by_pred = {}
        for s, p, o in graph.triples:
            self.by_pred.setdefault(p, []).append((s, o))

    def run_sparql(self, sparql: str) -> dict:
        form = parse(reverse_tokenize(sparql, self.vocab), self.vocab)
        return self.run_form(form)

    def run_form(self, form: LogicalForm) -> dict:
        solutions = self._walk(form.body, [{}])
        if form.kind == "ask":
            return {"head": {}, "boolean": bool(solutions)}
        return self._project(form, solutions)

    def _walk(self, items, solutions):
        for item in items:
            solutions = self._step(item, solutions)
        return solutions

    def _step(self, item, solutions):
        if isinstance(item, TriplePattern):
            pred = self.vocab.relation_uri(item.relation)
            out = []
            for sol in solutions:
                for s, o in self.by_pred.get(pred, ()):
                    extended = self._bind(item.subject, s, sol)
                    if extended is None:
                        continue
                    extended = self._bind(item.object, o, extended)
                    if extended is not None:
                        out.append(extended)
            return out
        if isinstance(item, FilterComparison):
            return [sol for sol in solutions if self._compare(item, sol)]
        if isinstance(item, UnionBlock):
            out = []
            for branch in item.branches:
                out.extend(self._walk(branch, list(solutions)))
            return out
        if isinstance(item, FilterNotExists):
            return [sol for sol in solutions
                    if not self._walk(item.items, [dict(sol)])]
        if isinstance(item, BindAssign):
            value = self._value(item.value, {})
            out = []
            for sol in solutions:
                if item.value.kind == "variable":
                    value = sol.get(item.value.text)
                new = dict(sol)
                new[item.variable] = value
                out.append(new)
            return out
        raise ValueError(f"cannot execute {type(item).__name__}")

    def _bind(self, term, value, sol):
        if term.kind == "variable":
            bound = sol.get(term.text)
            if bound is None:
                new = dict(sol)
                new[term.text] = value
                return new
            return sol if bound == value else None
        return sol if _lex_value(term) == value else None

    def _value(self, term, sol):
        if term.kind == "variable":
            return sol.get(term.text)
        return _lex_value(term)

    def _compare(self, item, sol) -> bool:
        left = self._value(item.lhs, sol)
        right = self._value(item.rhs, sol)
        if left is None or right is None:
            return False
        if _INT.match(str(left)) and _INT.match(str(right)):
            left, right = int(left), int(right)
        table = {"<is>": left == right, "<isnot>": left != right,
                 "<lt>": left < right, "<gt>": left > right,
                 "<leq>": left <= right, "<geq>": left >= right}
        return table[item.op]

    def _project(self, form: LogicalForm, solutions) -> dict:
        # solutions are ordered before projection, per the standard semantics
        if form.order_by is not None:
            key_var = form.order_by.key

            def sort_key(sol):
                v = sol.get(key_var)
                if v is not None and _INT.match(str(v)):
                    return (0, int(v), "")
                return (1, 0, v or "")
            solutions = sorted(solutions, key=sort_key,
                               reverse=form.order_by.direction == "desc")
        names, rows = [], []
        count_spec = None
        for entry in form.projection:
            if isinstance(entry, CountAggregate):
                names.append((entry.alias or "?count").lstrip("?"))
                count_spec = entry
            else:
                names.append(entry.lstrip("?"))
        if count_spec is not None:
            rows = self._aggregate(form, solutions, count_spec)
        else:
            for sol in solutions:
                rows.append(tuple(sol.get("?" + n) for n in names))
        if form.distinct:
            seen, unique = set(), []
            for row in rows:
                if row not in seen:
                    seen.add(row)
                    unique.append(row)
            rows = unique
        if form.limit is not None:
            rows = rows[:form.limit]
        bindings = []
        for row in rows:
            entry = {}
            for name, value in zip(names, row):
                if value is None:
                    continue
                kind = "uri" if str(value).startswith("http") else "literal"
                entry[name] = {"type": kind, "value": str(value)}
            bindings.append(entry)
        return {"head": {"vars": names}, "results": {"bindings": bindings}}

    def _aggregate(self, form, solutions, spec: CountAggregate):
        group_var = form.group_by
        if group_var is None:
            values = [sol.get(spec.variable) for sol in solutions
                      if sol.get(spec.variable) is not None]
            n = len(set(values)) if spec.distinct else len(values)
            return [(str(n),)]
        groups = {}
        order = []
        for sol in solutions:
            key = sol.get(group_var)
            if key not in groups:
                groups[key] = []
                order.append(key)
            value = sol.get(spec.variable)
            if value is not None:
                groups[key].append(value)
        rows = []
        for key in order:
            values = groups[key]
            n = len(set(values)) if spec.distinct else len(values)
            row = []
            for entry in form.projection:
                if isinstance(entry, CountAggregate):
                    row.append(str(n))
                elif entry == group_var:
                    row.append(key)
                else:
                    row.append(None)
            rows.append(tuple(row))
        return rows


def make_sparql_transport(interp: Interpreter):
    def send(method, url, query, timeout):
        try:
            return 200, json.dumps(interp.run_sparql(query))
        except (DblpNlqError, ValueError) as exc:
            return 400, f"cannot execute query: {exc}"
    return send


def answers_from(doc: dict) -> list:
    if "boolean" in doc:
        return ["true" if doc["boolean"] else "false"]
    values = {cell["value"] for row in doc["results"]["bindings"]
              for cell in row.values()}
    return sorted(values)


# --- question/query families --------------------------------------------

def quote_lf(text: str) -> str:
    escaped = text.replace("\\", "\\\\").replace('"', '\\"')
    return f'"{escaped}"'


def generate_items(g: Graph, rng: random.Random):
    """(family, question, logical-form text with concrete terms) rows."""
    people = sorted(g.person_name, key=lambda u: g.person_name[u])
    # names the rule patterns can re-extract: capitalized tokens only
    simple_people = [u for u in people
                     if all(t[0].isupper() for t in g.person_name[u].split())]
    pubs = sorted(g.pub_title)
    formal_pubs = [u for u in pubs if "/journals/corr/" not in u]
    with_affil = [u for u in simple_people
                  if any(s == u and p == AFFIL for s, p, _ in g.triples)]
    items = []

    def person(u):
        return g.person_name[u]

    def title(u):
        return g.pub_title[u]

    def pick_pubs(n):
        return rng.sample(formal_pubs, n)

    def pick_people(n):
        return rng.sample(simple_people, n)

    def add(family, question, lf):
        items.append((family, question, lf))

    add("F01", BERT_QUESTION,
        f"SELECT DISTINCT ?firstanswer ?secondanswer WHERE {{ {BERT_FORMAL} "
        f"<authoredBy> ?firstanswer <dot> ?x <authoredBy> ?firstanswer <dot> "
        f"?x <publishedIn> ?secondanswer FILTER ( ?x <isnot> {BERT_FORMAL} ) }}")
    add("F04", TBL_QUESTION,
        f"SELECT DISTINCT ?firstanswer WHERE {{ ?firstanswer <authoredBy> "
        f"{TBL} <dot> ?firstanswer <yearOfPublication> ?y "
        f"FILTER ( ?y <geq> {REFERENCE_YEAR - 5} ) }}")

    for p in pick_pubs(24):
        add("F01",
            f"please enumerate the authors of '{title(p)}' along with the "
            f"venues where they have published other papers.",
            f"SELECT DISTINCT ?firstanswer ?secondanswer WHERE {{ {p} "
            f"<authoredBy> ?firstanswer <dot> ?x <authoredBy> ?firstanswer "
            f"<dot> ?x <publishedIn> ?secondanswer "
            f"FILTER ( ?x <isnot> {p} ) }}")
    for u in pick_people(26):
        add("F02", f"how many papers did {person(u)} write?",
            f"SELECT ( COUNT ( DISTINCT ?p ) AS ?firstanswer ) "
            f"WHERE {{ ?p <authoredBy> {u} }}")
    for p in pick_pubs(26):
        year = int(g.pub_year[p])
        if rng.random() < 0.5:
            year = year + rng.choice([-2, -1, 1, 2])
        add("F03", f"was '{title(p)}' published in {year}?",
            f"ASK WHERE {{ {p} <yearOfPublication> {year} }}")
    for u in pick_people(24):
        n = rng.randrange(3, 11)
        add("F04",
            f"what papers has {person(u)} published in the last {n} years?",
            f"SELECT DISTINCT ?firstanswer WHERE {{ ?firstanswer "
            f"<authoredBy> {u} <dot> ?firstanswer <yearOfPublication> ?y "
            f"FILTER ( ?y <geq> {REFERENCE_YEAR - n} ) }}")
    for venue in VENUES:
        for year in rng.sample(range(2005, REFERENCE_YEAR), 2):
            add("F05", f"which papers were published in {venue} in {year}?",
                f"SELECT DISTINCT ?firstanswer WHERE {{ ?firstanswer "
                f"<publishedIn> {quote_lf(venue)} <dot> ?firstanswer "
                f"<yearOfPublication> {year} }}")
    for venue in VENUES:
        add("F06", f"who has published in {venue}?",
            f"SELECT DISTINCT ?firstanswer WHERE {{ ?p <publishedIn> "
            f"{quote_lf(venue)} <dot> ?p <authoredBy> ?firstanswer }}")
    for _ in range(26):
        u = rng.choice(simple_people)
        if rng.random() < 0.5:
            p = rng.choice([x for x in formal_pubs
                            if u in g.pub_authors[x]] or formal_pubs)
        else:
            p = rng.choice(formal_pubs)
        add("F07", f"did {person(u)} write '{title(p)}'?",
            f"ASK WHERE {{ {p} <authoredBy> {u} }}")
    for u in rng.sample(with_affil, min(24, len(with_affil))):
        add("F08", f"what is the primary affiliation of {person(u)}?",
            f"SELECT ?firstanswer WHERE {{ {u} <primaryAffiliation> "
            f"?firstanswer }}")
    for u in pick_people(24):
        add("F09", f"who are the co-authors of {person(u)}?",
            f"SELECT DISTINCT ?firstanswer WHERE {{ ?p <authoredBy> {u} "
            f"<dot> ?p <authoredBy> ?firstanswer "
            f"FILTER ( ?firstanswer <isnot> {u} ) }}")
    for p in pick_pubs(24):
        add("F10", f"in what year was '{title(p)}' published?",
            f"SELECT ?firstanswer WHERE {{ {p} <yearOfPublication> "
            f"?firstanswer }}")
    for p in pick_pubs(24):
        add("F11", f"where was '{title(p)}' published?",
            f"SELECT ?firstanswer WHERE {{ {p} <publishedIn> ?firstanswer }}")
    for p in pick_pubs(26):
        add("F12", f"who are the authors of '{title(p)}'?",
            f"SELECT DISTINCT ?firstanswer WHERE {{ {p} <authoredBy> "
            f"?firstanswer }}")
    for u in pick_people(26):
        add("F13", f"what papers did {person(u)} write?",
            f"SELECT DISTINCT ?firstanswer WHERE {{ ?firstanswer "
            f"<authoredBy> {u} }}")

    # structural families: outside the rule patterns, inside the grammar
    for _ in range(17):
        v1, v2 = rng.sample(VENUES, 2)
        add("F14", f"which papers appeared in {v1} or {v2}?",
            f"SELECT DISTINCT ?firstanswer WHERE {{ {{ ?firstanswer "
            f"<publishedIn> {quote_lf(v1)} }} UNION {{ ?firstanswer "
            f"<publishedIn> {quote_lf(v2)} }} }}")
    for u in pick_people(17):
        add("F15", f"what is the most recent paper by {person(u)}?",
            f"SELECT ?firstanswer WHERE {{ ?firstanswer <authoredBy> {u} "
            f"<dot> ?firstanswer <yearOfPublication> ?y }} "
            f"ORDER BY DESC ( ?y ) LIMIT 1")
    for _ in range(17):
        a, b = rng.sample(simple_people, 2)
        add("F16", f"which papers did {person(a)} write without {person(b)}?",
            f"SELECT DISTINCT ?firstanswer WHERE {{ ?firstanswer "
            f"<authoredBy> {a} FILTER NOT EXISTS {{ ?firstanswer "
            f"<authoredBy> {b} }} }}")
    for p in pick_pubs(17):
        add("F17", f"give the publication year of '{title(p)}' as the answer.",
            f"SELECT ?firstanswer WHERE {{ {p} <yearOfPublication> ?y "
            f"BIND ( ?y AS ?firstanswer ) }}")
    for u in pick_people(17):
        add("F18", f"how many papers did {person(u)} publish in each venue?",
            f"SELECT ?firstanswer ( COUNT ( ?p ) AS ?secondanswer ) WHERE "
            f"{{ ?p <authoredBy> {u} <dot> ?p <publishedIn> ?firstanswer }} "
            f"GROUP BY ?firstanswer")
    for _ in range(17):
        a, b = rng.sample(simple_people, 2)
        add("F19", f"which papers did {person(a)} and {person(b)} write "
            f"together?",
            f"SELECT DISTINCT ?firstanswer WHERE {{ ?firstanswer "
            f"<authoredBy> {a} <dot> ?firstanswer <authoredBy> {b} }}")
    for u in pick_people(17):
        year = rng.randrange(2005, 2020)
        add("F20", f"what papers did {person(u)} publish before {year}?",
            f"SELECT DISTINCT ?firstanswer WHERE {{ ?firstanswer "
            f"<authoredBy> {u} <dot> ?firstanswer <yearOfPublication> ?y "
            f"FILTER ( ?y <lt> {year} ) }}")
    for p in pick_pubs(17):
        add("F21", f"what other papers did the authors of '{title(p)}' write?",
            f"SELECT DISTINCT ?firstanswer WHERE {{ {p} <authoredBy> ?a "
            f"<dot> ?firstanswer <authoredBy> ?a "
            f"FILTER ( ?firstanswer <isnot> {p} ) }}")
    return items


UNPARSEABLE = [
    ("the OPTIONAL clause is outside the supported shape",
     "SELECT ?p WHERE { ?p <%sauthoredBy> ?a . "
     "OPTIONAL { ?p <%syearOfPublication> ?y } }" % (SCHEMA, SCHEMA)),
    ("predicate lists with semicolons are not supported",
     "SELECT ?p WHERE { ?p <%sauthoredBy> ?a ; <%spublishedIn> ?v }"
     % (SCHEMA, SCHEMA)),
    ("PREFIX declarations are not supported",
     "PREFIX dblp: <https://dblp.org/rdf/schema#> "
     "SELECT ?p WHERE { ?p dblp:authoredBy ?a }"),
    ("string functions such as CONTAINS are not supported",
     'SELECT ?p WHERE { ?p <%stitle> ?t FILTER ( CONTAINS ( ?t, "BERT" ) ) }'
     % SCHEMA),
    ("property paths are not supported",
     "SELECT ?v WHERE { ?p <%sauthoredBy>/<%sprimaryAffiliation> ?v }"
     % (SCHEMA, SCHEMA)),
    ("typed literals are not supported",
     'SELECT ?p WHERE { ?p <%syearOfPublication> '
     '"2019"^^<http://www.w3.org/2001/XMLSchema#gYear> }' % SCHEMA),
    ("VALUES blocks are not supported",
     'SELECT ?p WHERE { VALUES ?v { "ACL" "KDD" } ?p <%spublishedIn> ?v }'
     % SCHEMA),
    ("OFFSET is not supported",
     "SELECT ?p WHERE { ?p <%sauthoredBy> ?a } LIMIT 10 OFFSET 10" % SCHEMA),
    ("predicate is not in the relation manifest",
     "SELECT ?p WHERE { ?p <%spublishedAsPartOf> ?s }" % SCHEMA),
    ("language-tagged literals are not supported",
     'SELECT ?p WHERE { ?p <%stitle> "Attention Is All You Need"@en }'
     % SCHEMA),
    ("SELECT * projections are not supported",
     "SELECT * WHERE { ?p <%sauthoredBy> ?a }" % SCHEMA),
    ("subqueries are not supported",
     "SELECT ?a WHERE { { SELECT ?a WHERE { ?p <%sauthoredBy> ?a } } }"
     % SCHEMA),
    ("GRAPH clauses are not supported",
     "SELECT ?p WHERE { GRAPH <https://dblp.org> { ?p <%sauthoredBy> ?a } }"
     % SCHEMA),
    ("blank node syntax is not supported",
     "SELECT ?a WHERE { [ <%sauthoredBy> ?a ] <%spublishedIn> ?v }"
     % (SCHEMA, SCHEMA)),
    ("MINUS is not supported",
     "SELECT ?p WHERE { ?p <%sauthoredBy> ?a MINUS { ?p <%spublishedIn> "
     '"CoRR" } }' % (SCHEMA, SCHEMA)),
]


# --- assembly ------------------------------------------------------------

def main() -> int:
    rng = random.Random(20240814)
    vocab = load_default()
    graph = build_graph(rng)
    interp = Interpreter(graph, vocab)
    index = build_search_index(graph)

    rows = generate_items(graph, rng)
    seen_text = set()
    rows = [r for r in rows
            if not (r[1] in seen_text or seen_text.add(r[1]))]
    questions = []
    for i, (family, question, lf) in enumerate(rows, start=1):
        form = parse(lf, vocab)
        sparql = to_sparql(form, vocab)
        answers = answers_from(interp.run_form(form))
        questions.append({
            "id": f"Q{i:04d}",
            "family": family,
            "question": {"string": question},
            "query": {"sparql": sparql},
            "answers": answers,
        })
    for i, (reason, sparql) in enumerate(UNPARSEABLE, start=1):
        questions.append({
            "id": f"U{i:04d}",
            "family": "unsupported",
            "question": {"string": f"unsupported phrasing case {i}: {reason}"},
            "query": {"sparql": sparql},
            "answers": [],
        })

    data_dir = ROOT / "data"
    data_dir.mkdir(exist_ok=True)
    train_path = data_dir / "quad_train.json"
    train_path.write_text(json.dumps(
        {"dataset": "synthetic-dblp-quad", "questions": questions}, indent=1))

    # eval split: a stratified 50-item sample of the training files
    by_family = {}
    for q in questions:
        by_family.setdefault(q["family"], []).append(q)
    eval_rows = []
    plan = [("F01", 5), ("F02", 3), ("F03", 3), ("F04", 4), ("F05", 3),
            ("F06", 3), ("F07", 3), ("F08", 3), ("F09", 3), ("F10", 3),
            ("F11", 3), ("F12", 3), ("F13", 3), ("F14", 1), ("F15", 1),
            ("F16", 1), ("F17", 1), ("F18", 1), ("F19", 1), ("F20", 1),
            ("F21", 1)]
    for family, count in plan:
        eval_rows.extend(by_family[family][:count])
    assert len(eval_rows) == 50, len(eval_rows)
    (data_dir / "quad_eval50.json").write_text(json.dumps(
        {"dataset": "synthetic-dblp-quad-eval50",
         "questions": eval_rows}, indent=1))

    examples2 = [q for q in questions
                 if q["question"]["string"] in (BERT_QUESTION, TBL_QUESTION)]
    assert len(examples2) == 2
    (data_dir / "quad_examples2.json").write_text(json.dumps(
        {"dataset": "synthetic-dblp-quad-examples",
         "questions": examples2}, indent=1))

    # template base from the full training split
    items = load_dataset(train_path)
    base, report = build_template_base(
        [(item.id, item.gold_query) for item in items], vocab,
        dataset_name="quad_train")
    base_path = ROOT / "src" / "dblpnlq" / "data" / "template_base.json"
    base.save(base_path)
    skipped_ids = {item_id for item_id, _ in report.skipped}
    assert skipped_ids == {q["id"] for q in questions
                          if q["family"] == "unsupported"}, report.skipped
    print(f"templates: {len(base.templates)} from {report.built} items "
          f"({len(report.skipped)} unparseable)")

    # the worked example's retrieval picture
    bert_gold = next(q for q in questions
                     if q["question"]["string"] == BERT_QUESTION)
    masked, _ = templatize(bert_gold["query"]["sparql"], vocab)
    top = base.retrieve(masked, k=5)
    print("anchor-question top-5 templates:")
    other_papers_rank = None
    for match in top:
        marker = ""
        if "<topic1> <authoredBy> ?v1 <dot> ?firstanswer" in match.template.text:
            other_papers_rank = match.rank
            marker = "   <- other-papers-by-same-authors"
        print(f"  rank {match.rank} d={match.distance:.3f} "
              f"n={match.template.frequency} {match.template.text[:84]}{marker}")
    assert top[0].distance == 0.0, "anchor template must be a perfect match"
    assert other_papers_rank is not None, \
        "other-papers template must be in the top 5"

    # record fixtures through the real clients against the doubles
    fixture_root = ROOT / "tests" / "fixtures"
    for sub in ("search", "sparql"):
        if (fixture_root / sub).exists():
            shutil.rmtree(fixture_root / sub)
    cfg = AppConfig(fixture_mode="record", fixture_root=str(fixture_root),
                    reference_year=REFERENCE_YEAR,
                    template_base_path=str(base_path))
    comp = build_components(cfg,
                            search_transport=make_search_transport(index),
                            sparql_transport=make_sparql_transport(interp))

    for item in load_dataset(data_dir / "quad_eval50.json"):
        comp.sparql.execute(item.gold_query)          # gold-lf replay path
    for item in load_dataset(data_dir / "quad_examples2.json"):
        comp.sparql.execute(item.gold_query)
        run_full(comp, item.question)                 # full-mode replay path
    for item in load_dataset(data_dir / "quad_eval50.json"):
        run_full(comp, item.question)

    # a trained model can emit forms for questions outside the rule patterns;
    # record the service traffic of gold-form sessions too
    class _GoldFormTranslator:
        def __init__(self, table):
            self.table = table

        def translate(self, question):
            return self.table[question]

    gold_forms = {}
    for item in load_dataset(data_dir / "quad_eval50.json"):
        masked, lifted = templatize(item.gold_query, comp.vocab)
        bindings = {placeholder_token(i + 1): m.term()
                    for i, m in enumerate(lifted)}
        gold_forms[item.question] = instantiate(masked, bindings, comp.vocab)
    rule_translator = comp.translator
    comp.translator = _GoldFormTranslator(gold_forms)
    for item in load_dataset(data_dir / "quad_eval50.json"):
        run_full(comp, item.question)
    comp.translator = rule_translator

    examples_doc = json.loads(
        (ROOT / "src" / "dblpnlq" / "data" / "examples.json").read_text())
    for row in examples_doc["examples"]:
        run_full(comp, row["text"])

    # the interactive walkthrough: every selection the UI scenario makes
    store = SessionStore(comp)
    state = store.create(BERT_QUESTION)
    assert state.answers is not None, state.stage_errors
    generated = state.query_text
    for candidate in (1, 0):
        store.select_entity(state.id, 0, candidate)
        for t in range(len(state.template_matches)):
            store.select_template(state.id, t)
        store.select_template(state.id, 0)
    store.run_query(state.id, generated + " LIMIT 1")
    store.regenerate(state.id)
    # the browser walkthrough order: pre-print tick, then the other-papers
    # template, then a manual LIMIT 1 run on the query that produced
    ui = store.create(BERT_QUESTION)
    store.select_entity(ui.id, 0, 1)
    snap = store.select_template(ui.id, 2)
    store.run_query(ui.id, snap.query_text + " LIMIT 1")
    store.regenerate(ui.id)
    store.create(TBL_QUESTION)
    missing = store.create("who are the authors of 'Zzqx Qqzw'?")
    assert missing.mentions and not missing.mentions[0].candidates

    search_count = len(list((fixture_root / "search").glob("*.json")))
    sparql_count = len(list((fixture_root / "sparql").glob("*.json")))
    print(f"fixtures: {search_count} search, {sparql_count} sparql")
    print(f"dataset: {len(questions)} items "
          f"({len(questions) - len(UNPARSEABLE)} parseable), "
          f"eval split {len(eval_rows)}, examples {len(examples2)}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
