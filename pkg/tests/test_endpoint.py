import json

import pytest
import requests

from dblpnlq.endpoint import (
    AnswerTable,
    AnswerValue,
    EndpointConfig,
    SparqlClient,
    parse_results,
    serialize_results,
)
from dblpnlq.errors import (
    EndpointTimeoutError,
    EndpointUnavailableError,
    FixtureMissError,
    MalformedResultsError,
    QueryRejectedError,
)

SELECT_DOC = {
    "head": {"vars": ["firstanswer", "secondanswer"]},
    "results": {"bindings": [
        {"firstanswer": {"type": "uri", "value": "https://dblp.org/pid/69/4618"},
         "secondanswer": {"type": "literal", "value": "ICESS"}},
        {"firstanswer": {"type": "uri", "value": "https://dblp.org/pid/69/4618"},
         "secondanswer": {"type": "literal", "value": "ACL"}},
        {"firstanswer": {"type": "uri", "value": "https://dblp.org/pid/x"},
         "secondanswer": {"type": "literal", "value": "NAACL",
                          "xml:lang": "en"}},
    ]},
}

ASK_DOC = {"head": {}, "boolean": False}


def test_parse_select_doc():
    table = parse_results(SELECT_DOC)
    assert table.columns == ("firstanswer", "secondanswer")
    assert len(table.rows) == 3
    assert table.boolean is None
    assert table.column("secondanswer") == ["ICESS", "ACL", "NAACL"]
    assert table.rows[0][0].is_uri
    assert table.rows[2][1].lang == "en"
    assert "ICESS" in table.values()


def test_parse_ask_doc():
    table = parse_results(ASK_DOC)
    assert table.boolean is False
    assert table.columns == ("boolean",)
    assert len(table.rows) == 1
    assert table.rows[0][0].value == "false"
    assert table.values() == {"false"}


def test_serialize_parse_identity():
    assert serialize_results(parse_results(SELECT_DOC)) == SELECT_DOC
    assert serialize_results(parse_results(ASK_DOC)) == ASK_DOC


def test_parse_handles_missing_cells():
    doc = {"head": {"vars": ["a", "b"]},
           "results": {"bindings": [{"a": {"type": "literal", "value": "x"}}]}}
    table = parse_results(doc)
    assert table.rows[0][1] is None
    assert table.column("b") == []
    assert serialize_results(table) == doc


@pytest.mark.parametrize("doc", [
    "not even a dict",
    {},
    {"head": {}},
    {"head": {"vars": "x"}, "results": {"bindings": []}},
    {"head": {"vars": ["a"]}, "results": {"bindings": [{"zz": {"type": "l", "value": "v"}}]}},
    {"head": {"vars": ["a"]}, "results": {"bindings": [{"a": {"type": "l"}}]}},
    {"boolean": "yes"},
])
def test_parse_malformed(doc):
    with pytest.raises(MalformedResultsError):
        parse_results(doc)


class FakeTransport:
    def __init__(self, status=200, body=None, exc=None):
        self.status = status
        self.body = body if body is not None else json.dumps(SELECT_DOC)
        self.exc = exc
        self.calls = []

    def __call__(self, method, url, query, timeout):
        self.calls.append((method, url, query))
        if self.exc is not None:
            raise self.exc
        return self.status, self.body


def make_client(tmp_path=None, mode="off", vocab=None, **kw):
    config = EndpointConfig(url="https://kg.example/sparql", fixture_mode=mode,
                            fixture_dir=str(tmp_path) if tmp_path else None)
    transport = FakeTransport(**kw)
    return SparqlClient(config, vocab=vocab, transport=transport), transport


def test_execute_select(vocab):
    client, transport = make_client(vocab=vocab)
    table = client.execute("SELECT ?x WHERE { }")
    assert table.column("secondanswer") == ["ICESS", "ACL", "NAACL"]
    assert transport.calls[0][0] == "GET"


def test_long_queries_use_post(vocab):
    client, transport = make_client(vocab=vocab)
    client.execute("SELECT ?x WHERE { } #" + "x" * 3000)
    assert transport.calls[0][0] == "POST"


def test_rejected_query_passes_message_through(vocab):
    client, _ = make_client(vocab=vocab, status=400,
                            body="Virtuoso 37000 Error SP030: syntax error")
    with pytest.raises(QueryRejectedError) as exc:
        client.execute("SELECT bogus")
    assert "syntax error" in exc.value.message


def test_server_error(vocab):
    client, _ = make_client(vocab=vocab, status=502, body="bad gateway")
    with pytest.raises(EndpointUnavailableError):
        client.execute("SELECT ?x WHERE { }")


def test_timeout(vocab):
    client, _ = make_client(vocab=vocab, exc=requests.Timeout("slow"))
    with pytest.raises(EndpointTimeoutError):
        client.execute("SELECT ?x WHERE { }")


def test_connection_error(vocab):
    client, _ = make_client(vocab=vocab, exc=requests.ConnectionError("refused"))
    with pytest.raises(EndpointUnavailableError):
        client.execute("SELECT ?x WHERE { }")


def test_unparseable_response_body(vocab):
    client, _ = make_client(vocab=vocab, body="<html>oops</html>")
    with pytest.raises(MalformedResultsError):
        client.execute("SELECT ?x WHERE { }")


def test_max_rows_truncation(vocab):
    config = EndpointConfig(url="https://kg.example/sparql", max_rows=2)
    client = SparqlClient(config, transport=FakeTransport())
    table = client.execute("SELECT ?x WHERE { }")
    assert len(table.rows) == 2
    assert table.truncated


def test_record_then_replay_with_reformatted_query(tmp_path, vocab):
    schema = "https://dblp.org/rdf/schema#"
    q1 = f"SELECT ?a WHERE {{ ?p <{schema}authoredBy> ?a }}"
    q2 = f"select  ?author\nwhere {{ ?pub <{schema}authoredBy> ?author }}"
    recorder, _ = make_client(tmp_path, mode="record", vocab=vocab)
    recorded = recorder.execute(q1)
    replayer, transport = make_client(tmp_path, mode="replay", vocab=vocab)
    # a reformatted, renamed but equivalent query hits the same fixture
    replayed = replayer.execute(q2)
    assert replayed == recorded
    assert transport.calls == []


def test_replay_miss(tmp_path, vocab):
    client, _ = make_client(tmp_path, mode="replay", vocab=vocab)
    with pytest.raises(FixtureMissError):
        client.execute("SELECT ?x WHERE { }")


def test_cache_text_falls_back_outside_subset(vocab):
    client, _ = make_client(vocab=vocab)
    text = client.cache_text("SELECT *  WHERE\n{ ?x ?p ?y\nOPTIONAL { ?x ?q ?z } }")
    assert text == "SELECT * WHERE { ?x ?p ?y OPTIONAL { ?x ?q ?z } }"


def test_config_validation():
    with pytest.raises(ValueError):
        EndpointConfig(max_rows=0)
    with pytest.raises(ValueError):
        EndpointConfig(fixture_mode="record")
