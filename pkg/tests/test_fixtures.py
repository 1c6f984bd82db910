import pytest

from dblpnlq.errors import FileUnreadableError
from dblpnlq.fixtures import FixtureStore, query_key, search_key


def test_save_load_round_trip(tmp_path):
    store = FixtureStore(tmp_path / "fx")
    key = search_key("/search/publ/api", "bert", 10)
    assert not store.has(key)
    assert store.load(key) is None
    store.save(key, {"path": "/search/publ/api", "q": "bert", "h": 10}, 200, "{}")
    assert store.has(key)
    doc = store.load(key)
    assert doc["status"] == 200
    assert doc["body"] == "{}"
    assert doc["request"]["q"] == "bert"


def test_keys_are_stable_and_distinct():
    assert search_key("/search/publ/api", "bert", 10) == \
        search_key("/search/publ/api", "bert", 10)
    assert search_key("/search/publ/api", "bert", 10) != \
        search_key("/search/publ/api", "bert", 5)
    assert search_key("/search/publ/api", "bert", 10) != \
        search_key("/search/author/api", "bert", 10)
    assert query_key("SELECT a") != query_key("SELECT b")


def test_corrupt_fixture_raises(tmp_path):
    store = FixtureStore(tmp_path)
    (tmp_path / "abc.json").write_text("{nope")
    with pytest.raises(FileUnreadableError):
        store.load("abc")
    (tmp_path / "xyz.json").write_text('{"request": {}}')
    with pytest.raises(FileUnreadableError):
        store.load("xyz")
