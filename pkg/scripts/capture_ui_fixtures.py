"""Record live HTTP response bodies for the frontend test suite.

Drives the session API in replay mode through the exact interaction
order the browser walkthrough test replays, and writes each response
body under frontend/tests/fixtures/.  Run after make_dataset.py
whenever the corpus or the session pipeline changes.
"""

import json
import pathlib
import sys

from fastapi.testclient import TestClient

REPO = pathlib.Path(__file__).resolve().parents[1]
sys.path.insert(0, str(REPO / "src"))

from dblpnlq.config import AppConfig, build_components
from dblpnlq.session import SessionStore
from dblpnlq.api import create_app

OUT = REPO / "frontend" / "tests" / "fixtures"

BERT_QUESTION = (
    "please enumerate the authors of 'BERT: Pre-training of Deep"
    " Bidirectional Transformers for Language Understanding' along with"
    " the venues where they have published other papers."
)
ASK_QUESTION = "was 'Probabilistic Sampling for Networks' published in 2006?"
ERROR_QUESTION = "please summarize the plot of Hamlet"


def dump(name: str, payload: object) -> None:
    path = OUT / name
    path.write_text(json.dumps(payload, indent=1, sort_keys=True) + "\n")
    print(f"wrote {path.relative_to(REPO)}")


def main() -> None:
    OUT.mkdir(parents=True, exist_ok=True)
    cfg = AppConfig(fixture_mode="replay",
                    fixture_root=str(REPO / "tests" / "fixtures"),
                    reference_year=2024)
    comp = build_components(cfg)
    store = SessionStore(comp)
    client = TestClient(create_app(store))

    r = client.get("/api/examples")
    assert r.status_code == 200, r.text
    dump("examples.json", r.json())

    r = client.post("/api/sessions", json={"question": BERT_QUESTION})
    assert r.status_code == 200, r.text
    create = r.json()
    sid = create["id"]
    dump("create.json", create)

    r = client.post(f"/api/sessions/{sid}/entity-selection",
                    json={"mention_index": 0, "candidate_index": 1})
    assert r.status_code == 200, r.text
    preprint = r.json()
    assert "corr/abs-1810-04805" in preprint["query"]["sparql"]
    dump("tick_preprint.json", preprint)

    r = client.post(f"/api/sessions/{sid}/template-selection",
                    json={"template_index": 2})
    assert r.status_code == 200, r.text
    template = r.json()
    assert template["query"]["sparql"] != preprint["query"]["sparql"]
    dump("tick_template.json", template)

    edited = template["query"]["sparql"] + " LIMIT 1"
    r = client.post(f"/api/sessions/{sid}/query", json={"sparql": edited})
    assert r.status_code == 200, r.text
    run = r.json()
    assert len(run["answers"]["rows"]) == 1, run["answers"]
    dump("run_limit1.json", run)

    # back to the generated query: the multi-row answer list returns, so a
    # preview tick on a non-first URL is observable again
    r = client.post(f"/api/sessions/{sid}/regenerate", json={})
    assert r.status_code == 200, r.text
    regen = r.json()
    assert regen["query"]["origin"] == "generated"
    assert len(regen["answers"]["rows"]) > 1
    dump("regen.json", regen)

    # a template needing two placeholders under a one-mention session:
    # instantiation fails and the query section must report it inline
    r = client.post("/api/sessions", json={"question": BERT_QUESTION})
    assert r.status_code == 200, r.text
    sid2 = r.json()["id"]
    r = client.post(f"/api/sessions/{sid2}/entity-selection",
                    json={"mention_index": 0, "candidate_index": 1})
    assert r.status_code == 200, r.text
    r = client.post(f"/api/sessions/{sid2}/template-selection",
                    json={"template_index": 4})
    assert r.status_code == 200, r.text
    unbound = r.json()
    assert unbound["stage_errors"].get("query", {}).get("error") == "UnboundPlaceholder"
    dump("tick_unbound.json", unbound)

    r = client.post("/api/sessions", json={"question": ASK_QUESTION})
    assert r.status_code == 200, r.text
    ask = r.json()
    assert ask["answers"]["boolean"] is True
    dump("ask_session.json", ask)

    r = client.post("/api/sessions", json={"question": ERROR_QUESTION})
    assert r.status_code == 200, r.text
    err = r.json()
    assert "translator" in err["stage_errors"]
    dump("error_session.json", err)


if __name__ == "__main__":
    main()
