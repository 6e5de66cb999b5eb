import json

from coneforms.report import (CheckRecord, ReportDocument, failing, passing,
                              verdict)


def test_record_constructors():
    assert passing("a", "x = y", {}).passed
    assert not failing("a", "x = y", {}, "oops").passed
    assert verdict("a", "s", {}, True).status == "PASS"
    assert verdict("a", "s", {}, False, "w").witness == "w"


def test_document_summary_and_renderings():
    doc = ReportDocument({"n": 4})
    doc.extend([passing("one", "a = b", {"n": 4}, constants={"c": 3}),
                failing("two", "c = d", {"n": 4}, "residual x")])
    s = doc.summary()
    assert (s["total"], s["passed"], s["failed"]) == (2, 1, 1)
    text = doc.to_text()
    assert "PASS" in text and "FAIL" in text and "residual x" in text
    payload = json.loads(doc.to_json())
    assert payload["summary"]["failed"] == 1
    assert payload["checks"][0]["anchor"] == "a = b"
    assert payload["checks"][0]["constants"]["c"] == "3"


def test_json_is_key_sorted_and_stable():
    doc = ReportDocument({"b": 1, "a": 2})
    j1, j2 = doc.to_json(), doc.to_json()
    assert j1 == j2
    data = json.loads(j1)
    assert list(data["config"]) == sorted(data["config"])
