import io

import pytest

from intervalir.exceptions import ContractError, DegenerateTopicError, ParseError
from intervalir.trec_io import (
    JudgedRun,
    QrelsTable,
    RecallBase,
    RetrievalRecord,
    judge_and_cut,
    parse_qrels,
    parse_run_file,
    recall_base,
    recall_bases,
)


def test_empty_run_stream():
    assert parse_run_file(b"") == []


def test_parse_run_line():
    (rec,) = parse_run_file(b"401 Q0 FT911-3 1 12.5 sysA\n")
    assert rec == RetrievalRecord("401", "FT911-3", 1, 12.5, "sysA")


def test_parse_run_accepts_streams_and_paths(tmp_path):
    text = "401 q0 d1 1 1.0 s\n\n401 Q0 d2 2 0.5 s\n"
    assert len(parse_run_file(io.StringIO(text))) == 2
    path = tmp_path / "r.txt"
    path.write_text(text)
    assert [r.doc_id for r in parse_run_file(path)] == ["d1", "d2"]


@pytest.mark.parametrize("line, fragment", [
    (b"401 Q0 FT911-3 one 12.5 sysA", "invalid rank"),
    (b"401 Q0 FT911-3 1 high sysA", "invalid score"),
    (b"401 Q0 FT911-3 1 12.5", "expected 6 columns"),
    (b"401 Q0 FT911-3 -1 12.5 sysA", "negative rank"),
])
def test_malformed_run_lines(line, fragment):
    with pytest.raises(ParseError, match=fragment) as info:
        parse_run_file(line)
    assert info.value.line == 1


def test_duplicate_document_in_run_reports_line(tmp_path):
    path = tmp_path / "dup.run"
    path.write_text("1 Q0 a 1 2 s\n1 Q0 b 2 1 s\n1 Q0 a 3 0 s\n")
    with pytest.raises(ParseError) as info:
        parse_run_file(path)
    assert info.value.line == 3
    assert str(path) in str(info.value)


def test_same_document_in_different_systems_is_fine():
    recs = parse_run_file(b"1 Q0 a 1 2 s\n1 Q0 a 1 2 t\n")
    assert len(recs) == 2


def test_parse_qrels():
    assert parse_qrels(b"").judgments == {}
    table = parse_qrels(b"401 0 FT911-3 2\n")
    assert table.grade("401", "FT911-3") == 2
    assert table.grade("401", "unjudged") is None


def test_qrels_conflict_and_repeat():
    with pytest.raises(ParseError, match="conflicting"):
        parse_qrels(b"401 0 d 1\n401 0 d 2\n")
    assert parse_qrels(b"401 0 d 1\n401 0 d 1\n").judgments == {("401", "d"): 1}


def test_qrels_malformed():
    with pytest.raises(ParseError):
        parse_qrels(b"401 0 d\n")
    with pytest.raises(ParseError):
        parse_qrels(b"401 0 d x\n")


def test_recall_bases():
    q = parse_qrels(b"1 0 a 1\n1 0 b 2\n1 0 c 0\n2 0 x 0\n")
    assert recall_base(q, "1") == RecallBase("1", 2)
    assert recall_bases(q) == {"1": 2}
    with pytest.raises(DegenerateTopicError):
        recall_base(q, "2")
    with pytest.raises(DegenerateTopicError):
        recall_base(q, "3")
    with pytest.raises(DegenerateTopicError):
        RecallBase("1", 0)


def test_judge_and_cut_orders_by_score_and_pads():
    recs = parse_run_file(b"1 Q0 a 1 1.0 s\n1 Q0 b 2 3.0 s\n1 Q0 c 3 2.0 s\n")
    q = parse_qrels(b"1 0 a 1\n1 0 b 1\n")
    (run,) = judge_and_cut(recs, q, 5)
    assert run.gains == (1, 0, 1, 0, 0)
    (cut,) = judge_and_cut(recs, q, 2)
    assert cut.gains == (1, 0)


def test_judge_and_cut_breaks_score_ties_by_doc_id():
    recs = parse_run_file(b"1 Q0 a 1 1.0 s\n1 Q0 b 2 1.0 s\n")
    q = parse_qrels(b"1 0 b 1\n")
    (run,) = judge_and_cut(recs, q, 2)
    assert run.gains == (1, 0)


def test_judge_and_cut_strict_mapping():
    recs = parse_run_file(b"1 Q0 a 1 2.0 s\n1 Q0 b 2 1.0 s\n")
    q = parse_qrels(b"1 0 a 1\n1 0 b 2\n")
    assert judge_and_cut(recs, q, 2)[0].gains == (1, 1)
    assert judge_and_cut(recs, q, 2, lenient=False)[0].gains == (0, 1)


def test_judge_and_cut_unjudged_topic_warns(caplog):
    recs = parse_run_file(b"9 Q0 a 1 2.0 s\n")
    (run,) = judge_and_cut(recs, QrelsTable({}), 3)
    assert run.gains == (0, 0, 0)
    assert "no judgments" in caplog.text


def test_judge_and_cut_rejects_bad_cutoff():
    with pytest.raises(ContractError):
        judge_and_cut([], QrelsTable({}), 0)


def test_judged_run_validation():
    with pytest.raises(ContractError):
        JudgedRun("1", "s", (0, 2))
    assert JudgedRun("1", "s", (1, 0, 1)).relevant == 2
