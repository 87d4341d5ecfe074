import json
import subprocess
import sys
import threading
from http.server import BaseHTTPRequestHandler, HTTPServer
from urllib.parse import parse_qs, urlparse

import jsonschema
import pytest

from moddeg.shell import (
    CurveRecordRow,
    MappingError,
    TableError,
    fetch_lmfdb,
    load_curves,
    make_report,
    parse_curves,
    serialize,
    shipped_table,
)
from moddeg.shell import cli, reports
from moddeg.shell.tables import COLUMNS, parse_row

HEADER = ",".join(COLUMNS)

# a rank >= 28 curve of huge height: parses and round-trips as data
BIG = ("1", "-1", "1", "-20067762415575526585033208209338542750930230312178956502",
       "34481611795030556467032985690390720374855944359319180361266008296291939448732243429")


# -- tables -------------------------------------------------------------------


def test_shipped_table_round_trip(rows):
    assert len(rows) == 5114
    assert parse_curves(serialize(rows)) == rows
    assert shipped_table().read_text() == serialize(rows)


def test_row_types(rows):
    r = rows[0]
    assert r == CurveRecordRow("11a1", (0, -1, 1, -10, -20), 11, 0, 5, 1, None)
    assert r.curve().ingested.modular_degree == 1


def test_paper_curve_row():
    (r,) = parse_curves(HEADER + "\n3315a?,1,1,1,-71,-196,3315,2,,,4\n")
    assert r.ainvs == (1, 1, 1, -71, -196)
    assert r.rank == 2 and r.selmer2_rank == 4
    assert r.torsion is None and r.degree is None


def test_big_curve_round_trip():
    text = HEADER + "\nbig," + ",".join(BIG) + ",1,28,,,\n"
    rows = parse_curves(text, validate=False)
    assert rows[0].ainvs[3] == int(BIG[3])
    assert parse_curves(serialize(rows), validate=False) == rows


def test_comments_and_blank_lines():
    text = "# a comment\n\n" + HEADER + "\n# another\n11a1,0,-1,1,-10,-20,11,0,5,1,\n\n"
    assert [r.label for r in parse_curves(text)] == ["11a1"]


@pytest.mark.parametrize(
    "line, fragment",
    [
        ("11a1,0,-1,1,-10,-20,11,0,5,1", "expected 11 fields"),
        ("11a1,0,-1,1,-10,x,11,0,5,1,", "not an integer"),
        ("11a1,0,0,0,0,0,11,0,,,", "singular"),
        ("11a1,0,-1,1,-10,-20,13,0,5,1,", "good reduction"),
        ("11a1,0,-1,1,-10,-20,11,-1,5,1,", "rank"),
        ("11a1,0,-1,1,-10,-20,0,0,5,1,", "conductor"),
        (",0,-1,1,-10,-20,11,0,5,1,", "empty label"),
        ("11a1,0,-1,1,-10,-20,11,,5,1,", "missing rank"),
        ("11a1,0,-1,1,-10,-20,11,0,0,1,", "torsion"),
    ],
)
def test_bad_rows(line, fragment):
    with pytest.raises(TableError) as ei:
        parse_curves(HEADER + "\n" + line + "\n", "t.csv")
    (n, msg), = ei.value.problems
    assert n == 2
    assert fragment in msg.lower() or fragment in msg


def test_conductor_with_extra_prime_rejected():
    # 11a1 under conductor 11 * 5: the prime 5 does not divide the discriminant
    with pytest.raises(ValueError):
        parse_row("x,0,-1,1,-10,-20,55,0,,,".split(","))
    assert parse_row("x,0,-1,1,-10,-20,55,0,,,".split(","), validate=False).conductor == 55


def test_all_problems_reported_together():
    text = HEADER + "\n11a1,0,-1,1,-10,-20,11,0,5,1,\nbad\n11a1,0,-1,1,-10,-20,11,0,5,1,\n"
    with pytest.raises(TableError) as ei:
        parse_curves(text, "t.csv")
    lines = [n for n, _ in ei.value.problems]
    assert lines == [3, 4]
    assert "duplicate label 11a1 (first on line 2)" in ei.value.problems[1][1]


def test_bad_header_and_missing_file(tmp_path):
    with pytest.raises(TableError):
        parse_curves("label,a1\n")
    with pytest.raises(TableError):
        parse_curves("")
    with pytest.raises(TableError) as ei:
        load_curves(tmp_path / "nope.csv")
    assert "unreadable" in str(ei.value)


# -- LMFDB ------------------------------------------------------------------------


def test_fetch_from_fixture(tmp_path):
    got = fetch_lmfdb(11, 11, network=False, cache_dir=tmp_path)
    assert [r.label for r in got] == ["11a1", "11a2", "11a3"]
    assert got[0].degree == 1 and got[1].degree is None
    assert got.missing == []


def test_fetch_offline_miss(tmp_path):
    got = fetch_lmfdb(12, 13, network=False, cache_dir=tmp_path)
    assert list(got) == [] and got.missing == [12, 13]


def test_fetch_empty_range(tmp_path):
    got = fetch_lmfdb(20, 10, network=False, cache_dir=tmp_path)
    assert list(got) == [] and got.missing == []


def test_mapping_error_saves_payload(tmp_path):
    (tmp_path / "ec_curvedata_N14.json").write_text(json.dumps({"data": [{"ainvs": [1, 0, 1, 4, -6]}]}))
    with pytest.raises(MappingError) as ei:
        fetch_lmfdb(14, 14, network=False, cache_dir=tmp_path)
    assert ei.value.saved_to == tmp_path / "rejected_N14.json"
    assert ei.value.saved_to.exists()


def test_wrong_conductor_in_payload(tmp_path):
    item = {"Clabel": "11a1", "ainvs": [0, -1, 1, -10, -20], "conductor": 11, "rank": 0,
            "torsion": 5, "degree": 1}
    (tmp_path / "ec_curvedata_N15.json").write_text(json.dumps({"data": [item]}))
    with pytest.raises(MappingError):
        fetch_lmfdb(15, 15, network=False, cache_dir=tmp_path)


class _FakeLMFDB(BaseHTTPRequestHandler):
    """Two pages for conductor 37, empty otherwise."""

    hits = []

    def do_GET(self):
        q = parse_qs(urlparse(self.path).query)
        type(self).hits.append(q)
        N = int(q["conductor"][0])
        rows = []
        nxt = None
        if N == 37:
            if "_offset" in q:
                rows = [{"Clabel": "37b1", "lmfdb_label": "37.b2", "ainvs": [0, 1, 1, -23, -50],
                         "conductor": 37, "rank": 0, "torsion": 3, "degree": 2}]
            else:
                rows = [{"Clabel": "37a1", "lmfdb_label": "37.a1", "ainvs": [0, 0, 1, -1, 0],
                         "conductor": 37, "rank": 1, "torsion": 1, "degree": 2}]
                nxt = "/api/ec_curvedata/?conductor=37&_offset=1"
        body = json.dumps({"data": rows, "next": nxt}).encode()
        self.send_response(200)
        self.send_header("Content-Type", "application/json")
        self.end_headers()
        self.wfile.write(body)

    def log_message(self, *args):
        pass


@pytest.fixture
def fake_server():
    srv = HTTPServer(("127.0.0.1", 0), _FakeLMFDB)
    t = threading.Thread(target=srv.serve_forever, daemon=True)
    t.start()
    _FakeLMFDB.hits = []
    yield f"http://127.0.0.1:{srv.server_port}/api/ec_curvedata/"
    srv.shutdown()


def test_fetch_network_pages_and_cache(tmp_path, fake_server):
    got = fetch_lmfdb(37, 37, network=True, cache_dir=tmp_path, base_url=fake_server)
    assert [r.label for r in got] == ["37a1", "37b1"]
    assert len(_FakeLMFDB.hits) == 2
    assert (tmp_path / "ec_curvedata_N37.json").exists()
    # the cached copy answers offline, byte for byte the same records
    again = fetch_lmfdb(37, 37, network=False, cache_dir=tmp_path)
    assert list(again) == list(got)
    assert len(_FakeLMFDB.hits) == 2


def test_fetch_network_failure_is_missing(tmp_path):
    got = fetch_lmfdb(38, 38, network=True, cache_dir=tmp_path,
                      base_url="http://127.0.0.1:9/api/", timeout=2)
    assert got.missing == [38]


# -- reports ----------------------------------------------------------------------


def test_report_schema():
    rep = make_report("x", {"a": 1}, [{"verdict": "pass"}, {"verdict": "fail"}, {"verdict": None}])
    assert rep["summary"] == {"pass": 1, "fail": 1, "inapplicable": 0, "needs-data": 0}
    assert len(rep["input_hash"]) == 64
    reports.validate(json.loads(reports.dumps(rep)))
    with pytest.raises(jsonschema.ValidationError):
        reports.validate({**rep, "extra": 1})
    with pytest.raises(jsonschema.ValidationError):
        make_report("x", {}, [{"verdict": "maybe"}])


def test_input_hash_depends_on_inputs(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    a.write_text("1")
    b.write_text("2")
    assert reports.input_hash([a]) != reports.input_hash([b])
    assert reports.input_hash([a], b"x") != reports.input_hash([a], b"y")
    assert reports.input_hash([a]) == reports.input_hash([a])


# -- command line -----------------------------------------------------------------


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_moddeg_command(capsys):
    code, out, _ = run(capsys, "moddeg", "--curve", "37a1")
    assert code == 0 and out.strip() == "2"
    code, out, _ = run(capsys, "moddeg", "--curve", "389a1", "--json")
    rep = json.loads(out)
    assert rep["results"][0]["modular_degree"] == 40


def test_ss_basis_and_brandt(capsys):
    code, out, _ = run(capsys, "ss-basis", "--p", "11", "--json")
    rep = json.loads(out)
    assert code == 0
    assert [e["w"] for e in rep["results"][0]["basis"]["entries"]] == [3, 2]
    assert rep["results"][0]["mass"] == "5/6"
    code, out, _ = run(capsys, "brandt", "--p", "37", "--ell", "2", "--json")
    assert json.loads(out)["results"][0]["matrix"] == [[1, 1, 1], [1, 0, 2], [1, 2, 0]]


def test_usage_errors(capsys, tmp_path):
    assert run(capsys, "moddeg", "--curve", "nope")[0] == 2
    assert run(capsys, "moddeg")[0] == 2
    assert run(capsys, "moddeg", "--ainvs", "1,2")[0] == 2
    bad = tmp_path / "bad.csv"
    bad.write_text(HEADER + "\nx,0,0,0,0,0,11,0,,,\n")
    code, _, err = run(capsys, "watkins-scan", "--db", str(bad))
    assert code == 2 and "line 2" in err


def test_failing_scan_exits_one(capsys, tmp_path):
    db = tmp_path / "db.csv"
    db.write_text(HEADER + "\n37a1,0,0,1,-1,0,37,1,1,3,\n")
    code, out, _ = run(capsys, "watkins-scan", "--db", str(db), "--json")
    assert code == 1
    assert json.loads(out)["summary"]["fail"] == 1


def test_eigenvector_error_is_reported(capsys, tmp_path):
    db = tmp_path / "db.csv"
    db.write_text(HEADER + "\n11a1,0,-1,1,-10,-20,11,0,5,2,\n")
    code, _, err = run(capsys, "moddeg", "--db", str(db), "--curve", "11a1")
    assert code != 0


def test_report_command(capsys, tmp_path):
    out = tmp_path / "r.json"
    assert run(capsys, "odd-audit", "--max-conductor", "50", "--out", str(out))[0] == 0
    bad = tmp_path / "bad.json"
    bad.write_text("{}")
    code, text, _ = run(capsys, "report", str(out), str(bad))
    assert code == 2
    assert "odd-audit" in text and "invalid report" in text


def test_fetch_command(capsys, tmp_path):
    csv_path = tmp_path / "f.csv"
    code, out, err = run(capsys, "fetch", "--min-conductor", "11", "--max-conductor", "12",
                         "--cache-dir", str(tmp_path), "--csv", str(csv_path), "--json")
    assert code == 0
    rep = json.loads(out)
    assert [r.get("label") for r in rep["results"]] == ["11a1", "11a2", "11a3", None]
    assert rep["summary"]["needs-data"] == 1
    assert len(load_curves(csv_path)) == 3
    assert "12" in err


def _json_of(capsys, *argv):
    code, out, _ = run(capsys, *argv, "--json")
    return code, out


@pytest.mark.parametrize(
    "argv",
    [
        ("watkins-scan", "--max-conductor", "120"),
        ("al-bound", "--max-conductor", "120"),
        ("cp22", "--max-conductor", "120"),
        ("ss-zeroes", "--max-conductor", "150"),
    ],
)
def test_parallel_output_identical(capsys, argv):
    one = _json_of(capsys, *argv, "--workers", "1")
    two = _json_of(capsys, *argv, "--workers", "2")
    assert one == two


def test_console_script_runs():
    out = subprocess.run([sys.executable, "-m", "moddeg", "moddeg", "--curve", "11a1"],
                         capture_output=True, text=True, timeout=120)
    assert out.returncode == 0 and out.stdout.strip() == "1"
