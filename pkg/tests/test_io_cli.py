import json
import os
import random
import re

import pytest

from bolytrope import io
from bolytrope.building import Apartment, ClassSet, ball, ball_around_set, class_of
from bolytrope.cli import main
from bolytrope.lattice import Lattice, SingularMatrixError
from bolytrope.orders import pz_order
from bolytrope.polytrope import ExponentMatrix, ball_order, bolytrope_order, polytrope_points
from bolytrope.suites import SUITES, UnknownSuite, fig2_classes, random_class, random_exponent_matrix, run_suite
from bolytrope.valuation import PAdicContext

C2, C3 = PAdicContext(2), PAdicContext(3)


def write(tmp_path, name, data):
    path = tmp_path / name
    path.write_text(io.dumps(data), encoding="utf-8")
    return str(path)


def lattice_doc(p, basis):
    return {"p": p, "d": len(basis), "basis": [[str(x) for x in row] for row in basis]}


def dot_counts(text):
    nodes = len(re.findall(r"^\s+n\d+ \[", text, re.M))
    edges = len(re.findall(r"^\s+n\d+ -- n\d+;", text, re.M))
    return nodes, edges


# -- round trips ----------------------------------------------------------


def test_round_trips():
    rng = random.Random(0)
    for _ in range(20):
        ctx = rng.choice([C2, C3])
        d = rng.randint(1, 3)
        lat = random_class(rng, ctx, d, 3).rep.scale(rng.randint(-2, 2))
        assert io.lattice_from_data(io.loads(io.dumps(io.to_data(lat)))) == lat
        s = ClassSet(random_class(rng, ctx, d, 3) for _ in range(3))
        assert io.classset_from_data(io.loads(io.dumps(io.to_data(s)))) == s
    m = random_exponent_matrix(rng, 3, 4)
    assert io.exponent_matrix_from_data(io.loads(io.dumps(io.to_data(m)))) == m
    lam = bolytrope_order(C3, None, m, 1)
    assert io.order_from_data(io.loads(io.dumps(io.to_data(lam)))) == lam
    text = io.dumps(io.to_data(lam))
    assert io.dumps(io.to_data(io.order_from_data(io.loads(text)))) == text


def test_non_integral_entries_round_trip():
    lat = Lattice.from_basis(C2, [["1", "0"], ["1/2", "1"]])
    doc = io.to_data(lat)
    assert doc["basis"][1][0] == "1/2"
    assert io.lattice_from_data(doc) == lat


def test_input_validation():
    with pytest.raises(ValueError, match="p must be prime"):
        io.lattice_from_data({"p": 4, "d": 2, "basis": [["1", "0"], ["0", "1"]]})
    with pytest.raises(SingularMatrixError):
        io.lattice_from_data({"p": 2, "d": 2, "basis": [["1", "0"], ["2", "0"]]})
    with pytest.raises(io.FormatError):
        io.loads("{not json")
    with pytest.raises(io.FormatError):
        io.lattice_from_data({"d": 2, "basis": [["1", "0"], ["0", "1"]]})
    with pytest.raises(io.FormatError):
        io.lattice_from_data({"p": 2, "d": 2, "basis": [["1", "0"]]})
    with pytest.raises(io.FormatError):
        io.lattice_from_data({"p": 2, "d": 1, "basis": [["x"]]})
    with pytest.raises(io.FormatError):
        io.exponent_matrix_from_data({"d": 2, "entries": [[0, 1.5], [0, 0]]})
    with pytest.raises(TypeError):
        io.to_data(object())


# -- DOT ------------------------------------------------------------------


def test_dot_singleton():
    text = io.export_dot([class_of(Lattice.standard(C2, 2))])
    assert dot_counts(text) == (1, 0)
    assert text.startswith("graph classes {")
    with pytest.raises(ValueError):
        io.export_dot([])


def test_dot_ball():
    s = ball(class_of(Lattice.standard(C2, 2)), 1)
    assert dot_counts(io.export_dot(s)) == (4, 3)
    # in the standard apartment two neighbors are labelled, one is off it
    text = io.export_dot(s, Apartment.standard(C2, 2))
    assert text.count("*") == 1 and '"(0,1)"' in text and '"(1,0)"' in text


def test_dot_segment_bolytrope(tmp_path):
    apt = Apartment.standard(C2, 2)
    segment = [apt.vertex(u) for u in polytrope_points([[0, 7], [0, 0]])]
    s = ball_around_set(segment, 1)
    path = tmp_path / "fig2.dot"
    text = io.export_dot(s, apt, path=path, highlight=segment)
    assert path.read_text(encoding="utf-8") == text
    nodes, edges = dot_counts(text)
    assert nodes == len(s) == 18
    assert edges == nodes - 1
    assert text.count("palegreen") == 8
    # the three generating classes all appear in the rendered set
    assert ClassSet(fig2_classes()).issubset(s)


# -- suites ---------------------------------------------------------------


def test_run_suite_reports():
    report = run_suite("nonclosed")
    assert report.passed and report.failures() == []
    assert "nonclosed" in report.summary()
    with pytest.raises(UnknownSuite, match="ball-theorem"):
        run_suite("no-such-suite")
    assert {"ball-theorem", "fig1-chain", "d2-classification"} <= set(SUITES)


# -- CLI ------------------------------------------------------------------


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_cli_distance(tmp_path, capsys):
    a = write(tmp_path, "a.json", lattice_doc(2, [[1, 0], [0, 1]]))
    b = write(tmp_path, "b.json", lattice_doc(2, [[1, 0], [0, 8]]))
    code, out, _ = run(capsys, "distance", "--in", a, "--in", b)
    assert code == 0 and json.loads(out) == {"distance": 3}
    code, _, err = run(capsys, "distance", "--in", a)
    assert code == 2 and "expected 2" in err


def test_cli_bad_inputs(tmp_path, capsys):
    bad_p = write(tmp_path, "p4.json", lattice_doc(4, [[1, 0], [0, 1]]))
    sing = write(tmp_path, "sing.json", {"p": 2, "d": 2, "basis": [["1", "0"], ["2", "0"]]})
    junk = tmp_path / "junk.json"
    junk.write_text("{", encoding="utf-8")
    code, _, err = run(capsys, "invariant-lattices", "--in", bad_p)
    assert code == 2
    code, _, err = run(capsys, "pz", "--in", bad_p)
    assert code == 2 and "p must be prime" in err
    code, _, err = run(capsys, "pz", "--in", sing)
    assert code == 2 and "singular" in err
    code, _, err = run(capsys, "pz", "--in", str(junk))
    assert code == 2 and "malformed JSON" in err
    code, _, err = run(capsys, "pz", "--in", str(tmp_path / "missing.json"))
    assert code == 2 and "no such file" in err
    code, _, err = run(capsys, "bolytrope-order", "--p", "2", "--matrix", "[[0,0],[-1,0]]")
    assert code == 2


def test_cli_order_pipeline(tmp_path, capsys):
    # pz of two apartment vertices, then its invariant classes and chain
    a = write(tmp_path, "a.json", lattice_doc(2, [[1, 0], [0, 1]]))
    b = write(tmp_path, "b.json", lattice_doc(2, [[1, 0], [0, 2]]))
    out_path = tmp_path / "order.json"
    code, out, _ = run(capsys, "pz", "--in", a, "--in", b, "--out", str(out_path))
    assert code == 0 and out == ""
    order = io.order_from_data(io.read_json(out_path))
    assert order == pz_order([class_of(io.lattice_from_data(io.read_json(a))),
                              class_of(io.lattice_from_data(io.read_json(b)))])
    code, out, _ = run(capsys, "invariant-lattices", "--in", str(out_path))
    assert code == 0 and len(io.classset_from_data(json.loads(out))) == 2
    code, out, _ = run(capsys, "radical-chain", "--in", str(out_path))
    chain = json.loads(out)
    assert code == 0 and len(chain["orders"]) == len(chain["class_sets"]) == 1


def test_cli_order_constructors(capsys):
    code, out, _ = run(capsys, "ball-order", "--p", "3", "--d", "2", "--r", "1")
    assert code == 0
    assert io.order_from_data(json.loads(out)) == ball_order(C3, Lattice.standard(C3, 2), 1)
    code, out, _ = run(capsys, "bolytrope-order", "--p", "2", "--r", "1", "--matrix", "[[0,3],[0,0]]")
    assert code == 0
    assert io.order_from_data(json.loads(out)) == bolytrope_order(C2, None, ExponentMatrix(((0, 3), (0, 0))), 1)
    code, _, err = run(capsys, "ball-order", "--p", "3", "--d", "2")
    assert code == 2 and "--r" in err


def test_cli_canonical_d2(tmp_path, capsys):
    order = write(tmp_path, "fig2.json", io.to_data(pz_order(fig2_classes())))
    code, out, _ = run(capsys, "canonical-d2", "--in", order)
    doc = json.loads(out)
    assert code == 0 and (doc["r"], doc["m"]) == (1, 7)


def test_cli_export_dot(tmp_path, capsys):
    code, out, _ = run(capsys, "export-dot", "--p", "2", "--r", "1", "--matrix", "[[0,7],[0,0]]")
    assert code == 0 and dot_counts(out) == (18, 17)
    s = write(tmp_path, "s.json", io.to_data(ball(class_of(Lattice.standard(C2, 2)), 1)))
    code, out, _ = run(capsys, "export-dot", "--in", s, "--standard-apartment")
    assert code == 0 and dot_counts(out) == (4, 3) and "*" in out


def test_cli_cap(capsys, monkeypatch):
    monkeypatch.delenv("BOLYTROPE_CAP", raising=False)
    code, _, err = run(capsys, "export-dot", "--p", "3", "--r", "2", "--matrix", "[[0,0,0],[0,0,0],[0,0,0]]",
                       "--cap", "20")
    assert code == 3 and "cap" in err
    assert "BOLYTROPE_CAP" not in os.environ


def test_cli_verify(capsys):
    code, out, _ = run(capsys, "verify", "nonclosed")
    assert code == 0 and "nonclosed" in out
    code, _, err = run(capsys, "verify", "bogus")
    assert code == 2 and "available" in err and "fig1-chain" in err


def test_cli_verify_failure_exit_code(capsys, monkeypatch):
    from bolytrope import suites

    def failing(rng):
        return [suites.Check("always", False, "forced")]

    monkeypatch.setitem(suites.SUITES, "nonclosed", failing)
    code, out, _ = run(capsys, "verify", "nonclosed")
    assert code == 1 and "FAIL" in out


def test_cli_output_is_byte_identical(tmp_path, capsys):
    argv = ["bolytrope-order", "--p", "3", "--r", "2", "--matrix", "[[0,2,1],[1,0,1],[0,1,0]]"]
    outs = []
    for k in range(2):
        path = tmp_path / f"o{k}.json"
        assert main(argv + ["--out", str(path)]) == 0
        outs.append(path.read_bytes())
    assert outs[0] == outs[1]
    capsys.readouterr()
