import pytest

from fractions import Fraction

from supergerbe.errors import ManifestError
from supergerbe.examples import build_example, emit_example
from supergerbe.manifest import (
    Manifest,
    emit_certificate_doc,
    emit_decomposition_doc,
    emit_manifest,
    parse_certificate_doc,
    parse_decomposition_doc,
    parse_expression,
    parse_manifest,
    parse_tree,
)
from supergerbe.scalars import GaussianRational
from supergerbe.superforms import SuperForm


def test_tree_parser_nesting_and_comments():
    root = parse_tree(
        "a: 1  # comment\n"
        "b:\n"
        "  - [x, y]\n"
        "  - {k: v, l: [1, 2]}\n"
        "c:\n"
        "  d: text with spaces\n")
    m = root.expect_map()
    assert m["a"].expect_str() == "1"
    items = m["b"].expect_list()
    assert [n.expect_str() for n in items[0].expect_list()] == ["x", "y"]
    inner = items[1].expect_map()
    assert inner["k"].expect_str() == "v"
    assert m["c"].expect_map()["d"].expect_str() == "text with spaces"


def test_tree_parser_reports_located_errors():
    with pytest.raises(ManifestError) as exc:
        parse_tree("a:\n   b: 1\n")
    assert exc.value.line == 2
    with pytest.raises(ManifestError) as exc:
        parse_tree("a: 1\na: 2\n")
    assert exc.value.line == 2


def test_expression_parser_numbers_and_symbols():
    ring = build_example("pit_s1").cover.ring
    v = parse_expression("3/2*tau**-1*c1 + (1+2i)*s1 - i", ring)
    c = v.coefficient(((), (), ()))
    assert c.coefficient_of(-1, {"c1": 1}) == GaussianRational(Fraction(3, 2))
    assert c.coefficient_of(0, {"s1": 1}) == GaussianRational(1, 2)
    assert c.coefficient_of(0, {}) == GaussianRational(0, -1)
    w = parse_expression("th1*dth1*e1", ring)
    assert w.degree() == 2 and w.parity() == 0


def test_expression_parser_rejects_floats_and_unknowns():
    ring = build_example("pit_s1").cover.ring
    with pytest.raises(ManifestError):
        parse_expression("0.5*e1", ring)
    with pytest.raises(ManifestError):
        parse_expression("1e3", ring)
    with pytest.raises(ManifestError):
        parse_expression("zz + 1", ring)
    with pytest.raises(ManifestError):
        parse_expression("e1/(e1)", ring)


def test_wedge_via_star_and_power():
    ring = build_example("pit_s1").cover.ring
    v = parse_expression("dth1**2", ring)
    assert v == SuperForm.dtheta(ring, "th1") * SuperForm.dtheta(ring, "th1")
    assert parse_expression("e1^e1", ring).is_zero()


@pytest.mark.parametrize("name", ["r2_3", "s1", "pit_s1", "t2"])
def test_manifest_round_trip(name):
    text = emit_example(name)
    man = parse_manifest(text)
    assert emit_manifest(man) == text
    again = parse_manifest(emit_manifest(man))
    assert emit_manifest(again) == text


def test_examples_list_names_enough_entries():
    from supergerbe.examples import example_names
    names = example_names()
    assert len(names) >= 8
    assert "t3" in names and "pit_t3" in names


def test_manifest_rejects_bad_pou():
    text = emit_example("s1").replace(
        "U0: 1/3 + 1/3*c1", "U0: 1/3 + 1/3*c1 + a1_0")
    with pytest.raises(ManifestError) as exc:
        parse_manifest(text)
    assert "partition of unity" in str(exc.value)


def test_manifest_rejects_odd_parity_component():
    pit = build_example("pit_s1")
    bare = emit_manifest(Manifest("bad", pit.cover, {}, {}))
    text = bare + "\n".join([
        "objects:", "  gerbes:", "    bad:", "      b:",
        "        - {tuple: [U0], value: dth1*e1}", ""])
    with pytest.raises(ManifestError) as exc:
        parse_manifest(text)
    assert "parity" in str(exc.value)
    assert "b" in str(exc.value)


def test_manifest_rejects_unknown_tuple():
    pit = build_example("pit_s1")
    bare = emit_manifest(Manifest("bad", pit.cover, {}, {}))
    text = bare + "\n".join([
        "objects:", "  gerbes:", "    bad:", "      h:",
        "        - {tuple: [U0, U1, U2], value: 1}", ""])
    with pytest.raises(ManifestError):
        parse_manifest(text)


def test_certificate_doc_round_trip():
    t2 = build_example("t2")
    g = t2.gerbes["i_exact_trig"]
    cert = g.trivialize()
    doc = emit_certificate_doc(cert, t2.name, "i_exact_trig")
    man = parse_manifest(emit_example("t2"))
    gname, parsed = parse_certificate_doc(doc, man.cover)
    assert gname == "i_exact_trig"
    assert man.gerbes["i_exact_trig"].verify_certificate(parsed).passed
    assert emit_certificate_doc(parsed, t2.name, gname) == doc


def test_decomposition_doc_round_trip():
    from supergerbe.bodysoul import decompose
    pit = build_example("pit_s1")
    g = pit.gerbes["i_soul"]
    res = decompose(g)
    doc = emit_decomposition_doc(res, pit.name, "i_soul")
    man = parse_manifest(emit_example("pit_s1"))
    gname, parsed = parse_decomposition_doc(doc, man.cover)
    assert gname == "i_soul"
    assert parsed.verify(man.gerbes["i_soul"]).passed
    assert emit_decomposition_doc(parsed, pit.name, gname) == doc


def test_format_version_enforced():
    text = emit_example("s1").replace("format: 1", "format: 2")
    with pytest.raises(ManifestError):
        parse_manifest(text)
