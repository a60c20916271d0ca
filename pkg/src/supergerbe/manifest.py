"""Manifest text format: one supermanifold-with-cover plus named objects.

The grammar is an indented key tree (2 spaces per level) with inline lists
``[a, b]`` and inline maps ``{k: v}``; comments run from ``#`` to end of
line.  Number literals are exact: ``n``, ``n/m``, ``ni``, ``n/mi`` -- no
floating point is ever accepted or emitted.  Expressions use ``+ - * / **``
and parentheses over generators, ``tau``, ``i``, odd generators ``thJ`` with
differentials ``dthJ``, and the declared 1-form symbols.

Documents carry ``format: 1`` and a ``kind`` of ``manifold``, ``certificate``
or ``decomposition``.
"""

from __future__ import annotations

import re

from fractions import Fraction

from .cover import CechFamily, Cover
from .errors import ManifestError
from .gerbes import GerbeCocycle, TrivializationCertificate
from .scalars import GaussianRational, Ring, Scalar
from .superforms import SuperForm

__all__ = [
    "Manifest",
    "parse_manifest",
    "emit_manifest",
    "parse_certificate_doc",
    "emit_certificate_doc",
    "parse_decomposition_doc",
    "emit_decomposition_doc",
    "parse_expression",
]

FORMAT_VERSION = "1"


class Node:
    """Parsed tree node: value is a dict[str, Node], list[Node], or str."""

    __slots__ = ("value", "line")

    def __init__(self, value, line: int):
        self.value = value
        self.line = line

    def expect_map(self) -> dict:
        if not isinstance(self.value, dict):
            raise ManifestError("expected a keyed block", line=self.line)
        return self.value

    def expect_list(self) -> list:
        if not isinstance(self.value, list):
            raise ManifestError("expected a list", line=self.line)
        return self.value

    def expect_str(self) -> str:
        if not isinstance(self.value, str):
            raise ManifestError("expected a scalar value", line=self.line)
        return self.value

    def get(self, key: str, default=None):
        m = self.expect_map()
        return m.get(key, default)

    def require(self, key: str) -> "Node":
        m = self.expect_map()
        if key not in m:
            raise ManifestError(f"missing key {key!r}", line=self.line)
        return m[key]


# ------------------------------------------------------------------ low level


def _strip_comment(line: str) -> str:
    out = []
    depth = 0
    for ch in line:
        if ch in "[{":
            depth += 1
        elif ch in "]}":
            depth -= 1
        elif ch == "#" and depth == 0:
            break
        out.append(ch)
    return "".join(out).rstrip()


def _parse_inline(text: str, line: int):
    text = text.strip()
    if text.startswith("["):
        items, pos = _parse_inline_list(text, 0, line)
        if text[pos:].strip():
            raise ManifestError("trailing text after list", line=line)
        return items
    if text.startswith("{"):
        items, pos = _parse_inline_map(text, 0, line)
        if text[pos:].strip():
            raise ManifestError("trailing text after map", line=line)
        return items
    return text


def _parse_inline_value(text: str, pos: int, line: int):
    while pos < len(text) and text[pos] == " ":
        pos += 1
    if pos < len(text) and text[pos] == "[":
        return _parse_inline_list(text, pos, line)
    if pos < len(text) and text[pos] == "{":
        return _parse_inline_map(text, pos, line)
    depth = 0
    start = pos
    while pos < len(text):
        ch = text[pos]
        if ch in "[{":
            depth += 1
        elif ch in "]}":
            if depth == 0:
                break
            depth -= 1
        elif ch == "," and depth == 0:
            break
        pos += 1
    return text[start:pos].strip(), pos


def _parse_inline_list(text: str, pos: int, line: int):
    assert text[pos] == "["
    pos += 1
    out = []
    while True:
        while pos < len(text) and text[pos] in " ,":
            pos += 1
        if pos >= len(text):
            raise ManifestError("unterminated [", line=line)
        if text[pos] == "]":
            return out, pos + 1
        val, pos = _parse_inline_value(text, pos, line)
        out.append(Node(val, line))


def _parse_inline_map(text: str, pos: int, line: int):
    assert text[pos] == "{"
    pos += 1
    out: dict[str, Node] = {}
    while True:
        while pos < len(text) and text[pos] in " ,":
            pos += 1
        if pos >= len(text):
            raise ManifestError("unterminated {", line=line)
        if text[pos] == "}":
            return out, pos + 1
        m = re.match(r"[A-Za-z_][A-Za-z_0-9]*", text[pos:])
        if not m:
            raise ManifestError(f"expected key in inline map near {text[pos:]!r}",
                                line=line)
        key = m.group(0)
        pos += m.end()
        while pos < len(text) and text[pos] == " ":
            pos += 1
        if pos >= len(text) or text[pos] != ":":
            raise ManifestError(f"expected ':' after key {key!r}", line=line)
        pos += 1
        val, pos = _parse_inline_value(text, pos, line)
        out[key] = Node(val, line)


def parse_tree(text: str) -> Node:
    """Parse the indented key tree into nested Nodes."""
    lines = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        stripped = _strip_comment(raw)
        if not stripped.strip():
            continue
        indent = len(stripped) - len(stripped.lstrip(" "))
        if indent % 2:
            raise ManifestError("odd indentation", line=lineno)
        lines.append((lineno, indent // 2, stripped.strip()))

    def parse_block(idx: int, level: int):
        entries = []
        is_list = None
        while idx < len(lines):
            lineno, lvl, content = lines[idx]
            if lvl < level:
                break
            if lvl > level:
                raise ManifestError("unexpected indentation", line=lineno)
            if content.startswith("- "):
                kind = "list"
                payload = content[2:].strip()
            elif content == "-":
                kind = "list"
                payload = ""
            else:
                kind = "map"
                payload = content
            if is_list is None:
                is_list = kind == "list"
            elif is_list != (kind == "list"):
                raise ManifestError("mixed list and map entries", line=lineno)
            idx += 1
            if kind == "list":
                if payload:
                    entries.append(Node(_parse_inline(payload, lineno), lineno))
                else:
                    child, idx = parse_block(idx, level + 1)
                    entries.append(child)
            else:
                m = re.match(r"([A-Za-z_][A-Za-z_0-9]*)\s*:\s*(.*)$", payload)
                if not m:
                    raise ManifestError(f"expected 'key: value', got {payload!r}",
                                        line=lineno)
                key, rest = m.group(1), m.group(2).strip()
                if rest:
                    entries.append((key, Node(_parse_inline(rest, lineno), lineno)))
                else:
                    child, idx = parse_block(idx, level + 1)
                    entries.append((key, child))
        if is_list:
            return Node(entries, lines[0][0] if lines else 0), idx
        out: dict[str, Node] = {}
        for key, val in entries:
            if key in out:
                raise ManifestError(f"duplicate key {key!r}", line=val.line)
            out[key] = val
        return Node(out, entries[0][1].line if entries else 0), idx

    root, idx = parse_block(0, 0)
    if idx != len(lines):
        raise ManifestError("unexpected trailing content", line=lines[idx][0])
    return root


# -------------------------------------------------------------- expressions

_TOKEN = re.compile(
    r"\s*(?:(?P<number>(?:\d+(?:/\d+)?i?|i)(?![A-Za-z_0-9]))"
    r"|(?P<ident>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>\*\*|[-+*/^()]))")
_FLOAT = re.compile(r"\d+\.\d*|\.\d+|\d+[eE][-+]?\d+")


def _tokenize(text: str, line: int):
    if _FLOAT.search(text):
        raise ManifestError(
            f"floating-point literal rejected in {text!r}", line=line)
    pos = 0
    out = []
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            if text[pos:].strip():
                raise ManifestError(
                    f"cannot tokenize expression near {text[pos:]!r}", line=line)
            break
        pos = m.end()
        if m.group("number"):
            out.append(("num", m.group("number")))
        elif m.group("ident"):
            out.append(("ident", m.group("ident")))
        else:
            op = m.group("op")
            out.append(("op", "*" if op == "^" else op))
    return out


class _ExprParser:
    def __init__(self, tokens, ring: Ring, line: int):
        self.tokens = tokens
        self.pos = 0
        self.ring = ring
        self.line = line

    def peek(self):
        return self.tokens[self.pos] if self.pos < len(self.tokens) else (None, None)

    def take(self):
        tok = self.peek()
        self.pos += 1
        return tok

    def fail(self, msg):
        raise ManifestError(msg, line=self.line)

    def parse(self) -> SuperForm:
        v = self.expr()
        if self.pos != len(self.tokens):
            self.fail(f"unexpected token {self.peek()[1]!r}")
        return v

    def expr(self) -> SuperForm:
        v = self.term()
        while self.peek() == ("op", "+") or self.peek() == ("op", "-"):
            op = self.take()[1]
            rhs = self.term()
            v = v + rhs if op == "+" else v - rhs
        return v

    def term(self) -> SuperForm:
        v = self.power()
        while self.peek()[0] == "op" and self.peek()[1] in ("*", "/"):
            op = self.take()[1]
            rhs = self.power()
            if op == "*":
                v = v * rhs
            else:
                v = v * SuperForm.from_scalar(self._as_unit(rhs))
        return v

    def power(self) -> SuperForm:
        v = self.unary()
        if self.peek() == ("op", "**"):
            self.take()
            neg = False
            if self.peek() == ("op", "-"):
                self.take()
                neg = True
            kind, text = self.take()
            if kind != "num" or not text.isdigit():
                self.fail("exponent must be an integer literal")
            k = int(text)
            if neg:
                s = self._as_scalar(v).try_invert()
                v = SuperForm.from_scalar(s)
            out = SuperForm.from_scalar(self.ring.one())
            for _ in range(k):
                out = out * v
            return out
        return v

    def unary(self) -> SuperForm:
        if self.peek() == ("op", "-"):
            self.take()
            return -self.unary()
        if self.peek() == ("op", "+"):
            self.take()
            return self.unary()
        return self.atom()

    def atom(self) -> SuperForm:
        kind, text = self.take()
        ring = self.ring
        if kind == "num":
            return SuperForm.from_scalar(ring.scalar(self._number(text)))
        if kind == "op" and text == "(":
            v = self.expr()
            if self.take() != ("op", ")"):
                self.fail("expected ')'")
            return v
        if kind == "ident":
            if text == "tau":
                return SuperForm.from_scalar(ring.tau())
            if text in ring.gen_index:
                return SuperForm.from_scalar(ring.gen(text))
            if text in ring.odd_index:
                return SuperForm.theta(ring, text)
            if text in ring.symbol_index:
                return SuperForm.dx(ring, text)
            if text.startswith("d") and text[1:] in ring.odd_index:
                return SuperForm.dtheta(ring, text[1:])
            self.fail(f"unknown symbol {text!r}")
        self.fail(f"unexpected token {text!r}")

    def _number(self, text: str) -> GaussianRational:
        if text == "i":
            return GaussianRational(0, 1)
        if text.endswith("i"):
            return GaussianRational(0, Fraction(text[:-1]))
        return GaussianRational(Fraction(text))

    def _as_scalar(self, v: SuperForm) -> Scalar:
        if any(m != ((), (), ()) for m in v.terms):
            self.fail("expected a pure scalar expression")
        return v.coefficient(((), (), ()))

    def _as_unit(self, v: SuperForm) -> Scalar:
        try:
            return self._as_scalar(v).try_invert()
        except Exception as e:
            self.fail(f"division by a non-unit: {e}")


def parse_expression(text: str, ring: Ring, line: int = 0) -> SuperForm:
    return _ExprParser(_tokenize(text, line), ring, line).parse()


def _parse_scalar(node: Node, ring: Ring) -> Scalar:
    form = parse_expression(node.expect_str(), ring, node.line)
    for m in form.terms:
        if m != ((), (), ()):
            raise ManifestError("expected a scalar expression", line=node.line)
    return form.coefficient(((), (), ()))


def _parse_constant(node: Node, ring: Ring) -> GaussianRational:
    s = _parse_scalar(node, ring)
    v = s.constant_value()
    if v is None:
        raise ManifestError("expected an exact constant", line=node.line)
    return v


# ------------------------------------------------------------------ manifests


class Manifest:
    """A parsed manifold document: cover plus named forms and gerbes."""

    def __init__(self, name: str, cover: Cover, forms: dict, gerbes: dict):
        self.name = name
        self.cover = cover
        self.forms = forms
        self.gerbes = gerbes


def _check_format(root: Node, want_kind: str):
    fmt = root.require("format").expect_str()
    if fmt != FORMAT_VERSION:
        raise ManifestError(f"unsupported format {fmt!r}",
                            line=root.require("format").line)
    kind = root.get("kind")
    kind_s = kind.expect_str() if kind is not None else "manifold"
    if kind_s != want_kind:
        raise ManifestError(f"expected a {want_kind} document, got {kind_s!r}",
                            line=root.line)


def parse_manifest(text: str, validate: bool = True) -> Manifest:
    root = parse_tree(text)
    _check_format(root, "manifold")
    name = root.require("name").expect_str()

    ring_node = root.require("ring")
    gen_entries = []
    for entry in ring_node.require("generators").expect_list():
        m = entry.expect_map()
        gname = entry.require("name").expect_str()
        gen_entries.append((gname, entry))
    odd_node = ring_node.get("odd_generators")
    odd = [n.expect_str() for n in odd_node.expect_list()] if odd_node else []
    sym_node = ring_node.get("form_symbols")
    syms = [n.expect_str() for n in sym_node.expect_list()] if sym_node else []
    ring = Ring([g for g, _ in gen_entries], odd_generators=odd, form_symbols=syms)

    for gname, entry in gen_entries:
        diff_text = entry.require("diff").expect_str()
        diff = parse_expression(diff_text, ring, entry.require("diff").line)
        table = {}
        for mono, s in diff.terms.items():
            if mono == ((), (), ()):
                if not s.is_zero():
                    raise ManifestError(
                        f"diff of {gname!r} must be a 1-form", line=entry.line)
                continue
            if mono[0] or mono[2] or len(mono[1]) != 1:
                raise ManifestError(
                    f"diff of {gname!r} must combine coordinate 1-form symbols",
                    line=entry.line)
            table[ring.form_symbols[mono[1][0]]] = s
        ring.set_derivation(gname, table)
        charts_node = entry.get("charts")
        if charts_node is not None:
            ring.set_generator_charts(
                gname, [n.expect_str() for n in charts_node.expect_list()])
    rel_node = ring_node.get("relations")
    if rel_node is not None:
        for entry in rel_node.expect_list():
            lhs = _parse_scalar(entry.require("lhs"), ring)
            rhs = _parse_scalar(entry.require("rhs"), ring)
            try:
                ring.add_relation(lhs, rhs)
            except Exception as e:
                raise ManifestError(str(e), line=entry.line)
    try:
        ring.finalize()
    except Exception as e:
        raise ManifestError(f"ring declaration invalid: {e}", line=ring_node.line)

    cover_node = root.require("cover")
    charts = [n.expect_str() for n in cover_node.require("charts").expect_list()]
    nerve = [tuple(x.expect_str() for x in n.expect_list())
             for n in cover_node.require("nerve").expect_list()]
    substitutions = {}
    subs_node = cover_node.get("substitutions")
    if subs_node is not None:
        for entry in subs_node.expect_list():
            to = entry.require("to").expect_str()
            frm = entry.require("from").expect_str()
            rule = {g: _parse_scalar(v, ring)
                    for g, v in entry.require("map").expect_map().items()}
            substitutions[(to, frm)] = rule
    pou = {}
    pou_node = cover_node.get("partition_of_unity")
    if pou_node is not None:
        pou = {c: _parse_scalar(v, ring) for c, v in pou_node.expect_map().items()}
    centers = {}
    centers_node = cover_node.get("star_centers")
    if centers_node is not None:
        for c, table in centers_node.expect_map().items():
            centers[c] = {g: _parse_constant(v, ring)
                          for g, v in table.expect_map().items()}
    cycle = None
    cyc_node = cover_node.get("fundamental_cycle")
    if cyc_node is not None:
        cycle = []
        for entry in cyc_node.expect_list():
            t = tuple(x.expect_str() for x in entry.require("tuple").expect_list())
            coef = int(entry.require("coeff").expect_str())
            cycle.append((t, coef))
    try:
        cover = Cover(ring, charts, nerve, substitutions, pou, centers,
                      fundamental_cycle=cycle, name=name)
    except Exception as e:
        raise ManifestError(f"cover declaration invalid: {e}", line=cover_node.line)
    if validate:
        rep = cover.validate()
        if not rep.passed:
            fail = rep.first_failure()
            raise ManifestError(
                f"cover failed validation: {fail[0]}"
                + (f" ({fail[1]})" if fail[1] else ""), line=cover_node.line)

    forms: dict[str, SuperForm] = {}
    gerbes: dict[str, GerbeCocycle] = {}
    obj_node = root.get("objects")
    if obj_node is not None:
        forms_node = obj_node.get("forms")
        if forms_node is not None:
            for fname, v in forms_node.expect_map().items():
                forms[fname] = parse_expression(v.expect_str(), ring, v.line)
        gerbes_node = obj_node.get("gerbes")
        if gerbes_node is not None:
            for gname, gnode in gerbes_node.expect_map().items():
                gerbes[gname] = _parse_gerbe(gnode, cover, gname)
    return Manifest(name, cover, forms, gerbes)


def _parse_family(node: Node | None, cover: Cover, level: int,
                  expect_degree: int, label: str) -> CechFamily:
    comps = {t: SuperForm.zero(cover.ring) for t in cover.tuples(level)}
    if node is not None:
        for entry in node.expect_list():
            t = tuple(x.expect_str() for x in entry.require("tuple").expect_list())
            if t not in cover.nerve or len(t) != level:
                raise ManifestError(f"{label}: {t} is not a level-{level} nerve tuple",
                                    line=entry.line)
            vnode = entry.require("value")
            v = parse_expression(vnode.expect_str(), cover.ring, vnode.line)
            if not v.is_zero():
                if v.degree() != expect_degree:
                    raise ManifestError(
                        f"{label}{t}: expected a {expect_degree}-form",
                        line=entry.line)
                if not v.is_even():
                    raise ManifestError(
                        f"{label}{t}: component must have even parity",
                        line=entry.line)
            comps[t] = v
    return CechFamily(cover, level, comps)


def _parse_gerbe(node: Node, cover: Cover, name: str) -> GerbeCocycle:
    h = _parse_family(node.get("h"), cover, 3, 0, f"gerbe {name}: h")
    a = _parse_family(node.get("a"), cover, 2, 1, f"gerbe {name}: a")
    b = _parse_family(node.get("b"), cover, 1, 2, f"gerbe {name}: b")
    return GerbeCocycle(cover, h, a, b)


# ------------------------------------------------------------------ emitters


def _emit_form(v: SuperForm) -> str:
    return str(v)


def _emit_family_lines(fam: CechFamily, indent: str) -> list[str]:
    out = []
    for t, v in fam.sorted_items():
        if v.is_zero():
            continue
        tup = ", ".join(t)
        out.append(f"{indent}- {{tuple: [{tup}], value: {_emit_form(v)}}}")
    return out


def emit_manifest(man: Manifest) -> str:
    cover = man.cover
    ring = cover.ring
    lines = ["format: 1", "kind: manifold", f"name: {man.name}", "ring:",
             "  generators:"]
    for g in ring.generators:
        entry = ring.derivation_entry(g)
        diff = " + ".join(f"({coef})*{ring.form_symbols[sym]}"
                          for sym, coef in sorted(entry.items()))
        parts = [f"name: {g}", f"diff: {diff or '0'}"]
        charts = ring.gen_charts[g]
        if charts is not None:
            parts.append("charts: [" + ", ".join(
                sorted(charts, key=cover.chart_index.__getitem__)) + "]")
        lines.append("    - {" + ", ".join(parts) + "}")
    if ring._rules:
        lines.append("  relations:")
        for lhs_exps, rhs in ring._rules:
            lhs = "*".join(
                (f"{ring.generators[k]}**{e}" if e > 1 else ring.generators[k])
                for k, e in enumerate(lhs_exps) if e)
            rhs_s = Scalar(ring, dict(rhs))
            lines.append(f"    - {{lhs: {lhs}, rhs: {rhs_s}}}")
    if ring.odd_generators:
        lines.append("  odd_generators: [" + ", ".join(ring.odd_generators) + "]")
    if ring.form_symbols:
        lines.append("  form_symbols: [" + ", ".join(ring.form_symbols) + "]")
    lines.append("cover:")
    lines.append("  charts: [" + ", ".join(cover.charts) + "]")
    lines.append("  nerve:")
    for t in sorted(cover.nerve, key=cover._tuple_key):
        extendable = any(
            cover.normalize(t + (c,))[1] in cover.nerve
            for c in cover.charts if c not in t)
        if not extendable:
            lines.append("    - [" + ", ".join(t) + "]")
    if cover.substitutions:
        lines.append("  substitutions:")
        for (to, frm) in sorted(cover.substitutions,
                                key=lambda p: (cover.chart_index[p[0]],
                                               cover.chart_index[p[1]])):
            rule = cover.substitutions[(to, frm)]
            body = ", ".join(f"{g}: {expr}" for g, expr in sorted(rule.items()))
            lines.append(f"    - {{to: {to}, from: {frm}, map: {{{body}}}}}")
    if cover.partition_of_unity:
        lines.append("  partition_of_unity:")
        for c in cover.charts:
            lines.append(f"    {c}: {cover.partition_of_unity[c]}")
    if cover.star_centers:
        lines.append("  star_centers:")
        for c in cover.charts:
            table = cover.star_centers.get(c, {})
            body = ", ".join(f"{g}: {v}" for g, v in sorted(table.items()))
            lines.append(f"    {c}: {{{body}}}")
    if cover.fundamental_cycle:
        lines.append("  fundamental_cycle:")
        for t, coef in cover.fundamental_cycle:
            lines.append(f"    - {{tuple: [{', '.join(t)}], coeff: {coef}}}")
    if man.forms or man.gerbes:
        lines.append("objects:")
        if man.forms:
            lines.append("  forms:")
            for fname in sorted(man.forms):
                lines.append(f"    {fname}: {_emit_form(man.forms[fname])}")
        if man.gerbes:
            lines.append("  gerbes:")
            for gname in sorted(man.gerbes):
                g = man.gerbes[gname]
                body = []
                for label, fam in (("h", g.h), ("a", g.a), ("b", g.b)):
                    fam_lines = _emit_family_lines(fam, "        ")
                    if fam_lines:
                        body.append(f"      {label}:")
                        body.extend(fam_lines)
                if body:
                    lines.append(f"    {gname}:")
                    lines.extend(body)
                else:
                    lines.append(f"    {gname}: {{}}")
    return "\n".join(lines) + "\n"


# ------------------------------------------------------- certificate documents


def parse_certificate_body(node: Node, cover: Cover) -> TrivializationCertificate:
    f = _parse_family(node.get("f"), cover, 2, 0, "certificate f")
    z = _parse_family(node.get("z"), cover, 1, 1, "certificate z")
    m = {}
    m_node = node.get("m")
    if m_node is not None:
        for entry in m_node.expect_list():
            t = tuple(x.expect_str() for x in entry.require("tuple").expect_list())
            v = entry.require("value").expect_str()
            try:
                m[t] = int(v)
            except ValueError:
                raise ManifestError("m values must be integers", line=entry.line)
    return TrivializationCertificate(f, z, m)


def parse_certificate_doc(text: str, cover: Cover) -> tuple[str, TrivializationCertificate]:
    root = parse_tree(text)
    _check_format(root, "certificate")
    gerbe = root.require("gerbe").expect_str()
    return gerbe, parse_certificate_body(root.require("certificate"), cover)


def _emit_certificate_lines(cert: TrivializationCertificate, indent: str) -> list[str]:
    lines = []
    f_lines = _emit_family_lines(cert.f, indent + "  ")
    if f_lines:
        lines.append(f"{indent}f:")
        lines.extend(f_lines)
    z_lines = _emit_family_lines(cert.z, indent + "  ")
    if z_lines:
        lines.append(f"{indent}z:")
        lines.extend(z_lines)
    m_lines = [f"{indent}  - {{tuple: [{', '.join(t)}], value: {v}}}"
               for t, v in sorted(cert.m.items(),
                                  key=lambda kv: cert.f.cover._tuple_key(kv[0]))
               if v]
    if m_lines:
        lines.append(f"{indent}m:")
        lines.extend(m_lines)
    return lines


def emit_certificate_doc(cert: TrivializationCertificate, cover_name: str,
                         gerbe_name: str) -> str:
    lines = ["format: 1", "kind: certificate", f"cover: {cover_name}",
             f"gerbe: {gerbe_name}"]
    body = _emit_certificate_lines(cert, "  ")
    if body:
        lines.append("certificate:")
        lines.extend(body)
    else:
        lines.append("certificate: {}")
    return "\n".join(lines) + "\n"


# ----------------------------------------------------- decomposition documents


def parse_decomposition_doc(text: str, cover: Cover):
    from .bodysoul import DecompositionResult
    root = parse_tree(text)
    _check_format(root, "decomposition")
    gerbe = root.require("gerbe").expect_str()
    body = _parse_gerbe(root.require("body_gerbe"), cover, "body_gerbe")
    beta_node = root.require("beta")
    beta = parse_expression(beta_node.expect_str(), cover.ring, beta_node.line)
    cert = parse_certificate_body(root.require("certificate"), cover)
    return gerbe, DecompositionResult(body, beta, cert)


def emit_decomposition_doc(result, cover_name: str, gerbe_name: str) -> str:
    g = result.body_gerbe
    lines = ["format: 1", "kind: decomposition", f"cover: {cover_name}",
             f"gerbe: {gerbe_name}"]
    body = []
    for label, fam in (("h", g.h), ("a", g.a), ("b", g.b)):
        fam_lines = _emit_family_lines(fam, "    ")
        if fam_lines:
            body.append(f"  {label}:")
            body.extend(fam_lines)
    if body:
        lines.append("body_gerbe:")
        lines.extend(body)
    else:
        lines.append("body_gerbe: {}")
    lines.append(f"beta: {result.beta}")
    cert_body = _emit_certificate_lines(result.certificate, "  ")
    if cert_body:
        lines.append("certificate:")
        lines.extend(cert_body)
    else:
        lines.append("certificate: {}")
    return "\n".join(lines) + "\n"
