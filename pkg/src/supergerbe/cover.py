"""Combinatorial good covers, Cech differentials, and the exact solvers.

A `Cover` carries the chart index set, the nerve (downward closed, tuples
order-normalized), one globally presented differential ring, per-pair
substitution rules rewriting chart-local generators, a symbolic partition of
unity, and per-chart star centers for the radial homotopy.  Locality is pure
bookkeeping: every expression lives in the one shared ring, and all solver
output is re-verified against exact ring identities.
"""

from __future__ import annotations

import itertools

from fractions import Fraction
from typing import Iterable, Mapping

from .errors import (
    MissingComponent,
    NonPolynomialBody,
    NotACocycle,
    NotClosed,
    SubstitutionFailure,
)
from .reports import Report
from .scalars import GR_ONE, GR_ZERO, GaussianRational, Ring, Scalar
from .superforms import SuperForm, mono_degree, mono_parity

__all__ = ["Cover", "CechFamily", "d_solve"]


def _perm_sign(seq) -> int:
    sign = 1
    arr = list(seq)
    for i in range(len(arr)):
        for j in range(i + 1, len(arr)):
            if arr[i] > arr[j]:
                sign = -sign
    return sign


class Cover:
    def __init__(self, ring: Ring, charts: Iterable[str],
                 nerve: Iterable[tuple], substitutions: Mapping | None = None,
                 partition_of_unity: Mapping[str, Scalar] | None = None,
                 star_centers: Mapping[str, Mapping[str, GaussianRational]] | None = None,
                 fundamental_cycle: list | None = None,
                 name: str = "cover"):
        self.ring = ring
        self.name = name
        self.charts = list(charts)
        self.chart_index = {c: k for k, c in enumerate(self.charts)}
        if len(self.chart_index) != len(self.charts):
            raise MissingComponent("duplicate chart names")
        # downward closure of the declared tuples, plus all singletons
        closed: set[tuple] = {(c,) for c in self.charts}
        for t in nerve:
            t = self._normalize_strict(t)
            for k in range(1, len(t) + 1):
                closed.update(itertools.combinations(t, k))
        self.nerve = closed
        self._by_level: dict[int, list[tuple]] = {}
        for t in closed:
            self._by_level.setdefault(len(t), []).append(t)
        for lvl in self._by_level:
            self._by_level[lvl].sort(key=self._tuple_key)
        self.max_level = max(self._by_level)
        # substitutions[(to_chart, from_chart)] = {gen: Scalar over to-chart gens}
        self.substitutions: dict[tuple, dict[str, Scalar]] = {
            (to, frm): dict(m) for (to, frm), m in (substitutions or {}).items()}
        self.partition_of_unity = dict(partition_of_unity or {})
        self.star_centers = {c: dict(m) for c, m in (star_centers or {}).items()}
        self.fundamental_cycle = list(fundamental_cycle or []) or None

    # ----------------------------------------------------------- combinatorics

    def _tuple_key(self, t: tuple):
        return tuple(self.chart_index[c] for c in t)

    def _normalize_strict(self, t) -> tuple:
        t = tuple(t)
        for c in t:
            if c not in self.chart_index:
                raise MissingComponent(f"unknown chart {c!r}")
        key = self._tuple_key(t)
        if sorted(key) != list(key) or len(set(key)) != len(key):
            raise MissingComponent(f"tuple {t} is not order-normalized")
        return t

    def normalize(self, seq) -> tuple[int, tuple | None]:
        """Sort an arbitrary chart sequence; returns (sign, tuple) or (0, None)
        for repeated entries."""
        key = [self.chart_index[c] for c in seq]
        if len(set(key)) != len(key):
            return 0, None
        sign = _perm_sign(key)
        ordered = tuple(c for _, c in sorted(zip(key, seq)))
        return sign, ordered

    def tuples(self, level: int) -> list[tuple]:
        return self._by_level.get(level, [])

    def in_nerve(self, t: tuple) -> bool:
        return t in self.nerve

    def legal_gens(self, chart: str) -> set[str]:
        out = set()
        for g, charts in self.ring.gen_charts.items():
            if charts is None or chart in charts:
                out.add(g)
        return out

    # ------------------------------------------------------------- rewriting

    def rewrite(self, form: SuperForm, from_chart: str, to_chart: str) -> SuperForm:
        """Express a form given in from_chart's generators in to_chart's."""
        if from_chart == to_chart:
            return form
        rule = self.substitutions.get((to_chart, from_chart))
        if rule is None:
            raise SubstitutionFailure(
                f"no substitution rule from {from_chart!r} into {to_chart!r}")
        out = form.substitute_scalars(rule)
        legal = self.legal_gens(to_chart)
        for s in out.terms.values():
            bad = s.generators_used() - legal
            if bad:
                raise SubstitutionFailure(
                    f"rewrite {from_chart!r}->{to_chart!r} leaves non-local "
                    f"generators {sorted(bad)}")
        return out

    def rewrite_scalar(self, s: Scalar, from_chart: str, to_chart: str) -> Scalar:
        if from_chart == to_chart:
            return s
        rule = self.substitutions.get((to_chart, from_chart))
        if rule is None:
            raise SubstitutionFailure(
                f"no substitution rule from {from_chart!r} into {to_chart!r}")
        return s.substitute(rule)

    # -------------------------------------------------------- Cech differential

    def delta(self, family: "CechFamily") -> "CechFamily":
        q = family.level
        comps = {}
        for t in self.tuples(q + 1):
            acc = SuperForm.zero(self.ring)
            for i in range(len(t)):
                sub = t[:i] + t[i + 1:]
                part = family.components[sub]
                if part.is_zero():
                    continue
                part = self.rewrite(part, sub[0], t[0])
                acc = acc + (part if i % 2 == 0 else -part)
            comps[t] = acc
        return CechFamily(self, q + 1, comps)

    def delta_matrix(self, level: int):
        """Integer matrix of delta from level to level+1 over the nerve.
        Returns (rows, row_tuples, col_index)."""
        cols = {t: k for k, t in enumerate(self.tuples(level))}
        rows = []
        row_tuples = self.tuples(level + 1)
        for t in row_tuples:
            r: dict[int, int] = {}
            for i in range(len(t)):
                sub = t[:i] + t[i + 1:]
                k = cols[sub]
                r[k] = r.get(k, 0) + (1 if i % 2 == 0 else -1)
                if not r[k]:
                    del r[k]
            rows.append(r)
        return rows, row_tuples, cols

    # ------------------------------------------------------------ the PoU solve

    def delta_solve(self, family: "CechFamily"):
        """Solve delta(rho) = family with the partition-of-unity formula and
        verify the result exactly.  Level 1 input returns a single global form
        (the inclusion stage); level q >= 2 returns a level q-1 family."""
        q = family.level
        if q < 1:
            raise NotACocycle("nothing to solve at level 0")
        defect = self.delta(family)
        bad = next((t for t, v in defect.components.items() if not v.is_zero()), None)
        if bad is not None:
            raise NotACocycle(f"input is not delta-closed at tuple {bad}")
        if q == 1:
            rho = SuperForm.zero(self.ring)
            for alpha in self.charts:
                phi = self.partition_of_unity[alpha]
                rho = rho + family.components[(alpha,)].scale(phi)
            if not rho.is_global():
                raise NotACocycle("level-1 solve did not produce a global form")
            for alpha in self.charts:
                if family.components[(alpha,)] != rho:
                    raise NotACocycle(
                        f"level-1 solve verification failed on chart {alpha!r}")
            return rho
        comps = {}
        for t in self.tuples(q - 1):
            acc = SuperForm.zero(self.ring)
            for beta in self.charts:
                sign, u = self.normalize((beta,) + t)
                if u is None or u not in self.nerve:
                    continue
                part = family.components.get(u)
                if part is None or part.is_zero():
                    continue
                part = self.rewrite(part, u[0], t[0])
                part = part.scale(self.partition_of_unity[beta])
                acc = acc + (part if sign > 0 else -part)
            comps[t] = acc
        rho = CechFamily(self, q - 1, comps)
        check = self.delta(rho)
        for t in self.tuples(q):
            if check.components[t] != family.components[t]:
                raise NotACocycle(
                    f"partition-of-unity solve failed verification at tuple {t}; "
                    f"the family is not a coboundary in this ring")
        return rho

    # -------------------------------------------------------- Poincare solvers

    def chart_constants(self) -> set[str]:
        """Generators with identically zero differential."""
        out = set()
        for g in self.ring.generators:
            if not self.ring.derivation_entry(g):
                out.add(g)
        return out

    def _radial_data(self, chart: str):
        centers = self.star_centers.get(chart)
        if centers is None:
            raise NonPolynomialBody(f"chart {chart!r} declares no star center")
        sym_to_gen = {}
        for g in centers:
            sym = self.ring.coordinate_symbol(g)
            if sym is None:
                raise NonPolynomialBody(
                    f"star-center generator {g!r} is not a coordinate generator")
            sym_to_gen[sym] = g
        return centers, sym_to_gen

    def radial_homotopy(self, body_form: SuperForm, chart: str) -> SuperForm:
        """Euler homotopy on polynomial body forms around the chart's star
        center: K with dK + Kd = id away from the (0,0) bidegree."""
        ring = self.ring
        centers, sym_to_gen = self._radial_data(chart)
        allowed = set(centers) | self.chart_constants()
        affine_idx = {ring.gen_index[g] for g in centers}
        for mono, s in body_form.terms.items():
            if mono[0] or mono[2]:
                raise NonPolynomialBody("radial homotopy applies to body forms only")
            bad = s.generators_used() - allowed
            if bad:
                raise NonPolynomialBody(
                    f"body coefficients use non-affine generators {sorted(bad)} "
                    f"on chart {chart!r}")
            for sym in mono[1]:
                if sym not in sym_to_gen:
                    raise NonPolynomialBody(
                        f"no affine generator for symbol {ring.form_symbols[sym]!r} "
                        f"on chart {chart!r}")
        shift = {g: ring.gen(g) + ring.scalar(c)
                 for g, c in centers.items() if GaussianRational.coerce(c)}
        shifted = body_form.substitute_scalars(shift) if shift else body_form
        out: dict = {}
        for mono, s in shifted.terms.items():
            dxs = mono[1]
            p = len(dxs)
            if p == 0:
                raise NonPolynomialBody("radial homotopy needs form degree >= 1")
            for (tp, exps), coef in s.terms.items():
                delta_deg = sum(exps[k] for k in affine_idx)
                denom = Fraction(1, delta_deg + p)
                for l, sym in enumerate(dxs):
                    g = sym_to_gen[sym]
                    gi = ring.gen_index[g]
                    lifted = list(exps)
                    lifted[gi] += 1
                    piece = ring._scalar(
                        {(tp, tuple(lifted)): coef * denom * (1 if l % 2 == 0 else -1)})
                    m2 = ((), dxs[:l] + dxs[l + 1:], ())
                    acc = out.get(m2)
                    acc = piece if acc is None else acc + piece
                    if acc.is_zero():
                        out.pop(m2, None)
                    else:
                        out[m2] = acc
        result = SuperForm(ring, out)
        if shift:
            unshift = {g: ring.gen(g) - ring.scalar(c)
                       for g, c in centers.items() if GaussianRational.coerce(c)}
            result = result.substitute_scalars(unshift)
        return result

    def poincare_solve(self, form: SuperForm, tup) -> SuperForm:
        """Primitive of a closed form of degree >= 1 on one chart (or tuple):
        soul part via the soul homotopy, body part via the radial homotopy."""
        if isinstance(tup, str):
            chart = tup
        else:
            chart = tup[0]
        if form.is_zero():
            return SuperForm.zero(self.ring)
        if min(form.degrees()) < 1:
            raise NotClosed("poincare_solve needs form degree >= 1")
        if not form.d().is_zero():
            raise NotClosed("form is not closed")
        body, soul = form.body_soul_split()
        sigma = SuperForm.zero(self.ring)
        if not soul.is_zero():
            sigma = sigma + soul.soul_homotopy()
        if not body.is_zero():
            sigma = sigma + self.radial_homotopy(body, chart)
        if sigma.d() != form:
            raise NotClosed("poincare primitive failed verification")
        return sigma

    # ------------------------------------------------------------- validation

    def validate(self) -> Report:
        rep = Report(f"validate_cover({self.name})")
        ring = self.ring
        rep.add("charts nonempty", bool(self.charts))
        # nerve structure
        closed = all(
            t[:i] + t[i + 1:] in self.nerve
            for t in self.nerve if len(t) > 1 for i in range(len(t)))
        rep.add("nerve downward closed", closed)
        normalized = all(list(self._tuple_key(t)) == sorted(self._tuple_key(t))
                         for t in self.nerve)
        rep.add("nerve tuples order-normalized", normalized)
        # partition of unity
        missing = [c for c in self.charts if c not in self.partition_of_unity]
        if missing:
            rep.add("partition of unity complete", False, f"missing {missing}")
        else:
            total = ring.zero()
            for c in self.charts:
                total = total + self.partition_of_unity[c]
            rep.add("partition of unity sums to 1",
                    total == ring.one(),
                    "" if total == ring.one() else f"sum normalizes to {total}")
            nonglobal = [c for c in self.charts
                         if not self.partition_of_unity[c].is_global()]
            rep.add("partition of unity is globally presented", not nonglobal,
                    "" if not nonglobal else f"chart-local functions on {nonglobal}")
        # substitution rules exist in both directions for every nerve pair
        for t in self.tuples(2):
            a, b = t
            ok = (a, b) in self.substitutions and (b, a) in self.substitutions
            if not ok:
                rep.add(f"substitution rules declared for pair {t}", False)
        rep.add("substitution rules declared for all nerve pairs",
                all((a, b) in self.substitutions and (b, a) in self.substitutions
                    for (a, b) in self.tuples(2)))
        # mutual inverse on nerve pairs
        inv_ok, inv_detail = True, ""
        for (a, b) in self.tuples(2):
            for (to, frm) in ((a, b), (b, a)):
                rule = self.substitutions.get((to, frm))
                back = self.substitutions.get((frm, to))
                if rule is None or back is None:
                    continue
                for g, expr in rule.items():
                    if expr.substitute(back) != ring.gen(g):
                        inv_ok, inv_detail = False, f"pair ({to},{frm}) on generator {g}"
        rep.add("substitution rules mutually inverse", inv_ok, inv_detail)
        # composition consistency over nerve triples
        tri_ok, tri_detail = True, ""
        for t in self.tuples(3):
            a, b, c = t
            direct = self.substitutions.get((a, c), {})
            via_b = self.substitutions.get((b, c), {})
            second = self.substitutions.get((a, b), {})
            gens = set(direct) | set(via_b)
            for g in gens:
                p1 = ring.gen(g).substitute(direct)
                p2 = ring.gen(g).substitute(via_b).substitute(second)
                if p1 != p2:
                    tri_ok, tri_detail = False, f"triple {t} on generator {g}"
        rep.add("substitution rules consistent over triples", tri_ok, tri_detail)
        # substitutions respect the derivation table
        deriv_ok, deriv_detail = True, ""
        for (to, frm), rule in self.substitutions.items():
            for g, expr in rule.items():
                want = {sym: coef.substitute(rule)
                        for sym, coef in ring.derivation_entry(g).items()}
                got = expr.differential()
                for sym in set(want) | set(got):
                    w = want.get(sym, ring.zero())
                    h = got.get(sym, ring.zero())
                    if w != h:
                        deriv_ok = False
                        deriv_detail = f"rule ({to},{frm}) generator {g}"
        rep.add("substitution rules respect derivations", deriv_ok, deriv_detail)
        # star centers
        centers_ok, centers_detail = True, ""
        for c, table in self.star_centers.items():
            for g in table:
                if ring.coordinate_symbol(g) is None:
                    centers_ok = False
                    centers_detail = f"chart {c} generator {g}"
        rep.add("star centers name coordinate generators", centers_ok, centers_detail)
        # optional fundamental cycle is a cycle
        if self.fundamental_cycle:
            level = len(self.fundamental_cycle[0][0])
            boundary: dict[tuple, int] = {}
            ok = True
            for t, coef in self.fundamental_cycle:
                if len(t) != level or t not in self.nerve:
                    ok = False
                    break
                for i in range(len(t)):
                    sub = t[:i] + t[i + 1:]
                    boundary[sub] = boundary.get(sub, 0) + coef * (1 if i % 2 == 0 else -1)
            ok = ok and all(v == 0 for v in boundary.values())
            rep.add("fundamental cycle has zero boundary", ok)
        return rep


class CechFamily:
    """Assignment of a fixed-(degree, parity) form to every level-q nerve
    tuple, each expressed in the tuple-canonical (first chart) generators."""

    __slots__ = ("cover", "level", "components")

    def __init__(self, cover: Cover, level: int, components: Mapping[tuple, SuperForm]):
        comps = dict(components)
        expected = cover.tuples(level)
        for t in expected:
            if t not in comps:
                raise MissingComponent(f"family misses nerve tuple {t}")
        for t in comps:
            if t not in cover.nerve or len(t) != level:
                raise MissingComponent(f"component on non-nerve tuple {t}")
        degs: set[int] = set()
        pars: set[int] = set()
        for v in comps.values():
            degs |= v.degrees()
            pars |= v.parities()
        if len(degs) > 1 or len(pars) > 1:
            raise MissingComponent(
                f"family is not homogeneous: degrees {sorted(degs)}, parities {sorted(pars)}")
        self.cover = cover
        self.level = level
        self.components = comps

    # ------------------------------------------------------------ construction

    @classmethod
    def zero(cls, cover: Cover, level: int) -> "CechFamily":
        z = SuperForm.zero(cover.ring)
        return cls(cover, level, {t: z for t in cover.tuples(level)})

    @classmethod
    def constant(cls, cover: Cover, level: int, form: SuperForm) -> "CechFamily":
        return cls(cover, level, {t: form for t in cover.tuples(level)})

    def map(self, fn) -> "CechFamily":
        return CechFamily(self.cover, self.level,
                          {t: fn(v) for t, v in self.components.items()})

    # -------------------------------------------------------------- structure

    def form_degree(self) -> int:
        degs = set()
        for v in self.components.values():
            degs |= v.degrees()
        return degs.pop() if degs else 0

    def is_zero(self) -> bool:
        return all(v.is_zero() for v in self.components.values())

    def is_even(self) -> bool:
        return all(v.is_even() for v in self.components.values())

    def get_signed(self, seq) -> SuperForm:
        sign, t = self.cover.normalize(seq)
        if t is None or t not in self.components:
            return SuperForm.zero(self.cover.ring)
        v = self.components[t]
        return v if sign > 0 else -v

    # -------------------------------------------------------------- arithmetic

    def _check(self, other: "CechFamily"):
        if self.cover is not other.cover or self.level != other.level:
            raise MissingComponent("family mismatch")

    def __add__(self, other):
        self._check(other)
        return CechFamily(self.cover, self.level,
                          {t: self.components[t] + other.components[t]
                           for t in self.components})

    def __neg__(self):
        return CechFamily(self.cover, self.level,
                          {t: -v for t, v in self.components.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, s) -> "CechFamily":
        return CechFamily(self.cover, self.level,
                          {t: v.scale(s) for t, v in self.components.items()})

    def d(self) -> "CechFamily":
        return CechFamily(self.cover, self.level,
                          {t: v.d() for t, v in self.components.items()})

    def __eq__(self, other):
        if not isinstance(other, CechFamily):
            return NotImplemented
        return (self.cover is other.cover and self.level == other.level
                and self.components == other.components)

    def __hash__(self):
        return hash((id(self.cover), self.level,
                     tuple(sorted(self.components.items(),
                                  key=lambda kv: self.cover._tuple_key(kv[0])))))

    def sorted_items(self):
        return sorted(self.components.items(),
                      key=lambda kv: self.cover._tuple_key(kv[0]))

    def __repr__(self):
        inner = ", ".join(f"{t}: {v}" for t, v in self.sorted_items())
        return f"CechFamily(level={self.level}, {{{inner}}})"


def _normal_monomials(ring: Ring, gens: list[str], max_deg: int):
    """All normal-form exponent tuples over `gens` with total degree <= max_deg."""
    idxs = [ring.gen_index[g] for g in gens]
    out = []

    def rec(pos: int, budget: int, exps: list[int]):
        if pos == len(idxs):
            t = tuple(exps)
            for lhs, _ in ring._rules:
                if all(x <= y for x, y in zip(lhs, t)):
                    return
            out.append(t)
            return
        for e in range(budget + 1):
            exps[idxs[pos]] = e
            rec(pos + 1, budget - e, exps)
        exps[idxs[pos]] = 0

    rec(0, max_deg, [0] * ring.n)
    return out


def d_solve(target: SuperForm, allowed_gens: Iterable[str],
            harmonic: bool = False, extra_degree: int = 1):
    """Exact linear solve of d(X) = target over a bounded monomial basis of
    the given generators (body sector only: dx symbols, no odd content).

    With harmonic=True solves  target = d(X) + C  where C has constant
    coefficients, returning (X, C); otherwise returns X or None.
    """
    ring = target.ring
    if target.is_zero():
        return (SuperForm.zero(ring), SuperForm.zero(ring)) if harmonic else SuperForm.zero(ring)
    degs = target.degrees()
    if len(degs) != 1:
        raise NotClosed("d_solve needs a homogeneous target")
    p = degs.pop()
    if p < 1:
        raise NotClosed("d_solve needs degree >= 1")
    for mono in target.terms:
        if mono[0] or mono[2]:
            raise NonPolynomialBody("d_solve handles body forms only")
    gens = sorted(set(allowed_gens), key=ring.gen_index.__getitem__)
    max_deg = target.max_coefficient_degree() + extra_degree
    target_powers = sorted({tp for s in target.terms.values() for (tp, _e) in s.terms})
    # d may shift tau powers by whatever appears in the derivation table
    shifts = {0}
    for g in gens:
        for coef in ring.derivation_entry(g).values():
            shifts.update(tp for (tp, _e) in coef.terms)
    tau_powers = sorted({t - s for t in target_powers for s in shifts} | set(target_powers))
    scalar_monos = _normal_monomials(ring, gens, max_deg)
    nsym = len(ring.form_symbols)
    ext_lower = [tuple(c) for c in itertools.combinations(range(nsym), p - 1)]
    ext_target = [tuple(c) for c in itertools.combinations(range(nsym), p)]

    columns = []  # (kind, payload); kind "x" basis form, kind "c" harmonic
    col_images = []  # dict[(ext, tau, exps)] -> GaussianRational
    for tp in tau_powers:
        for exps in scalar_monos:
            for ext in ext_lower:
                basis = SuperForm(ring, {((), ext, ()): Scalar(ring, {(tp, exps): GR_ONE})})
                image = basis.d()
                if image.is_zero():
                    continue
                img = {}
                for m2, s2 in image.terms.items():
                    for mono_s, coef in s2.terms.items():
                        img[(m2[1], mono_s)] = coef
                columns.append(("x", (tp, exps, ext)))
                col_images.append(img)
    if harmonic:
        for tp in target_powers:
            for ext in ext_target:
                columns.append(("c", (tp, ext)))
                col_images.append({(ext, (tp, ring._zero_exps())): GR_ONE})

    rows_index: dict = {}
    for k, img in enumerate(col_images):
        for key in img:
            rows_index.setdefault(key, len(rows_index))
    rhs_entries = {}
    for mono, s in target.terms.items():
        for mono_s, coef in s.terms.items():
            key = (mono[1], mono_s)
            if key not in rows_index:
                rows_index[key] = len(rows_index)
            rhs_entries[rows_index[key]] = coef
    nrows = len(rows_index)
    rows: list[dict[int, GaussianRational]] = [dict() for _ in range(nrows)]
    for k, img in enumerate(col_images):
        for key, coef in img.items():
            rows[rows_index[key]][k] = coef
    rhs = [rhs_entries.get(i, GR_ZERO) for i in range(nrows)]

    sol = _field_solve(rows, rhs, len(columns))
    if sol is None:
        return None
    x_form = SuperForm.zero(ring)
    c_form = SuperForm.zero(ring)
    for k, v in sol.items():
        if not v:
            continue
        kind, payload = columns[k]
        if kind == "x":
            tp, exps, ext = payload
            x_form = x_form + SuperForm(ring, {((), ext, ()): Scalar(ring, {(tp, exps): v})})
        else:
            tp, ext = payload
            c_form = c_form + SuperForm(ring, {((), ext, ()): Scalar(ring, {(tp, ring._zero_exps()): v})})
    if harmonic:
        return x_form, c_form
    return x_form


def _field_solve(rows: list[dict], rhs: list, ncols: int):
    """Gaussian elimination over GaussianRational; one solution dict or None."""
    rows = [dict(r) for r in rows]
    rhs = list(rhs)
    pivots: list[tuple[int, int]] = []
    used: set[int] = set()
    col_rows: dict[int, set[int]] = {}
    for i, r in enumerate(rows):
        for c in r:
            col_rows.setdefault(c, set()).add(i)
    for col in range(ncols):
        cand = [i for i in col_rows.get(col, ()) if i not in used and rows[i].get(col)]
        if not cand:
            continue
        piv = min(cand, key=lambda i: len(rows[i]))
        pv = rows[piv][col]
        inv = pv.inverse()
        rows[piv] = {c: v * inv for c, v in rows[piv].items()}
        rhs[piv] = rhs[piv] * inv
        for c in rows[piv]:
            col_rows.setdefault(c, set()).add(piv)
        for i in list(col_rows.get(col, ())):
            if i == piv or not rows[i].get(col):
                continue
            f = rows[i][col]
            for c, v in rows[piv].items():
                acc = rows[i].get(c, GR_ZERO) - f * v
                if acc:
                    rows[i][c] = acc
                    col_rows.setdefault(c, set()).add(i)
                else:
                    rows[i].pop(c, None)
            rhs[i] = rhs[i] - f * rhs[piv]
        used.add(piv)
        pivots.append((col, piv))
    for i in range(len(rows)):
        if i not in used and rhs[i]:
            if not rows[i]:
                return None
    x: dict[int, GaussianRational] = {}
    for col, i in reversed(pivots):
        acc = rhs[i]
        for c, v in rows[i].items():
            if c != col and c in x:
                acc = acc - v * x[c]
        x[col] = acc
    # non-pivot rows with leftover entries: verify with free vars at zero
    for i in range(len(rows)):
        if i in used:
            continue
        acc = GR_ZERO
        for c, v in rows[i].items():
            acc = acc + v * x.get(c, GR_ZERO)
        if acc != rhs[i]:
            return None
    return x
