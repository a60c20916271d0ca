"""Deligne 2-cocycle data for bundle gerbes with connection.

A gerbe over a cover is the triple (h, A, B): even functions h on 3-tuples
(exponential coordinates, the transition functions being exp(tau * h)), even
1-forms A on 2-tuples, even 2-forms B on charts.  All multiplicative data is
stored additively in the exponent; integer families carry the 2 pi i Z
ambiguity explicitly.

Sign conventions, fixed once and regression-tested by check_rep_identity:

    (delta B)_{ab}   = B_b - B_a = dA_{ab}           (descent)
    (delta A)_{abc}  = tau * d h_{abc}               (connection)
    (delta h)_{abcd} = k in Z                        (integrality)

and the Cech-de Rham total differential D = delta + (-1)^(p+1) d applied to
the 2-cochain (tau*h, A, -B) evaluates to (tau*k, 0, 0, H).
"""

from __future__ import annotations

from fractions import Fraction

from .cover import CechFamily, Cover, d_solve
from .errors import (
    CoverMismatch,
    NonPolynomialBody,
    NotDescended,
    NotIntegral,
    ObstructionNonzero,
    OddParity,
    UnsupportedBodyData,
)
from .intlinalg import solve_integer, solve_mod1, solve_rational
from .reports import Report
from .scalars import GR_ZERO, GaussianRational, Scalar
from .superforms import SuperForm
from .util import parallel_map

__all__ = [
    "GerbeCocycle",
    "IntegerClass",
    "TrivializationCertificate",
    "integral_check",
    "construct_from_integral_form",
]

_EMPTY = ((), (), ())


def _constant_of(form: SuperForm) -> Scalar | None:
    """The Scalar value of a d-closed degree-0 form; None when the form is
    not a constant function."""
    if not form.d().is_zero():
        return None
    for mono in form.terms:
        if mono != _EMPTY:
            return None
    return form.coefficient(_EMPTY)


class IntegerClass:
    """Integer-valued delta-closed family on nerve level-k tuples, considered
    modulo integer coboundaries; carries a chosen representative."""

    def __init__(self, cover: Cover, level: int, components: dict):
        self.cover = cover
        self.level = level
        self.components = {t: int(v) for t, v in components.items()}
        for t in cover.tuples(level):
            self.components.setdefault(t, 0)

    def is_cocycle(self) -> bool:
        rows, row_tuples, cols = self.cover.delta_matrix(self.level)
        vec = [self.components[t] for t in self.cover.tuples(self.level)]
        for r in rows:
            if sum(c * vec[k] for k, c in r.items()):
                return False
        return True

    def is_zero(self) -> bool:
        """True when the representative is an integer coboundary."""
        if all(v == 0 for v in self.components.values()):
            return True
        rows, row_tuples, cols = self.cover.delta_matrix(self.level - 1)
        rhs = [self.components[t] for t in row_tuples]
        # rational solvability is necessary and fast to reject
        if solve_rational(rows, [Fraction(v) for v in rhs], len(cols)) is None:
            return False
        return solve_integer(rows, rhs, len(cols), need_solution=False) is not None

    def pair(self, cycle) -> int:
        """Pairing with an integer cycle given as [(tuple, coeff), ...]."""
        total = 0
        for t, coef in cycle:
            total += coef * self.components.get(tuple(t), 0)
        return total

    def pair_fundamental(self) -> int | None:
        cyc = self.cover.fundamental_cycle
        if cyc is None or (cyc and len(cyc[0][0]) != self.level):
            return None
        return self.pair(cyc)

    def __add__(self, other: "IntegerClass") -> "IntegerClass":
        if self.cover is not other.cover or self.level != other.level:
            raise CoverMismatch("integer classes over different nerves")
        return IntegerClass(self.cover, self.level,
                            {t: self.components[t] + other.components[t]
                             for t in self.components})

    def __neg__(self) -> "IntegerClass":
        return IntegerClass(self.cover, self.level,
                            {t: -v for t, v in self.components.items()})

    def __sub__(self, other):
        return self + (-other)

    def same_class(self, other: "IntegerClass") -> bool:
        return (self - other).is_zero()

    def __eq__(self, other):
        if not isinstance(other, IntegerClass):
            return NotImplemented
        return (self.cover is other.cover and self.level == other.level
                and self.components == other.components)

    def __repr__(self):
        nz = {t: v for t, v in sorted(self.components.items()) if v}
        return f"IntegerClass(level={self.level}, nonzero={nz})"


class TrivializationCertificate:
    """Coboundary witness (f, z, m): delta f + m = h, delta z + tau*df = A,
    dz_a = B_a, with m integer."""

    def __init__(self, f: CechFamily, z: CechFamily, m: dict):
        self.f = f
        self.z = z
        self.m = {t: int(v) for t, v in m.items()}
        for t in f.cover.tuples(3):
            self.m.setdefault(t, 0)

    def __repr__(self):
        return f"TrivializationCertificate(f={self.f!r}, z={self.z!r}, m={self.m})"


class GerbeCocycle:
    """Deligne degree-2 data (h, A, B) over a cover, exponential coordinates."""

    def __init__(self, cover: Cover, h: CechFamily, a: CechFamily, b: CechFamily):
        if h.cover is not cover or a.cover is not cover or b.cover is not cover:
            raise CoverMismatch("families live over a different cover")
        if h.level != 3 or a.level != 2 or b.level != 1:
            raise CoverMismatch("expected families at levels 3, 2, 1")
        self.cover = cover
        self.h = h
        self.a = a
        self.b = b

    # ------------------------------------------------------------ constructors

    @classmethod
    def trivial(cls, cover: Cover, b_form: SuperForm | None = None) -> "GerbeCocycle":
        """The trivial gerbe I_b with global curving 2-form b."""
        ring = cover.ring
        if b_form is None:
            b_form = SuperForm.zero(ring)
        if not b_form.is_even():
            raise OddParity(f"curving 2-form must be even: {b_form}")
        if not b_form.is_zero() and b_form.degree() != 2:
            raise OddParity("curving must be a 2-form")
        return cls(cover,
                   CechFamily.zero(cover, 3),
                   CechFamily.zero(cover, 2),
                   CechFamily.constant(cover, 1, b_form))

    @classmethod
    def coboundary(cls, cover: Cover, f: CechFamily, z: CechFamily,
                   m: dict | None = None) -> "GerbeCocycle":
        """The Deligne coboundary of (f, z) plus an optional integer shift of
        h; trivializable by construction."""
        h = cover.delta(f)
        if m:
            ring = cover.ring
            comps = dict(h.components)
            for t, v in m.items():
                comps[t] = comps[t] + SuperForm.from_scalar(ring.scalar(int(v)))
            h = CechFamily(cover, 3, comps)
        a = cover.delta(z) + f.d().scale(cover.ring.tau())
        b = z.d()
        return cls(cover, h, a, b)

    # -------------------------------------------------------------- operations

    def _check_same_cover(self, other: "GerbeCocycle"):
        if self.cover is not other.cover:
            raise CoverMismatch("tensor requires the identical cover")

    def tensor(self, other: "GerbeCocycle") -> "GerbeCocycle":
        self._check_same_cover(other)
        return GerbeCocycle(self.cover, self.h + other.h,
                            self.a + other.a, self.b + other.b)

    def dual(self) -> "GerbeCocycle":
        return GerbeCocycle(self.cover, -self.h, -self.a, -self.b)

    def pullback(self, chart_map) -> "GerbeCocycle":
        """Componentwise pullback along a cover-compatible chart-level map
        (identity nerve morphism)."""
        return GerbeCocycle(self.cover,
                            self.h.map(chart_map.apply),
                            self.a.map(chart_map.apply),
                            self.b.map(chart_map.apply))

    def __eq__(self, other):
        if not isinstance(other, GerbeCocycle):
            return NotImplemented
        return (self.cover is other.cover and self.h == other.h
                and self.a == other.a and self.b == other.b)

    # ------------------------------------------------------------------ checks

    def check(self, workers: int | None = None) -> Report:
        rep = Report(f"check_gerbe_cocycle({self.cover.name})")
        cover = self.cover
        ring = cover.ring

        shape_ok = True
        for fam, deg, label in ((self.h, 0, "h"), (self.a, 1, "A"), (self.b, 2, "B")):
            for t, v in fam.sorted_items():
                if v.is_zero():
                    continue
                if v.degree() != deg:
                    shape_ok = False
                    rep.add(f"{label}{t} has degree {deg}", False, str(v))
                if not v.is_even():
                    shape_ok = False
                    rep.add(f"{label}{t} is even", False, str(v))
        rep.add("components have degrees (0,1,2) and even parity", shape_ok)

        delta_b = cover.delta(self.b)
        da = self.a.d()

        def descent(t):
            return (t, delta_b.components[t] == da.components[t])

        results = parallel_map(descent, cover.tuples(2), workers)
        bad = [t for t, ok in results if not ok]
        rep.add("descent: dA = delta B on every pair", not bad,
                "" if not bad else f"first failure at {bad[0]}")

        delta_a = cover.delta(self.a)
        dh = self.h.d().scale(ring.tau())

        def connection(t):
            return (t, delta_a.components[t] == dh.components[t])

        results = parallel_map(connection, cover.tuples(3), workers)
        bad = [t for t, ok in results if not ok]
        rep.add("connection: delta A = tau * dh on every triple", not bad,
                "" if not bad else f"first failure at {bad[0]}")

        delta_h = cover.delta(self.h)

        def integral(t):
            c = _constant_of(delta_h.components[t])
            return (t, c is not None and c.constant_value() is not None
                    and c.constant_value().is_integer())

        results = parallel_map(integral, cover.tuples(4), workers)
        bad = [t for t, ok in results if not ok]
        rep.add("cocycle: delta h is an integer constant on every 4-tuple", not bad,
                "" if not bad else f"first failure at {bad[0]}")
        return rep

    # -------------------------------------------------------------- invariants

    def dd_class(self) -> IntegerClass:
        """k = delta h, an integer 4-tuple cocycle."""
        cover = self.cover
        delta_h = cover.delta(self.h)
        comps = {}
        for t, v in delta_h.components.items():
            c = _constant_of(v)
            val = None if c is None else c.constant_value()
            if val is None or not val.is_integer():
                raise NotIntegral(
                    f"delta h is not an integer constant at {t}: {v}",
                    witness=None if c is None else c)
            comps[t] = int(val.re)
        return IntegerClass(cover, 4, comps)

    def curvature(self) -> SuperForm:
        """The global even 3-form H with dB_a = H on every chart."""
        cover = self.cover
        db = {t: v.d() for t, v in self.b.components.items()}
        first = db[(cover.charts[0],)]
        for (a, b) in cover.tuples(2):
            lhs = cover.rewrite(db[(b,)], b, a)
            if lhs != db[(a,)]:
                raise NotDescended(
                    f"dB disagrees on overlap ({a},{b}); broken cocycle")
        for c in cover.charts:
            if db[(c,)] != first:
                raise NotDescended(
                    f"dB on chart {c} is not the common global form")
        if not first.is_global():
            raise NotDescended("curvature involves chart-local generators")
        return first

    # ---------------------------------------------------------- rep identity

    def rep_identity_report(self) -> Report:
        """Evaluate D(tau*h, A, -B) for D = delta + (-1)^(p+1) d and assert it
        equals (tau*k, 0, 0, H) with k the Dixmier-Douady representative and
        H the curvature."""
        cover = self.cover
        ring = cover.ring
        rep = Report(f"rep_identity({cover.name})")
        try:
            k = self.dd_class()
        except NotIntegral as e:
            rep.add("(3,0): delta(tau h) = tau k with k integer", False, str(e))
            return rep
        tau_h = self.h.scale(ring.tau())
        comp30 = cover.delta(tau_h)
        ok30 = all(
            comp30.components[t] ==
            SuperForm.from_scalar(ring.tau() * k.components[t])
            for t in cover.tuples(4))
        rep.add("(3,0): delta(tau h) = tau k with k = dd_class", ok30)
        rep.add("k is an integer cocycle over Z", k.is_cocycle())
        comp21 = cover.delta(self.a) - tau_h.d()
        rep.add("(2,1): delta A - d(tau h) = 0", comp21.is_zero())
        comp12 = self.a.d() - cover.delta(self.b)
        rep.add("(1,2): dA - delta B = 0", comp12.is_zero())
        try:
            H = self.curvature()
            ok03 = all(self.b.components[(c,)].d() == H for c in cover.charts)
            rep.add("(0,3): dB_a equals the global curvature H", ok03)
            rep.add("curvature is closed", H.d().is_zero())
        except NotDescended as e:
            rep.add("(0,3): dB_a equals the global curvature H", False, str(e))
        return rep

    # ------------------------------------------------------------ trivializing

    def trivialize(self) -> TrivializationCertificate:
        """Coboundary witness for a gerbe with zero Dixmier-Douady class and
        zero curvature; exact soul solves plus nerve linear algebra for the
        locally-constant body sector."""
        cover = self.cover
        ring = cover.ring
        dd = self.dd_class()
        if not dd.is_zero():
            raise ObstructionNonzero(
                f"Dixmier-Douady class is nonzero: {dd!r}", witness=dd)
        H = self.curvature()
        if not H.is_zero():
            raise ObstructionNonzero(f"curvature is nonzero: {H}", witness=H)

        z_comps = {}
        for (c,) in cover.tuples(1):
            z_comps[(c,)] = self._primitive(self.b.components[(c,)], (c,))
        z = CechFamily(cover, 1, z_comps)

        a_res = self.a - cover.delta(z)
        f_comps = {}
        tau_inv = ring.tau(-1)
        for t in cover.tuples(2):
            f_comps[t] = self._primitive(a_res.components[t], t).scale(tau_inv)
        f = CechFamily(cover, 2, f_comps)

        m_fam = self.h - cover.delta(f)
        m_targets = {}
        for t in cover.tuples(3):
            c = _constant_of(m_fam.components[t])
            if c is None:
                raise UnsupportedBodyData(
                    f"h - delta f is not locally constant at {t}: "
                    f"{m_fam.components[t]}")
            m_targets[t] = c
        try:
            correction, m_int = _integral_correction(cover, 3, m_targets, tau_power=0)
        except NotIntegral as e:
            raise ObstructionNonzero(
                f"flat holonomy class is nonzero: {e}", witness=e.witness)
        if correction is not None:
            comps = {t: f.components[t] + SuperForm.from_scalar(correction[t])
                     for t in cover.tuples(2)}
            f = CechFamily(cover, 2, comps)
        cert = TrivializationCertificate(f, z, m_int)
        check = self.verify_certificate(cert)
        if not check.passed:
            raise UnsupportedBodyData(
                f"internal: certificate failed verification\n{check.render()}")
        return cert

    def _primitive(self, form: SuperForm, tup) -> SuperForm:
        """d-primitive of a closed form on a tuple: soul homotopy plus radial
        homotopy, falling back to an exact linear solve for trig bodies."""
        cover = self.cover
        if form.is_zero():
            return SuperForm.zero(cover.ring)
        body, soul = form.body_soul_split()
        out = SuperForm.zero(cover.ring)
        if not soul.is_zero():
            out = out + soul.soul_homotopy()
        if not body.is_zero():
            try:
                out = out + cover.radial_homotopy(body, tup[0])
            except NonPolynomialBody:
                sol = d_solve(body, cover.legal_gens(tup[0]))
                if sol is None:
                    raise UnsupportedBodyData(
                        f"no primitive for body data on {tup}: {body}")
                out = out + sol
        if out.d() != form:
            raise UnsupportedBodyData(
                f"primitive verification failed on {tup}")
        return out

    def verify_certificate(self, cert: TrivializationCertificate) -> Report:
        cover = self.cover
        ring = cover.ring
        rep = Report(f"verify_certificate({cover.name})")

        delta_f = cover.delta(cert.f)
        ok, detail = True, ""
        for t in cover.tuples(3):
            want = self.h.components[t]
            got = delta_f.components[t] + SuperForm.from_scalar(
                ring.scalar(cert.m.get(t, 0)))
            if got != want:
                ok, detail = False, f"first failure at {t}"
                break
        rep.add("delta f + m = h on every triple", ok, detail)

        lhs = cover.delta(cert.z) + cert.f.d().scale(ring.tau())
        ok, detail = True, ""
        for t in cover.tuples(2):
            if lhs.components[t] != self.a.components[t]:
                ok, detail = False, f"first failure at {t}"
                break
        rep.add("delta z + tau * df = A on every pair", ok, detail)

        ok, detail = True, ""
        for (c,) in cover.tuples(1):
            if cert.z.components[(c,)].d() != self.b.components[(c,)]:
                ok, detail = False, f"first failure at chart {c}"
                break
        rep.add("dz_a = B_a on every chart", ok, detail)

        rep.add("m is integer-valued",
                all(isinstance(v, int) for v in cert.m.values()))
        return rep


# ---------------------------------------------------------------- zig-zags


def _integral_correction(cover: Cover, level: int, targets: dict,
                         tau_power: int):
    """Find constants c on (level-1)-tuples with  delta c = targets (mod the
    integer lattice tau^tau_power * Z), exactly on every other monomial slice.

    Returns (correction dict tuple->Scalar or None, integer dict) and raises
    NotIntegral with a rational witness when the class is not integral.
    """
    ring = cover.ring
    rows, row_tuples, cols = cover.delta_matrix(level - 1)
    row_of = {t: i for i, t in enumerate(row_tuples)}
    lattice_mono = (tau_power, ring._zero_exps())

    slices: dict = {}
    for t, scal in targets.items():
        for mono, coef in scal.terms.items():
            if coef.re:
                slices.setdefault((mono, "re"), {})[t] = coef.re
            if coef.im:
                slices.setdefault((mono, "im"), {})[t] = coef.im

    corrections: dict[tuple, Scalar] = {t: ring.zero() for t in cover.tuples(level - 1)}
    any_correction = False
    int_values = {t: 0 for t in cover.tuples(level)}
    for (mono, part), entries in sorted(
            slices.items(), key=lambda kv: (kv[0][0], kv[0][1])):
        rhs = [Fraction(entries.get(t, 0)) for t in row_tuples]
        if (mono, part) == (lattice_mono, "re"):
            sol, witnesses = solve_mod1(rows, rhs, len(cols))
            if sol is None:
                raise NotIntegral(
                    f"integrality fails with witness {witnesses[0]}",
                    witness=witnesses[0])
        else:
            sol = solve_rational(rows, rhs, len(cols))
            if sol is None:
                first = next(iter(entries.values()))
                raise NotIntegral(
                    f"non-lattice slice {mono}/{part} is not a coboundary; "
                    f"witness {first}", witness=first)
        if any(sol):
            any_correction = True
        unit = GaussianRational(1) if part == "re" else GaussianRational(0, 1)
        for t, col in cols.items():
            v = sol[col]
            if v:
                corrections[t] = corrections[t] + ring._scalar({mono: unit * v})
        if (mono, part) == (lattice_mono, "re"):
            # leftover integers after the correction
            for t in cover.tuples(level):
                i = row_of[t]
                acc = rhs[i]
                for cidx, coef in rows[i].items():
                    acc -= coef * sol[cidx]
                assert acc.denominator == 1
                int_values[t] += int(acc)
    return (corrections if any_correction else None), int_values


def _zigzag(cover: Cover, omega: SuperForm, p: int):
    """De Rham -> Cech staircase: chart primitives of omega, then primitives
    of successive Cech differences, ending in a constant (p+1)-tuple cochain.
    Returns (chain, constants) where chain[j] is the level-(j+1) family of
    (p-1-j)-forms and constants maps (p+1)-tuples to Scalars."""
    ring = cover.ring
    chain = []
    comps = {(c,): cover.poincare_solve(omega, (c,)) for c in cover.charts}
    chain.append(CechFamily(cover, 1, comps))
    for j in range(1, p):
        diff = cover.delta(chain[-1])
        comps = {t: cover.poincare_solve(diff.components[t], t)
                 if not diff.components[t].is_zero() else SuperForm.zero(ring)
                 for t in cover.tuples(j + 1)}
        chain.append(CechFamily(cover, j + 1, comps))
    final = cover.delta(chain[-1])
    constants = {}
    for t in cover.tuples(p + 1):
        c = _constant_of(final.components[t])
        if c is None:
            raise NotIntegral(
                f"zig-zag did not terminate in constants at {t}: "
                f"{final.components[t]}")
        constants[t] = c
    return chain, constants


def _closed_global_split(cover: Cover, omega: SuperForm):
    """Write a closed global form as  d(lambda) + kappa  with kappa carrying
    constant coefficients, used when chart primitives hit trig bodies."""
    body, soul = omega.body_soul_split()
    lam_soul = soul.soul_homotopy() if not soul.is_zero() else SuperForm.zero(cover.ring)
    if body.is_zero():
        return lam_soul, SuperForm.zero(cover.ring)
    glob = {g for g, ch in cover.ring.gen_charts.items() if ch is None}
    res = d_solve(body, glob, harmonic=True)
    if res is None:
        raise NonPolynomialBody(
            "closed form admits no exact-plus-constant splitting over the "
            "global generators")
    lam, kappa = res
    return lam + lam_soul, kappa


def integral_check(cover: Cover, omega: SuperForm, p: int) -> IntegerClass:
    """Decide integrality of a global closed p-form (p in {2, 3}): run the
    zig-zag to a constant cochain and test the tau-coefficient lattice.
    Returns the integer class or raises NotIntegral with a rational witness."""
    from .errors import NotClosed
    if p not in (2, 3):
        raise NotClosed("integral_check supports p in {2, 3}")
    if not omega.is_zero() and omega.degree() != p:
        raise NotClosed(f"expected a {p}-form")
    if not omega.d().is_zero():
        raise NotClosed("form is not closed")
    if omega.is_zero():
        return IntegerClass(cover, p + 1, {})
    try:
        chain, constants = _zigzag(cover, omega, p)
    except NonPolynomialBody:
        lam, kappa = _closed_global_split(cover, omega)
        if kappa.is_zero():
            return IntegerClass(cover, p + 1, {})
        chain, constants = _zigzag(cover, kappa, p)
    correction, ints = _integral_correction(cover, p + 1, constants, tau_power=1)
    return IntegerClass(cover, p + 1, ints)


def construct_from_integral_form(cover: Cover, H: SuperForm,
                                 certificate: IntegerClass | None = None) -> GerbeCocycle:
    """Build a gerbe with curvature exactly H from an even, closed, integral
    3-form: B from chart primitives of H, A from primitives of delta B, h from
    primitives of delta A / tau, then an integer correction so that delta h
    lands in Z."""
    from .errors import NotClosed
    ring = cover.ring
    if not H.is_even():
        raise OddParity("curvature candidate must be even")
    if not H.d().is_zero():
        raise NotClosed("3-form is not closed")
    if H.is_zero():
        return GerbeCocycle.trivial(cover)
    if H.degree() != 3:
        raise NotClosed("expected a 3-form")
    if certificate is None:
        certificate = integral_check(cover, H, 3)

    shift = None
    try:
        chain, _constants = _zigzag(cover, H, 3)
    except NonPolynomialBody:
        lam, kappa = _closed_global_split(cover, H)
        shift = lam  # gerbe for kappa, then add d-primitive as extra curving
        if kappa.is_zero():
            return GerbeCocycle.trivial(cover, lam)
        chain, _constants = _zigzag(cover, kappa, 3)

    b, a, h_forms = chain[0], chain[1], chain[2]
    tau_inv = ring.tau(-1)
    h = h_forms.map(lambda v: v.scale(tau_inv))
    delta_h = cover.delta(h)
    targets = {}
    for t in cover.tuples(4):
        c = _constant_of(delta_h.components[t])
        if c is None:
            raise NotIntegral(f"delta h not constant at {t}")
        targets[t] = c
    correction, ints = _integral_correction(cover, 4, targets, tau_power=0)
    if correction is not None:
        comps = {t: h.components[t] - SuperForm.from_scalar(correction[t])
                 for t in cover.tuples(3)}
        h = CechFamily(cover, 3, comps)
    gerbe = GerbeCocycle(cover, h, a, b)
    if shift is not None:
        gerbe = gerbe.tensor(GerbeCocycle.trivial(cover, shift))
    return gerbe
