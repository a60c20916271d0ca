"""Grassmann-coefficient functions and the bigraded super de Rham calculus.

A monomial is a canonically ordered word  theta-block . dx-block . dtheta-block
with all commutation signs absorbed into the coefficient:

    theta theta'   anticommute        dx dx'    anticommute
    dtheta dtheta' commute            theta dx  commute
    theta dtheta   anticommute        dx dtheta anticommute

dx symbols are exterior (square zero); dtheta symbols carry polynomial
multiplicity.  Form degree is #dx + #dtheta, parity is (#theta + #dtheta) mod 2
and soul weight is #theta + #dtheta.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Mapping

from .errors import (
    GeneratorMismatch,
    NonNilpotentArgument,
    NotPureSoul,
    ParityMismatch,
    RelationViolation,
    UnknownGenerator,
)
from .scalars import GR_ONE, GaussianRational, Ring, Scalar

__all__ = ["SuperForm", "SuperFunction", "ChartMap", "sf_exp", "sf_log"]

_THETA, _DX, _DTH = 0, 1, 2

# swap_sign[kind_a][kind_b]: sign picked up when two adjacent atoms of these
# kinds trade places.
_SWAP = {
    (_THETA, _THETA): -1,
    (_DX, _DX): -1,
    (_DTH, _DTH): 1,
    (_THETA, _DX): 1,
    (_DX, _THETA): 1,
    (_THETA, _DTH): -1,
    (_DTH, _THETA): -1,
    (_DX, _DTH): -1,
    (_DTH, _DX): -1,
}

_ATOM_DEGREE = {_THETA: 0, _DX: 1, _DTH: 1}


def _atoms(mono) -> list:
    th, dx, dth = mono
    word = [(_THETA, j) for j in th]
    word += [(_DX, i) for i in dx]
    word += [(_DTH, j) for j in dth]
    return word


def _pack(word) -> tuple:
    th = tuple(a[1] for a in word if a[0] == _THETA)
    dx = tuple(a[1] for a in word if a[0] == _DX)
    dth = tuple(a[1] for a in word if a[0] == _DTH)
    return (th, dx, dth)


def _canonicalize(word: list):
    """Insertion sort into canonical order, returning (sign, monomial) or
    None when a theta or dx atom repeats."""
    sign = 1
    arr = list(word)
    for i in range(1, len(arr)):
        j = i
        while j > 0 and arr[j - 1] > arr[j]:
            sign *= _SWAP[(arr[j - 1][0], arr[j][0])]
            arr[j - 1], arr[j] = arr[j], arr[j - 1]
            j -= 1
    for k in range(1, len(arr)):
        if arr[k] == arr[k - 1] and arr[k][0] in (_THETA, _DX):
            return None
    return sign, _pack(arr)


def mono_degree(mono) -> int:
    return len(mono[1]) + len(mono[2])


def mono_parity(mono) -> int:
    return (len(mono[0]) + len(mono[2])) % 2


def mono_soul_weight(mono) -> int:
    return len(mono[0]) + len(mono[2])


class SuperForm:
    """(degree, parity)-bigraded exterior expression with Scalar coefficients."""

    __slots__ = ("ring", "terms")

    def __init__(self, ring: Ring, terms: dict | None = None):
        object.__setattr__(self, "ring", ring)
        object.__setattr__(self, "terms", {} if terms is None else terms)

    def __setattr__(self, *_):
        raise AttributeError("SuperForm is immutable")

    # ------------------------------------------------------------ constructors

    @classmethod
    def zero(cls, ring: Ring) -> "SuperForm":
        return cls(ring)

    @classmethod
    def from_scalar(cls, s: Scalar) -> "SuperForm":
        if s.is_zero():
            return cls(s.ring)
        return cls(s.ring, {((), (), ()): s})

    @classmethod
    def theta(cls, ring: Ring, name: str) -> "SuperForm":
        if name not in ring.odd_index:
            raise UnknownGenerator(f"unknown odd generator {name!r}")
        return cls(ring, {((ring.odd_index[name],), (), ()): ring.one()})

    @classmethod
    def dx(cls, ring: Ring, name: str) -> "SuperForm":
        if name not in ring.symbol_index:
            raise UnknownGenerator(f"unknown 1-form symbol {name!r}")
        return cls(ring, {((), (ring.symbol_index[name],), ()): ring.one()})

    @classmethod
    def dtheta(cls, ring: Ring, name: str) -> "SuperForm":
        if name not in ring.odd_index:
            raise UnknownGenerator(f"unknown odd generator {name!r}")
        return cls(ring, {((), (), (ring.odd_index[name],)): ring.one()})

    # --------------------------------------------------------------- structure

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def degrees(self) -> set:
        return {mono_degree(m) for m in self.terms}

    def parities(self) -> set:
        return {mono_parity(m) for m in self.terms}

    def degree(self) -> int:
        degs = self.degrees()
        if len(degs) > 1:
            raise ValueError(f"inhomogeneous degree {sorted(degs)}")
        return degs.pop() if degs else 0

    def parity(self) -> int:
        pars = self.parities()
        if len(pars) > 1:
            raise ValueError(f"inhomogeneous parity")
        return pars.pop() if pars else 0

    def is_even(self) -> bool:
        return all(mono_parity(m) == 0 for m in self.terms)

    def is_homogeneous(self) -> bool:
        return len(self.degrees()) <= 1 and len(self.parities()) <= 1

    def coefficient(self, mono) -> Scalar:
        return self.terms.get(mono, self.ring.zero())

    def is_global(self) -> bool:
        return all(s.is_global() for s in self.terms.values())

    def max_coefficient_degree(self) -> int:
        return max((s.max_degree() for s in self.terms.values()), default=0)

    def _check_ring(self, other: "SuperForm") -> None:
        if self.ring is not other.ring:
            raise GeneratorMismatch("forms over different rings")

    # -------------------------------------------------------------- arithmetic

    def __add__(self, other):
        if isinstance(other, (int, Fraction, GaussianRational, Scalar)):
            other = SuperForm.from_scalar(self.ring.zero() + other)
        self._check_ring(other)
        raw = dict(self.terms)
        for m, s in other.terms.items():
            acc = raw.get(m)
            acc = s if acc is None else acc + s
            if acc.is_zero():
                raw.pop(m, None)
            else:
                raw[m] = acc
        return self._make(raw, other)

    __radd__ = __add__

    def __neg__(self):
        return self._make({m: -s for m, s in self.terms.items()}, self)

    def __sub__(self, other):
        if isinstance(other, (int, Fraction, GaussianRational, Scalar)):
            other = SuperForm.from_scalar(self.ring.zero() + other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def _make(self, raw: dict, other=None) -> "SuperForm":
        cls = SuperForm
        if isinstance(self, SuperFunction) and (other is None or isinstance(other, SuperFunction)):
            cls = SuperFunction
        return cls(self.ring, raw)

    def scale(self, s) -> "SuperForm":
        s = self.ring.zero() + s
        if s.is_zero():
            return self._make({})
        raw = {}
        for m, c in self.terms.items():
            acc = c * s
            if not acc.is_zero():
                raw[m] = acc
        return self._make(raw)

    def wedge(self, other: "SuperForm") -> "SuperForm":
        if isinstance(other, (int, Fraction, GaussianRational, Scalar)):
            return self.scale(other)
        self._check_ring(other)
        raw: dict = {}
        for m1, s1 in self.terms.items():
            w1 = _atoms(m1)
            for m2, s2 in other.terms.items():
                res = _canonicalize(w1 + _atoms(m2))
                if res is None:
                    continue
                sign, mono = res
                term = s1 * s2
                if sign < 0:
                    term = -term
                acc = raw.get(mono)
                acc = term if acc is None else acc + term
                if acc.is_zero():
                    raw.pop(mono, None)
                else:
                    raw[mono] = acc
        return self._make(raw, other)

    __mul__ = wedge

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction, GaussianRational, Scalar)):
            return self.scale(other)
        return NotImplemented

    def __eq__(self, other):
        if isinstance(other, (int, Fraction, GaussianRational, Scalar)):
            other = SuperForm.from_scalar(self.ring.zero() + other)
        if not isinstance(other, SuperForm):
            return NotImplemented
        return self.ring is other.ring and self.terms == other.terms

    def __hash__(self):
        return hash((id(self.ring), frozenset((m, frozenset(s.terms.items()))
                                              for m, s in self.terms.items())))

    # ------------------------------------------------------------ differential

    def d(self) -> "SuperForm":
        out: dict = {}

        def put(mono, s):
            if s.is_zero():
                return
            acc = out.get(mono)
            acc = s if acc is None else acc + s
            if acc.is_zero():
                out.pop(mono, None)
            else:
                out[mono] = acc

        for mono, s in self.terms.items():
            word = _atoms(mono)
            # d(scalar) wedge mono
            for sym, coef in s.differential().items():
                res = _canonicalize([(_DX, sym)] + word)
                if res is not None:
                    sign, m2 = res
                    put(m2, coef if sign > 0 else -coef)
            # Leibniz over the atoms; d(theta_j) = dtheta_j
            prefix = 0
            for k, (kind, idx) in enumerate(word):
                if kind == _THETA:
                    res = _canonicalize(word[:k] + [(_DTH, idx)] + word[k + 1:])
                    if res is not None:
                        sign, m2 = res
                        if prefix % 2:
                            sign = -sign
                        put(m2, s if sign > 0 else -s)
                prefix += _ATOM_DEGREE[kind]
        return SuperForm(self.ring, out)

    # ------------------------------------------------------------- body / soul

    def body(self) -> "SuperForm":
        return self._make({m: s for m, s in self.terms.items()
                           if mono_soul_weight(m) == 0})

    def soul(self) -> "SuperForm":
        return self._make({m: s for m, s in self.terms.items()
                           if mono_soul_weight(m) > 0})

    def body_soul_split(self) -> tuple["SuperForm", "SuperForm"]:
        return self.body(), self.soul()

    def soul_homotopy(self) -> "SuperForm":
        """Homotopy K with dK + Kd = id on pure-soul forms: contract one
        dtheta into its theta per occurrence, weighted by 1/soul-weight."""
        out: dict = {}

        def put(mono, s):
            if s.is_zero():
                return
            acc = out.get(mono)
            acc = s if acc is None else acc + s
            if acc.is_zero():
                out.pop(mono, None)
            else:
                out[mono] = acc

        for mono, s in self.terms.items():
            w = mono_soul_weight(mono)
            if w == 0:
                raise NotPureSoul(f"monomial {self._mono_str(mono)} has no soul part")
            word = _atoms(mono)
            weight = s * Fraction(1, w)
            prefix = 0
            for k, (kind, idx) in enumerate(word):
                if kind == _DTH:
                    res = _canonicalize(word[:k] + [(_THETA, idx)] + word[k + 1:])
                    if res is not None:
                        sign, m2 = res
                        if prefix % 2:
                            sign = -sign
                        put(m2, weight if sign > 0 else -weight)
                prefix += _ATOM_DEGREE[kind]
        return SuperForm(self.ring, out)

    # ------------------------------------------------------------ substitution

    def substitute_scalars(self, images: Mapping[str, Scalar]) -> "SuperForm":
        """Apply an even scalar-generator substitution to every coefficient.
        Exterior content is untouched; this is a chart rewrite."""
        raw = {}
        for m, s in self.terms.items():
            acc = s.substitute(images)
            if not acc.is_zero():
                raw[m] = acc
        return self._make(raw)

    def pullback(self, chart_map: "ChartMap") -> "SuperForm":
        return chart_map.apply(self)

    # --------------------------------------------------------------- rendering

    def _mono_str(self, mono) -> str:
        th, dx, dth = mono
        atoms = [self.ring.odd_generators[j] for j in th]
        atoms += [self.ring.form_symbols[i] for i in dx]
        atoms += ["d" + self.ring.odd_generators[j] for j in dth]
        return "*".join(atoms) if atoms else "1"

    def sorted_terms(self):
        return sorted(self.terms.items(),
                      key=lambda kv: (mono_degree(kv[0]), kv[0]))

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for mono, s in self.sorted_terms():
            ms = self._mono_str(mono)
            ss = str(s)
            if mono == ((), (), ()):
                parts.append(ss)
            elif ss == "1":
                parts.append(ms)
            elif ss == "-1":
                parts.append("-" + ms)
            elif ("+" in ss[1:]) or (" - " in ss):
                parts.append(f"({ss})*{ms}")
            else:
                parts.append(f"{ss}*{ms}")
        text = parts[0]
        for p in parts[1:]:
            text += " - " + p[1:] if p.startswith("-") else " + " + p
        return text

    def __repr__(self):
        return f"SuperForm({self})"


class SuperFunction(SuperForm):
    """Degree-0 element: Grassmann-valued function."""

    __slots__ = ()

    def __init__(self, ring: Ring, terms: dict | None = None):
        terms = {} if terms is None else terms
        for m in terms:
            if m[1] or m[2]:
                raise ValueError("SuperFunction cannot carry dx or dtheta factors")
        super().__init__(ring, terms)

    @classmethod
    def one(cls, ring: Ring) -> "SuperFunction":
        return cls(ring, {((), (), ()): ring.one()})

    def body_scalar(self) -> Scalar:
        return self.terms.get(((), (), ()), self.ring.zero())

    def as_function(self) -> "SuperFunction":
        return self


def as_function(form: SuperForm) -> SuperFunction:
    if any(m[1] or m[2] for m in form.terms):
        raise ValueError("form has positive degree")
    return SuperFunction(form.ring, dict(form.terms))


def sf_exp(n: SuperFunction) -> SuperFunction:
    """exp of a pure-soul (hence nilpotent) function, as a finite series."""
    if not n.body().is_zero():
        raise NonNilpotentArgument(f"body part is {n.body()}, expected 0")
    ring = n.ring
    out = SuperFunction.one(ring)
    power = SuperFunction.one(ring)
    kfact = 1
    for k in range(1, len(ring.odd_generators) + 1):
        power = as_function(power * n)
        if power.is_zero():
            break
        kfact *= k
        out = out + power.scale(Fraction(1, kfact))
    return as_function(out)


def sf_log(u: SuperFunction) -> SuperFunction:
    """log of 1 + (pure soul); exact finite series, inverse to sf_exp."""
    n = u - SuperFunction.one(u.ring)
    if not n.body().is_zero():
        raise NonNilpotentArgument(f"argument must be 1 + pure soul, got body {u.body()}")
    ring = u.ring
    out = SuperForm.zero(ring)
    power = SuperFunction.one(ring)
    for k in range(1, len(ring.odd_generators) + 1):
        power = as_function(power * n)
        if power.is_zero():
            break
        out = out + power.scale(Fraction(1 if k % 2 else -1, k))
    return as_function(out)


class ChartMap:
    """Pullback data for a chart-level map.

    `apply` sends forms written over `ring_from` to forms over `ring_to`.
    Unlisted generators and symbols map identically (the two rings must then
    share those names).  dtheta images are the differentials of the theta
    images, so the map commutes with d by construction.
    """

    def __init__(self, ring_from: Ring, ring_to: Ring,
                 even: Mapping[str, SuperForm] | None = None,
                 odd: Mapping[str, SuperForm] | None = None,
                 symbols: Mapping[str, SuperForm] | None = None):
        self.ring_from = ring_from
        self.ring_to = ring_to
        self.even = dict(even or {})
        self.odd = dict(odd or {})
        self.symbols = dict(symbols or {})
        for g in self.even:
            if g not in ring_from.gen_index:
                raise UnknownGenerator(g)
        for g in self.odd:
            if g not in ring_from.odd_index:
                raise UnknownGenerator(g)
        for s in self.symbols:
            if s not in ring_from.symbol_index:
                raise UnknownGenerator(s)
        self._scalar_only = (
            ring_from is ring_to
            and not self.odd and not self.symbols
            and all(isinstance(v, Scalar) or
                    (isinstance(v, SuperForm) and all(m == ((), (), ()) for m in v.terms))
                    for v in self.even.values())
        )
        self._scalar_images = None
        if self._scalar_only:
            self._scalar_images = {
                g: (v if isinstance(v, Scalar) else v.coefficient(((), (), ())))
                for g, v in self.even.items()
            }
        self._dth_cache: dict[int, SuperForm] = {}
        self._pow_cache: dict[tuple[int, int], SuperForm] = {}

    # ------------------------------------------------------------ constructors

    @classmethod
    def identity(cls, ring: Ring) -> "ChartMap":
        return cls(ring, ring)

    @classmethod
    def body_map(cls, ring: Ring) -> "ChartMap":
        """Pullback along the body inclusion: theta -> 0 (hence dtheta -> 0)."""
        zero = SuperForm.zero(ring)
        return cls(ring, ring, odd={g: zero for g in ring.odd_generators})

    @classmethod
    def from_scalar_map(cls, ring: Ring, images: Mapping[str, Scalar]) -> "ChartMap":
        return cls(ring, ring, even=dict(images))

    @classmethod
    def from_coordinate_images(cls, ring: Ring,
                               even: Mapping[str, SuperForm] | None = None,
                               odd: Mapping[str, SuperForm] | None = None) -> "ChartMap":
        """Self-map given on generators only; each mapped coordinate symbol is
        sent to d(image of its generator), so the map commutes with d."""
        even = dict(even or {})
        symbols = {}
        for g, img in even.items():
            sym = ring.coordinate_symbol(g)
            if sym is not None:
                img_form = img if isinstance(img, SuperForm) else SuperForm.from_scalar(img)
                symbols[ring.form_symbols[sym]] = img_form.d()
        return cls(ring, ring, even=even, odd=dict(odd or {}), symbols=symbols)

    # ----------------------------------------------------------------- images

    def even_image(self, name: str) -> SuperForm:
        v = self.even.get(name)
        if v is None:
            return SuperForm.from_scalar(self.ring_to.gen(name))
        if isinstance(v, Scalar):
            return SuperForm.from_scalar(v)
        return v

    def odd_image(self, idx: int) -> SuperForm:
        name = self.ring_from.odd_generators[idx]
        v = self.odd.get(name)
        if v is None:
            return SuperForm.theta(self.ring_to, name)
        return v

    def symbol_image(self, idx: int) -> SuperForm:
        name = self.ring_from.form_symbols[idx]
        v = self.symbols.get(name)
        if v is None:
            return SuperForm.dx(self.ring_to, name)
        return v

    def dtheta_image(self, idx: int) -> SuperForm:
        got = self._dth_cache.get(idx)
        if got is None:
            name = self.ring_from.odd_generators[idx]
            if name in self.odd:
                got = self.odd_image(idx).d()
            else:
                got = SuperForm.dtheta(self.ring_to, name)
            self._dth_cache[idx] = got
        return got

    def _even_power(self, gi: int, e: int) -> SuperForm:
        key = (gi, e)
        got = self._pow_cache.get(key)
        if got is None:
            base = self.even_image(self.ring_from.generators[gi])
            got = base
            for _ in range(e - 1):
                got = got * base
            self._pow_cache[key] = got
        return got

    # ------------------------------------------------------------- application

    def apply_scalar(self, s: Scalar) -> SuperForm:
        if self._scalar_only:
            return SuperForm.from_scalar(s.substitute(self._scalar_images))
        ring_to = self.ring_to
        out = SuperForm.zero(ring_to)
        for (tp, exps), coef in s.terms.items():
            term = SuperForm.from_scalar(
                Scalar(ring_to, {(tp, ring_to._zero_exps()): coef}))
            for gi, e in enumerate(exps):
                if e:
                    term = term * self._even_power(gi, e)
            out = out + term
        return out

    def apply(self, form: SuperForm) -> SuperForm:
        if form.ring is not self.ring_from:
            raise GeneratorMismatch("form does not live over the map's source ring")
        if self._scalar_only:
            return form.substitute_scalars(self._scalar_images)
        out = SuperForm.zero(self.ring_to)
        for mono, s in form.terms.items():
            term = self.apply_scalar(s)
            for kind, idx in _atoms(mono):
                if term.is_zero():
                    break
                if kind == _THETA:
                    term = term * self.odd_image(idx)
                elif kind == _DX:
                    term = term * self.symbol_image(idx)
                else:
                    term = term * self.dtheta_image(idx)
            out = out + term
        if isinstance(form, SuperFunction) and all(m[1] == () and m[2] == ()
                                                   for m in out.terms):
            return SuperFunction(self.ring_to, dict(out.terms))
        return out

    # -------------------------------------------------------------- validation

    def validate(self) -> None:
        """Check parity, preservation of relations, and compatibility with the
        derivation table."""
        for g, v in self.even.items():
            img = self.even_image(g)
            if not all(mono_degree(m) == 0 and mono_parity(m) == 0 for m in img.terms):
                raise ParityMismatch(f"image of even generator {g!r} must be an even function")
        for g in self.odd:
            img = self.odd_image(self.ring_from.odd_index[g])
            if not all(mono_degree(m) == 0 and mono_parity(m) == 1 for m in img.terms):
                raise ParityMismatch(f"image of odd generator {g!r} must be an odd function")
        for s in self.symbols:
            img = self.symbol_image(self.ring_from.symbol_index[s])
            if not all(mono_degree(m) == 1 and mono_parity(m) == 0 for m in img.terms):
                raise ParityMismatch(f"image of 1-form symbol {s!r} must be an even 1-form")
        # relations pull back to zero
        for lhs_exps, rhs in self.ring_from._rules:
            img = SuperForm.from_scalar(self.ring_to.one())
            for gi, e in enumerate(lhs_exps):
                if e:
                    img = img * self._even_power(gi, e)
            rhs_img = self.apply_scalar(Scalar(self.ring_from, dict(rhs)))
            if not (img - rhs_img).is_zero():
                raise RelationViolation(
                    f"relation with lhs exponents {lhs_exps} not preserved")
        # map commutes with d on every even generator
        for g in self.ring_from.generators:
            entry = self.ring_from.derivation_entry(g)
            target = SuperForm.zero(self.ring_to)
            for sym, coef in entry.items():
                target = target + self.apply_scalar(coef) * self.symbol_image(sym)
            got = self.even_image(g).d()
            if not (got - target).is_zero():
                raise RelationViolation(
                    f"derivation table not preserved on generator {g!r}")
