"""Exact coefficient ring for chart-level expressions.

Elements are polynomials over the Gaussian rationals in a formal invertible
unit ``tau`` (standing for the constant 2*pi*i) and a finite set of declared
even generators.  A declared rewrite system (e.g. ``c**2 -> 1 - s**2``) is
applied eagerly, so every `Scalar` is kept in normal form.  No floating point
appears anywhere.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Mapping

from .errors import NonTerminatingReduction, NotAUnit, UnknownGenerator

__all__ = ["GaussianRational", "Ring", "Scalar", "GR_ZERO", "GR_ONE", "GR_I"]


def _frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    raise TypeError(f"expected int or Fraction, got {type(x).__name__}")


class GaussianRational:
    """Exact complex number with rational real and imaginary parts."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        object.__setattr__(self, "re", _frac(re))
        object.__setattr__(self, "im", _frac(im))

    def __setattr__(self, *_):
        raise AttributeError("GaussianRational is immutable")

    @staticmethod
    def coerce(x) -> "GaussianRational":
        if isinstance(x, GaussianRational):
            return x
        return GaussianRational(_frac(x))

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = GaussianRational(other)
        if not isinstance(other, GaussianRational):
            return NotImplemented
        return self.re == other.re and self.im == other.im

    def __hash__(self):
        return hash((self.re, self.im))

    def __add__(self, other):
        other = GaussianRational.coerce(other)
        return GaussianRational(self.re + other.re, self.im + other.im)

    def __neg__(self):
        return GaussianRational(-self.re, -self.im)

    def __sub__(self, other):
        return self + (-GaussianRational.coerce(other))

    def __mul__(self, other):
        other = GaussianRational.coerce(other)
        return GaussianRational(
            self.re * other.re - self.im * other.im,
            self.re * other.im + self.im * other.re,
        )

    __radd__ = __add__
    __rmul__ = __mul__

    def inverse(self) -> "GaussianRational":
        n = self.re * self.re + self.im * self.im
        if not n:
            raise ZeroDivisionError("inverse of zero")
        return GaussianRational(self.re / n, -self.im / n)

    def __truediv__(self, other):
        return self * GaussianRational.coerce(other).inverse()

    def conjugate(self) -> "GaussianRational":
        return GaussianRational(self.re, -self.im)

    def is_integer(self) -> bool:
        return self.im == 0 and self.re.denominator == 1

    def is_rational(self) -> bool:
        return self.im == 0

    def __repr__(self):
        return f"GaussianRational({self.re!r}, {self.im!r})"

    def __str__(self):
        if not self.im:
            return str(self.re)
        if not self.re:
            if self.im == 1:
                return "i"
            if self.im == -1:
                return "-i"
            return f"{self.im}i"
        sign = "+" if self.im > 0 else "-"
        mag = abs(self.im)
        istr = "i" if mag == 1 else f"{mag}i"
        return f"({self.re}{sign}{istr})"


GR_ZERO = GaussianRational(0)
GR_ONE = GaussianRational(1)
GR_I = GaussianRational(0, 1)


# A monomial is (tau_power, dense exponent tuple over the ring's generators).
Monomial = tuple


def _mono_mul(a: Monomial, b: Monomial) -> Monomial:
    return (a[0] + b[0], tuple(x + y for x, y in zip(a[1], b[1])))


def _mono_degree(m: Monomial) -> int:
    return sum(m[1])


def _mono_key(m: Monomial):
    # Degree-lexicographic order on the generator part; earlier generators
    # dominate.  The tau power participates only as a final tiebreak so the
    # order stays total.
    return (_mono_degree(m), m[1], m[0])


def _mono_divides(small: tuple, big: tuple) -> bool:
    return all(x <= y for x, y in zip(small, big))


class Ring:
    """A globally presented exact differential ring.

    Declared pieces: even generators in monomial-order priority, a rewrite
    system on generator monomials, a derivation table sending each generator
    to a combination of the declared coordinate 1-form symbols, globally
    shared odd generators, and the 1-form symbols themselves.
    """

    def __init__(self, generators: Iterable[str], odd_generators: Iterable[str] = (),
                 form_symbols: Iterable[str] = ()):
        self.generators = list(generators)
        self.odd_generators = list(odd_generators)
        self.form_symbols = list(form_symbols)
        for pool in (self.generators, self.odd_generators, self.form_symbols):
            if len(set(pool)) != len(pool):
                raise UnknownGenerator("duplicate symbol in ring declaration")
        reserved = {"tau", "i"}
        names = set(self.generators) | set(self.odd_generators) | set(self.form_symbols)
        if names & reserved:
            raise UnknownGenerator(f"reserved names used: {sorted(names & reserved)}")
        if len(names) != len(self.generators) + len(self.odd_generators) + len(self.form_symbols):
            raise UnknownGenerator("generator / odd generator / form symbol names collide")
        self.gen_index = {g: k for k, g in enumerate(self.generators)}
        self.odd_index = {g: k for k, g in enumerate(self.odd_generators)}
        self.symbol_index = {s: k for k, s in enumerate(self.form_symbols)}
        self.n = len(self.generators)
        # name -> frozenset of chart names, or None when globally defined
        self.gen_charts: dict[str, frozenset | None] = {g: None for g in self.generators}
        # rewrite rules: list of (lhs exponent tuple, rhs terms dict)
        self._rules: list[tuple[tuple, dict]] = []
        # derivation table: gen index -> {symbol index: Scalar}
        self._derivations: dict[int, dict[int, "Scalar"]] = {}
        self._rewrite_cache: dict[tuple, dict] = {}
        self._finalized = False

    # ------------------------------------------------------------ declaration

    def set_generator_charts(self, name: str, charts) -> None:
        if name not in self.gen_index:
            raise UnknownGenerator(name)
        self.gen_charts[name] = None if charts is None else frozenset(charts)

    def add_relation(self, lhs: "Scalar", rhs: "Scalar") -> None:
        """Declare the rewrite rule lhs -> rhs.

        lhs must be a single tau-free monomial with coefficient 1; every rhs
        monomial must be strictly smaller under the monomial order.
        """
        if self._finalized:
            raise NonTerminatingReduction("ring already finalized")
        lt = lhs.terms
        if len(lt) != 1:
            raise NonTerminatingReduction(f"relation lhs must be a single monomial: {lhs}")
        (mono, coef), = lt.items()
        if coef != GR_ONE or mono[0] != 0:
            raise NonTerminatingReduction(f"relation lhs must be a plain monomial with coefficient 1: {lhs}")
        if _mono_degree(mono) == 0:
            raise NonTerminatingReduction("relation lhs must involve a generator")
        key = _mono_key(mono)
        for m2 in rhs.terms:
            if not _mono_key(m2) < key:
                raise NonTerminatingReduction(
                    f"relation {lhs} -> {rhs} does not decrease the monomial order")
        self._rules.append((mono[1], dict(rhs.terms)))
        self._rewrite_cache.clear()

    def set_derivation(self, gen: str, entry: Mapping[str, "Scalar"]) -> None:
        """Declare d(gen) as a combination of coordinate 1-form symbols."""
        if gen not in self.gen_index:
            raise UnknownGenerator(gen)
        table = {}
        for sym, coef in entry.items():
            if sym not in self.symbol_index:
                raise UnknownGenerator(f"unknown 1-form symbol {sym!r}")
            if not coef.is_zero():
                table[self.symbol_index[sym]] = coef
        self._derivations[self.gen_index[gen]] = table

    def finalize(self) -> None:
        """Validate the declaration: every generator has a derivation entry
        and d kills every relation."""
        for g in self.generators:
            if self.gen_index[g] not in self._derivations:
                raise UnknownGenerator(f"generator {g!r} has no derivation entry")
        self._finalized = True
        for lhs_exps, rhs in self._rules:
            d_lhs = self._raw_monomial_differential(lhs_exps)
            d_rhs = self._scalar(dict(rhs)).differential()
            for sym in set(d_lhs) | set(d_rhs):
                diff = d_lhs.get(sym, self.zero()) - d_rhs.get(sym, self.zero())
                if not diff.is_zero():
                    raise NonTerminatingReduction(
                        f"derivation incompatible with relation lhs exponents {lhs_exps}: "
                        f"d(relation) has {self.form_symbols[sym]}-part {diff}")

    def _raw_monomial_differential(self, exps: tuple) -> dict:
        """d of an unreduced generator monomial, by Leibniz on the raw word."""
        out: dict[int, Scalar] = {}
        for gi, e in enumerate(exps):
            if not e:
                continue
            lowered = list(exps)
            lowered[gi] = e - 1
            part = self._scalar({(0, tuple(lowered)): GaussianRational(e)})
            for sym, coef in self._derivations[gi].items():
                acc = out.get(sym, self.zero()) + part * coef
                if acc.is_zero():
                    out.pop(sym, None)
                else:
                    out[sym] = acc
        return out

    # ------------------------------------------------------------ constructors

    def _zero_exps(self) -> tuple:
        return (0,) * self.n

    def zero(self) -> "Scalar":
        return Scalar(self, {})

    def one(self) -> "Scalar":
        return self.scalar(1)

    def scalar(self, value) -> "Scalar":
        c = GaussianRational.coerce(value)
        if not c:
            return self.zero()
        return self._scalar({(0, self._zero_exps()): c})

    def imag_unit(self) -> "Scalar":
        return self.scalar(GR_I)

    def tau(self, power: int = 1) -> "Scalar":
        return self._scalar({(power, self._zero_exps()): GR_ONE})

    def gen(self, name: str) -> "Scalar":
        if name not in self.gen_index:
            raise UnknownGenerator(name)
        exps = list(self._zero_exps())
        exps[self.gen_index[name]] = 1
        return self._scalar({(0, tuple(exps)): GR_ONE})

    def _scalar(self, raw: dict) -> "Scalar":
        return Scalar(self, self._normalize(raw))

    # ------------------------------------------------------------- normal form

    def _rewrite_monomial(self, exps: tuple) -> dict:
        """Fully reduce a single generator monomial; returns terms dict keyed
        by (tau_power=0, exps)."""
        cached = self._rewrite_cache.get(exps)
        if cached is not None:
            return cached
        for lhs, rhs in self._rules:
            if _mono_divides(lhs, exps):
                rest = tuple(x - y for x, y in zip(exps, lhs))
                out: dict = {}
                for (tp, rexps), coef in rhs.items():
                    prod = (tp, tuple(x + y for x, y in zip(rexps, rest)))
                    for m2, c2 in self._rewrite_term(prod, coef).items():
                        acc = out.get(m2, GR_ZERO) + c2
                        if acc:
                            out[m2] = acc
                        elif m2 in out:
                            del out[m2]
                self._rewrite_cache[exps] = out
                return out
        out = {(0, exps): GR_ONE}
        self._rewrite_cache[exps] = out
        return out

    def _rewrite_term(self, mono: Monomial, coef: GaussianRational) -> dict:
        tp, exps = mono
        reduced = self._rewrite_monomial(exps)
        out = {}
        for (tp2, exps2), c2 in reduced.items():
            out[(tp + tp2, exps2)] = c2 * coef
        return out

    def _normalize(self, raw: dict) -> dict:
        out: dict = {}
        for mono, coef in raw.items():
            if not coef:
                continue
            for m2, c2 in self._rewrite_term(mono, coef).items():
                acc = out.get(m2, GR_ZERO) + c2
                if acc:
                    out[m2] = acc
                elif m2 in out:
                    del out[m2]
        return out

    # --------------------------------------------------------------- helpers

    def parse_exps(self, powers: Mapping[str, int]) -> tuple:
        exps = list(self._zero_exps())
        for g, e in powers.items():
            if g not in self.gen_index:
                raise UnknownGenerator(g)
            exps[self.gen_index[g]] = e
        return tuple(exps)

    def derivation_entry(self, gen: str) -> dict:
        return dict(self._derivations[self.gen_index[gen]])

    def coordinate_symbol(self, gen: str) -> int | None:
        """Index of the 1-form symbol when d(gen) is a single unit-coefficient
        symbol; None otherwise."""
        entry = self._derivations.get(self.gen_index[gen], {})
        if len(entry) != 1:
            return None
        (sym, coef), = entry.items()
        return sym if _is_one(coef) else None

    def __repr__(self):
        return (f"Ring(gens={self.generators}, odd={self.odd_generators}, "
                f"symbols={self.form_symbols})")


def _is_one(s: "Scalar") -> bool:
    return len(s.terms) == 1 and s.terms.get((0, (0,) * s.ring.n)) == GR_ONE


class Scalar:
    """Normal-form element of a `Ring`.  Immutable value semantics."""

    __slots__ = ("ring", "terms")

    def __init__(self, ring: Ring, terms: dict):
        object.__setattr__(self, "ring", ring)
        object.__setattr__(self, "terms", terms)

    def __setattr__(self, *_):
        raise AttributeError("Scalar is immutable")

    # ------------------------------------------------------------- structure

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def constant_value(self) -> GaussianRational | None:
        """The value when self is a pure constant (no generators, no tau)."""
        if not self.terms:
            return GR_ZERO
        if len(self.terms) != 1:
            return None
        (mono, coef), = self.terms.items()
        if mono[0] == 0 and _mono_degree(mono) == 0:
            return coef
        return None

    def coefficient_of(self, tau_power: int, powers: Mapping[str, int] = ()) -> GaussianRational:
        exps = self.ring.parse_exps(dict(powers))
        return self.terms.get((tau_power, exps), GR_ZERO)

    def monomial_slices(self) -> dict:
        """Group terms by (tau_power, exps); trivially the terms dict, exposed
        for integer-lattice bookkeeping."""
        return dict(self.terms)

    def generators_used(self) -> set:
        used = set()
        for (_tp, exps) in self.terms:
            for k, e in enumerate(exps):
                if e:
                    used.add(self.ring.generators[k])
        return used

    def is_global(self) -> bool:
        return all(self.ring.gen_charts[g] is None for g in self.generators_used())

    def max_degree(self) -> int:
        return max((_mono_degree(m) for m in self.terms), default=0)

    def tau_range(self) -> tuple[int, int]:
        powers = [m[0] for m in self.terms] or [0]
        return min(powers), max(powers)

    # ------------------------------------------------------------- arithmetic

    def _coerce(self, other) -> "Scalar":
        if isinstance(other, Scalar):
            if other.ring is not self.ring:
                raise UnknownGenerator("scalars from different rings")
            return other
        return self.ring.scalar(other)

    def __add__(self, other):
        other = self._coerce(other)
        raw = dict(self.terms)
        for m, c in other.terms.items():
            acc = raw.get(m, GR_ZERO) + c
            if acc:
                raw[m] = acc
            elif m in raw:
                del raw[m]
        return Scalar(self.ring, raw)

    __radd__ = __add__

    def __neg__(self):
        return Scalar(self.ring, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        other = self._coerce(other)
        raw: dict = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = _mono_mul(m1, m2)
                acc = raw.get(m, GR_ZERO) + c1 * c2
                if acc:
                    raw[m] = acc
                elif m in raw:
                    del raw[m]
        return self.ring._scalar(raw)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            return self.try_invert() ** (-k)
        out = self.ring.one()
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base if k > 1 else base
            k >>= 1
        return out

    def __truediv__(self, other):
        return self * self._coerce(other).try_invert()

    def __eq__(self, other):
        if not isinstance(other, Scalar):
            if isinstance(other, (int, Fraction, GaussianRational)):
                other = self._coerce(other)
            else:
                return NotImplemented
        return self.ring is other.ring and self.terms == other.terms

    def __hash__(self):
        return hash((id(self.ring), frozenset(self.terms.items())))

    # ----------------------------------------------------------------- units

    def try_invert(self) -> "Scalar":
        """Inverse of a unit: nonzero constant times a tau power."""
        if len(self.terms) != 1:
            raise NotAUnit(f"not a unit: {self}")
        (mono, coef), = self.terms.items()
        tp, exps = mono
        if _mono_degree(mono) != 0:
            raise NotAUnit(f"not a unit: {self}")
        return Scalar(self.ring, {(-tp, exps): coef.inverse()})

    # ----------------------------------------------------------- derivations

    def _partial(self, gen_idx: int) -> "Scalar":
        raw: dict = {}
        for (tp, exps), coef in self.terms.items():
            e = exps[gen_idx]
            if not e:
                continue
            lowered = list(exps)
            lowered[gen_idx] = e - 1
            m = (tp, tuple(lowered))
            acc = raw.get(m, GR_ZERO) + coef * e
            if acc:
                raw[m] = acc
            elif m in raw:
                del raw[m]
        return self.ring._scalar(raw)

    def differential(self) -> dict[int, "Scalar"]:
        """d(self) as {form symbol index: Scalar}, via the derivation table."""
        out: dict[int, Scalar] = {}
        for gi in range(self.ring.n):
            p = self._partial(gi)
            if p.is_zero():
                continue
            for sym, coef in self.ring._derivations[gi].items():
                acc = out.get(sym, self.ring.zero()) + p * coef
                if acc.is_zero():
                    out.pop(sym, None)
                else:
                    out[sym] = acc
        return out

    def derive(self, gen: str) -> "Scalar":
        """Coefficient of ``gen``'s coordinate 1-form in d(self)."""
        if gen not in self.ring.gen_index:
            raise UnknownGenerator(gen)
        entry = self.ring._derivations[self.ring.gen_index[gen]]
        if len(entry) != 1:
            raise UnknownGenerator(f"{gen!r} is not a coordinate generator")
        (sym, coef), = entry.items()
        if not _is_one(coef):
            raise UnknownGenerator(f"{gen!r} is not a coordinate generator")
        return self.differential().get(sym, self.ring.zero())

    # ---------------------------------------------------------- substitution

    def substitute(self, images: Mapping[str, "Scalar"]) -> "Scalar":
        """Ring homomorphism determined by generator images (identity on
        unlisted generators and on tau)."""
        ring = self.ring
        idx_images = {}
        for g, v in images.items():
            if g not in ring.gen_index:
                raise UnknownGenerator(g)
            idx_images[ring.gen_index[g]] = v
        out = ring.zero()
        pow_cache: dict[tuple[int, int], Scalar] = {}

        def image_power(gi: int, e: int) -> Scalar:
            key = (gi, e)
            got = pow_cache.get(key)
            if got is None:
                got = idx_images[gi] ** e
                pow_cache[key] = got
            return got

        for (tp, exps), coef in self.terms.items():
            term = Scalar(ring, {(tp, ring._zero_exps()): coef})
            plain = list(ring._zero_exps())
            for gi, e in enumerate(exps):
                if not e:
                    continue
                if gi in idx_images:
                    term = term * image_power(gi, e)
                else:
                    plain[gi] = e
            if any(plain):
                term = term * Scalar(ring, {(0, tuple(plain)): GR_ONE})
            out = out + term
        return out

    # ------------------------------------------------------------- rendering

    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda kv: (_mono_key(kv[0]), kv[0][0]))

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for (tp, exps), coef in self.sorted_terms():
            atoms = []
            if tp:
                atoms.append("tau" if tp == 1 else f"tau**{tp}")
            for k, e in enumerate(exps):
                if e:
                    g = self.ring.generators[k]
                    atoms.append(g if e == 1 else f"{g}**{e}")
            cs = str(coef)
            if atoms and cs == "1":
                body = "*".join(atoms)
            elif atoms and cs == "-1":
                body = "-" + "*".join(atoms)
            else:
                body = "*".join([cs] + atoms) if atoms else cs
            parts.append(body)
        text = parts[0]
        for p in parts[1:]:
            text += " - " + p[1:] if p.startswith("-") else " + " + p
        return text

    def __repr__(self):
        return f"Scalar({self})"
