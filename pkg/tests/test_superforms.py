import itertools
import random

from fractions import Fraction

import pytest

from supergerbe.errors import NonNilpotentArgument, NotPureSoul, ParityMismatch
from supergerbe.scalars import Ring
from supergerbe.superforms import (
    ChartMap,
    SuperForm,
    SuperFunction,
    as_function,
    mono_degree,
    mono_parity,
    sf_exp,
    sf_log,
)


def rm23():
    """R^{2|3}: coordinates x1, x2 and odd th1, th2, th3."""
    r = Ring(["x1", "x2"], odd_generators=["th1", "th2", "th3"],
             form_symbols=["dx1", "dx2"])
    r.set_derivation("x1", {"dx1": r.one()})
    r.set_derivation("x2", {"dx2": r.one()})
    r.finalize()
    return r


RING = rm23()


def th(j):
    return SuperForm.theta(RING, f"th{j}")


def dth(j):
    return SuperForm.dtheta(RING, f"th{j}")


def dx(i):
    return SuperForm.dx(RING, f"dx{i}")


def x(i):
    return SuperForm.from_scalar(RING.gen(f"x{i}"))


def random_scalar(rng, ring=RING):
    out = ring.scalar(rng.randint(-3, 3))
    for _ in range(rng.randint(0, 2)):
        out = out * ring.gen(rng.choice(ring.generators))
    return out + rng.randint(-2, 2)


def all_monomials(max_dth=2, max_dx=2):
    thetas = [tuple(t) for k in range(4) for t in itertools.combinations((0, 1, 2), k)]
    dxs = [tuple(t) for k in range(min(max_dx, 2) + 1)
           for t in itertools.combinations((0, 1), k)]
    dths = [tuple(sorted(t)) for k in range(max_dth + 1)
            for t in itertools.combinations_with_replacement((0, 1, 2), k)]
    for a in thetas:
        for b in dxs:
            for c in dths:
                yield (a, b, c)


MONOMIALS = list(all_monomials())


def random_form(rng, terms=3, homogeneous=False):
    if homogeneous:
        shape = rng.choice(MONOMIALS)
        pool = [m for m in MONOMIALS
                if mono_degree(m) == mono_degree(shape)
                and mono_parity(m) == mono_parity(shape)]
    else:
        pool = MONOMIALS
    out = SuperForm.zero(RING)
    for _ in range(terms):
        m = rng.choice(pool)
        out = out + SuperForm(RING, {m: RING.one()}).scale(random_scalar(rng))
    return out


def test_odd_square_is_zero():
    assert (th(1) * th(1)).is_zero()


def test_thetas_anticommute():
    assert th(1) * th(2) == -(th(2) * th(1))


def test_nilpotent_square():
    u = 1 + th(1) * th(2)
    assert u * u == 1 + 2 * th(1) * th(2)


def test_dx_wedge_dx_zero_but_dtheta_square_survives():
    assert (dx(1) * dx(1)).is_zero()
    sq = dth(1) * dth(1)
    assert not sq.is_zero()
    assert sq.coefficient(((), (), (0, 0))) == RING.one()


def test_wedge_sign_law_on_random_homogeneous_pairs():
    rng = random.Random(3)
    for _ in range(500):
        a = random_form(rng, terms=2, homogeneous=True)
        b = random_form(rng, terms=2, homogeneous=True)
        if a.is_zero() or b.is_zero():
            continue
        p, pp = a.degree(), a.parity()
        q, qp = b.degree(), b.parity()
        sign = (-1) ** (p * q + pp * qp)
        assert a * b == (b * a).scale(sign)


def test_d_on_generators():
    assert x(1).d() == dx(1)
    assert th(1).d() == dth(1)
    assert (x(1) * dx(1)).d().is_zero()
    assert (th(1) * th(2)).d() == dth(1) * th(2) + th(1) * dth(2)


def test_d_squared_zero_on_random_forms():
    rng = random.Random(5)
    for _ in range(500):
        a = random_form(rng)
        assert a.d().d().is_zero()


def test_d_leibniz_on_random_homogeneous_pairs():
    rng = random.Random(7)
    for _ in range(200):
        a = random_form(rng, terms=2, homogeneous=True)
        b = random_form(rng, terms=2)
        if a.is_zero():
            continue
        sign = (-1) ** a.degree()
        assert (a * b).d() == a.d() * b + (a * b.d()).scale(sign)


def test_body_soul_split():
    a = x(1) * dx(1) + th(1) * dth(1)
    body, soul = a.body_soul_split()
    assert body == x(1) * dx(1)
    assert soul == th(1) * dth(1)
    assert (body + soul) == a
    assert body.body() == body and body.soul().is_zero()
    assert soul.soul() == soul and soul.body().is_zero()


def test_split_idempotent_on_random_forms():
    rng = random.Random(9)
    for _ in range(100):
        a = random_form(rng)
        b, s = a.body_soul_split()
        assert b + s == a
        assert b.body() == b
        assert s.soul() == s
        # i* p* = id on body forms
        assert ChartMap.body_map(RING).apply(b) == b


def test_soul_homotopy_on_weight_one():
    k = dth(1).soul_homotopy()
    assert k == th(1)
    assert th(1).d() == dth(1)


def test_soul_homotopy_rejects_body():
    with pytest.raises(NotPureSoul):
        (x(1) * dx(1)).soul_homotopy()


def test_homotopy_identity_exhaustive():
    # every soul monomial with <=3 thetas, <=3 dthetas and any dx block
    for m in all_monomials(max_dth=3):
        if len(m[0]) + len(m[2]) == 0:
            continue
        w = SuperForm(RING, {m: RING.one()})
        assert w.d().soul_homotopy() + w.soul_homotopy().d() == w, m


def test_homotopy_identity_random():
    rng = random.Random(11)
    for _ in range(500):
        w = random_form(rng).soul()
        if w.is_zero():
            continue
        assert w.d().soul_homotopy() + w.soul_homotopy().d() == w


def test_sf_exp_square_zero():
    n = as_function(th(1) * th(2))
    assert sf_exp(n) == 1 + th(1) * th(2)


def test_sf_log_identity():
    one = SuperFunction.one(RING)
    assert sf_log(one).is_zero()


def test_exp_log_round_trip_random():
    rng = random.Random(13)
    for _ in range(100):
        n = SuperForm.zero(RING)
        for _ in range(3):
            k = rng.randint(1, 3)
            mono = tuple(sorted(rng.sample((0, 1, 2), k)))
            n = n + SuperForm(RING, {(mono, (), ()): RING.one()}).scale(random_scalar(rng))
        n = as_function(n)
        u = sf_exp(n)
        assert u.body() == 1
        assert sf_log(u) == n
        assert sf_exp(sf_log(1 + n)) == 1 + n


def test_sf_exp_rejects_body():
    with pytest.raises(NonNilpotentArgument):
        sf_exp(as_function(x(1) * th(0 + 1) * th(2)) + SuperFunction.one(RING))


def test_pullback_identity():
    rng = random.Random(17)
    ident = ChartMap.identity(RING)
    for _ in range(50):
        a = random_form(rng)
        assert ident.apply(a) == a


def test_pullback_linear_odd_map():
    phi = ChartMap(RING, RING, odd={"th1": th(1) + th(2)})
    phi.validate()
    assert phi.apply(dth(1)) == dth(1) + dth(2)
    assert phi.apply(th(1)) == th(1) + th(2)


def test_pullback_commutes_with_d_random():
    rng = random.Random(19)
    phi = ChartMap.from_coordinate_images(
        RING,
        even={"x1": x(1) + 2 * x(2) + th(1) * th(2),
              "x2": SuperForm.from_scalar(RING.gen("x2") ** 2 + RING.scalar(1))},
        odd={"th1": th(2), "th2": (x(1) * th(1)), "th3": th(3) + th(1)},
    )
    phi.validate()
    for _ in range(200):
        a = random_form(rng)
        assert phi.apply(a.d()) == phi.apply(a).d()


def test_pullback_is_algebra_map():
    rng = random.Random(23)
    phi = ChartMap.from_coordinate_images(
        RING, even={"x1": x(2)}, odd={"th1": th(1) + th(3)})
    phi.validate()
    for _ in range(100):
        a, b = random_form(rng, terms=2), random_form(rng, terms=2)
        assert phi.apply(a * b) == phi.apply(a) * phi.apply(b)


def test_parity_mismatch_rejected():
    phi = ChartMap(RING, RING, odd={"th1": x(1)})
    with pytest.raises(ParityMismatch):
        phi.validate()


def test_body_of_exp_is_one():
    rng = random.Random(29)
    for _ in range(50):
        n = SuperForm.zero(RING)
        for _ in range(2):
            k = rng.randint(1, 3)
            mono = tuple(sorted(rng.sample((0, 1, 2), k)))
            n = n + SuperForm(RING, {(mono, (), ()): RING.one()}).scale(random_scalar(rng))
        assert sf_exp(as_function(n)).body() == 1
