import random

from fractions import Fraction

import pytest

from supergerbe.bodysoul import (
    DecompositionResult,
    beta_from_curvature,
    decompose,
    flat_iso_check,
    gerbe_body,
    gerbe_p_pullback,
)
from supergerbe.errors import SoulContamination
from supergerbe.examples import build_example, build_torus_cover
from supergerbe.gerbes import GerbeCocycle
from supergerbe.superforms import SuperForm


PIT1 = build_example("pit_s1")
COVER = PIT1.cover
RING = COVER.ring


def th():
    return SuperForm.theta(RING, "th1")


def dth():
    return SuperForm.dtheta(RING, "th1")


def e1():
    return SuperForm.dx(RING, "e1")


def test_gerbe_body_of_soul_trivial_gerbe_is_trivial():
    g = PIT1.gerbes["i_soul"]
    body = gerbe_body(g)
    assert body == GerbeCocycle.trivial(COVER)


def test_gerbe_body_idempotent_and_multiplicative():
    g = PIT1.gerbes["i_soul"]
    h = PIT1.gerbes["i_flat_soul"]
    assert gerbe_body(gerbe_body(g)) == gerbe_body(g)
    assert gerbe_body(g.tensor(h)) == gerbe_body(g).tensor(gerbe_body(h))


def test_p_pullback_round_trip():
    body = GerbeCocycle.trivial(COVER, (e1() * e1()).scale(0))
    lifted = gerbe_p_pullback(body)
    assert gerbe_body(lifted) == body
    assert lifted.curvature() == body.curvature()


def test_p_pullback_rejects_soul():
    with pytest.raises(SoulContamination):
        gerbe_p_pullback(PIT1.gerbes["i_soul"])


def test_beta_from_curvature_flat_case():
    g = PIT1.gerbes["i_flat_soul"]
    assert beta_from_curvature(g).is_zero()


def test_beta_from_curvature_recovers_up_to_exact():
    beta0 = PIT1.forms["curved_soul"]
    g = GerbeCocycle.trivial(COVER, beta0)
    beta = beta_from_curvature(g)
    diff = beta - beta0
    assert diff.d().is_zero()
    assert beta.d() == g.curvature().soul()
    assert beta.body().is_zero()
    if not diff.is_zero():
        assert diff.soul_homotopy().d() == diff


def test_decompose_body_only_gerbe():
    g = GerbeCocycle.trivial(COVER)
    res = decompose(g)
    assert res.beta.is_zero()
    assert res.body_gerbe == g
    assert res.verify(g).passed


def test_decompose_soul_shift_round_trip():
    rng = random.Random(3)
    for _ in range(5):
        coef = Fraction(rng.randint(-3, 3), rng.randint(1, 2))
        beta0 = (th() * dth() * e1()).scale(coef) + (dth() * dth()).scale(rng.randint(-2, 2))
        g = GerbeCocycle.trivial(COVER, beta0)
        res = decompose(g)
        assert res.body_gerbe == GerbeCocycle.trivial(COVER)
        diff = res.beta - beta0
        assert diff.d().is_zero()
        if not diff.is_zero():
            assert diff.soul_homotopy().d() == diff
        assert res.verify(g).passed


def test_decompose_flat_gerbe_with_soul_content():
    g = PIT1.gerbes["i_flat_soul"]
    res = decompose(g)
    assert res.beta.is_zero()  # flat: soul curvature vanishes
    assert res.body_gerbe.curvature().is_zero()
    assert res.verify(g).passed


def test_torsor_equivariance_under_flat_body_shift():
    # shifting by a pullback of a flat body gerbe shifts the body factor and
    # leaves the canonical soul form unchanged
    beta0 = PIT1.forms["curved_soul"]
    g = GerbeCocycle.trivial(COVER, beta0)
    flat_body = GerbeCocycle.trivial(
        COVER, SuperForm.dx(RING, "e1").scale(RING.tau()) * SuperForm.zero(RING))
    flat_body = GerbeCocycle.trivial(COVER)  # I with zero curving
    shifted = g.tensor(gerbe_p_pullback(flat_body))
    r1, r2 = decompose(g), decompose(shifted)
    assert r1.beta == r2.beta
    assert r2.body_gerbe == gerbe_body(g).tensor(flat_body)


def test_flat_iso_check_report_structure():
    corpus = {
        "trivial": GerbeCocycle.trivial(COVER),
        "flat_soul": PIT1.gerbes["i_flat_soul"],
        "curved": PIT1.gerbes["i_soul"],
    }
    rep = flat_iso_check(corpus)
    assert not rep.passed  # "curved" is rejected
    names = {n: ok for n, ok, _ in rep.entries}
    assert names.get("curved: flat") is False
    assert names.get("trivial: flat") is True
    flat_only = {k: v for k, v in corpus.items() if k != "curved"}
    assert flat_iso_check(flat_only).passed


def test_decomposition_verify_catches_wrong_beta():
    beta0 = PIT1.forms["curved_soul"]
    g = GerbeCocycle.trivial(COVER, beta0)
    res = decompose(g)
    tampered = DecompositionResult(res.body_gerbe,
                                   res.beta.scale(2), res.certificate)
    assert not tampered.verify(g).passed
