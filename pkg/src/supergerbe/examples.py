"""Built-in example corpus: covers, forms, and gerbes.

Tori are covered by 3 arcs per circle direction (27 charts on T^3).  Angles
are measured in full turns, so the coordinate 1-forms e_i have unit periods
and an integral p-form carries an explicit factor of tau per class unit.
Trig pairs (c_i, s_i) = (cos, sin of the angle) drive the partition of unity;
sqrt(3) joins the ring as a constant generator r3 with r3**2 -> 3.
"""

from __future__ import annotations

import functools
import itertools

from fractions import Fraction

from .scalars import GR_I, GaussianRational, Ring, Scalar
from .superforms import SuperForm
from .cover import Cover

__all__ = [
    "build_super_cartesian_cover",
    "build_torus_cover",
    "torus_volume_form",
    "circle_arc_offsets",
    "example_names",
    "build_example",
    "emit_example",
]

# oriented edges of the 3-arc circle nerve with the coefficients of the
# fundamental 1-cycle; the offsets make angle charts differ by exact thirds
_CIRCLE_EDGES = [((0, 1), 1), ((1, 2), 1), ((0, 2), -1)]
_OFFSETS = {(0, 1): Fraction(-1, 3), (1, 0): Fraction(1, 3),
            (1, 2): Fraction(-1, 3), (2, 1): Fraction(1, 3),
            (0, 2): Fraction(1, 3), (2, 0): Fraction(-1, 3)}


def circle_arc_offsets():
    return dict(_OFFSETS)


def _chart_name(digits) -> str:
    return "U" + "".join(str(d) for d in digits)


@functools.lru_cache(maxsize=None)
def build_super_cartesian_cover(m: int, n: int, name: str | None = None) -> Cover:
    """R^{m|n} as a single-chart cover.  Cached: callers share one ring."""
    gens = [f"x{i}" for i in range(1, m + 1)]
    odd = [f"th{j}" for j in range(1, n + 1)]
    syms = [f"dx{i}" for i in range(1, m + 1)]
    ring = Ring(gens, odd_generators=odd, form_symbols=syms)
    for i, g in enumerate(gens):
        ring.set_derivation(g, {syms[i]: ring.one()})
    ring.finalize()
    chart = "U"
    cover = Cover(
        ring, [chart], [(chart,)],
        partition_of_unity={chart: ring.one()},
        star_centers={chart: {g: GaussianRational(0) for g in gens}},
        name=name or f"r{m}_{n}",
    )
    return cover


def _trig_phi(ring: Ring, direction: int, j: int) -> Scalar:
    """(1 + cos(2 pi (x_direction - j/3))) / 3 expanded over (c, s, r3)."""
    c = ring.gen(f"c{direction}")
    s = ring.gen(f"s{direction}")
    third = Fraction(1, 3)
    if j == 0:
        inner = c
    else:
        half = ring.scalar(Fraction(-1, 2))
        rad = ring.gen("r3") * Fraction(1, 2)
        inner = c * half + s * rad if j == 1 else c * half - s * rad
    return (ring.one() + inner) * third


@functools.lru_cache(maxsize=None)
def build_torus_cover(dim: int, odd_dim: int = 0, name: str | None = None) -> Cover:
    """T^dim with 3 arcs per direction; optionally odd generators th1..th{odd_dim}
    glued identically (odd tangent style when odd_dim == dim).
    Cached: callers share one ring and cover instance."""
    if dim < 1:
        raise ValueError("dim >= 1")
    gens: list[str] = []
    for i in range(1, dim + 1):
        gens += [f"c{i}", f"s{i}"]
    gens.append("r3")
    angle_names = {}
    for i in range(1, dim + 1):
        for j in range(3):
            g = f"a{i}_{j}"
            angle_names[(i, j)] = g
            gens.append(g)
    odd = [f"th{j}" for j in range(1, odd_dim + 1)]
    syms = [f"e{i}" for i in range(1, dim + 1)]
    ring = Ring(gens, odd_generators=odd, form_symbols=syms)
    two_pi = ring.scalar(GR_I) * ring.tau() * (-1)  # 2*pi = -i*tau
    for i in range(1, dim + 1):
        e = syms[i - 1]
        ring.set_derivation(f"c{i}", {e: -two_pi * ring.gen(f"s{i}")})
        ring.set_derivation(f"s{i}", {e: two_pi * ring.gen(f"c{i}")})
        for j in range(3):
            ring.set_derivation(angle_names[(i, j)], {e: ring.one()})
    ring.set_derivation("r3", {})
    for i in range(1, dim + 1):
        ring.add_relation(ring.gen(f"c{i}") ** 2, ring.one() - ring.gen(f"s{i}") ** 2)
    ring.add_relation(ring.gen("r3") ** 2, ring.scalar(3))
    ring.finalize()

    digit_tuples = list(itertools.product(range(3), repeat=dim))
    charts = [_chart_name(d) for d in digit_tuples]
    chart_digits = dict(zip(charts, digit_tuples))
    for (i, j), g in angle_names.items():
        ring.set_generator_charts(
            g, [c for c in charts if chart_digits[c][i - 1] == j])

    # maximal nerve tuples: boxes with two arc values chosen per direction
    boxes = []
    for sets in itertools.product(itertools.combinations(range(3), 2), repeat=dim):
        box = sorted(_chart_name(d) for d in itertools.product(*sets))
        boxes.append(tuple(box))

    substitutions = {}
    for u, v in itertools.permutations(charts, 2):
        du, dv = chart_digits[u], chart_digits[v]
        if any(len({x, y}) > 2 for x, y in zip(du, dv)):
            continue  # cannot happen for pairs; kept for clarity
        rule = {}
        for i in range(1, dim + 1):
            ju, jv = du[i - 1], dv[i - 1]
            if ju != jv:
                rule[angle_names[(i, jv)]] = (
                    ring.gen(angle_names[(i, ju)]) + ring.scalar(_OFFSETS[(ju, jv)]))
        substitutions[(u, v)] = rule

    pou = {}
    for c in charts:
        phi = ring.one()
        for i in range(1, dim + 1):
            phi = phi * _trig_phi(ring, i, chart_digits[c][i - 1])
        pou[c] = phi

    centers = {c: {angle_names[(i, chart_digits[c][i - 1])]: GaussianRational(0)
                   for i in range(1, dim + 1)}
               for c in charts}

    cover = Cover(
        ring, charts, boxes,
        substitutions=substitutions,
        partition_of_unity=pou,
        star_centers=centers,
        fundamental_cycle=_torus_fundamental_cycle(dim, chart_digits),
        name=name or (f"t{dim}" if odd_dim == 0 else f"pit_t{dim}"),
    )
    return cover


def _torus_fundamental_cycle(dim: int, chart_digits) -> list:
    """Eilenberg-Zilber shuffle product of the circle fundamental 1-cycles:
    an exact dim-cycle on the nerve (sum of (dim+1)-tuples with signs)."""
    digits_chart = {d: c for c, d in chart_digits.items()}
    acc: dict[tuple, int] = {}
    index = {c: k for k, c in enumerate(sorted(digits_chart.values()))}
    for picks in itertools.product(_CIRCLE_EDGES, repeat=dim):
        base_coeff = 1
        for (_edge, coef) in picks:
            base_coeff *= coef
        starts = tuple(edge[0] for edge, _ in picks)
        ends = tuple(edge[1] for edge, _ in picks)
        for perm in itertools.permutations(range(dim)):
            sign = _perm_sign_list(perm)
            vertices = [starts]
            cur = list(starts)
            for axis in perm:
                cur[axis] = ends[axis]
                vertices.append(tuple(cur))
            names = [digits_chart[v] for v in vertices]
            keys = [index[c] for c in names]
            if len(set(keys)) != len(keys):
                continue
            sort_sign = _perm_sign_list(keys)
            ordered = tuple(c for _, c in sorted(zip(keys, names)))
            total = base_coeff * sign * sort_sign
            acc[ordered] = acc.get(ordered, 0) + total
            if not acc[ordered]:
                del acc[ordered]
    # orient so the coordinate volume form tau*e1^...^edim pairs to +1
    orient = -1 if (dim * (dim + 1) // 2) % 2 else 1
    return sorted((t, orient * v) for t, v in acc.items())


def _perm_sign_list(seq) -> int:
    sign = 1
    arr = list(seq)
    for i in range(len(arr)):
        for j in range(i + 1, len(arr)):
            if arr[i] > arr[j]:
                sign = -sign
    return sign


def torus_volume_form(cover: Cover, k=1) -> SuperForm:
    """k * tau * e1^...^edim: the integral volume form in tau units."""
    ring = cover.ring
    dim = len(ring.form_symbols)
    vol = SuperForm.from_scalar(ring.tau() * k)
    for i in range(1, dim + 1):
        vol = vol * SuperForm.dx(ring, f"e{i}")
    return vol


# ------------------------------------------------------------- named corpus


def _manifest(name: str, cover: Cover, forms: dict, gerbes: dict):
    from .manifest import Manifest
    return Manifest(name, cover, forms, gerbes)


@functools.lru_cache(maxsize=None)
def _example_r2_3():
    cover = build_super_cartesian_cover(2, 3, name="r2_3")
    ring = cover.ring
    x1 = SuperForm.from_scalar(ring.gen("x1"))
    soul = SuperForm(ring, {((0, 1), (), ()): ring.one()})
    forms = {
        "poly_2form": (x1 * x1).d() * SuperForm.dx(ring, "dx2"),
        "soul_2form": (soul * SuperForm.dx(ring, "dx1")).d(),
    }
    return _manifest("r2_3", cover, forms, {})


@functools.lru_cache(maxsize=None)
def _example_s1():
    cover = build_torus_cover(1, name="s1")
    ring = cover.ring
    forms = {"angle_form": SuperForm.dx(ring, "e1").scale(ring.tau())}
    from .gerbes import GerbeCocycle
    gerbes = {"trivial": GerbeCocycle.trivial(cover)}
    return _manifest("s1", cover, forms, gerbes)


@functools.lru_cache(maxsize=None)
def _example_pit_s1():
    cover = build_torus_cover(1, odd_dim=1, name="pit_s1")
    ring = cover.ring
    th1 = SuperForm.theta(ring, "th1")
    dth1 = SuperForm.dtheta(ring, "th1")
    e1 = SuperForm.dx(ring, "e1")
    flat_soul = dth1 * dth1          # exact: d(th1 * dth1)
    curved_soul = th1 * dth1 * e1    # even soul 2-form with nonzero d
    from .gerbes import GerbeCocycle
    gerbes = {
        "i_flat_soul": GerbeCocycle.trivial(cover, flat_soul),
        "i_soul": GerbeCocycle.trivial(cover, curved_soul),
    }
    forms = {"flat_soul": flat_soul, "curved_soul": curved_soul,
             "soul_3form": curved_soul.d()}
    return _manifest("pit_s1", cover, forms, gerbes)


@functools.lru_cache(maxsize=None)
def _example_t2():
    cover = build_torus_cover(2, name="t2")
    ring = cover.ring
    e2 = SuperForm.dx(ring, "e2")
    vol = torus_volume_form(cover)
    exact_trig = SuperForm.from_scalar(ring.gen("c1")).d() * e2
    forms = {
        "vol": vol,
        "half_vol": vol.scale(Fraction(1, 2)),
        "exact_trig": exact_trig,
    }
    from .gerbes import GerbeCocycle
    gerbes = {
        "i_vol": GerbeCocycle.trivial(cover, vol),
        "i_exact_trig": GerbeCocycle.trivial(cover, exact_trig),
    }
    return _manifest("t2", cover, forms, gerbes)


@functools.lru_cache(maxsize=None)
def _example_t3():
    from .gerbes import construct_from_integral_form
    cover = build_torus_cover(3, name="t3")
    vol = torus_volume_form(cover)
    forms = {"vol": vol, "vol2": torus_volume_form(cover, 2)}
    gerbes = {
        "level1": construct_from_integral_form(cover, vol),
        "level2": construct_from_integral_form(cover, torus_volume_form(cover, 2)),
    }
    return _manifest("t3", cover, forms, gerbes)


def pit_t3_beta0() -> SuperForm:
    """The fixed pure-soul curving shift used by the shipped PiT-T3 example."""
    cover = build_torus_cover(3, odd_dim=3, name="pit_t3")
    ring = cover.ring
    th = lambda j: SuperForm.theta(ring, f"th{j}")
    dth = lambda j: SuperForm.dtheta(ring, f"th{j}")
    e = lambda i: SuperForm.dx(ring, f"e{i}")
    return (th(1) * th(2) * e(1) * e(2)
            + (th(3) * e(1) * dth(3)).scale(2)
            + (th(1) * th(3) * e(2) * e(3)).scale(Fraction(1, 2)))


@functools.lru_cache(maxsize=None)
def _example_pit_t3():
    from .gerbes import GerbeCocycle, construct_from_integral_form
    cover = build_torus_cover(3, odd_dim=3, name="pit_t3")
    vol = torus_volume_form(cover)
    level1 = construct_from_integral_form(cover, vol)
    beta0 = pit_t3_beta0()
    shifted = level1.tensor(GerbeCocycle.trivial(cover, beta0))
    forms = {"vol": vol, "beta0": beta0}
    gerbes = {"level1": level1, "soul_shifted": shifted}
    return _manifest("pit_t3", cover, forms, gerbes)


_EXAMPLES = {
    "r2_3": _example_r2_3,
    "s1": _example_s1,
    "pit_s1": _example_pit_s1,
    "t2": _example_t2,
    "t3": _example_t3,
    "pit_t3": _example_pit_t3,
}


def example_names() -> list:
    """Names listed by `examples list`: manifests and their named objects."""
    out = []
    for name in sorted(_EXAMPLES):
        out.append(name)
        man = build_example(name) if name not in ("t3", "pit_t3") else None
        if man is None:
            # avoid rebuilding the heavy tori just for the listing
            listed = {
                "t3": ["t3:vol", "t3:vol2", "t3:level1", "t3:level2"],
                "pit_t3": ["pit_t3:vol", "pit_t3:beta0",
                           "pit_t3:level1", "pit_t3:soul_shifted"],
            }[name]
            out.extend(listed)
            continue
        out.extend(f"{name}:{f}" for f in sorted(man.forms))
        out.extend(f"{name}:{g}" for g in sorted(man.gerbes))
    return out


def build_example(name: str):
    if name not in _EXAMPLES:
        raise KeyError(f"unknown example {name!r}; choices: {sorted(_EXAMPLES)}")
    return _EXAMPLES[name]()


def emit_example(name: str) -> str:
    from .manifest import emit_manifest
    return emit_manifest(build_example(name))
