from dataclasses import astuple, replace
from fractions import Fraction
from types import SimpleNamespace

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pragma_optimizer import errors
from pragma_optimizer.selector import (
    OP_CLASSES,
    OpCounts,
    estimate_cost,
    load_profile,
    parse_profile,
    select,
    shipped_profiles,
)

# The format example: every class 0.5 except perm and store at 1.0.
EXAMPLE = parse_profile("""
name=example
vector_bits=256
has_fma=true
recip.fma=0.5
recip.mul=0.5
recip.add=0.5
recip.perm=1.0
recip.load=0.5
recip.store=1.0
""")


def cand(label, **ops):
    return SimpleNamespace(label=label, op_counts=OpCounts(**ops))


def test_zero_counts_cost_nothing():
    assert estimate_cost(OpCounts(), EXAMPLE).cycles == 0


def test_fma_beats_unfused_on_example_profile():
    assert estimate_cost(OpCounts(mul=60, add=60), EXAMPLE).cycles == 60
    assert estimate_cost(OpCounts(fma=60), EXAMPLE).cycles == 30
    idx, _ = select([cand("unfused", mul=60, add=60), cand("fused", fma=60)], EXAMPLE)
    assert idx == 1


def test_permutation_pressure_on_example_profile():
    assert estimate_cost(OpCounts(perm=100), EXAMPLE).cycles == 100
    assert estimate_cost(OpCounts(fma=100), EXAMPLE).cycles == 50
    idx, _ = select([cand("shuffly", perm=100), cand("clean", fma=100)], EXAMPLE)
    assert idx == 1


def test_haswell_values():
    hsw = load_profile("haswell")
    assert hsw.vector_bits == 256 and hsw.has_fma
    # mul 60 * 0.5 + add 60 * 1
    assert estimate_cost(OpCounts(mul=60, add=60), hsw).cycles == 90
    assert estimate_cost(OpCounts(fma=60), hsw).cycles == 30
    assert estimate_cost(OpCounts(perm=100), hsw).cycles == 100
    assert hsw.recip_throughput["perm"] == 1


def test_nofma_profile_rejects_fma():
    nofma = load_profile("generic-nofma")
    with pytest.raises(errors.InadmissibleCandidate):
        estimate_cost(OpCounts(fma=1), nofma)
    idx, costs = select([cand("fused", fma=60), cand("unfused", mul=60, add=60)], nofma)
    assert idx == 1 and costs[0] is None
    with pytest.raises(errors.NoAdmissibleCandidate):
        select([cand("fused", fma=1)], nofma)


def test_fused_wins_wherever_fma_is_cheap_enough():
    checked = 0
    for name in shipped_profiles():
        p = load_profile(name)
        rt = p.recip_throughput
        if not p.has_fma or rt["fma"] > rt["mul"] + rt["add"]:
            continue
        idx, _ = select([cand("unfused", mul=60, add=60), cand("fused", fma=60)], p)
        assert idx == 1, name
        checked += 1
    assert checked >= 1


def test_shipped_profiles():
    assert {"haswell", "generic-nofma"} <= set(shipped_profiles())


def test_single_and_tied():
    assert select([cand("a", add=3)], EXAMPLE)[0] == 0
    assert select([cand("a", add=3), cand("b", add=3)], EXAMPLE)[0] == 0


def test_profile_sensitivity():
    pair = [cand("adds", add=10), cand("muls", mul=10)]
    assert select(pair, load_profile("haswell"))[0] == 1
    assert select(pair, load_profile("generic-nofma"))[0] == 0


def test_exact_rational_comparison():
    p = replace(EXAMPLE, recip_throughput={**EXAMPLE.recip_throughput,
                                           "add": Fraction("0.1"), "mul": Fraction("0.3")})
    # in binary floating point 3 * 0.1 > 0.3; exactly they are equal
    assert 3 * 0.1 != 0.3
    assert select([cand("adds", add=3), cand("mul", mul=1)], p)[0] == 0
    third = replace(p, recip_throughput={**p.recip_throughput, "add": Fraction(1, 3)})
    assert estimate_cost(OpCounts(add=3), third).cycles == 1


def test_opcounts_validation():
    with pytest.raises(ValueError):
        OpCounts(fma=-1)
    assert OpCounts(1, 2, 3, 4, 5, 6).flops() == 2 * 1 + 2 + 3


PROFILE_BODY = "name=x\nvector_bits=128\nhas_fma=false\n" + "".join(f"recip.{c}=1\n" for c in OP_CLASSES)


@pytest.mark.parametrize("text", [
    PROFILE_BODY + "color=blue\n",
    PROFILE_BODY.replace("recip.perm=1\n", ""),
    PROFILE_BODY.replace("recip.perm=1", "recip.perm=0"),
    PROFILE_BODY.replace("recip.perm=1", "recip.perm=-2"),
    PROFILE_BODY.replace("recip.perm=1", "recip.perm=fast"),
    PROFILE_BODY.replace("has_fma=false", "has_fma=maybe"),
    PROFILE_BODY.replace("vector_bits=128", "vector_bits=wide"),
    PROFILE_BODY + "name=y\n",
    PROFILE_BODY + "garbage\n",
])
def test_bad_profiles(text):
    with pytest.raises(errors.ProfileError):
        parse_profile(text)


def test_profile_comments_and_path(tmp_path):
    f = tmp_path / "mine.profile"
    f.write_text("# header\n" + PROFILE_BODY.replace("recip.add=1", "recip.add=3/2  # note"))
    p = load_profile(f)
    assert p.name == "x" and p.recip_throughput["add"] == Fraction(3, 2)
    with pytest.raises(errors.ProfileError):
        load_profile("no-such-arch")


# -- properties ---------------------------------------------------------------

counts = st.builds(OpCounts, *[st.integers(0, 500)] * 6)
profiles = st.sampled_from([load_profile(n) for n in shipped_profiles()] + [EXAMPLE])


def _admissible(p, c):
    return replace(c, fma=0) if not p.has_fma else c


@settings(max_examples=500, deadline=None)
@given(counts, counts, profiles, st.sampled_from(OP_CLASSES), st.integers(1, 100))
def test_monotonicity(a, b, p, op, bump):
    a, b = _admissible(p, a), _admissible(p, b)
    if op == "fma" and not p.has_fma:
        return
    before = select([cand("a", **a.as_dict()), cand("b", **b.as_dict())], p)[0]
    worse_a = replace(a, **{op: getattr(a, op) + bump})
    after = select([cand("a", **worse_a.as_dict()), cand("b", **b.as_dict())], p)[0]
    # making a more expensive never turns it from loser into winner
    assert not (before == 1 and after == 0)


@settings(max_examples=300, deadline=None)
@given(st.lists(counts, min_size=1, max_size=5), profiles, st.integers(1, 50))
def test_scale_invariance(cs, p, k):
    cs = [_admissible(p, c) for c in cs]
    base = select([cand(str(i), **c.as_dict()) for i, c in enumerate(cs)], p)[0]
    scaled = select([cand(str(i), **c.scaled(k).as_dict()) for i, c in enumerate(cs)], p)[0]
    assert base == scaled


@settings(max_examples=300, deadline=None)
@given(counts, profiles)
def test_cost_is_linear_sum(c, p):
    c = _admissible(p, c)
    expected = sum(Fraction(n) * p.recip_throughput[k] for k, n in zip(OP_CLASSES, astuple(c)))
    assert estimate_cost(c, p).cycles == expected
