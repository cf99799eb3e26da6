import pytest
from hypothesis import given, strategies as st

from spansphere.constructions import s_star
from spansphere.errors import (InvalidFacetCount, RidgeNotOnBoundary, RidgesNotAdjacent,
                               WouldDegenerate)
from spansphere.lc import (Attach, Identify, LcState, LcTrace, certified_sphere, certify,
                           dumps_trace, lc_apply, lc_trace_for_cone_sphere, loads_trace,
                           sample_lc_2sphere)
from spansphere.oracle import canonical_code, enumerate_2spheres
from spansphere.simplex import Outcome, tetra_boundary, verify


def test_attach_grows_the_boundary():
    s = LcState((1, 2, 3))
    t = lc_apply(s, Attach((2, 3), 4))
    assert t.facets == {(1, 2, 3), (2, 3, 4)}
    assert len(t.boundary) == 4
    assert s.facets == {(1, 2, 3)}


def test_attach_needs_fresh_vertex_and_boundary_ridge():
    s = LcState((1, 2, 3))
    with pytest.raises(WouldDegenerate):
        s.attach((2, 3), 1)
    s.attach((2, 3), 4)
    with pytest.raises(RidgeNotOnBoundary):
        s.attach((2, 3), 5)


def test_identify_that_duplicates_a_facet_is_refused():
    s = LcState((1, 2, 3))
    s.attach((2, 3), 4)
    before = set(s.facets)
    with pytest.raises(WouldDegenerate):
        s.identify((1, 2), (2, 4))
    assert s.facets == before


def test_identify_needs_adjacent_ridges():
    s = LcState((1, 2, 3))
    s.attach((2, 3), 4)
    with pytest.raises(RidgesNotAdjacent):
        s.identify((1, 2), (3, 4))


def _hexagon():
    # central triangle with one triangle on each side: a disc with 6 boundary edges
    s = LcState((1, 2, 3))
    s.attach((1, 2), 4)
    s.attach((2, 3), 5)
    s.attach((1, 3), 6)
    return s


def _closings(state, depth=0):
    """All closed complexes reachable by identifications."""
    if state.is_closed():
        yield state
        return
    bd = sorted(state.boundary)
    for i, a in enumerate(bd):
        for b in bd[i + 1:]:
            if len(set(a) & set(b)) != 1:
                continue
            t = state.copy()
            try:
                t.identify(a, b)
            except WouldDegenerate:
                continue
            yield from _closings(t, depth + 1)


def test_hexagon_closes_to_the_tetrahedron():
    s = _hexagon()
    assert len(s.boundary) == 6
    found = list(_closings(s))
    assert found
    tetra = tetra_boundary().facet_set
    for t in found:
        assert t.complex().compact().facet_set == tetra
    # two explicit identifications; the third pair of edges is glued by the merge
    t = s.copy()
    assert t.identify((2, 4), (2, 5)) == 1
    assert t.identify((3, 4), (3, 6)) == 2
    assert t.is_closed() and t.implicit == 1


def test_sampler_small_cases():
    K, trace = sample_lc_2sphere(4, 0)
    assert K.facet_set == tetra_boundary().facet_set
    with pytest.raises(InvalidFacetCount):
        sample_lc_2sphere(5, 0)


def test_sampler_m8_hits_both_classes():
    classes = {canonical_code(c.representative.facets)[0] for c in enumerate_2spheres(6).classes}
    seen = set()
    for seed in range(10_000):
        K, _ = sample_lc_2sphere(8, seed)
        assert K.n == 6 and verify(K).ok
        seen.add(canonical_code(K.facets)[0])
    assert seen == classes


@given(st.integers(2, 150).map(lambda k: 2 * k), st.integers(0, 2**32))
def test_sampled_spheres_are_certified(m, seed):
    K, trace = sample_lc_2sphere(m, seed)
    v = verify(K)
    assert v.ok and v.spanning
    assert K.n == m // 2 + 2 and K.m == m
    assert certified_sphere(trace).facet_set == K.facet_set
    assert verify(K, trace).outcome is Outcome.CERTIFIED_LC
    assert loads_trace(dumps_trace(trace)) == LcTrace(trace.d, trace.init, trace.moves)


def test_cone_traces():
    t = lc_trace_for_cone_sphere((3, 4, 5), 2)
    assert certified_sphere(t).facet_set == s_star(5, 2).complex.facet_set
    assert dumps_trace(t) == "lc d=3\ninit 1 2 3 4\nattach 1 2 4|5\nattach 1 2 5|6\nidentify 1 2 6|1 2 3\n"
    t3 = lc_trace_for_cone_sphere((4, 5, 6, 7), 3)
    S = s_star(7, 3).complex
    assert certified_sphere(t3).facet_set == S.facet_set
    assert verify(S, t3).outcome is Outcome.CERTIFIED_LC


def test_triangle_fan_trace_shape():
    t = lc_trace_for_cone_sphere((3, 4, 5), 2)
    kinds = [type(m) for m in t.moves]
    assert kinds == [Attach, Attach, Identify]


@pytest.mark.parametrize("d", [2, 3, 4, 5])
def test_cone_traces_certify_s_star(d):
    for n in range(d + 3, d + 12):
        S = s_star(n, d)
        v = verify(S.complex, lc_trace_for_cone_sphere(S.cycle, d))
        assert v.outcome is Outcome.CERTIFIED_LC and v.spanning


def test_bad_certificates_are_rejected():
    S = s_star(7, 2).complex
    wrong = lc_trace_for_cone_sphere((3, 4, 5, 6), 2)
    assert not verify(S, wrong).ok
    broken = LcTrace(2, (1, 2, 3), (Attach((2, 3), 4), Identify((1, 2), (2, 4))))
    assert certify(broken).outcome is Outcome.NOT_SPHERE


def test_trace_parse_errors():
    with pytest.raises(ValueError):
        loads_trace("init 1 2 3\n")
    with pytest.raises(ValueError):
        loads_trace("lc d=2\ninit 1 2 3\nattach 2 3 4\n")
