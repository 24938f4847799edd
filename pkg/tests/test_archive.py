import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from msrs_deploy.optimizer import Archive, crowding_absolute, crowding_vectors

POS = np.zeros(3)


def _archive(points, **kw) -> Archive:
    kw.setdefault("crowding_space", "linear")
    return Archive(**kw).update((POS, p) for p in points)


def _objs(arch):
    return [tuple(e.objectives) for e in arch]


def test_dominated_insert_is_ignored():
    arch = _archive([(0.5, 10.0), (0.8, 5.0)])
    before = _objs(arch)
    arch.update([(POS, (0.4, 9.0))])
    assert _objs(arch) == before


def test_dominating_insert_removes_members():
    arch = _archive([(0.5, 10.0), (0.6, 9.0), (0.9, 1.0)])
    arch.update([(POS, (0.7, 11.0))])
    assert _objs(arch) == [(0.7, 11.0), (0.9, 1.0)]


def test_duplicates_are_dropped():
    arch = _archive([(0.5, 10.0), (0.5, 10.0), (0.5, 10.0 + 1e-14)])
    assert len(arch) == 1


def test_sorted_by_coverage():
    rng = np.random.default_rng(2)
    arch = _archive(rng.uniform(size=(300, 2)))
    cr = [e.objectives.coverage_ratio for e in arch]
    assert cr == sorted(cr)


def test_crowding_three_collinear():
    g = np.array([[0.0, 3.0], [1.0, 2.0], [2.0, 1.0]])
    xi = crowding_absolute(g)
    assert xi[1] == pytest.approx(2.0 + 2.0)
    assert xi[0] == xi[2] == xi[1]


def test_crowding_degenerate_sizes():
    assert crowding_absolute(np.array([[0.0, 1.0], [1.0, 0.0]])).tolist() == [0.0, 0.0]
    h, xi = crowding_vectors(np.array([[0.0, 1.0]]))
    assert xi.tolist() == [0.0]


def test_cdv_example_row():
    # H = (0.71, 39) with ranges (1, 100) gives 0.71 + 0.39
    g = np.array([[0.0, 100.0], [0.2, 59.0], [0.6, 40.0], [0.91, 20.0], [1.0, 0.0]])
    h, xi = crowding_vectors(g, [1.0, 100.0])
    assert h[2] == pytest.approx([0.71, 39.0])
    assert xi[2] == pytest.approx(1.10)


def test_zero_range_contributes_nothing():
    g = np.array([[0.0, 5.0], [0.5, 5.0], [1.0, 5.0]])
    _, xi = crowding_vectors(g)
    assert xi.tolist() == pytest.approx([1.0, 1.0, 1.0])


def test_crowding_in_db_space():
    arch = Archive().update([(POS, (0.1, 100.0)), (POS, (0.5, 10.0)), (POS, (0.9, 1.0))])
    assert arch.crowding_objectives()[:, 1].tolist() == pytest.approx([20.0, 10.0, 0.0])
    assert arch[1].cdv.tolist() == pytest.approx([0.8, 20.0])


def test_bounded_archive_prunes_most_crowded_interior():
    pts = [(0.0, 10.0), (0.1, 9.9), (0.5, 5.0), (0.9, 1.0), (1.0, 0.0)]
    arch = _archive(pts, capacity=4)
    assert len(arch) == 4
    assert (0.1, 9.9) not in _objs(arch)
    assert _objs(arch)[0] == (0.0, 10.0) and _objs(arch)[-1] == (1.0, 0.0)


points = st.lists(st.tuples(st.integers(0, 20), st.integers(0, 20)), min_size=1, max_size=60)


@settings(max_examples=80, deadline=None)
@given(points, st.randoms(use_true_random=False))
def test_archive_equals_bruteforce_any_order(pts, rnd):
    pts = [(float(a), float(b)) for a, b in pts]
    expected = oracles.nondominated(pts)
    shuffled = pts[:]
    rnd.shuffle(shuffled)
    arch = Archive(crowding_space="linear")
    # feed in uneven batches to exercise incremental updates
    i = 0
    while i < len(shuffled):
        k = rnd.randint(1, 5)
        arch.update((POS, p) for p in shuffled[i : i + k])
        i += k
    assert sorted(_objs(arch)) == expected


@settings(max_examples=60, deadline=None)
@given(st.lists(st.tuples(st.integers(0, 50), st.integers(0, 50)), min_size=3, max_size=30))
def test_boundary_rule(pts):
    arch = _archive([(float(a), float(b)) for a, b in pts])
    if len(arch) < 3:
        return
    xi = [e.xi_cd for e in arch]
    assert xi[0] == xi[-1] == max(xi[1:-1])
