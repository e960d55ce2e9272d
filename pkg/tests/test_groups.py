import itertools
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from addcomb.groups import (CardinalityError, DenseFn, GroupElem, GroupMismatchError,
                            GroupSpec, PartialMap, Params, enumerate_group, group_add,
                            group_neg, indicator, indicator_mean, set_from_json, set_to_json)

small_groups = st.one_of(
    st.builds(GroupSpec.vector, st.sampled_from([2, 3, 5]), st.integers(0, 3)),
    st.builds(GroupSpec.cyclic, st.integers(1, 40)),
    st.builds(lambda a, b: GroupSpec.product([GroupSpec.cyclic(a), GroupSpec.vector(2, b)]),
              st.integers(1, 6), st.integers(0, 2)),
)


def test_enumerate_f2_squared_order():
    G = GroupSpec.vector(2, 2)
    assert [e.digits for e in enumerate_group(G)] == [(0, 0), (1, 0), (0, 1), (1, 1)]


def test_enumerate_cyclic_and_product():
    assert [e.index for e in enumerate_group(GroupSpec.cyclic(3))] == [0, 1, 2]
    P = GroupSpec.product([GroupSpec.vector(2, 1), GroupSpec.cyclic(2)])
    assert [e.digits for e in enumerate_group(P)] == [(0, 0), (1, 0), (0, 1), (1, 1)]


def test_add_examples():
    G = GroupSpec.vector(2, 3)
    a = GroupElem.from_digits(G, (1, 0, 1))
    b = GroupElem.from_digits(G, (0, 1, 1))
    assert group_add(a, b).digits == (1, 1, 0)
    Z5 = GroupSpec.cyclic(5)
    assert group_add(GroupElem(Z5, 3), GroupElem(Z5, 4)).index == 2
    assert all(group_neg(e) == e for e in enumerate_group(GroupSpec.vector(2, 4)))


def test_mismatched_groups_rejected():
    with pytest.raises(GroupMismatchError):
        group_add(GroupElem(GroupSpec.cyclic(4), 1), GroupElem(GroupSpec.vector(2, 2), 1))


@given(small_groups)
def test_encoding_round_trip(G):
    idx = np.arange(G.cardinality)
    assert np.array_equal(G.from_digits(G.digits(idx)), idx)


@given(small_groups)
def test_group_axioms_exhaustive(G):
    idx = np.arange(G.cardinality)
    T = G.add(idx[:, None], idx[None, :])
    assert np.array_equal(T, T.T)
    assert np.array_equal(G.add(idx, 0), idx)
    assert np.all(G.add(idx, G.neg(idx)) == 0)
    assert np.array_equal(G.neg(G.neg(idx)), idx)
    if G.cardinality <= 64:
        assoc = G.add(T[:, :, None], idx[None, None, :])
        assoc2 = G.add(idx[:, None, None], T[None, :, :])
        assert np.array_equal(assoc, assoc2)


def test_add_matches_digitwise_definition():
    G = GroupSpec.product([GroupSpec.cyclic(4), GroupSpec.vector(3, 2)])
    for a, b in itertools.product(range(G.cardinality), repeat=2):
        da, db = G.digits(a), G.digits(b)
        want = G.from_digits((da + db) % np.array(G.radices))
        assert G.add(a, b) == want


def test_indicator_examples():
    G = GroupSpec.vector(2, 3)
    assert np.all(indicator([], G).values == 0)
    assert np.all(indicator(range(8), G).values == 1)
    assert indicator([0, 1, 2, 3], G).mean() == 0.5
    assert indicator_mean([0, 1, 2, 3], G) == Fraction(1, 2)
    with pytest.raises(ValueError):
        indicator([8], G)


def test_dense_cap():
    with pytest.raises(CardinalityError):
        GroupSpec.vector(2, 25).check_dense()


def test_bounded_flag_checked():
    with pytest.raises(ValueError):
        DenseFn(GroupSpec.cyclic(2), [2.0, 0.0], bounded=True)


def test_json_round_trips():
    G = GroupSpec.product([GroupSpec.cyclic(3), GroupSpec.vector(2, 2)])
    assert GroupSpec.from_json(G.to_json()) == G
    f = DenseFn(G, np.arange(12) * (1 + 1j))
    assert np.array_equal(DenseFn.from_json(f.to_json()).values, f.values)
    phi = PartialMap(G, GroupSpec.cyclic(5), {1: 2, 7: 4})
    back = PartialMap.from_json(phi.to_json())
    assert back.table == phi.table and back.domain == G
    assert set_from_json(set_to_json([3, 1], G)) == (G, [1, 3])


def test_partial_map_inverse_requires_injective():
    G = GroupSpec.cyclic(4)
    with pytest.raises(ValueError):
        PartialMap(G, G, {0: 1, 1: 1}).inverse()
    assert PartialMap(G, G, {0: 1, 1: 2}).inverse().table == {1: 0, 2: 1}


def test_translate_and_product():
    G = GroupSpec.cyclic(5)
    f = DenseFn(G, np.arange(5))
    assert np.array_equal(f.translate(2).values.real, [2, 3, 4, 0, 1])
    assert np.array_equal((f * f).values.real, np.arange(5) ** 2)


def test_params_validation():
    Params()
    with pytest.raises(ValueError):
        Params(epsilon=0.5)
    with pytest.raises(ValueError):
        Params(K=0.5)
