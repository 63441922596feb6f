import itertools

import pytest
from hypothesis import given, strategies as st

from atomshuttle.architectures import (ArchitectureSpec, Variant, decompose_cz,
                                       gate_counts, load_arch_config,
                                       manhattan_path,
                                       neighbor_chain_decompose, one_way_case)
from atomshuttle.ir import GateKind

EXPECTED_COUNTS = {
    (Variant.TWO_WAY_BELT, None): (2, 6, 0),
    (Variant.ONE_WAY_BELT, 1): (2, 3, 1),
    (Variant.ONE_WAY_BELT, 2): (4, 3, 2),
    (Variant.THROW_CATCH_THROW, None): (2, 3, 0),
    (Variant.SHUTTLE_AND_ROUTE, None): (2, 3, 0),
    (Variant.THROW_AND_MEASURE, None): (2, 2, 1),
}


def all_pairs(L):
    cells = list(itertools.product(range(L), range(L)))
    return itertools.combinations(cells, 2)


@pytest.mark.parametrize("variant", list(Variant))
@pytest.mark.parametrize("L", [2, 3, 4])
def test_counts_match_table_for_every_pair(variant, L):
    arch = ArchitectureSpec(variant, L)
    for a, b in all_pairs(L):
        d = decompose_cz(arch, a, b)
        assert d.counts.as_tuple() == EXPECTED_COUNTS[(variant, d.case)]


def test_gate_counts_lookup():
    for (variant, case), expected in EXPECTED_COUNTS.items():
        assert gate_counts(variant, case).as_tuple() == expected
    with pytest.raises(ValueError):
        gate_counts(Variant.ONE_WAY_BELT)  # case is mandatory here


coords = st.tuples(st.integers(0, 7), st.integers(0, 7))


@given(coords, coords)
def test_one_way_case_is_symmetric(a, b):
    assert one_way_case(a, b) == one_way_case(b, a)


def test_one_way_case_examples():
    assert one_way_case((0, 0), (3, 3)) == 1
    assert one_way_case((0, 0), (0, 5)) == 1   # same row still dominates
    assert one_way_case((0, 3), (3, 0)) == 2
    assert one_way_case((2, 1), (1, 2)) == 2


def test_decompose_rejects_bad_pairs():
    arch = ArchitectureSpec(Variant.TWO_WAY_BELT, 4)
    with pytest.raises(ValueError):
        decompose_cz(arch, (0, 0), (0, 0))
    with pytest.raises(ValueError):
        decompose_cz(arch, (0, 0), (4, 0))


def test_serial_and_bit_allocation_is_disjoint():
    arch = ArchitectureSpec(Variant.ONE_WAY_BELT, 8)
    d1 = decompose_cz(arch, (0, 0), (3, 3), serial_start=0, bit_start=0)
    d2 = decompose_cz(arch, (0, 3), (3, 0), serial_start=2, bit_start=1)
    assert set(d1.messengers).isdisjoint(d2.messengers)
    bits1 = {g.bit for g in d1.gates if g.bit is not None}
    bits2 = {g.bit for g in d2.gates if g.bit is not None}
    assert bits1.isdisjoint(bits2)


def test_shuttle_and_route_has_five_routing_legs():
    arch = ArchitectureSpec(Variant.SHUTTLE_AND_ROUTE, 8)
    d = decompose_cz(arch, (1, 1), (6, 5))
    assert sum(1 for leg in d.transport_plan if leg.kind == "routing") == 5


def test_two_way_uses_four_messengers_on_four_belts():
    arch = ArchitectureSpec(Variant.TWO_WAY_BELT, 8)
    d = decompose_cz(arch, (0, 0), (7, 7))
    assert len(d.messengers) == 4
    assert sorted(leg.belt for leg in d.transport_plan) == [0, 1, 2, 3]


@given(coords, coords)
def test_manhattan_path_is_a_lattice_path(a, b):
    path = manhattan_path(a, b)
    assert path[0] == a and path[-1] == b
    for p, q in zip(path, path[1:]):
        assert abs(p[0] - q[0]) + abs(p[1] - q[1]) == 1
    d = abs(a[0] - b[0]) + abs(a[1] - b[1])
    assert len(path) == d + 1


@given(coords, coords)
def test_chain_two_qubit_count_is_linear_in_distance(a, b):
    if a == b:
        return
    d = abs(a[0] - b[0]) + abs(a[1] - b[1])
    dec = neighbor_chain_decompose(8, a, b)
    assert dec.counts.n2 == 2 * (d - 1) + 1
    assert dec.counts.n2_cz == 1
    assert dec.variant is None


def test_chain_gates_are_swap_out_cz_swap_back():
    dec = neighbor_chain_decompose(4, (0, 0), (0, 3))
    kinds = [g.gate for g in dec.gates]
    assert kinds == [GateKind.SWAP, GateKind.SWAP, GateKind.CZ,
                     GateKind.SWAP, GateKind.SWAP]


def test_spec_validation():
    with pytest.raises(ValueError):
        ArchitectureSpec(Variant.TWO_WAY_BELT, 1)
    with pytest.raises(ValueError):
        ArchitectureSpec(Variant.TWO_WAY_BELT, 4, R=4e-6)       # R > a
    with pytest.raises(ValueError):
        ArchitectureSpec(Variant.TWO_WAY_BELT, 4, v=4.0)        # v > a/t2
    arch = ArchitectureSpec(Variant.TWO_WAY_BELT, 4)
    assert arch.in_range((3, 3)) and not arch.in_range((4, 0))


def test_load_arch_config(tmp_path):
    p = tmp_path / "a.arch"
    p.write_text("variant = throw-and-measure\nL = 16\nv_mps = 2.5  # fast\n")
    arch = load_arch_config(p)
    assert arch.variant is Variant.THROW_AND_MEASURE
    assert arch.L == 16 and arch.v == 2.5
    p.write_text("variant = throw-and-measure\nL = 16\nbogus = 1\n")
    with pytest.raises(ValueError):
        load_arch_config(p)
    p.write_text("L = 16\n")
    with pytest.raises(ValueError):
        load_arch_config(p)
