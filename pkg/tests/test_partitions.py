from fractions import Fraction

import numpy as np
import pytest

from abctorus.errors import ParamOutOfRange
from abctorus.exact.partitions import PartitionSpec
from abctorus.exact.points import TorusPoint

F = Fraction


def P(*coords):
    return TorusPoint(tuple(F(c) if not isinstance(c, Fraction) else c for c in coords))


def test_atom_counts():
    assert PartitionSpec.blocks(5, 2).atom_count == 5
    assert PartitionSpec.circle(7).atom_count == 7
    assert PartitionSpec.grid(3, 2, 2).atom_count == 18  # q * l^d
    assert PartitionSpec.grid(2, 1, 3).atom_count == 8
    assert PartitionSpec.grid_stage(1, 3, 2, 2).atom_count == 18
    assert PartitionSpec.tower((0, 1), 2, 3, 2).atom_count == 3
    assert PartitionSpec.strips(4, 2, 3).atom_count == 24  # kq * l
    assert PartitionSpec.grid_min(3, 2, 4).atom_count == 54 * 12  # l^3 q * l r


def test_blocks_index_uses_first_coordinate():
    part = PartitionSpec.blocks(4, 2)
    assert part.atom_index(P(F(1, 8), F(9, 10))) == 0
    assert part.atom_index(P(F(3, 4), F(0))) == 3


def test_grid_index_layout():
    # index = i1 * l^(d-1) + ... + i_d with x1 read at pitch 1/(l q)
    part = PartitionSpec.grid(2, 3, 2)
    assert part.atom_index(P(F(0), F(0))) == 0
    assert part.atom_index(P(F(1, 6), F(0))) == 2
    assert part.atom_index(P(F(1, 6), F(1, 2))) == 3
    assert part.atom_index(P(F(5, 6), F(1, 2))) == 11


def test_grid_stage_pitches():
    # stage j: x1 at pitch 1/(l^j q), next d-j coordinates at 1/l,
    # last j-1 coordinates unconstrained
    part = PartitionSpec.grid_stage(2, 2, 3, 3)
    # dims: x1 -> 12 cells, x2 -> 2 cells, x3 free
    assert part.atom_count == 24
    a = part.atom_index(P(F(1, 6), F(1, 2), F(9, 10)))
    b = part.atom_index(P(F(1, 6), F(1, 2), F(1, 10)))
    assert a == b  # last coordinate free at stage 2 of d = 3
    # stage 1 pins every coordinate
    full = PartitionSpec.grid_stage(1, 2, 3, 3)
    assert full.atom_count == 24
    c = full.atom_index(P(F(1, 6), F(1, 2), F(9, 10)))
    d = full.atom_index(P(F(1, 6), F(1, 2), F(1, 10)))
    assert c != d


def test_tower_membership():
    # columns c = a(i) k + i + m k (mod kq) belong to atom m
    a = (1, 0)
    part = PartitionSpec.tower(a, 2, 3, 2)
    # class 0: a(0) = 1 -> column 1*2+0 = 2 is in atom 0
    assert part.atom_index(P(F(2, 6) + F(1, 12), F(1, 3))) == 0
    # its next block neighbour c = 4 is atom 1
    assert part.atom_index(P(F(4, 6), F(0))) == 1
    # class 1: a(1) = 0 -> column 1 in atom 0
    assert part.atom_index(P(F(1, 6), F(0))) == 0
    assert part.tower_columns(0) == (1, 2)
    assert part.tower_columns(1) == (3, 4)
    assert part.tower_columns(2) == (0, 5)


def test_strips_layout():
    part = PartitionSpec.strips(4, 1, 2)
    assert part.atom_index(P(F(0), F(0))) == 0
    assert part.atom_index(P(F(0), F(1, 2))) == 1
    assert part.atom_index(P(F(3, 4), F(1, 2))) == 7


def test_grid_min_layout():
    # columns at pitch 1/(l^3 q), rows at pitch 1/(l r), index col*(l r) + row
    part = PartitionSpec.grid_min(2, 1, 2)
    assert part.atom_index(P(F(0), F(0))) == 0
    assert part.atom_index(P(F(1, 8), F(3, 4))) == 7
    assert part.atom_index(P(F(7, 8), F(1, 4))) == 29


def test_atom_box_roundtrip():
    for part in [
        PartitionSpec.blocks(5, 2),
        PartitionSpec.grid(2, 3, 2),
        PartitionSpec.strips(4, 2, 3),
        PartitionSpec.grid_min(2, 1, 2),
    ]:
        for idx in range(part.atom_count):
            box = part.atom_box(idx)
            centre = []
            for rng in box:
                if rng is None:
                    centre.append(F(1, 2))
                else:
                    lo, hi = rng
                    centre.append((lo + hi) / 2)
            assert part.atom_index(TorusPoint(tuple(centre))) == idx


def test_tower_has_no_boxes():
    part = PartitionSpec.tower((0, 1), 2, 2, 2)
    with pytest.raises(ParamOutOfRange):
        part.atom_box(0)


def test_grid_index_matches_vectorised_indexer():
    for part in [
        PartitionSpec.blocks(3, 2),
        PartitionSpec.grid(2, 2, 2),
        PartitionSpec.tower((1, 0), 2, 2, 2),
        PartitionSpec.strips(4, 1, 2),
    ]:
        M = part.boundary_denominator_lcm() * 4
        rng = np.random.default_rng(11)
        pts = rng.integers(0, M, size=(part.dim, 300), dtype=np.int64)
        fast = part.atom_index_grid(pts, M)
        for col in range(0, 300, 17):
            x = TorusPoint(tuple(F(int(pts[c, col]), M) for c in range(part.dim)))
            assert part.atom_index(x) == fast[col]


def test_boundary_denominator_lcm():
    assert PartitionSpec.blocks(6, 2).boundary_denominator_lcm() % 6 == 0
    assert PartitionSpec.grid(2, 3, 2).boundary_denominator_lcm() % 6 == 0
    assert PartitionSpec.strips(4, 3, 5).boundary_denominator_lcm() % 60 == 0
