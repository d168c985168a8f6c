import pytest

from ratimpl.models.partition import Partition, enumerate_refinements, set_partitions

STATES = ['t1', 't2', 't3', 't4']


def test_blocks_are_normalized():
    p = Partition([['t4'], ['t2', 't1'], ['t3']], STATES)
    assert p._serialize() == [['t1', 't2'], ['t3'], ['t4']]
    assert p.block_of('t2') == ('t1', 't2')
    assert p.same_block('t1', 't2')
    assert not p.same_block('t1', 't3')


@pytest.mark.parametrize('blocks', [
    [['t1', 't2'], ['t2', 't3', 't4']],
    [['t1'], ['t2', 't3']],
    [['t1', 't2', 't3', 't4'], []],
])
def test_invalid_partitions(blocks):
    with pytest.raises(ValueError):
        Partition(blocks, STATES)


def test_refines():
    coarse = Partition([['t1', 't2', 't3'], ['t4']], STATES)
    fine = Partition([['t1'], ['t2', 't3'], ['t4']], STATES)
    assert fine.refines(coarse)
    assert not coarse.refines(fine)
    assert not Partition([['t1', 't4'], ['t2', 't3']], STATES).refines(coarse)


@pytest.mark.parametrize('n, k, count', [(3, 1, 1), (3, 2, 3), (3, 3, 1), (4, 2, 7), (5, 3, 25)])
def test_stirling_counts(n, k, count):
    items = [f's{j}' for j in range(n)]
    found = list(set_partitions(items, k))
    assert len(found) == count
    assert len({frozenset(frozenset(block) for block in p) for p in found}) == count


def test_refinements_of_three_plus_one():
    coarse = Partition([['t1', 't2', 't3'], ['t4']], STATES)
    found = list(enumerate_refinements(coarse))
    assert len(found) == 5
    assert found[0] == coarse
    assert all(p.refines(coarse) for p in found)
    assert len(set(found)) == 5


def test_refinements_of_singletons():
    singletons = Partition.singletons(STATES)
    assert list(enumerate_refinements(singletons)) == [singletons]


def test_refinements_of_two_pairs():
    coarse = Partition([['t1', 't2'], ['t3', 't4']], STATES)
    found = list(enumerate_refinements(coarse))
    assert len(found) == 4
    # fewest blocks first
    assert [len(p) for p in found] == [2, 3, 3, 4]
