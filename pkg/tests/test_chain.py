"""Block bookkeeping, fork accounting, and generation draws."""

import random

import pytest

from pnsim.chain import (BlockRegistry, ChainView, WeightedSampler, fork_stats,
                         main_chain_ids, make_genesis, next_generation,
                         pareto_powers, uniform_powers, write_block_log)


@pytest.fixture
def registry():
    return BlockRegistry(make_genesis(size=1000))


def test_new_block_links_and_numbers(registry):
    genesis = registry[0]
    b1 = registry.new_block(genesis, miner=3, created_at=10, size=1000)
    b2 = registry.new_block(b1, miner=4, created_at=25, size=1000)
    assert (b1.id, b1.parent, b1.height) == (1, 0, 1)
    assert (b2.id, b2.parent, b2.height) == (2, 1, 2)


def test_child_must_be_strictly_younger(registry):
    genesis = registry[0]
    b1 = registry.new_block(genesis, miner=0, created_at=10, size=1)
    with pytest.raises(ValueError):
        registry.new_block(b1, miner=0, created_at=10, size=1)


def test_generated_excludes_genesis(registry):
    registry.new_block(registry[0], miner=0, created_at=5, size=1)
    assert [b.id for b in registry.generated()] == [1]


def test_chain_view_tracks_longest_chain(registry):
    genesis = registry[0]
    view = ChainView(genesis)
    b1 = registry.new_block(genesis, miner=0, created_at=10, size=1)
    assert view.accept(b1, arrived_at=12) is True
    assert view.tip_id == b1.id
    b2 = registry.new_block(b1, miner=1, created_at=20, size=1)
    assert view.accept(b2, arrived_at=21) is True
    assert view.tip_height == 2


def test_chain_view_keeps_first_seen_on_height_tie(registry):
    genesis = registry[0]
    view = ChainView(genesis)
    left = registry.new_block(genesis, miner=0, created_at=10, size=1)
    right = registry.new_block(genesis, miner=1, created_at=11, size=1)
    assert view.accept(left, arrived_at=15) is True
    assert view.accept(right, arrived_at=16) is False  # same height: no switch
    assert view.tip_id == left.id


def test_chain_view_ignores_duplicates(registry):
    genesis = registry[0]
    view = ChainView(genesis)
    b1 = registry.new_block(genesis, miner=0, created_at=10, size=1)
    assert view.accept(b1, 11) is True
    assert view.accept(b1, 99) is False
    assert view.known[b1.id] == 11


def test_fork_stats_linear_chain(registry):
    parent = registry[0]
    for t in (10, 20, 30):
        parent = registry.new_block(parent, miner=0, created_at=t, size=1)
    assert fork_stats(list(registry.blocks.values())) == (0, 0)


def test_fork_stats_single_fork(registry):
    genesis = registry[0]
    a = registry.new_block(genesis, miner=0, created_at=10, size=1)
    b = registry.new_block(genesis, miner=1, created_at=12, size=1)  # competing height 1
    c = registry.new_block(a, miner=0, created_at=30, size=1)        # extends a
    blocks = list(registry.blocks.values())
    # one contested height, one block (b) off the final chain
    assert fork_stats(blocks) == (1, 1)
    assert main_chain_ids(blocks) == {0, a.id, c.id}


def test_main_chain_tie_breaks_by_created_then_id(registry):
    genesis = registry[0]
    first = registry.new_block(genesis, miner=0, created_at=10, size=1)
    later = registry.new_block(genesis, miner=1, created_at=20, size=1)
    # equal height tips: earlier created_at wins
    assert main_chain_ids(list(registry.blocks.values())) == {0, first.id}
    assert fork_stats(list(registry.blocks.values())) == (1, 1)
    del later


def test_weighted_sampler_rejects_bad_weights():
    with pytest.raises(ValueError):
        WeightedSampler([])
    with pytest.raises(ValueError):
        WeightedSampler([1.0, 0.0])


def test_weighted_sampler_frequencies_match_powers():
    # power-proportional winner selection, 100k draws, within 2% relative
    powers = [1.0, 2.0, 3.0, 4.0]
    sampler = WeightedSampler(powers)
    stream = random.Random(2024)
    n = 100_000
    counts = [0] * len(powers)
    for _ in range(n):
        counts[sampler.sample(stream)] += 1
    total_power = sum(powers)
    for count, power in zip(counts, powers):
        expected = power / total_power
        assert abs(count / n / expected - 1.0) < 0.02


def test_generation_gap_mean_matches_exponential():
    # 100k draws: sample mean of the gap within 5% of the configured mean
    stream = random.Random(99)
    sampler = WeightedSampler([1.0])
    mean_ms = 600_000
    n = 100_000
    total = sum(next_generation(stream, mean_ms, sampler)[0] for _ in range(n))
    assert abs(total / n / mean_ms - 1.0) < 0.05


def test_generation_gap_is_at_least_one_ms():
    stream = random.Random(0)
    sampler = WeightedSampler([1.0])
    assert all(next_generation(stream, 1, sampler)[0] >= 1 for _ in range(2000))


def test_generation_rejects_bad_interval():
    with pytest.raises(ValueError):
        next_generation(random.Random(0), 0, WeightedSampler([1.0]))


def test_power_profiles():
    assert uniform_powers(3) == [1.0, 1.0, 1.0]
    powers = pareto_powers(1000, random.Random(1))
    assert len(powers) == 1000
    assert all(p > 0 for p in powers)
    assert max(powers) > 5 * (sum(powers) / len(powers))  # heavy tail


def test_block_log_format(registry, tmp_path):
    genesis = registry[0]
    a = registry.new_block(genesis, miner=2, created_at=10, size=1)
    registry.new_block(genesis, miner=3, created_at=12, size=1)
    registry.new_block(a, miner=2, created_at=30, size=1)
    path = tmp_path / "blocks.csv"
    write_block_log(path, registry)
    lines = path.read_text().splitlines()
    assert lines[0] == "id,parent,height,miner,created_at,on_main_chain"
    assert lines[1] == "0,,0,-1,0,1"
    assert lines[2] == "1,0,1,2,10,1"
    assert lines[3] == "2,0,1,3,12,0"  # losing fork branch
    assert lines[4] == "3,1,2,2,30,1"
