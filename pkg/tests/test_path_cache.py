import numpy as np

from pbl.services.path_cache import PathCache, read_path, write_path
from pbl.services.wiener import TimeGrid, sample_path

GRID = TimeGrid.span(-5.0, 5.0, 0.01)


def test_memory_cache_shares_paths():
    cache = PathCache()
    first = cache.get_path(7, GRID)
    second = cache.get_path(7, GRID)
    assert first is second
    stats = cache.get_stats()
    assert stats["hits"] == 1
    assert stats["misses"] == 1


def test_disk_cache_round_trip(tmp_path):
    PathCache(str(tmp_path)).get_path(13, GRID)
    files = list(tmp_path.glob("*.wpth"))
    assert len(files) == 1
    assert files[0].read_bytes()[:4] == b"WPTH"

    reloaded = PathCache(str(tmp_path)).get_path(13, GRID)
    np.testing.assert_array_equal(reloaded.values, sample_path(13, GRID).values)


def test_write_then_read(tmp_path):
    path = sample_path(11, GRID)
    target = tmp_path / "p.wpth"
    write_path(path, target)
    loaded = read_path(target)
    assert loaded.seed == 11
    assert loaded.grid.n_points == GRID.n_points
    np.testing.assert_array_equal(loaded.values, path.values)


def test_unreadable_file_is_resampled(tmp_path):
    cache = PathCache(str(tmp_path))
    cache._file_for(cache.key(7, GRID)).write_bytes(b"garbage")
    path = cache.get_path(7, GRID)
    np.testing.assert_array_equal(path.values, sample_path(7, GRID).values)


def test_clear():
    cache = PathCache()
    cache.get_path(7, GRID)
    assert cache.clear() == 1
    assert cache.get_stats()["total_paths"] == 0


def test_narrower_window_is_cut_from_a_wider_path():
    cache = PathCache()
    wide = cache.get_path(7, TimeGrid.span(-10.0, 10.0, 0.01))
    narrow = cache.get_path(7, GRID)
    np.testing.assert_array_equal(narrow.values, sample_path(7, GRID).values)
    assert np.shares_memory(narrow.values, wide.values)
    stats = cache.get_stats()
    assert stats["misses"] == 1
    assert stats["hits"] == 1


def test_wider_path_replaces_narrower_entries():
    cache = PathCache()
    cache.get_path(7, GRID)
    cache.get_path(11, GRID)
    cache.get_path(7, TimeGrid.span(-10.0, 10.0, 0.01))
    assert cache.get_stats()["total_paths"] == 2
