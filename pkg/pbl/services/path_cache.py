"""
Path Cache Service
샘플링한 Wiener 경로를 (seed, t_min, t_max, step) 키로 캐시하여 반복 실험에서 재사용

메모리 캐시는 항상 켜져 있고, 디렉터리가 지정되면 WPTH 바이너리 파일로도 저장한다.
같은 seed/step의 더 넓은 경로가 있으면 좁은 창은 그 조각으로 돌려주고, 넓은 경로가 들어오면
그 안에 들어가는 좁은 항목은 지운다.
파일 형식: 32바이트 헤더 (magic "WPTH", version, kind, reserved, t_min, step, seed) + float64 값 배열
"""
import os
import struct
import threading
from pathlib import Path
from typing import Dict, Optional, Tuple

import numpy as np
from loguru import logger

from pbl.config import settings
from pbl.exceptions import ConfigurationError
from pbl.services.wiener import TimeGrid, WienerPath, sample_path

MAGIC = b"WPTH"
FORMAT_VERSION = 1
HEADER = struct.Struct("<4sBBHddq")
KIND_BROWNIAN = 0

CacheKey = Tuple[int, float, float, float]


def write_path(path: WienerPath, target: Path) -> None:
    """WPTH 파일로 저장 (임시 파일에 쓰고 rename)"""
    if path.kind != "brownian" or path.origin_shift != 0.0:
        raise ConfigurationError("only unshifted sampled paths can be cached")
    header = HEADER.pack(
        MAGIC, FORMAT_VERSION, KIND_BROWNIAN, 0,
        path.grid.t_min, path.grid.step, path.seed if path.seed < 2 ** 63 else path.seed - 2 ** 64,
    )
    tmp = target.with_suffix(target.suffix + ".tmp")
    with open(tmp, "wb") as f:
        f.write(header)
        f.write(np.ascontiguousarray(path.values, dtype="<f8").tobytes())
    os.replace(tmp, target)


def read_path(source: Path) -> WienerPath:
    """WPTH 파일 읽기 (헤더 검증 후 값 개수는 파일 크기에서 유도)"""
    raw = source.read_bytes()
    if len(raw) < HEADER.size:
        raise ConfigurationError(f"{source}: truncated path cache file")
    magic, version, kind, _, t_min, step, seed = HEADER.unpack_from(raw)
    if magic != MAGIC:
        raise ConfigurationError(f"{source}: bad magic {magic!r}")
    if version != FORMAT_VERSION or kind != KIND_BROWNIAN:
        raise ConfigurationError(f"{source}: unsupported version/kind ({version}, {kind})")
    body = raw[HEADER.size:]
    if len(body) % 8:
        raise ConfigurationError(f"{source}: payload is not a whole number of float64 values")
    values = np.frombuffer(body, dtype="<f8").astype(float)
    n = values.shape[0]
    grid = TimeGrid.span(t_min, t_min + step * (n - 1), step)
    if grid.n_points != n:
        raise ConfigurationError(f"{source}: header grid does not match {n} stored values")
    return WienerPath(grid=grid, values=values, seed=seed % 2 ** 64)


class PathCache:
    """스레드 안전 경로 캐시 (메모리 + 선택적 디스크)"""

    def __init__(self, directory: Optional[str] = None):
        self._cache: Dict[CacheKey, WienerPath] = {}
        self._lock = threading.Lock()
        self._hits = 0
        self._misses = 0
        self.directory = Path(directory) if directory else None
        if self.directory is not None:
            self.directory.mkdir(parents=True, exist_ok=True)

    def use_directory(self, directory: Optional[str]) -> None:
        """디스크 캐시 위치 변경 (--path-cache)"""
        with self._lock:
            self.directory = Path(directory) if directory else None
            if self.directory is not None:
                self.directory.mkdir(parents=True, exist_ok=True)
        logger.info(f"📂 Path cache directory: {self.directory}")

    @staticmethod
    def key(seed: int, grid: TimeGrid) -> CacheKey:
        return (int(seed), float(grid.t_min), float(grid.t_max), float(grid.step))

    def _file_for(self, key: CacheKey) -> Path:
        seed, t_min, t_max, step = key
        return self.directory / f"seed{seed}_{t_min!r}_{t_max!r}_{step!r}.wpth"

    def get_path(self, seed: int, grid: TimeGrid) -> WienerPath:
        """캐시된 경로 반환, 없으면 샘플링 후 저장"""
        key = self.key(seed, grid)
        with self._lock:
            cached = self._cache.get(key)
            if cached is None:
                cached = self._covering(key, grid)
            if cached is not None:
                self._hits += 1
                return cached

        path = None
        if self.directory is not None:
            target = self._file_for(key)
            if target.exists():
                try:
                    path = read_path(target)
                    logger.debug(f"📂 Loaded cached path {target.name}")
                except ConfigurationError as e:
                    logger.warning(f"⚠️ Ignoring unreadable path cache file: {e.detail}")
                    path = None
        if path is None:
            path = sample_path(seed, grid)
            if self.directory is not None:
                try:
                    write_path(path, self._file_for(key))
                except OSError as e:
                    logger.warning(f"⚠️ Could not persist path cache file: {e}")

        with self._lock:
            self._misses += 1
            # 동시에 채워졌다면 먼저 들어온 객체를 공유
            stored = self._cache.setdefault(key, path)
            if stored is path:
                self._evict_inside(key)
            return stored

    def _covering(self, key: CacheKey, grid: TimeGrid) -> Optional[WienerPath]:
        """같은 seed/step의 더 넓은 경로에서 잘라낸 조각 (prefix-consistent이므로 값이 같다)"""
        seed, _, _, step = key
        wide = next(
            (p for (s, lo, hi, h), p in self._cache.items()
             if s == seed and h == step and lo <= grid.t_min and grid.t_max <= hi),
            None,
        )
        if wide is None:
            return None
        i, j = wide.grid.index(grid.t_min), wide.grid.index(grid.t_max)
        if j - i + 1 != grid.n_points:
            return None
        piece = WienerPath(grid=grid, values=wide.values[i:j + 1], seed=wide.seed)
        self._cache[key] = piece
        return piece

    def _evict_inside(self, key: CacheKey) -> None:
        """새 경로 창 안에 들어가는 같은 seed/step 항목 제거"""
        seed, lo, hi, step = key
        inside = [k for k in self._cache
                  if k != key and k[0] == seed and k[3] == step and lo <= k[1] and k[2] <= hi]
        for k in inside:
            del self._cache[k]
        if inside:
            logger.debug(f"📂 Dropped {len(inside)} narrower cached path(s) for seed={seed}")

    def clear(self) -> int:
        with self._lock:
            n = len(self._cache)
            self._cache.clear()
            return n

    def get_stats(self) -> Dict:
        """캐시 통계"""
        with self._lock:
            return {
                "total_paths": len(self._cache),
                "hits": self._hits,
                "misses": self._misses,
                "directory": str(self.directory) if self.directory else None,
            }


# 글로벌 인스턴스
path_cache = PathCache(settings.PATH_CACHE)
