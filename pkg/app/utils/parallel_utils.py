"""스레드 풀 기반 병렬 실행 유틸리티.

numpy 연산은 GIL 을 해제하므로 주파수/실현 블록 단위 작업은
스레드 풀로 병렬화합니다. 결과는 항상 입력 순서대로 반환됩니다.
"""

import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, List, Optional, TypeVar

from tqdm import tqdm

from app.core.setting import get_settings


settings = get_settings()

T = TypeVar("T")
R = TypeVar("R")


def resolve_workers(workers: Optional[int]) -> int:
    """작업자 수 결정 (None 이면 설정값, 0 이면 CPU 개수)"""
    if workers is None:
        workers = settings.DEFAULT_WORKERS
    if workers <= 0:
        workers = os.cpu_count() or 1
    return workers


def ordered_map(fn: Callable[[T], R], items: Iterable[T], workers: Optional[int] = 1, desc: str = "") -> List[R]:
    """fn 을 items 에 적용한 결과를 입력 순서대로 반환"""
    items = list(items)
    n_workers = min(resolve_workers(workers), max(len(items), 1))
    progress = tqdm(total=len(items), desc=desc, disable=not settings.SHOW_PROGRESS, leave=False)
    try:
        if n_workers == 1:
            results = []
            for item in items:
                results.append(fn(item))
                progress.update(1)
            return results
        with ThreadPoolExecutor(max_workers=n_workers) as executor:
            results = []
            for result in executor.map(fn, items):
                results.append(result)
                progress.update(1)
            return results
    finally:
        progress.close()
