import logging
import os
import threading
from queue import Queue
from typing import Any, Callable, List, Optional, Sequence

from hodgeforge.core.constants import DEFAULT_THREADS, THREADS_ENV


def thread_cap(requested: Optional[int] = None) -> int:
    n = requested if requested is not None else DEFAULT_THREADS
    env = os.getenv(THREADS_ENV)
    if env:
        try:
            n = min(n, int(env)) if requested is not None else int(env)
        except ValueError:
            logging.warning(f"[pool] ignoring malformed {THREADS_ENV}={env!r}")
    return max(1, n)


def run_pool(jobs: Sequence[Callable[[], Any]], threads: Optional[int] = None) -> List[Any]:
    """Run zero-argument jobs on worker threads; results come back in submission order.

    The first exception raised by a job is re-raised once all workers stopped.
    """
    jobs = list(jobs)
    if not jobs:
        return []
    n = min(thread_cap(threads), len(jobs))
    results: List[Any] = [None] * len(jobs)
    errors: List[BaseException] = []
    q: Queue = Queue()

    def _worker(wid: int):
        while True:
            item = q.get()
            if item is None:
                q.task_done()
                return
            idx, job = item
            try:
                results[idx] = job()
            except BaseException as exc:  # surfaced after join
                logging.error(f"[pool:w{wid}] job {idx} failed: {exc}")
                errors.append(exc)
            finally:
                q.task_done()

    workers = [threading.Thread(target=_worker, args=(i,), daemon=True) for i in range(n)]
    for t in workers:
        t.start()
    for idx, job in enumerate(jobs):
        q.put((idx, job))
    for _ in workers:
        q.put(None)
    for t in workers:
        t.join()
    logging.debug(f"[pool] {len(jobs)} jobs on {n} threads")
    if errors:
        raise errors[0]
    return results
