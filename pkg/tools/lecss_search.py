"""
Randomized search for small LECSS instances.

Each trial draws its own generator from ``SeedSequence(seed, spawn_key=(trial,))``,
so a trial's outcome depends only on (seed, trial). Trials are scanned in index
order (or in ordered batches across a process pool) and the lowest-index success
is returned.
"""

from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from typing import List, Optional

import numpy as np

from config import Settings
from schemes.models import LecssParams, SearchResult
from tools.gf2 import Gf2Matrix, dual_distance, min_distance

logger = logging.getLogger(__name__)


class LecssSearchError(ValueError):
    """Custom exception for LECSS search errors."""
    pass


def run_trial(
    n: int,
    k_msg: int,
    d_target: int,
    t_target: int,
    seed: int,
    trial: int,
    candidates_per_step: int = 64,
    limit: int = 1 << 24,
) -> Optional[LecssParams]:
    """One candidate: random G_msg, then G_rnd grown greedily while the distance holds."""
    rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(trial,)))
    top = 1 << n
    g_msg = Gf2Matrix(tuple(rng.integers(1, top, size=k_msg).tolist()), n)
    if not g_msg.has_full_row_rank() or min_distance(g_msg, limit) < d_target:
        return None

    rnd_rows: List[int] = []
    while k_msg + len(rnd_rows) < n and (2 << (k_msg + len(rnd_rows))) <= limit:
        for candidate in rng.integers(1, top, size=candidates_per_step).tolist():
            grown = Gf2Matrix(g_msg.rows + tuple(rnd_rows) + (candidate,), n)
            if grown.has_full_row_rank() and min_distance(grown, limit) >= d_target:
                rnd_rows.append(candidate)
                break
        else:
            break

    g_rnd = Gf2Matrix(tuple(rnd_rows), n)
    dual = dual_distance(g_rnd, limit)
    if dual <= t_target:
        return None
    distance = min_distance(g_msg.stack(g_rnd), limit)
    return LecssParams.from_matrices(g_msg, g_rnd, d=distance, t=min(dual - 1, n), certified=True)


def _run_trials(
    n: int, k_msg: int, d_target: int, t_target: int, seed: int,
    trials: List[int], candidates_per_step: int, limit: int,
) -> List[Optional[LecssParams]]:
    return [
        run_trial(n, k_msg, d_target, t_target, seed, trial, candidates_per_step, limit)
        for trial in trials
    ]


def search_lecss(
    n: int,
    k_msg: int,
    d_target: int,
    t_target: int,
    trials: int,
    seed: int,
    settings: Optional[Settings] = None,
    workers: Optional[int] = None,
) -> SearchResult:
    """First (lowest trial index) instance with min distance >= d_target and
    dual distance of G_rnd > t_target. Not finding one is not a disproof."""
    settings = settings or Settings()
    workers = settings.worker_cap(workers)
    if not 1 <= k_msg <= n:
        raise LecssSearchError(f"k_msg must lie in 1..n, got k_msg={k_msg}, n={n}")
    if n > 24:
        raise LecssSearchError(f"Exact certification needs n <= 24, got {n}")
    if seed < 0:
        raise LecssSearchError("Seed must be non-negative")

    result = SearchResult(
        found=False, n=n, k_msg=k_msg, d_target=d_target, t_target=t_target,
        trials=trials, seed=seed,
    )
    step = settings.search_candidates_per_step
    limit = settings.codeword_enumeration_limit

    if workers <= 1:
        for trial in range(trials):
            params = run_trial(n, k_msg, d_target, t_target, seed, trial, step, limit)
            if params is not None:
                return _found(result, trial, params)
        logger.info("No LECSS instance for n=%d k_msg=%d d>=%d t>=%d in %d trials",
                    n, k_msg, d_target, t_target, trials)
        return result

    batch = workers * 4
    with ProcessPoolExecutor(max_workers=workers) as pool:
        for start in range(0, trials, batch):
            indices = list(range(start, min(start + batch, trials)))
            chunks = [indices[i::workers] for i in range(workers)]
            outcomes = {}
            for chunk, found in zip(chunks, pool.map(
                _run_trials,
                *zip(*[(n, k_msg, d_target, t_target, seed, chunk, step, limit) for chunk in chunks]),
            )):
                outcomes.update(zip(chunk, found))
            for trial in indices:
                if outcomes[trial] is not None:
                    return _found(result, trial, outcomes[trial])
    return result


def _found(result: SearchResult, trial: int, params: LecssParams) -> SearchResult:
    logger.info("LECSS instance found at trial %d: n=%d k_msg=%d z=%d d=%d t=%d",
                trial, params.n, params.k_msg, params.z, params.d, params.t)
    return result.model_copy(update={"found": True, "trial": trial, "params": params})
