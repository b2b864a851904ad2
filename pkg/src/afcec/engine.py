"""The clustering loop: assignment, small-cluster deletion, re-estimation.

Cost being minimized: sum_i p_i * (-ln p_i + H_i) where p_i is the cluster
weight and H_i the cluster's closed-form cross-entropy against its fitted
curved Gaussian. Each step (assignment by cost argmin, weight update,
per-cluster refit) is an exact argmin of the same objective, so the cost
decreases on every iteration that performs no deletion.
"""

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .curves import select_orientation
from .density import fadapted_cross_entropy, fadapted_log_density
from .errors import AllClustersDegenerate, DegenerateCluster, InvalidConfig, RankDeficient

INITS = ("random_partition", "kmeanspp")


@dataclass(frozen=True)
class ClusterModel:
    params: object  # FAdaptedParams
    weight: float
    size: int
    cross_entropy: float


@dataclass
class AfcecModel:
    clusters: list
    assignment: np.ndarray
    cost_trace: list
    iterations: int
    deleted_count: int
    deletion_iterations: list = field(default_factory=list)

    @property
    def k(self):
        return len(self.clusters)

    @property
    def final_cost(self):
        return self.cost_trace[-1]


@dataclass(frozen=True)
class EngineConfig:
    k_init: int
    family: object
    epsilon: float = 1e-4
    deletion_fraction: float = 0.01
    max_iters: int = 200
    seed: int = 0
    init: str = "random_partition"

    def validate(self):
        if self.k_init < 1:
            raise InvalidConfig("k_init must be >= 1")
        if not (self.epsilon > 0):
            raise InvalidConfig("epsilon must be > 0")
        if not (0 <= self.deletion_fraction < 1):
            raise InvalidConfig("deletion_fraction must be in [0, 1)")
        if self.max_iters < 1:
            raise InvalidConfig("max_iters must be >= 1")
        if self.init not in INITS:
            raise InvalidConfig(f"init must be one of {INITS}")


def as_array(x):
    """Accept a Dataset or a plain (n, d) array."""
    rows = getattr(x, "rows", x)
    a = np.asarray(rows, dtype=float)
    if a.ndim != 2:
        raise InvalidConfig("data must be 2-D (n points x d coordinates)")
    return a


def cost(x, clusters, assignment):
    """sum_i p_i * (-ln p_i + H_i), H_i recomputed from each cluster's
    current point set with its stored axis and curve."""
    x = as_array(x)
    assignment = np.asarray(assignment)
    n = x.shape[0]
    total = 0.0
    for i, cl in enumerate(clusters):
        xi = x[assignment == i]
        if len(xi) == 0:
            raise DegenerateCluster(f"cluster {i} is empty")
        h, _ = fadapted_cross_entropy(xi, cl.params.dependent_axis, cl.params.curve)
        p = len(xi) / n
        total += p * (-math.log(p) + h)
    return total


def _score_matrix(x, clusters):
    """(n, k) matrix of -ln p_i - log_density_i(x)."""
    cols = [-math.log(cl.weight) - fadapted_log_density(cl.params, x) for cl in clusters]
    return np.column_stack(cols)


def assign_step(x, clusters):
    """Each point to argmin_i [-ln p_i - log f_i(x)]; ties to the lowest index."""
    x = as_array(x)
    return np.argmin(_score_matrix(x, clusters), axis=1)


def _estimate_cluster(x, idx, n, family):
    j, curve, h, params = select_orientation(x[idx], family)
    return ClusterModel(params, len(idx) / n, len(idx), h)


def _reestimate(x, assignment, k, family):
    """Refit every cluster; drop the ones that fail, reassigning their points.

    Returns (clusters, assignment, dropped). Points of failed clusters go to
    the surviving cluster minimizing the assignment cost. Survivors that
    receive points are refit again; repeats until stable (k only shrinks).
    """
    n = x.shape[0]
    assignment = np.asarray(assignment).copy()
    labels = list(range(k))
    dropped = 0
    while True:
        clusters = {}
        failed = []
        for lab in labels:
            idx = np.flatnonzero(assignment == lab)
            if len(idx) == 0:
                failed.append(lab)
                continue
            try:
                clusters[lab] = _estimate_cluster(x, idx, n, family)
            except (DegenerateCluster, RankDeficient):
                failed.append(lab)
        if not clusters:
            raise AllClustersDegenerate("every cluster failed estimation")
        if not failed:
            break
        dropped += len(failed)
        labels = [lab for lab in labels if lab in clusters]
        moved = np.isin(assignment, failed)
        if moved.any():
            order = [clusters[lab] for lab in labels]
            sub = np.argmin(_score_matrix(x[moved], order), axis=1)
            assignment[moved] = np.asarray(labels)[sub]
        # refit survivors on their (possibly grown) point sets next pass
    # compact labels to 0..k'-1 in original order
    remap = {lab: i for i, lab in enumerate(labels)}
    assignment = np.asarray([remap[a] for a in assignment])
    ordered = [clusters[lab] for lab in labels]
    return ordered, assignment, dropped


def delete_small(x, clusters, assignment, threshold_fraction):
    """Remove clusters holding fewer than threshold_fraction*n points (empty
    ones always go); reassign their points by the assignment cost argmin over
    the survivors (using the survivors' current weights), then renormalize all
    weights from the final sizes."""
    x = as_array(x)
    assignment = np.asarray(assignment).copy()
    n = x.shape[0]
    sizes = np.bincount(assignment, minlength=len(clusters))
    keep = [i for i, s in enumerate(sizes) if s > 0 and s >= threshold_fraction * n]
    if not keep:
        raise AllClustersDegenerate("no cluster meets the size threshold")
    deleted = len(clusters) - len(keep)
    if deleted == 0:
        return list(clusters), assignment, 0
    survivors = [clusters[i] for i in keep]
    moved = ~np.isin(assignment, keep)
    if moved.any():
        sub = np.argmin(_score_matrix(x[moved], survivors), axis=1)
        assignment[moved] = np.asarray(keep)[sub]
    remap = {old: new for new, old in enumerate(keep)}
    assignment = np.asarray([remap[a] for a in assignment])
    new_sizes = np.bincount(assignment, minlength=len(survivors))
    survivors = [
        replace(cl, weight=int(s) / n, size=int(s)) for cl, s in zip(survivors, new_sizes)
    ]
    return survivors, assignment, deleted


def _init_partition(x, cfg):
    """Initial balanced partition, deterministic over (data multiset, seed).

    Rows are sorted lexicographically, shuffled by the seeded generator, and
    dealt round-robin (random_partition) or assigned to their nearest
    k-means++ seed (kmeanspp).
    """
    n = x.shape[0]
    rng = np.random.default_rng(cfg.seed & 0xFFFFFFFFFFFFFFFF)
    order = np.lexsort(x.T[::-1])  # sort by column 0, then 1, ...
    if cfg.init == "random_partition":
        perm = rng.permutation(n)
        assignment = np.empty(n, dtype=int)
        assignment[order[perm]] = np.arange(n) % cfg.k_init
        return assignment
    # k-means++-style seeding on the sorted rows, then nearest-centroid
    xs = x[order]
    centers = [xs[rng.integers(n)]]
    d2 = np.sum((xs - centers[0]) ** 2, axis=1)
    for _ in range(1, cfg.k_init):
        total = d2.sum()
        if total <= 0:
            centers.append(xs[rng.integers(n)])
            continue
        pick = rng.choice(n, p=d2 / total)
        centers.append(xs[pick])
        d2 = np.minimum(d2, np.sum((xs - centers[-1]) ** 2, axis=1))
    c = np.asarray(centers)
    nearest = np.argmin(
        ((xs[:, None, :] - c[None, :, :]) ** 2).sum(axis=2), axis=1
    )
    assignment = np.empty(n, dtype=int)
    assignment[order] = nearest
    return assignment


def fit(x, cfg):
    """Run the clustering loop until h_n >= h_{n-1} - epsilon or max_iters.

    The stop condition is only consulted on iterations that deleted nothing
    (a deletion can bump the cost, and stopping there would freeze a partial
    model); every deletion lowers k, so this cannot loop forever.
    """
    cfg.validate()
    x = as_array(x)
    n, d = x.shape
    if d < 2:
        raise InvalidConfig("need at least 2 coordinates")
    if n < cfg.k_init * (d + 1):
        raise InvalidConfig(f"need at least k_init*(d+1)={cfg.k_init * (d + 1)} points, got {n}")

    assignment = _init_partition(x, cfg)
    deleted_total = 0
    deletion_iterations = []
    clusters, assignment, dropped = _reestimate(x, assignment, cfg.k_init, cfg.family)
    if dropped:
        deleted_total += dropped
        deletion_iterations.append(0)
    trace = [cost(x, clusters, assignment)]

    iterations = 0
    for it in range(1, cfg.max_iters + 1):
        iterations = it
        assignment = assign_step(x, clusters)
        clusters, assignment, ndel = delete_small(x, clusters, assignment, cfg.deletion_fraction)
        clusters, assignment, dropped = _reestimate(x, assignment, len(clusters), cfg.family)
        ndel += dropped
        if ndel:
            deleted_total += ndel
            deletion_iterations.append(it)
        h = sum(cl.weight * (-math.log(cl.weight) + cl.cross_entropy) for cl in clusters)
        trace.append(h)
        if ndel == 0 and h >= trace[-2] - cfg.epsilon:
            break

    return AfcecModel(
        clusters=clusters,
        assignment=assignment,
        cost_trace=trace,
        iterations=iterations,
        deleted_count=deleted_total,
        deletion_iterations=deletion_iterations,
    )


def fit_restarts(x, cfg, restarts, max_workers=None):
    """fit() with seeds cfg.seed .. cfg.seed+restarts-1; returns the lowest-cost
    model and the final costs of the successful restarts in seed order.

    Ties between restarts break toward the smaller seed so the reduction is
    order-independent. A restart failure propagates only if every restart
    fails. max_workers > 1 runs restarts in a thread pool (0 = cpu count).
    """
    if restarts < 1:
        raise InvalidConfig("restarts must be >= 1")
    x = as_array(x)
    cfgs = [replace(cfg, seed=cfg.seed + i) for i in range(restarts)]

    def run(c):
        return fit(x, c)

    results = [None] * restarts
    failures = [None] * restarts
    if max_workers is not None and max_workers != 1 and restarts > 1:
        from concurrent.futures import ThreadPoolExecutor

        workers = max_workers if max_workers > 0 else None
        with ThreadPoolExecutor(max_workers=workers) as pool:
            futs = [pool.submit(run, c) for c in cfgs]
            for i, fut in enumerate(futs):
                try:
                    results[i] = fut.result()
                except (DegenerateCluster, AllClustersDegenerate, RankDeficient) as e:
                    failures[i] = e
    else:
        for i, c in enumerate(cfgs):
            try:
                results[i] = run(c)
            except (DegenerateCluster, AllClustersDegenerate, RankDeficient) as e:
                failures[i] = e

    ok = [(i, m) for i, m in enumerate(results) if m is not None]
    if not ok:
        raise next(f for f in failures if f is not None)
    best = min(ok, key=lambda im: (im[1].final_cost, im[0]))[1]
    return best, [m.final_cost for _, m in ok]
