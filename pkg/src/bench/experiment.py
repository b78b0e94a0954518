"""Random-walk locate experiments.

Particles start uniformly in the domain and take `steps` random moves of at
most delta * h_K, where K is the host of the current position; moves leaving
the domain are redrawn. The trajectory stream depends only on the seed, the
mesh and delta, so every method locates exactly the same positions. Only the
locate loops are timed.
"""
import hashlib
import logging
import math
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Sequence

import numpy as np
from tqdm import tqdm

from baselines.aux_grid import CandidateListGrid
from baselines.brute_force import BruteForceLocator
from baselines.neighbour_walk import NeighbourWalk
from config.config import EXTERIOR, LOCATE_METHODS
from config.locator_config import WalkConfig
from bench.report import BenchReport, MethodRun
from indexing.builder import build_index
from indexing.index import LocatorIndex
from locating.locator import locate_2d_id, locate_3d_id, locate_ids
from mesh.generators import generate_mixed_mesh, generate_structured_mesh
from mesh.loaders import load_mesh
from mesh.metrics import element_diameters
from mesh.topology import MeshTopology
from utils.errors import CrossCheckError, ResampleLimitError
from utils.timing import Stopwatch

logger = logging.getLogger(__name__)

# (rows of the new positions, rows of the previous positions, previous hosts) -> ids
StepLocator = Callable[[List[tuple], List[tuple], List[int]], List[int]]


@dataclass(frozen=True)
class Trajectory:
    """Positions (steps + 1, N, dim) and their hosts (steps + 1, N); row 0 is the start."""
    delta: float
    positions: np.ndarray
    hosts: np.ndarray

    @property
    def steps(self) -> int:
        return len(self.positions) - 1


def experiment_streams(seed: int):
    """Independent generators for the trajectories and the cross-check subsamples."""
    walk_seq, check_seq = np.random.SeedSequence(seed).spawn(2)
    return np.random.Generator(np.random.PCG64(walk_seq)), np.random.Generator(np.random.PCG64(check_seq))


def load_experiment_mesh(config: WalkConfig) -> MeshTopology:
    if config.mesh_path:
        return load_mesh(config.mesh_path)
    if config.mixed:
        return generate_mixed_mesh(config.n, config.domain)
    return generate_structured_mesh(config.dim, config.domain, config.n, drop_quadrant=config.l_shape)


def random_displacements(rng: np.random.Generator, radii: np.ndarray, dim: int) -> np.ndarray:
    """Vectors of length r ~ U(0, radius) in a uniformly drawn direction angle(s)."""
    count = len(radii)
    r = rng.uniform(0.0, 1.0, count) * radii
    if dim == 2:
        theta = rng.uniform(0.0, 2.0 * np.pi, count)
        return np.stack([r * np.cos(theta), r * np.sin(theta)], axis=-1)
    theta1 = rng.uniform(0.0, np.pi, count)
    theta2 = rng.uniform(0.0, 2.0 * np.pi, count)
    return np.stack([
        r * np.sin(theta1) * np.cos(theta2),
        r * np.sin(theta1) * np.sin(theta2),
        r * np.cos(theta1),
    ], axis=-1)


def sample_initial_points(mesh: MeshTopology, oracle: BruteForceLocator, count: int,
                          rng: np.random.Generator, max_resample: int):
    """Uniform points in the domain: uniform in the bounding box, kept when the oracle finds a host."""
    lo, hi = mesh.bounding_box()
    points = np.empty((count, mesh.dim))
    hosts = np.full(count, EXTERIOR, dtype=np.int64)
    pending = np.arange(count)
    for _ in range(max_resample):
        candidates = rng.uniform(lo, hi, size=(len(pending), mesh.dim))
        found = oracle.locate_ids(candidates)
        keep = found != EXTERIOR
        points[pending[keep]] = candidates[keep]
        hosts[pending[keep]] = found[keep]
        pending = pending[~keep]
        if len(pending) == 0:
            return points, hosts
    raise ResampleLimitError(f"{len(pending)} initial points still outside after {max_resample} draws")


def generate_trajectory(index: LocatorIndex, oracle: BruteForceLocator, config: WalkConfig,
                        rng: np.random.Generator, progress: bool = False) -> Trajectory:
    """Seeded particle paths with hosts, resampling moves that leave the domain."""
    mesh = index.mesh
    diameters = element_diameters(mesh)
    start, start_hosts = sample_initial_points(mesh, oracle, config.particles, rng, config.max_resample)
    positions = [start]
    hosts = [start_hosts]
    warn_at = config.max_resample // 2

    for step in tqdm(range(config.steps), desc=f"trajectory delta={config.delta:g}", disable=not progress):
        current, current_hosts = positions[-1], hosts[-1]
        nxt = np.empty_like(current)
        nxt_hosts = np.full(len(current), EXTERIOR, dtype=np.int64)
        pending = np.arange(len(current))
        attempts = 0
        while len(pending):
            if attempts == config.max_resample:
                raise ResampleLimitError(
                    f"step {step}: {len(pending)} particles still outside after {attempts} draws "
                    f"(first particle {int(pending[0])} at {current[pending[0]].tolist()})"
                )
            if attempts == warn_at and warn_at > 0:
                logger.warning(f"Step {step}: {len(pending)} particles need more than {warn_at} draws")
            radii = config.delta * diameters[current_hosts[pending]]
            candidates = current[pending] + random_displacements(rng, radii, mesh.dim)
            found = locate_ids(candidates, index)
            keep = found != EXTERIOR
            nxt[pending[keep]] = candidates[keep]
            nxt_hosts[pending[keep]] = found[keep]
            pending = pending[~keep]
            attempts += 1
        positions.append(nxt)
        hosts.append(nxt_hosts)
    return Trajectory(config.delta, np.stack(positions), np.stack(hosts))


def make_patch_locator(index: LocatorIndex, workers: int = 1) -> StepLocator:
    find = locate_2d_id if index.dim == 2 else locate_3d_id
    if workers > 1:
        return lambda rows, prev_rows, prev_hosts: locate_ids(rows, index, workers).tolist()
    return lambda rows, prev_rows, prev_hosts: [find(p, index) for p in rows]


def make_walk_locator(walker: NeighbourWalk) -> StepLocator:
    walk = walker.locate_id
    return lambda rows, prev_rows, prev_hosts: [walk(k, a, b) for k, a, b in zip(prev_hosts, prev_rows, rows)]


def make_auxgrid_locator(clg: CandidateListGrid) -> StepLocator:
    find = clg.locate_id
    return lambda rows, prev_rows, prev_hosts: [find(p) for p in rows]


def make_brute_locator(oracle: BruteForceLocator) -> StepLocator:
    find = oracle.locate_id
    return lambda rows, prev_rows, prev_hosts: [find(p) for p in rows]


def _agrees(found: int, expected: int, p: Sequence[float], oracle: BruteForceLocator) -> bool:
    """Same id as the oracle, or another element whose closed set also holds p."""
    if found == expected:
        return True
    return found != EXTERIOR and expected != EXTERIOR and oracle.halfspaces.contains(found, p, oracle.tol)


def cross_check(method: str, trajectory: Trajectory, step: int, found: np.ndarray, sample: np.ndarray,
                oracle: BruteForceLocator) -> int:
    """Number of sampled particles agreeing with the oracle; the first disagreement raises."""
    points = trajectory.positions[step, sample]
    expected = oracle.locate_ids(points)
    for particle, p, got, want in zip(sample.tolist(), points.tolist(), found[sample].tolist(), expected.tolist()):
        if not _agrees(got, want, p, oracle):
            raise CrossCheckError(f"{method} disagrees with the brute-force oracle", {
                "method": method,
                "delta": trajectory.delta,
                "step": step,
                "particle": particle,
                "point": p,
                "found": got,
                "expected": want,
                "path": trajectory.positions[:step + 1, particle].tolist(),
                "hosts": trajectory.hosts[:step + 1, particle].tolist(),
            })
    return len(sample)


def run_method(method: str, locator: StepLocator, init_s: float, trajectory: Trajectory,
               oracle: BruteForceLocator, check_rng: np.random.Generator, check_fraction: float) -> MethodRun:
    """Time one method over every step of a trajectory, cross-checking a subsample each step."""
    n = trajectory.positions.shape[1]
    n_checks = 0 if check_fraction <= 0.0 else min(n, max(1, math.ceil(check_fraction * n)))
    rows_by_step = [[tuple(p) for p in step.tolist()] for step in trajectory.positions]
    digest = hashlib.sha256()
    step_s: List[float] = []
    checks = passed = outside = 0

    for step in range(1, trajectory.steps + 1):
        prev_hosts = trajectory.hosts[step - 1].tolist()
        with Stopwatch() as watch:
            ids = locator(rows_by_step[step], rows_by_step[step - 1], prev_hosts)
        step_s.append(watch.elapsed)
        found = np.asarray(ids, dtype=np.int64)
        digest.update(found.tobytes())
        outside += int(np.count_nonzero(found == EXTERIOR))
        if n_checks:
            sample = np.sort(check_rng.choice(n, size=n_checks, replace=False))
            passed += cross_check(method, trajectory, step, found, sample, oracle)
            checks += n_checks

    run = MethodRun(method=method, delta=trajectory.delta, init_s=init_s, locate_s=float(sum(step_s)),
                    step_s=step_s, checks=checks, checks_passed=passed, outside=outside,
                    outcome_digest=digest.hexdigest())
    logger.info(f"{method} delta={trajectory.delta:g}: locate {run.locate_s:.4f}s over {len(step_s)} steps, "
                f"checks {passed}/{checks}, outside {outside}")
    return run


def prepare_locators(methods: Sequence[str], index: LocatorIndex, oracle: BruteForceLocator,
                     workers: int = 1) -> Dict[str, tuple]:
    """(step locator, init seconds) per method; the patch index is built by the caller."""
    locators = {}
    for method in methods:
        if method == "patch":
            locators[method] = (make_patch_locator(index, workers), index.stats.init_seconds)
        elif method == "walk":
            with Stopwatch() as watch:
                walker = NeighbourWalk(index.mesh, tol=index.tol)
            locators[method] = (make_walk_locator(walker), watch.elapsed)
        elif method == "auxgrid":
            with Stopwatch() as watch:
                clg = CandidateListGrid(index.mesh, tol=index.tol)
            locators[method] = (make_auxgrid_locator(clg), watch.elapsed)
        elif method == "brute":
            locators[method] = (make_brute_locator(oracle), 0.0)
    return locators


def run_suite(base_config: WalkConfig, methods: Optional[Sequence[str]] = None,
              deltas: Optional[Sequence[float]] = None, progress: bool = False) -> BenchReport:
    """Every method at every delta on one shared trajectory stream per delta."""
    methods = list(methods or [base_config.method])
    deltas = list(deltas or [base_config.delta])
    unknown = [m for m in methods if m not in LOCATE_METHODS]
    if unknown:
        raise ValueError(f"unknown methods {unknown}, expected any of {LOCATE_METHODS}")
    mesh = load_experiment_mesh(base_config)
    logger.info(f"Experiment mesh: dim={mesh.dim}, {mesh.n_vertices} vertices, {mesh.n_elements} elements")

    index = build_index(mesh, base_config.build)
    oracle = BruteForceLocator(mesh, halfspaces=index.halfspaces, tol=index.tol)
    locators = prepare_locators(methods, index, oracle, base_config.workers)

    report = BenchReport(
        dim=mesh.dim, n_e=mesh.n_elements, h=index.metrics.h, s=index.grid.s,
        w_star=index.metrics.w_star, particles=base_config.particles, steps=base_config.steps,
        seed=base_config.seed, active=index.stats.active, classes=dict(index.stats.classes),
    )
    for delta in deltas:
        config = base_config.model_copy(update={"delta": float(delta)})
        walk_rng, check_rng = experiment_streams(config.seed)
        trajectory = generate_trajectory(index, oracle, config, walk_rng, progress)
        for method in methods:
            locator, init_s = locators[method]
            report.runs.append(run_method(method, locator, init_s, trajectory, oracle,
                                          check_rng, config.check_fraction))
    return report


def run_experiment(config: WalkConfig, progress: bool = False) -> BenchReport:
    """Single method and delta from the config."""
    return run_suite(config, [config.method], [config.delta], progress)
