import logging
from dataclasses import dataclass
from typing import Literal, Optional, Protocol

import numpy as np
from pydantic import BaseModel

from ap_dynamics.config.settings import RuntimeSettings
from ap_dynamics.exception.errors import DomainError
from ap_dynamics.flow.ensemble import EnsembleFlow
from ap_dynamics.flow.forcing import Constant
from ap_dynamics.horseshoe.paths import DEFAULT_PATHS, SamplePath, transversal_paths
from ap_dynamics.horseshoe.regions import OrientedRectangle
from ap_dynamics.model.nonlinearity import Nonlinearity

INITIAL_NODES = 257
IMAGE_TOL = 1e-3
MAX_NODES = 20000
MIN_GAP = 1e-12
STRETCH_RTOL = 1e-9
STRETCH_ATOL = 1e-11
CHUNK_SIZE = 256


class Decomposition(Protocol):
    center: Optional[float]
    names: list[str]
    required: int

    def labels(self, sources: np.ndarray, angles: Optional[np.ndarray] = None) -> np.ndarray:
        ...

    def label_name(self, label: int) -> str:
        ...


class CrossingRecord(BaseModel):
    label: str
    s_start: float
    s_end: float
    entry_side: int
    exit_side: int
    margin: float
    clearance: float
    nodes: int


class PathRecord(BaseModel):
    index: int
    level: float
    nodes: int
    labels: list[str]
    crossings: list[CrossingRecord]
    crossing_number: int
    winding_count: int
    status: Literal["ok", "inconclusive", "failed"]


class StretchCertificate(BaseModel):
    """Stretching evidence for one leg: source rectangle, flow time and per-path crossings."""

    map_id: str
    source: str
    target: str
    k: float
    duration: float
    decomposition: list[str]
    required: int
    paths: list[PathRecord]
    status: Literal["granted", "inconclusive", "failed"]
    witness: Optional[int] = None
    crossing_number: int
    winding_count: int
    min_margin: float
    refinement_depth: int
    image_tol: float

    @property
    def path_count(self) -> int:
        return len(self.paths)

    @property
    def granted(self) -> bool:
        return self.status == "granted"


@dataclass
class _PathState:
    path: SamplePath
    s: np.ndarray
    sources: np.ndarray
    images: np.ndarray
    blowup: np.ndarray
    angles: Optional[np.ndarray]
    exhausted: bool = False

    def merge(self, s, sources, images, blowup, angles):
        order = np.argsort(np.concatenate([self.s, s]), kind="stable")
        self.s = np.concatenate([self.s, s])[order]
        self.sources = np.concatenate([self.sources, sources])[order]
        self.images = np.concatenate([self.images, images])[order]
        self.blowup = np.concatenate([self.blowup, blowup])[order]
        if self.angles is not None:
            self.angles = np.concatenate([self.angles, angles])[order]


class StretchVerifier:
    """
    Samples transversal paths of the source rectangle, flows them under the k system for a
    fixed time and looks for sub-paths whose images cross the target from one [-]-side to the
    other, one per compact set of the decomposition.

    Path parameters are refined by midpoints until consecutive images near the target are
    closer than `image_tol * diam(target)`. This is numerical evidence, not an enclosure.
    """

    def __init__(
            self,
            f: Nonlinearity,
            k: float,
            duration: float,
            source: OrientedRectangle,
            target: OrientedRectangle,
            decomposition: Decomposition,
            path_count: int = DEFAULT_PATHS,
            nodes: int = INITIAL_NODES,
            image_tol: float = IMAGE_TOL,
            max_nodes: int = MAX_NODES,
            min_gap: float = MIN_GAP,
            rtol: float = STRETCH_RTOL,
            atol: float = STRETCH_ATOL,
            threshold: Optional[float] = None,
            map_id: str = "psi",
            settings: Optional[RuntimeSettings] = None,
            logger: Optional[logging.Logger] = None,
    ):
        if duration < 0:
            raise DomainError(f"flow time must be >= 0, got {duration}")
        if nodes < 2:
            raise DomainError(f"at least 2 nodes per path are needed, got {nodes}")
        self.f = f
        self.k = k
        self.duration = duration
        self.source = source
        self.target = target
        self.decomposition = decomposition
        self.paths = transversal_paths(source, path_count)
        self.nodes = nodes
        self.image_tol = image_tol
        self.max_nodes = max_nodes
        self.min_gap = min_gap
        self.threshold = threshold
        self.map_id = map_id
        self.logger = logger
        settings = settings or RuntimeSettings.from_env()
        settings = settings.model_copy(update={"chunk_size": max(settings.chunk_size, CHUNK_SIZE)})
        self.ensemble = EnsembleFlow(f, Constant(k=k), rtol, atol, settings=settings, logger=logger)

    def _log(self, level: int, message: str):
        if self.logger:
            self.logger.log(level, message)

    @property
    def spacing_limit(self) -> float:
        return self.image_tol * self.target.diameter

    def _flow(self, sources: np.ndarray):
        result = self.ensemble.flow(sources, 0.0, self.duration, center=self.decomposition.center)
        return result.points, result.blowup, result.angles

    def _flag(self, state: _PathState) -> tuple[np.ndarray, np.ndarray]:
        """(refine, spacing): intervals whose image chord is too long near the target."""
        chord = np.diff(state.images, axis=0)
        spacing = np.hypot(chord[:, 0], chord[:, 1])
        lo = np.minimum(state.images[:-1], state.images[1:]) - spacing[:, None]
        hi = np.maximum(state.images[:-1], state.images[1:]) + spacing[:, None]
        x0, x1, y0, y1 = self.target.bbox
        near = (hi[:, 0] >= x0) & (lo[:, 0] <= x1) & (hi[:, 1] >= y0) & (lo[:, 1] <= y1)
        finite = ~state.blowup[:-1] & ~state.blowup[1:]
        return (spacing > self.spacing_limit) & near & finite, spacing

    def _crossings(self, state: _PathState, spacing: np.ndarray) -> list[CrossingRecord]:
        u = self.target.side_coordinate(state.images)
        tube = self.target.tube_slack(state.images)
        tube[state.blowup] = -np.inf
        labels = self.decomposition.labels(state.sources, state.angles)
        inside = (u > 0) & (u < 1) & (tube > 0)
        records = []
        n = len(u)
        i = 0
        while i < n:
            if not inside[i]:
                i += 1
                continue
            i0 = i
            while i < n and inside[i]:
                i += 1
            i1 = i - 1
            j0, j1 = i0 - 1, i1 + 1
            if j0 < 0 or j1 >= n:
                continue
            forward = u[j0] <= 0 and u[j1] >= 1
            backward = u[j0] >= 1 and u[j1] <= 0
            run = labels[i0:i1 + 1]
            if not (forward or backward) or run.min() < 0 or run.min() != run.max():
                continue
            if np.any(spacing[j0:j1] > self.spacing_limit):
                continue
            label = int(run[0])
            name = self.decomposition.label_name(label)
            clearance = min(-u[j0], u[j1] - 1) if forward else min(u[j0] - 1, -u[j1])
            records.append(CrossingRecord(
                label=name,
                s_start=float(state.s[j0]),
                s_end=float(state.s[j1]),
                entry_side=0 if forward else 1,
                exit_side=1 if forward else 0,
                margin=float(tube[i0:i1 + 1].min()),
                clearance=float(clearance),
                nodes=j1 - j0 + 1,
            ))
        return records

    def verify(self) -> StretchCertificate:
        """
        Returns:
            StretchCertificate: granted if every path shows a crossing for every compact set,
            failed (with the first failing path as witness) if a fully refined path misses one,
            inconclusive otherwise.
        """
        if self.threshold is not None and self.duration <= self.threshold:
            self._log(logging.WARNING, f"{self.map_id}: flow time {self.duration:.6g} does not exceed "
                                       f"the threshold {self.threshold:.6g}; stretching may fail")
        self._log(logging.INFO, f"{self.map_id}: verifying {len(self.paths)} paths of {self.source.name} "
                                f"-> {self.target.name} over t={self.duration:.6g}")
        s0 = np.linspace(0.0, 1.0, self.nodes)
        sources = [path.points(s0) for path in self.paths]
        images, blowup, angles = self._flow(np.concatenate(sources))
        states = []
        for i, path in enumerate(self.paths):
            cut = slice(i * self.nodes, (i + 1) * self.nodes)
            states.append(_PathState(path, s0.copy(), sources[i], images[cut], blowup[cut],
                                     None if angles is None else angles[cut]))

        depth = 0
        while True:
            batches = []
            for state in states:
                refine, _ = self._flag(state)
                refine &= np.diff(state.s) > 2.0 * self.min_gap
                count = int(refine.sum())
                if count and len(state.s) + count > self.max_nodes:
                    state.exhausted = True
                    count = 0
                mids = 0.5 * (state.s[:-1] + state.s[1:])[refine] if count else np.empty(0)
                batches.append(mids)
            total = sum(len(b) for b in batches)
            if total == 0:
                break
            depth += 1
            new_sources = [state.path.points(mids) if len(mids) else np.empty((0, 2))
                           for state, mids in zip(states, batches)]
            images, blowup, angles = self._flow(np.concatenate(new_sources))
            offset = 0
            for state, mids, src in zip(states, batches, new_sources):
                cut = slice(offset, offset + len(mids))
                offset += len(mids)
                if len(mids):
                    state.merge(mids, src, images[cut], blowup[cut], None if angles is None else angles[cut])
            self._log(logging.DEBUG, f"{self.map_id}: refinement round {depth}, {total} new nodes")

        return self._certificate(states, depth)

    def _certificate(self, states: list[_PathState], depth: int) -> StretchCertificate:
        names = self.decomposition.names
        required = set(names[:self.decomposition.required])
        records = []
        for state in states:
            refine, spacing = self._flag(state)
            crossings = self._crossings(state, spacing)
            found = sorted({c.label for c in crossings})
            achieved = required.intersection(found)
            if achieved == required:
                status = "ok"
            elif state.exhausted or refine.any():
                status = "inconclusive"
            else:
                status = "failed"
            records.append(PathRecord(
                index=state.path.index,
                level=state.path.level,
                nodes=len(state.s),
                labels=found,
                crossings=crossings,
                crossing_number=len(achieved),
                winding_count=len(found),
                status=status,
            ))

        failed = [r.index for r in records if r.status == "failed"]
        if failed:
            status, witness = "failed", failed[0]
        elif any(r.status == "inconclusive" for r in records):
            status, witness = "inconclusive", None
        else:
            status, witness = "granted", None
        margins = [c.margin for r in records for c in r.crossings if c.label in required]
        certificate = StretchCertificate(
            map_id=self.map_id,
            source=self.source.name,
            target=self.target.name,
            k=self.k,
            duration=self.duration,
            decomposition=names,
            required=self.decomposition.required,
            paths=records,
            status=status,
            witness=witness,
            crossing_number=min(r.crossing_number for r in records),
            winding_count=min(r.winding_count for r in records),
            min_margin=min(margins) if margins else 0.0,
            refinement_depth=depth,
            image_tol=self.image_tol,
        )
        self._log(logging.INFO, f"{self.map_id}: {status}, crossing number {certificate.crossing_number}"
                                f" of {certificate.required}, depth {depth}")
        return certificate


def verify_stretch(f: Nonlinearity, k: float, duration: float, source: OrientedRectangle, target: OrientedRectangle,
                   decomposition: Decomposition, logger: Optional[logging.Logger] = None,
                   **options) -> StretchCertificate:
    return StretchVerifier(f, k, duration, source, target, decomposition, logger=logger, **options).verify()
