import logging
from dataclasses import dataclass, field
from typing import Literal, Optional

from pydantic import BaseModel

from ap_dynamics.config.settings import RuntimeSettings
from ap_dynamics.exception.errors import DomainError
from ap_dynamics.flow.forcing import Step
from ap_dynamics.horseshoe.decomposition import EnergySplit, WindingSectors
from ap_dynamics.horseshoe.paths import DEFAULT_PATHS
from ap_dynamics.horseshoe.regions import EnergyLevels, RegionGeometry, build_regions
from ap_dynamics.horseshoe.stretch import (
    IMAGE_TOL,
    INITIAL_NODES,
    MAX_NODES,
    STRETCH_ATOL,
    STRETCH_RTOL,
    StretchCertificate,
    StretchVerifier,
)
from ap_dynamics.horseshoe.thresholds import TauStars, tau_stars
from ap_dynamics.model.nonlinearity import Nonlinearity

Status = Literal["granted", "declined", "inconclusive"]

EXIT_CODES = {"granted": 0, "declined": 2, "inconclusive": 3}


class CertificateReport(BaseModel):
    """JSON form of a horseshoe certificate."""

    status: Status
    verdict: str
    reason: str
    symbols: tuple[int, int]
    forcing: dict
    geometry: dict
    tau_stars: dict
    psi1: Optional[StretchCertificate] = None
    psi2: Optional[StretchCertificate] = None


@dataclass
class HorseshoeCertificate:
    geometry: RegionGeometry
    forcing: Step
    m: int
    thresholds: TauStars
    status: Status
    reason: str
    psi1: Optional[StretchCertificate] = None
    psi2: Optional[StretchCertificate] = None
    options: dict = field(default_factory=dict)

    @property
    def n(self) -> int:
        return self.geometry.first_symbols

    @property
    def granted(self) -> bool:
        return self.status == "granted"

    @property
    def exit_code(self) -> int:
        return EXIT_CODES[self.status]

    @property
    def verdict(self) -> str:
        if self.granted:
            return f"chaotic dynamics on {self.n}×{self.m} symbols (numerical evidence)"
        return f"{self.status}: {self.reason}"

    def report(self) -> CertificateReport:
        s = self.forcing
        return CertificateReport(
            status=self.status,
            verdict=self.verdict,
            reason=self.reason,
            symbols=(self.n, self.m),
            forcing={"k1": s.k1, "k2": s.k2, "t1": s.t1, "t2": s.t2},
            geometry=self.geometry.summary(),
            tau_stars=self.thresholds.as_dict(),
            psi1=self.psi1,
            psi2=self.psi2,
        )

    def to_json(self, indent: int = 2) -> str:
        return self.report().model_dump_json(indent=indent)


class HorseshoeCertifier:
    """
    Certifies the stepwise system: checks t1 > tau1_star and t2 > tau2_star, then verifies that
    the k1 leg stretches M to N with crossing number n (2, or 1 when k1 = 0) and the k2 leg
    stretches N to M with crossing number m.
    """

    def __init__(
            self,
            f: Nonlinearity,
            forcing: Step,
            levels: Optional[EnergyLevels] = None,
            m: int = 2,
            path_count: int = DEFAULT_PATHS,
            nodes: int = INITIAL_NODES,
            image_tol: float = IMAGE_TOL,
            max_nodes: int = MAX_NODES,
            rtol: float = STRETCH_RTOL,
            atol: float = STRETCH_ATOL,
            settings: Optional[RuntimeSettings] = None,
            logger: Optional[logging.Logger] = None,
    ):
        if not isinstance(forcing, Step):
            raise DomainError(f"certification needs stepwise forcing, got {type(forcing).__name__}")
        if forcing.c != 0:
            raise DomainError(f"certification covers the undamped system, got c={forcing.c}")
        if m < 1:
            raise DomainError(f"the number of k2 symbols must be >= 1, got m={m}")
        self.f = f
        self.forcing = forcing
        self.m = m
        self.options = dict(path_count=path_count, nodes=nodes, image_tol=image_tol, max_nodes=max_nodes,
                            rtol=rtol, atol=atol)
        self.settings = settings or RuntimeSettings.from_env()
        self.logger = logger
        self.geometry = build_regions(f, forcing.k1, forcing.k2, levels)
        self.thresholds = tau_stars(self.geometry, m)

    def _log(self, level: int, message: str):
        if self.logger:
            self.logger.log(level, message)

    def stretch_psi1(self, duration: Optional[float] = None) -> StretchCertificate:
        geom = self.geometry
        return StretchVerifier(
            self.f, geom.k1, self.forcing.t1 if duration is None else duration, geom.M, geom.N,
            EnergySplit(geom), threshold=self.thresholds.tau1, map_id="psi1",
            settings=self.settings, logger=self.logger, **self.options,
        ).verify()

    def stretch_psi2(self, duration: Optional[float] = None) -> StretchCertificate:
        geom = self.geometry
        return StretchVerifier(
            self.f, geom.k2, self.forcing.t2 if duration is None else duration, geom.N, geom.M,
            WindingSectors(geom, self.m), threshold=self.thresholds.tau2, map_id="psi2",
            settings=self.settings, logger=self.logger, **self.options,
        ).verify()

    def crossing_count_for(self, t2: float) -> int:
        """Number of distinct windings achieved on every path by the k2 leg over time t2."""
        return self.stretch_psi2(t2).winding_count

    def _declined_threshold(self) -> Optional[str]:
        t, s = self.thresholds, self.forcing
        if not s.t1 > t.tau1:
            return f"t1 > tau1_star fails: t1={s.t1:.6g} <= tau1_star={t.tau1:.6g}"
        if not s.t2 > t.tau2:
            return f"t2 > tau2_star fails: t2={s.t2:.6g} <= tau2_star={t.tau2:.6g}"
        return None

    def certify(self) -> HorseshoeCertificate:
        base = dict(geometry=self.geometry, forcing=self.forcing, m=self.m, thresholds=self.thresholds,
                    options=self.options)
        reason = self._declined_threshold()
        if reason:
            self._log(logging.WARNING, f"certificate declined: {reason}")
            return HorseshoeCertificate(status="declined", reason=reason, **base)

        psi1 = self.stretch_psi1()
        psi2 = self.stretch_psi2()
        legs = [psi1, psi2]
        failed = [leg for leg in legs if leg.status == "failed"]
        if failed:
            leg = failed[0]
            status: Status = "declined"
            reason = (f"{leg.map_id} does not stretch {leg.source} to {leg.target}: "
                      f"path {leg.witness} misses a crossing")
        elif any(leg.status == "inconclusive" for leg in legs):
            status, reason = "inconclusive", "node limit reached before every crossing was resolved"
        else:
            status, reason = "granted", ""
        certificate = HorseshoeCertificate(status=status, reason=reason, psi1=psi1, psi2=psi2, **base)
        self._log(logging.INFO, f"horseshoe certificate: {certificate.verdict}")
        return certificate


def certify_horseshoe(f: Nonlinearity, forcing: Step, levels: Optional[EnergyLevels] = None, m: int = 2,
                      logger: Optional[logging.Logger] = None, **options) -> HorseshoeCertificate:
    return HorseshoeCertifier(f, forcing, levels, m, logger=logger, **options).certify()
