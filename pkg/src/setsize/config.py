"""Estimator configuration, frozen calibration constants and results."""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field, fields, replace
from importlib import resources

from .errors import InvalidParams


def load_calibration() -> dict:
    text = resources.files("setsize").joinpath("calibration.json").read_text()
    return json.loads(text)


_CAL = load_calibration()


@dataclass(frozen=True)
class EstimatorConfig:
    """Accuracy target plus the constants hidden inside the asymptotic bounds.

    ``kappa`` scales the collision and singleton refine stages, ``kappa_iter``
    the iteration cap of the nested-region drivers, ``kappa_g``/``kappa_c`` the
    grid and cube split sample sizes, ``c`` the per-level probe count of the
    unrestricted estimators and ``c_prime`` their window margin for
    ``epsilon < 1``. ``exact_ratios`` swaps sampled ratio estimates for exact
    intersection counts (test mode only).
    """

    epsilon: float = 0.5
    kappa: float = _CAL["kappa"]
    kappa_iter: int = _CAL["kappa_iter"]
    kappa_g: float = _CAL["kappa_g"]
    kappa_c: float = _CAL["kappa_c"]
    c: float = _CAL["c"]
    c_prime: float = _CAL["c_prime"]
    rough_cap_factor: int = _CAL["rough_cap_factor"]
    max_samples: int = _CAL["max_samples"]
    exact_ratios: bool = False

    def __post_init__(self):
        if not 0 < self.epsilon <= 1:
            raise InvalidParams(f"epsilon must lie in (0, 1], got {self.epsilon}")
        if self.kappa < 1 or self.kappa_g <= 0 or self.kappa_c <= 0:
            raise InvalidParams("sample-size constants must be positive (kappa >= 1)")
        if self.kappa_iter < 1 or self.c <= 0 or self.c_prime <= 0:
            raise InvalidParams("kappa_iter, c and c_prime must be positive")
        if self.max_samples < 1 or self.rough_cap_factor < 1:
            raise InvalidParams("caps must be positive")

    def with_(self, **changes) -> "EstimatorConfig":
        return replace(self, **changes)

    @classmethod
    def from_dict(cls, data: dict) -> "EstimatorConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise InvalidParams(f"unknown estimator settings: {sorted(unknown)}")
        return cls(**data)


STATUSES = ("ok", "failed", "cap")


@dataclass
class Estimate:
    """Estimator output. ``value`` is ``None`` unless ``status == "ok"``."""

    value: float | None
    queries: int = 0
    samples: int = 0
    status: str = "ok"
    info: dict = field(default_factory=dict)

    @property
    def cost(self) -> int:
        return self.queries + self.samples

    @property
    def ok(self) -> bool:
        return self.status == "ok"

    def within(self, w: int, epsilon: float) -> bool:
        """Whether ``w / (1 + epsilon) <= value <= (1 + epsilon) * w``."""
        if not self.ok:
            return False
        return w / (1 + epsilon) <= self.value <= (1 + epsilon) * w

    def as_dict(self) -> dict:
        return asdict(self)


def finish(session, value, status="ok", **info) -> Estimate:
    """Package a result with the session's current tallies."""
    return Estimate(
        value=value if status == "ok" else None,
        queries=session.tally.queries,
        samples=session.tally.samples,
        status=status,
        info=info,
    )
