import logging
from collections.abc import Callable
from dataclasses import dataclass, field
from typing import ClassVar

import numpy as np

from ..diffcore import Node, concat, constant, reduce_sum
from ..errors import ConfigError, TreeRegError
from ..models import Batch, StepResult, TargetModel
from ..surrogate import (
    FitReport,
    SurrogateState,
    augment_convex_hull,
    augment_random,
    record_sample,
    restart_samples,
    retrain_surrogate,
    surrogate_predict,
    surrogate_value,
)
from .norms import l1, l2
from .reference import TreeReference
from .sparsemax import sparsemax_node

logger = logging.getLogger("TreeRegularizer")

REGIONAL_MODES = ("l0", "l1")
RETRAIN_UNITS = ("epoch", "step")


@dataclass
class RetrainSchedule:
    period: int
    unit: str = "epoch"

    def __post_init__(self):
        if self.unit not in RETRAIN_UNITS:
            raise ConfigError(f"unknown retrain unit '{self.unit}'")
        if self.period < 1:
            raise ConfigError(f"retrain period must be at least 1, got {self.period}")

    def due(self, result: StepResult) -> bool:
        if self.unit == "step":
            return result.step % self.period == 0
        return result.end_of_epoch and (result.epoch + 1) % self.period == 0


@dataclass
class Augmentation:
    convex_hull: int = 250
    random: int = 0
    random_scale: float = 0.1


@dataclass
class TrackingRow:
    step: int
    region: int
    true_apl: float
    surrogate_apl: float


class Penalty:
    """Base penalty: contributes nothing and ignores training events."""

    kind: ClassVar[str] = "none"

    def penalty(self, model: TargetModel, leaves: dict[str, Node]) -> Node:
        return constant(0.0)

    def after_step(self, model: TargetModel, result: StepResult) -> None:
        pass

    def warm_start(self, model_factory: Callable[[int], TargetModel], batch: Batch, seed: int) -> None:
        pass

    @property
    def tracking(self) -> list[TrackingRow]:
        return []

    @property
    def fit_reports(self) -> list[tuple[int, FitReport]]:
        return []


class L1Penalty(Penalty):
    kind = "l1"

    def penalty(self, model: TargetModel, leaves: dict[str, Node]) -> Node:
        return l1(model.regularized_node(leaves))


class L2Penalty(Penalty):
    kind = "l2"

    def penalty(self, model: TargetModel, leaves: dict[str, Node]) -> Node:
        return l2(model.regularized_node(leaves))


def global_tree_penalty(state: SurrogateState, theta: Node) -> Node:
    return surrogate_predict(state, theta)


@dataclass
class RegionalRegState:
    surrogates: list[SurrogateState]
    last_sparsemax: np.ndarray = field(default_factory=lambda: np.zeros(0))
    last_apls: np.ndarray = field(default_factory=lambda: np.zeros(0))


def regional_tree_penalty(
    state: RegionalRegState, theta: Node, mode: str = "l0", normalize: bool = False
) -> Node:
    """Sparsemax-weighted sum of per-region surrogate APLs ("l0"), or their plain sum ("l1")."""
    if mode not in REGIONAL_MODES:
        raise ConfigError(f"unknown regional mode '{mode}'")
    estimates = [surrogate_predict(surrogate, theta) for surrogate in state.surrogates]
    omega = estimates[0] if len(estimates) == 1 else concat(estimates, axis=1)
    state.last_apls = omega.value.ravel().copy()
    if mode == "l1":
        state.last_sparsemax = np.full(omega.shape[1], 1.0 / omega.shape[1])
        return reduce_sum(omega)
    scores = omega
    if normalize:
        scale = float(np.abs(omega.value).max())
        if scale > 0:
            scores = omega * constant(1.0 / scale)
    weights = sparsemax_node(scores)
    state.last_sparsemax = weights.value.ravel().copy()
    return reduce_sum(weights * omega)


class _TreePenalty(Penalty):
    def __init__(
        self,
        reference: TreeReference,
        surrogates: list[SurrogateState],
        schedule: RetrainSchedule,
        augmentation: Augmentation | None = None,
        restarts: int = 0,
        restart_epochs: int = 1,
        sample_every: int = 1,
    ):
        self.reference = reference
        self.surrogates = surrogates
        self.schedule = schedule
        self.augmentation = augmentation or Augmentation()
        self.restarts = restarts
        self.restart_epochs = restart_epochs
        self.sample_every = sample_every
        self._tracking: list[TrackingRow] = []
        self._reports: list[tuple[int, FitReport]] = []

    @property
    def tracking(self) -> list[TrackingRow]:
        return self._tracking

    @property
    def fit_reports(self) -> list[tuple[int, FitReport]]:
        return self._reports

    def _measure(self, model: TargetModel) -> np.ndarray:
        raise NotImplementedError

    def _oracle(self, model: TargetModel, region: int) -> Callable[[np.ndarray], float]:
        raise NotImplementedError

    def _record(self, model: TargetModel, step: int, true_apls: np.ndarray) -> None:
        theta = model.regularized_params().values
        for region, (surrogate, value) in enumerate(zip(self.surrogates, true_apls)):
            estimate = surrogate_value(surrogate, theta)
            record_sample(surrogate, theta, float(value), step)
            self._tracking.append(TrackingRow(step, region, float(value), estimate))

    def _retrain(self, model: TargetModel, step: int) -> None:
        for region, surrogate in enumerate(self.surrogates):
            if surrogate.buffer:
                oracle = self._oracle(model, region)
                try:
                    augment_convex_hull(surrogate, self.augmentation.convex_hull, oracle)
                    augment_random(surrogate, self.augmentation.random, self.augmentation.random_scale, oracle)
                except TreeRegError as error:
                    logger.warning(f"Augmentation failed for region {region} at step {step}: {error}")
                    surrogate.augmented.clear()
            report = retrain_surrogate(surrogate, step)
            if report is not None:
                self._reports.append((region, report))

    def after_step(self, model: TargetModel, result: StepResult) -> None:
        if result.step % self.sample_every == 0:
            true_apls = self._measure(model)
            logger.debug(f"Step {result.step}: true APL {np.round(true_apls, 3).tolist()}")
            self._record(model, result.step, true_apls)
        if self.schedule.due(result):
            self._retrain(model, result.step)

    def warm_start(self, model_factory: Callable[[int], TargetModel], batch: Batch, seed: int) -> None:
        """Seed every surrogate from short unregularized restarts, then fit once."""
        if self.restarts <= 0:
            return
        measured: dict[int, np.ndarray] = {}

        def measure(candidate: TargetModel) -> float:
            apls = self._measure(candidate)
            measured[len(measured)] = apls
            return float(apls.sum())

        samples = restart_samples(
            model_factory, self.restarts, measure, batch, epochs=self.restart_epochs, seed=seed + 1000
        )
        for index, sample in enumerate(samples):
            for surrogate, value in zip(self.surrogates, measured[index]):
                record_sample(surrogate, sample.theta, float(value), 0)
        for region, surrogate in enumerate(self.surrogates):
            report = retrain_surrogate(surrogate, 0)
            if report is not None:
                self._reports.append((region, report))
        logger.info(f"Warm-started {len(self.surrogates)} surrogate(s) from {len(samples)} restart samples")


class GlobalTreePenalty(_TreePenalty):
    kind = "tree-global"

    def __init__(self, reference: TreeReference, surrogate: SurrogateState, schedule: RetrainSchedule, **kwargs):
        super().__init__(reference, [surrogate], schedule, **kwargs)

    @property
    def surrogate(self) -> SurrogateState:
        return self.surrogates[0]

    def penalty(self, model: TargetModel, leaves: dict[str, Node]) -> Node:
        return global_tree_penalty(self.surrogate, model.regularized_node(leaves))

    def _measure(self, model: TargetModel) -> np.ndarray:
        return np.array([self.reference.measure(model)])

    def _oracle(self, model: TargetModel, region: int) -> Callable[[np.ndarray], float]:
        return lambda theta: self.reference.measure(model.with_regularized(theta))


class RegionalTreePenalty(_TreePenalty):
    def __init__(
        self,
        reference: TreeReference,
        surrogates: list[SurrogateState],
        schedule: RetrainSchedule,
        mode: str = "l0",
        normalize: bool = False,
        **kwargs,
    ):
        if mode not in REGIONAL_MODES:
            raise ConfigError(f"unknown regional mode '{mode}'")
        if len(surrogates) != reference.n_regions:
            raise ConfigError(f"{len(surrogates)} surrogates for {reference.n_regions} regions")
        super().__init__(reference, surrogates, schedule, **kwargs)
        self.mode = mode
        self.normalize = normalize
        self.state = RegionalRegState(surrogates)

    @property
    def kind(self) -> str:  # type: ignore[override]
        return f"tree-regional-{self.mode}"

    def penalty(self, model: TargetModel, leaves: dict[str, Node]) -> Node:
        return regional_tree_penalty(self.state, model.regularized_node(leaves), self.mode, self.normalize)

    def _measure(self, model: TargetModel) -> np.ndarray:
        return self.reference.measure_regions(model)

    def _oracle(self, model: TargetModel, region: int) -> Callable[[np.ndarray], float]:
        return lambda theta: self.reference.measure_region(model.with_regularized(theta), region)
