"""Verdict and search-budget types shared by every classification rule."""
from __future__ import annotations

import enum
from dataclasses import dataclass

from ..errors import DomainError
from ..qstate import DEFAULT_TOL, PureStateParams


class Status(enum.Enum):
    EA = "EA_certified"
    NOT_EA = "NotEA_certified"
    UNDECIDED = "Undecided"


class Criterion(enum.Enum):
    DEPOLARIZING_PRODUCT = "DepolarizingProduct"
    UNITAL_SUFFICIENT = "UnitalSufficient"
    UNITAL_NECESSARY_2LEA = "UnitalNecessary2LEA"
    DOT_PRODUCT_WITNESS = "DotProductWitness"
    EXTREMAL_RULE = "ExtremalRule"
    GAD_BOUNDARY = "GadBoundary"
    NUMERIC_WITNESS = "NumericWitness"
    NUMERIC_NO_WITNESS = "NumericNoWitness"
    EB_FACTOR = "EBFactor"
    LEMMA1_NUMERIC = "Lemma1Numeric"
    DECOMPOSITION = "Decomposition"


# Whether an EA verdict from the rule rests on an iff theorem or a sufficient condition.
RULE_KIND = {
    Criterion.DEPOLARIZING_PRODUCT: "iff",
    Criterion.UNITAL_NECESSARY_2LEA: "iff",
    Criterion.EXTREMAL_RULE: "iff",
    Criterion.EB_FACTOR: "sufficient",
    Criterion.UNITAL_SUFFICIENT: "sufficient",
    Criterion.DECOMPOSITION: "sufficient",
    Criterion.GAD_BOUNDARY: "sufficient",
    Criterion.DOT_PRODUCT_WITNESS: "witness",
    Criterion.NUMERIC_WITNESS: "witness",
    Criterion.LEMMA1_NUMERIC: "witness",
    Criterion.NUMERIC_NO_WITNESS: "none",
}


@dataclass(frozen=True)
class SearchBudget:
    grid_points_per_axis: int = 9
    refine_cells: int = 20
    refine_iters: int = 200
    restarts: int = 8
    seed: int = 42
    tol: float = DEFAULT_TOL

    def __post_init__(self):
        for name in ("grid_points_per_axis", "refine_cells", "refine_iters", "restarts"):
            if getattr(self, name) <= 0:
                raise DomainError(f"budget field {name} must be positive")
        if self.grid_points_per_axis < 2:
            raise DomainError("budget grid needs at least 2 points per axis")
        if self.tol <= 0:
            raise DomainError("budget tol must be positive")
        if self.seed < 0:
            raise DomainError("budget seed must be non-negative")


DEFAULT_BUDGET = SearchBudget()


@dataclass(frozen=True)
class EaVerdict:
    """Three-valued EA classification with provenance.

    ``min_pt_eig`` is the witness value for NotEA verdicts, and the best
    value reached for numeric Undecided verdicts.
    """

    status: Status
    criterion: Criterion
    witness: PureStateParams | None = None
    min_pt_eig: float | None = None
    note: str = ""

    def __post_init__(self):
        if self.status is Status.NOT_EA and self.witness is None:
            raise DomainError("NotEA verdict requires a witness")
        if self.status is Status.EA and RULE_KIND[self.criterion] not in ("iff", "sufficient"):
            raise DomainError(f"{self.criterion.value} cannot certify EA")

    @property
    def rule_kind(self) -> str:
        return RULE_KIND[self.criterion]

    def to_record(self) -> dict:
        rec = {
            "status": self.status.value,
            "criterion": self.criterion.value,
            "rule_kind": self.rule_kind,
            "witness": self.witness.to_record() if self.witness is not None else None,
            "min_pt_eig": None if self.min_pt_eig is None else float(self.min_pt_eig),
        }
        if self.note:
            rec["note"] = self.note
        return rec


def ea(criterion: Criterion, note: str = "", min_pt_eig: float | None = None) -> EaVerdict:
    return EaVerdict(Status.EA, criterion, None, min_pt_eig, note)


def not_ea(criterion: Criterion, witness: PureStateParams, value: float, note: str = "") -> EaVerdict:
    return EaVerdict(Status.NOT_EA, criterion, witness, float(value), note)


def undecided(criterion: Criterion, value: float | None = None, note: str = "",
              witness: PureStateParams | None = None) -> EaVerdict:
    return EaVerdict(Status.UNDECIDED, criterion, witness, value, note)
