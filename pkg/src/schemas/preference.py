from fractions import Fraction
from typing import Annotated, Literal, Optional, Union

from pydantic import BaseModel, Field, TypeAdapter

from src.schemas.lottery import Rational, RankingModel
from src.services.preferences import (
    EUPreference,
    ImplicitBetweenness,
    Orientation,
    SemiWeightedPreference,
    WUFunctional,
    WUPreference,
)


def _numbers(values) -> tuple:
    return tuple(Fraction(v) for v in values)


class EUModel(BaseModel):
    kind: Literal['eu'] = 'eu'
    direction: list[Rational] = Field(min_length=2, max_length=2)

    def to_domain(self) -> EUPreference:
        return EUPreference(_numbers(self.direction))


class WUPivotModel(BaseModel):
    kind: Literal['wu_pivot'] = 'wu_pivot'
    pivot: list[Rational] = Field(min_length=2, max_length=2)
    orientation: Literal['clockwise', 'counterclockwise']

    def to_domain(self) -> WUPreference:
        return WUPreference(_numbers(self.pivot), Orientation[self.orientation.upper()])


class WUFunctionalModel(BaseModel):
    kind: Literal['wu_functional'] = 'wu_functional'
    u: list[Rational] = Field(min_length=3, max_length=3)
    g: list[Rational] = Field(min_length=3, max_length=3)

    def to_domain(self) -> WUFunctional:
        return WUFunctional(_numbers(self.u), _numbers(self.g))


class SemiWeightedModel(BaseModel):
    kind: Literal['semi_weighted'] = 'semi_weighted'
    upper: WUFunctionalModel
    lower: WUFunctionalModel
    threshold: Rational

    def to_domain(self) -> SemiWeightedPreference:
        return SemiWeightedPreference(self.upper.to_domain(), self.lower.to_domain(), Fraction(self.threshold))


class ImplicitModel(BaseModel):
    """
    Implicit betweenness given either by a weighted utility functional or by
    prize utilities that do not depend on the value level (expected utility).
    """
    kind: Literal['implicit'] = 'implicit'
    weighted: Optional[WUFunctionalModel] = None
    utilities: Optional[list[Rational]] = Field(default=None, min_length=3, max_length=3)
    ranking: RankingModel = RankingModel()

    def to_domain(self) -> ImplicitBetweenness:
        ranking = self.ranking.to_domain()
        if self.weighted is not None:
            return ImplicitBetweenness.from_weighted(self.weighted.to_domain(), ranking)
        if self.utilities is None:
            raise ValueError('implicit preference needs "weighted" or "utilities"')
        u = [float(Fraction(v)) for v in self.utilities]
        return ImplicitBetweenness(lambda prize, v: u[prize - 1], ranking)


PreferenceSpec = Annotated[
    Union[EUModel, WUPivotModel, WUFunctionalModel, SemiWeightedModel, ImplicitModel],
    Field(discriminator='kind'),
]

preference_adapter = TypeAdapter(PreferenceSpec)
