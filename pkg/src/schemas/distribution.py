from fractions import Fraction
from typing import Annotated, Literal, Optional, Union

from pydantic import BaseModel, Field, TypeAdapter

from src.schemas.lottery import Rational, RankingModel
from src.schemas.preference import (
    EUModel,
    ImplicitModel,
    PreferenceSpec,
    SemiWeightedModel,
    WUFunctionalModel,
    WUPivotModel,
)
from src.services.identification import FiniteSlopeLaw, UniformSlopeLaw
from src.services.random_utility import (
    FiniteMixture,
    SlopePair,
    UniformEU,
    example_mu,
    example_mu_prime,
    nu1,
    nu2,
)


class AtomModel(BaseModel):
    m0: Rational
    m1: Rational
    weight: Rational


class FiniteSlopeLawModel(BaseModel):
    kind: Literal['finite'] = 'finite'
    atoms: list[AtomModel] = Field(min_length=1)

    def to_domain(self) -> FiniteSlopeLaw:
        return FiniteSlopeLaw(tuple(((Fraction(a.m0), Fraction(a.m1)), Fraction(a.weight)) for a in self.atoms))


class UniformSlopeLawModel(BaseModel):
    kind: Literal['uniform'] = 'uniform'

    def to_domain(self) -> UniformSlopeLaw:
        return UniformSlopeLaw()


SlopeLawSpec = Annotated[Union[FiniteSlopeLawModel, UniformSlopeLawModel], Field(discriminator='kind')]

slope_law_adapter = TypeAdapter(SlopeLawSpec)


class ComponentModel(BaseModel):
    preference: PreferenceSpec
    weight: Rational


class FiniteMixtureModel(BaseModel):
    kind: Literal['finite_mixture'] = 'finite_mixture'
    components: list[ComponentModel] = Field(min_length=1)

    def to_domain(self) -> FiniteMixture:
        return FiniteMixture(tuple((c.preference.to_domain(), Fraction(c.weight)) for c in self.components))


class CircleRWUModel(BaseModel):
    kind: Literal['circle_rwu'] = 'circle_rwu'
    center: Optional[tuple[float, float]] = None
    radius: Optional[float] = None

    def to_domain(self):
        return nu1(self.radius, self.center)


class UniformEUModel(BaseModel):
    kind: Literal['uniform_eu'] = 'uniform_eu'

    def to_domain(self) -> UniformEU:
        return nu2()


class SlopePairModel(BaseModel):
    kind: Literal['slope_pair'] = 'slope_pair'
    law: SlopeLawSpec
    ranking: RankingModel = RankingModel()

    def to_domain(self) -> SlopePair:
        return SlopePair(self.law.to_domain(), self.ranking.to_domain())


class NamedModel(BaseModel):
    """
    One of the built-in laws: the two weighted utility mixtures, the circle law or uniform EU.
    """
    kind: Literal['named'] = 'named'
    name: Literal['mu', 'mu_prime', 'nu1', 'nu2']

    def to_domain(self):
        return {'mu': example_mu, 'mu_prime': example_mu_prime, 'nu1': nu1, 'nu2': nu2}[self.name]()


DistributionSpec = Annotated[
    Union[FiniteMixtureModel, CircleRWUModel, UniformEUModel, SlopePairModel, NamedModel],
    Field(discriminator='kind'),
]

distribution_adapter = TypeAdapter(DistributionSpec)

RenderSpec = Annotated[
    Union[EUModel, WUPivotModel, WUFunctionalModel, SemiWeightedModel, ImplicitModel,
          FiniteMixtureModel, CircleRWUModel, UniformEUModel, SlopePairModel, NamedModel],
    Field(discriminator='kind'),
]

render_adapter = TypeAdapter(RenderSpec)
