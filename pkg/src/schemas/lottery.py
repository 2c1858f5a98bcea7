from fractions import Fraction
from typing import Annotated

from pydantic import BaseModel, BeforeValidator, ConfigDict, Field

from src.entity.models import Chart, Lottery, Menu, PrizeRanking


def _rational(value) -> str:
    if isinstance(value, bool):
        raise ValueError('booleans are not coordinates')
    if isinstance(value, (int, Fraction)):
        return str(Fraction(value))
    if isinstance(value, float):
        return str(Fraction(str(value)))
    if isinstance(value, str):
        try:
            return str(Fraction(value.strip()))
        except ValueError:
            raise ValueError(f'not a rational or decimal string: {value!r}')
    raise ValueError(f'unsupported coordinate {value!r}')


Rational = Annotated[str, BeforeValidator(_rational)]


class LotteryModel(BaseModel):
    x: Rational
    y: Rational
    chart: Chart

    model_config = ConfigDict(frozen=True)

    def to_domain(self) -> Lottery:
        return Lottery(Fraction(self.x), Fraction(self.y), self.chart)

    @classmethod
    def from_domain(cls, p: Lottery) -> 'LotteryModel':
        return cls(x=p.x, y=p.y, chart=p.chart)


class MenuModel(BaseModel):
    lotteries: list[LotteryModel] = Field(min_length=1)

    def to_domain(self) -> Menu:
        return Menu(tuple(p.to_domain() for p in self.lotteries))

    @classmethod
    def from_domain(cls, menu: Menu) -> 'MenuModel':
        return cls(lotteries=[LotteryModel.from_domain(p) for p in menu])


class RankingModel(BaseModel):
    best: int = 2
    worst: int = 1
    middle: int = 3

    def to_domain(self) -> PrizeRanking:
        return PrizeRanking(self.best, self.worst, self.middle)
