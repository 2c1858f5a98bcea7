from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from itertools import combinations
from typing import Iterator, Union

from src.services.exceptions import InvalidLotteryError, InvalidMenuError

Number = Union[Fraction, float]
Point = tuple

FLOAT_SLACK = 1e-12


class Chart(str, Enum):
    MM = 'MM'
    SLOPE = 'SLOPE'


def as_number(value) -> Number:
    """
    Normalises a coordinate: ints and rational strings become Fraction, floats stay floats.

    :param value: int | Fraction | float | str: Raw coordinate
    :return: The coordinate as Fraction or float
    """
    if isinstance(value, bool):
        raise InvalidLotteryError(f'Boolean is not a coordinate: {value!r}')
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        return value
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except ValueError as err:
            raise InvalidLotteryError(f'Not a rational or decimal string: {value!r}') from err
    raise InvalidLotteryError(f'Unsupported coordinate type: {type(value).__name__}')


def _leq(a, b) -> bool:
    if isinstance(a, float) or isinstance(b, float):
        return a <= b + FLOAT_SLACK
    return a <= b


@dataclass(frozen=True)
class Lottery:
    x: Number
    y: Number
    chart: Chart = Chart.MM

    def __post_init__(self):
        object.__setattr__(self, 'x', as_number(self.x))
        object.__setattr__(self, 'y', as_number(self.y))
        object.__setattr__(self, 'chart', Chart(self.chart))
        if not self.inside():
            raise InvalidLotteryError(f'({self.x}, {self.y}) is outside the {self.chart.value} simplex')

    def inside(self) -> bool:
        x, y = self.x, self.y
        if self.chart is Chart.MM:
            return _leq(0, x) and _leq(0, y) and _leq(x + y, 1)
        return _leq(x, 0) and _leq(y, 1 + x) and _leq(-1 - x, y)

    @property
    def point(self) -> Point:
        return (self.x, self.y)

    @property
    def exact(self) -> bool:
        return isinstance(self.x, Fraction) and isinstance(self.y, Fraction)

    def mix(self, other: Lottery, lam) -> Lottery:
        """
        The mixture lam*self + (1-lam)*other.

        :param other: Lottery: Second component, same chart
        :param lam: Number: Weight of self, in [0, 1]
        :return: Lottery
        """
        if other.chart is not self.chart:
            raise InvalidLotteryError('Cannot mix lotteries drawn in different charts')
        lam = as_number(lam)
        return Lottery(lam * self.x + (1 - lam) * other.x, lam * self.y + (1 - lam) * other.y, self.chart)

    def __str__(self):
        return f'({self.x}, {self.y})'


@dataclass(frozen=True)
class Menu:
    lotteries: tuple[Lottery, ...]

    def __post_init__(self):
        lotteries = tuple(self.lotteries)
        object.__setattr__(self, 'lotteries', lotteries)
        if not lotteries:
            raise InvalidMenuError('A menu must be nonempty')
        if len(set(lotteries)) != len(lotteries):
            raise InvalidMenuError('A menu cannot contain the same lottery twice')
        if len({lottery.chart for lottery in lotteries}) > 1:
            raise InvalidMenuError('All lotteries of a menu must share one chart')

    @classmethod
    def of(cls, *points) -> Menu:
        return cls(tuple(p if isinstance(p, Lottery) else Lottery(*p) for p in points))

    def __iter__(self) -> Iterator[Lottery]:
        return iter(self.lotteries)

    def __len__(self):
        return len(self.lotteries)

    def __contains__(self, item):
        return item in self.lotteries

    @property
    def key(self) -> frozenset:
        return frozenset(self.lotteries)

    def sub(self, members) -> Menu:
        """
        The sub-menu holding ``members`` in this menu's order.

        :param members: iterable of Lottery: Must all belong to the menu
        :return: Menu
        """
        members = set(members)
        if not members <= set(self.lotteries):
            raise InvalidMenuError('Subset is not contained in the menu')
        return Menu(tuple(lottery for lottery in self.lotteries if lottery in members))

    def without(self, removed) -> Menu:
        removed = set(removed)
        return Menu(tuple(lottery for lottery in self.lotteries if lottery not in removed))

    def subsets(self) -> list[Menu]:
        """
        All nonempty sub-menus, smallest first.
        """
        return [Menu(combo) for size in range(1, len(self) + 1) for combo in combinations(self.lotteries, size)]

    def __str__(self):
        return '{' + ', '.join(str(lottery) for lottery in self.lotteries) + '}'


@dataclass(frozen=True)
class PrizeRanking:
    """
    Roles of the three prizes, numbered 1..3 as w1, w2, w3 of the MM chart.
    """
    best: int = 2
    worst: int = 1
    middle: int = 3

    def __post_init__(self):
        if sorted((self.best, self.worst, self.middle)) != [1, 2, 3]:
            raise InvalidLotteryError('Prize ranking must be a permutation of the prizes 1, 2, 3')


@dataclass(frozen=True)
class HalfPlane:
    a: Point
    b: Point
    side: int = 1

    def __post_init__(self):
        a = tuple(as_number(v) for v in self.a)
        b = tuple(as_number(v) for v in self.b)
        object.__setattr__(self, 'a', a)
        object.__setattr__(self, 'b', b)
        if a == b:
            raise InvalidLotteryError('A half-plane needs two distinct points on its boundary line')
        if self.side not in (1, -1):
            raise InvalidLotteryError('Half-plane side must be +1 or -1')

    def flipped(self) -> HalfPlane:
        return HalfPlane(self.a, self.b, -self.side)


@dataclass
class CompanionRecord:
    base: frozenset
    mixed: frozenset
    anchor: Lottery
    lam: Fraction


@dataclass
class MenuFamily:
    menus: list[Menu] = field(default_factory=list)
    companions: list[CompanionRecord] = field(default_factory=list)
