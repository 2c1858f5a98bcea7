from fractions import Fraction
from typing import Optional

from pydantic import BaseModel, Field, model_validator

from src.entity.models import CompanionRecord
from src.schemas.lottery import LotteryModel, MenuModel, Rational
from src.services.random_utility import RCC, RCCRow


def prob_text(value) -> str:
    return str(value) if isinstance(value, Fraction) else repr(float(value))


class RCCEntryModel(BaseModel):
    subset: list[LotteryModel] = Field(min_length=1)
    prob: str
    stderr: Optional[float] = None


class RCCMenuModel(BaseModel):
    menu: MenuModel
    rows: list[RCCEntryModel]


class CompanionModel(BaseModel):
    base: MenuModel
    mixed: MenuModel
    anchor: LotteryModel
    lam: Rational


class RCCModel(BaseModel):
    """
    A random choice table. Probabilities are rational strings when ``exact``
    and decimal strings with a standard error otherwise.
    """
    table: list[RCCMenuModel]
    companions: list[CompanionModel] = []
    exact: bool = True
    samples: int = 0

    @model_validator(mode='before')
    @classmethod
    def bare_list(cls, data):
        if isinstance(data, list):
            return {'table': data}
        return data

    def to_domain(self) -> RCC:
        rcc = RCC(exact=self.exact, samples=self.samples)
        for item in self.table:
            menu = item.menu.to_domain()
            row = RCCRow(menu)
            for entry in item.rows:
                subset = menu.sub(p.to_domain() for p in entry.subset).key
                row.probs[subset] = Fraction(entry.prob) if self.exact else float(entry.prob)
                if entry.stderr is not None:
                    row.stderr[subset] = entry.stderr
            rcc.rows[menu.key] = row
        for c in self.companions:
            rcc.companions.append(CompanionRecord(c.base.to_domain().key, c.mixed.to_domain().key,
                                                  c.anchor.to_domain(), Fraction(c.lam)))
        return rcc

    @classmethod
    def from_domain(cls, rcc: RCC) -> 'RCCModel':
        table = []
        for row in rcc.rows.values():
            entries = []
            for subset in row.menu.subsets():
                prob = row.probs.get(subset.key, Fraction(0))
                entries.append(RCCEntryModel(subset=[LotteryModel.from_domain(p) for p in subset],
                                             prob=prob_text(prob), stderr=row.stderr.get(subset.key)))
            table.append(RCCMenuModel(menu=MenuModel.from_domain(row.menu), rows=entries))
        menus = {row.menu.key: row.menu for row in rcc.rows.values()}
        companions = [CompanionModel(base=MenuModel.from_domain(menus[c.base]),
                                     mixed=MenuModel.from_domain(menus[c.mixed]),
                                     anchor=LotteryModel.from_domain(c.anchor), lam=c.lam)
                      for c in rcc.companions if c.base in menus and c.mixed in menus]
        return cls(table=table, companions=companions, exact=rcc.exact, samples=rcc.samples)
