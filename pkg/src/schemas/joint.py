from typing import Optional

from pydantic import BaseModel, Field, field_validator, model_validator

from src.schemas.lottery import LotteryModel, MenuModel
from src.services.joint_choice import BinaryEvent, Decomposition, Relation

ASCII_RELATIONS = {'>': Relation.STRICT, '>=': Relation.WEAK, '~': Relation.INDIFFERENT}


class BinaryEventModel(BaseModel):
    p: LotteryModel
    q: LotteryModel
    relation: Relation = Relation.STRICT

    @field_validator('relation', mode='before')
    @classmethod
    def ascii_relation(cls, value):
        return ASCII_RELATIONS.get(value, value)

    def to_domain(self) -> BinaryEvent:
        return BinaryEvent(self.p.to_domain(), self.q.to_domain(), self.relation)

    @classmethod
    def from_domain(cls, e: BinaryEvent) -> 'BinaryEventModel':
        return cls(p=LotteryModel.from_domain(e.p), q=LotteryModel.from_domain(e.q), relation=e.relation)


class EventsModel(BaseModel):
    events: list[BinaryEventModel] = Field(min_length=1)

    @model_validator(mode='before')
    @classmethod
    def bare_list(cls, data):
        if isinstance(data, list):
            return {'events': data}
        return data

    def to_domain(self) -> list[BinaryEvent]:
        return [e.to_domain() for e in self.events]


class ChoiceEventModel(BaseModel):
    menu: MenuModel
    chosen: list[LotteryModel] = Field(min_length=1)


class JointRowModel(BaseModel):
    events: list[ChoiceEventModel]
    prob: str
    stderr: float = 0.0


class CellModel(BaseModel):
    events: list[BinaryEventModel]
    prob: Optional[str] = None


class OracleModel(BaseModel):
    samples: int
    fired: int
    mismatches: int
    double_fires: int
    double_fires_off_witness: int


class DecompositionModel(BaseModel):
    events: list[BinaryEventModel]
    cells: list[CellModel]
    tie_overlap_witnesses: list[tuple[LotteryModel, LotteryModel]]
    case: str
    path: list[str]
    oracle: Optional[OracleModel] = None
    joint: list[JointRowModel] = []

    @classmethod
    def from_domain(cls, d: Decomposition, oracle: dict | None = None) -> 'DecompositionModel':
        return cls(events=[BinaryEventModel.from_domain(e) for e in d.events],
                   cells=[CellModel(events=[BinaryEventModel.from_domain(e) for e in cell.events]) for cell in d.cells],
                   tie_overlap_witnesses=[(LotteryModel.from_domain(r), LotteryModel.from_domain(s))
                                          for r, s in d.tie_overlap_witnesses],
                   case=d.case, path=list(d.path), oracle=OracleModel(**oracle) if oracle else None)
