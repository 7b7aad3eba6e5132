"""
Project: cranectl
Module: fuzzy
Created Date: 16 Oct 2026
Author: Noah Keck
:------------------------------------------------------------------------------:
MIT License
Copyright (c) 2026
:------------------------------------------------------------------------------:
"""

from dataclasses import dataclass
from enum import IntEnum

import numpy as np

from cranectl.fuzzy.errors import RuleTableError

OUTPUTS = ("kp", "kd", "kl")


class FuzzyLabel(IntEnum):
    NB = -3
    NM = -2
    NS = -1
    ZE = 0
    PS = 1
    PM = 2
    PB = 3
    
    @property
    def center(self) -> float:
        """Peak of the label on the normalized [-1, 1] axis."""
        return self.value / 3.0
    
    @property
    def index(self) -> int:
        return self.value + 3


LABELS = tuple(FuzzyLabel)
CENTERS = np.array([label.center for label in LABELS])


@dataclass(frozen=True, slots=True)
class FuzzyDomains:
    """Input and output ranges of the tuner. Inputs are clamped into their range before normalization."""
    e_range: tuple[float, float] = (-1.0, 1.0)
    e_dot_range: tuple[float, float] = (-0.5, 0.5)
    dkp_range: tuple[float, float] = (-0.25, 0.25)
    dkd_range: tuple[float, float] = (-10.0, 10.0)
    dkl_range: tuple[float, float] = (-0.05, 0.05)
    
    @property
    def output_ranges(self) -> tuple[tuple[float, float], ...]:
        return (self.dkp_range, self.dkd_range, self.dkl_range)
    
    @staticmethod
    def normalize(value: float, bounds: tuple[float, float]) -> float:
        """Clamps `value` into `bounds` and maps it affinely onto [-1, 1]."""
        lo, hi = bounds
        clamped = min(max(value, lo), hi)
        return 2.0 * (clamped - lo) / (hi - lo) - 1.0
    
    @staticmethod
    def scale(normalized: float, bounds: tuple[float, float]) -> float:
        lo, hi = bounds
        return 0.5 * (lo + hi) + 0.5 * (hi - lo) * normalized


class FuzzyRuleTable:
    """7x7 grid of consequent labels for the (kp, kd, kl) increments.

    Rows are indexed by the label of the error rate e_dot, columns by the label of the position
    error e = x - x_d.
    """
    
    def __init__(self, cells: dict[tuple[FuzzyLabel, FuzzyLabel], tuple[FuzzyLabel, FuzzyLabel, FuzzyLabel]]):
        missing = [(r.name, c.name) for r in LABELS for c in LABELS if (r, c) not in cells]
        if missing:
            raise RuleTableError(f"Rule table is missing {len(missing)} cells, first {missing[0]}")
        
        self._indices = np.zeros((7, 7, 3), dtype=int)
        for (row, col), consequents in cells.items():
            self._indices[row.index, col.index] = [label.index for label in consequents]
        self._indices.setflags(write=False)
    
    def __eq__(self, other):
        if isinstance(other, FuzzyRuleTable):
            return bool(np.array_equal(self._indices, other._indices))
        return NotImplemented
    
    def __getitem__(self, key: tuple[FuzzyLabel, FuzzyLabel]) -> tuple[FuzzyLabel, FuzzyLabel, FuzzyLabel]:
        row, col = key
        return tuple(LABELS[i] for i in self._indices[row.index, col.index])
    
    @property
    def indices(self) -> np.ndarray:
        """Read-only (7, 7, 3) array of label indices 0..6 (NB..PB)."""
        return self._indices
    
    def cells(self):
        for row in LABELS:
            for col in LABELS:
                yield row, col, self[row, col]
    
    def transposed(self) -> "FuzzyRuleTable":
        return FuzzyRuleTable({(col, row): consequents for row, col, consequents in self.cells()})
    
    @classmethod
    def from_grid_text(cls, text: str) -> "FuzzyRuleTable":
        """Parses the compact grid form: one "ROW: KP/KD/KL ..." line per e_dot label, columns NB..PB."""
        cells = {}
        rows = [line for line in text.strip().splitlines() if line.strip()]
        if len(rows) != 7:
            raise RuleTableError(f"Expected 7 grid rows, found {len(rows)}")
        for lineno, line in enumerate(rows, start=1):
            try:
                head, body = line.split(":", 1)
                row = FuzzyLabel[head.strip()]
                entries = body.split()
                if len(entries) != 7:
                    raise RuleTableError(f"Expected 7 cells in row {row.name}, found {len(entries)}", lineno)
                for col, entry in zip(LABELS, entries):
                    consequents = tuple(FuzzyLabel[name] for name in entry.split("/"))
                    if len(consequents) != 3:
                        raise RuleTableError(f"Cell {row.name}/{col.name} needs 3 labels, got '{entry}'", lineno)
                    cells[(row, col)] = consequents
            except (KeyError, ValueError) as err:
                raise RuleTableError(f"Malformed grid row '{line.strip()}': {err}", lineno) from err
        return cls(cells)


DEFAULT_TABLE_TEXT = """
NB: PB/PS/NB PB/PS/NB PM/ZE/PB PM/ZE/ZE PS/ZE/PB PS/PB/NB ZE/PB/NB
NM: PB/NS/NB PB/NS/NB PM/NS/PB PM/NS/ZE PS/ZE/PB ZE/NS/NB ZE/PM/NB
NS: PM/NB/NB PM/NB/NB PM/NM/PB PS/NS/ZE ZE/ZE/PB NS/PS/NB NM/PM/NB
ZE: PM/NB/NB PS/NM/NB PS/NM/PB ZE/NS/ZE NS/ZE/PB NM/PS/NB NM/PM/NB
PS: PS/NB/NB PS/NM/NB ZE/NS/PB NS/NS/ZE NS/ZE/PB NM/PS/NB NM/PS/NB
PM: ZE/NM/NB ZE/NS/NB NS/NS/PB NM/NS/ZE NM/ZE/PB NM/PS/NB NB/PS/NB
PB: ZE/PS/NB NS/ZE/NB NS/ZE/PB NM/ZE/ZE NM/ZE/PB NB/PB/NB NB/PB/NB
"""

DEFAULT_RULE_TABLE = FuzzyRuleTable.from_grid_text(DEFAULT_TABLE_TEXT)
