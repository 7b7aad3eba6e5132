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

from pathlib import Path

import numpy as np

from cranectl.fuzzy.errors import RuleTableError
from cranectl.fuzzy.model import LABELS, OUTPUTS, FuzzyLabel, FuzzyRuleTable


def parse_rule_table(text: str) -> FuzzyRuleTable:
    """Parses the override format: one "ROW COL KP KD KL" line of labels per cell.

    Blank lines and lines starting with '#' are ignored. All 49 cells must appear exactly once.

    Args:
        text (str): The file contents.

    Raises:
        RuleTableError: A line is malformed, names an unknown label, repeats a cell, or cells are missing.

    Returns:
        FuzzyRuleTable: The parsed table.
    """
    cells = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        
        tokens = line.split()
        if len(tokens) != 5:
            raise RuleTableError(f"Expected 'row col Kp Kd Kl', got {len(tokens)} fields", lineno)
        try:
            row, col, *consequents = (FuzzyLabel[token.upper()] for token in tokens)
        except KeyError as err:
            raise RuleTableError(f"Unknown label {err}, expected one of {[l.name for l in LABELS]}", lineno) from err
        if (row, col) in cells:
            raise RuleTableError(f"Duplicate cell {row.name} {col.name}", lineno)
        cells[(row, col)] = tuple(consequents)
    
    if len(cells) != len(LABELS) ** 2:
        raise RuleTableError(f"Expected {len(LABELS) ** 2} cells, found {len(cells)}")
    return FuzzyRuleTable(cells)


def load_rule_table(path: Path | str) -> FuzzyRuleTable:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as err:
        raise RuleTableError(f"Unable to read rule table {path}: {err}") from err
    return parse_rule_table(text)


def format_rule_table(table: FuzzyRuleTable) -> str:
    """Writes a table in the override format accepted by parse_rule_table."""
    lines = ["# row(e_dot) col(e) Kp Kd Kl"]
    for row, col, consequents in table.cells():
        lines.append(" ".join(label.name for label in (row, col, *consequents)))
    return "\n".join(lines) + "\n"


def label_histogram(table: FuzzyRuleTable) -> dict[str, list[int]]:
    """Counts how often each label NB..PB appears as the consequent of each output.

    Returns:
        dict[str, list[int]]: Seven counts per output name ("kp", "kd", "kl").
    """
    return {
        name: np.bincount(table.indices[:, :, k].ravel(), minlength=len(LABELS)).tolist()
        for k, name in enumerate(OUTPUTS)
    }
