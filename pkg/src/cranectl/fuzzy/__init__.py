# __init__.py
from cranectl.fuzzy.core import GainScheduler, fuzzify, infer, update_gains
from cranectl.fuzzy.helpers import label_histogram, load_rule_table
from cranectl.fuzzy.model import DEFAULT_RULE_TABLE, FuzzyDomains, FuzzyLabel, FuzzyRuleTable
