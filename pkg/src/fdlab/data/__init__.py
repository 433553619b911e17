"""Bundled reference tables (model sizes, reference backtrack counts,
extended-model variable counts)."""

import json
from importlib import resources

TABLES = ("table2", "table3", "table4")


def load_table(name):
    """Load one bundled table as a dict with 'title', 'columns', 'rows'."""
    if name not in TABLES:
        raise KeyError(f"unknown table {name!r}; choose from {TABLES}")
    text = resources.files(__package__).joinpath(f"{name}.json").read_text()
    return json.loads(text)


def table_rows(name):
    """Rows of one table as dicts keyed by column name."""
    table = load_table(name)
    cols = table["columns"]
    return [dict(zip(cols, row)) for row in table["rows"]]
