"""Access to the embedded golden tables used by --check-paper diffs."""

from __future__ import annotations

import json
from functools import lru_cache
from importlib import resources

DATA_VERSION = 1


@lru_cache(maxsize=None)
def load() -> dict:
    text = resources.files("bibrace").joinpath("data/paper_tables.json").read_text()
    data = json.loads(text)
    if data.get("version") != DATA_VERSION:
        raise RuntimeError(
            f"embedded table data version {data.get('version')} != {DATA_VERSION}"
        )
    return data


def table1_rows() -> list[dict]:
    return load()["table1"]


def table1_map() -> dict[tuple[int, int], dict]:
    return {(r["m"], r["d"]): r for r in table1_rows()}


def table2_map() -> dict[tuple[int, int], tuple[int, int]]:
    return {(r["m"], r["d"]): (r["classes"], r["primitive"]) for r in load()["table2"]}


def census_m6_rows(include_degenerate: bool = True) -> list[dict]:
    data = load()
    rows = list(data["table3_nondegenerate_m6"])
    if include_degenerate:
        rows += data["table4_degenerate_m6"]
    return rows


def aggregates() -> dict:
    return load()["aggregates"]


def table4_note() -> str:
    return load()["table4_known_discrepancy"]
