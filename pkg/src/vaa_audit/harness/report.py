"""Accuracy reports grouped by party, country, euro-group or setting.

Group accuracies are unweighted means of the member parties' accuracies,
the way the per-country "Avg." rows are built; counts are plain sums.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from vaa_audit.dataset import COUNTRY_CODES, Party
from vaa_audit.parties import EURO_PARTIES, UNAFFILIATED
from vaa_audit.prompting import Setting
from vaa_audit.scoring import AuditRecord

DIMENSIONS = ("party", "country", "euro_group", "setting_cross")
FORMATS = {"table-text": ".txt", "delimited-values": ".csv", "structured-records": ".json"}
ALL = "all"


class ReportError(RuntimeError):
    pass


@dataclass(frozen=True)
class Cell:
    accuracy: float | None
    scorable_count: int
    excluded_count: int
    unparsed_count: int
    members: int = 1


@dataclass
class Report:
    dimension: str
    groups: tuple[str, ...]
    settings: tuple[str, ...]
    cells: dict[tuple[str, str], Cell]
    metadata: dict = field(default_factory=dict)
    parties: dict[str, Party] = field(default_factory=dict, repr=False)

    def cell(self, group: str, setting: str) -> Cell | None:
        return self.cells.get((group, setting))


def party_cell(records: Sequence[AuditRecord]) -> Cell:
    scorable = [r.matched for r in records if r.matched is not None]
    return Cell(
        accuracy=sum(scorable) / len(scorable) if scorable else None,
        scorable_count=len(scorable),
        excluded_count=sum(1 for r in records if r.excluded_reason is not None),
        unparsed_count=sum(1 for r in records if r.unparsed),
    )


def mean_cell(cells: Iterable[Cell]) -> Cell:
    cells = list(cells)
    accs = [c.accuracy for c in cells if c.accuracy is not None]
    return Cell(
        accuracy=sum(accs) / len(accs) if accs else None,
        scorable_count=sum(c.scorable_count for c in cells),
        excluded_count=sum(c.excluded_count for c in cells),
        unparsed_count=sum(c.unparsed_count for c in cells),
        members=len(accs),
    )


def _setting_order(values: Iterable[str]) -> tuple[str, ...]:
    order = [s.value for s in Setting]
    return tuple(sorted(set(values), key=lambda v: (order.index(v) if v in order else len(order), v)))


def _party_order(p: Party) -> tuple:
    country = COUNTRY_CODES.index(p.country_code) if p.country_code in COUNTRY_CODES else len(COUNTRY_CODES)
    euro = EURO_PARTIES.index(p.euro_party) if p.euro_party in EURO_PARTIES else len(EURO_PARTIES)
    return (country, euro, p.key)


def _group_of(party: Party, dimension: str) -> str:
    if dimension == "party":
        return party.key
    if dimension == "country":
        return party.country_code
    if dimension == "euro_group":
        return party.euro_group or UNAFFILIATED
    return ALL


def _group_order(groups: Iterable[str], dimension: str) -> tuple[str, ...]:
    if dimension == "country":
        ranks = {c: i for i, c in enumerate(COUNTRY_CODES)}
    elif dimension == "euro_group":
        ranks = {e: i for i, e in enumerate(EURO_PARTIES)}
    else:
        ranks = {}
    return tuple(sorted(set(groups), key=lambda g: (ranks.get(g, len(ranks)), g == UNAFFILIATED, g)))


def aggregate(
    records: Sequence[AuditRecord],
    dimension: str,
    parties: Mapping[str, Party] | Sequence[Party],
    metadata: dict | None = None,
) -> Report:
    if dimension not in DIMENSIONS:
        raise ValueError(f"unknown dimension {dimension!r}; expected one of {', '.join(DIMENSIONS)}")
    registry = dict(parties) if isinstance(parties, Mapping) else {p.key: p for p in parties}
    missing = sorted({r.party for r in records} - registry.keys())
    if missing:
        raise ValueError(f"records reference parties missing from the registry: {missing}")

    by_party: dict[tuple[str, str], list[AuditRecord]] = {}
    for r in records:
        by_party.setdefault((r.party, r.setting), []).append(r)
    party_cells = {key: party_cell(rs) for key, rs in by_party.items()}
    settings = _setting_order(s for _, s in by_party)
    involved = {registry[p] for p, _ in by_party}

    if dimension == "party":
        groups = tuple(p.key for p in sorted(involved, key=_party_order))
        cells = party_cells
    else:
        members: dict[str, list[Party]] = {}
        for p in involved:
            members.setdefault(_group_of(p, dimension), []).append(p)
        groups = _group_order(members, dimension)
        cells = {}
        for g in groups:
            for s in settings:
                member_cells = [party_cells[(p.key, s)] for p in members[g] if (p.key, s) in party_cells]
                if member_cells:
                    cells[(g, s)] = mean_cell(member_cells)

    return Report(
        dimension=dimension,
        groups=groups,
        settings=settings,
        cells=cells,
        metadata=dict(metadata or {}),
        parties={p.key: p for p in involved},
    )


def _pct(cell: Cell | None) -> str:
    if cell is None or cell.accuracy is None:
        return "-"
    return f"{100 * cell.accuracy:.1f}"


def _labels(settings: Sequence[str]) -> list[str]:
    return [Setting(s).label if s in Setting._value2member_map_ else s for s in settings]


def _grid(header: list[str], rows: list[list[str]]) -> list[str]:
    widths = [max(len(r[i]) for r in [header, *rows]) for i in range(len(header))]

    def line(cells):
        return " | ".join(c.ljust(w) for c, w in zip(cells, widths)).rstrip()

    return [line(header), "-+-".join("-" * w for w in widths), *(line(r) for r in rows)]


def render_table(report: Report) -> str:
    labels = _labels(report.settings)
    out = [f"Accuracy (%) by {report.dimension}"]
    for key in ("model_id", "config_digest"):
        if key in report.metadata:
            out.append(f"{key}: {report.metadata[key]}")
    out.append("")

    if report.dimension != "party":
        rows = [[g] + [_pct(report.cell(g, s)) for s in report.settings] for g in report.groups]
        out += _grid([report.dimension.replace("_", "-").capitalize()] + labels, rows)
        return "\n".join(out) + "\n"

    by_country: dict[str, list[Party]] = {}
    for key in report.groups:
        p = report.parties[key]
        by_country.setdefault(p.country_code, []).append(p)
    for country in sorted(by_country, key=lambda c: COUNTRY_CODES.index(c) if c in COUNTRY_CODES else 99):
        members = by_country[country]
        rows = []
        for euro in EURO_PARTIES:
            aligned = [p for p in members if p.euro_party == euro]
            if not aligned:
                rows.append([euro, "-"] + ["-"] * len(labels))
            for p in aligned:
                rows.append([euro, p.key] + [_pct(report.cell(p.key, s)) for s in report.settings])
        for p in members:
            if p.euro_party not in EURO_PARTIES:
                rows.append(["-", p.key] + [_pct(report.cell(p.key, s)) for s in report.settings])
        avg = [
            _pct(mean_cell(report.cells[(p.key, s)] for p in members if (p.key, s) in report.cells))
            for s in report.settings
        ]
        rows.append(["Avg.", ""] + avg)
        out.append(country)
        out += _grid(["Euro-party", "Party"] + labels, rows)
        out.append("")
    return "\n".join(out)


def render_csv(report: Report) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["dimension", "group", "setting", "accuracy", "scorable_count", "excluded_count", "unparsed_count"])
    for g in report.groups:
        for s in report.settings:
            c = report.cell(g, s)
            if c is None:
                continue
            acc = "" if c.accuracy is None else f"{c.accuracy:.6f}"
            w.writerow([report.dimension, g, s, acc, c.scorable_count, c.excluded_count, c.unparsed_count])
    return buf.getvalue()


def render_json(report: Report) -> str:
    cells = []
    for g in report.groups:
        for s in report.settings:
            c = report.cell(g, s)
            if c is not None:
                cells.append(
                    {
                        "group": g,
                        "setting": s,
                        "accuracy": c.accuracy,
                        "scorable_count": c.scorable_count,
                        "excluded_count": c.excluded_count,
                        "unparsed_count": c.unparsed_count,
                    }
                )
    body = {"dimension": report.dimension, "metadata": report.metadata, "settings": list(report.settings), "cells": cells}
    return json.dumps(body, ensure_ascii=False, indent=2, sort_keys=True) + "\n"


_RENDERERS = {"table-text": render_table, "delimited-values": render_csv, "structured-records": render_json}


def emit_report(report: Report, fmt: str, out_dir: str | Path, stem: str | None = None) -> Path:
    """Write ``report`` as ``<stem><ext>`` in ``out_dir`` and return the path."""
    if fmt not in _RENDERERS:
        raise ValueError(f"unknown report format {fmt!r}; expected one of {', '.join(FORMATS)}")
    if not report.cells:
        raise ReportError("report has no cells")
    path = Path(out_dir) / f"{stem or 'report_' + report.dimension}{FORMATS[fmt]}"
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("w", encoding="utf-8", newline="\n") as f:
            f.write(_RENDERERS[fmt](report))
    except OSError as e:
        raise ReportError(f"cannot write report to {path}: {e}") from e
    return path
