"""Roll call data: loading, encoding and filtering.

Votes are encoded yea = +1, nay = -1, and 0 for anything else (absent,
present, not voting). Rows are legislators, columns are roll call votes.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

import numpy as np


class VoteDataError(ValueError):
    """Raised for malformed or unusable roll call input."""


@dataclass(frozen=True)
class Legislator:
    id: str
    name: str = ""
    party: str = ""
    region: Optional[str] = None


@dataclass(frozen=True)
class VoteMatrix:
    """An n x m roll call matrix with entries in {+1, 0, -1}.

    Parameters
    ----------
    legislators : sequence of Legislator
        One per row, in row order. Ids must be unique.
    vote_ids : sequence of str
        One per column.
    values : array_like, shape (n, m)
        Integer vote codes.
    """

    legislators: tuple
    vote_ids: tuple
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        legs = tuple(self.legislators)
        vids = tuple(str(v) for v in self.vote_ids)
        vals = np.array(self.values, dtype=np.int8, copy=True)
        if vals.ndim != 2:
            raise VoteDataError("vote values must be a 2-D array")
        if vals.shape != (len(legs), len(vids)):
            raise VoteDataError(
                f"values shape {vals.shape} does not match "
                f"{len(legs)} legislators x {len(vids)} votes"
            )
        if not np.isin(vals, (-1, 0, 1)).all():
            raise VoteDataError("vote values must be in {+1, 0, -1}")
        ids = [leg.id for leg in legs]
        if len(set(ids)) != len(ids):
            raise VoteDataError("legislator ids must be unique")
        vals.setflags(write=False)
        object.__setattr__(self, "legislators", legs)
        object.__setattr__(self, "vote_ids", vids)
        object.__setattr__(self, "values", vals)

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def m(self) -> int:
        return self.values.shape[1]

    @property
    def ids(self) -> list:
        return [leg.id for leg in self.legislators]

    @property
    def parties(self) -> list:
        return [leg.party for leg in self.legislators]

    def as_float(self) -> np.ndarray:
        return self.values.astype(np.float64)

    def take_votes(self, columns) -> "VoteMatrix":
        columns = np.asarray(columns, dtype=int)
        return VoteMatrix(
            self.legislators,
            [self.vote_ids[j] for j in columns],
            self.values[:, columns],
        )

    def __eq__(self, other):
        if not isinstance(other, VoteMatrix):
            return NotImplemented
        return (
            self.legislators == other.legislators
            and self.vote_ids == other.vote_ids
            and np.array_equal(self.values, other.values)
        )

    __hash__ = None


def from_array(values, party=None, region=None, vote_ids=None, ids=None) -> VoteMatrix:
    """Build a VoteMatrix from a bare array, generating ids where missing."""
    values = np.asarray(values)
    n, m = values.shape
    ids = ids if ids is not None else [f"L{i}" for i in range(n)]
    party = party if party is not None else [""] * n
    region = region if region is not None else [None] * n
    legs = [
        Legislator(str(ids[i]), str(ids[i]), str(party[i]),
                   None if region[i] is None else str(region[i]))
        for i in range(n)
    ]
    vote_ids = vote_ids if vote_ids is not None else [f"v{j + 1}" for j in range(m)]
    return VoteMatrix(legs, vote_ids, values)


_FIXED_COLUMNS = ("id", "name", "party", "region")


def load_wide_csv(path) -> VoteMatrix:
    """Read the wide format: ``id,name,party,region,v1..vm``, one row per legislator."""
    path = Path(path)
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise VoteDataError(f"{path}: empty file") from None
        header = [h.strip() for h in header]
        if tuple(header[:4]) != _FIXED_COLUMNS:
            raise VoteDataError(
                f"{path}: header must start with id,name,party,region; got {header[:4]}"
            )
        vote_ids = header[4:]
        if not vote_ids:
            raise VoteDataError(f"{path}: no votes")

        legs, rows, seen = [], [], {}
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != len(header):
                raise VoteDataError(
                    f"{path}: row {lineno} has {len(row)} fields, expected {len(header)}"
                )
            leg_id = row[0].strip()
            if leg_id in seen:
                raise VoteDataError(
                    f"{path}: row {lineno} duplicate id {leg_id!r} (first at row {seen[leg_id]})"
                )
            seen[leg_id] = lineno
            votes = []
            for col, cell in enumerate(row[4:]):
                cell = cell.strip()
                if cell not in ("1", "0", "-1", "+1"):
                    raise VoteDataError(
                        f"{path}: row {lineno}, column {header[4 + col]!r}: "
                        f"invalid vote value {cell!r}"
                    )
                votes.append(int(cell))
            region = row[3].strip() or None
            legs.append(Legislator(leg_id, row[1], row[2].strip(), region))
            rows.append(votes)

    values = np.array(rows, dtype=np.int8).reshape(len(rows), len(vote_ids))
    return VoteMatrix(legs, vote_ids, values)


def write_wide_csv(v: VoteMatrix, path) -> None:
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(list(_FIXED_COLUMNS) + list(v.vote_ids))
        for leg, row in zip(v.legislators, v.values):
            writer.writerow(
                [leg.id, leg.name, leg.party, leg.region or ""] + [int(x) for x in row]
            )


# Voteview cast codes: 1-3 yea (yea, paired yea, announced yea),
# 4-6 nay (announced nay, paired nay, nay); 0 and 7-9 are not-member,
# present and not-voting.
CAST_CODE_MAP = {1: 1, 2: 1, 3: 1, 4: -1, 5: -1, 6: -1}


def cast_code_to_vote(code: int) -> int:
    return CAST_CODE_MAP.get(int(code), 0)


def load_voteview(members_path, votes_path) -> VoteMatrix:
    """Load the Voteview long format.

    The members file needs an ``icpsr`` column (``id`` is accepted too) and
    may carry ``bioname``, ``party_code`` and ``state_abbrev``. The votes file
    needs ``icpsr``, ``rollnumber`` and ``cast_code``. Member/vote pairs that
    never appear are encoded 0.
    """
    members_path, votes_path = Path(members_path), Path(votes_path)

    legs, index = [], {}
    with members_path.open(newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        id_col = _pick_column(reader.fieldnames, ("icpsr", "id"), members_path)
        for lineno, rec in enumerate(reader, start=2):
            leg_id = _norm_id(rec[id_col])
            if leg_id in index:
                raise VoteDataError(f"{members_path}: row {lineno} duplicate id {leg_id!r}")
            index[leg_id] = len(legs)
            legs.append(Legislator(
                leg_id,
                rec.get("bioname") or rec.get("name") or "",
                (rec.get("party_code") or rec.get("party") or "").strip(),
                (rec.get("state_abbrev") or rec.get("region") or "").strip() or None,
            ))

    cells = {}
    with votes_path.open(newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        id_col = _pick_column(reader.fieldnames, ("icpsr", "id"), votes_path)
        for col in ("rollnumber", "cast_code"):
            _pick_column(reader.fieldnames, (col,), votes_path)
        for lineno, rec in enumerate(reader, start=2):
            leg_id = _norm_id(rec[id_col])
            if leg_id not in index:
                raise VoteDataError(
                    f"{votes_path}: row {lineno} references unknown legislator {leg_id!r}"
                )
            try:
                roll = int(float(rec["rollnumber"]))
                code = int(float(rec["cast_code"]))
            except ValueError:
                raise VoteDataError(
                    f"{votes_path}: row {lineno} has non-numeric rollnumber/cast_code"
                ) from None
            key = (index[leg_id], roll)
            if key in cells:
                raise VoteDataError(
                    f"{votes_path}: row {lineno} duplicate vote for "
                    f"legislator {leg_id!r}, roll call {roll}"
                )
            cells[key] = cast_code_to_vote(code)

    rolls = sorted({roll for _, roll in cells})
    if not rolls:
        raise VoteDataError(f"{votes_path}: no votes")
    col_of = {roll: j for j, roll in enumerate(rolls)}
    values = np.zeros((len(legs), len(rolls)), dtype=np.int8)
    for (i, roll), vote in cells.items():
        values[i, col_of[roll]] = vote
    return VoteMatrix(legs, [str(r) for r in rolls], values)


def _pick_column(fieldnames, candidates, path):
    fieldnames = fieldnames or []
    for c in candidates:
        if c in fieldnames:
            return c
    raise VoteDataError(f"{path}: missing column, expected one of {candidates}")


def _norm_id(raw: str) -> str:
    raw = raw.strip()
    try:
        as_float = float(raw)
    except ValueError:
        return raw
    return str(int(as_float)) if as_float.is_integer() else raw


def minority_counts(values) -> np.ndarray:
    """Per-column min(#yea, #nay)."""
    values = np.asarray(values)
    yea = (values == 1).sum(axis=0)
    nay = (values == -1).sum(axis=0)
    return np.minimum(yea, nay)


def filter_minority(v: VoteMatrix, threshold: float = 0.025) -> VoteMatrix:
    """Drop lopsided votes.

    A column is removed when its minority side is strictly smaller than
    ``threshold * n``, where n counts every legislator, abstainers included.
    """
    if not 0 <= threshold < 0.5:
        raise ValueError(f"threshold must be in [0, 0.5), got {threshold}")
    keep = np.flatnonzero(minority_counts(v.values) >= threshold * v.n)
    if keep.size == 0:
        raise VoteDataError("all votes filtered")
    if keep.size == v.m:
        return v
    return v.take_votes(keep)
