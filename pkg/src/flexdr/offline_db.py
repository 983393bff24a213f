"""Offline decision database: response values for every (response target, flexible case) pair.

On disk the database is one UTF-8 JSON document with sorted keys::

    {
      "format_version": 1,
      "metadata": {"seed": int, "parameter_hash": str, "build_timestamp": str,
                   "horizon": int, "step_minutes": float},
      "entries": [
        {"target": str, "case": str,
         "response_value_kwh": float, "unresponsiveness_kwh": float, "requested_kwh": float,
         "responses": {"H": [kW, ...], ...}, "storage_charge": [kW, ...], "soc": [...],
         "warnings": [str, ...], "constraints_ok": bool,
         "build": {"seed": int, "parameter_hash": str, "build_timestamp": str}},
        ...
      ]
    }

Entries are ordered by target, then by the standard case order.
"""
from __future__ import annotations

import dataclasses
import hashlib
import json
import math
import os
from dataclasses import dataclass
from typing import Any, Mapping, Sequence

from ._io import atomic_write_text
from .demand_response import (
    ALL_CASES,
    DispatchParams,
    FlexibleCase,
    LoadKind,
    ResponseTarget,
    check_dispatch,
    schedule_dispatch,
)
from .errors import FormatError, NotFoundError, SpecError, VersionMismatchError
from .profile import LoadProfile, format_timestamp

FORMAT_VERSION = 1


@dataclass(frozen=True)
class BuildInfo:
    seed: int
    parameter_hash: str
    build_timestamp: str


@dataclass(frozen=True)
class DatabaseEntry:
    target: str
    case: str
    response_value: float  # kWh delivered
    unresponsiveness: float  # kWh
    requested: float  # kWh
    responses: dict[str, tuple[float, ...]]
    storage_charge: tuple[float, ...]
    soc: tuple[float, ...]
    warnings: tuple[str, ...]
    constraints_ok: bool
    build: BuildInfo


@dataclass(frozen=True)
class OfflineDatabase:
    entries: dict[tuple[str, str], DatabaseEntry]
    seed: int = 0
    parameter_hash: str = ""
    build_timestamp: str = ""
    horizon: int = 0
    step_minutes: float = 60.0

    def targets(self) -> list[str]:
        return list(dict.fromkeys(t for t, _ in self.entries))

    def __len__(self) -> int:
        return len(self.entries)


def _params_dict(params: DispatchParams) -> dict[str, Any]:
    return dataclasses.asdict(params)


def parameter_hash(baselines: Mapping[str, LoadProfile], params: DispatchParams,
                   targets: Sequence[ResponseTarget]) -> str:
    doc = {
        "baselines": {LoadKind(k).value: {"start": format_timestamp(p.start_time), "step": p.step,
                                          "values": list(p.values)}
                      for k, p in sorted(baselines.items(), key=lambda kv: LoadKind(kv[0]).value)},
        "params": _params_dict(params),
        "targets": [dataclasses.asdict(t) for t in targets],
    }
    blob = json.dumps(doc, sort_keys=True, separators=(",", ":"), default=str)
    return hashlib.sha256(blob.encode("utf-8")).hexdigest()


def build_database(baselines: Mapping[LoadKind | str, LoadProfile], params: DispatchParams,
                   targets: Sequence[ResponseTarget], seed: int = 0,
                   build_timestamp: str | None = None) -> OfflineDatabase:
    """Dispatch every target against all seven flexible cases.

    ``build_timestamp`` defaults to the first baseline's start time so that
    identical inputs give identical files.
    """
    if not targets:
        raise SpecError("need at least one response target")
    baselines = {LoadKind(k): v for k, v in baselines.items()}
    missing = [k.label for k in LoadKind if k not in baselines and k is not LoadKind.STORAGE]
    if missing:
        raise SpecError(f"baselines missing for: {', '.join(missing)}")
    ids = [t.id for t in targets]
    if len(set(ids)) != len(ids):
        raise SpecError("response target ids must be unique")
    horizons = {t.horizon for t in targets}
    steps = {t.step for t in targets}
    if len(horizons) != 1 or len(steps) != 1:
        raise SpecError("all targets must share one timestep grid")
    if build_timestamp is None:
        build_timestamp = format_timestamp(min(p.start_time for p in baselines.values()))
    phash = parameter_hash({k.value: v for k, v in baselines.items()}, params, targets)
    info = BuildInfo(seed, phash, build_timestamp)
    entries: dict[tuple[str, str], DatabaseEntry] = {}
    for target in targets:
        for case in ALL_CASES:
            res = schedule_dispatch(case, target, baselines, params)
            ok = not check_dispatch(res, target, baselines, params)
            entries[(target.id, case.id)] = DatabaseEntry(
                target=target.id, case=case.id, response_value=res.f_act, unresponsiveness=res.f,
                requested=res.f_pre, responses=res.responses, storage_charge=res.storage_charge,
                soc=res.soc, warnings=res.warnings, constraints_ok=ok, build=info,
            )
    return OfflineDatabase(entries, seed, phash, build_timestamp, horizons.pop(), float(steps.pop()))


def query(db: OfflineDatabase, target_id: str, case_id: str | FlexibleCase) -> DatabaseEntry:
    try:
        key = FlexibleCase.parse(case_id).id if isinstance(case_id, str) else case_id.id
    except SpecError as exc:
        raise NotFoundError(str(exc)) from None
    try:
        return db.entries[(target_id, key)]
    except KeyError:
        raise NotFoundError(f"no entry for target {target_id!r}, case {key!r}") from None


# --------------------------------------------------------------------------
# Persistence
# --------------------------------------------------------------------------

def to_document(db: OfflineDatabase) -> dict[str, Any]:
    return {
        "format_version": FORMAT_VERSION,
        "metadata": {"seed": db.seed, "parameter_hash": db.parameter_hash,
                     "build_timestamp": db.build_timestamp, "horizon": db.horizon,
                     "step_minutes": db.step_minutes},
        "entries": [
            {
                "target": e.target, "case": e.case,
                "response_value_kwh": e.response_value, "unresponsiveness_kwh": e.unresponsiveness,
                "requested_kwh": e.requested,
                "responses": {k: list(v) for k, v in e.responses.items()},
                "storage_charge": list(e.storage_charge), "soc": list(e.soc),
                "warnings": list(e.warnings), "constraints_ok": e.constraints_ok,
                "build": dataclasses.asdict(e.build),
            }
            for e in db.entries.values()
        ],
    }


def dumps(db: OfflineDatabase) -> str:
    return json.dumps(to_document(db), sort_keys=True, indent=2, ensure_ascii=False, allow_nan=False) + "\n"


def save(db: OfflineDatabase, path: str | os.PathLike) -> None:
    atomic_write_text(path, dumps(db))


def _expect(value: Any, kind: type | tuple[type, ...], where: str) -> Any:
    if kind is float or kind == (float,):
        ok = isinstance(value, (int, float)) and not isinstance(value, bool) and math.isfinite(value)
        if ok:
            return float(value)
    elif kind is int:
        if isinstance(value, int) and not isinstance(value, bool):
            return value
    elif isinstance(value, kind):
        return value
    name = kind.__name__ if isinstance(kind, type) else "/".join(k.__name__ for k in kind)
    raise FormatError(f"{where}: expected {name}, got {type(value).__name__}")


def _numbers(value: Any, where: str) -> tuple[float, ...]:
    _expect(value, list, where)
    return tuple(_expect(v, float, f"{where}[{i}]") for i, v in enumerate(value))


def _field(doc: Mapping[str, Any], key: str, where: str) -> Any:
    if key not in doc:
        raise FormatError(f"{where}: missing field {key!r}")
    return doc[key]


def from_document(doc: Any) -> OfflineDatabase:
    _expect(doc, dict, "document")
    version = _field(doc, "format_version", "document")
    if not isinstance(version, int) or isinstance(version, bool):
        raise FormatError(f"format_version: expected int, got {version!r}")
    if version != FORMAT_VERSION:
        raise VersionMismatchError(f"database format_version {version} is not supported (expected {FORMAT_VERSION})")
    meta = _expect(_field(doc, "metadata", "document"), dict, "metadata")
    raw_entries = _expect(_field(doc, "entries", "document"), list, "entries")
    entries: dict[tuple[str, str], DatabaseEntry] = {}
    for i, raw in enumerate(raw_entries):
        where = f"entries[{i}]"
        _expect(raw, dict, where)
        build = _expect(_field(raw, "build", where), dict, f"{where}.build")
        responses = _expect(_field(raw, "responses", where), dict, f"{where}.responses")
        entry = DatabaseEntry(
            target=_expect(_field(raw, "target", where), str, f"{where}.target"),
            case=_expect(_field(raw, "case", where), str, f"{where}.case"),
            response_value=_expect(_field(raw, "response_value_kwh", where), float, f"{where}.response_value_kwh"),
            unresponsiveness=_expect(_field(raw, "unresponsiveness_kwh", where), float,
                                     f"{where}.unresponsiveness_kwh"),
            requested=_expect(_field(raw, "requested_kwh", where), float, f"{where}.requested_kwh"),
            responses={k: _numbers(v, f"{where}.responses.{k}") for k, v in responses.items()},
            storage_charge=_numbers(_field(raw, "storage_charge", where), f"{where}.storage_charge"),
            soc=_numbers(_field(raw, "soc", where), f"{where}.soc"),
            warnings=tuple(_expect(w, str, f"{where}.warnings[{j}]")
                           for j, w in enumerate(_expect(_field(raw, "warnings", where), list, f"{where}.warnings"))),
            constraints_ok=_expect(_field(raw, "constraints_ok", where), bool, f"{where}.constraints_ok"),
            build=BuildInfo(
                seed=_expect(_field(build, "seed", f"{where}.build"), int, f"{where}.build.seed"),
                parameter_hash=_expect(_field(build, "parameter_hash", f"{where}.build"), str,
                                       f"{where}.build.parameter_hash"),
                build_timestamp=_expect(_field(build, "build_timestamp", f"{where}.build"), str,
                                        f"{where}.build.build_timestamp"),
            ),
        )
        key = (entry.target, entry.case)
        if key in entries:
            raise FormatError(f"{where}: duplicate entry for {key}")
        entries[key] = entry
    return OfflineDatabase(
        entries=entries,
        seed=_expect(_field(meta, "seed", "metadata"), int, "metadata.seed"),
        parameter_hash=_expect(_field(meta, "parameter_hash", "metadata"), str, "metadata.parameter_hash"),
        build_timestamp=_expect(_field(meta, "build_timestamp", "metadata"), str, "metadata.build_timestamp"),
        horizon=_expect(_field(meta, "horizon", "metadata"), int, "metadata.horizon"),
        step_minutes=_expect(_field(meta, "step_minutes", "metadata"), float, "metadata.step_minutes"),
    )


def loads(text: str) -> OfflineDatabase:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"malformed database file at line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    return from_document(doc)


def load(path: str | os.PathLike) -> OfflineDatabase:
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    try:
        return loads(text)
    except FormatError as exc:
        raise type(exc)(f"{path}: {exc}") from None


def response_table(db: OfflineDatabase, value: str = "response_value") -> list[list[str | float]]:
    """Rows of ``[target, value per case...]`` in standard case order, header first."""
    rows: list[list[str | float]] = [["target"] + [c.id for c in ALL_CASES]]
    for t in db.targets():
        rows.append([t] + [getattr(db.entries[(t, c.id)], value) if (t, c.id) in db.entries else math.nan
                           for c in ALL_CASES])
    return rows
