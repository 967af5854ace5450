"""JSON / CSV readers and writers for the pipeline's file formats."""

import csv
import datetime
import io
import json

import numpy as np

from .water import MeterLog, DemandProfile, DemandEstimate
from .windows import IncidenceMatrix, IntervalWindow, TimeAtomSet

# meter timestamps are hours since this epoch when rendered as ISO 8601
METER_EPOCH = datetime.datetime(2000, 1, 1, tzinfo=datetime.timezone.utc)


def windows_from_json(text: str) -> list[IntervalWindow]:
    """Parse ``[{"id": "w1", "intervals": [[0.0, 2.0]]}, ...]``."""
    data = json.loads(text)
    if not isinstance(data, list):
        raise ValueError("windows JSON must be a list")
    out = []
    for entry in data:
        out.append(
            IntervalWindow(
                id=str(entry["id"]),
                intervals=tuple((float(a), float(b)) for a, b in entry["intervals"]),
            )
        )
    return out


def windows_to_json(windows: list[IntervalWindow]) -> str:
    return json.dumps(
        [{"id": w.id, "intervals": [list(iv) for iv in w.intervals]} for w in windows],
        indent=2,
    )


def atom_set_to_json(atoms: TimeAtomSet) -> str:
    return json.dumps(
        {
            "horizon": list(atoms.horizon),
            "atoms": [
                {
                    "index": a.index,
                    "signature": list(a.signature),
                    "intervals": [list(iv) for iv in a.intervals],
                    "length": a.length,
                }
                for a in atoms.atoms
            ],
        },
        indent=2,
    )


def matrix_to_csv(matrix: np.ndarray) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    for row in np.atleast_2d(np.asarray(matrix, dtype=float)):
        writer.writerow([repr(float(v)) for v in row])
    return buf.getvalue()


def matrix_from_csv(text: str) -> np.ndarray:
    rows = [
        [float(v) for v in row]
        for row in csv.reader(io.StringIO(text))
        if row
    ]
    if not rows:
        raise ValueError("empty CSV matrix")
    return np.asarray(rows)


def incidence_to_csv(incidence: IncidenceMatrix) -> str:
    return matrix_to_csv(incidence.entries)


def incidence_from_csv(text: str) -> IncidenceMatrix:
    return IncidenceMatrix(matrix_from_csv(text))


def meter_logs_to_csv(logs: list[MeterLog]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["household_id", "timestamp_iso8601", "cumulative_liters"])
    for log in logs:
        for t, v in log.readings:
            stamp = METER_EPOCH + datetime.timedelta(hours=t)
            writer.writerow([log.household_id, stamp.isoformat(), repr(float(v))])
    return buf.getvalue()


def meter_logs_from_csv(text: str) -> list[MeterLog]:
    by_household: dict[int, list[tuple[float, float]]] = {}
    reader = csv.reader(io.StringIO(text))
    header = next(reader)
    if header[:3] != ["household_id", "timestamp_iso8601", "cumulative_liters"]:
        raise ValueError("unexpected meter log CSV header")
    for row in reader:
        if not row:
            continue
        hid = int(row[0])
        stamp = datetime.datetime.fromisoformat(row[1])
        hours = (stamp - METER_EPOCH).total_seconds() / 3600.0
        by_household.setdefault(hid, []).append((hours, float(row[2])))
    return [
        MeterLog(household_id=hid, readings=tuple(sorted(readings)))
        for hid, readings in sorted(by_household.items())
    ]


def profile_from_json(text: str) -> DemandProfile:
    data = json.loads(text)
    return DemandProfile(
        hourly_rate=np.asarray(data["hourly_rate"], dtype=float),
        jump_mean=float(data["jump_mean"]),
        jump_sd=float(data["jump_sd"]),
        horizon_days=int(data["horizon_days"]),
    )


def profile_to_json(profile: DemandProfile) -> str:
    return json.dumps(
        {
            "hourly_rate": profile.hourly_rate.tolist(),
            "jump_mean": profile.jump_mean,
            "jump_sd": profile.jump_sd,
            "horizon_days": profile.horizon_days,
        },
        indent=2,
    )


def estimate_to_json(estimate: DemandEstimate) -> str:
    return json.dumps(
        {
            "hourly_mean": estimate.hourly_mean.tolist(),
            "hourly_var": estimate.hourly_var.tolist(),
            "community_size": estimate.community_size,
        },
        indent=2,
    )


def estimate_from_json(text: str) -> DemandEstimate:
    data = json.loads(text)
    return DemandEstimate(
        hourly_mean=np.asarray(data["hourly_mean"], dtype=float),
        hourly_var=np.asarray(data["hourly_var"], dtype=float),
        community_size=int(data["community_size"]),
    )
