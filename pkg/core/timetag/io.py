"""Canonical text encoding of tag streams and coincidence tables."""

import logging
import re
from pathlib import Path
from typing import Dict, List, Tuple, Union

import numpy as np
import pandas as pd

from core.errors import TagFileError
from core.timetag.coincidence import CoincidenceSet
from core.timetag.model import ABSENT, SIDE_CHANNELS, ClockModel, Side, TimeTagStream

logger = logging.getLogger(__name__)

COLUMNS = ["time_ps", "channel", "eom_bit", "qrng_bit", "scanner_step"]
WINDOW_CONVENTION = "full-width"
_CHANNEL_LABELS = np.array(["", "Det1", "Det2", "Det3", "Det4"], dtype=object)
_CHANNEL_CODES = {"Det1": 1, "Det2": 2, "Det3": 3, "Det4": 4}
_DIGITS = r"\d+"

PathLike = Union[str, Path]


def _header_lines(stream: TimeTagStream) -> List[str]:
    clock = stream.clock
    return [
        f"side={stream.side.value}",
        f"clock={clock.discipline.value}",
        f"window_convention={WINDOW_CONVENTION}",
        f"clock_offset_s={clock.offset_s!r}",
        f"clock_drift={clock.drift!r}",
        f"clock_jitter_s={clock.jitter_sigma_s!r}",
        f"clock_walk_sigma={clock.walk_sigma!r}",
    ]


def _annotation_strings(values: np.ndarray) -> np.ndarray:
    return np.where(values == ABSENT, "-", values.astype(np.int64).astype(str))


def write_stream(stream: TimeTagStream, path: PathLike) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    frame = pd.DataFrame(
        {
            "time_ps": stream.times,
            "channel": _CHANNEL_LABELS[stream.channels.astype(np.int64)],
            "eom_bit": _annotation_strings(stream.eom_bits),
            "qrng_bit": _annotation_strings(stream.qrng_bits),
            "scanner_step": _annotation_strings(stream.scanner_steps),
        },
        columns=COLUMNS,
    )
    with open(path, "w", encoding="utf-8", newline="") as handle:
        handle.write("\n".join(_header_lines(stream)) + "\n")
        frame.to_csv(handle, index=False, lineterminator="\n")
    logger.debug("Wrote %d %s tags to %s", len(stream), stream.side.value, path)
    return path


def _parse_header(path: Path) -> Tuple[Dict[str, str], int]:
    header: Dict[str, str] = {}
    with open(path, "r", encoding="utf-8") as handle:
        for number, line in enumerate(handle, start=1):
            line = line.rstrip("\n")
            if line.startswith("time_ps"):
                if line.split(",") != COLUMNS:
                    raise TagFileError(f"unexpected column header '{line}'", line=number)
                return header, number
            if "=" not in line:
                raise TagFileError(f"expected key=value header, got '{line}'", line=number)
            key, value = line.split("=", 1)
            header[key.strip()] = value.strip()
    raise TagFileError("missing column header line")


def _clock_from_header(header: Dict[str, str]) -> ClockModel:
    try:
        return ClockModel(
            offset_s=float(header.get("clock_offset_s", 0.0)),
            drift=float(header.get("clock_drift", 0.0)),
            jitter_sigma_s=float(header.get("clock_jitter_s", 0.0)),
            discipline=header.get("clock", "shared-generator"),
            walk_sigma=float(header.get("clock_walk_sigma", 0.0)),
        )
    except ValueError as exc:
        raise TagFileError(f"invalid clock header: {exc}") from exc


def _first_bad(mask: pd.Series, first_record_line: int) -> int:
    return first_record_line + int(np.flatnonzero(mask.to_numpy())[0])


def _annotation_column(raw: pd.Series, name: str, first_record_line: int) -> np.ndarray:
    absent = raw == "-"
    numeric = raw.str.fullmatch(_DIGITS).fillna(False).astype(bool)
    bad = ~(absent | numeric)
    if bad.any():
        line = _first_bad(bad, first_record_line)
        raise TagFileError(f"invalid {name} value '{raw.iloc[line - first_record_line]}'", line=line)
    values = np.full(len(raw), ABSENT, dtype=np.int64)
    values[numeric.to_numpy()] = raw[numeric].astype(np.int64).to_numpy()
    return values


def read_stream(path: PathLike) -> TimeTagStream:
    """Parse a tag file; malformed records raise TagFileError with their line number."""
    path = Path(path)
    header, column_line = _parse_header(path)
    try:
        side = Side(header.get("side", ""))
    except ValueError as exc:
        raise TagFileError(f"invalid side '{header.get('side')}'", line=1) from exc
    if header.get("window_convention", WINDOW_CONVENTION) != WINDOW_CONVENTION:
        raise TagFileError(f"unsupported window convention '{header['window_convention']}'")
    clock = _clock_from_header(header)

    try:
        frame = pd.read_csv(
            path,
            skiprows=column_line - 1,
            dtype=str,
            keep_default_na=False,
            na_filter=False,
        )
    except pd.errors.ParserError as exc:
        match = re.search(r"line (\d+)", str(exc))
        raise TagFileError(f"malformed record: {exc}", line=int(match.group(1)) if match else None) from exc
    if list(frame.columns) != COLUMNS:
        raise TagFileError(f"unexpected columns {list(frame.columns)}", line=column_line)
    frame = frame.fillna("")
    first = column_line + 1

    times_raw = frame["time_ps"]
    bad_time = ~times_raw.str.fullmatch(_DIGITS).fillna(False).astype(bool)
    if bad_time.any():
        line = _first_bad(bad_time, first)
        raise TagFileError(f"invalid time '{times_raw.iloc[line - first]}'", line=line)
    times = times_raw.astype(np.int64).to_numpy()
    if len(times) > 1:
        backwards = np.flatnonzero(np.diff(times) < 0)
        if backwards.size:
            raise TagFileError("time goes backwards", line=first + int(backwards[0]) + 1)

    channel_codes = frame["channel"].map(_CHANNEL_CODES)
    allowed = set(int(c) for c in SIDE_CHANNELS[side])
    codes = channel_codes.fillna(0).astype(np.int64)
    bad_channel = ~codes.isin(sorted(allowed))
    if bad_channel.any():
        line = _first_bad(bad_channel, first)
        raise TagFileError(
            f"channel '{frame['channel'].iloc[line - first]}' not valid for the {side.value} side", line=line
        )

    return TimeTagStream(
        side=side,
        clock=clock,
        times=times,
        channels=codes.to_numpy(),
        eom_bits=_annotation_column(frame["eom_bit"], "eom_bit", first),
        qrng_bits=_annotation_column(frame["qrng_bit"], "qrng_bit", first),
        scanner_steps=_annotation_column(frame["scanner_step"], "scanner_step", first),
    )


def write_coincidences(coincidences: CoincidenceSet, path: PathLike) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    coincidences.to_frame().to_csv(path, index=False, lineterminator="\n")
    return path


__all__ = ["COLUMNS", "read_stream", "write_coincidences", "write_stream"]
