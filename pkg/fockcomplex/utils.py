"""
Utility functions for fockcomplex
"""

import csv
import io
import json
import logging
import logging.handlers
import math
import platform
import sys
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Sequence

import numpy as np

from .scalars import ExactScalar

try:
    import psutil
    PSUTIL_AVAILABLE = True
except ImportError:
    PSUTIL_AVAILABLE = False

LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'


def setup_logging(config, verbose: bool = False) -> None:
    """Setup logging configuration; everything goes to stderr so stdout stays machine-readable"""
    system = config.system if config is not None else {}
    level_name = "DEBUG" if verbose else str(system.get("log_level", "INFO")).upper()
    log_level = getattr(logging, level_name, logging.INFO)

    handlers: List[logging.Handler] = [logging.StreamHandler(sys.stderr)]
    log_file = system.get("log_file")
    if log_file:
        handlers.append(logging.handlers.RotatingFileHandler(
            log_file, maxBytes=1_000_000, backupCount=3))

    logging.basicConfig(level=log_level, format=LOG_FORMAT, handlers=handlers, force=True)

    # sympy is chatty at DEBUG
    logging.getLogger('sympy').setLevel(logging.WARNING)


def get_resource_info() -> Dict[str, Any]:
    """Platform and, when psutil is available, resident memory of this process"""
    info: Dict[str, Any] = {"platform": platform.system(), "python": platform.python_version()}
    if PSUTIL_AVAILABLE:
        try:
            memory = psutil.Process().memory_info()
            info["rss_bytes"] = memory.rss
        except psutil.Error as e:
            logging.getLogger(__name__).debug(f"psutil failed: {e}")
    return info


def format_bytes(bytes_value: int) -> str:
    """Format bytes into human readable string"""
    if bytes_value == 0:
        return "0B"

    units = ["B", "KB", "MB", "GB", "TB"]
    i = 0
    value = float(bytes_value)

    while value >= 1024 and i < len(units) - 1:
        value /= 1024
        i += 1

    return f"{value:.1f} {units[i]}"


def to_jsonable(value: Any) -> Any:
    """Convert report values to plain JSON types; complex becomes {"re", "im"}"""
    if isinstance(value, ExactScalar):
        return value.format()
    if isinstance(value, dict):
        return {str(key): to_jsonable(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(item) for item in value]
    if isinstance(value, np.ndarray):
        return [to_jsonable(item) for item in value.tolist()]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        number = float(value)
        if math.isnan(number) or math.isinf(number):
            return str(number)
        return number
    if isinstance(value, (complex, np.complexfloating)):
        number = complex(value)
        return {"re": number.real, "im": number.imag}
    if hasattr(value, "to_json"):
        return to_jsonable(value.to_json())
    return value


def format_float(number: float) -> str:
    """17 significant digits, always readable back as a float"""
    text = format(number, ".17g")
    return text if any(ch in text for ch in ".en") else text + ".0"


class FixedDigitsEncoder(json.JSONEncoder):
    """JSONEncoder that writes floats through format_float"""

    def iterencode(self, o: Any, _one_shot: bool = False):
        markers: Optional[Dict[int, Any]] = {} if self.check_circular else None
        encoder = json.encoder.encode_basestring_ascii if self.ensure_ascii else json.encoder.encode_basestring
        iterencode = json.encoder._make_iterencode(
            markers, self.default, encoder, self.indent, format_float,
            self.key_separator, self.item_separator, self.sort_keys, self.skipkeys, _one_shot)
        return iterencode(o, 0)


def dump_json(data: Any) -> str:
    """Deterministic JSON text: insertion order kept, floats to 17 significant digits"""
    return json.dumps(to_jsonable(data), indent=2, allow_nan=False, cls=FixedDigitsEncoder) + "\n"


def dump_csv(header: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_csv_cell(cell) for cell in row])
    return buffer.getvalue()


def _csv_cell(cell: Any) -> Any:
    cell = to_jsonable(cell)
    if isinstance(cell, (dict, list)):
        return json.dumps(cell)
    return cell


def write_output(text: str, path: Optional[str] = None) -> None:
    """Write a report to path, or to stdout when no path is given"""
    if not path:
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    target = Path(path)
    if target.parent and not target.parent.exists():
        target.parent.mkdir(parents=True, exist_ok=True)
    target.write_text(text)
    logging.getLogger(__name__).info(f"Wrote {target}")


def read_json(path: str) -> Any:
    with open(path, 'r') as f:
        return json.load(f)
