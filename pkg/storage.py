"""
In-memory storage for bench results.
Collects records per category and writes them as JSON lines.
"""
from typing import Dict, List, Optional
import json
import threading
import logging

logger = logging.getLogger(__name__)

class ResultStorage:
    """
    Thread-safe in-memory storage for result records.

    Records are kept per category, in insertion order:
    {
        category: [
            {"test": ..., "lhs": ..., "rhs": ..., "pass": ...},
            ...
        ]
    }
    """
    def __init__(self):
        self._records: Dict[str, List[dict]] = {}
        self._lock = threading.RLock()
        logger.debug("Initialized result storage")

    def add_record(self, category: str, record: dict):
        """Append one record to a category."""
        with self._lock:
            self._records.setdefault(category, []).append(dict(record))
            logger.debug(f"Stored {category} record #{len(self._records[category])}")

    def add_records(self, category: str, records: List[dict]):
        with self._lock:
            for record in records:
                self.add_record(category, record)

    def get_records(self, category: Optional[str] = None) -> List[dict]:
        """Records of one category, or of all categories tagged with their category."""
        with self._lock:
            if category is not None:
                return [dict(r) for r in self._records.get(category, [])]
            return [dict(r, category=c) for c, rows in self._records.items() for r in rows]

    def categories(self) -> List[str]:
        with self._lock:
            return list(self._records)

    def clear(self):
        with self._lock:
            self._records.clear()
            logger.debug("Cleared result storage")

    def to_jsonl(self, category: Optional[str] = None) -> str:
        """Records as JSON lines with sorted keys."""
        return "".join(json.dumps(row, sort_keys=True) + "\n" for row in self.get_records(category))

    def dump_jsonl(self, path: str, category: Optional[str] = None) -> int:
        """Write records as JSON lines; returns the count written."""
        text = self.to_jsonl(category)
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
        count = text.count("\n")
        logger.debug(f"Wrote {count} records to {path}")
        return count

    def load_jsonl(self, path: str, category: str = "loaded") -> int:
        """Read JSON lines back; a line's own 'category' field wins over the default."""
        count = 0
        with open(path, "r", encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                row = json.loads(line)
                self.add_record(row.pop("category", category), row)
                count += 1
        return count

# Global storage instance
result_storage = ResultStorage()
