from .files import atomic_text_writer, format_number, write_table
from .parallel import ordered_map, resolve_workers

__all__ = [
    "atomic_text_writer",
    "format_number",
    "write_table",
    "ordered_map",
    "resolve_workers",
]
