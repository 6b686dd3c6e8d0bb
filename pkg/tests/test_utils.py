import gzip
import logging

import pytest

from visnet.config import Settings
from visnet.exceptions import ReportIOError
from visnet.logger import configure_logging, get_logger
from visnet.utils.files import atomic_text_writer, format_number, write_table
from visnet.utils.parallel import ordered_map, resolve_workers


def test_settings_from_environment(monkeypatch):
    monkeypatch.setenv("VISNET_REPLICAS", "250")
    monkeypatch.setenv("VISNET_WORKERS", "3")
    monkeypatch.setenv("VISNET_MIN_TAIL_FRACTION", "0.05")
    current = Settings()
    assert current.replicas == 250
    assert current["workers"] == 3
    assert current.min_tail_fraction == 0.05
    assert current.seed == 20240412


def test_settings_reject_too_few_replicas(monkeypatch):
    monkeypatch.setenv("VISNET_REPLICAS", "50")
    with pytest.raises(ValueError):
        Settings()


def test_logger_names():
    assert get_logger("visnet.metrics").name == "visnet.metrics"
    assert get_logger("cli").name == "visnet.cli"
    root = configure_logging("debug")
    assert root.level == logging.DEBUG
    configure_logging("WARNING")
    assert sum(getattr(h, "_visnet", False) for h in root.handlers) == 1


def test_format_number():
    assert format_number(3) == "3"
    assert format_number(0.1 + 0.2) == "0.3"
    assert format_number(1e-20) == "1e-20"


def test_atomic_writer_keeps_old_file_on_failure(tmp_path):
    target = tmp_path / "report.json"
    target.write_text("old")
    with pytest.raises(RuntimeError):
        with atomic_text_writer(target) as sink:
            sink.write("new")
            raise RuntimeError("boom")
    assert target.read_text() == "old"
    assert [p.name for p in tmp_path.iterdir()] == ["report.json"]


def test_gzip_output_is_reproducible(tmp_path):
    for name in ("a.csv.gz", "b.csv.gz"):
        write_table(tmp_path / name, ("k", "c"), ([1, 2], [0.5, 0.25]))
    assert (tmp_path / "a.csv.gz").read_bytes() == (tmp_path / "b.csv.gz").read_bytes()
    with gzip.open(tmp_path / "a.csv.gz", "rt") as fh:
        assert fh.read() == "k,c\n1,0.5\n2,0.25\n"


def test_write_table_rejects_ragged_columns(tmp_path):
    with pytest.raises(ReportIOError, match="ragged"):
        write_table(tmp_path / "x.csv", ("a", "b"), ([1, 2], [1]))


def test_ordered_map_keeps_order():
    assert ordered_map(lambda x: x * x, range(20), workers=4) == [x * x for x in range(20)]
    assert ordered_map(str, [], workers=4) == []
    assert resolve_workers(0) == 1
