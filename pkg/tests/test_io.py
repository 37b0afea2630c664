import json
import logging

import numpy as np
import pandas as pd
import pytest

from blocks.components.io.cache import PartitionSumCache
from blocks.components.io.ifs_file import parse_ifs_file, parse_ifs_text, serialize_ifs, write_ifs_file
from blocks.components.io.reports import flatten, format_value, render_report, write_csv, write_report
from blocks.components.io.run_config import build_config, parse_t_grid
from blocks.components.util.errors import IfsFormatError, UsageError

TWO_MAPS = """{
  "name": "pair",
  "dimension": 2,
  "maps": [
    {"matrix": [[0.3, 0.0], [0.0, 0.3]], "translation": [0.0, 0.0]},
    %s
  ]
}
"""


def _doc(second: str) -> str:
    return TWO_MAPS % second


def test_parse_valid_document():
    ifs = parse_ifs_text(_doc('{"matrix": [[0.4, 0.1], [0.0, 0.2]], "translation": [1, 0]}'))
    assert ifs.name == "pair"
    assert ifs.d == 2 and ifs.n_maps == 2
    assert ifs.translations.tolist() == [[0.0, 0.0], [1.0, 0.0]]


def test_parse_one_dimensional(systems_dir):
    ifs = parse_ifs_file(systems_dir / "cantor.json")
    assert ifs.d == 1
    assert ifs.contraction_ratios().tolist() == pytest.approx([1 / 3, 1 / 3])


def test_row_length_error_names_map_and_line():
    with pytest.raises(IfsFormatError) as info:
        parse_ifs_text(_doc('{"matrix": [[0.3, 0.0, 0.0], [0.0, 0.3]], "translation": [1, 0]}'), path="bad.json")
    assert info.value.line == 6
    assert "map 1" in str(info.value)
    assert str(info.value).startswith("bad.json:6:")


def test_translation_length_error():
    with pytest.raises(IfsFormatError) as info:
        parse_ifs_text(_doc('{"matrix": [[0.3, 0.0], [0.0, 0.3]], "translation": [1]}'))
    assert "translation" in str(info.value)
    assert info.value.line == 6


def test_singular_and_expanding_maps():
    with pytest.raises(IfsFormatError) as info:
        parse_ifs_text(_doc('{"matrix": [[0.2, 0.4], [0.1, 0.2]], "translation": [1, 0]}'))
    assert "map 1" in str(info.value)
    with pytest.raises(IfsFormatError) as info:
        parse_ifs_text(_doc('{"matrix": [[1.5, 0.0], [0.0, 0.2]], "translation": [1, 0]}'))
    assert "not contractive" in str(info.value)


def test_schema_and_json_errors():
    with pytest.raises(IfsFormatError) as info:
        parse_ifs_text('{"dimension": 2, "maps": [}')
    assert info.value.line == 1
    with pytest.raises(IfsFormatError):
        parse_ifs_text(_doc('{"matrix": [[0.3, 0.0], [0.0, 0.3]], "translation": [1, 0], "weight": 2}'))
    with pytest.raises(IfsFormatError):
        parse_ifs_text('{"dimension": 5, "maps": [{"matrix": [[0.1]], "translation": [0]}]}')


def test_single_map_needs_validation_off():
    text = '{"dimension": 1, "maps": [{"matrix": [[0.5]], "translation": [1.0]}]}'
    with pytest.raises(IfsFormatError):
        parse_ifs_text(text)
    assert parse_ifs_text(text, validate=False).n_maps == 1


def test_missing_file(tmp_path):
    with pytest.raises(IfsFormatError):
        parse_ifs_file(tmp_path / "missing.json")


def test_serialize_roundtrip(tmp_path, generic_pair, cantor):
    for ifs in (generic_pair, cantor):
        path = write_ifs_file(ifs, tmp_path / f"{ifs.name}.json")
        again = parse_ifs_file(path)
        assert again == ifs
        assert again.content_hash() == ifs.content_hash()
        assert len(serialize_ifs(ifs).splitlines()) == 6 + ifs.n_maps


def test_cache_put_get(tmp_path):
    cache = PartitionSumCache(tmp_path / "c.jsonl")
    assert cache.get("nat-abc", 1.3, 4) is None
    value = -0.1234567890123456789
    cache.put("nat-abc", 1.3, 4, value)
    cache.put("nat-abc", 1.3, 4, 99.0)
    assert cache.get("nat-abc", 1.3, 4) == value
    reloaded = PartitionSumCache(tmp_path / "c.jsonl")
    assert reloaded.get("nat-abc", 1.3, 4) == value
    assert reloaded.get("nat-abc", 1.3000000000000003, 4) is None
    assert len(reloaded) == 1


def test_cache_skips_corrupted_record(tmp_path, caplog):
    path = tmp_path / "c.jsonl"
    cache = PartitionSumCache(path)
    cache.put("h", 0.5, 2, 1.25)
    with path.open("a", encoding="utf-8") as fh:
        fh.write('{"h": "h", "t": "0x1.0p+0", "n": 3, "v": ')
    with caplog.at_level(logging.WARNING):
        reloaded = PartitionSumCache(path)
    assert "corrupted" in caplog.text
    assert reloaded.get("h", 0.5, 2) == 1.25
    assert reloaded.get("h", 1.0, 3) is None

    reloaded.put("h", 1.0, 3, 2.5)
    final = PartitionSumCache(path)
    assert final.get("h", 1.0, 3) == 2.5
    assert final.get("h", 0.5, 2) == 1.25
    records = [json.loads(line) for line in path.read_text().splitlines() if line.startswith("{") and line.endswith("}")]
    assert len(records) == 2


def test_format_value():
    assert format_value(0.1) == "0.10000000000000001"
    assert format_value(True) == "true"
    assert format_value(np.int64(7)) == "7"
    assert format_value(float("nan")) == "nan"
    assert format_value(float("-inf")) == "-inf"
    assert format_value([1.0, 2.5]) == "1,2.5"
    assert format_value(None) == ""


def test_render_report_layout():
    text = render_report("dim", {"tol": 1e-10, "nmax": 8}, "abc123", {"prediction": 1.0, "partial": False})
    lines = text.splitlines()
    assert lines[0].startswith("tool_version = ")
    assert lines[1:3] == ["subcommand = dim", "ifs_hash = abc123"]
    assert lines[3:5] == ["config.nmax = 8", "config.tol = 1e-10"]
    assert lines[5:] == ["prediction = 1", "partial = false"]
    assert text.endswith("\n")
    assert flatten("nu", {"a": 1}) == {"nu.a": 1}


def test_write_report_and_csv(tmp_path):
    report = write_report(tmp_path / "sub" / "r.txt", "pressure", {}, "h", {"x": 2.0})
    assert report.read_bytes().endswith(b"x = 2\n")
    path = write_csv(pd.DataFrame({"t": [0.1], "P_n": [1 / 3]}), tmp_path / "p.csv")
    assert path.read_text() == "t,P_n\n0.10000000000000001,0.33333333333333331\n"


def test_parse_t_grid():
    assert parse_t_grid("0:1:0.5") == [0.0, 0.5, 1.0]
    assert parse_t_grid("0.5, 1.3,2") == [0.5, 1.3, 2.0]
    for bad in ("2,1", "1:0:0.5", "0:1", "a,b", ""):
        with pytest.raises(UsageError):
            parse_t_grid(bad)


def test_build_config_defaults(systems_dir):
    cfg = build_config("dim", {"ifs": systems_dir / "swap_pair.json"})
    assert cfg.nmax == 8
    assert cfg.grid == [0.5, 1.3, 2.0, 2.7]
    echo = cfg.echo()
    assert "workers" not in echo and "out" not in echo and "ifs" not in echo
    assert echo["ifs_file"] == "swap_pair.json"


def test_build_config_errors(systems_dir):
    ifs = systems_dir / "swap_pair.json"
    with pytest.raises(UsageError):
        build_config("dim", {})
    with pytest.raises(UsageError):
        build_config("dim", {"ifs": ifs, "workers": 0})
    with pytest.raises(UsageError):
        build_config("pressure", {"ifs": ifs, "t": 1.0, "t_grid": "0,1"})
    with pytest.raises(UsageError):
        build_config("pressure", {"ifs": ifs, "t_grid": "2,1"})
    with pytest.raises(UsageError):
        build_config("measure", {"ifs": ifs, "depth": 9, "nmax": 4})
    with pytest.raises(UsageError):
        build_config("explode", {"ifs": ifs})


def test_build_config_single_t(systems_dir):
    cfg = build_config("pressure", {"ifs": systems_dir / "swap_pair.json", "t": 1.5})
    assert cfg.grid == [1.5]


def test_non_utf8_file(tmp_path):
    bad = tmp_path / "latin.json"
    bad.write_bytes(b'{"name": "caf\xe9", "dimension": 1, "maps": []}')
    with pytest.raises(IfsFormatError) as info:
        parse_ifs_file(bad)
    assert str(info.value).startswith(f"{bad}:")


def test_build_config_reads_policy_types(systems_dir):
    ifs = systems_dir / "swap_pair.json"
    with pytest.raises(UsageError):
        build_config("dim", {"ifs": ifs, "nmax": "8"})
    with pytest.raises(UsageError):
        build_config("dim", {"ifs": ifs, "kind": 3})
    assert build_config("pressure", {"ifs": ifs, "t": 2}).grid == [2.0]


def test_build_config_reads_policy_mutex(tmp_path, systems_dir):
    policy = tmp_path / "policy.json"
    policy.write_text(json.dumps({"param_schema": {}, "mutex": [["seed", "count"]]}), encoding="utf-8")
    ifs = systems_dir / "swap_pair.json"
    with pytest.raises(UsageError) as info:
        build_config("render", {"ifs": ifs, "seed": 1, "count": 10}, policy_path=policy)
    assert "--seed and --count" in str(info.value)
    assert build_config("render", {"ifs": ifs, "seed": 1, "t": 1.0, "t_grid": "0,1"}, policy_path=policy).seed == 1
