import json

import pytest

from nmt_adapter.models import CheckpointSet, ModelError
from nmt_adapter.sweep import read_sources, sweep

from .conftest import BASE_TABLE


def make_checkpoints(tmp_path, n):
    paths = []
    for i in range(n):
        p = tmp_path / f"ck{i}.tsv"
        p.write_text(BASE_TABLE + f"room\tkamer{i}\n", encoding="utf-8")
        paths.append(f"c{i}={p}")
    return CheckpointSet.parse(",".join(paths))


def test_read_sources_plain_and_jsonl(tmp_path):
    plain = tmp_path / "src.txt"
    plain.write_text("one\ntwo\n")
    assert read_sources(plain) == ["one", "two"]

    suite = tmp_path / "suite.jsonl"
    rows = [
        {"id": "a", "base_source": "b1", "variant_source": "v1"},
        {"id": "b", "source": "s1"},
        {"id": "c", "base_source": "b1", "variant_source": "v2"},
    ]
    suite.write_text("".join(json.dumps(r) + "\n" for r in rows))
    assert read_sources(suite) == ["b1", "v1", "s1", "v2"]


def test_sweep_ten_checkpoints(tmp_path):
    suite = tmp_path / "suite.txt"
    suite.write_text("the king sleeps in room .\nhello .\n")
    checkpoints = make_checkpoints(tmp_path, 10)
    out = tmp_path / "out"
    manifest = sweep(checkpoints, suite, out)
    assert len(manifest["checkpoints"]) == 10
    assert manifest["skipped"] == []
    for i in range(10):
        hyp = out / f"c{i}.hyp.txt"
        assert hyp.exists()
        lines = hyp.read_text().splitlines()
        assert len(lines) == 2
        assert f"kamer{i}" in lines[0]
    saved = json.loads((out / "manifest.json").read_text())
    assert [c["label"] for c in saved["checkpoints"]] == [f"c{i}" for i in range(10)]


def test_sweep_zero_checkpoints(tmp_path):
    suite = tmp_path / "suite.txt"
    suite.write_text("x\n")
    with pytest.raises(ModelError):
        sweep(CheckpointSet(()), suite, tmp_path / "out")


def test_sweep_skips_missing_checkpoint(tmp_path, capsys):
    suite = tmp_path / "suite.txt"
    suite.write_text("the king .\n")
    good = tmp_path / "good.tsv"
    good.write_text(BASE_TABLE)
    checkpoints = CheckpointSet.parse(
        f"c0={good},c1={tmp_path / 'missing.tsv'},c2={good}"
    )
    manifest = sweep(checkpoints, suite, tmp_path / "out")
    assert [c["label"] for c in manifest["checkpoints"]] == ["c0", "c2"]
    assert [s["label"] for s in manifest["skipped"]] == ["c1"]
    assert "skipping checkpoint c1" in capsys.readouterr().err


def test_sweep_empty_suite(tmp_path):
    suite = tmp_path / "suite.txt"
    suite.write_text("")
    with pytest.raises(ModelError):
        sweep(make_checkpoints(tmp_path, 1), suite, tmp_path / "out")
