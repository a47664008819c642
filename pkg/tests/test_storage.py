from concurrent.futures import ThreadPoolExecutor

from storage import ResultStorage, result_storage


def test_records_by_category():
    store = ResultStorage()
    store.add_record("battery", {"test": "weak11_B", "pass": True})
    store.add_records("blocks", [{"m": 1}, {"m": 2}])
    assert store.categories() == ["battery", "blocks"]
    assert store.get_records("blocks") == [{"m": 1}, {"m": 2}]
    assert store.get_records("missing") == []
    tagged = store.get_records()
    assert tagged[0] == {"test": "weak11_B", "pass": True, "category": "battery"}
    assert len(tagged) == 3


def test_records_are_copies():
    store = ResultStorage()
    record = {"m": 1}
    store.add_record("blocks", record)
    record["m"] = 9
    store.get_records("blocks")[0]["m"] = 7
    assert store.get_records("blocks") == [{"m": 1}]


def test_jsonl_roundtrip(tmp_path):
    store = ResultStorage()
    store.add_records("battery", [{"seed": 1, "lhs": 0.5}, {"seed": 2, "lhs": 0.25}])
    store.add_record("blocks", {"m": 3})
    path = tmp_path / "results.jsonl"
    assert store.dump_jsonl(str(path)) == 3
    first = path.read_text().splitlines()[0]
    assert first == '{"category": "battery", "lhs": 0.5, "seed": 1}'
    loaded = ResultStorage()
    assert loaded.load_jsonl(str(path)) == 3
    assert loaded.categories() == ["battery", "blocks"]
    assert loaded.get_records("blocks") == [{"m": 3}]
    assert store.to_jsonl("blocks") == '{"m": 3}\n'
    assert ResultStorage().to_jsonl() == ""


def test_untagged_lines_use_the_default_category(tmp_path):
    path = tmp_path / "plain.jsonl"
    path.write_text('{"a": 1}\n\n{"a": 2}\n')
    store = ResultStorage()
    assert store.load_jsonl(str(path), category="plain") == 2
    assert store.get_records("plain") == [{"a": 1}, {"a": 2}]


def test_concurrent_writers():
    store = ResultStorage()
    with ThreadPoolExecutor(max_workers=8) as pool:
        list(pool.map(lambda i: store.add_record("t", {"i": i}), range(500)))
    assert sorted(r["i"] for r in store.get_records("t")) == list(range(500))


def test_global_instance_is_cleared_between_tests():
    assert result_storage.categories() == []
    result_storage.add_record("x", {"a": 1})
    assert result_storage.get_records("x") == [{"a": 1}]
