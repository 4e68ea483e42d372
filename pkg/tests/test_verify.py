
from treeminors import verify
from treeminors.oracle import random_instance
from treeminors.verify import MAX_DUMPS, optimization_sweep, verify_exhaustive, verify_random


def test_small_exhaustive_sweep_passes():
    summary = verify_exhaustive(5)
    assert summary.ok, summary.to_json()
    assert summary.trees == 1 + 1 + 3 + 16 + 125
    assert summary.instances == 1 + 3 + 3 * 7 + 16 * 15 + 125 * 31
    assert all(f.checked > 0 for f in summary.families.values())


def test_parallel_merge_is_deterministic():
    a = verify_random(30, seed=11, max_n=8)
    b = verify_random(30, seed=11, max_n=8, workers=2)
    assert a.to_json() == b.to_json()
    assert a.ok


def test_failures_are_counted_and_dumped(monkeypatch):
    monkeypatch.setattr(verify, "graham_pollak_det", lambda n: -1)
    summary = verify_exhaustive(5, min_n=4)
    fam = summary.families["full_determinant"]
    assert not summary.ok
    assert fam.failed == 16 + 125
    assert len(fam.dumps) == MAX_DUMPS
    dump = fam.dumps[0].to_json()
    assert dump["provenance"] == "exhaustive_pruefer(4)" and len(dump["edges"]) == 3


def test_optimization_sweep():
    picks = [random_instance(i, max_n=7) for i in range(10)]
    result = optimization_sweep(picks, perturbations=10, seed=1)
    assert result.ok and result.checked == 10
