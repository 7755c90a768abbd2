import pytest

from tsd_machine.bench import bench_program, measure, run_benchmark
from tsd_machine.common.utils import fit_linear
from tsd_machine.machine import run_program
from tsd_machine.syntax import parse, typecheck
from tsd_machine.tsd_types import INT, BenchSpec

SHAPES = ["chain", "tree", "field", "fold", "map", "alt-sum"]


@pytest.mark.parametrize("shape", SHAPES)
def test_bench_programs_typecheck(shape):
    assert typecheck(parse(bench_program(BenchSpec(shape=shape, size=8, steps=2)))) == INT


@pytest.mark.parametrize("shape", SHAPES)
def test_transitions_grow_with_size(shape):
    rows = [measure(BenchSpec(shape=shape, size=size, steps=2)) for size in (4, 8, 16)]
    assert all(row.outcome == "final" for row in rows)
    totals = [row.total_transitions for row in rows]
    assert totals == sorted(set(totals))


def test_chain_propagation_is_linear():
    sizes = [10, 20, 40, 80]
    rows = [measure(BenchSpec(shape="chain", size=size, steps=3)) for size in sizes]
    _, _, r2 = fit_linear(sizes, [row.propagation_transitions for row in rows])
    assert r2 >= 0.99
    _, _, r2 = fit_linear(sizes, [row.total_transitions for row in rows])
    assert r2 >= 0.99


def test_alt_sum_is_linear_in_steps():
    sizes = [10, 20, 40, 80]
    rows = [measure(BenchSpec(shape="alt-sum", size=size)) for size in sizes]
    _, _, r2 = fit_linear(sizes, [row.total_transitions for row in rows])
    assert r2 >= 0.99


FULL_SIZES = [100, 1000, 10000]


@pytest.mark.slow
def test_chain_is_linear_at_full_size():
    rows = [measure(BenchSpec(shape="chain", size=size, steps=2)) for size in FULL_SIZES]
    assert all(row.outcome == "final" for row in rows)
    _, _, r2 = fit_linear(FULL_SIZES, [row.propagation_transitions for row in rows])
    assert r2 >= 0.99
    _, _, r2 = fit_linear(FULL_SIZES, [row.total_transitions for row in rows])
    assert r2 >= 0.99


@pytest.mark.slow
def test_alt_sum_is_linear_at_full_size():
    rows = [measure(BenchSpec(shape="alt-sum", size=size)) for size in FULL_SIZES]
    assert all(row.outcome == "final" for row in rows)
    _, _, r2 = fit_linear(FULL_SIZES, [row.total_transitions for row in rows])
    assert r2 >= 0.99


def test_chain_final_value():
    # every link lags one step behind its predecessor, the source counts up from 0
    outcome = run_program(bench_program(BenchSpec(shape="chain", size=2, steps=3)))
    assert outcome.observations == [3]


def test_run_benchmark_prints_the_fit(capsys):
    rows = run_benchmark("field", [3, 6, 12], steps=1)
    assert [row.size for row in rows] == [3, 6, 12]
    assert "R²" in capsys.readouterr().out


def test_fit_linear():
    slope, intercept, r2 = fit_linear([1, 2, 3], [3, 5, 7])
    assert slope == pytest.approx(2.0)
    assert intercept == pytest.approx(1.0)
    assert r2 == pytest.approx(1.0)
    with pytest.raises(ValueError):
        fit_linear([1], [1])
