import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from fsfw.graphs import build_ball, complete_graph, product
from fsfw.rng import EstimatorReport, RngStream, Tally, UniformBuffer, run_chunked
from fsfw.walks import random_walk


def test_identical_streams_reproduce_draws():
    a = RngStream(42, 3).generator().random(100)
    b = RngStream(42, 3).generator().random(100)
    assert a.tobytes() == b.tobytes()


def test_distinct_indices_and_children_differ():
    base = RngStream(42)
    draws = {base.generator().random(8).tobytes(), RngStream(42, 1).generator().random(8).tobytes(),
             base.child(0).generator().random(8).tobytes(), base.child(1).generator().random(8).tobytes(),
             base.child(0).child(0).generator().random(8).tobytes()}
    assert len(draws) == 5


def test_independent_streams_are_uncorrelated():
    x = RngStream(7, 0).generator().random(200_000)
    y = RngStream(7, 1).generator().random(200_000)
    assert abs(np.corrcoef(x, y)[0, 1]) < 4 / math.sqrt(len(x))


def test_seed_validation():
    with pytest.raises(ValueError):
        RngStream(-1)
    with pytest.raises(ValueError):
        RngStream(2**64)
    with pytest.raises(ValueError):
        RngStream(1, -2)


@pytest.mark.parametrize("block", [1, 3, 17, 1 << 16])
def test_draw_sequence_does_not_depend_on_block_size(block):
    g = product(build_ball(3, 3), complete_graph(3), 0.7)
    ref = RngStream(9).uniforms()
    buf = UniformBuffer(RngStream(9).generator(), block)
    for start in (0, 5, 11):
        assert random_walk(g, start, [60, 61], buf).vertices == random_walk(g, start, [60, 61], ref).vertices


@given(st.lists(st.floats(-1e3, 1e3), min_size=2, max_size=50), st.integers(1, 49))
def test_tally_matches_numpy_and_merges(values, cut):
    cut = min(cut, len(values) - 1)
    whole = Tally().add_array(np.array(values))
    merged = Tally().add_array(np.array(values[:cut])).merge(Tally().add_array(np.array(values[cut:])))
    assert merged.count == whole.count
    assert merged.total == pytest.approx(whole.total, abs=1e-6)
    rep = whole.report()
    assert rep.estimate == pytest.approx(np.mean(values), abs=1e-9)
    expected_se = np.std(values, ddof=1) / math.sqrt(len(values))
    assert rep.stderr == pytest.approx(expected_se, rel=1e-6, abs=1e-6)
    assert rep.ci_low <= rep.estimate <= rep.ci_high


def test_report_interval_uses_99_percent():
    rep = Tally().add_array(np.array([0.0, 1.0] * 50)).report()
    assert isinstance(rep, EstimatorReport)
    assert rep.confidence == 0.99
    assert (rep.ci_high - rep.estimate) / rep.stderr == pytest.approx(2.5758293, rel=1e-6)
    assert list(rep.as_dict()) == ["estimate", "samples", "stderr", "ci_low", "ci_high", "confidence"]
    with pytest.raises(ValueError):
        Tally().report()


def test_run_chunked_is_worker_independent():
    def chunk(stream, size):
        return stream.generator().random(size)
    one = run_chunked(5000, RngStream(3), chunk, workers=1, chunk_size=700)
    four = run_chunked(5000, RngStream(3), chunk, workers=4, chunk_size=700)
    assert one.tobytes() == four.tobytes()
    assert len(one) == 5000
    with pytest.raises(ValueError):
        run_chunked(0, RngStream(3), chunk)
