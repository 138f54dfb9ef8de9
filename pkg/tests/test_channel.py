import numpy as np
import pytest

from glyphcode import channel, fixtures
from glyphcode.codebook import CharacterEntry, ManifoldPoint, PerturbedGlyphEntry
from glyphcode.crc import hamming_distance
from glyphcode.errors import ContractViolation
from glyphcode.outline import GlyphOutline, outline_distance


@pytest.fixture(scope="module")
def entry():
    return fixtures.chain_entry("a", 5)


def test_recognize_exact_match(entry):
    f = entry.glyphs[3].outline
    res = channel.recognize_vector(f, entry)
    assert res.argmax_index == 3
    assert res.probabilities[3] == 1.0
    assert res.probabilities.sum() == pytest.approx(1.0)


def test_recognize_equidistant_tiebreak():
    sq = GlyphOutline(np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]))
    g0 = PerturbedGlyphEntry(0, ManifoldPoint(0, 0), sq, 1.0)
    g1 = PerturbedGlyphEntry(1, ManifoldPoint(1, 0), sq, 1.0)
    e = CharacterEntry("q", g0, (g0, g1))
    shifted = GlyphOutline(sq.vertices + np.array([[0.0, 0.0], [0.0, 0.1], [0.0, 0.0], [0.0, -0.1]]))
    res = channel.recognize_vector(shifted, e)
    assert res.argmax_index == 0
    assert res.probabilities[0] == pytest.approx(0.5)
    assert res.probabilities[1] == pytest.approx(0.5)


def test_recognition_matches_scalar_distance(entry):
    # vectorized path must agree with the per-pair distance function
    f = GlyphOutline(entry.glyphs[2].outline.vertices + 0.003)
    res = channel.recognize_vector(f, entry)
    d = np.array([outline_distance(f, g.outline) for g in entry.glyphs])
    assert res.argmax_index == int(np.argmin(d))
    expect = (1.0 / d) / (1.0 / d).sum()
    assert np.allclose(res.probabilities, expect)


def test_simulate_zero_noise(entry):
    params = channel.ChannelParams(sigma=0.0)
    res = channel.simulate_recognition(2, entry, params)
    assert res.argmax_index == 2 and res.true_index == 2
    assert res.probabilities[2] == 1.0


def test_simulate_reproducible(entry):
    params = channel.ChannelParams(seed=5)
    a = channel.simulate_recognition(1, entry, params, trial=3)
    b = channel.simulate_recognition(1, entry, params, trial=3)
    assert np.array_equal(a.probabilities, b.probabilities)
    c = channel.simulate_recognition(1, entry, params, trial=4)
    assert not np.array_equal(a.probabilities, c.probabilities)


def test_default_sigma_accuracy(entry):
    params = channel.ChannelParams(trials=1000)
    accs = channel.per_glyph_accuracy([g.outline for g in entry.glyphs], params)
    assert accs.min() >= 0.90


def test_identical_glyphs_chance_accuracy(entry):
    o = entry.glyphs[0].outline
    params = channel.ChannelParams(trials=400)
    acc = channel.accuracy_oracle([o, GlyphOutline(o.vertices.copy())], params)
    assert acc == pytest.approx(0.5, abs=0.06)


def test_accuracy_monotone_in_sigma(entry):
    outlines = [g.outline for g in entry.glyphs]
    accs = [
        channel.accuracy_oracle(outlines, channel.ChannelParams(sigma=s, trials=400))
        for s in (0.004, 0.012, 0.05)
    ]
    assert accs[0] >= accs[1] >= accs[2]


def test_inject_errors_counts(entry):
    entries = [entry] * 5
    codeword = (0, 1, 2, 3, 4)
    params = channel.ChannelParams(seed=11)
    for count in (0, 1, 2):
        vec, table = channel.inject_errors(codeword, entries, count, params)
        assert hamming_distance(vec, codeword) == count
        assert len(table) == 5
        for row in table:
            assert row.sum() == pytest.approx(1.0)
    with pytest.raises(ContractViolation):
        channel.inject_errors(codeword, entries, 6, params)


def test_channel_params_validation():
    with pytest.raises(ContractViolation):
        channel.ChannelParams(sigma=-1.0)
    with pytest.raises(ContractViolation):
        channel.ChannelParams(trials=0)
