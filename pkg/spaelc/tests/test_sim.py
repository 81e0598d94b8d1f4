"""
Tests for the Monte Carlo FER harness.
"""

import pytest


def _config(code, decoder="spa", params=None, **kwargs):
    from spaelc.decode import DecodeParams
    from spaelc.sim import SimConfig

    return SimConfig(
        code=code,
        decoder=decoder,
        params=params or DecodeParams.for_spa(50),
        **kwargs,
    )


def test_frame_tally_adds_fieldwise():
    from spaelc.sim import FrameTally

    a = FrameTally(frames=1, frame_errors=1, spa_messages=10)
    b = FrameTally(frames=2, undetected=1, iterations=7)
    assert a + b == FrameTally(3, 1, 1, 10, 0, 7, 0)


def test_sim_config_validation(ext_hamming):
    with pytest.raises(ValueError):
        _config(ext_hamming, decoder="bp")
    with pytest.raises(ValueError):
        _config(ext_hamming, min_frame_errors=0)
    with pytest.raises(ValueError):
        _config(ext_hamming, transmit_mode="ones")
    with pytest.raises(ValueError):
        _config(ext_hamming, decoder="spa_pd")


def test_high_snr_has_no_errors(ext_hamming):
    from spaelc.sim import run_point

    config = _config(ext_hamming, min_frame_errors=5, max_frames=200, batch_size=64)
    point = run_point(config, 20.0)
    assert point.frames == 200
    assert point.frame_errors == 0 and point.fer == 0.0
    assert point.budget_exceeded
    assert point.avg_iterations == 1.0
    assert point.avg_spa_messages == 2 * ext_hamming.H.weight
    assert point.avg_checkmsg_only == ext_hamming.H.weight


def test_stops_between_batches(ext_hamming):
    from spaelc.sim import run_point

    config = _config(ext_hamming, min_frame_errors=3, max_frames=10_000, batch_size=32)
    point = run_point(config, -2.0)
    assert point.frame_errors >= 3
    assert point.frames % 32 == 0
    assert not point.budget_exceeded
    assert 0 < point.fer <= 1
    assert point.detected + point.undetected == point.frame_errors


def test_results_do_not_depend_on_workers(golay):
    from spaelc.sim import run_point

    serial = _config(golay, min_frame_errors=10, max_frames=640, batch_size=32, master_seed=3)
    parallel = _config(golay, min_frame_errors=10, max_frames=640, batch_size=32, master_seed=3, workers=3)
    assert run_point(serial, 2.0) == run_point(parallel, 2.0)


def test_curve_and_seed(ext_hamming):
    from spaelc.sim import run_curve

    config = _config(ext_hamming, ebn0_db=(0.0, 2.0), min_frame_errors=20, max_frames=2000, master_seed=9)
    first = run_curve(config)
    assert [pt.ebn0_db for pt in first] == [0.0, 2.0]
    assert first == run_curve(config)
    assert first[0].fer >= first[1].fer


def test_random_codewords_decode_at_high_snr(golay):
    from spaelc.sim import run_point

    config = _config(golay, transmit_mode="random", max_frames=64, min_frame_errors=1)
    point = run_point(config, 15.0)
    assert point.frame_errors == 0


def test_spa_pd_and_spa_elc_run(golay):
    from spaelc.autgroup import psl2_generators
    from spaelc.decode import DecodeParams
    from spaelc.sim import run_point

    params = DecodeParams(I1=1, I2=20, I3=2, alpha0=0.5, p=1)
    pd = _config(golay, "spa_pd", params, generators=psl2_generators(23), max_frames=64, min_frame_errors=1000)
    elc = _config(golay, "spa_elc", params, max_frames=64, min_frame_errors=1000)
    for config in (pd, elc):
        point = run_point(config, 2.0)
        assert point.frames == 64
        assert 0 <= point.fer < 1
    assert run_point(elc, 2.0).avg_elc_ops > 0


def _binomial_se(point):
    return (point.fer * (1 - point.fer) / point.frames) ** 0.5


@pytest.mark.slow
def test_spa_elc_beats_spa_on_golay(golay):
    """At 3 dB with T = 600, random ELCs lower both FER and messages per frame."""
    from spaelc.decode import DecodeParams
    from spaelc.sim import run_point

    common = dict(min_frame_errors=50, max_frames=20_000, master_seed=1, workers=4)
    spa = run_point(_config(golay, "spa", DecodeParams.for_spa(600), **common), 3.0)
    elc_params = DecodeParams(I1=1, I2=600, I3=1, p=1)
    elc = run_point(_config(golay, "spa_elc", elc_params, **common), 3.0)

    assert spa.frame_errors >= 50 and elc.frame_errors >= 50
    gap = spa.fer - elc.fer
    assert gap > 3 * (_binomial_se(spa) ** 2 + _binomial_se(elc) ** 2) ** 0.5
    assert elc.avg_spa_messages < spa.avg_spa_messages
    assert elc.avg_elc_ops > 0


def test_sweep_picks_a_p(ext_hamming):
    from spaelc.decode import DecodeParams
    from spaelc.sim import sweep_p

    params = DecodeParams(I1=1, I2=10, I3=1)
    config = _config(ext_hamming, "spa_elc", params, ebn0_db=(1.0,), max_frames=128, min_frame_errors=1000)
    report = sweep_p(config, [0, 1, 2])
    assert report.p_values == (0, 1, 2)
    assert report.best_p in (0, 1, 2)
    assert set(report.points) == {0, 1, 2}
    assert report.points[0][0].avg_elc_ops == 0
    assert report.to_json()["best_p"] == report.best_p


def test_sweep_rejects_bad_p_values(ext_hamming):
    from spaelc.decode import DecodeParams
    from spaelc.sim import sweep_p

    config = _config(ext_hamming, "spa_elc", DecodeParams(I2=5), ebn0_db=(1.0,), max_frames=10)
    with pytest.raises(ValueError):
        sweep_p(config, [1, 2, 1])
    with pytest.raises(ValueError):
        sweep_p(config, [-1])
    with pytest.raises(ValueError):
        sweep_p(_config(ext_hamming, ebn0_db=(1.0,), max_frames=10), [1])


def test_compare_transmit_modes(ext_hamming):
    from spaelc.sim import compare_transmit_modes

    config = _config(ext_hamming, max_frames=128, min_frame_errors=1000)
    zero, rand, z = compare_transmit_modes(config, 20.0)
    assert zero.frame_errors == rand.frame_errors == 0
    assert z == 0.0
    zero, rand, z = compare_transmit_modes(config, 1.0)
    assert abs(z) < 5


if __name__ == "__main__":
    pytest.main([__file__])
