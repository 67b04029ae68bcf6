"""Smoke test for the fpmusic_py extension.

    maturin build --release -m crates/python/Cargo.toml -o target/wheels
    pip install target/wheels/fpmusic_py-*.whl
    python python/smoke_test.py
"""

import math

import fpmusic_py as fm


def main():
    fp16 = fm.PrecisionFormat("fp16")
    assert fp16.unit_roundoff == 2.0**-11
    assert fp16.max_finite == 65504.0
    assert fp16.round(1.0 + 2.0**-11) == 1.0
    assert fp16.add(2048.0, 1.0) == 2048.0
    try:
        fp16.round(70000.0)
    except fm.FpmusicError:
        pass
    else:
        raise AssertionError("fp16 overflow not reported")

    b = [0.1 * i for i in range(1, 21)]
    c = [1.0 / i for i in range(1, 21)]
    exact = math.fsum(x * y for x, y in zip(b, c))
    y, costs = fm.Scheme("mp:fp16:fp64:B=2").dot_with_costs(b, c)
    assert abs(y - exact) < 20 * 2.0**-11 * exact
    assert costs["weighted_adds"] == 46.0
    ap = fm.Scheme("ap:fp64,fp32,fp16:gamma=2^-16")
    assert ap.is_adaptive and abs(ap.dot(b, c) - exact) < 1e-4

    assert fm.costs("fp64")["weighted_adds"] == 738400.0
    assert fm.costs(str(ap)) is None

    a = fm.real_steering(10.0, 8)
    assert abs(sum(x * x for x in a) - 8.0) < 1e-12

    trial = fm.estimate(snr_db=20.0, seed=7)
    assert len(trial["true_doas"]) == 5
    for v in trial["variants"]:
        err = max(abs(x - t) for x, t in zip(v["doas"], trial["true_doas"]))
        print(f'{v["method"]:9s} {v["scheme"]:32s} max error {err:.3f} deg')

    rows = fm.sweep([20.0], trials=3, methods="ru_music", schemes="fp64")
    assert len(rows) == 1 and rows[0]["failures"] == 0
    print("smoke test ok")


if __name__ == "__main__":
    main()
