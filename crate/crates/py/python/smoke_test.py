"""Smoke test for the compiled extension.

Build it first, for example with
    maturin develop -m crates/py/Cargo.toml --features extension-module
or
    cargo build --release -p robin-pcap-py --features extension-module
    cp target/release/librobin_pcap_py.so robin_pcap_py.so
and run this script with the module on the import path.
"""

import math

import robin_pcap_py as rp


def main():
    params = rp.Params(3, 2.0, 1.0)
    assert abs(rp.ball_energy(params, 1.0) - 4 * math.pi) < 1e-12
    assert abs(rp.ball_energy(params, 2.0) - 16 * math.pi / 3) < 1e-10
    assert abs(rp.critical_radius(rp.Params(3, 2.0, 1.5)) - 2.0) < 1e-9

    report = rp.regime_classify(rp.Params(3, 2.5, 1.0))
    print("regime", report["regime"], "beta1", report["beta1"], "beta2", report["beta2"])

    inner = rp.StarShape((0.0, 0.0), 1.0)
    outer = rp.StarShape((0.0, 0.0), 2.0)
    result = rp.solve_pair(inner, outer, 2.0, 1.0, 128, 16)
    exact = rp.ball_energy(rp.Params(2, 2.0, 1.0), 2.0)
    rel = abs(result["energy"] - exact) / exact
    print("concentric energy", result["energy"], "exact", exact, "rel", rel)
    assert rel < 1e-2 and result["converged"]

    try:
        rp.Params(2, 0.5, 1.0)
    except ValueError as err:
        print("rejected p <= 1:", err)
    else:
        raise AssertionError("p <= 1 accepted")
    print("ok")


if __name__ == "__main__":
    main()
