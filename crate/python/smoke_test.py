"""Smoke test for the gdiscord_py extension.

Build first:  cargo build -p gdiscord-py --release
then run:     python3 python/smoke_test.py [path/to/target/release]
"""

import math
import os
import shutil
import sys
import tempfile


def load(build_dir):
    lib = os.path.join(build_dir, "libgdiscord_py.so")
    tmp = tempfile.mkdtemp()
    shutil.copy(lib, os.path.join(tmp, "gdiscord_py.so"))
    sys.path.insert(0, tmp)
    import gdiscord_py

    return gdiscord_py


def main():
    root = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
    build_dir = sys.argv[1] if len(sys.argv) > 1 else os.path.join(root, "target", "release")
    g = load(build_dir)

    h1 = 1.5 * math.log2(1.5) + 0.5
    assert abs(g.entropy_h(1.0) - h1) < 1e-12

    c = math.sqrt(3) / 2
    tmsv = g.StandardForm(1.0, 1.0, c, c)
    r = tmsv.report()
    assert abs(r.discord_ab - h1) < 1e-8, r
    assert abs(r.mutual_information - 2 * h1) < 1e-8

    snl = g.StandardForm(2, 2, 1.732, 1.732, units="snl")
    assert abs(snl.report().discord_ab - 1.3765) < 1e-3

    vac = g.StandardForm.vacuum().report()
    assert vac.discord_ab == 0.0 and vac.to_dict()["classical"]

    try:
        g.StandardForm(2, 2, 1.9, 1.9, units="snl").report()
    except g.UnphysicalError as e:
        assert "unphysical" in str(e)
    else:
        raise AssertionError("expected UnphysicalError")

    state = g.StandardForm(1.3, 0.9, 0.5, 0.2)
    closed, _ = g.e_min(state)
    assert abs(closed - g.brute_force_e_min(state)) < 1e-6

    rows = g.attenuation_sweep(tmsv, [i / 20 for i in range(21)])
    discord = [row["discord_ab"] for row in rows]
    assert all(b >= a - 1e-12 for a, b in zip(discord, discord[1:]))

    sim = g.simulate_dual_homodyne(tmsv, 20000, phases=32, seed=5)
    again = g.simulate_dual_homodyne(tmsv, 20000, phases=32, seed=5)
    assert sim["record"].variances() == again["record"].variances()
    est = sim["record"].extract()
    assert abs(est.n - 1.0) < 0.05 and abs(est.c1 - c) < 0.05
    assert abs(g.scan_minimum(sim["phases"], sim["difference"]) - sim["record"].var_xminus) < 1e-12

    ideal = [g.VarianceRecord.ideal(g.StandardForm.tmsv(0.1 * k), rf_hz=1e6 * k, n_samples=10**6) for k in range(1, 6)]
    spectrum, skipped = g.spectrum_sweep(ideal)
    assert len(spectrum) == 5 and not skipped

    matched = g.classify_additivity(tmsv, 0.9, "I-IV", "II-III")
    mismatched = g.classify_additivity(tmsv, 0.9, "I-III", "II-IV")
    assert matched["classification"] == "subadditive"
    assert mismatched["classification"] == "superadditive"

    print("gdiscord_py smoke test: ok")


if __name__ == "__main__":
    main()
