"""End-to-end check of the Python bindings.

Build and install first:  pip install --no-build-isolation -e crates/py
"""

import monotest_py as mt


def main() -> None:
    # Majority on 9 inputs with one input negated: 70 of 512 points must change.
    weights = [1.0] * 9
    weights[4] = -1.0
    d = mt.distance_to_monotone(weights, 0.0)
    assert d["method"] == "drop_negative_exact", d
    assert d["count"] == 70, d

    run = mt.mono_test(weights, 0.0, 0.05, seed=1)
    assert run["verdict"] in ("monotone", "non_monotone")
    assert run["queries"]["total"] == sum(run["queries"]["by_subroutine"].values())
    if run["verdict"] == "non_monotone":
        cert = run["certificate"]
        assert mt.verify_certificate(weights, 0.0, cert["point"], cert["coordinate"])

    # A monotone LTF can never be rejected.
    mono = mt.mono_test([0.5, 1.0, 2.0, 0.25], 0.3, 0.1, seed=7)
    assert mono["verdict"] == "monotone", mono

    inst = mt.generate("planted:0.25", 64, seed=3)
    assert len(inst["spec"]["weights"]) == 64
    assert inst["distance"]["value"] >= 0.0

    a = mt.run_suite("monotone", [8, 16], 3, 0.1, seed=5, threads=1)
    b = mt.run_suite("monotone", [8, 16], 3, 0.1, seed=5, threads=2)
    assert a["summary"]["non_monotone"] == 0
    assert a["csv"] == b["csv"]
    assert a["csv"].splitlines()[0].startswith("family,n,epsilon,seed,verdict")

    print("smoke test passed")


if __name__ == "__main__":
    main()
