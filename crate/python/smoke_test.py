"""Smoke test for the Python bindings.

Build and install first:  pip install --no-build-isolation ./crates/py
Then run:                 python python/smoke_test.py
"""

import sys

import tensorbound_py as tb


def check(cond, what):
    if not cond:
        sys.exit(f"FAIL: {what}")
    print(f"ok    {what}")


def main():
    cw2 = tb.Tensor.named("cw", 2)
    check(cw2.dims == (4, 4, 4) and len(cw2) == 9, "CW_2 has dims 4x4x4 and 9 terms")
    check(tb.Tensor.from_json(cw2.to_json()) == cw2, "JSON round trip")
    check(tb.Tensor.from_text(cw2.to_text()) == cw2, "text round trip")

    t = tb.Tensor((2, 1, 1), [(0, 0, 0, "1/2"), (1, 0, 0)])
    check(t.terms() == [(0, 0, 0, "1/2"), (1, 0, 0, "1/1")], "explicit construction keeps coefficients")
    try:
        tb.Tensor((1, 1, 1), [(0, 0, 5)])
        check(False, "out-of-range term is rejected")
    except tb.TensorboundError:
        check(True, "out-of-range term is rejected")

    r = tb.independence(cw2, power=2)
    check(r["exact"] and r["witness"]["size"] >= 4, "I(CW_2^2) is exact and at least I(CW_2)^2")

    g = tb.Group("C3")
    s = tb.sumfree(g, n=2)
    check(s["exact"] and len(s["set"]["triples"]) == 4, "largest sum-free set in C3^2 has 4 triples")

    cw1 = tb.Tensor.named("cw", 1)
    image = tb.apply_map(cw1, [0, 0, 0], [0, 0, 0], [0, 1, 1])
    check(len(image) == 3, "weights on z keep the three z0 terms of CW_1")
    v = tb.verify_degeneration(cw1, [0, 0, 0], [0, 0, 0], [0, 1, 1], cw1)
    check(not v["valid"] and len(v["violations"]) == 3, "wrong claim yields three violations")

    corners = tb.corner_bound(tb.Tensor.named("cw", 5))
    check(corners["claims"]["below_q"], "corner bound is below q for CW_5")
    omega = tb.omega_lower("3", "2.9")
    check(omega["claims"]["above_two"], "omega lower bound exceeds 2")
    e = tb.embed(cw1, g.tensor(), monomial=True)
    check(e["outcome"]["status"] == "found", "CW_1 is a monomial degeneration of the C3 tensor")

    rep = tb.reproduce("lp-suite")
    check(rep["status"] == "match", "lp-suite reproduces")
    print("all checks passed")


if __name__ == "__main__":
    main()
