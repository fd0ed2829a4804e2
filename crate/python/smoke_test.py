"""Smoke test for the Python extension.

Build and install with
    pip install -e crates/py --no-build-isolation
then run
    python python/smoke_test.py
"""

import json
import sys

import gsp4_ssc_py as g


def main() -> int:
    x = g.PAdic(3, 5, 9)
    assert x.valuation == -2, x
    assert x * x.inverse() == g.PAdic(3, 1)

    for eps in (1, -1):
        m = g.Model(3, t=1, eps=eps)
        assert m.support_size == 576
        assert m.eval(m.d) == "1"
        assert m.eval(m.d * g.GSp4.atkin_lehner(3, 5)) == str(eps)
        assert m.inner_product("new", "new") == "576"
        assert m.inner_product("minimal", "minimal") == "1"

    assert [g.dim_astar(n) for n in range(13)] == [0, 0, 0, 0, 0, 1, 2, 4, 6, 9, 12, 16, 20]
    assert g.formal_degree(3) == ("320", 640)

    for check in ("cosets", "hecke", "j0-min", "bessel"):
        reports = json.loads(g.run_check(check))
        bad = [r for r in reports if not r["pass"]]
        assert not bad, bad
        print(f"{check}: {len(reports)} reports pass")

    try:
        g.GSp4(3, [[1, 1, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]])
    except ValueError:
        pass
    else:
        raise AssertionError("accepted a non-symplectic matrix")

    print("smoke test ok")
    return 0


if __name__ == "__main__":
    sys.exit(main())
