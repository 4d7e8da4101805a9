"""Smoke test for the Python bindings.

Build and install the extension first, for example

    pip install --no-build-isolation -e crates/python

then run ``python crates/python/python/smoke_test.py``.
"""

import math

import hcurl_afem_py as h


def main():
    assert "manufactured_cube" in h.benchmark_names()
    assert "recovery" in h.estimator_names()

    mesh = h.Mesh.cube([0.0, 0.0, 0.0], [1.0, 1.0, 1.0], [2, 2, 2])
    assert mesh.num_tets == 48
    assert math.isclose(mesh.volume(), 1.0)
    finer = mesh.bisect([0, 1, 2])
    assert finer.num_tets > mesh.num_tets

    single = h.Mesh([[0, 0, 0], [1, 0, 0], [0, 1, 0], [0, 0, 1]], [[0, 1, 2, 3]], [0])
    assert single.num_edges == 6
    try:
        h.Mesh([[0, 0, 0], [1, 0, 0], [0, 1, 0], [0, 0, 1]], [[0, 2, 1, 3]], [0])
    except ValueError:
        pass
    else:
        raise AssertionError("negatively oriented element accepted")

    coeff = h.Coefficients([1.0], [1.0])
    ok, violations = h.check_quasimonotone(mesh, coeff, "edge")
    assert ok and not violations

    # A constant field has zero curl and a continuous normal trace, so the
    # recovery parts of the estimator vanish.
    values = [mesh.vertices[b][0] - mesh.vertices[a][0] for a, b in mesh.edges]
    lengths = [math.dist(mesh.vertices[a], mesh.vertices[b]) for a, b in mesh.edges]
    ind = h.recovery_indicators(mesh, coeff, [v / l for v, l in zip(values, lengths)])
    assert max(ind.eta_perp) < 1e-12 and max(ind.eta_0) < 1e-12

    bench = h.Benchmark("manufactured_cube")
    sol = bench.solve()
    assert sol.ndof == bench.mesh.num_edges
    ind = sol.estimate("recovery")
    assert len(ind) == bench.mesh.num_tets and ind.eta > 0.0
    marked = h.dorfler_mark(ind.eta_k, 0.2, bench.mesh.h())
    assert marked

    hist = h.amr_loop(bench, "recovery", max_dof=3000)
    ndofs = [lvl["ndof"] for lvl in hist["levels"]]
    assert len(ndofs) >= 2 and ndofs == sorted(ndofs)
    assert all(lvl["rel_error"] is not None for lvl in hist["levels"])

    for name, lhs, rhs, defect in h.identity_suite():
        assert defect < 1e-8, (name, lhs, rhs, defect)

    print(f"smoke test passed: {len(ndofs)} levels, final eta {hist['levels'][-1]['eta']:.4e}")


if __name__ == "__main__":
    main()
