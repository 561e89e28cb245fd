"""Smoke test for the aor_precond extension module."""

import os
import tempfile

import aor_precond as ap


def main():
    a = ap.Matrix([[1.0, -0.4, 0.0], [-0.3, 1.0, -0.2], [0.0, -0.5, 1.0]])
    assert a.order == 3 and len(a) == 3
    assert a[0, 1] == -0.4

    c = ap.classify(a)
    assert c["is_z"] and c["is_l"] and c["is_irreducible"] and c["is_nonsingular_m"]

    t = ap.iteration_matrix(a, 0.0, 1.0)
    rho = ap.spectral_radius(t)
    assert 0.0 < rho < 1.0, rho

    spec = ap.PreconditionerSpec("variant=q13 alpha=1")
    assert spec.variant == 13
    q = spec.build_q(a)
    pa = ap.precondition(a, q)
    assert pa.order == 3

    rep = ap.compare(a, spec, 0.5, 0.75, "A,B")
    assert rep["rho_pre"] <= rep["rho_base"] < 1.0
    assert "refuted" not in rep["verdicts"].values(), rep

    m = ap.gen_m_matrix(6, 0.5, seed=7)
    assert ap.classify(m)["is_nonsingular_m"]

    ok, report = ap.replay_counterexamples()
    assert ok, report

    s = ap.sweep("5,0.5,m,1", "variant=q4 alpha=0.5", instances=3, theorems="B")
    assert s["rows"] == 3 * 20 and s["refuted"] == 0, s

    with tempfile.TemporaryDirectory() as d:
        path = os.path.join(d, "a.mtx")
        ap.save_matrix(path, a, coordinate=True)
        assert ap.load_matrix(path) == a

    try:
        ap.Matrix([[1.0, 2.0]])
    except ValueError:
        pass
    else:
        raise AssertionError("non-square matrix accepted")

    print("smoke test passed")


if __name__ == "__main__":
    main()
