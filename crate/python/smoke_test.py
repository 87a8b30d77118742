"""Smoke test for the lognls extension module.

Build and install first:  pip install --no-build-isolation ./crates/python
"""

import math
import os
import tempfile

import lognls


def close(a, b, tol):
    assert abs(a - b) <= tol * max(1.0, abs(b)), (a, b)


def main():
    close(lognls.gamma_star(3), 0.9137105825219569, 1e-12)
    line, half, kirchhoff = lognls.d_values(0.0)
    close(kirchhoff, math.e * math.sqrt(math.pi) / 2, 1e-14)

    phi = lognls.GraphState.stationary(3, 1.2, 0.0)
    assert (phi.N, phi.M) == (3, 2000)
    interior, jump = lognls.stationary_residual(phi, 0.0, 1.2)
    assert interior < 1e-3 and jump < 1e-3
    close(phi.action(0.0, 1.2), lognls.action_closed_form(3, 1.2, 0.0), 1e-4)
    f = phi.functionals(0.0, 1.2)
    close(2 * f["action"], f["nehari"] + f["mass"], 1e-12)

    with tempfile.TemporaryDirectory() as d:
        path = os.path.join(d, "phi.json")
        phi.save(path)
        assert lognls.GraphState.load(path) == phi

    out = lognls.evolve(phi, 1.2, dt=1e-3, horizon=0.5, stride=250)
    assert len(out["states"]) == 3
    assert max(out["mass_drift"]) < 1e-9

    u = lognls.GraphState.random(3, seed=4, length=10.0, points=500)
    r = lognls.rearrange(u)
    close(r.mass(), u.mass(), 1e-12)
    p = lognls.nehari_project(u, 0.0, 1.2)
    assert abs(p.nehari(0.0, 1.2)) < 1e-10 * p.mass()
    assert lognls.phase_distance(u.scaled(1j), u) < 1e-12

    rows, bracket = lognls.threshold_scan(3, 0.0, 0.5, 1.5, 100)
    assert bracket[0] <= lognls.gamma_star(3) <= bracket[1]

    rep = lognls.minimize(3, 1.2, 0.0, seed=0, length=20.0, points=1000)
    assert rep["converged"] and rep["dist_mod_phase_to_phi0"] < 1e-3

    try:
        lognls.GraphState.stationary(1, 1.0, 0.0)
    except ValueError:
        pass
    else:
        raise AssertionError("one-edge graph accepted")

    print("lognls smoke test passed")


if __name__ == "__main__":
    main()
