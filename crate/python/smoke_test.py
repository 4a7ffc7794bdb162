"""Smoke test for the photonshape_py extension module.

Build with `maturin develop -m crates/python/Cargo.toml`, or put a copy of the
compiled library named photonshape_py.so on PYTHONPATH, then run this file.
"""

import cmath
import json
import math

import photonshape_py as ps


def close(a, b, tol):
    assert abs(a - b) <= tol, f"{a} vs {b}"


def main():
    g = ps.Wavepacket.preset("gaussian")
    close(g.variance(), 0.25, 1e-12)
    close(g.overlap(1.0), math.exp(-1.0 / 8.0), 1e-12)
    close(g.curvature(), 0.25, 1e-10)
    close(g.uncertainty_product(), 0.25, 1e-9)
    assert g.gaussian_distance() < 1e-6

    for tau in (0.0, 0.5, 2.0):
        o = g.overlap(tau)
        close(ps.hom_coincidence(g, tau), 0.5 - 0.5 * abs(o) ** 2, 1e-12)

    lor = ps.Wavepacket.preset("lorentzian")
    assert math.isinf(lor.curvature())

    net = ps.Network(3, [("bs", 0, 1, 0.5), ("ps", 1, 0.7), ("bs", 1, 2, 0.4)])
    f, raw, norm = ps.fidelity(net, [0, 1], g)
    close(f, 1.0, 1e-12)
    shifted = net.with_displacements([[0.0, 0.0, 0.3], [0.0, 0.0, 0.0], [0.0, 0.0, 0.0]])
    f, raw, norm = ps.fidelity(shifted, [0, 1], g)
    assert 0.0 < f < 1.0
    assert ps.fidelity_curvature(net, [0, 1], g, (0, 2)) < 0.0

    hom = ps.Network.from_json(json.dumps({"n_modes": 2, "elements": [{"type": "bs", "a": 0, "b": 1, "eta": 0.5}]}))
    close(ps.detection_prob(hom, [0, 1], g, [(0, 1), (1, 1)]), 0.0, 1e-12)
    close(ps.detection_prob(hom, [0, 1], g, [(0, 2)]), 0.5, 1e-12)
    fc, p = ps.conditional_fidelity(net, [0, 1], g, [(2, 1)])
    close(fc, 1.0, 1e-9)
    assert 0.0 < p < 1.0

    packet, curvature = ps.optimize_shape(1.0)
    close(curvature, 0.25, 1e-6)
    close(ps.permanent([[1, 2], [3, 4]]), 10, 1e-12)
    close(ps.permanent([[cmath.exp(1j), 0], [0, 1]]), cmath.exp(1j), 1e-12)

    try:
        ps.Wavepacket.preset("sinc")
    except ValueError:
        pass
    else:
        raise AssertionError("unknown preset accepted")

    print("smoke test passed")


if __name__ == "__main__":
    main()
