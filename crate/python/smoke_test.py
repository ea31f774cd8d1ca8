"""Smoke test for the `ucp` extension module.

Build and run from the repository root:

    cargo build -p ucp-python --release --features extension-module
    cp target/release/libucp.so python/ucp.so
    python3 python/smoke_test.py
"""

import math
import os
import sys
import tempfile

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

import ucp  # noqa: E402


def close(a, b, tol):
    assert abs(a - b) <= tol, f"{a} vs {b}"


def main():
    grid = ucp.Grid()
    assert (grid.n, grid.spacing, grid.half_width) == (2048, 1 / 64, 16.0)
    assert grid.dual().spacing == 1 / 32

    g = ucp.SampledFunction.gaussian(grid)
    close(g.norm(), 2 ** -0.25, 1e-12)
    gh = g.fourier_transform()
    assert gh.grid.spacing == grid.dual().spacing
    diff = max(abs(v - math.exp(-math.pi * xi * xi)) for v, xi in zip(gh.values(), gh.grid.points()))
    assert diff < 1e-10, diff
    back = gh.inverse_fourier_transform()
    close(back.inner(g).real, g.norm() ** 2, 1e-12)

    basis = ucp.hermite_basis(grid, 4)
    assert len(basis) == 5
    for j, h in enumerate(basis):
        for k, other in enumerate(basis):
            close(abs(h.inner(other)), 1.0 if j == k else 0.0, 1e-10)

    time, freq = ucp.moments(g)
    close(time["mean"], 0.0, 1e-12)
    assert ucp.heisenberg(g)["pass"]

    rows = ucp.shapiro(grid, 2)
    close(rows[-1]["lhs"], 9 / (2 * math.pi), 1e-9)

    close(ucp.faris_constant(0.25, 1), 9 * math.sqrt(2), 1e-9)

    small = ucp.Grid(8.0, 512)
    dense = ucp.annihilation_constant(small, "-1,1", "-1,1")
    power = ucp.annihilation_constant(small, "-1,1", "-1,1", method="power")
    close(dense["d"], power["d"], 1e-8)
    assert 0 < dense["d"] < 1

    eigenvalues, functions = ucp.prolates(grid, 1.0, 1.0, count=6)
    assert all(1 > a >= b > 0 for a, b in zip(eigenvalues, eigenvalues[1:]))
    close(functions[0].norm(), 1.0, 1e-10)

    heat = ucp.propagate(g, 1.0, "heat")
    expected = [math.exp(-math.pi * x * x / 2) / math.sqrt(2) for x in grid.points()]
    assert max(abs(v - e) for v, e in zip(heat.values(), expected)) < 1e-8

    f0 = ucp.bargmann(basis[0], 0j)
    for z in (0.5 + 0.5j, -1.0 + 0.2j):
        close(abs(ucp.bargmann(basis[0], z) - f0), 0.0, 1e-6)

    hardy = ucp.hardy(g)
    close(hardy["ab"], 1.0, 1e-2)

    cert = ucp.umbrella_bound(ucp.Envelope.gaussian(1.0, 1.0))
    assert cert["bound"] >= 1
    close(ucp.gaussian_envelope_bound(math.e, 1.0), 4.41598, 1e-5)

    try:
        ucp.faris_constant(0.7, 1)
    except ValueError:
        pass
    else:
        raise AssertionError("alpha >= d/2 accepted")

    with tempfile.TemporaryDirectory() as d:
        path = os.path.join(d, "g.json")
        g.save(path)
        close(ucp.SampledFunction.load(path).norm(), g.norm(), 1e-15)

    print("ucp python smoke test: ok")


if __name__ == "__main__":
    main()
