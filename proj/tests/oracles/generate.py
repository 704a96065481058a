# Reference values for the unit tests. Independent of the C++ code: scipy
# adaptive quadrature on the closed-form bump. Prints a C++ header.
import numpy as np
from scipy import integrate


def bump1(t, c, r):
    s = ((t - c) / r) ** 2
    return np.exp(1.0 - 1.0 / (1.0 - s)) if s < 1.0 else 0.0


def bump3(x, c, r, a=1.0):
    s = sum((x[k] - c[k]) ** 2 for k in range(3)) / r**2
    return a * np.exp(1.0 - 1.0 / (1.0 - s)) if s < 1.0 else 0.0


def line_integral(x2, x3, x1, c, r):
    lo = c[0] - r
    if x1 <= lo:
        return 0.0
    f = lambda t: bump3((t, x2, x3), c, r)
    return integrate.quad(f, lo, min(x1, c[0] + r), epsabs=1e-15, epsrel=1e-13, limit=400)[0]


def node(i, N, L=2.0):
    return -L + 2.0 * L / N * i


out = []
# 1D primitive of b(t; 0, 0.9) at nodes of the N = 128 grid
N = 128
idx = [40, 50, 56, 64, 70, 80, 92]
vals = [integrate.quad(lambda t: bump1(t, 0.0, 0.9), -0.9, min(node(i, N), 0.9), epsabs=1e-15, epsrel=1e-13, limit=400)[0]
        if node(i, N) > -0.9 else 0.0 for i in idx]
out.append(("kPrimitive1D_N128_index", idx, "int"))
out.append(("kPrimitive1D_N128_value", vals, "double"))

# same primitive at the matching nodes of N = 256
idx256 = [2 * i for i in idx]
out.append(("kPrimitive1D_N256_index", idx256, "int"))
out.append(("kPrimitive1D_N256_value", vals, "double"))

# second primitive int_{-inf}^x (x - t) b(t; 0, 0.9) dt at N = 128 nodes
def prim2(x):
    if x <= -0.9:
        return 0.0
    return integrate.quad(lambda t: (x - t) * bump1(t, 0.0, 0.9), -0.9, min(x, 0.9), epsabs=1e-15, epsrel=1e-13, limit=400)[0]
out.append(("kPrimitive2_N128_value", [prim2(node(i, N)) for i in idx], "double"))

# line integrals of B_{0, 0.9, 1} along +e1 at (x1, x2, x3) nodes of N = 128
pts = [(64, 64, 64), (80, 60, 70), (100, 64, 64), (70, 72, 58), (60, 64, 80)]
c = (0.0, 0.0, 0.0)
li = [line_integral(node(j, N), node(k, N), node(i, N), c, 0.9) for (i, j, k) in pts]
out.append(("kLinePoints_N128", [p for q in pts for p in q], "int"))
out.append(("kLineIntegral_N128", li, "double"))

# L2 norm of B_{0, r, 1} over R^3
for r in (0.5, 0.9):
    v = 4 * np.pi * integrate.quad(lambda s: np.exp(2 * (1 - 1 / (1 - s * s / (r * r)))) * s * s, 0, r,
                                   epsabs=1e-16, epsrel=1e-13, limit=400)[0]
    out.append((f"kBumpL2_r{int(r*10)}", [np.sqrt(v)], "double"))

print("#pragma once\n\n// Generated by tests/oracles/generate.py (scipy.integrate.quad).\n")
print("#include <array>\n\nnamespace oracle {\n")
for name, v, t in out:
    body = ", ".join(repr(float(x)) if t == "double" else str(int(x)) for x in v)
    print(f"inline constexpr std::array<{t}, {len(v)}> {name}{{{body}}};")
print("\n}  // namespace oracle")
