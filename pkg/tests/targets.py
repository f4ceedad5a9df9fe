"""Target error tables and weight values used by the acceptance tests."""

GRIDS = (10, 20, 40, 80, 160)

# sine advection, L1 and Linf with orders
ADVECTION_L1 = {
    "js": ((2.99e-1, 9.05e-2, 3.82e-2, 9.58e-3, 2.33e-3), (1.7226, 1.2437, 1.9955, 2.0414)),
    "z": ((2.22e-1, 7.25e-2, 2.04e-2, 4.81e-3, 1.06e-3), (1.6136, 1.8277, 2.0850, 2.1898)),
}
ADVECTION_LINF = {
    "js": ((5.30e-1, 2.09e-1, 8.74e-2, 3.50e-2, 1.36e-2), (1.3433, 1.2573, 1.3180, 1.3644)),
    "z": ((4.31e-1, 1.51e-1, 5.91e-2, 2.22e-2, 8.14e-3), (1.5135, 1.3526, 1.4135, 1.4474)),
}
ADVECTION_SNN_L1_ORDERS_80_160 = {"snn1": 2.2904, "snn2": 2.2004}

# Euler density wave
DENSITY_L1 = {
    "js": (1.50e-1, 4.55e-2, 1.92e-2, 4.82e-3, 1.17e-3),
    "z": (1.10e-1, 3.67e-2, 1.03e-2, 2.43e-3, 5.33e-4),
}
DENSITY_LINF = {
    "js": (2.65e-1, 1.05e-1, 4.39e-2, 1.76e-2, 6.83e-3),
    "z": (2.16e-1, 7.59e-2, 2.97e-2, 1.12e-2, 4.10e-3),
}

# 2D square advection, 80x80, T=4: (L1, L2, Linf)
ADVECTION_2D = {
    "js": (0.068205, 0.261161, 0.773255),
    "z": (0.050340, 0.224367, 0.755226),
    "snn1": (0.045149, 0.212482, 0.745258),
    "snn2": (0.045808, 0.220650, 0.727796),
}

# 2D Burgers, 80x80, T=2/pi
BURGERS_2D = {
    "js": (0.004491, 0.067012, 0.120357),
    "z": (0.003372, 0.058067, 0.121121),
}

# nonlinear weights: stencil -> (js (w0, w1), z (w0, w1)); strings keep the printed digits
WEIGHTS = {
    (1, 1, 0): (("1-2.0000e-12", "2.0000e-12"), ("1", "4.0000e-40")),
    (0, 1, 1): (("5.0000e-13", "1-5.0000e-13"), ("1.0000e-40", "1")),
    (1, 0.95, 0): (("9.9998e-1", "1.5359e-5"), ("0.9891", "0.0109")),
    (0.0628, 0.0314, 0.9997): (("1-2.2161e-6", "2.2161e-6"), ("0.9958", "4.1865e-3")),
    (0.0286, 0.9999, 0.9686): (("5.4028e-7", "1-5.4028e-7"), ("1.0368e-3", "0.9990")),
    (0.0157, 0.9843, 0.9529): (("5.5334e-7", "1-5.5334e-7"), ("1.0493e-3", "0.9990")),
}

LIMIT_WEIGHTS = [
    ("js", (1e-3, 1e-3, 0.0), (2 / 3, 1 / 3)),
    ("js", tuple(3**0.5 * v for v in (1e-3, 1e-3, 0.0)), (8 / 9, 1 / 9)),
    ("z", (1e-20, 1e-20, 0.0), (2 / 5, 3 / 5)),
    ("z", tuple(3**0.5 * v for v in (1e-20, 1e-20, 0.0)), (8 / 15, 7 / 15)),
]
