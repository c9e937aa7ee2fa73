"""Independent numpy evaluation of the link budget at the reference defaults.

Written separately from ``src/`` (plain arrays, no shared helpers) to freeze
the scenario golden values in ``tests/goldens.py``.
"""

import numpy as np

C = 299792458.0
F = 4.25e9
LAM = C / F
D_SF = LAM / 2
N, V, T = 21, 0.1, 10
PHI0 = np.radians(13.8)
TX = np.array([0.0, 0.0, 3.0])
RX = np.array([10.0, 0.0, 0.0])


def positions(ys, movable, two_d):
    if movable:
        ds = max((V * T - (N - 1) * D_SF) / (N - 1), 1e-4)
        off = (T - 1) * V - 0.5
    else:
        ds, off = D_SF, -0.5
    x0 = 5 + off
    if not two_d:
        return np.array([[x0 + n * ds, ys, 0.0] for n in range(N)]), ds
    return np.array([[x0 + (n % 7) * ds, ys, (n // 7 - 1) * ds] for n in range(N)]), ds


def evaluate(ys, movable, two_d, pt_dbm):
    pos, ds = positions(ys, movable, two_d)
    cen = np.array([5.0, ys, 0.0])
    d = cen - TX
    dc = np.linalg.norm(d)
    th = np.arccos(d[1] / dc)
    phi_c = np.arctan(5.0 / ys)
    a = dc * np.sin(PHI0) / np.sin(phi_c + PHI0)
    b = dc * np.sin(PHI0) / np.cos(th + PHI0)
    cnt = a / ds if not two_d else np.pi * a * b / (2 * ds * ds)
    neff = min(int(np.ceil(cnt)), N)
    order = np.lexsort((np.arange(N), np.linalg.norm(pos - cen, axis=1)))
    total = 0.0
    for k in order[:neff]:
        p = pos[k]
        pr = np.arctan(p[0] / p[1])
        pt = np.arctan((RX[0] - p[0]) / (RX[1] - p[1]))
        off = pr - phi_c
        u = np.cos(np.pi * off / (2 * PHI0)) ** 2 if abs(off) < PHI0 else 0.0
        g = u * max(np.cos(pr) ** 3, 0) * max(np.cos(pt) ** 3, 0)
        total += np.sqrt(g) / (np.linalg.norm(TX - p) * np.linalg.norm(p - RX))
    pr_w = 10 ** ((pt_dbm - 30) / 10) * LAM ** 2 * D_SF ** 2 / (64 * np.pi ** 3) * total ** 2
    return neff, 10 * np.log10(pr_w / 10 ** ((-45 - 30) / 10))


if __name__ == "__main__":
    for tag, mv, td in [("MA-1D", 1, 0), ("MA-2D", 1, 1), ("FPA-1D", 0, 0), ("FPA-2D", 0, 1)]:
        print(tag, evaluate(15.0, mv, td, -20.0))
