"""Regenerates a0_definiteness_sweep.csv with numpy (independent of the C++ code)."""
import numpy as np


def isotropic(lam, mu):
    d = np.eye(3)
    return (lam * np.einsum("ij,kl->ijkl", d, d)
            + mu * (np.einsum("ik,jl->ijkl", d, d) + np.einsum("il,jk->ijkl", d, d)))


def a0(C, rho):
    m = np.zeros((15, 15))
    for k in range(3):
        for j in range(3):
            m[3 * k:3 * k + 3, 3 * j:3 * j + 3] = C[:, j, :, k]
    m[9:12, 9:12] = rho * np.eye(3)
    m[12:, 12:] = np.eye(3)
    return m


rows = []
for lam in np.arange(-0.5, 2.0 + 1e-9, 0.25):
    for mu in np.arange(0.25, 2.0 + 1e-9, 0.25):
        if mu <= 0 or 3 * lam + 2 * mu <= 0:
            continue
        ev = np.linalg.eigvalsh(a0(isotropic(lam, mu), 1.0))
        scale = np.abs(ev).max()
        sign = 1 if ev[0] > 1e-12 * scale else (0 if abs(ev[0]) <= 1e-12 * scale else -1)
        rows.append((lam, mu, ev[0], scale, sign))

with open("a0_definiteness_sweep.csv", "w") as f:
    f.write("lambda,mu,min_eig,max_abs_eig,sign\n")
    for lam, mu, lo, hi, s in rows:
        f.write(f"{lam:.2f},{mu:.2f},{lo:.17g},{hi:.17g},{s}\n")
