"""Independent reference values for the test suite.

Forms are stored as fully antisymmetric numpy tensors and every contraction goes
through an explicit Levi-Civita symbol, so nothing here shares code or basis
bookkeeping with the C++ library.  Run:  python3 oracle.py > goldens.json
"""
import itertools
import json
import math

import numpy as np


def levi_civita(n):
    eps = np.zeros((n,) * n)
    for perm in itertools.permutations(range(n)):
        inv = sum(1 for a in range(n) for b in range(a + 1, n) if perm[a] > perm[b])
        eps[perm] = -1.0 if inv % 2 else 1.0
    return eps


def tensor(n, terms):
    """terms: {(i,j,k,...) 1-based: coeff}."""
    k = len(next(iter(terms)))
    t = np.zeros((n,) * k)
    for idx, c in terms.items():
        for perm in itertools.permutations(range(k)):
            inv = sum(1 for a in range(k) for b in range(a + 1, k) if perm[a] > perm[b])
            t[tuple(idx[p] - 1 for p in perm)] += (-1.0 if inv % 2 else 1.0) * c
    return t


def components(t):
    n, k = t.shape[0], t.ndim
    return {tuple(i + 1 for i in idx): t[idx] for idx in itertools.combinations(range(n), k)
            if abs(t[idx]) > 1e-12}


def from_vector(n, k, x):
    return tensor(n, {tuple(i + 1 for i in idx): c
                      for idx, c in zip(itertools.combinations(range(n), k), x)}) if any(x) else np.zeros((n,) * k)


E6 = levi_civita(6)
E7 = levi_civita(7)


def kappa(T):
    # kappa[j,i] = top(theta_j ^ i_{w_i}T ^ T) = (1/(1!2!3!)) eps_{j ab cde} T_{iab} T_{cde}
    return np.einsum('jabcde,iab,cde->ji', E6, T, T, optimize=True) / 12.0


def lam(T):
    k = kappa(T)
    return np.trace(k @ k) / 6.0


def phi6(x):
    return math.sqrt(-lam(from_vector(6, 3, x)))


def bmat(T):
    # b_ij = -1/6 top(i_iT ^ i_jT ^ T) = -1/6 * (1/(2!2!3!)) eps T_i.. T_j.. T...
    return -np.einsum('abcdefg,iab,jcd,efg->ij', E7, T, T, T, optimize=True) / (6.0 * 24.0)


def g2(T):
    b = bmat(T)
    d = np.linalg.det(b)
    o = 1.0 if d > 0 else -1.0
    vol = (o * d) ** (1.0 / 9.0)
    return o * b / vol, vol, o


def star7(T):
    g, vol, o = g2(T)
    gi = np.linalg.inv(g)
    up = np.einsum('ia,jb,kc,abc->ijk', gi, gi, gi, T, optimize=True)
    # (*a)_{lmnp} = (1/3!) (o*vol) * a^{ijk} eps_{ijklmnp}; vol already equals sqrt(det g)*vol
    return o * vol * np.einsum('ijk,ijklmnp->lmnp', up, E7, optimize=True) / 6.0


def top7(A, B):
    # A 3-form, B 4-form
    return np.einsum('abcdefg,abc,defg->', E7, A, B, optimize=True) / (6.0 * 24.0)


def phi7(x):
    return g2(from_vector(7, 3, x))[1]


def hessian(f, x, h):
    n = len(x)
    H = np.zeros((n, n))
    for i in range(n):
        for j in range(i, n):
            def ev(si, sj):
                y = np.array(x, dtype=float)
                y[i] += si * h
                y[j] += sj * h
                return f(y)
            H[i, j] = H[j, i] = (ev(1, 1) - ev(1, -1) - ev(-1, 1) + ev(-1, -1)) / (4 * h * h)
    return H


def vec(t):
    k = t.ndim
    return np.array([t[idx] for idx in itertools.combinations(range(t.shape[0]), k)])


def signs(w, tol):
    return int(np.sum(w > tol)), int(np.sum(w < -tol))


def main():
    out = {}
    # 6D
    phiC = (tensor(6, {(1, 3, 5): 2, (1, 4, 6): -2, (2, 3, 6): -2, (2, 4, 5): -2}))
    k = kappa(phiC)
    out['phi_c_lambda'] = lam(phiC)
    out['phi_c_kappa_sq_diag'] = float(np.diag(k @ k)[0])
    x = vec(phiC)
    H = hessian(phi6, x, 1e-3)
    w = np.linalg.eigvalsh(H)
    out['phi_c_hessian_eigs'] = sorted(round(v, 6) for v in w)
    out['phi_c_hessian_signs'] = signs(w, 1e-4)
    out['phi_c_hessian_self'] = float(x @ H @ x)
    # 7D
    common = {(1, 2, 5): 1, (3, 4, 5): -1, (1, 3, 6): 1, (2, 4, 6): 1, (1, 4, 7): 1, (2, 3, 7): -1}
    printed = tensor(7, {**common, (4, 6, 7): 1})
    corrected = tensor(7, {**common, (5, 6, 7): 1})
    out['printed_b_det'] = float(np.linalg.det(bmat(printed)))
    out['corrected_b_is_identity'] = bool(np.allclose(bmat(corrected), np.eye(7)))
    s = star7(corrected)
    out['star_phi_std'] = {''.join(map(str, k)): v for k, v in components(s).items()}
    out['omega_wedge_star'] = float(top7(corrected, s))
    # dphi = c * (*Omega ^ dOmega); Euler: c = (7/3) / (Omega ^ *Omega)
    x7 = vec(corrected)
    rng = np.random.default_rng(7)
    d = rng.standard_normal(35)
    h = 1e-5
    fd = (phi7(x7 + h * d) - phi7(x7 - h * d)) / (2 * h)
    out['dphi_factor'] = float(fd / top7(from_vector(7, 3, d), s))
    H7 = hessian(phi7, x7, 1e-3)
    w7 = np.linalg.eigvalsh(3.0 * H7)
    out['q_eigs_from_phi_hessian'] = sorted(round(v, 5) for v in w7)
    # C_Theta: (v^w) -> i(v)i(w)Theta, 21x21 with entries Theta_{ijkl}
    pairs = list(itertools.combinations(range(7), 2))
    C = np.array([[s[i, j, k, l] for (k, l) in pairs] for (i, j) in pairs])
    detC = np.linalg.det(C)
    out['det_c_star_phi_std'] = float(detC)
    out['psi_c0'] = (24.0 / 7.0) / abs(detC) ** (1.0 / 12.0)
    print(json.dumps(out, indent=1, sort_keys=True))


if __name__ == '__main__':
    main()
