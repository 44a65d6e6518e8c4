"""Assemble torsion and curvature for the Lorentzian families.

Every builder takes explicit ingredients (a Riemannian base model, skew
endomorphisms on it, scalars) and returns an :class:`InfinitesimalModel`.
No constraint checking happens here; see :mod:`nrh.constructions.families`.

Basis conventions: the Lorentzian factor uses a Witt basis ``p, ..., q``
with ``g(p, q) = 1``; a timelike line is ``e-`` with ``g(e-, e-) = -1``;
base labels are kept as they are.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np

from ..errors import InternalError
from ..exact import qarray, qzeros
from ..mlinalg import MultiVector, Space, as_endo, interior
from ..models import InfinitesimalModel
from ..rational import q
from ..torsioncurv import CurvatureTensor, TorsionTensor
from .assembly import block_space, lift_curvature, lift_multivector, lift_torsion


def witt_space(middle, head: str = "p", tail: str = "q") -> Space:
    """``head, <middle blocks>, tail`` with ``g(head, tail) = 1``."""
    inner = block_space(middle) if middle else None
    labels = [head] + (list(inner.labels) if inner else []) + [tail]
    n = len(labels)
    g = qzeros((n, n))
    g[0, n - 1] = g[n - 1, 0] = Fraction(1)
    if inner is not None:
        g[1:n - 1, 1:n - 1] = inner.metric
    return Space(g, labels, "witt" if all(_is_identity(s) for s in middle) else "general")


def _is_identity(s: Space) -> bool:
    return all(s.metric[i, j] == (1 if i == j else 0) for i in range(s.dim) for j in range(s.dim))


def _line(label: str, sign: int = 1) -> Space:
    return Space.orthonormal([sign], [label])


def _form(space: Space, endo, x, y) -> Fraction:
    """``θ(X, Y) = g(θX, Y)``."""
    return space.inner(as_endo(endo)(x), y)


def contract_last(v, t: MultiVector) -> MultiVector:
    """Contraction of ``v`` into the last slot of ``t``.

    The identifications ``θ_i = φ(V_i)`` and ``X_i = ζ2(V_i)`` are read this
    way; contracting the first slot instead flips ``X_i`` and the assembled
    tensor then violates the first Bianchi identity.
    """
    return interior(v, t) * (-1) ** (t.grade - 1)


def _zero_bivector(space: Space) -> MultiVector:
    return MultiVector.zero(space, 2)


# ----------------------------------------------------------------------------
# timelike line: T = e-∧θ + ω_E, R = C0 − θ∘θ


def dimL1_model(base: InfinitesimalModel, theta, name: str = "dimL1") -> InfinitesimalModel:
    space = block_space([_line("e-", -1), base.space])
    th = lift_multivector(as_endo(theta).bivector(), space)
    T = TorsionTensor(space.blade("e-") ^ th) + lift_torsion(base.T, space)
    R = lift_curvature(base.R, space) - CurvatureTensor.form_times(th, th)
    split = [[0], list(range(1, space.dim))]
    return InfinitesimalModel(space, R, T, name, candidate_splittings=[split])


# ----------------------------------------------------------------------------
# Lorentzian plane: T = p∧q∧v + θ∧v + ω_E1


def dimL2_model(base: InfinitesimalModel | None, theta, v, alpha, name: str = "dimL2") -> InfinitesimalModel:
    """``base`` may be None for an empty E1 (then ``theta`` must be None)."""
    middle = ([base.space] if base is not None else []) + [_line("v")]
    space = witt_space(middle)
    v, alpha = q(v), q(alpha)
    vv = v * v
    vec = space.blade("v") * v
    th = lift_multivector(as_endo(theta).bivector(), space) if theta is not None else _zero_bivector(space)
    pq = space.blade("p", "q")
    T = TorsionTensor(pq ^ vec) + TorsionTensor(th ^ vec)
    R = CurvatureTensor.from_values(space, {("p", "q"): pq * alpha - th * vv})
    R = R + CurvatureTensor.form_times(th, pq * vv) + CurvatureTensor.form_times(th, th)
    if base is not None:
        T = T + lift_torsion(base.T, space)
        R = R + lift_curvature(base.R, space)
    n = space.dim
    split = [[0, n - 1], list(range(1, n - 1))]
    return InfinitesimalModel(space, R, T, name, candidate_splittings=[split])


# ----------------------------------------------------------------------------
# Lorentzian 3-space: T = p∧(α e1∧q + e1∧v + λ) + ω_E1 + θ∧v


def dimL3_model(base: InfinitesimalModel | None, theta, lam, v, alpha, beta, line: bool = True,
                name: str = "dimL3") -> InfinitesimalModel:
    """``lam`` is a skew endomorphism (or bivector) of the base.

    ``line=False`` drops the extra direction ``v`` altogether, which is
    only meaningful when ``v = 0``.
    """
    v, alpha, beta = q(v), q(alpha), q(beta)
    if not line and v:
        raise ValueError("a nonzero v needs the extra line")
    middle = [_line("e1")] + ([base.space] if base is not None else []) + ([_line("v")] if line else [])
    space = witt_space(middle)
    vv = v * v
    vec = space.blade("v") * v if line else MultiVector.zero(space, 1)
    z = _zero_bivector(space)
    th = lift_multivector(as_endo(theta).bivector(), space) if theta is not None else z
    lm = lift_multivector(as_endo(lam).bivector(), space) if lam is not None else z
    p, e1, qq = space.blade("p"), space.blade("e1"), space.blade("q")
    pe = p ^ e1
    T = TorsionTensor(p ^ ((e1 ^ qq) * alpha + (e1 ^ vec) + lm)) + TorsionTensor(th ^ vec)
    R = CurvatureTensor.from_values(space, {("q", "e1"): pe * beta + th * vv + lm * alpha})
    R = R + CurvatureTensor.form_times(th * vv + lm * alpha, pe) + CurvatureTensor.form_times(th, th * vv)
    if base is not None:
        T = T + lift_torsion(base.T, space)
        R = R + lift_curvature(base.R, space)
    n = space.dim
    split = [[0, 1, n - 1], list(range(2, n - 1))]
    return InfinitesimalModel(space, R, T, name, candidate_splittings=[split])


# ----------------------------------------------------------------------------
# Lorentzian factor of dimension >= 4


def _matrix(data, shape) -> np.ndarray:
    m = qarray(data) if data is not None else qzeros(shape)
    if m.shape != shape:
        raise ValueError(f"expected a matrix of shape {shape}, got {m.shape}")
    return m


def _rk_bivector(space: Space, W, labels) -> MultiVector:
    out = MultiVector.zero(space, 2)
    k = len(labels)
    for a in range(k):
        for b in range(a + 1, k):
            if W[a, b]:
                out = out + space.blade(labels[a], labels[b]) * W[a, b]
    return out


def _bivector_from_pairs(space: Space, pairs) -> MultiVector:
    """Bivector from ``{(label, label): coeff}``."""
    out = MultiVector.zero(space, 2)
    for (a, b), c in (pairs or {}).items():
        out = out + space.blade(a, b) * q(c)
    return out


def large_L_space(base: InfinitesimalModel, k: int, l: int) -> Space:
    """``p, e1..ek, <base>, V1..Vl, q``."""
    rk = Space.euclidean(k, [f"e{a + 1}" for a in range(k)])
    e0 = [Space.euclidean(l, [f"V{i + 1}" for i in range(l)])] if l else []
    return witt_space([rk, base.space] + e0)


def dimLge4_model(base: InfinitesimalModel, thetas, K, omega_rk=None, zeta1=None, lam=None,
                  name: str = "dimLge4") -> InfinitesimalModel:
    """Lorentzian factor ``p, e1..ek, q`` with ``l = len(thetas)`` extra lines.

    ``K`` is a symmetric k×k matrix, ``omega_rk`` a skew k×k matrix,
    ``zeta1`` a k×dim(E1) matrix (``ζ1 = Σ Z[a, j] e_a∧x_j``) and ``lam`` a
    ``{(label, label): coeff}`` bivector on ``E = E1 ⊕ E0``.  The identity
    identifications place ``V_i`` against ``e_{k-l+i}``; ``θ_i`` and
    ``X_i`` are then read off from ``φ`` and ``ζ2`` with :func:`contract_last`.
    """
    K = qarray(K)
    k, l = K.shape[0], len(thetas)
    if l > k:
        raise ValueError("need at least as many Lorentzian directions as abelian generators")
    space = large_L_space(base, k, l)
    rk = [f"e{a + 1}" for a in range(k)]
    Vs = [f"V{i + 1}" for i in range(l)]
    p = space.blade("p")
    lifted = [lift_multivector(as_endo(t).bivector(), space) for t in thetas]
    phi = MultiVector.zero(space, 3)
    zeta2 = MultiVector.zero(space, 2)
    for i, (th, V) in enumerate(zip(lifted, Vs)):
        phi = phi + (th ^ space.blade(V))
        zeta2 = zeta2 + space.blade(rk[k - l + i], V)
    zeta = _rk_bivector(space, _matrix(omega_rk, (k, k)), rk) + zeta2 + _bivector_from_pairs(space, lam)
    Z = _matrix(zeta1, (k, base.dim))
    for a in range(k):
        for j, lab in enumerate(base.space.labels):
            if Z[a, j]:
                zeta = zeta + space.blade(rk[a], lab) * Z[a, j]
    T = TorsionTensor(p ^ zeta) + TorsionTensor(phi) + lift_torsion(base.T, space)

    theta_i = [contract_last(space.blade(V), phi) for V in Vs]
    rk_idx = [space.index(lab) for lab in rk]
    X_i = []
    for V in Vs:
        x = contract_last(space.blade(V), zeta2).vector()
        pr = qzeros(space.dim)
        pr[rk_idx] = x[rk_idx]
        X_i.append(pr)
    vals = {}
    for a, lab in enumerate(rk):
        e = space.basis_vector(lab)
        Ke = qzeros(space.dim)
        for b in range(k):
            Ke[rk_idx[b]] = K[b, a]
        val = p ^ MultiVector.from_vector(space, Ke)
        for th, X in zip(theta_i, X_i):
            c = space.inner(e, X)
            if c:
                val = val + th * c
        vals[("q", lab)] = val
    R = CurvatureTensor.from_values(space, vals)
    for th, X in zip(theta_i, X_i):
        R = R + CurvatureTensor.form_times(th, (p ^ MultiVector.from_vector(space, X)) + th)
    R = R + lift_curvature(base.R, space)
    n = space.dim
    split = [[0] + rk_idx + [n - 1], [i for i in range(n) if i not in rk_idx and i not in (0, n - 1)]]
    model = InfinitesimalModel(space, R, T, name, candidate_splittings=[split])
    model.meta["X"] = X_i
    model.meta["theta"] = theta_i
    return model


def vertical_model(base: InfinitesimalModel, thetas, X, omega_rk=None, lam=None,
                   name: str = "vertical") -> InfinitesimalModel:
    """Lorentzian factor meeting the holonomy only through ``p∧ψ(θ_i) + θ_i``.

    ``X`` is a k×k matrix whose row ``i`` gives ``X_i = ψ(θ_i)`` in the
    basis ``e1..ek``; ``k = len(thetas)``.
    """
    k = len(thetas)
    Xm = _matrix(X, (k, k))
    space = large_L_space(base, k, k)
    rk = [f"e{a + 1}" for a in range(k)]
    Vs = [f"V{i + 1}" for i in range(k)]
    p = space.blade("p")
    ths = [lift_multivector(as_endo(t).bivector(), space) for t in thetas]
    Xs = [sum((space.basis_vector(rk[a]) * Xm[i, a] for a in range(k)), qzeros(space.dim)) for i in range(k)]
    Xmv = [MultiVector.from_vector(space, x) for x in Xs]
    zeta = _rk_bivector(space, _matrix(omega_rk, (k, k)), rk) + _bivector_from_pairs(space, lam)
    for x, V in zip(Xmv, Vs):
        zeta = zeta + (x ^ space.blade(V))
    T = TorsionTensor(p ^ zeta) + lift_torsion(base.T, space)
    for th, V in zip(ths, Vs):
        T = T + TorsionTensor(th ^ space.blade(V))

    e1_labels = base.space.labels
    vals = {}
    for lab in rk:
        e = space.basis_vector(lab)
        val = _zero_bivector(space)
        for th, x, xv in zip(ths, Xs, Xmv):
            c = space.inner(e, x)
            if c:
                val = val + ((p ^ xv) + th) * c
        vals[("q", lab)] = val
    for a, ya in enumerate(e1_labels):
        for zb in e1_labels[a + 1:]:
            y, z = space.basis_vector(ya), space.basis_vector(zb)
            val = _zero_bivector(space)
            for th, xv in zip(ths, Xmv):
                c = _form(space, th, y, z)
                if c:
                    val = val + ((p ^ xv) + th) * c
            vals[(ya, zb)] = val
    R = CurvatureTensor.from_values(space, vals) + lift_curvature(base.R, space)
    n = space.dim
    rk_idx = [space.index(lab) for lab in rk]
    split = [[0] + rk_idx + [n - 1], [i for i in range(n) if i not in rk_idx and i not in (0, n - 1)]]
    model = InfinitesimalModel(space, R, T, name, candidate_splittings=[split])
    model.meta["X"] = Xs
    return model


# ----------------------------------------------------------------------------
# plane waves and flat groups


def plane_wave_model(K, omega=None, name: str = "plane-wave") -> InfinitesimalModel:
    """``T = p∧ω``, ``R(q, X) = p∧K X`` on the Witt space ``p, e1..en, q``."""
    K = qarray(K)
    n = K.shape[0]
    space = Space.witt(n)
    W = _matrix(omega, (n, n))
    rk = [f"e{a + 1}" for a in range(n)]
    p = space.blade("p")
    T = TorsionTensor(p ^ _rk_bivector(space, W, rk))
    vals = {}
    for a, lab in enumerate(rk):
        Ke = qzeros(space.dim)
        for b in range(n):
            Ke[b + 1] = K[b, a]
        vals[("q", lab)] = p ^ MultiVector.from_vector(space, Ke)
    return InfinitesimalModel(space, CurvatureTensor.from_values(space, vals), T, name)


def complex_structure_matrix(n: int) -> np.ndarray:
    """Matrix of ``x1∧x2 + x3∧x4 + ...`` on Euclidean ``R^{2n}``: ``J x1 = x2``."""
    J = qzeros((2 * n, 2 * n))
    for i in range(n):
        J[2 * i + 1, 2 * i] = Fraction(1)
        J[2 * i, 2 * i + 1] = Fraction(-1)
    return J


D2N2_PAIRING = -1


def d2n2_bracket(n: int):
    """Structure constants of the oscillator-type algebra on ``R^{2n} ⊕ R ⊕ R``.

    Elements are ``(v, a, b)`` with ``v ∈ R^{2n}``; the bracket is
    ``[(v,a,b), (w,c,d)] = (aJw − cJv, 0, v·Jw)``.  Returns a function on
    coefficient arrays of length ``2n + 2`` ordered ``x1..x2n, u, v``.
    """
    J = complex_structure_matrix(n)
    m = 2 * n

    def br(x, y):
        v, a = x[:m], x[m]
        w, c = y[:m], y[m]
        out = qzeros(m + 2)
        Jw = J.dot(w)
        out[:m] = Jw * a - J.dot(v) * c
        out[m + 1] = sum((vi * wi for vi, wi in zip(v, Jw)), Fraction(0))
        return out

    return br


def lie_group_model(n: int, name: str = "lie-group-d2n2") -> InfinitesimalModel:
    """Flat model of a bi-invariant group metric: ``R = 0``, ``T(X,Y) = −[X,Y]``.

    The invariant pairing of the bracket above is ``v·w + s(a d + b c)``
    with ``s = D2N2_PAIRING``; with ``s = +1`` the bracket is not
    ad-invariant and the torsion would fail to be totally skew.
    """
    m = 2 * n
    labels = [f"x{i + 1}" for i in range(m)] + ["u", "v"]
    g = qzeros((m + 2, m + 2))
    for i in range(m):
        g[i, i] = Fraction(1)
    g[m, m + 1] = g[m + 1, m] = Fraction(D2N2_PAIRING)
    space = Space(g, labels)
    br = d2n2_bracket(n)
    N = m + 2
    vecs = qzeros((N, N, N))
    for i in range(N):
        for j in range(N):
            vecs[i, j] = -br(space.basis_vector(i), space.basis_vector(j))
    low = np.einsum("abd,dc->abc", vecs, space.metric)
    for perm in ((1, 0, 2), (0, 2, 1)):
        if not np.array_equal(low, -np.transpose(low, perm)):
            raise InternalError("torsion from the group bracket is not totally skew")
    T = TorsionTensor.from_lowered(space, low)
    return InfinitesimalModel(space, None, T, name)
