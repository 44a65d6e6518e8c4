"""Floating-point geometry of Walker metrics ``2 dv du + h + 2A du + H du²`` with torsion.

Coordinates are ordered ``(v, x1..xn, u)``.  Every derivative comes from
truncated Taylor jets: metric components are expanded to fourth order at the
sample point and the Christoffel symbols, curvature and its first two
covariant derivatives follow by jet arithmetic, with no finite differences.

The connection is ``∇ = ∇^g + ½T``; curvature uses
``R(X, Y) = [∇_X, ∇_Y] − ∇_[X,Y]`` and endomorphism arrays are indexed
``R[i, j, k, l]`` = ``dx^k(R(∂_i, ∂_j) ∂_l)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations_with_replacement
from math import ceil, factorial, log2
import string
import warnings

import numpy as np

from .errors import RankUnstable, SingularMetric

JET_ORDER = 4


@dataclass(frozen=True)
class NumericTolerance:
    abs_tol: float = 1e-8
    svd_cut: float = 1e-6
    fd_step: float = 1e-5

    def __post_init__(self):
        if min(self.abs_tol, self.svd_cut, self.fd_step) <= 0:
            raise ValueError("tolerances must be positive")


# ----------------------------------------------------------------------------
# truncated Taylor jets


class JetSpace:
    """Truncated polynomials in ``dim`` variables up to total degree ``order``.

    A jet is an array whose last axis holds monomial coefficients in graded
    order, so truncating to a lower order is a slice.  Leading axes are
    tensor indices.
    """

    def __init__(self, dim: int, order: int = JET_ORDER):
        self.dim, self.order = dim, order
        self.monomials = []
        self.size = []
        for deg in range(order + 1):
            for combo in combinations_with_replacement(range(dim), deg):
                exp = [0] * dim
                for c in combo:
                    exp[c] += 1
                self.monomials.append(tuple(exp))
            self.size.append(len(self.monomials))
        self.index = {m: i for i, m in enumerate(self.monomials)}
        self.degree = np.array([sum(m) for m in self.monomials])
        self._tables: dict = {}
        self._derivs: dict = {}

    def zeros(self, shape=(), order=None) -> np.ndarray:
        return np.zeros(tuple(shape) + (self.size[self.order if order is None else order],))

    def constant(self, value, order=None) -> np.ndarray:
        value = np.asarray(value, dtype=float)
        out = self.zeros(value.shape, order)
        out[..., 0] = value
        return out

    def variable(self, m: int, value: float) -> np.ndarray:
        out = self.constant(value)
        e = [0] * self.dim
        e[m] = 1
        if self.order:
            out[self.index[tuple(e)]] = 1.0
        return out

    def truncate(self, a, order: int) -> np.ndarray:
        return a[..., : self.size[order]]

    def _table(self, order: int):
        if order not in self._tables:
            n = self.size[order]
            I, J, K = [], [], []
            for i in range(n):
                for j in range(n):
                    if self.degree[i] + self.degree[j] <= order:
                        s = tuple(a + b for a, b in zip(self.monomials[i], self.monomials[j]))
                        I.append(i)
                        J.append(j)
                        K.append(self.index[s])
            self._tables[order] = (np.array(I), np.array(J), np.array(K))
        return self._tables[order]

    def contract(self, spec: str, a, b, order: int) -> np.ndarray:
        """``np.einsum(spec)`` on the tensor axes, jet product on the last axis."""
        n = self.size[order]
        a = self.truncate(a, order)
        b = self.truncate(b, order)
        ins, out = spec.split("->")
        sa, sb = ins.split(",")
        prod = np.einsum(f"{sa}Y,{sb}Z->YZ{out}", a, b)
        I, J, K = self._table(order)
        vals = prod[I, J]
        res = np.zeros((n,) + vals.shape[1:])
        np.add.at(res, K, vals)
        return np.moveaxis(res, 0, -1)

    def mul(self, a, b, order: int) -> np.ndarray:
        return self.contract("...,...->...", a, b, order)

    def deriv(self, a, m: int, order: int) -> np.ndarray:
        """``∂_m`` of a jet valid to ``order``; the result is valid to ``order - 1``."""
        key = (m, order)
        if key not in self._derivs:
            src, dst, fac = [], [], []
            for i in range(self.size[order - 1]):
                e = list(self.monomials[i])
                e[m] += 1
                src.append(self.index[tuple(e)])
                dst.append(i)
                fac.append(e[m])
            self._derivs[key] = (np.array(src), np.array(dst), np.array(fac, dtype=float))
        src, dst, fac = self._derivs[key]
        out = np.zeros(a.shape[:-1] + (self.size[order - 1],))
        out[..., dst] = a[..., src] * fac
        return out

    def grad(self, a, order: int) -> np.ndarray:
        """Stack of all partial derivatives, new leading axis."""
        return np.stack([self.deriv(a, m, order) for m in range(self.dim)])

    def value(self, a) -> np.ndarray:
        return a[..., 0]


# ----------------------------------------------------------------------------
# matrix exponential


def expm(a, tol: float = 1e-16) -> np.ndarray:
    """Matrix exponential by scaling and squaring with a bounded Taylor tail.

    The matrix is scaled to norm at most 1/2; the series is summed until the
    tail bound ``‖B‖^(k+1)/(k+1)! · 1/(1 − ‖B‖/(k+2))`` drops below ``tol``.
    """
    a = np.asarray(a, dtype=float)
    norm = np.linalg.norm(a, 1)
    s = max(0, int(ceil(log2(norm))) + 1) if norm > 0 else 0
    b = a / 2.0 ** s
    nb = norm / 2.0 ** s
    result = np.eye(a.shape[0])
    term = np.eye(a.shape[0])
    k = 0
    while True:
        k += 1
        term = term @ b / k
        result = result + term
        tail = nb ** (k + 1) / factorial(k + 1) / (1 - nb / (k + 2))
        if tail < tol or k > 60:
            break
    for _ in range(s):
        result = result @ result
    return result


# ----------------------------------------------------------------------------
# polynomials in the coordinates


class Poly:
    """Real polynomial in named coordinates ``v, x1..xn, u``.

    Stored as ``{((name, power), ...): coeff}``; evaluated as a jet.
    """

    def __init__(self, terms=None):
        self.terms = {}
        for key, c in (terms or {}).items():
            key = tuple(sorted((k, int(p)) for k, p in (key.items() if isinstance(key, dict) else key) if p))
            if c:
                self.terms[key] = self.terms.get(key, 0.0) + float(c)

    @classmethod
    def const(cls, c) -> "Poly":
        return cls({(): c})

    @classmethod
    def from_table(cls, table) -> "Poly":
        """From ``[{"coeff": c, "powers": {"x1": 2}}, ...]`` or a plain number."""
        if isinstance(table, (int, float)):
            return cls.const(table)
        if isinstance(table, Poly):
            return table
        out = {}
        for entry in table:
            key = tuple(sorted((k, int(p)) for k, p in entry.get("powers", {}).items() if p))
            out[key] = out.get(key, 0.0) + float(entry["coeff"])
        return cls(out)

    @classmethod
    def quadratic(cls, Q, names) -> "Poly":
        """``Σ Q_ij y_i y_j`` for the given variable names."""
        Q = np.asarray(Q, dtype=float)
        terms = {}
        for i, a in enumerate(names):
            for j, b in enumerate(names):
                if Q[i, j]:
                    key = tuple(sorted(((a, 2),) if a == b else ((a, 1), (b, 1))))
                    terms[key] = terms.get(key, 0.0) + Q[i, j]
        return cls(terms)

    def to_table(self) -> list:
        return [{"coeff": c, "powers": dict(k)} for k, c in self.terms.items()]

    def jet(self, js: JetSpace, coords: dict) -> np.ndarray:
        out = js.zeros()
        for key, c in self.terms.items():
            t = js.constant(c)
            for name, power in key:
                for _ in range(power):
                    t = js.mul(t, coords[name], js.order)
            out = out + t
        return out

    def __call__(self, values: dict) -> float:
        return sum(c * np.prod([values[k] ** p for k, p in key]) for key, c in self.terms.items())

    def is_constant(self) -> bool:
        return all(not key for key in self.terms)


def _as_poly(x) -> Poly:
    return x if isinstance(x, Poly) else Poly.from_table(x)


# ----------------------------------------------------------------------------
# metrics and torsion


@dataclass
class CoordinateMetric:
    """Walker metric ``2 dv du + h + 2A du + H du²`` on ``R^{n+2}``.

    ``pp_wave``: ``h = δ``, ``A = 0``, ``H`` a polynomial.
    ``plane_wave``: ``H(x, u) = A(e^{−uF}x, e^{−uF}x)`` with symmetric ``A``
    and skew ``F``.
    ``walker_general``: polynomial tables ``h_ij``, ``A_i``, ``H``.
    """

    family: str
    n: int
    H: Poly | None = None
    A: np.ndarray | None = None
    F: np.ndarray | None = None
    h: dict | None = None
    A_form: dict | None = None

    def __post_init__(self):
        if self.family not in ("pp_wave", "plane_wave", "walker_general"):
            raise ValueError(f"unknown metric family {self.family!r}")
        if self.family == "plane_wave":
            self.A = np.asarray(self.A, dtype=float)
            self.F = np.zeros((self.n, self.n)) if self.F is None else np.asarray(self.F, dtype=float)
            if self.A.shape != (self.n, self.n) or self.F.shape != (self.n, self.n):
                raise ValueError("A and F must be n×n")
            if not np.allclose(self.A, self.A.T):
                raise ValueError("A must be symmetric")
            if not np.allclose(self.F, -self.F.T):
                raise ValueError("F must be skew-symmetric")
        if self.H is not None:
            self.H = _as_poly(self.H)

    @classmethod
    def pp_wave(cls, n: int, H) -> "CoordinateMetric":
        return cls("pp_wave", n, H=_as_poly(H))

    @classmethod
    def plane_wave(cls, A, F=None) -> "CoordinateMetric":
        A = np.asarray(A, dtype=float)
        return cls("plane_wave", A.shape[0], A=A, F=F)

    @classmethod
    def walker(cls, n: int, h=None, A_form=None, H=None) -> "CoordinateMetric":
        h = {tuple(k): _as_poly(v) for k, v in (h or {}).items()}
        A_form = {int(k): _as_poly(v) for k, v in (A_form or {}).items()}
        return cls("walker_general", n, H=_as_poly(H) if H is not None else None, h=h, A_form=A_form)

    @property
    def dim(self) -> int:
        return self.n + 2

    @property
    def names(self) -> list[str]:
        return ["v"] + [f"x{i + 1}" for i in range(self.n)] + ["u"]

    def coordinate_jets(self, js: JetSpace, pt) -> dict:
        return {name: js.variable(m, pt[m]) for m, name in enumerate(self.names)}

    def _H_jet(self, js: JetSpace, pt, coords) -> np.ndarray:
        if self.family == "plane_wave":
            n = self.n
            u = js.dim - 1
            # e^{−(u0+s)F} = e^{−u0 F} Σ (−sF)^k / k!
            E0 = expm(-pt[u] * self.F)
            Ej = js.zeros((n, n))
            power = np.eye(n)
            e = [0] * js.dim
            for k in range(js.order + 1):
                e[u] = k
                Ej[..., js.index[tuple(e)]] = E0 @ power / factorial(k)
                power = power @ (-self.F)
            M = js.contract("ba,bc->ac", Ej, js.contract("bd,dc->bc", js.constant(self.A), Ej, js.order), js.order)
            x = np.stack([coords[f"x{i + 1}"] for i in range(n)])
            return js.contract("i,i->", x, js.contract("ij,j->i", M, x, js.order), js.order)
        if self.H is None:
            return js.zeros()
        return self.H.jet(js, coords)

    def jet(self, js: JetSpace, pt) -> np.ndarray:
        pt = np.asarray(pt, dtype=float)
        d = self.dim
        coords = self.coordinate_jets(js, pt)
        g = js.zeros((d, d))
        g[0, d - 1, 0] = g[d - 1, 0, 0] = 1.0
        g[d - 1, d - 1] = self._H_jet(js, pt, coords)
        if self.family == "walker_general":
            for i in range(1, d - 1):
                g[i, i, 0] = 1.0
            for (i, j), p in self.h.items():
                val = p.jet(js, coords)
                g[i, j] = val
                g[j, i] = val
            for i, p in self.A_form.items():
                val = p.jet(js, coords)
                g[i, d - 1] = val
                g[d - 1, i] = val
        else:
            for i in range(1, d - 1):
                g[i, i, 0] = 1.0
        return g

    def matrix(self, pt) -> np.ndarray:
        return JetSpace(self.dim, 0).value(self.jet(JetSpace(self.dim, 0), pt))

    def to_dict(self) -> dict:
        d = {"family": self.family, "n": self.n}
        if self.family == "plane_wave":
            d.update(A=self.A.tolist(), F=self.F.tolist())
        if self.H is not None:
            d["H"] = self.H.to_table()
        if self.h:
            d["h"] = [{"i": i, "j": j, "poly": p.to_table()} for (i, j), p in self.h.items()]
        if self.A_form:
            d["A_form"] = [{"i": i, "poly": p.to_table()} for i, p in self.A_form.items()]
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "CoordinateMetric":
        fam = d["family"]
        if fam == "plane_wave":
            return cls.plane_wave(d["A"], d.get("F"))
        if fam == "pp_wave":
            return cls.pp_wave(int(d["n"]), Poly.from_table(d.get("H", [])))
        h = {(e["i"], e["j"]): Poly.from_table(e["poly"]) for e in d.get("h", [])}
        A_form = {e["i"]: Poly.from_table(e["poly"]) for e in d.get("A_form", [])}
        return cls.walker(int(d["n"]), h, A_form, Poly.from_table(d["H"]) if "H" in d else None)


@dataclass
class TorsionDescriptor:
    """Torsion 3-form ``T = du∧ω`` with ``ω = 2 Σ_{i<j} ω_ij dx^i∧dx^j``.

    ``omega`` maps screen index pairs ``(i, j)`` (1-based, ``i < j``) to a
    number or a :class:`Poly`, so ``ω(∂_i, ∂_j) = 2 ω_ij``.  ``general``
    optionally adds lower components ``T_abc`` (coordinate indices
    ``0..n+1``), extended by skew-symmetry.
    """

    omega: dict = field(default_factory=dict)
    general: dict = field(default_factory=dict)

    def __post_init__(self):
        om = {}
        for (i, j), val in self.omega.items():
            if i == j:
                raise ValueError("ω_ii must vanish")
            val = val if isinstance(val, Poly) else (Poly.const(val) if np.isscalar(val) else Poly.from_table(val))
            if i > j:
                i, j = j, i
                val = Poly({k: -c for k, c in val.terms.items()})
            om[(i, j)] = val
        self.omega = om
        self.general = {tuple(k): (v if isinstance(v, Poly) else Poly.from_table(v) if not np.isscalar(v)
                                   else Poly.const(v)) for k, v in self.general.items()}

    @classmethod
    def zero(cls) -> "TorsionDescriptor":
        return cls()

    @classmethod
    def from_matrix(cls, W) -> "TorsionDescriptor":
        """From a skew n×n table ``ω_ij``."""
        W = np.asarray(W, dtype=float)
        if not np.allclose(W, -W.T):
            raise ValueError("ω table must be skew-symmetric")
        n = W.shape[0]
        return cls({(i + 1, j + 1): W[i, j] for i in range(n) for j in range(i + 1, n) if W[i, j]})

    def is_zero(self) -> bool:
        return not any(p.terms for p in self.omega.values()) and not any(p.terms for p in self.general.values())

    def jet(self, js: JetSpace, metric: CoordinateMetric, pt) -> np.ndarray:
        d = js.dim
        coords = metric.coordinate_jets(js, np.asarray(pt, dtype=float))
        T = js.zeros((d, d, d))
        u = d - 1

        def put(a, b, c, val):
            for (x, y, z), s in (((a, b, c), 1), ((b, c, a), 1), ((c, a, b), 1),
                                 ((b, a, c), -1), ((a, c, b), -1), ((c, b, a), -1)):
                T[x, y, z] += s * val

        for (i, j), p in self.omega.items():
            put(u, i, j, 2.0 * p.jet(js, coords))
        for (a, b, c), p in self.general.items():
            if len({a, b, c}) == 3:
                put(a, b, c, p.jet(js, coords))
        return T

    def to_dict(self) -> dict:
        return {"omega": [{"i": i, "j": j, "poly": p.to_table()} for (i, j), p in self.omega.items()],
                "general": [{"indices": list(k), "poly": p.to_table()} for k, p in self.general.items()]}

    @classmethod
    def from_dict(cls, d: dict) -> "TorsionDescriptor":
        return cls({(e["i"], e["j"]): Poly.from_table(e["poly"]) for e in d.get("omega", [])},
                   {tuple(e["indices"]): Poly.from_table(e["poly"]) for e in d.get("general", [])})


# ----------------------------------------------------------------------------
# connection and curvature


def _inverse(js: JetSpace, g) -> np.ndarray:
    g0 = js.value(g)
    if np.linalg.cond(g0) > 1e12:
        raise SingularMetric("metric is degenerate at the sample point")
    g0inv = np.linalg.inv(g0)
    X = -js.contract("ab,bc->ac", js.constant(g0inv), g - js.constant(g0), js.order)
    total = js.constant(np.eye(js.dim))
    term = total
    for _ in range(js.order):
        term = js.contract("ab,bc->ac", term, X, js.order)
        total = total + term
    return js.contract("ab,bc->ac", total, js.constant(g0inv), js.order)


@dataclass
class _Geometry:
    js: JetSpace
    metric_jet: np.ndarray
    christoffel: np.ndarray  # Γ^k_ij as [k, i, j], order - 1
    connection: np.ndarray   # ∇_i ∂_j = C[k, i, j] ∂_k, order - 1
    torsion: np.ndarray      # T_abc, order


def _geometry(metric: CoordinateMetric, torsion: TorsionDescriptor | None, pt, order: int = JET_ORDER) -> _Geometry:
    js = JetSpace(metric.dim, order)
    g = metric.jet(js, pt)
    ginv = _inverse(js, g)
    o = order - 1
    dg = js.grad(g, order)  # dg[m, a, b] = ∂_m g_ab
    low = 0.5 * (np.einsum("ijl...->lij...", dg) + np.einsum("jil...->lij...", dg) - np.einsum("lij...->lij...", dg))
    gamma = js.contract("kl,lij->kij", ginv, low, o)
    T = torsion.jet(js, metric, pt) if torsion is not None else js.zeros((metric.dim,) * 3)
    Tup = js.contract("kl,ijl->kij", ginv, T, o)
    return _Geometry(js, g, gamma, gamma + 0.5 * Tup, T)


def christoffels(metric: CoordinateMetric, pt) -> np.ndarray:
    """Levi-Civita symbols ``Γ[k, i, j] = Γ^k_ij`` at ``pt``."""
    geo = _geometry(metric, None, pt, order=1)
    return geo.js.value(geo.christoffel)


def connection_coefficients(metric: CoordinateMetric, torsion: TorsionDescriptor | None, pt) -> np.ndarray:
    """``C[k, i, j]`` with ``∇_{∂_i} ∂_j = C^k_ij ∂_k`` for ``∇ = ∇^g + ½T``."""
    geo = _geometry(metric, torsion, pt, order=1)
    return geo.js.value(geo.connection)


def _curvature_jet(geo: _Geometry, order: int) -> np.ndarray:
    """``R[i, j, k, l]`` valid to ``order`` (needs connection valid to order + 1)."""
    js = geo.js
    C = js.truncate(geo.connection, order + 1)
    dC = js.grad(C, order + 1)  # dC[m, k, i, j] = ∂_m C^k_ij
    first = np.einsum("ikjl...->ijkl...", dC)
    quad = js.contract("kia,ajl->ijkl", C, C, order)
    R = first - np.einsum("jkil...->ijkl...", dC) + quad - np.einsum("jikl...->ijkl...", quad)
    return R


def _covariant(js: JetSpace, C, t, types: str, order: int) -> np.ndarray:
    """``∇_m t`` as a new leading axis; ``t`` valid to ``order + 1``, result to ``order``.

    ``types`` lists ``u`` (upper) or ``d`` (lower) for each axis of ``t``.
    """
    r = len(types)
    letters = string.ascii_lowercase[:r]
    out = np.stack([js.deriv(t, m, order + 1) for m in range(js.dim)])
    Ct = js.truncate(C, order)
    tt = js.truncate(t, order)
    for pos, kind in enumerate(types):
        src = letters
        if kind == "u":
            # + C^k_{m b} t^{..b..}
            src_b = src[:pos] + "z" + src[pos + 1:]
            out = out + js.contract(f"{letters[pos]}mz,{src_b}->m{letters}", Ct, tt, order)
        else:
            # − C^b_{m a} t_{..b..}
            src_b = src[:pos] + "z" + src[pos + 1:]
            out = out - js.contract(f"zm{letters[pos]},{src_b}->m{letters}", Ct, tt, order)
    return out


@dataclass
class NumericCurvature:
    """Curvature endomorphisms at a point: ``array[i, j]`` is ``R(∂_i, ∂_j)``."""

    array: np.ndarray
    point: np.ndarray
    metric: np.ndarray

    def endo(self, i: int, j: int) -> np.ndarray:
        return self.array[i, j]

    def lowered(self) -> np.ndarray:
        """``R(∂_i, ∂_j, ∂_l, ∂_k) = g(R(∂_i, ∂_j)∂_l, ∂_k)`` as ``[i, j, l, k]``."""
        return np.einsum("ijkl,km->ijlm", self.array, self.metric)

    def is_zero(self, tol: float = 1e-8) -> bool:
        return float(np.max(np.abs(self.array))) <= tol


def curvature_at(metric: CoordinateMetric, torsion: TorsionDescriptor | None, pt) -> NumericCurvature:
    """Curvature of ``∇^g + ½T`` at ``pt`` (``torsion=None`` gives ``R^g``)."""
    geo = _geometry(metric, torsion, pt, order=2)
    R = geo.js.value(_curvature_jet(geo, 0))
    return NumericCurvature(R, np.asarray(pt, dtype=float), geo.js.value(geo.metric_jet))


def nablaT_residual(metric: CoordinateMetric, torsion: TorsionDescriptor | None, pt) -> float:
    """Max-norm of ``∇T`` at ``pt`` for ``∇ = ∇^g + ½T``."""
    if torsion is None or torsion.is_zero():
        return 0.0
    geo = _geometry(metric, torsion, pt, order=2)
    js = geo.js
    dT = _covariant(js, js.truncate(geo.connection, 1), js.truncate(geo.torsion, 1), "ddd", 0)
    return float(np.max(np.abs(js.value(dT))))


def covariant_curvature(metric: CoordinateMetric, torsion: TorsionDescriptor | None, pt, depth: int = 2):
    """``[R, ∇R, ∇²R][:depth + 1]`` at ``pt``; ``∇^kR`` has the derivative axes first."""
    order = depth + 1
    geo = _geometry(metric, torsion, pt, order=order + 1)
    js = geo.js
    R = _curvature_jet(geo, depth)
    out = [js.value(R)]
    cur, types = R, "ddud"
    for level in range(1, depth + 1):
        cur = _covariant(js, geo.connection, cur, types, depth - level)
        types = "d" + types
        out.append(js.value(cur))
    return out


# ----------------------------------------------------------------------------
# holonomy


def sample_points(dim: int, count: int, seed: int = 0) -> np.ndarray:
    """Seeded uniform points in ``[−1, 1]^dim``."""
    return np.random.default_rng(seed).uniform(-1.0, 1.0, size=(count, dim))


def _numeric_rank(rows: np.ndarray, cut: float) -> tuple[int, np.ndarray, np.ndarray]:
    if rows.size == 0:
        return 0, np.zeros(0), np.zeros((0, rows.shape[1] if rows.ndim == 2 else 0))
    _, s, vt = np.linalg.svd(rows, full_matrices=False)
    scale = max(1.0, float(s[0]) if s.size else 0.0)
    r = int(np.sum(s > cut * scale))
    return r, s, vt[:r]


@dataclass
class NumericHolonomy:
    rank: int
    basis: list
    singular_values: list
    stable: bool
    ranks_at_cut: dict
    sample_ranks: list
    points: list
    seed: int | None = None
    warnings: list = field(default_factory=list)

    def as_dict(self) -> dict:
        return {"rank": self.rank, "stable": self.stable, "ranks_at_cut": {str(k): v for k, v in self.ranks_at_cut.items()},
                "sample_ranks": self.sample_ranks, "singular_values": [float(x) for x in self.singular_values],
                "points": [list(map(float, p)) for p in self.points], "seed": self.seed, "warnings": self.warnings}


def _closure(mats: list, cut: float, dim: int):
    rows = np.array([m.reshape(-1) for m in mats]) if mats else np.zeros((0, dim * dim))
    r, s, basis = _numeric_rank(rows, cut)
    while r:
        B = [b.reshape(dim, dim) for b in basis]
        br = [x @ y - y @ x for i, x in enumerate(B) for y in B[i + 1:]]
        rows2 = np.array([b.reshape(-1) for b in B + br])
        r2, s2, basis2 = _numeric_rank(rows2, cut)
        if r2 == r:
            break
        r, s, basis = r2, s2, basis2
    return r, s, basis


def holonomy_at(metric: CoordinateMetric, torsion: TorsionDescriptor | None, pt, tol: NumericTolerance | None = None,
                depth: int = 2):
    """Bracket closure of the span of ``R, ∇R, ∇²R`` values at one point.

    Returns ``(rank, singular values, basis matrices, {cut: rank})``.
    """
    tol = tol or NumericTolerance()
    d = metric.dim
    mats = []
    for level, arr in enumerate(covariant_curvature(metric, torsion, pt, depth)):
        flat = arr.reshape((-1, d, d))
        mats.extend(m for m in flat)
    ranks = {}
    for cut in (tol.svd_cut / 10, tol.svd_cut, tol.svd_cut * 10):
        ranks[cut] = _closure(mats, cut, d)[0]
    r, s, basis = _closure(mats, tol.svd_cut, d)
    return r, s, [b.reshape(d, d) for b in basis], ranks


def infinitesimal_holonomy(metric: CoordinateMetric, torsion: TorsionDescriptor | None, samples=5,
                           tol: NumericTolerance | None = None, seed: int = 0, depth: int = 2) -> NumericHolonomy:
    """Numeric holonomy algebra of ``∇ = ∇^g + ½T`` from curvature jets.

    ``samples`` is a list of points or a count of seeded points.  The result
    refers to the first point; the others must reproduce its rank, and the
    rank must not move when the cut changes by a decade either way.
    Otherwise :class:`RankUnstable` is warned and ``stable`` is False.
    """
    tol = tol or NumericTolerance()
    if isinstance(samples, int):
        if samples < 1:
            raise ValueError("need at least one sample point")
        pts = sample_points(metric.dim, samples, seed)
    else:
        pts = np.atleast_2d(np.asarray(samples, dtype=float))
        seed = None
        if len(pts) == 0:
            raise ValueError("need at least one sample point")
    results = [holonomy_at(metric, torsion, p, tol, depth) for p in pts]
    r, s, basis, ranks = results[0]
    sample_ranks = [res[0] for res in results]
    notes = []
    if len(set(ranks.values())) > 1:
        notes.append(f"rank depends on the singular-value cut: {ranks}")
    if len(set(sample_ranks)) > 1:
        notes.append(f"rank differs between sample points: {sample_ranks}")
    for note in notes:
        warnings.warn(note, RankUnstable, stacklevel=2)
    return NumericHolonomy(r, basis, list(s), not notes, ranks, sample_ranks, [p for p in pts], seed, notes)


def screen_block(mat: np.ndarray) -> np.ndarray:
    """The ``x``-``x`` block of an endomorphism in Walker coordinates."""
    return mat[1:-1, 1:-1]


def p_wedge(metric_at_pt: np.ndarray, X) -> np.ndarray:
    """Endomorphism of ``∂_v ∧ X`` for a screen vector ``X`` (length n)."""
    d = metric_at_pt.shape[0]
    x = np.zeros(d)
    x[1:-1] = X
    p = np.zeros(d)
    p[0] = 1.0
    gp, gx = metric_at_pt @ p, metric_at_pt @ x
    return np.outer(x, gp) - np.outer(p, gx)
