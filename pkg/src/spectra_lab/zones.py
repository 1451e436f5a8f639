"""Resonance-zone decomposition of R^d, point classification, resonant
congruence classes and shifted cylindrical coordinates.

Scale parameters: L_j = rho_n^alpha_j with alpha strictly increasing and
alpha_d < 1/(2d).  A point xi belongs to the slab Lambda(theta) when
|<xi, theta/|theta|>| <= L_1; the region Xi(V) collects the points whose
near-resonances are generated exactly by the quasi-lattice subspace V.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy.optimize import linprog

from .errors import CapExceeded, NonSimplexComponent, ZeroFrequency
from .frequency import (
    FrequencySet,
    FrequencyVector,
    QuasiLatticeSubspace,
    all_subspaces,
)


def default_alpha(d: int) -> tuple[float, ...]:
    # increasing, alpha_d < 1/(2d), with room for beta = alpha_1/2 below alpha_1
    return tuple((1.0 / (4 * d)) * (1.0 + j / (2 * d)) for j in range(1, d + 1))


@dataclass(frozen=True)
class ZoneParameters:
    rho_n: float
    alpha: tuple[float, ...] = ()
    ktilde: int = 1
    dimension: int = 0
    closure_cap: int = 10**6

    @classmethod
    def create(cls, rho_n: float, d: int, alpha: Optional[Sequence[float]] = None,
               ktilde: int = 1, closure_cap: int = 10**6) -> "ZoneParameters":
        a = tuple(alpha) if alpha is not None else default_alpha(d)
        if len(a) != d:
            raise ValueError("need d alpha exponents")
        if any(a[i] >= a[i + 1] for i in range(d - 1)) or a[-1] >= 1.0 / (2 * d):
            raise ValueError("alpha must increase and satisfy alpha_d < 1/(2d)")
        return cls(rho_n=float(rho_n), alpha=a, ktilde=ktilde, dimension=d,
                   closure_cap=closure_cap)

    def L(self, j: int) -> float:
        """L_j = rho_n^alpha_j, 1-based."""
        return self.rho_n ** self.alpha[j - 1]

    @property
    def beta(self) -> float:
        return self.alpha[0] / 2.0


@dataclass(frozen=True)
class ZoneLabel:
    subspace: QuasiLatticeSubspace

    @property
    def dim(self) -> int:
        return self.subspace.dimension


@dataclass(frozen=True)
class CongruenceClass:
    seed: np.ndarray
    points: tuple  # tuple of np.ndarray
    subspace: QuasiLatticeSubspace

    def __len__(self):
        return len(self.points)

    def diameter(self) -> float:
        if len(self.points) < 2:
            return 0.0
        P = np.array(self.points)
        d2 = ((P[:, None, :] - P[None, :, :]) ** 2).sum(-1)
        return float(np.sqrt(d2.max()))


@dataclass(frozen=True)
class CylindricalCoords:
    X: np.ndarray             # coordinates of xi_V in the fixed basis of V
    r: float
    Phi: np.ndarray           # K+1 angles
    component_signs: tuple    # sign vector identifying the component Xi(V)_p
    apex: np.ndarray          # a(p), ambient coordinates (lies in V^perp)
    mu_tilde: np.ndarray      # (K+1, d) inward defining directions, ambient
    v_basis: np.ndarray       # (d, m) orthonormal basis of V
    perp_basis: np.ndarray    # (d, K+1) orthonormal basis of V^perp

    def reconstruct(self) -> np.ndarray:
        """Invert the coordinates back to the ambient point."""
        Mu = self.mu_tilde @ self.perp_basis      # rows: mu in perp coords
        n_perp = np.linalg.solve(Mu, np.sin(self.Phi))
        return self.v_basis @ self.X + self.apex + self.r * (self.perp_basis @ n_perp)

    def constraint_residual(self) -> float:
        """|sum_j (sum_q a_jq sin Phi_q)^2 - 1| for the basis-change matrix a."""
        Mu = self.mu_tilde @ self.perp_basis
        # e_j = sum_l a_jl mu_l  =>  Mu^T a_j = e_j (perp coords)
        A = np.linalg.solve(Mu.T, np.eye(Mu.shape[0])).T
        vals = A @ np.sin(self.Phi)
        return abs(float((vals**2).sum()) - 1.0)


class ZoneGeometry:
    """Precomputed subspace lattice for a fixed Theta-tilde; all zone queries."""

    def __init__(self, S: FrequencySet, zp: ZoneParameters):
        if zp.dimension and zp.dimension != S.dimension:
            raise ValueError("zone parameters built for a different dimension")
        self.S = S
        self.zp = zp
        self.d = S.dimension
        self.subspaces = all_subspaces(S)
        self._by_dim: dict[int, list[QuasiLatticeSubspace]] = {}
        for V in self.subspaces:
            self._by_dim.setdefault(V.dimension, []).append(V)
        # children[V] = subspaces of dim(V)-1 contained in V, with the unit
        # normal nu spanning V ominus child
        self._children: dict[QuasiLatticeSubspace, list] = {}
        for V in self.subspaces:
            m = V.dimension
            if m == 0:
                continue
            kids = []
            for W in self._by_dim.get(m - 1, []):
                if V.contains_subspace(W):
                    nu = self._unit_complement(V, W)
                    kids.append((W, nu))
            self._children[V] = kids

    @staticmethod
    def _unit_complement(V: QuasiLatticeSubspace, W: QuasiLatticeSubspace) -> np.ndarray:
        """Unit vector spanning V ominus W (dim 1)."""
        BV = V.float_basis()
        if W.dimension == 0:
            v = BV[:, 0]
            return v / np.linalg.norm(v)
        BW = W.float_basis()
        P = BV @ BV.T - BW @ BW.T
        # P is rank-1 projector onto V ominus W
        w, vecs = np.linalg.eigh(P)
        v = vecs[:, np.argmax(w)]
        return v / np.linalg.norm(v)

    # -- membership tests ---------------------------------------------------

    def in_lambda(self, theta: FrequencyVector, xi: np.ndarray) -> bool:
        """xi in Lambda(theta): |<xi, n(theta)>| <= L_1 (boundary inclusive)."""
        if theta.is_zero():
            raise ZeroFrequency("Lambda(theta) needs theta != 0")
        t = theta.to_float()
        return abs(float(xi @ t)) / np.linalg.norm(t) <= self.zp.L(1)

    def in_xi1(self, V: QuasiLatticeSubspace, xi: np.ndarray) -> bool:
        """xi in Xi_1(V): some flag of V confines xi at every level."""
        m = V.dimension
        if m == 0:
            return True
        for W, nu in self._children[V]:
            if abs(float(xi @ nu)) <= self.zp.L(m) and self.in_xi1(W, xi):
                return True
        return False

    def in_xi(self, V: QuasiLatticeSubspace, xi: np.ndarray) -> bool:
        """xi in Xi(V) per the subtraction rule: in Xi_1(V), not in Xi_1(U) for U not<= V."""
        if not self.in_xi1(V, xi):
            return False
        for U in self.subspaces:
            if not V.contains_subspace(U) and self.in_xi1(U, xi):
                return False
        return True

    def classify_point(self, xi: np.ndarray) -> ZoneLabel:
        """The unique V with xi in Xi(V) (maximal Xi_1-membership)."""
        hits = [V for V in self.subspaces if self.in_xi1(V, xi)]
        best = hits[0]
        for V in hits[1:]:
            if V.dimension > best.dimension:
                best = V
        # the set of hits is closed under sums, so the max-dimensional hit
        # contains all others; fall back to the explicit sum if it does not
        if not all(best.contains_subspace(V) for V in hits):
            acc = hits[0]
            for V in hits[1:]:
                acc = acc.sum(V)
            best = next(W for W in self.subspaces if W == acc)
        return ZoneLabel(best)

    # -- congruence classes --------------------------------------------------

    def congruence_class(self, xi: np.ndarray) -> CongruenceClass:
        """BFS closure of xi under steps eta -> eta + l*theta staying in Lambda(theta)."""
        label = self.classify_point(xi)
        thetas = [(t, t.to_float()) for t in self.S.nonzero()]
        L1 = self.zp.L(1)
        zero = self.S.zero()
        seen = {zero: np.asarray(xi, dtype=float)}
        frontier = [zero]
        while frontier:
            new = []
            for off in frontier:
                pt = seen[off]
                for t, tf in thetas:
                    nrm = np.linalg.norm(tf)
                    proj = float(pt @ tf) / nrm
                    if abs(proj) > L1:
                        continue
                    lmax = int(math.ceil(2.0 * L1 / nrm))
                    for l in range(-lmax, lmax + 1):
                        if l == 0:
                            continue
                        q = pt + l * tf
                        if abs(float(q @ tf)) / nrm > L1:
                            continue
                        noff = off + t.scale(l)
                        if noff not in seen:
                            seen[noff] = q
                            new.append(noff)
                            if len(seen) > self.zp.closure_cap:
                                raise CapExceeded(
                                    "congruence closure exceeded %d nodes" % self.zp.closure_cap)
            frontier = new
        return CongruenceClass(seed=np.asarray(xi, dtype=float),
                               points=tuple(seen.values()),
                               subspace=label.subspace)

    # -- cylindrical coordinates ----------------------------------------------

    def _mu_directions(self, V: QuasiLatticeSubspace) -> list[np.ndarray]:
        """Unit normals n(theta_{V^perp}) for theta in Theta-tilde \\ V, deduped up to sign."""
        BV = V.float_basis()
        seen = {}
        for t in self.S.nonzero():
            if V.contains_vector(t.components()):
                continue
            v = t.to_float()
            u = v - BV @ (BV.T @ v)
            u = u / np.linalg.norm(u)
            # canonical sign: first significantly nonzero entry positive
            k = int(np.argmax(np.abs(u) > 1e-9))
            cu = u if u[k] > 0 else -u
            key = tuple(np.round(cu, 9))
            seen[key] = cu
        return list(seen.values())

    def component_coordinates(self, xi: np.ndarray,
                              label: Optional[ZoneLabel] = None) -> CylindricalCoords:
        xi = np.asarray(xi, dtype=float)
        if label is None:
            label = self.classify_point(xi)
        V = label.subspace
        m = V.dimension
        if m >= self.d:
            raise NonSimplexComponent("coordinates defined only for dim V < d")
        K = self.d - m - 1
        L = self.zp.L(m + 1)
        BV = V.float_basis()
        xi_perp = xi - BV @ (BV.T @ xi)
        mus = self._mu_directions(V)
        signs = []
        mt = []
        for mu in mus:
            s = float(xi_perp @ mu)
            signs.append(1 if s > 0 else -1)
            mt.append(mu if s > 0 else -mu)
        mt = self._minimal_directions(np.array(mt), V, L)
        if mt.shape[0] != K + 1:
            raise NonSimplexComponent(
                "component has %d defining planes, need %d" % (mt.shape[0], K + 1))
        # orthonormal basis of V^perp
        P = np.eye(self.d) - BV @ BV.T
        w, vecs = np.linalg.eigh(P)
        perp = vecs[:, w > 0.5]
        Mu = mt @ perp                      # (K+1, K+1), rows = mu in perp coords
        a_perp = np.linalg.solve(Mu, np.full(K + 1, L))
        apex = perp @ a_perp
        eta = xi_perp - apex
        r = float(np.linalg.norm(eta))
        if r < 1e-14:
            Phi = np.zeros(K + 1)
        else:
            n_eta = eta / r
            Phi = np.arcsin(np.clip(mt @ n_eta, -1.0, 1.0))
        X = BV.T @ xi
        return CylindricalCoords(X=X, r=r, Phi=Phi, component_signs=tuple(signs),
                                 apex=apex, mu_tilde=mt, v_basis=BV, perp_basis=perp)

    def _minimal_directions(self, mt: np.ndarray, V: QuasiLatticeSubspace,
                            L: float) -> np.ndarray:
        """Drop directions whose half-space constraint is implied by the others."""
        BV = V.float_basis()
        perp = np.eye(self.d) - BV @ BV.T
        w, vecs = np.linalg.eigh(perp)
        Pb = vecs[:, w > 0.5]               # (d, K+1)
        rows = mt @ Pb                      # constraints in perp coordinates
        box = 1e4 * max(L, 1.0)
        keep = []
        for j in range(rows.shape[0]):
            others = np.delete(rows, j, axis=0)
            if others.size == 0:
                keep.append(j)
                continue
            # non-redundant iff min <eta, mu_j> subject to <eta, mu_i> >= L can dip below L
            res = linprog(c=rows[j], A_ub=-others, b_ub=-np.full(others.shape[0], L),
                          bounds=[(-box, box)] * rows.shape[1], method="highs")
            if not res.success or res.fun < L - 1e-9 * max(L, 1.0):
                keep.append(j)
        return mt[keep]

    def inner_product_profile(self, xi: np.ndarray, theta: FrequencyVector,
                              label: Optional[ZoneLabel] = None) -> tuple[float, float]:
        """<xi, theta> = const + r * linear; linear = 0 when theta lies in V."""
        xi = np.asarray(xi, dtype=float)
        if label is None:
            label = self.classify_point(xi)
        V = label.subspace
        if V.contains_vector(theta.components()):
            BV = V.float_basis()
            xi_v = BV @ (BV.T @ xi)
            return float(xi_v @ theta.to_float()), 0.0
        cc = self.component_coordinates(xi, label)
        t = theta.to_float()
        t_v = cc.v_basis @ (cc.v_basis.T @ t)
        t_perp = t - t_v
        Mu = cc.mu_tilde @ cc.perp_basis
        b = np.linalg.solve(Mu.T, cc.perp_basis.T @ t_perp)
        nb = b[np.abs(b) > 1e-10]
        if nb.size and not (np.all(nb > 0) or np.all(nb < 0)):
            raise ValueError("sign coherence of the mu-decomposition failed")
        m = V.dimension
        const = float(t @ (cc.v_basis @ cc.X)) + self.zp.L(m + 1) * float(b.sum())
        linear = float(b @ np.sin(cc.Phi))
        return const, linear


# functional entry points; geometry (subspace lattice) cached per (S, zp)
_GEOM_CACHE: dict = {}


def _geom(S: FrequencySet, zp: ZoneParameters) -> ZoneGeometry:
    key = (id(S), zp)
    g = _GEOM_CACHE.get(key)
    if g is None or g.S is not S:
        g = ZoneGeometry(S, zp)
        if len(_GEOM_CACHE) > 16:
            _GEOM_CACHE.clear()
        _GEOM_CACHE[key] = g
    return g


def in_lambda(theta: FrequencyVector, xi: np.ndarray, zp: ZoneParameters) -> bool:
    if theta.is_zero():
        raise ZeroFrequency("Lambda(theta) needs theta != 0")
    t = theta.to_float()
    return abs(float(np.asarray(xi, dtype=float) @ t)) / np.linalg.norm(t) <= zp.L(1)


def classify_point(xi: np.ndarray, S: FrequencySet, zp: ZoneParameters) -> ZoneLabel:
    return _geom(S, zp).classify_point(np.asarray(xi, dtype=float))


def congruence_class(xi: np.ndarray, S: FrequencySet, zp: ZoneParameters) -> CongruenceClass:
    return _geom(S, zp).congruence_class(np.asarray(xi, dtype=float))


def component_coordinates(xi: np.ndarray, label: ZoneLabel, S: FrequencySet,
                          zp: ZoneParameters) -> CylindricalCoords:
    return _geom(S, zp).component_coordinates(np.asarray(xi, dtype=float), label)


def inner_product_profile(xi: np.ndarray, theta: FrequencyVector, label: ZoneLabel,
                          S: FrequencySet, zp: ZoneParameters) -> tuple[float, float]:
    return _geom(S, zp).inner_product_profile(np.asarray(xi, dtype=float), theta, label)


def annulus_bounds(rho_n: float) -> tuple[float, float]:
    """|xi|^2 range of the sampling annulus (0.7*lambda_n .. 17.5*lambda_n)."""
    lam = rho_n * rho_n
    return 0.7 * lam, 17.5 * lam


def sample_annulus(d: int, rho_n: float, n: int, rng: np.random.Generator) -> np.ndarray:
    lo, hi = annulus_bounds(rho_n)
    u = rng.normal(size=(n, d))
    u /= np.linalg.norm(u, axis=1, keepdims=True)
    radii = np.sqrt(rng.uniform(lo, hi, size=n))
    return u * radii[:, None]
