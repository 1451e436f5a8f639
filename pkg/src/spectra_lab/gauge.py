"""Gauge transform: cut-off families e_theta, phi_theta, chi_theta and the
order-by-order construction of the conjugating symbols psi_j and the gauged
symbol w.

Convention: H1 = e^{-i Psi} H e^{i Psi}, equivalently H1 = sum_l ad^l(H)/l!
with ad(A) = [A, i Psi].  The opposite convention flips the sign of Psi and
nothing else; this choice is recorded in diagnostics.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import ConditionAViolation, NonMultiplicationInput, ZeroFrequency
from .frequency import FrequencySet, FrequencyVector, algebraic_sum, check_condition_A
from .symbols import (
    Abs,
    Affine,
    CoefficientExpr,
    Const,
    Iota,
    Prod,
    QuadShift,
    Quot,
    Sqrt,
    Sum,
    Symbol,
    XiGrid,
    class_norm,
    compose,
    is_symmetric,
    laplace_symbol,
)


@dataclass(frozen=True)
class CutoffFamily:
    """Factories for the C-infinity cut-offs; all scales enter through here."""

    rho_n: float
    beta: float

    def e_expr(self, theta: FrequencyVector) -> CoefficientExpr:
        """e_theta(xi) = iota(| (|xi+theta/2| - 3 rho_n) / (10 rho_n) |)."""
        t = theta.to_float()
        inner = Prod([Const(1.0 / (10.0 * self.rho_n)),
                      Sum([Sqrt(QuadShift(t / 2.0)), Const(-3.0 * self.rho_n)])])
        return Iota(Abs(inner))

    def phi_expr(self, theta: FrequencyVector) -> CoefficientExpr:
        """phi_theta(xi) = 1 - iota(|<theta, xi+theta/2>| / (rho_n^beta |theta|))."""
        if theta.is_zero():
            raise ZeroFrequency("phi_theta needs theta != 0")
        t = theta.to_float()
        nt = float(np.linalg.norm(t))
        inner = Prod([Const(1.0 / (self.rho_n**self.beta * nt)),
                      Abs(Affine(t, 0.5 * nt * nt))])
        return Sum([Const(1.0), Prod([Const(-1.0), Iota(inner)])])

    def chi_expr(self, theta: FrequencyVector) -> CoefficientExpr:
        """chi_theta = e phi / (|xi+theta|^2 - |xi|^2), with 0/0 = 0; chi_0 = 0."""
        if theta.is_zero():
            return Const(0.0)
        t = theta.to_float()
        return Quot(Prod([self.e_expr(theta), self.phi_expr(theta)]),
                    Affine(2.0 * t, float(t @ t)))


def cutoff_eval(kind: str, theta: FrequencyVector, xi: np.ndarray,
                cf: CutoffFamily):
    if kind == "e":
        ex = cf.e_expr(theta)
    elif kind == "phi":
        ex = cf.phi_expr(theta)
    elif kind == "chi":
        ex = cf.chi_expr(theta)
    else:
        raise ValueError("kind must be e, phi or chi")
    out = ex.eval(np.asarray(xi, dtype=float)).real
    return float(out) if out.ndim == 0 else out


@dataclass
class GaugeOutput:
    psi: list            # Symbol, j = 1..ktilde
    psi_prime: list      # Symbol, m = 1..ktilde (graded expansion of e^{i Psi})
    w: Symbol            # symbol of W = H2 + Delta
    diagnostics: dict


def _require_multiplication(b: Symbol):
    for ex in b.coeffs.values():
        if not isinstance(ex, Const):
            raise NonMultiplicationInput("gauge input must be xi-independent")


def first_order_psi(b: Symbol, cf: CutoffFamily) -> Symbol:
    """psi_1: hat psi_1(theta, xi) = i bhat(theta) chi_theta(xi)."""
    _require_multiplication(b)
    out = {}
    for th, ex in b.coeffs.items():
        if th.is_zero():
            continue
        out[th] = Prod([Const(1j), ex, cf.chi_expr(th)])
    return Symbol(out, order=0.0)


# -- graded symbol algebra: dict grade -> Symbol -------------------------------


def _graded_add(A: dict, B: dict, scale=1.0) -> dict:
    out = dict(A)
    for g, s in B.items():
        ss = s.scale(scale) if scale != 1.0 else s
        out[g] = out[g] + ss if g in out else ss
    return {g: s for g, s in out.items() if not s.is_zero()}


def _graded_commutator(A: dict, B: dict, cap: int) -> dict:
    out: dict = {}
    for ga, sa in A.items():
        for gb, sb in B.items():
            g = ga + gb
            if g > cap:
                continue
            term = compose(sa, sb) + compose(sb, sa).scale(-1.0)
            out[g] = out[g] + term if g in out else term
    return {g: s for g, s in out.items() if not s.is_zero()}


def _graded_conjugate(H: dict, iPsi: dict, cap: int) -> dict:
    """sum_l ad^l(H; iPsi)/l! truncated at total grade cap."""
    total = dict(H)
    C = dict(H)
    l = 1
    fact = 1.0
    while C and l <= cap:
        C = _graded_commutator(C, iPsi, cap)
        fact *= l
        total = _graded_add(total, C, 1.0 / fact)
        l += 1
    return total


def _graded_exp(iPsi: dict, d: int, basis, cap: int) -> dict:
    """Graded composition series of e^{i Psi} = sum_l (i Psi)^{o l} / l!."""
    zero = FrequencyVector([(0, 0)] * d, basis)
    ident = Symbol({zero: Const(1.0)})
    total = {0: ident}
    P = {0: ident}
    l = 1
    fact = 1.0
    while l <= cap:
        nxt: dict = {}
        for gp, sp in P.items():
            for gq, sq in iPsi.items():
                g = gp + gq
                if g > cap:
                    continue
                term = compose(sp, sq)
                nxt[g] = nxt[g] + term if g in nxt else term
        P = {g: s for g, s in nxt.items() if not s.is_zero()}
        if not P:
            break
        fact *= l
        total = _graded_add(total, P, 1.0 / fact)
        l += 1
    return total


def run_gauge(b: Symbol, ktilde: int, cf: CutoffFamily, S: FrequencySet,
              check_condition: bool = True,
              norm_grid: Optional[XiGrid] = None) -> GaugeOutput:
    """Order-by-order gauge construction up to grade ktilde.

    At order j the grade-j symbol Y_j of the partially conjugated operator is
    split: the chi-solvable part is cancelled by psi_j with
    hat psi_j = i Yhat_j chi_theta, and the remainder
    hat w_j(theta) = Yhat_j (1 - e_theta phi_theta) (theta != 0),
    hat w_j(0) = Yhat_j(0) goes into w.  The (1 - e phi) factorization is used
    verbatim so that w vanishes exactly on the cut-off plateaus.
    """
    _require_multiplication(b)
    if check_condition:
        ok, witness = check_condition_A(S, ktilde)
        if not ok:
            raise ConditionAViolation("witness tuple: %r" % (witness,))
    d = S.dimension
    basis = S.basis
    h0 = laplace_symbol(d, basis)
    zero = S.zero()
    H: dict = {0: h0}
    if not b.is_zero():
        H[1] = b

    psis: list[Symbol] = []
    iPsi: dict = {}
    w_parts: dict[FrequencyVector, list] = {}
    cap = ktilde + 1

    for j in range(1, ktilde + 1):
        conj = _graded_conjugate(H, iPsi, j) if iPsi else dict(H)
        Yj = conj.get(j, Symbol({}))
        psi_coeffs = {}
        for th, yex in Yj.coeffs.items():
            if th.is_zero():
                w_parts.setdefault(th, []).append(yex)
                continue
            psi_coeffs[th] = Prod([Const(1j), yex, cf.chi_expr(th)])
            one_minus = Sum([Const(1.0),
                             Prod([Const(-1.0), cf.e_expr(th), cf.phi_expr(th)])])
            w_parts.setdefault(th, []).append(Prod([yex, one_minus]))
        psi_j = Symbol(psi_coeffs)
        psis.append(psi_j)
        if not psi_j.is_zero():
            iPsi[j] = psi_j.scale(1j)

    w = Symbol({th: Sum(parts) if len(parts) > 1 else parts[0]
                for th, parts in w_parts.items()})

    # full conjugation for the remainder ledger
    conj_full = _graded_conjugate(H, iPsi, cap) if iPsi else dict(H)
    remainder = conj_full.get(ktilde + 1, Symbol({}))

    psi_prime_graded = _graded_exp(iPsi, d, basis, ktilde) if iPsi else {}
    psi_prime = [psi_prime_graded.get(m, Symbol({})) for m in range(1, ktilde + 1)]

    diagnostics = {
        "convention": "H1 = exp(-i Psi) H exp(+i Psi); psi_1 = i bhat chi",
        "ktilde": ktilde,
        "rho_n": cf.rho_n,
        "beta": cf.beta,
    }
    if norm_grid is not None:
        ladder = []
        for j, p in enumerate(psis, start=1):
            measured = class_norm(p, 0.0, 0.0, 0, norm_grid)
            bound_rate = cf.rho_n ** (cf.beta * (1 - 2 * j))
            ladder.append({"j": j, "norm": measured, "rate_bound": bound_rate})
        diagnostics["psi_norm_ladder"] = ladder
        diagnostics["remainder_norm"] = class_norm(remainder, 0.0, 0.0, 0, norm_grid)
        diagnostics["w_norm"] = class_norm(w, 0.0, 0.0, 0, norm_grid)
    return GaugeOutput(psi=psis, psi_prime=psi_prime, w=w, diagnostics=diagnostics)


def verify_b3(out: GaugeOutput, samples: np.ndarray, S: FrequencySet, zp,
              tol: float = 1e-12) -> dict:
    """Check hat w(theta, xi) = 0 whenever xi is sampled (from the annulus A)
    and xi or xi+theta leaves the slab Lambda(theta); theta = 0 is exempt."""
    samples = np.asarray(samples, dtype=float)
    L1 = zp.L(1)
    violations = []
    checked = 0
    for th, ex in out.w.coeffs.items():
        if th.is_zero():
            continue
        t = th.to_float()
        nt = np.linalg.norm(t)
        proj_xi = np.abs(samples @ t) / nt
        proj_xt = np.abs((samples + t) @ t) / nt
        mask = (proj_xi > L1) | (proj_xt > L1)
        if not mask.any():
            continue
        vals = np.abs(ex.eval(samples[mask]))
        checked += int(mask.sum())
        bad = vals > tol
        if bad.any():
            idx = np.where(mask)[0][bad]
            for i, v in zip(idx, vals[bad]):
                violations.append({"theta": tuple(t), "xi": tuple(samples[i]),
                                   "abs_w": float(v)})
    return {"checked": checked, "violations": violations,
            "passed": not violations, "tol": tol}
