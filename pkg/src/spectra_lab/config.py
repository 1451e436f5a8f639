"""Run configuration: JSON ingestion with full-violation reporting and exact
round-tripping (rationals as "p/q" strings, complex numbers as [re, im])."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .errors import Malformed, NonHermitianPotential, UnsupportedDimension


def _parse_rational(v, violations, where):
    try:
        if isinstance(v, str):
            return Fraction(v)
        if isinstance(v, int):
            return Fraction(v)
    except (ValueError, ZeroDivisionError):
        pass
    violations.append("%s: expected rational 'p/q' or integer, got %r" % (where, v))
    return Fraction(0)


def _parse_coord(v, has_surd, violations, where):
    """One frequency coordinate: rational, or [rational, surd-part] pair."""
    if isinstance(v, list):
        if not has_surd:
            violations.append("%s: surd part given but no generator D" % where)
            return (Fraction(0), Fraction(0))
        if len(v) != 2:
            violations.append("%s: coordinate pair must have 2 entries" % where)
            return (Fraction(0), Fraction(0))
        return (_parse_rational(v[0], violations, where),
                _parse_rational(v[1], violations, where))
    r = _parse_rational(v, violations, where)
    return (r, Fraction(0)) if has_surd else r


def _parse_complex(v, violations, where):
    if isinstance(v, (int, float)):
        return complex(v)
    if isinstance(v, list) and len(v) == 2 \
            and all(isinstance(t, (int, float)) for t in v):
        return complex(v[0], v[1])
    violations.append("%s: expected number or [re, im], got %r" % (where, v))
    return 0j


def _coord_key(c):
    """Hashable canonical form of a parsed coordinate tuple."""
    return tuple(c) if isinstance(c, tuple) else c


@dataclass(frozen=True)
class RunConfig:
    dimension: int
    rho_n: float
    frequencies: tuple = ()        # ((coord, ...), complex coeff) entries
    surd_D: Optional[int] = None
    ktilde: int = 1
    k_max: int = 3
    alpha: Optional[tuple] = None
    M_cut: int = 40
    N_k: int = 512
    ladder_min: float = 100.0
    ladder_max: float = 10000.0
    ladder_count: int = 40
    x: tuple = (0.0,)
    y: Optional[tuple] = None
    samples: int = 1000
    seed: int = 0
    out: Optional[str] = None

    def ladder(self):
        import numpy as np

        return np.geomspace(self.ladder_min, self.ladder_max, self.ladder_count)

    def potential_dict(self) -> dict:
        """Fourier data keyed by coordinate tuples (Fractions)."""
        out = {}
        for coords, c in self.frequencies:
            out[tuple(_coord_key(v) for v in coords)] = c
        return out


_KNOWN_KEYS = {
    "dimension", "rho_n", "frequencies", "surd_D", "ktilde", "k_max", "alpha",
    "M_cut", "N_k", "ladder", "x", "y", "samples", "seed", "out",
}


def parse_config(path: str, command: Optional[str] = None) -> RunConfig:
    """Read and validate a JSON config; raises with every violation found,
    not just the first."""
    try:
        with open(path) as fh:
            raw = json.load(fh)
    except FileNotFoundError:
        raise Malformed(["config file not found: %s" % path])
    except json.JSONDecodeError as e:
        raise Malformed(["invalid JSON: %s" % e])
    if not isinstance(raw, dict):
        raise Malformed(["top-level config must be a JSON object"])
    return validate_config(raw, command)


def validate_config(raw: dict, command: Optional[str] = None) -> RunConfig:
    violations = []
    hermitian_violations = []
    dimension_violations = []

    for k in raw:
        if k not in _KNOWN_KEYS:
            violations.append("unknown key %r" % k)

    d = raw.get("dimension")
    if not isinstance(d, int) or d < 1:
        violations.append("dimension must be a positive integer")
        d = 1
    if command in ("bloch", "compare") and d not in (1, 2):
        dimension_violations.append(
            "command %r supports d in {1, 2}, got d=%d" % (command, d))

    surd = raw.get("surd_D")
    if surd is not None:
        if not isinstance(surd, int) or surd <= 0 or int(surd**0.5) ** 2 == surd:
            violations.append("surd_D must be a positive non-square integer")
            surd = None
        elif command in ("bloch", "compare", "heat"):
            violations.append("command %r needs rational frequencies "
                              "(surd_D must be null)" % command)

    rho = raw.get("rho_n", 1000.0)
    if not isinstance(rho, (int, float)) or rho <= 1.0:
        violations.append("rho_n must be a number > 1")
        rho = 1000.0

    freqs = []
    entries = raw.get("frequencies", [])
    if not isinstance(entries, list):
        violations.append("frequencies must be a list")
        entries = []
    for i, ent in enumerate(entries):
        where = "frequencies[%d]" % i
        if not isinstance(ent, dict) or "theta" not in ent or "coeff" not in ent:
            violations.append("%s: need {'theta': [...], 'coeff': ...}" % where)
            continue
        th = ent["theta"]
        if not isinstance(th, list) or len(th) != d:
            violations.append("%s: theta must be a list of length d=%d" % (where, d))
            continue
        coords = tuple(_parse_coord(v, surd is not None, violations, where)
                       for v in th)
        coeff = _parse_complex(ent["coeff"], violations, where)
        freqs.append((coords, coeff))

    # real potential: coeff(theta) == conj(coeff(-theta))
    table = {}
    for coords, c in freqs:
        key = tuple(_coord_key(v) for v in coords)
        table[key] = table.get(key, 0j) + c
    for key, c in table.items():
        neg = tuple(tuple(-p for p in v) if isinstance(v, tuple) else -v
                    for v in key)
        mirror = table.get(neg, 0j)
        if abs(c - mirror.conjugate()) > 1e-14:
            hermitian_violations.append(
                "coeff at %s is not the conjugate of coeff at the negation"
                % (key,))

    ktilde = raw.get("ktilde", 1)
    if not isinstance(ktilde, int) or ktilde < 1:
        violations.append("ktilde must be a positive integer")
        ktilde = 1
    k_max = raw.get("k_max", 3)
    if not isinstance(k_max, int) or k_max < 1:
        violations.append("k_max must be a positive integer")
        k_max = 3

    alpha = raw.get("alpha")
    if alpha is not None:
        if (not isinstance(alpha, list) or len(alpha) != d
                or not all(isinstance(a, (int, float)) for a in alpha)):
            violations.append("alpha must be a list of d numbers")
            alpha = None
        else:
            if any(alpha[i] >= alpha[i + 1] for i in range(d - 1)) \
                    or alpha[-1] >= 1.0 / (2 * d):
                violations.append(
                    "alpha must be strictly increasing with alpha_d < 1/(2d)")
                alpha = None
            else:
                alpha = tuple(float(a) for a in alpha)

    M_cut = raw.get("M_cut", 40)
    if not isinstance(M_cut, int) or M_cut < 1:
        violations.append("M_cut must be a positive integer")
        M_cut = 40
    N_k = raw.get("N_k", 512)
    if not isinstance(N_k, int) or N_k < 1:
        violations.append("N_k must be a positive integer")
        N_k = 512

    lad = raw.get("ladder", {})
    if not isinstance(lad, dict):
        violations.append("ladder must be an object {min, max, count}")
        lad = {}
    lmin = lad.get("min", 100.0)
    lmax = lad.get("max", 10000.0)
    lcount = lad.get("count", 40)
    if not (isinstance(lmin, (int, float)) and isinstance(lmax, (int, float))
            and lmin > 0 and lmax > lmin):
        violations.append("ladder needs 0 < min < max")
        lmin, lmax = 100.0, 10000.0
    if not isinstance(lcount, int) or lcount < 2:
        violations.append("ladder count must be an integer >= 2")
        lcount = 40

    def point(key):
        p = raw.get(key)
        if p is None:
            return None
        if isinstance(p, (int, float)):
            p = [p]
        if not isinstance(p, list) or len(p) != d \
                or not all(isinstance(v, (int, float)) for v in p):
            violations.append("%s must be a list of d coordinates" % key)
            return None
        return tuple(float(v) for v in p)

    x = point("x") or tuple(0.0 for _ in range(d))
    y = point("y")

    samples = raw.get("samples", 1000)
    if not isinstance(samples, int) or samples < 1:
        violations.append("samples must be a positive integer")
        samples = 1000
    seed = raw.get("seed", 0)
    if not isinstance(seed, int) or seed < 0:
        violations.append("seed must be a non-negative integer")
        seed = 0
    out = raw.get("out")
    if out is not None and not isinstance(out, str):
        violations.append("out must be a path string")
        out = None

    all_violations = violations + hermitian_violations + dimension_violations
    if all_violations:
        if hermitian_violations:
            raise NonHermitianPotential(all_violations)
        if dimension_violations:
            raise UnsupportedDimension(all_violations)
        raise Malformed(all_violations)

    return RunConfig(
        dimension=d, rho_n=float(rho), frequencies=tuple(freqs), surd_D=surd,
        ktilde=ktilde, k_max=k_max, alpha=alpha, M_cut=M_cut, N_k=N_k,
        ladder_min=float(lmin), ladder_max=float(lmax), ladder_count=lcount,
        x=x, y=y, samples=samples, seed=seed, out=out,
    )


def _coord_to_json(c, has_surd):
    if has_surd:
        return [str(c[0]), str(c[1])]
    return str(c)


def serialize_config(cfg: RunConfig) -> dict:
    """Inverse of parse_config up to canonical forms (round-trip identity)."""
    has_surd = cfg.surd_D is not None
    freqs = [{"theta": [_coord_to_json(v, has_surd) for v in coords],
              "coeff": [c.real, c.imag]}
             for coords, c in cfg.frequencies]
    out = {
        "dimension": cfg.dimension,
        "rho_n": cfg.rho_n,
        "frequencies": freqs,
        "surd_D": cfg.surd_D,
        "ktilde": cfg.ktilde,
        "k_max": cfg.k_max,
        "alpha": list(cfg.alpha) if cfg.alpha is not None else None,
        "M_cut": cfg.M_cut,
        "N_k": cfg.N_k,
        "ladder": {"min": cfg.ladder_min, "max": cfg.ladder_max,
                   "count": cfg.ladder_count},
        "x": list(cfg.x),
        "y": list(cfg.y) if cfg.y is not None else None,
        "samples": cfg.samples,
        "seed": cfg.seed,
        "out": cfg.out,
    }
    return out
