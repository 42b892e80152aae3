"""Canonical bases for the two pole-at-infinity spaces of each level.

For even weight k, the space with poles only at infinity has a unique basis
element of pole order m for every m >= -n0(k): its expansion is q^-m followed
by a gap through q^n0, and it factors as (first element) * P(hauptmodul) with
an integer polynomial P.  The subspace vanishing at the other cusps has the
same structure with n1 in place of n0 and the cusp polynomial folded into the
first element.

Two constructions are implemented and tested against each other:

* the recursive ladder: multiply the previous element by the hauptmodul and
  subtract lower elements to restore the gap;
* direct elimination against the power family (first element) * psi^i, which
  reaches a single deep element without building every predecessor.

Elements are memoized per (level, weight, space) family; a family is rebuilt
from scratch whenever a request exceeds its precision or index envelope, and
rebuilt values extend previously served ones exactly.
"""

from __future__ import annotations

import json
import os
import threading
from dataclasses import dataclass
from fractions import Fraction

from .errors import IndexBelowRange, InsufficientPrecision, IntegralityViolation
from .leveldata import LevelData, get_level
from .series import QSeries, coeff_str, normalize_coeff

M_SPACE = "M"
S_SPACE = "S"

#: ladder construction is used through this many indices above the first;
#: deeper single elements go through power elimination instead.
LADDER_LIMIT = 64

CACHE_FORMAT_VERSION = 1


@dataclass(frozen=True)
class BasisElement:
    level: int
    weight: int
    index: int                  # pole order m at infinity
    space: str                  # "M" or "S"
    expansion: QSeries
    haupt_poly: tuple           # P, ascending; element = first M-space element * P(psi)

    def coeff(self, n: int):
        return self.expansion.coeff(n)

    def integer_coeff(self, n: int) -> int:
        c = self.expansion.coeff(n)
        if not isinstance(c, int):
            raise IntegralityViolation(
                f"coefficient of q^{n} in ({self.level},{self.weight},{self.space},{self.index}) "
                f"is {c}, not an integer")
        return c


def _poly_sub_scaled(a: list, b: tuple, c) -> None:
    """a -= c*b in place, padding a as needed (ascending coefficients)."""
    while len(a) < len(b):
        a.append(0)
    for i, bi in enumerate(b):
        if bi:
            a[i] -= c * bi


def _poly_mul(a, b):
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                if bj:
                    out[i + j] += ai * bj
    return out


def _poly_normal(p) -> tuple:
    p = list(p)
    while p and not p[-1]:
        p.pop()
    return tuple(p)


class _Family:
    """All computed elements of one (level, weight, space) at one envelope."""

    def __init__(self, data: LevelData, k: int, space: str, prec: int, max_index: int):
        if k % 2:
            raise ValueError(f"weight must be even, got {k}")
        self.data = data
        self.k = k
        self.space = space
        self.gap = data.n0(k) if space == M_SPACE else data.n1(k)
        self.m0 = -self.gap
        self.prec = prec
        self.max_index = max(max_index, self.m0)
        depth = self.max_index - self.m0
        # each hauptmodul multiplication yields prec = psi.prec - (pole order
        # of the partner), so psi must cover the deepest pole reached
        reach = max(depth, self.max_index - 1, 0)
        pad = 8
        self._psi = data.hauptmodul_series(prec + reach + pad)
        self._first = _first_series(data, k, space, prec + depth + pad)
        self._first_poly = _first_poly(data, space)
        self.elements: dict[int, BasisElement] = {}
        self.hydrated = True            # False for families restored from disk
        self._ladder_top = None         # highest index built by the ladder
        self._powers: list[QSeries] | None = None   # first * psi^i, by i

    # -- construction routes ----------------------------------------------

    def element(self, m: int) -> BasisElement:
        if m < self.m0:
            raise IndexBelowRange(
                f"index {m} below minimal pole order {self.m0} for "
                f"(level {self.data.N}, weight {self.k}, space {self.space})")
        got = self.elements.get(m)
        if got is None:
            if m - self.m0 <= LADDER_LIMIT:
                self._ladder_fill(m)
            else:
                self.elements[m] = self._eliminate(m)
            got = self.elements[m]
        return got

    def _store(self, m: int, series: QSeries, poly) -> None:
        if series.coeff(-m) != 1:
            raise RuntimeError(
                f"ladder pivot is {series.coeff(-m)} at index {m}; the gap structure "
                f"for (level {self.data.N}, weight {self.k}, space {self.space}) failed")
        self.elements[m] = BasisElement(
            level=self.data.N, weight=self.k, index=m, space=self.space,
            expansion=series, haupt_poly=_poly_normal(poly))

    def _ladder_fill(self, target: int) -> None:
        if self._ladder_top is None:
            self._store(self.m0, self._first, self._first_poly)
            self._ladder_top = self.m0
        while self._ladder_top < target:
            m = self._ladder_top + 1
            prev = self.elements[m - 1]
            cand = self._psi * prev.expansion
            poly = [0] + list(prev.haupt_poly)
            for t in range(-(m - 1), self.gap + 1):
                c = cand.coeff(t)
                if c:
                    lower = self.elements[-t]
                    cand = cand - lower.expansion.scalar_mul(c)
                    _poly_sub_scaled(poly, lower.haupt_poly, c)
            self._store(m, cand, poly)
            self._ladder_top = m

    def _eliminate(self, m: int) -> BasisElement:
        """Clear the principal part of first * psi^(m-m0) against lower powers."""
        i_top = m - self.m0
        powers = self._power_table(i_top)
        series = powers[i_top]
        poly = [0] * i_top + [1]
        for i in range(i_top - 1, -1, -1):
            t = -(self.m0 + i)
            c = series.coeff(t)
            if c:
                series = series - powers[i].scalar_mul(c)
                poly[i] -= c
        for t in range(-m + 1, self.gap + 1):
            if series.coeff(t):
                raise RuntimeError(
                    f"power elimination left q^{t} uncancelled at index {m} for "
                    f"(level {self.data.N}, weight {self.k}, space {self.space})")
        if self.space == S_SPACE:
            poly = _poly_mul(self.data.cusp_poly, poly)
        element = BasisElement(
            level=self.data.N, weight=self.k, index=m, space=self.space,
            expansion=series, haupt_poly=_poly_normal(poly))
        if series.coeff(-m) != 1:
            raise RuntimeError(f"unit pivot failed at index {m}")
        return element

    def _power_table(self, i_top: int) -> list[QSeries]:
        if self._powers is None:
            self._powers = [self._first]
        powers = self._powers
        while len(powers) <= i_top:
            powers.append(powers[-1] * self._psi)
        return powers


def _first_series(data: LevelData, k: int, space: str, prec: int) -> QSeries:
    """First (maximal-vanishing) element of the space as a series."""
    if 4 in data.weight_forms:
        k_part = k % 4
        ell = (k - k_part) // 4
        w4 = data.weight_forms[4].vanishing
        w2 = data.weight_forms[2].vanishing
        pad = (abs(ell) + 1) * w4 + w2 + 8
        out = _int_power(lambda p: data.weight_form_series(4, p), ell, w4, prec + pad)
        if k_part:
            out = out * _int_power(lambda p: data.weight_form_series(2, p), 1, w2, prec + pad)
    else:
        w2 = data.weight_forms[2].vanishing
        e = k // 2
        pad = (abs(e) + 1) * w2 + 8
        out = _int_power(lambda p: data.weight_form_series(2, p), e, w2, prec + pad)
    if space == S_SPACE:
        depth = len(data.cusp_poly)
        # the product with the cusp polynomial loses the deeper of the two
        # pole depths, so size the hauptmodul for the worst case
        psi = data.hauptmodul_series(prec + depth + max(0, -out.valuation) + 8)
        out = out * _polyval(data.cusp_poly, psi)
    if out.prec < prec:
        raise InsufficientPrecision(
            f"first element of (level {data.N}, weight {k}, {space}) reached only "
            f"O(q^{out.prec})", needed=prec)
    return out.truncated(prec)


def _first_poly(data: LevelData, space: str) -> tuple:
    return (1,) if space == M_SPACE else tuple(data.cusp_poly)


def _int_power(series_fn, e: int, vanishing: int, prec: int) -> QSeries:
    if e == 0:
        return QSeries.one(prec)
    base_prec = prec + (abs(e) + 1) * vanishing + 2
    return series_fn(base_prec) ** e


def _polyval(coeffs, x: QSeries) -> QSeries:
    out = QSeries.zero(x.prec - x.valuation * (len(coeffs) - 1))
    for c in reversed(coeffs):
        out = out * x + c
    return out


class BasisCache:
    """Memoized families with optional JSON persistence.

    Writes are serialized; completed elements are immutable and safe to read
    concurrently.  Families grow geometrically in index and exactly in
    precision, and a regrown family reproduces all previously served
    coefficients.
    """

    def __init__(self, directory: str | None = None):
        self.directory = directory
        self._families: dict[tuple, _Family] = {}
        self._lock = threading.RLock()

    # -- family management --------------------------------------------------

    def family(self, n: int, k: int, space: str, *, min_index: int = 0,
               min_prec: int = 64) -> _Family:
        data = get_level(n)
        key = (n, k, space)
        with self._lock:
            fam = self._families.get(key)
            if fam is None and self.directory:
                fam = self._load(data, k, space)
                if fam is not None:
                    self._families[key] = fam
            if fam is None or fam.prec < min_prec or fam.max_index < min_index:
                grown_index = min_index if fam is None else max(min_index, 2 * fam.max_index)
                grown_prec = min_prec if fam is None else max(min_prec, fam.prec)
                fam = _Family(data, k, space, grown_prec, grown_index)
                self._families[key] = fam
            return fam

    def element(self, n: int, k: int, space: str, m: int, prec: int | None = None) -> BasisElement:
        data = get_level(n)
        gap = data.n0(k) if space == M_SPACE else data.n1(k)
        if prec is None:
            prec = max(64, gap + 17)
        with self._lock:
            fam = self.family(n, k, space, min_index=m, min_prec=prec)
            if not fam.hydrated and m not in fam.elements:
                # restored families are read-only; recompute to serve a miss
                fam = _Family(data, k, space, max(fam.prec, prec), max(fam.max_index, m))
                self._families[(n, k, space)] = fam
            elem = fam.element(m)
            if elem.expansion.prec < prec:
                # regrow precision and rebuild
                fam = self.family(n, k, space, min_index=m, min_prec=prec + (m - fam.m0))
                elem = fam.element(m)
            return elem

    def clear(self) -> None:
        with self._lock:
            self._families.clear()

    # -- persistence ---------------------------------------------------------

    def _path(self, n: int, k: int, space: str) -> str:
        return os.path.join(self.directory, f"basis_N{n}_k{k}_{space}.json")

    def save(self) -> list[str]:
        if not self.directory:
            raise ValueError("cache has no directory configured")
        os.makedirs(self.directory, exist_ok=True)
        written = []
        with self._lock:
            for (n, k, space), fam in sorted(self._families.items()):
                doc = {
                    "format_version": CACHE_FORMAT_VERSION,
                    "level": n,
                    "weight": k,
                    "space": space,
                    "prec": fam.prec,
                    "max_index": fam.max_index,
                    "elements": {
                        str(m): {
                            "valuation": e.expansion.valuation,
                            "prec": e.expansion.prec,
                            "coeffs": [coeff_str(c) for c in e.expansion.coeffs],
                            "poly": [coeff_str(c) for c in e.haupt_poly],
                        }
                        for m, e in sorted(fam.elements.items())
                    },
                }
                path = self._path(n, k, space)
                with open(path, "w") as fh:
                    json.dump(doc, fh, sort_keys=True, separators=(",", ":"))
                written.append(path)
        return written

    def _load(self, data: LevelData, k: int, space: str) -> _Family | None:
        path = self._path(data.N, k, space)
        if not os.path.exists(path):
            return None
        with open(path) as fh:
            doc = json.load(fh)
        if doc.get("format_version") != CACHE_FORMAT_VERSION:
            return None
        fam = _Family.__new__(_Family)
        fam.data = data
        fam.k = k
        fam.space = space
        fam.gap = data.n0(k) if space == M_SPACE else data.n1(k)
        fam.m0 = -fam.gap
        fam.prec = doc["prec"]
        fam.max_index = doc["max_index"]
        fam.elements = {}
        fam.hydrated = False
        fam._ladder_top = None
        fam._powers = None
        fam._psi = None
        fam._first = None
        fam._first_poly = _first_poly(data, space)
        for m_text, e in doc["elements"].items():
            m = int(m_text)
            series = QSeries(e["valuation"], [Fraction(c) for c in e["coeffs"]], e["prec"])
            fam.elements[m] = BasisElement(
                level=data.N, weight=k, index=m, space=space,
                expansion=series,
                haupt_poly=tuple(normalize_coeff(Fraction(c)) for c in e["poly"]))
        return fam


_default_cache = BasisCache()


def default_cache() -> BasisCache:
    return _default_cache


# ----------------------------------------------------------------------
# public construction API

def first_element(n: int, k: int, space: str = M_SPACE, prec: int | None = None,
                  cache: BasisCache | None = None) -> BasisElement:
    data = get_level(n)
    m0 = -(data.n0(k) if space == M_SPACE else data.n1(k))
    return (cache or _default_cache).element(n, k, space, m0, prec)


def f_basis(n: int, k: int, m: int, prec: int | None = None,
            cache: BasisCache | None = None) -> BasisElement:
    return (cache or _default_cache).element(n, k, M_SPACE, m, prec)


def g_basis(n: int, k: int, m: int, prec: int | None = None,
            cache: BasisCache | None = None) -> BasisElement:
    return (cache or _default_cache).element(n, k, S_SPACE, m, prec)


def a_coeff(n: int, k: int, m: int, a_n: int, cache: BasisCache | None = None) -> int:
    """Integer coefficient of q^a_n in the M-space element of pole order m."""
    elem = (cache or _default_cache).element(n, k, M_SPACE, m, prec=a_n + 1)
    return elem.integer_coeff(a_n)


def b_coeff(n: int, k: int, m: int, a_n: int, cache: BasisCache | None = None) -> int:
    """Integer coefficient of q^a_n in the S-space element of pole order m."""
    elem = (cache or _default_cache).element(n, k, S_SPACE, m, prec=a_n + 1)
    return elem.integer_coeff(a_n)


def direct_element(n: int, k: int, space: str, m: int, prec: int = 64) -> BasisElement:
    """One element by power elimination, bypassing the shared cache.

    Used to cross-check that both construction orders agree.
    """
    data = get_level(n)
    fam = _Family(data, k, space, prec, m)
    return fam._eliminate(m)


def decompose_in_hauptmodul(series: QSeries, psi: QSeries,
                            min_window: int = 1) -> tuple[tuple, QSeries]:
    """Write a weight-0 object as a polynomial in a q^-1 + ... generator.

    Peels the pole top-down; returns (ascending coefficients, residual).  The
    residual of a genuine weight-0 form with poles only at infinity is O(q).
    ``min_window`` is the number of residual coefficients that must remain
    verifiable; otherwise InsufficientPrecision is raised.
    """
    if psi.valuation != -1 or psi.coeff(-1) != 1:
        raise ValueError("generator must have expansion q^-1 + ...")
    depth = max(0, -series.valuation)
    reachable = min(series.prec, psi.prec - max(depth - 1, 0))
    if reachable < min_window:
        raise InsufficientPrecision(
            f"residual would be known only to O(q^{reachable})",
            needed=min_window + max(depth - 1, 0) + 1)
    powers = [QSeries.one(psi.prec - psi.valuation)]
    for _ in range(depth):
        powers.append(powers[-1] * psi)
    coeffs = [0] * (depth + 1)
    residual = series
    for i in range(depth, -1, -1):
        c = residual.coeff(-i)
        if c:
            coeffs[i] = c
            residual = residual - powers[i].scalar_mul(c)
    return tuple(coeffs), residual
