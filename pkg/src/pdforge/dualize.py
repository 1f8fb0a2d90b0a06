"""Duality completion of a cochain algebra, and module-retract machinery.

For a cohomologically connected algebra A with H^k(A) = 0 for k >= n, the
completion carries A plus the shifted dual complex: in degree k the duals
of the degree n-k monomials, written dual(p).  Products follow

    (a ^ dual_p)(b) = (-1)^{|a| |dual_p|} dual_p(a ^ b),
    (dual_p ^ a)(b) = dual_p(a ^ b),
    dual ^ dual = 0,

and the differential on duals is the signed transpose
d(phi)(a) = (-1)^{|phi| - 1} phi(da).  With monomial dual bases these
rules reduce to exponent-vector division, so products stay sparse.

Note on signs: for even n the transpose convention yields the familiar
table d(dual(x^k)) = -dual(x^{k-2} y) on the model (x_2, y_3; dy = x^2);
for odd n those table signs flip.  The formula is the convention; the even
case is pinned by regression tests.
"""

from __future__ import annotations

import threading
from fractions import Fraction

from .gca import Element, GcaError, ParseError, Presentation, ValidationReport, _trim
from .cohomology import (CdgaMap, LinearMap, betti, cohomology, class_of,
                         fundamental_class, integrate, map_degree, pairing_matrix,
                         primitive)
from .qpoly import as_coeff, coeff_is_zero
from .ratlin import IncrementalSpan, RatMatrix, RrefSolver

Q = Fraction


def _sub_mono(p, m):
    """Exponentwise p - m, or None when not divisible."""
    if len(m) > len(p):
        return None
    out = list(p)
    for i, e in enumerate(m):
        out[i] -= e
        if out[i] < 0:
            return None
    return _trim(out)


class PnPresentation:
    """A + shifted dual of A, as one graded algebra with keys
    ("A", mono) and ("D", mono)."""

    is_dualization = True

    def __init__(self, base: Presentation, n: int, hi: int, name=""):
        if hi > base.bound:
            raise GcaError(f"dualization bound {hi} above base bound {base.bound}")
        self.base = base
        self.n = n
        self.hi = hi
        self.bound = hi
        self.lo = n - base.bound
        self.name = name or (base.name and f"P{n}({base.name})")
        self._cache = {}
        self._lock = threading.RLock()

    # ----- protocol ---------------------------------------------------
    def unit_key(self):
        return ("A", ())

    def degree_of_key(self, key):
        tag, m = key
        d = self.base.degree_of_key(m)
        return d if tag == "A" else self.n - d

    def basis(self, k):
        if not (self.lo <= k <= self.hi):
            raise GcaError(f"degree {k} outside window [{self.lo}, {self.hi}]")
        ck = ("pb", k)
        hit = self._cache.get(ck)
        if hit is None:
            out = []
            if k >= 0:
                out.extend(("A", m) for m in self.base.basis(k))
            if self.n - k >= 0:
                out.extend(("D", m) for m in self.base.basis(self.n - k))
            hit = tuple(out)
            self._cache[ck] = hit
        return hit

    def basis_index(self, k):
        ck = ("pbi", k)
        hit = self._cache.get(ck)
        if hit is None:
            hit = {m: i for i, m in enumerate(self.basis(k))}
            self._cache[ck] = hit
        return hit

    def mul_keys(self, k1, k2):
        t1, m1 = k1
        t2, m2 = k2
        if t1 == "A" and t2 == "A":
            return {("A", m): s for m, s in self.base.mul_keys(m1, m2).items()}
        if t1 == "D" and t2 == "D":
            return {}
        if t1 == "A":
            a, p = m1, m2
            flip = (self.base.degree_of_key(a)
                    * (self.n - self.base.degree_of_key(p))) % 2
        else:
            p, a = m1, m2
            flip = 0
        q = _sub_mono(p, a)
        if q is None:
            return {}
        prod = self.base.mul_keys(a, q)
        if not prod:
            return {}
        [(back, s)] = prod.items()
        if back != p:
            raise GcaError("monomial division inconsistency")
        if flip:
            s = -s
        return {("D", q): s}

    def diff_key(self, key):
        tag, m = key
        if tag == "A":
            return {("A", k): c for k, c in self.base.diff_key(m).items()}
        pd = self.base.degree_of_key(m)
        if pd < 1:
            return {}
        k = self.n - pd
        sgn = 1 if (k - 1) % 2 == 0 else -1
        rows = self._dual_rows(pd)
        out = {}
        for b, v in rows.get(m, {}).items():
            out[("D", b)] = sgn * v
        return out

    def _dual_rows(self, pd):
        """For each degree-pd monomial p: {b: coefficient of p in d(b)}."""
        ck = ("drow", pd)
        hit = self._cache.get(ck)
        if hit is None:
            hit = {}
            below = self.base.basis(pd - 1)
            above = self.base.basis(pd)
            mat = self.base.dmat(pd - 1)
            for (i, j), v in mat.entries.items():
                hit.setdefault(above[i], {})[below[j]] = v
            self._cache[ck] = hit
        return hit

    def dmat(self, k):
        ck = ("pdm", k)
        hit = self._cache.get(ck)
        if hit is None:
            rows = self.basis_index(k + 1)
            cols = []
            for key in self.basis(k):
                col = {}
                for k2, c in self.diff_key(key).items():
                    col[rows[k2]] = as_coeff(c)
                cols.append(col)
            hit = RatMatrix.from_columns(len(rows), cols)
            self._cache[ck] = hit
        return hit

    # ----- elements -----------------------------------------------------
    def zero(self):
        return Element(self, {})

    def one(self):
        return Element(self, {("A", ()): Q(1)})

    def include(self, elem: Element) -> Element:
        """Tag an element of the base algebra into the completion."""
        if elem.alg is not self.base:
            raise GcaError("include() wants an element of the base algebra")
        return Element(self, {("A", m): c for m, c in elem.coeffs.items()})

    def a_part(self, elem: Element) -> Element:
        return Element(self.base, {m: c for (t, m), c in elem.coeffs.items()
                                   if t == "A"})

    def dual_of(self, spec) -> Element:
        """dual(p) for a base monomial p (by word string or key)."""
        if isinstance(spec, str):
            mono, sign = self.base.normalize_word(
                [g for g in spec.split("*") if g])
            if sign == 0:
                raise GcaError(f"{spec!r} vanishes; it has no dual")
            return Element(self, {("D", mono): Q(sign)})
        return Element(self, {("D", _trim(spec)): Q(1)})

    def gen(self, gname):
        return self.include(self.base.gen(gname))

    def element(self, spec):
        if isinstance(spec, Element):
            if spec.alg is not self:
                raise GcaError("element belongs to a different algebra")
            return spec
        if isinstance(spec, dict):
            return Element(self, spec)
        return Element(self, parse_pn_poly(self, spec))

    def key_str(self, key):
        tag, m = key
        if tag == "A":
            return self.base.key_str(m)
        return f"dual({self.base.key_str(m)})"

    def key_sort(self, key):
        tag, m = key
        return (self.degree_of_key(key), tag, m)

    def __repr__(self):
        return (f"PnPresentation({self.name or 'P'}: n={self.n}, "
                f"window [{self.lo}, {self.hi}])")


def parse_pn_poly(pn, text, line=None):
    """Polynomial grammar extended with dual(gen*gen*...) atoms."""
    import re
    coeffs = {}
    pos = 0
    n = len(text)
    NUM = re.compile(r"\d+(?:/\d+)?")
    NAME = re.compile(r"[A-Za-z_][A-Za-z_0-9]*")

    def skip():
        nonlocal pos
        while pos < n and text[pos].isspace():
            pos += 1

    def err(msg, at=None):
        raise ParseError(msg, (at if at is not None else pos) + 1, line)

    def read_factor():
        nonlocal pos
        m = NAME.match(text, pos)
        if not m:
            err(f"unexpected character {text[pos]!r}" if pos < n
                else "unexpected end of input")
        word = m.group(0)
        pos = m.end()
        if word == "dual":
            skip()
            if pos >= n or text[pos] != "(":
                err("dual needs a parenthesized monomial")
            pos += 1
            depth_start = pos
            while pos < n and text[pos] != ")":
                pos += 1
            if pos >= n:
                err("unclosed dual(", depth_start)
            inner = text[depth_start:pos]
            pos += 1
            return pn.dual_of(inner.replace(" ", ""))
        return pn.gen(word)

    skip()
    first = True
    while pos < n:
        sign = 1
        saw = False
        while pos < n and text[pos] in "+-":
            if text[pos] == "-":
                sign = -sign
            saw = True
            pos += 1
            skip()
        if pos >= n:
            if saw:
                err("trailing operator", pos - 1)
            break
        if not first and not saw:
            err("expected '+' or '-'")
        coeff = Q(1)
        factors = []
        m = NUM.match(text, pos)
        if m:
            coeff = Q(m.group(0))
            pos = m.end()
            skip()
            while pos < n and text[pos] == "*":
                pos += 1
                skip()
                factors.append(read_factor())
                skip()
        else:
            factors.append(read_factor())
            skip()
            while pos < n and text[pos] == "*":
                pos += 1
                skip()
                factors.append(read_factor())
                skip()
        term = pn.one() * (sign * coeff)
        for fct in factors:
            term = term * fct
        for k, v in term.coeffs.items():
            s = coeffs.get(k, 0) + v
            if coeff_is_zero(as_coeff(s)):
                coeffs.pop(k, None)
            else:
                coeffs[k] = s
        first = False
        skip()
    return coeffs


# ----- construction and validation --------------------------------------


def dual_complex(p: Presentation, n: int, lo: int, hi: int):
    """Dual slices with the signed-transpose differential.

    Returns {degree k: (tuple of base monomials p whose duals span degree k,
    matrix of d)}; the matrix columns follow the listed monomials and rows
    follow degree k+1's listing.
    """
    pn = PnPresentation(p, n, hi)
    out = {}
    for k in range(lo, hi + 1):
        monos = tuple(m for m in p.basis(n - k)) if n - k >= 0 else ()
        rows_listing = tuple(p.basis(n - k - 1)) if n - k - 1 >= 0 else ()
        ridx = {m: i for i, m in enumerate(rows_listing)}
        cols = []
        for m in monos:
            col = {}
            for key, c in pn.diff_key(("D", m)).items():
                col[ridx[key[1]]] = c
            cols.append(col)
        out[k] = (monos, RatMatrix.from_columns(len(rows_listing), cols))
    return out


def dualize(p: Presentation, n: int, bound: int, name="",
            check=True) -> PnPresentation:
    """Duality completion in dimension n, validated on construction."""
    if bound > p.bound:
        raise GcaError(f"requested bound {bound} above base bound {p.bound}")
    if check:
        if betti(p, 0) != 1:
            raise GcaError("base algebra is not cohomologically connected")
        for k in range(n, bound + 1):
            if k + 1 > p.bound:
                break
            if betti(p, k):
                raise GcaError(
                    f"H^{k} != 0: cohomology in degrees >= {n} obstructs "
                    f"dualization")
    pn = PnPresentation(p, n, bound, name=name)
    if check:
        rep = validate_pn(pn, max_total=0, d_square_window=(0, bound - 2))
        if not rep.ok:
            raise GcaError("dualization failed validation: "
                           + "; ".join(rep.issues[:3]))
    return pn


def validate_pn(pn: PnPresentation, max_total, d_square_window=None,
                window=None) -> ValidationReport:
    """Structural check: d^2 = 0 on keys, graded commutativity and the
    Leibniz rule on basis pairs, associativity on triples, within the
    given total-degree budget."""
    issues = []
    lo = max(pn.lo, 0) if window is None else window[0]
    hi = pn.hi if window is None else window[1]
    if d_square_window is None:
        d_square_window = (lo, hi - 2)
    for k in range(d_square_window[0], d_square_window[1] + 1):
        for key in pn.basis(k):
            e = Element(pn, {key: Q(1)})
            dd = e.d().d()
            if not dd.is_zero():
                issues.append(f"d^2 != 0 on {pn.key_str(key)}")
    pairs_hi = min(hi, max_total)
    for k1 in range(lo, pairs_hi + 1):
        for k2 in range(k1, pairs_hi + 1 - max(k1, 0)):
            if k1 + k2 > pairs_hi:
                continue
            for key1 in pn.basis(k1):
                e1 = Element(pn, {key1: Q(1)})
                d1 = e1.d()
                for key2 in pn.basis(k2):
                    e2 = Element(pn, {key2: Q(1)})
                    p12 = e1 * e2
                    # graded commutativity
                    sign = -1 if (k1 % 2 and k2 % 2) else 1
                    if not (p12 - sign * (e2 * e1)).is_zero():
                        issues.append(
                            f"commutativity fails on ({pn.key_str(key1)}, "
                            f"{pn.key_str(key2)})")
                    # Leibniz
                    if k1 + k2 + 1 <= hi:
                        lhs = p12.d()
                        rhs = d1 * e2 + (e1 * e2.d() if k1 % 2 == 0
                                         else -1 * (e1 * e2.d()))
                        if not (lhs - rhs).is_zero():
                            issues.append(
                                f"Leibniz fails on ({pn.key_str(key1)}, "
                                f"{pn.key_str(key2)})")
                    if len(issues) > 12:
                        return ValidationReport(issues)
    # associativity on triples
    for k1 in range(lo, max_total + 1):
        for k2 in range(lo, max_total + 1):
            for k3 in range(lo, max_total + 1):
                if k1 + k2 + k3 > max_total:
                    continue
                for key1 in pn.basis(k1):
                    e1 = Element(pn, {key1: Q(1)})
                    for key2 in pn.basis(k2):
                        e2 = Element(pn, {key2: Q(1)})
                        p12 = e1 * e2
                        for key3 in pn.basis(k3):
                            e3 = Element(pn, {key3: Q(1)})
                            if not ((p12 * e3) - (e1 * (e2 * e3))).is_zero():
                                issues.append(
                                    "associativity fails on "
                                    f"({pn.key_str(key1)}, {pn.key_str(key2)},"
                                    f" {pn.key_str(key3)})")
                                if len(issues) > 12:
                                    return ValidationReport(issues)
    return ValidationReport(issues)


def cdga_retraction(pn: PnPresentation, window=None) -> LinearMap:
    """Projection onto the base algebra, killing every dual key."""
    lo, hi = window or (max(pn.lo, 0), pn.hi)
    images = {}
    for k in range(lo, hi + 1):
        for key in pn.basis(k):
            tag, m = key
            images[key] = (Element(pn.base, {m: Q(1)}) if tag == "A"
                           else pn.base.zero())
    return LinearMap(pn, pn.base, images, name="retract-to-base")


# ----- dg-module retracts ------------------------------------------------


class ModuleRetract:
    """A module map r: B -> A over a cdga map f: A -> B, given A-linearly
    on the module basis of B over A (B's generator table must start with
    A's generators)."""

    def __init__(self, f: CdgaMap, table, check_depth=8, check=True):
        self.f = f
        self.A = f.source
        self.B = f.target
        self.n_split = len(self.A.gen_names)
        if self.B.gen_names[:self.n_split] != self.A.gen_names:
            raise GcaError("module retract needs B's generators to extend A's")
        self.table = {}
        for key, val in table.items():
            if isinstance(key, str):
                mono, sign = self.B.normalize_word(
                    [g for g in key.split("*") if g])
                if sign == 0:
                    continue
                val = self.A.element(val) * sign
                key = mono
            else:
                val = self.A.element(val)
            self.table[_trim(key)] = val
        if check:
            rep = self.check(check_depth)
            if not rep.ok:
                raise GcaError("not a dg-module retract: "
                               + "; ".join(rep.issues[:3]))

    def split_key(self, mono):
        a_part = _trim(mono[:self.n_split])
        w_part = _trim([0] * self.n_split + list(mono[self.n_split:]))
        return a_part, w_part

    def apply_key(self, mono) -> Element:
        a_part, w_part = self.split_key(mono)
        img = self.table.get(w_part)
        if img is None:
            raise GcaError(
                f"module basis element {self.B.key_str(w_part)} has no "
                f"retract value")
        if img.is_zero():
            return self.A.zero()
        return Element(self.A, {a_part: Q(1)}) * img

    def apply(self, elem: Element) -> Element:
        out = self.A.zero()
        for mono, c in elem.coeffs.items():
            out = out + c * self.apply_key(mono)
        return out

    def r1(self) -> Element:
        return self.apply(self.B.one())

    def check(self, depth) -> ValidationReport:
        """r(1), chain property, and A-linearity over f on basis pairs."""
        issues = []
        for k in range(0, min(depth, self.B.bound - 1) + 1):
            for mono in self.B.basis(k):
                b = Element(self.B, {mono: Q(1)})
                lhs = self.apply(b.d())
                rhs = self.apply_key(mono).d()
                if not (lhs - rhs).is_zero():
                    issues.append(
                        f"r does not chain on {self.B.key_str(mono)}")
                    if len(issues) > 5:
                        return ValidationReport(issues)
        cap = min(depth, self.B.bound)
        for ka in range(1, cap + 1):
            for ma in self.A.basis(ka):
                a = Element(self.A, {ma: Q(1)})
                fa = self.f.apply(a)
                for kb in range(0, cap - ka + 1):
                    for mb in self.B.basis(kb):
                        b = Element(self.B, {mb: Q(1)})
                        lhs = self.apply(fa * b)
                        rhs = a * self.apply_key(mb)
                        if not (lhs - rhs).is_zero():
                            issues.append(
                                f"r is not A-linear on ({self.A.key_str(ma)},"
                                f" {self.B.key_str(mb)})")
                            if len(issues) > 5:
                                return ValidationReport(issues)
        return ValidationReport(issues)


def stage_of(B: Presentation, n_split: int, w_mono):
    """Filtration stage (i, j) of a module-basis monomial: wordlength q and
    degree d sit in stage (d - q, d - 2q)."""
    q = sum(e for e in w_mono[n_split:])
    d = B.degree_of_key(w_mono)
    return (d - q, d - 2 * q)


def semifree_filtration(B: Presentation, n_split: int, max_degree: int):
    """Stages of the module basis, lexicographically ordered, with the
    semifreeness check that d lowers the stage strictly.

    Requires no degree-1 generators on either side and relative minimality;
    violations are reported with a witness monomial.
    """
    if any(d == 1 for d in B.gen_degrees):
        raise GcaError("filtration needs all generators in degrees >= 2")
    stages = {}
    w_names = B.gen_names[n_split:]
    w_sub = Presentation(
        [(g, B.gen_degree(g)) for g in w_names], bound=max_degree,
        name="module-basis")
    for k in range(0, max_degree + 1):
        for m in w_sub.basis(k):
            mono = _trim([0] * n_split + list(m))
            stages.setdefault(stage_of(B, n_split, mono), []).append(mono)
    ordered = [(ij, tuple(sorted(stages[ij]))) for ij in sorted(stages)]
    # d must land strictly earlier
    for ij, monos in ordered:
        for mono in monos:
            if B.degree_of_key(mono) + 1 > B.bound:
                continue
            for key in B.diff_key(mono):
                w_part = _trim([0] * n_split + list(key[n_split:]))
                if not any(e for e in w_part):
                    continue
                target = stage_of(B, n_split, w_part)
                if target >= ij:
                    raise GcaError(
                        f"d({B.key_str(mono)}) has a stage-{target} term "
                        f"{B.key_str(key)}; minimality/semifreeness fails")
    return ordered


class RetractObstruction:
    """Stagewise extension failure: the class that must die but does not."""

    def __init__(self, stage, mono, cls):
        self.stage = stage
        self.mono = mono
        self.obstruction_class = cls

    def __repr__(self):
        return (f"RetractObstruction(stage {self.stage}, generator "
                f"{self.obstruction_class.alg.name or 'A'}-level, "
                f"class {self.obstruction_class!r})")


def build_retract(f: CdgaMap, prescribed, max_degree: int,
                  check_depth=8):
    """Extend prescribed stage images to a dg-module retract, or report the
    first obstruction class.

    prescribed maps module-basis monomials (strings or keys of B) to
    elements of A; every other basis monomial gets the canonical primitive
    of r(d(mono)), stage by stage in lexicographic order.
    """
    A, B = f.source, f.target
    n_split = len(A.gen_names)
    presc = {}
    for key, val in (prescribed or {}).items():
        if isinstance(key, str):
            mono, sign = B.normalize_word([g for g in key.split("*") if g])
            if sign == 0:
                continue
            presc[mono] = A.element(val) * sign
        else:
            presc[_trim(key)] = A.element(val)
    table = {}
    stages = semifree_filtration(B, n_split, max_degree)
    partial = ModuleRetract.__new__(ModuleRetract)
    partial.f, partial.A, partial.B = f, A, B
    partial.n_split = n_split
    partial.table = table
    for ij, monos in stages:
        for mono in monos:
            deg = B.degree_of_key(mono)
            if deg == 0:
                val = presc.get(mono, A.one())
                if (val - A.one()).is_zero() is False and mono == ():
                    pass
                table[mono] = val
                continue
            if deg + 1 > B.bound:
                raise GcaError(
                    f"stage element {B.key_str(mono)} needs degree "
                    f"{deg + 1} above B's bound")
            rhs = partial.apply(Element(B, dict(B.diff_key(mono))))
            if mono in presc:
                val = presc[mono]
                if not (val.d() - rhs).is_zero():
                    raise GcaError(
                        f"prescribed image of {B.key_str(mono)} violates "
                        f"d(image) = r(d(mono))")
            else:
                val = primitive(A, rhs)
                if val is None:
                    return RetractObstruction(ij, mono, class_of(A, rhs))
            table[mono] = val
    return ModuleRetract(f, table, check_depth=check_depth, check=True)


# ----- naturality: extending maps over completions -----------------------


def extend_map(f: CdgaMap, r: ModuleRetract, n: int, bound: int,
               pn_source=None, pn_target=None, check=True,
               check_pairs_to=None) -> LinearMap:
    """The cdga map on completions acting as f on the base and as the dual
    of r on dual keys; multiplicativity is verified on basis pairs."""
    pnA = pn_source or dualize(f.source, n, bound)
    pnB = pn_target or dualize(f.target, n, bound)
    images = {}
    lo, hi = max(pnA.lo, 0, pnB.lo), bound
    for k in range(lo, hi + 1):
        if k >= 0:
            for m in f.source.basis(k):
                images[("A", m)] = pnB.include(
                    f.apply(Element(f.source, {m: Q(1)})))
        pd = n - k
        if pd >= 0:
            b_monos = f.target.basis(pd)
            for p in f.source.basis(pd):
                img = {}
                for b in b_monos:
                    c = r.apply_key(b).coefficient(p)
                    if not coeff_is_zero(as_coeff(c)):
                        img[("D", b)] = c
                images[("D", p)] = Element(pnB, img)
    g = LinearMap(pnA, pnB, images, name=f"P{n}-extension")
    g.pn_source = pnA
    g.pn_target = pnB
    if check:
        rep = g.check_chain(range(lo, hi))
        if not rep.ok:
            raise GcaError("extension is not a chain map: "
                           + "; ".join(rep.issues[:3]))
        cap = check_pairs_to if check_pairs_to is not None else min(hi, n + 1)
        rep = g.check_multiplicative(max(lo, 0), cap)
        if not rep.ok:
            raise GcaError("extension is not multiplicative: "
                           + "; ".join(rep.issues[:3]))
        if (r.r1().coefficient(()) != 0) != (map_degree(g, n) != 0):
            raise GcaError("degree/r(1) mismatch in extension")
    return g


# ----- hyperbolic middle pairing -----------------------------------------


class HyperbolicCertificate:
    def __init__(self, pairs, signature, gram):
        self.pairs = pairs
        self.signature = signature
        self.gram = gram

    def __repr__(self):
        return (f"HyperbolicCertificate({len(self.pairs)} hyperbolic pairs, "
                f"signature {self.signature})")


def _symmetric_signature(g: RatMatrix):
    """Signature of a symmetric rational matrix by congruent diagonalization."""
    nd = g.rows
    rows = [[Q(0)] * nd for _ in range(nd)]
    for (i, j), v in g.entries.items():
        rows[i][j] = v
    pos = neg = 0
    idx = list(range(nd))
    while idx:
        piv = None
        for i in idx:
            if rows[i][i]:
                piv = i
                break
        if piv is None:
            off = None
            for i in idx:
                for j in idx:
                    if i != j and rows[i][j]:
                        off = (i, j)
                        break
                if off:
                    break
            if off is None:
                break  # remaining block is zero
            i, j = off
            for t in range(nd):
                rows[i][t] += rows[j][t]
            for t in range(nd):
                rows[t][i] += rows[t][j]
            continue
        d = rows[piv][piv]
        if d > 0:
            pos += 1
        else:
            neg += 1
        idx.remove(piv)
        for i in list(idx):
            if rows[i][piv]:
                c = rows[i][piv] / d
                for t in range(nd):
                    rows[i][t] -= c * rows[piv][t]
                for t in range(nd):
                    rows[t][i] -= c * rows[t][piv]
    return pos - neg


def hyperbolic_basis(pn: PnPresentation) -> HyperbolicCertificate:
    """Middle-degree pairing certificate for dimension divisible by 4:
    explicit hyperbolic pairs and signature zero."""
    n = pn.n
    if n % 4 != 0:
        raise GcaError("hyperbolic certificate needs dimension 0 mod 4")
    half = n // 2
    mid = cohomology(pn, half)
    g = pairing_matrix(pn, n, half)
    if mid.dim == 0:
        return HyperbolicCertificate([], 0, g)
    if RrefSolver(g).rank != mid.dim:
        raise GcaError("middle pairing degenerate; duality is broken")
    base_mid = cohomology(pn.base, half)
    if 2 * base_mid.dim != mid.dim:
        raise GcaError("middle slice does not split evenly")
    # basis from the base side, partners solved from the dual side
    e_classes = [mid.class_of(pn.include(rep)) for rep in base_mid.reps]
    pairs = []
    dual_side = [rep for rep in mid.reps
                 if all(t == "D" for (t, _m) in rep.coeffs)]
    if len(dual_side) != base_mid.dim:
        # fall back: complement of the included base classes inside the slice
        dual_side = mid.reps[base_mid.dim:]
    for i, e in enumerate(e_classes):
        rhs = {}
        for j, w in enumerate(dual_side):
            rhs[(0, j)] = None
        entries = {}
        for j, w in enumerate(dual_side):
            entries[(0, j)] = integrate(pn, n, e.representative * w)
        mat = RatMatrix(1, len(dual_side), {k: v for k, v in entries.items() if v})
        sol = RrefSolver(mat).solve({0: Q(1)})
        if sol is None:
            raise GcaError("no hyperbolic partner; pairing degenerate")
        partner = pn.zero()
        for j, c in sol.items():
            partner = partner + c * dual_side[j]
        # verify the block shape
        if integrate(pn, n, e.representative * partner) != 1:
            raise GcaError("hyperbolic partner normalization failed")
        if not (partner * partner).is_zero():
            pass  # dual ^ dual = 0 holds identically; squares cannot appear
        pairs.append((e, mid.class_of(partner)))
    sig = _symmetric_signature(g) if half % 2 == 0 else 0
    if sig != 0:
        raise GcaError(f"middle signature {sig} != 0")
    return HyperbolicCertificate(pairs, 0, g)
