"""Finitely presented free graded-commutative differential algebras.

Monomials are exponent tuples over an ordered generator table (trailing
zeros trimmed, odd generators capped at exponent 1).  A presentation owns
an optional quotient (degree truncation, relative degree truncation on a
generator subset, or a monomial ideal), a mandatory working degree bound,
and an optional inductive tail of generators killing cohomology in a degree
range; the tail materializes lazily degree by degree, with canonical
(reduced-echelon) cocycle choices, so independent runs agree.

Sign conventions: a transposition of two odd letters contributes -1, a
repeated odd letter kills a word, and d is extended by the graded Leibniz
rule d(uv) = (du)v + (-1)^{|u|} u (dv).
"""

from __future__ import annotations

import re
import threading
from fractions import Fraction

from .qpoly import QPoly, as_coeff, coeff_is_zero
from .ratlin import IncrementalSpan, RatMatrix, RrefSolver

Q = Fraction


class GcaError(ValueError):
    pass


class ParseError(GcaError):
    def __init__(self, msg, pos=None, line=None):
        self.pos = pos
        self.line = line
        where = ""
        if line is not None:
            where = f" (line {line}, col {pos})"
        elif pos is not None:
            where = f" (col {pos})"
        super().__init__(msg + where)


class ValidationReport:
    """Outcome of a structural check: ok flag plus issue strings."""

    def __init__(self, issues=None, notes=None):
        self.issues = list(issues or [])
        self.notes = list(notes or [])

    @property
    def ok(self):
        return not self.issues

    def __repr__(self):
        if self.ok:
            return "ValidationReport(ok)"
        return "ValidationReport(issues=%r)" % (self.issues,)


def _trim(exps):
    exps = list(exps)
    while exps and exps[-1] == 0:
        exps.pop()
    return tuple(exps)


class Element:
    """Sparse combination of monomial keys with exact coefficients.

    Coefficients are Fractions, or QPoly when the element is parametric in
    named coefficients.  Elements are tied to their algebra and combine only
    within it.
    """

    __slots__ = ("alg", "coeffs")

    def __init__(self, alg, coeffs=None, _clean=False):
        self.alg = alg
        if _clean:
            self.coeffs = coeffs if coeffs is not None else {}
        else:
            cc = {}
            if coeffs:
                for k, v in coeffs.items():
                    v = as_coeff(v)
                    if not coeff_is_zero(v):
                        cc[k] = v
            self.coeffs = cc

    def is_zero(self):
        return not self.coeffs

    def degree(self):
        """Common degree of the support, or None for 0."""
        degs = {self.alg.degree_of_key(k) for k in self.coeffs}
        if not degs:
            return None
        if len(degs) > 1:
            raise GcaError(f"inhomogeneous element of degrees {sorted(degs)}")
        return degs.pop()

    def is_parametric(self):
        return any(isinstance(c, QPoly) for c in self.coeffs.values())

    def __add__(self, other):
        if not isinstance(other, Element):
            return NotImplemented
        if other.alg is not self.alg:
            raise GcaError("elements from different algebras")
        coeffs = dict(self.coeffs)
        for k, v in other.coeffs.items():
            s = coeffs.get(k, 0) + v
            if coeff_is_zero(as_coeff(s)):
                coeffs.pop(k, None)
            else:
                coeffs[k] = s
        return Element(self.alg, coeffs, _clean=True)

    def __neg__(self):
        return Element(self.alg, {k: -v for k, v in self.coeffs.items()}, _clean=True)

    def __sub__(self, other):
        if not isinstance(other, Element):
            return NotImplemented
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, Element):
            if other.alg is not self.alg:
                raise GcaError("elements from different algebras")
            out = {}
            for k1, c1 in self.coeffs.items():
                for k2, c2 in other.coeffs.items():
                    prod = self.alg.mul_keys(k1, k2)
                    if not prod:
                        continue
                    c = c1 * c2
                    for k, s in prod.items():
                        t = out.get(k, 0) + c * s
                        if coeff_is_zero(as_coeff(t)):
                            out.pop(k, None)
                        else:
                            out[k] = t
            return Element(self.alg, out, _clean=True)
        if isinstance(other, (int, Fraction, QPoly)):
            if coeff_is_zero(as_coeff(other)):
                return Element(self.alg, {}, _clean=True)
            return Element(self.alg, {k: v * other for k, v in self.coeffs.items()})
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction, QPoly)):
            return self.__mul__(other)
        return NotImplemented

    def d(self):
        """Differential, by linearity over diff_key."""
        out = {}
        for k, c in self.coeffs.items():
            for k2, s in self.alg.diff_key(k).items():
                t = out.get(k2, 0) + c * s
                if coeff_is_zero(as_coeff(t)):
                    out.pop(k2, None)
                else:
                    out[k2] = t
        return Element(self.alg, out, _clean=True)

    def coefficient(self, key):
        return self.coeffs.get(key, Q(0))

    def substitute(self, assignment):
        """Specialize parametric coefficients at rational (or QPoly) values."""
        out = {}
        for k, c in self.coeffs.items():
            if isinstance(c, QPoly):
                c = c.substitute(assignment)
                if c.is_constant():
                    c = c.constant_value()
            if not coeff_is_zero(as_coeff(c)):
                out[k] = c
        return Element(self.alg, out, _clean=True)

    def __eq__(self, other):
        return (isinstance(other, Element) and other.alg is self.alg
                and self.coeffs == other.coeffs)

    def __hash__(self):
        return hash((id(self.alg), frozenset(self.coeffs.items())))

    def __repr__(self):
        if not self.coeffs:
            return "0"
        keys = sorted(self.coeffs, key=self.alg.key_sort)
        bits = []
        for k in keys:
            c = self.coeffs[k]
            mono = self.alg.key_str(k)
            if isinstance(c, QPoly):
                bits.append(f"({c})*{mono}" if mono != "1" else f"({c})")
            elif mono == "1":
                bits.append(str(c))
            elif c == 1:
                bits.append(mono)
            elif c == -1:
                bits.append(f"-{mono}")
            else:
                bits.append(f"{c}*{mono}")
        return " + ".join(bits).replace("+ -", "- ")


_TOKEN = re.compile(r"\s*(?:(?P<num>\d+(?:/\d+)?)|(?P<name>[A-Za-z_][A-Za-z_0-9]*)"
                    r"|(?P<op>[+\-*]))")


def parse_poly(alg, text, line=None):
    """Parse a polynomial: +/- separated terms of rational*gen*gen*... factors.

    Returns a coefficient dict over alg's monomial keys.  Unknown characters
    raise ParseError at their column.
    """
    coeffs = {}
    pos = 0
    n = len(text)
    sign = 1
    expect_term = True
    cur_coeff = None
    cur_word = []

    def flush(at):
        nonlocal cur_coeff, cur_word, sign, expect_term
        if cur_coeff is None and not cur_word:
            if not expect_term:
                return
            raise ParseError("empty term", at + 1, line)
        c = Q(cur_coeff) if cur_coeff is not None else Q(1)
        mono, ksign = alg.normalize_word(cur_word)
        c = c * sign * ksign
        if c and mono is not None and not alg.key_killed(mono):
            s = coeffs.get(mono, 0) + c
            if s:
                coeffs[mono] = s
            else:
                coeffs.pop(mono, None)
        cur_coeff, cur_word, sign = None, [], 1

    pending_star = False
    while pos < n:
        m = _TOKEN.match(text, pos)
        if not m or m.end() == m.start() + len(m.group(0)) - len(m.group(0).lstrip()):
            if text[pos:].strip() == "":
                break
        if not m:
            bad = len(text[pos:]) - len(text[pos:].lstrip())
            raise ParseError(f"unexpected character {text[pos + bad]!r}",
                             pos + bad + 1, line)
        ws = m.group(0)
        body = ws.lstrip()
        tok_at = m.end() - len(body)
        if not body:
            pos = m.end()
            continue
        if m.group("num"):
            if cur_coeff is not None or (cur_word and not pending_star):
                raise ParseError("unexpected number", tok_at + 1, line)
            if cur_word:
                raise ParseError("numbers must precede generators", tok_at + 1, line)
            cur_coeff = body
            pending_star = False
        elif m.group("name"):
            if not pending_star and cur_word:
                raise ParseError("missing '*' between generators", tok_at + 1, line)
            cur_word.append(body)
            pending_star = False
        else:
            op = body
            if op == "*":
                if cur_coeff is None and not cur_word:
                    raise ParseError("dangling '*'", tok_at + 1, line)
                pending_star = True
            else:
                if pending_star:
                    raise ParseError("dangling '*'", tok_at + 1, line)
                flush(tok_at)
                expect_term = True
                if op == "-":
                    sign = -sign
        pos = m.end()
        if m.group("num") or m.group("name"):
            expect_term = False
    rest = text[pos:].strip()
    if rest:
        bad = pos + (len(text[pos:]) - len(text[pos:].lstrip()))
        raise ParseError(f"unexpected character {text[bad]!r}", bad + 1, line)
    if pending_star:
        raise ParseError("dangling '*'", pos, line)
    if cur_coeff is not None or cur_word:
        flush(pos)
    elif expect_term and (coeffs or sign == -1):
        # bare trailing sign like "X + "
        raise ParseError("trailing operator", pos, line)
    return coeffs


class Presentation:
    """Free graded-commutative algebra with differential and quotient.

    Deterministic throughout: generator order is declaration order, bases
    are enumerated in exponent-lexicographic order, and every cohomology
    choice comes from a canonical reduced echelon form.
    """

    is_dualization = False

    def __init__(self, gens, diffs=None, quotient=(), bound=None, name="",
                 tail=None):
        if bound is None:
            raise GcaError("working degree bound is mandatory")
        self.bound = int(bound)
        self.name = name
        self._names = []
        self._degs = []
        self._odd = []
        self._index = {}
        for gname, deg in gens:
            self._add_gen_unchecked(gname, deg)
        self._quotient = tuple(self._check_quotient_spec(q) for q in quotient)
        self._diffs = [{} for _ in self._names]
        self._lock = threading.RLock()
        self._cache = {}
        diffs = diffs or {}
        for gname, val in diffs.items():
            if gname not in self._index:
                raise GcaError(f"differential for unknown generator {gname!r}")
            self._set_diff(gname, val)
        self._check_diff_degrees()
        # inductive tail: (first killed degree, last killed degree, name prefix)
        self._tail = tail
        self._tail_next = tail[0] if tail else None

    # ----- construction helpers -------------------------------------
    def _add_gen_unchecked(self, gname, deg):
        if gname in self._index:
            raise GcaError(f"duplicate generator {gname!r}")
        deg = int(deg)
        if deg < 1:
            raise GcaError(f"generator {gname!r} must have positive degree")
        self._index[gname] = len(self._names)
        self._names.append(gname)
        self._degs.append(deg)
        self._odd.append(deg % 2 == 1)

    def _check_quotient_spec(self, q):
        kind = q[0]
        if kind == "deg":
            return ("deg", int(q[1]))
        if kind == "rel":
            idx = tuple(sorted(self._index[g] for g in q[2]))
            return ("rel", int(q[1]), idx)
        if kind == "mono":
            monos = tuple(_trim(m) for m in q[1])
            return ("mono", monos)
        raise GcaError(f"unsupported quotient {q!r}; only degree truncations "
                       "and monomial ideals are available")

    def _set_diff(self, gname, val):
        i = self._index[gname]
        if isinstance(val, str):
            coeffs = parse_poly(self, val)
        elif isinstance(val, Element):
            coeffs = dict(val.coeffs)
        elif isinstance(val, dict):
            coeffs = {_trim(k): as_coeff(v) for k, v in val.items()}
        elif not val:
            coeffs = {}
        else:
            raise GcaError(f"cannot interpret differential {val!r}")
        coeffs = {k: v for k, v in coeffs.items()
                  if not coeff_is_zero(as_coeff(v)) and not self.key_killed(k)}
        self._diffs[i] = coeffs

    def _check_diff_degrees(self):
        for i, coeffs in enumerate(self._diffs):
            want = self._degs[i] + 1
            for k in coeffs:
                if self.degree_of_key(k) != want:
                    raise GcaError(
                        f"d({self._names[i]}) has a term of degree "
                        f"{self.degree_of_key(k)}, expected {want}")

    # ----- generator table ------------------------------------------
    @property
    def gen_names(self):
        return tuple(self._names)

    @property
    def gen_degrees(self):
        return tuple(self._degs)

    def gen_degree(self, gname):
        return self._degs[self._index[gname]]

    def diff_of_gen(self, gname):
        return Element(self, dict(self._diffs[self._index[gname]]))

    @property
    def quotient(self):
        return self._quotient

    # ----- monomial level -------------------------------------------
    def unit_key(self):
        return ()

    def degree_of_key(self, mono):
        return sum(e * self._degs[i] for i, e in enumerate(mono) if e)

    def key_killed(self, mono):
        for q in self._quotient:
            if q[0] == "deg":
                if self.degree_of_key(mono) >= q[1]:
                    return True
            elif q[0] == "rel":
                rel = sum(mono[i] * self._degs[i] for i in q[2] if i < len(mono))
                if rel >= q[1]:
                    return True
            else:
                for g in q[1]:
                    if len(g) <= len(mono) and all(
                            mono[i] >= e for i, e in enumerate(g)):
                        return True
        return False

    def mul_keys(self, m1, m2):
        """Product of two monomial keys: {} or {mono: +-1}, quotient applied."""
        sign = 1
        odd_seen = 0
        n2 = len(m2)
        # count odd letters of m2 jumped over odd letters of m1 with larger index
        odd1 = [i for i, e in enumerate(m1) if e and self._odd[i]]
        for j in range(n2 - 1, -1, -1):
            if m2[j] and self._odd[j]:
                if j < len(m1) and m1[j]:
                    return {}
                hops = sum(1 for i in odd1 if i > j)
                if hops % 2:
                    sign = -sign
        ln = max(len(m1), n2)
        exps = [(m1[i] if i < len(m1) else 0) + (m2[i] if i < n2 else 0)
                for i in range(ln)]
        mono = _trim(exps)
        if self.key_killed(mono):
            return {}
        return {mono: sign}

    def normalize_word(self, word):
        """Sort a word of generator names; returns (mono, sign) with sign 0
        when an odd generator repeats (then mono is None)."""
        idxs = []
        for gname in word:
            if gname not in self._index:
                raise GcaError(f"unknown generator {gname!r}")
            idxs.append(self._index[gname])
        sign = 1
        # Koszul sign = parity of inversions among odd letters
        odd_positions = [i for i in idxs if self._odd[i]]
        inv = 0
        for a in range(len(odd_positions)):
            for b in range(a + 1, len(odd_positions)):
                if odd_positions[a] > odd_positions[b]:
                    inv += 1
                elif odd_positions[a] == odd_positions[b]:
                    return None, 0
        if inv % 2:
            sign = -1
        exps = [0] * (max(idxs) + 1 if idxs else 0)
        for i in idxs:
            exps[i] += 1
        return _trim(exps), sign

    def diff_key(self, mono):
        """Graded Leibniz expansion of d on a monomial key."""
        ck = ("dk", mono)  # stable under later generator appends
        hit = self._cache.get(ck)
        if hit is not None:
            return hit
        out = {}
        prefix_deg = 0
        for i, e in enumerate(mono):
            if e:
                dg = self._diffs[i]
                if dg:
                    # m = pre * g^e * post; d hits each copy of g equally
                    rest = list(mono)
                    rest[i] = e - 1
                    pre = _trim(list(mono[:i]))
                    mid_post = _trim([0] * i + rest[i:])
                    sgn = -1 if prefix_deg % 2 else 1
                    for kd, cd in dg.items():
                        # pre * dg * (g^{e-1} * post)
                        p1 = self.mul_keys(pre, kd)
                        for k1, s1 in p1.items():
                            p2 = self.mul_keys(k1, mid_post)
                            for k2, s2 in p2.items():
                                c = out.get(k2, 0) + sgn * e * s1 * s2 * cd
                                if coeff_is_zero(as_coeff(c)):
                                    out.pop(k2, None)
                                else:
                                    out[k2] = c
                prefix_deg += e * self._degs[i]
        self._cache[ck] = out
        return out

    # ----- bases ------------------------------------------------------
    def _degree_groups(self):
        """Generator indices grouped by degree, ascending; cached per table."""
        ck = ("groups", len(self._names))
        hit = self._cache.get(ck)
        if hit is None:
            by_deg = {}
            for i, d in enumerate(self._degs):
                by_deg.setdefault(d, []).append(i)
            hit = tuple((d, tuple(by_deg[d])) for d in sorted(by_deg))
            self._cache[ck] = hit
        return hit

    def _basis_raw(self, k):
        """Basis of degree k over the current generator table, no tail growth."""
        ck = ("b", k, len(self._names))
        hit = self._cache.get(ck)
        if hit is not None:
            return hit
        if k < 0:
            out = ()
        elif k == 0:
            out = ((),)
        else:
            for q in self._quotient:
                if q[0] == "deg" and k >= q[1]:
                    self._cache[ck] = ()
                    return ()
            from itertools import combinations, combinations_with_replacement
            groups = [(d, idxs) for d, idxs in self._degree_groups() if d <= k]
            found = []

            def expand(gi, rem, chosen):
                if rem == 0:
                    exps = {}
                    for i in chosen:
                        exps[i] = exps.get(i, 0) + 1
                    top = max(exps) + 1 if exps else 0
                    mono = _trim([exps.get(i, 0) for i in range(top)])
                    if not self.key_killed(mono):
                        found.append(mono)
                    return
                if gi >= len(groups):
                    return
                d, idxs = groups[gi]
                # count 0 for this degree group
                expand(gi + 1, rem, chosen)
                limit = rem // d
                if d % 2 == 1:
                    limit = min(limit, len(idxs))
                    picker = combinations
                else:
                    picker = combinations_with_replacement
                for t in range(1, limit + 1):
                    if rem - t * d < 0:
                        break
                    for pick in picker(idxs, t):
                        expand(gi + 1, rem - t * d, chosen + list(pick))

            expand(0, k, [])
            found.sort()
            out = tuple(found)
        self._cache[ck] = out
        return out

    def _basis_index_raw(self, k):
        ck = ("bi", k, len(self._names))
        hit = self._cache.get(ck)
        if hit is None:
            hit = {m: i for i, m in enumerate(self._basis_raw(k))}
            self._cache[ck] = hit
        return hit

    def _dmat_raw(self, k):
        """Matrix of d: degree k -> k+1 over raw bases (columns = basis(k))."""
        ck = ("dm", k, len(self._names))
        hit = self._cache.get(ck)
        if hit is not None:
            return hit
        rows = self._basis_index_raw(k + 1)
        cols = []
        for m in self._basis_raw(k):
            col = {}
            for k2, c in self.diff_key(m).items():
                r = rows.get(k2)
                if r is None:
                    raise GcaError("differential image left the degree window")
                col[r] = as_coeff(c)
            cols.append(col)
        mat = RatMatrix.from_columns(len(rows), cols)
        self._cache[ck] = mat
        return mat

    def _h_data_raw(self, k):
        """Representative vectors for H^k over the raw (current) basis."""
        ck = ("h", k, len(self._names))
        hit = self._cache.get(ck)
        if hit is not None:
            return hit
        dim = len(self._basis_raw(k))
        span = IncrementalSpan()
        if dim and k >= 1:
            for col in self._dmat_raw(k - 1).col_dicts():
                span.add(col)
        reps = []
        if dim:
            for v in RrefSolver(self._dmat_raw(k)).kernel_basis():
                if span.add(v):
                    reps.append(v)
        self._cache[ck] = reps
        return reps

    def _ensure_tail(self, k):
        """Materialize tail generators of degree <= k (kills through k+1)."""
        if self._tail is None:
            return
        with self._lock:
            lo, hi, prefix = self._tail
            target = min(k + 1, hi)
            while self._tail_next is not None and self._tail_next <= target:
                j = self._tail_next
                reps = self._h_data_raw(j)
                basis_j = self._basis_raw(j)
                for idx, vec in enumerate(reps):
                    gname = f"{prefix}{j - 1}_{idx}"
                    coeffs = {basis_j[r]: v for r, v in vec.items()}
                    self._add_gen_unchecked(gname, j - 1)
                    self._diffs.append(coeffs)
                self._tail_next = j + 1
                if self._tail_next > hi:
                    self._tail_next = None

    def basis(self, k):
        """All normalized monomials of degree k surviving the quotient."""
        if k > self.bound:
            raise GcaError(f"degree {k} above working bound {self.bound}")
        self._ensure_tail(k)
        return self._basis_raw(k)

    def basis_index(self, k):
        if k > self.bound:
            raise GcaError(f"degree {k} above working bound {self.bound}")
        self._ensure_tail(k)
        return self._basis_index_raw(k)

    def dmat(self, k):
        if k + 1 > self.bound:
            raise GcaError(f"degree {k + 1} above working bound {self.bound}")
        self._ensure_tail(k + 1)
        return self._dmat_raw(k)

    def materialize(self, k=None):
        """Force the tail through degree k (default: the working bound)."""
        self._ensure_tail(self.bound if k is None else k)
        return self

    # ----- elements ---------------------------------------------------
    def zero(self):
        return Element(self, {})

    def one(self):
        return Element(self, {(): Q(1)})

    def gen(self, gname):
        if gname not in self._index:
            raise GcaError(f"unknown generator {gname!r}")
        i = self._index[gname]
        mono = _trim([0] * i + [1])
        if self.key_killed(mono):
            return self.zero()
        return Element(self, {mono: Q(1)})

    def element(self, spec):
        if isinstance(spec, Element):
            if spec.alg is not self:
                raise GcaError("element belongs to a different algebra")
            return spec
        if isinstance(spec, str):
            return Element(self, parse_poly(self, spec))
        if isinstance(spec, dict):
            return Element(self, {_trim(k): v for k, v in spec.items()
                                  if not self.key_killed(_trim(k))})
        raise GcaError(f"cannot interpret element {spec!r}")

    def key_str(self, mono):
        if not mono:
            return "1"
        bits = []
        for i, e in enumerate(mono):
            if e:
                bits.extend([self._names[i]] * e)
        return "*".join(bits)

    def key_sort(self, mono):
        return (self.degree_of_key(mono), mono)

    # ----- derived presentations ---------------------------------------
    def extended(self, new_gens, new_diffs=None, name=None, bound=None,
                 quotient_extra=(), tail=None):
        """New presentation with extra generators appended after this one's.

        The receiver's tail is materialized through the new bound first, so
        the generator table is a stable snapshot.
        """
        bound = bound if bound is not None else self.bound
        self._ensure_tail(bound)
        gens = list(zip(self._names, self._degs)) + list(new_gens)
        p = Presentation(gens, quotient=tuple(self._quotient) + tuple(quotient_extra),
                         bound=bound, name=name or self.name, tail=tail)
        for i, coeffs in enumerate(self._diffs):
            p._diffs[i] = {k: v for k, v in coeffs.items() if not p.key_killed(k)}
        for gname, val in (new_diffs or {}).items():
            p._set_diff(gname, val)
        p._check_diff_degrees()
        return p

    def __repr__(self):
        q = f", quotient={self._quotient}" if self._quotient else ""
        return (f"Presentation({self.name or 'anonymous'}: "
                f"{len(self._names)} gens, bound {self.bound}{q})")


# ----- spec-level operations ------------------------------------------


def normalize(p: Presentation, word):
    """Sort a generator word into its normalized monomial with Koszul sign."""
    return p.normalize_word(word)


def multiply(u: Element, v: Element) -> Element:
    return u * v


def differential(e: Element) -> Element:
    return e.d()


def basis(p: Presentation, k: int):
    return p.basis(k)


def truncate(p: Presentation, k: int, name=None) -> Presentation:
    """Quotient by the ideal of all monomials of degree >= k."""
    return _requotient(p, ("deg", k), name or (p.name and p.name + f"/deg>={k}"))


def truncate_rel(p: Presentation, k: int, gen_subset, name=None) -> Presentation:
    """Quotient by monomials whose degree along gen_subset is >= k.

    The ideal must be differential up to the working bound; a violating
    minimal monomial is reported otherwise.
    """
    return _requotient(p, ("rel", k, tuple(gen_subset)), name)


def quotient_monomials(p: Presentation, monos, name=None) -> Presentation:
    """Quotient by the monomial ideal generated by the given monomials."""
    keys = []
    for m in monos:
        if isinstance(m, str):
            mono, sign = p.normalize_word([g for g in m.split("*") if g])
            if sign == 0:
                continue
            keys.append(mono)
        else:
            keys.append(_trim(m))
    return _requotient(p, ("mono", tuple(keys)), name)


def _requotient(p, spec, name):
    if p._tail is not None and p._tail_next is not None:
        raise GcaError("materialize the inductive tail before quotienting")
    q = Presentation(list(zip(p._names, p._degs)),
                     quotient=tuple(p._quotient) + (spec,),
                     bound=p.bound, name=name or p.name)
    for i, coeffs in enumerate(p._diffs):
        q._diffs[i] = {k: v for k, v in coeffs.items() if not q.key_killed(k)}
    q._check_diff_degrees()
    rep = _quotient_descends(q)
    if not rep.ok:
        raise GcaError("quotient is not a differential ideal: " + rep.issues[0])
    return q


def _minimal_killed_monomials(p, max_degree):
    """Minimal monomials killed by the quotient, up to max_degree.

    Minimal: the monomial is killed but all its single-letter divisors are
    not.  Degree truncations contribute nothing here because d raises degree.
    """
    out = []
    interesting = [q for q in p._quotient if q[0] != "deg"]
    if not interesting:
        return out
    degs = p._degs
    odd = p._odd
    ngen = len(degs)
    exps = [0] * ngen

    def divisors_alive(mono):
        for i, e in enumerate(mono):
            if e:
                m2 = list(mono)
                m2[i] = e - 1
                if p.key_killed(_trim(m2)):
                    return False
        return True

    def rec(i, deg):
        if deg > max_degree:
            return
        mono = _trim(exps)
        if mono and p.key_killed(mono) and divisors_alive(mono):
            out.append(mono)
            # anything above it is non-minimal; do not extend this branch
            return
        if i == ngen:
            return
        # continue without gen i, then with increasing exponent
        rec(i + 1, deg)
        top = 1 if odd[i] else (max_degree - deg) // degs[i]
        for e in range(1, top + 1):
            exps[i] = e
            rec(i + 1, deg + e * degs[i])
        exps[i] = 0

    rec(0, 0)
    return out


def _quotient_descends(p, max_degree=None):
    """Check d(ideal) is inside the ideal, within the degree window."""
    max_degree = p.bound - 1 if max_degree is None else max_degree
    issues = []
    for q in p._quotient:
        if q[0] == "mono":
            for g in q[1]:
                if p.degree_of_key(g) > max_degree:
                    continue
                resid = {k: v for k, v in p.diff_key(g).items()
                         if not p.key_killed(k)}
                if resid:
                    issues.append(
                        f"d({p.key_str(g)}) has surviving terms "
                        f"{Element(p, resid)!r}")
    if any(q[0] == "rel" for q in p._quotient):
        for g in _minimal_killed_monomials(p, max_degree):
            resid = {k: v for k, v in p.diff_key(g).items()
                     if not p.key_killed(k)}
            if resid:
                issues.append(
                    f"d({p.key_str(g)}) has surviving terms "
                    f"{Element(p, resid)!r}")
    return ValidationReport(issues)


def check_presentation(p: Presentation) -> ValidationReport:
    """Verify d^2 = 0 on generators, homogeneity, and quotient descent."""
    issues = []
    notes = []
    for i, gname in enumerate(p._names):
        want = p._degs[i] + 1
        coeffs = p._diffs[i]
        for k in coeffs:
            if p.degree_of_key(k) != want:
                issues.append(
                    f"d({gname}) has a degree-{p.degree_of_key(k)} term, "
                    f"expected {want}")
        if want + 1 <= p.bound:
            dd = Element(p, dict(coeffs), _clean=True).d()
            if not dd.is_zero():
                issues.append(f"d(d({gname})) = {dd!r} != 0")
        else:
            notes.append(f"d^2({gname}) not checked: degree {want + 1} "
                         f"above bound")
    rep = _quotient_descends(p)
    issues.extend(rep.issues)
    if p._tail is not None:
        lo, hi, _ = p._tail
        built = (p._tail_next - 1) if p._tail_next is not None else hi
        notes.append(f"inductive tail kills degrees {lo}..{hi}; "
                     f"materialized through {built}")
    return ValidationReport(issues, notes)


def kill_cohomology(p: Presentation, from_degree: int, up_to: int,
                    prefix="v", name=None, bound=None) -> Presentation:
    """Extend p with generators killing H^j for from_degree <= j <= up_to.

    New generators of degree j-1 map onto canonical cocycle representatives
    of H^j at the previous stage; they materialize lazily as degrees are
    queried.  Cohomology below from_degree is untouched.
    """
    if from_degree < 2:
        raise GcaError("can only kill cohomology in degrees >= 2")
    if up_to < from_degree:
        raise GcaError("empty kill range")
    bound = bound if bound is not None else p.bound
    if up_to > bound:
        raise GcaError(f"kill range {up_to} above bound {bound}")
    return p.extended([], {}, name=name or (p.name and p.name + "+tail"),
                      bound=bound, tail=(from_degree, up_to, prefix))
