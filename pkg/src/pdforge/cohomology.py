"""Degreewise cohomology with exact class arithmetic.

Slices pick canonical representatives (reduced-echelon completion of the
coboundary space inside the cocycle space); classes are compared by solving
for a coboundary difference, never by representative equality.  The module
also carries algebra maps, the cup-product pairing against a fundamental
class, Poincare duality checking, mapping degree, and pushforwards.
"""

from __future__ import annotations

from fractions import Fraction

from .gca import Element, GcaError, ValidationReport
from .qpoly import QPoly, as_coeff, coeff_is_zero
from .ratlin import IncrementalSpan, RatMatrix, RrefSolver, _rref_int

Q = Fraction


def _cached(alg, key, build):
    with alg._lock:
        hit = alg._cache.get(key)
        if hit is None:
            hit = build()
            alg._cache[key] = hit
        return hit


def _dsolver(alg, k):
    """Reusable solver for d: degree k -> k+1."""
    return _cached(alg, ("dsolver", k), lambda: RrefSolver(alg.dmat(k)))


class CohomologyClass:
    """A cohomology class: slice coordinates plus a chosen representative."""

    __slots__ = ("slice", "coords", "representative")

    def __init__(self, slice_, coords, representative):
        self.slice = slice_
        self.coords = tuple(coords)
        self.representative = representative

    @property
    def degree(self):
        return self.slice.degree

    @property
    def alg(self):
        return self.slice.alg

    def is_zero(self):
        return all(coeff_is_zero(as_coeff(c)) for c in self.coords)

    def __add__(self, other):
        if other.slice is not self.slice:
            raise GcaError("classes from different slices")
        return CohomologyClass(
            self.slice, [a + b for a, b in zip(self.coords, other.coords)],
            self.representative + other.representative)

    def __sub__(self, other):
        return self + (-1) * other

    def __rmul__(self, c):
        return CohomologyClass(self.slice, [c * x for x in self.coords],
                               c * self.representative)

    def __eq__(self, other):
        return (isinstance(other, CohomologyClass)
                and other.slice is self.slice and other.coords == self.coords)

    def __repr__(self):
        return f"[{self.representative!r}]"


class CohomologySlice:
    """H^k with canonical representatives and exactness data."""

    def __init__(self, alg, k):
        self.alg = alg
        self.degree = k
        basis = alg.basis(k)
        self._basis = basis
        self._index = {m: i for i, m in enumerate(basis)}
        dim = len(basis)
        below = alg.basis(k - 1)
        im_rows = []
        if below and dim:
            im_rows, _, _ = _rref_int(alg.dmat(k - 1).col_dicts(), dim)
        self._im_rank = len(im_rows)
        # canonical coboundary basis, then kernel vectors that enlarge it
        grow = IncrementalSpan()
        for r in im_rows:
            grow.add(r)
        rep_vecs = []
        if dim:
            for v in RrefSolver(alg.dmat(k)).kernel_basis():
                if grow.add(v):
                    rep_vecs.append(v)
        self._rep_vecs = rep_vecs
        self.dim = len(rep_vecs)
        self.reps = tuple(
            Element(alg, {basis[i]: c for i, c in v.items()}) for v in rep_vecs)
        cols = im_rows + [dict(v) for v in rep_vecs]
        self._coord_solver = RrefSolver(RatMatrix.from_columns(dim, cols))

    def vector_of(self, elem):
        """Sparse coefficient vector of an element in this degree's basis."""
        vec = {}
        for kk, c in elem.coeffs.items():
            i = self._index.get(kk)
            if i is None:
                raise GcaError(
                    f"element key {self.alg.key_str(kk)} is not in degree "
                    f"{self.degree}")
            vec[i] = c
        return vec

    def is_closed(self, elem):
        return elem.d().is_zero()

    def coordinates(self, elem):
        """Class coordinates of a closed element over the slice basis."""
        if not self.is_closed(elem):
            raise GcaError(f"element {elem!r} is not closed")
        vec = self.vector_of(elem)
        if any(isinstance(c, QPoly) for c in vec.values()):
            return self._coordinates_param(vec)
        sol = self._coord_solver.solve(vec)
        if sol is None:
            raise GcaError("closed element outside cocycle span (degree bug)")
        off = self._im_rank
        return tuple(sol.get(off + i, Q(0)) for i in range(self.dim))

    def _coordinates_param(self, vec):
        # split the vector by parameter monomial and project each piece
        pieces = {}
        for i, c in vec.items():
            if isinstance(c, QPoly):
                for t, r in c.terms.items():
                    pieces.setdefault(t, {})[i] = r
            else:
                pieces.setdefault((), {})
                s = pieces[()].get(i, 0) + c
                if s:
                    pieces[()][i] = s
        coords = [QPoly() for _ in range(self.dim)]
        off = self._im_rank
        for t, piece in sorted(pieces.items()):
            sol = self._coord_solver.solve(piece)
            if sol is None:
                raise GcaError("closed element outside cocycle span")
            mono = QPoly({t: Q(1)})
            for i in range(self.dim):
                c = sol.get(off + i)
                if c:
                    coords[i] = coords[i] + c * mono
        return tuple(coords)

    def class_of(self, elem):
        return CohomologyClass(self, self.coordinates(elem), elem)

    def class_from_coords(self, coords):
        rep = self.alg.zero()
        for c, r in zip(coords, self.reps):
            if not coeff_is_zero(as_coeff(c)):
                rep = rep + c * r
        return CohomologyClass(self, coords, rep)

    def __repr__(self):
        return f"H^{self.degree}({self.alg.name or 'A'}; dim {self.dim})"


def cohomology(alg, k) -> CohomologySlice:
    """H^k of the algebra, canonical representatives, cached."""
    hi = getattr(alg, "hi", alg.bound)
    if k + 1 > hi:
        raise GcaError(f"cohomology at degree {k} needs degree {k + 1} "
                       f"above bound {hi}")
    return _cached(alg, ("slice", k), lambda: CohomologySlice(alg, k))


def betti(alg, k) -> int:
    return cohomology(alg, k).dim


def betti_numbers(alg, lo, hi):
    return tuple(betti(alg, k) for k in range(lo, hi + 1))


def class_of(alg, elem) -> CohomologyClass:
    elem = alg.element(elem) if not isinstance(elem, Element) else elem
    deg = elem.degree()
    if deg is None:
        raise GcaError("the zero element has a class in every degree; "
                       "use cohomology(alg, k).class_of(alg.zero())")
    return cohomology(alg, deg).class_of(elem)


def primitive(alg, e):
    """An exact preimage u with du = e, or None; canonical choice."""
    if e.is_zero():
        return alg.zero()
    k = e.degree()
    solver = _dsolver(alg, k - 1)
    basis_above = alg.basis(k)
    index_above = {m: i for i, m in enumerate(basis_above)}
    vec = {}
    params = False
    for kk, c in e.coeffs.items():
        vec[index_above[kk]] = c
        params = params or isinstance(c, QPoly)
    below = alg.basis(k - 1)
    if params:
        pieces = {}
        for i, c in vec.items():
            if isinstance(c, QPoly):
                for t, r in c.terms.items():
                    pieces.setdefault(t, {})[i] = r
            else:
                pieces.setdefault((), {})[i] = c
        out = {}
        for t, piece in sorted(pieces.items()):
            sol = solver.solve(piece)
            if sol is None:
                return None
            mono = QPoly({t: Q(1)})
            for j, c in sol.items():
                key = below[j]
                out[key] = out.get(key, QPoly()) + c * mono
        return Element(alg, out)
    sol = solver.solve(vec)
    if sol is None:
        return None
    return Element(alg, {below[j]: c for j, c in sol.items()})


def is_exact(alg, e) -> bool:
    return primitive(alg, e) is not None


# ----- algebra maps ----------------------------------------------------


class CdgaMap:
    """Multiplicative chain map determined by generator images (free source)."""

    def __init__(self, source, target, images, check=True, name=""):
        self.source = source
        self.target = target
        self.name = name
        self.images = {}
        for gname in source.gen_names:
            val = images.get(gname)
            if val is None:
                if gname in target.gen_names:
                    val = target.gen(gname)  # inclusion-style default
                else:
                    raise GcaError(f"no image for generator {gname!r}")
            self.images[gname] = target.element(val)
        self._key_cache = {(): target.one()}
        if check:
            rep = self.check()
            if not rep.ok:
                raise GcaError("not a cdga map: " + "; ".join(rep.issues))

    def check(self) -> ValidationReport:
        issues = []
        for gname in self.source.gen_names:
            img = self.images[gname]
            gdeg = self.source.gen_degree(gname)
            if not img.is_zero() and img.degree() != gdeg:
                issues.append(f"image of {gname} is not degree {gdeg}")
                continue
            if gdeg + 1 <= self.target.bound:
                lhs = self.apply(self.source.diff_of_gen(gname))
                rhs = img.d()
                if not (lhs - rhs).is_zero():
                    issues.append(
                        f"d does not commute on {gname}: f(dg)={lhs!r}, "
                        f"d(fg)={rhs!r}")
        return ValidationReport(issues)

    def apply_key(self, mono):
        hit = self._key_cache.get(mono)
        if hit is None:
            # peel one letter to reuse cached subwords
            i = next(j for j, e in enumerate(mono) if e)
            rest = list(mono)
            rest[i] -= 1
            rest_t = tuple(rest) if any(rest) else ()
            while rest_t and rest_t[-1] == 0:
                rest_t = rest_t[:-1]
            hit = self.images[self.source.gen_names[i]] * self.apply_key(rest_t)
            self._key_cache[mono] = hit
        return hit

    def apply(self, elem) -> Element:
        if isinstance(elem, str):
            elem = self.source.element(elem)
        out = self.target.zero()
        for mono, c in elem.coeffs.items():
            out = out + c * self.apply_key(mono)
        return out

    def __repr__(self):
        return (f"CdgaMap({self.name or 'f'}: "
                f"{self.source.name or 'A'} -> {self.target.name or 'B'})")


class LinearMap:
    """Degree-preserving linear map given on basis keys of the source.

    Used for maps out of non-free algebras (dualizations); multiplicativity
    is a property to be verified, not a construction guarantee.
    """

    def __init__(self, source, target, key_images, name=""):
        self.source = source
        self.target = target
        self.name = name
        self.key_images = dict(key_images)

    def apply_key(self, key):
        img = self.key_images.get(key)
        if img is None:
            raise GcaError(f"no image recorded for {self.source.key_str(key)}")
        return img

    def apply(self, elem) -> Element:
        out = self.target.zero()
        for key, c in elem.coeffs.items():
            out = out + c * self.apply_key(key)
        return out

    def check_chain(self, degrees) -> ValidationReport:
        issues = []
        for k in degrees:
            for key in self.source.basis(k):
                lhs = self.apply_key(key).d()
                rhs = self.apply(
                    Element(self.source, dict(self.source.diff_key(key))))
                if not (lhs - rhs).is_zero():
                    issues.append(
                        f"chain property fails on {self.source.key_str(key)}")
        return ValidationReport(issues)

    def check_multiplicative(self, lo, hi) -> ValidationReport:
        """f(u v) = f(u) f(v) on all basis pairs with degrees in the window."""
        issues = []
        for k1 in range(lo, hi + 1):
            for k2 in range(k1, hi + 1 - k1):
                for key1 in self.source.basis(k1):
                    e1 = Element(self.source, {key1: Q(1)})
                    f1 = self.apply_key(key1)
                    for key2 in self.source.basis(k2):
                        e2 = Element(self.source, {key2: Q(1)})
                        lhs = self.apply(e1 * e2)
                        rhs = f1 * self.apply_key(key2)
                        if not (lhs - rhs).is_zero():
                            issues.append(
                                "multiplicativity fails on "
                                f"({self.source.key_str(key1)}, "
                                f"{self.source.key_str(key2)})")
                            if len(issues) > 8:
                                return ValidationReport(issues)
        return ValidationReport(issues)

    def __repr__(self):
        return (f"LinearMap({self.name or 'g'}: "
                f"{self.source.name or 'A'} -> {self.target.name or 'B'})")


def h_matrix(f, k) -> RatMatrix:
    """Matrix of H^k(f) from source slice basis to target slice basis."""
    src = cohomology(f.source, k)
    tgt = cohomology(f.target, k)
    cols = []
    for rep in src.reps:
        coords = tgt.coordinates(f.apply(rep))
        cols.append({i: c for i, c in enumerate(coords) if c})
    return RatMatrix.from_columns(tgt.dim, cols)


def h_class_image(f, cls) -> CohomologyClass:
    tgt = cohomology(f.target, cls.degree)
    return tgt.class_of(f.apply(cls.representative))


# ----- duality pairing -------------------------------------------------


def fundamental_class(alg, n) -> CohomologyClass:
    """Canonical generator of H^n: the class of the dual of 1 on a
    dualization, else the first canonical representative."""
    top = cohomology(alg, n)
    if top.dim == 0:
        raise GcaError(f"H^{n} vanishes; no fundamental class")
    if alg.is_dualization:
        return top.class_of(Element(alg, {("D", ()): Q(1)}))
    return top.class_from_coords(
        tuple(Q(1) if i == 0 else Q(0) for i in range(top.dim)))


def integrate(alg, n, x) -> Fraction:
    """Coefficient of a top-degree class along the fundamental class."""
    top = cohomology(alg, n)
    if top.dim != 1:
        raise GcaError(f"H^{n} is {top.dim}-dimensional, not 1")
    mu = fundamental_class(alg, n)
    if isinstance(x, CohomologyClass):
        coords = x.coords
    else:
        coords = top.coordinates(x)
    return coords[0] / mu.coords[0]


def pairing_matrix(alg, n, k) -> RatMatrix:
    """Gram matrix of H^k x H^{n-k} -> H^n against the fundamental class."""
    hk = cohomology(alg, k)
    hnk = cohomology(alg, n - k)
    entries = {}
    for i, u in enumerate(hk.reps):
        for j, v in enumerate(hnk.reps):
            c = integrate(alg, n, u * v)
            if c:
                entries[(i, j)] = c
    return RatMatrix(hk.dim, hnk.dim, entries)


def check_poincare_duality(alg, n, through=None) -> ValidationReport:
    """Nondegenerate pairing in every complementary pair of degrees up to n,
    plus vanishing above n (checked through the given degree)."""
    issues = []
    top = cohomology(alg, n)
    if top.dim != 1:
        issues.append(f"H^{n} has dimension {top.dim}, expected 1")
        return ValidationReport(issues)
    lo = getattr(alg, "lo", 0)
    for k in range(min(0, lo), n // 2 + 1):
        hk = cohomology(alg, k)
        hnk = cohomology(alg, n - k)
        if hk.dim != hnk.dim:
            issues.append(f"dim H^{k} = {hk.dim} != dim H^{n - k} = {hnk.dim}")
            continue
        if hk.dim == 0:
            continue
        g = pairing_matrix(alg, n, k)
        if RrefSolver(g).rank != hk.dim:
            issues.append(f"degenerate pairing H^{k} x H^{n - k}")
    hi = getattr(alg, "hi", alg.bound)
    through = (hi - 1) if through is None else through
    for k in range(n + 1, through + 1):
        if cohomology(alg, k).dim:
            issues.append(f"H^{k} is nonzero above the duality dimension")
    return ValidationReport(issues)


def map_degree(f, n, check_pd=False) -> Fraction:
    """Scalar comparing fundamental classes through H^n(f)."""
    if check_pd:
        for alg in (f.source, f.target):
            rep = check_poincare_duality(alg, n)
            if not rep.ok:
                raise GcaError(f"{alg.name or alg!r} fails duality: "
                               + "; ".join(rep.issues))
    mu_s = fundamental_class(f.source, n)
    mu_t = fundamental_class(f.target, n)
    img = cohomology(f.target, n).coordinates(f.apply(mu_s.representative))
    return img[0] / mu_t.coords[0]


def pushforward(f, y: CohomologyClass, n, normalized=False) -> CohomologyClass:
    """The class p on the source with <p, x> = <y, f(x)> for all x.

    Pairings are cup products integrated against the fundamental classes;
    requires nonzero mapping degree for the normalized variant.
    """
    deg = map_degree(f, n)
    if deg == 0:
        raise GcaError("pushforward needs a map of nonzero degree")
    k = y.degree
    hk_src = cohomology(f.source, k)
    hc_src = cohomology(f.source, n - k)
    if hk_src.dim != hc_src.dim:
        raise GcaError("source fails duality in the needed degrees")
    rhs = {}
    for i, x in enumerate(hc_src.reps):
        val = integrate(f.target, n, y.representative * f.apply(x))
        if val:
            rhs[i] = val
    entries = {}
    for j, p in enumerate(hk_src.reps):
        for i, x in enumerate(hc_src.reps):
            c = integrate(f.source, n, p * x)
            if c:
                entries[(i, j)] = c
    sol = RrefSolver(RatMatrix(hc_src.dim, hk_src.dim, entries)).solve(rhs)
    if sol is None:
        raise GcaError("degenerate source pairing in pushforward")
    coords = [sol.get(j, Q(0)) for j in range(hk_src.dim)]
    if normalized:
        coords = [c / deg for c in coords]
    return hk_src.class_from_coords(tuple(coords))
