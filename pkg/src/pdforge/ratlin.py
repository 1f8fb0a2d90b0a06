"""Exact linear algebra over the rationals.

Everything is a ``fractions.Fraction``; there is no floating point anywhere
in this package.  Matrices are sparse maps (row, col) -> Fraction.  The
eliminator works fraction-free on gcd-stripped integer rows and is free to
pick sparse pivots internally, because the reduced row echelon form it
returns is the canonical one (unique for a given matrix); every
representative choice downstream therefore stays reproducible.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd

Q = Fraction

DENSE_COLS = 64  # narrow matrices skip the sparsity bookkeeping


class RatMatrix:
    """Sparse rational matrix; zero entries are never stored."""

    __slots__ = ("rows", "cols", "entries")

    def __init__(self, rows, cols, entries=None):
        self.rows = rows
        self.cols = cols
        self.entries = {}
        if entries:
            items = entries.items() if isinstance(entries, dict) else entries
            for (i, j), v in items:
                v = Q(v)
                if v:
                    if not (0 <= i < rows and 0 <= j < cols):
                        raise ValueError(f"entry ({i},{j}) outside {rows}x{cols}")
                    self.entries[(i, j)] = v

    @classmethod
    def from_columns(cls, nrows, columns):
        """Build from an iterable of sparse columns (dicts row -> value)."""
        columns = list(columns)
        m = cls(nrows, len(columns))
        for j, col in enumerate(columns):
            for i, v in col.items():
                if v:
                    m.entries[(i, j)] = Q(v)
        return m

    @classmethod
    def from_rows(cls, ncols, rows):
        rows = list(rows)
        m = cls(len(rows), ncols)
        for i, row in enumerate(rows):
            for j, v in row.items():
                if v:
                    m.entries[(i, j)] = Q(v)
        return m

    @classmethod
    def identity(cls, n):
        return cls(n, n, {(i, i): Q(1) for i in range(n)})

    def row_dicts(self):
        rows = [dict() for _ in range(self.rows)]
        for (i, j), v in self.entries.items():
            rows[i][j] = v
        return rows

    def col_dicts(self):
        cols = [dict() for _ in range(self.cols)]
        for (i, j), v in self.entries.items():
            cols[j][i] = v
        return cols

    def mul_vec(self, vec):
        """Matrix times sparse vector (dict col -> value) -> dict row -> value."""
        out = {}
        for (i, j), v in self.entries.items():
            c = vec.get(j)
            if c:
                s = out.get(i, 0) + v * c
                if s:
                    out[i] = s
                elif i in out:
                    del out[i]
        return out

    def __eq__(self, other):
        return (isinstance(other, RatMatrix) and self.rows == other.rows
                and self.cols == other.cols and self.entries == other.entries)

    def __repr__(self):
        return f"RatMatrix({self.rows}x{self.cols}, {len(self.entries)} entries)"


class SolveResult:
    """Outcome of solve(): particular is None iff b is outside the column space."""

    __slots__ = ("particular", "kernel_basis")

    def __init__(self, particular, kernel_basis):
        self.particular = particular
        self.kernel_basis = kernel_basis


def _int_row(row):
    """Scale a Fraction/int dict to a gcd-stripped integer dict."""
    if not row:
        return {}
    lcm = 1
    for v in row.values():
        if isinstance(v, Fraction):
            d = v.denominator
            lcm = lcm // gcd(lcm, d) * d
    out = {}
    g = 0
    for j, v in row.items():
        n = int(v * lcm) if lcm != 1 or isinstance(v, Fraction) else int(v)
        if n:
            out[j] = n
            g = gcd(g, n)
    if g > 1:
        for j in out:
            out[j] //= g
    return out


def _strip(row):
    g = 0
    for v in row.values():
        g = gcd(g, v)
        if g == 1:
            return row
    if g > 1:
        for j in row:
            row[j] //= g
    return row


def _cross_eliminate(target, pivot, col):
    """target <- target*p - pivot*t on integers, clearing target[col]."""
    t = target[col]
    p = pivot[col]
    g = gcd(t, p)
    t //= g
    p //= g
    for j, v in target.items():
        target[j] = v * p
    for j, v in pivot.items():
        s = target.get(j, 0) - v * t
        if s:
            target[j] = s
        elif j in target:
            del target[j]
    return _strip(target)


def _joint_eliminate(row, trow, prow, ptrow, col):
    """(row|trow) <- (row|trow)*p - (prow|ptrow)*t on integers, then strip
    the joint gcd so the transform identity is preserved exactly."""
    t = row[col]
    p = prow[col]
    g = gcd(t, p)
    t //= g
    p //= g
    for j in list(row):
        row[j] *= p
    for j, v in prow.items():
        s = row.get(j, 0) - v * t
        if s:
            row[j] = s
        elif j in row:
            del row[j]
    for j in list(trow):
        trow[j] *= p
    for j, v in ptrow.items():
        s = trow.get(j, 0) - v * t
        if s:
            trow[j] = s
        elif j in trow:
            del trow[j]
    g2 = 0
    for v in row.values():
        g2 = gcd(g2, v)
        if g2 == 1:
            return
    for v in trow.values():
        g2 = gcd(g2, v)
        if g2 == 1:
            return
    if g2 > 1:
        for j in row:
            row[j] //= g2
        for j in trow:
            trow[j] //= g2


def _rref_int(frac_rows, cols, transform=False):
    """Canonical RREF of a list of sparse rows.

    Returns (rows, pivots, trans): rows are Fraction dicts with pivot entry 1,
    one per pivot in pivot-column order; trans (when requested) are Fraction
    dicts with trans[r] . input = rows[r].  Internal pivoting favors sparse
    rows; the output is the canonical RREF regardless.
    """
    work = []
    tr = []
    for i, row in enumerate(frac_rows):
        if not row:
            continue
        if transform:
            # scale to integers without gcd-stripping so the transform is {i: lcm}
            lcm = 1
            for v in row.values():
                if isinstance(v, Fraction):
                    d = v.denominator
                    lcm = lcm // gcd(lcm, d) * d
            irow = {j: int(v * lcm) for j, v in row.items() if v}
            if irow:
                work.append(irow)
                tr.append({i: lcm})
        else:
            irow = _int_row(row)
            if irow:
                work.append(irow)
                tr.append(None)
    by_lead = {}
    for idx, row in enumerate(work):
        by_lead.setdefault(min(row), []).append(idx)
    piv_order = []
    while by_lead:
        col = min(by_lead)
        cands = by_lead.pop(col)
        cands.sort(key=lambda idx: (len(work[idx]), idx))
        piv = cands[0]
        piv_order.append((col, piv))
        prow = work[piv]
        for idx in cands[1:]:
            row = work[idx]
            if transform:
                _joint_eliminate(row, tr[idx], prow, tr[piv], col)
            else:
                _cross_eliminate(row, prow, col)
            if row:
                by_lead.setdefault(min(row), []).append(idx)
    # back pass over pivot rows, in reverse pivot-column order
    piv_order.sort()
    for at in range(len(piv_order) - 1, -1, -1):
        col, piv = piv_order[at]
        prow = work[piv]
        for bt in range(at):
            _, other = piv_order[bt]
            orow = work[other]
            if col in orow:
                if transform:
                    _joint_eliminate(orow, tr[other], prow, tr[piv], col)
                else:
                    _cross_eliminate(orow, prow, col)
    out_rows = []
    out_trans = []
    for col, piv in piv_order:
        prow = work[piv]
        pv = prow[col]
        out_rows.append({j: Q(v, pv) for j, v in prow.items()})
        if transform:
            out_trans.append({j: Q(v, pv) for j, v in tr[piv].items()})
    pivots = tuple(col for col, _ in piv_order)
    return out_rows, pivots, (out_trans if transform else None)


def rref(m: RatMatrix):
    """Canonical reduced row echelon form.

    Returns (reduced, pivots, transform) with transform * m == reduced; the
    reduced matrix keeps m's shape, with zero rows (and zero transform rows)
    at the bottom.
    """
    rows, pivots, trans = _rref_int(m.row_dicts(), m.cols, transform=True)
    reduced = RatMatrix.from_rows(m.cols, rows)
    reduced.rows = m.rows
    tmat = RatMatrix.from_rows(m.rows, trans)
    tmat.rows = m.rows
    return reduced, pivots, tmat


class RrefSolver:
    """Reusable eliminator for repeated solves against one matrix."""

    def __init__(self, m: RatMatrix, transform=False):
        self.m = m
        self._rows = None
        self._trans = None
        self.pivots = ()
        self._kernel = None
        self._run(transform)

    def _run(self, transform):
        rows, pivots, trans = _rref_int(self.m.row_dicts(), self.m.cols,
                                        transform=transform)
        self._rows = rows
        self.pivots = pivots
        if transform:
            self._trans = trans

    @property
    def rank(self):
        return len(self.pivots)

    def kernel_basis(self):
        """Canonical null space basis, one vector per free column."""
        if self._kernel is None:
            piv_of = {c: r for r, c in enumerate(self.pivots)}
            pivset = set(self.pivots)
            basis = []
            for f in range(self.m.cols):
                if f in pivset:
                    continue
                v = {f: Q(1)}
                for c, r in piv_of.items():
                    x = self._rows[r].get(f)
                    if x:
                        v[c] = -x
                basis.append(v)
            self._kernel = basis
        return self._kernel

    def solve(self, b):
        """Particular solution of m*x = b (sparse dict), or None."""
        if self._trans is None:
            self._run(True)
        sol = {}
        for r, c in enumerate(self.pivots):
            trow = self._trans[r]
            s = Q(0)
            for k, x in trow.items():
                v = b.get(k)
                if v:
                    s += x * v
            if s:
                sol[c] = s
        # verify: m*sol must equal b exactly (rank-deficient rhs check)
        chk = self.m.mul_vec(sol)
        for k, v in b.items():
            if chk.pop(k, 0) != v:
                return None
        if any(chk.values()):
            return None
        return sol

    def in_image(self, b):
        return self.solve(b) is not None


def solve(m: RatMatrix, b):
    """Solve m*x = b exactly; b is a sparse dict or a sequence."""
    if not isinstance(b, dict):
        if len(b) != m.rows:
            raise ValueError(f"rhs length {len(b)} != {m.rows} rows")
        b = {i: Q(v) for i, v in enumerate(b) if v}
    else:
        if any(not (0 <= i < m.rows) for i in b):
            raise ValueError("rhs index outside matrix rows")
    s = RrefSolver(m)
    return SolveResult(s.solve(b), s.kernel_basis())


def coset_membership(v, subspace_basis, dim=None):
    """True iff sparse vector v lies in the span of subspace_basis."""
    if not any(v.values()):
        return True
    span = IncrementalSpan()
    for w in subspace_basis:
        span.add(w)
    return span.contains(v)


class IncrementalSpan:
    """Growing row space on gcd-stripped integer rows; forward-reduced only.

    add() reports whether the vector enlarged the span, which is exactly the
    membership/completion question slice construction needs.
    """

    def __init__(self):
        self.rows = {}  # leading column -> integer row

    def residue(self, row):
        row = _int_row(row)
        while row:
            lead = min(row)
            piv = self.rows.get(lead)
            if piv is None:
                return row
            _cross_eliminate(row, piv, lead)
        return row

    def add(self, row):
        r = self.residue(row)
        if not r:
            return False
        self.rows[min(r)] = r
        return True

    def contains(self, row):
        return not self.residue(row)

    @property
    def rank(self):
        return len(self.rows)


class SpanBuilder(IncrementalSpan):
    """Backwards-compatible alias; dim is accepted and ignored."""

    def __init__(self, dim=None):
        super().__init__()
        self.dim = dim

    def reduce(self, v):
        return self.residue(v)
