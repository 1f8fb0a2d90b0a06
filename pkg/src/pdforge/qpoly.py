"""Polynomials over Q in named parameters.

Just enough commutative ring arithmetic for parametric defining systems:
exact rational coefficients, named variables, substitution.  A term is a
sorted tuple ((name, exp), ...) mapping to a nonzero Fraction; the empty
term is the constant monomial.  QPoly mixes freely with Fraction/int in
element coefficients.
"""

from __future__ import annotations

from fractions import Fraction

Q = Fraction


def _mul_terms(t1, t2):
    d = dict(t1)
    for name, e in t2:
        d[name] = d.get(name, 0) + e
    return tuple(sorted((n, e) for n, e in d.items() if e))


class QPoly:
    __slots__ = ("terms",)

    def __init__(self, terms=None):
        self.terms = dict(terms) if terms else {}

    @classmethod
    def const(cls, c):
        c = Q(c)
        return cls({(): c} if c else None)

    @classmethod
    def var(cls, name):
        return cls({((name, 1),): Q(1)})

    def is_zero(self):
        return not self.terms

    def is_constant(self):
        return all(t == () for t in self.terms)

    def constant_value(self):
        if not self.is_constant():
            raise ValueError(f"not a constant: {self}")
        return self.terms.get((), Q(0))

    def degree(self):
        if not self.terms:
            return 0
        return max(sum(e for _, e in t) for t in self.terms)

    def variables(self):
        out = set()
        for t in self.terms:
            out.update(n for n, _ in t)
        return out

    def coefficient(self, term):
        return self.terms.get(tuple(sorted(term)), Q(0))

    def _coerce(self, other):
        if isinstance(other, QPoly):
            return other
        if isinstance(other, (int, Fraction)):
            return QPoly.const(other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        terms = dict(self.terms)
        for t, c in other.terms.items():
            s = terms.get(t, 0) + c
            if s:
                terms[t] = s
            elif t in terms:
                del terms[t]
        return QPoly(terms)

    __radd__ = __add__

    def __neg__(self):
        return QPoly({t: -c for t, c in self.terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        terms = {}
        for t1, c1 in self.terms.items():
            for t2, c2 in other.terms.items():
                t = _mul_terms(t1, t2)
                s = terms.get(t, 0) + c1 * c2
                if s:
                    terms[t] = s
                elif t in terms:
                    del terms[t]
        return QPoly(terms)

    __rmul__ = __mul__

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.is_constant() and self.constant_value() == other
        if isinstance(other, QPoly):
            return self.terms == other.terms
        return NotImplemented

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __bool__(self):
        return bool(self.terms)

    def substitute(self, assignment):
        """Substitute parameters; values may be Fraction-like or QPoly."""
        out = QPoly()
        for t, c in self.terms.items():
            piece = QPoly.const(c)
            for name, e in t:
                if name in assignment:
                    v = assignment[name]
                    v = v if isinstance(v, QPoly) else QPoly.const(v)
                    for _ in range(e):
                        piece = piece * v
                else:
                    piece = piece * QPoly({((name, e),): Q(1)})
            out = out + piece
        return out

    def linear_parts(self):
        """Split into (constant, {name: coeff}, higher-degree QPoly)."""
        const = Q(0)
        lin = {}
        rest = {}
        for t, c in self.terms.items():
            if t == ():
                const = c
            elif len(t) == 1 and t[0][1] == 1:
                lin[t[0][0]] = c
            else:
                rest[t] = c
        return const, lin, QPoly(rest)

    def __repr__(self):
        if not self.terms:
            return "0"
        bits = []
        for t in sorted(self.terms, key=lambda t: (sum(e for _, e in t), t)):
            c = self.terms[t]
            mon = "*".join(n if e == 1 else f"{n}^{e}" for n, e in t)
            if not mon:
                bits.append(str(c))
            elif c == 1:
                bits.append(mon)
            elif c == -1:
                bits.append(f"-{mon}")
            else:
                bits.append(f"{c}*{mon}")
        s = " + ".join(bits)
        return s.replace("+ -", "- ")


def as_coeff(x):
    """Normalize an element coefficient: ints become Fractions."""
    if isinstance(x, QPoly):
        return x
    return Q(x)


def coeff_is_zero(x):
    return x.is_zero() if isinstance(x, QPoly) else x == 0


def coeff_is_constant(x):
    return not isinstance(x, QPoly) or x.is_constant()


def coeff_constant_value(x):
    return x.constant_value() if isinstance(x, QPoly) else Q(x)
