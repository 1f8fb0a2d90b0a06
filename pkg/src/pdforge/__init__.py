"""pdforge: exact rational computation with graded-commutative differential
algebras, their duality completions, Massey products, and arity-bounded
homotopy-associative structure checks."""

__version__ = "0.1.0"
