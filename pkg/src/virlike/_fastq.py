"""Fast exact rationals for inner loops.

``gmpy2.mpq`` when available, ``fractions.Fraction`` otherwise.  Public
functions convert back to ``Fraction`` before returning anything.
"""

from fractions import Fraction

try:
    import gmpy2

    Q = gmpy2.mpq

    def fast(x):
        x = Fraction(x)
        return gmpy2.mpq(x.numerator, x.denominator)

    def slow(x):
        return Fraction(int(x.numerator), int(x.denominator))

except ImportError:  # pragma: no cover
    Q = Fraction

    def fast(x):
        return Fraction(x)

    def slow(x):
        return Fraction(x)
