import math


def _is_numeric(obj):
    """Return True if ``obj`` is a real scalar usable as a scale factor."""
    return isinstance(obj, (int, float)) and not isinstance(obj, bool)


class Amplitude:
    """Complex probability amplitude stored as its real and imaginary parts.

    Instances are immutable: all arithmetic operators return new
    :class:`Amplitude` objects.  Conversion to and from ``complex`` is
    supported so amplitudes can cross into numpy code freely.
    """

    __slots__ = ("re", "im")

    def __init__(self, re=0.0, im=0.0):
        """Construct an amplitude.

        ``re`` may also be a ``complex`` number, in which case ``im`` is
        ignored.  Non-finite parts are rejected.
        """
        if isinstance(re, complex):
            re, im = re.real, re.imag
        re, im = float(re), float(im)
        if not (math.isfinite(re) and math.isfinite(im)):
            raise ValueError(f"amplitude must be finite, got ({re}, {im})")
        object.__setattr__(self, "re", re)
        object.__setattr__(self, "im", im)

    def __setattr__(self, name, value):
        raise AttributeError("Amplitude is immutable")

    def __add__(self, other):
        """Return the sum ``self + other``."""
        return Amplitude(self.re + other.re, self.im + other.im)

    def __sub__(self, other):
        """Return the difference ``self - other``."""
        return Amplitude(self.re - other.re, self.im - other.im)

    def __mul__(self, other):
        """Return the product with another amplitude or a real scalar."""
        if _is_numeric(other):
            return Amplitude(other * self.re, other * self.im)
        if isinstance(other, Amplitude):
            return Amplitude(
                self.re * other.re - self.im * other.im,
                self.re * other.im + self.im * other.re,
            )
        return NotImplemented

    def __rmul__(self, other):
        """Implement ``scalar * amplitude``."""
        return self.__mul__(other)

    def __neg__(self):
        return Amplitude(-self.re, -self.im)

    def __abs__(self):
        """Return the modulus ``|a|``."""
        return math.hypot(self.re, self.im)

    def __eq__(self, other):
        if isinstance(other, Amplitude):
            return self.re == other.re and self.im == other.im
        return NotImplemented

    def __hash__(self):
        return hash((self.re, self.im))

    def __complex__(self):
        return complex(self.re, self.im)

    def __repr__(self):
        return f"Amplitude({self.re}, {self.im})"

    def conjugate(self):
        """Return the complex conjugate."""
        return Amplitude(self.re, -self.im)

    def probability(self):
        """Return ``|a|^2``, the Born-rule weight of this amplitude."""
        return self.re * self.re + self.im * self.im

    def isclose(self, other, tol=1e-12):
        """Return True if ``other`` lies within ``tol`` of this amplitude."""
        return abs(self - Amplitude(complex(other))) <= tol
