"""Exception hierarchy shared by all towercodes modules."""


class TowerCodesError(Exception):
    """Base class for all errors raised by this package."""


# -- algebra ---------------------------------------------------------------

class NotPrime(TowerCodesError):
    """The characteristic argument is not a prime number."""


class DegreeTooLarge(TowerCodesError):
    """Requested field exceeds the desk-scale cap q <= 2**16."""


class NonSquare(TowerCodesError):
    """Square root requested for a non-square field element."""


# -- tower / rrspace -------------------------------------------------------

class NonSquareQ(TowerCodesError):
    """Operation requires q to be a square l**2."""


class UnsupportedLevel(TowerCodesError):
    """Tower level outside the explicitly supported range."""


class UnsupportedLocus(TowerCodesError):
    """A zero or pole lies outside the catalogued loci of the tower."""


class ZeroFunction(TowerCodesError):
    """Valuation or divisor of the zero function requested."""


class ExpansionCapExceeded(TowerCodesError):
    """Local expansion failed to resolve a leading term within the hard cap."""


# -- galois ----------------------------------------------------------------

class NonRationalPoleField(TowerCodesError):
    """A pole of the given function does not split over the constant field."""


class UnsupportedField(TowerCodesError):
    """Closure computation requires l prime (see decisions ledger)."""


class ConstantFieldExtension(TowerCodesError):
    """A compositum step would extend the constant field beyond GF(q)."""


# -- agcodes ---------------------------------------------------------------

class SupportOverlap(TowerCodesError):
    """supp(D) and supp(G) are not disjoint."""


class EtaValuationMismatch(TowerCodesError):
    """The differential does not have valuation -1 at an evaluation place."""


class DualityCheckFailed(TowerCodesError):
    """Computed dual disagrees with the nullspace oracle (hard bug signal)."""


class SelfDualityCheckFailed(TowerCodesError):
    """Rescaled code failed the self-orthogonality / self-duality check."""


class RangeError(TowerCodesError):
    """Parameter outside its admissible range."""


class PlaceNotMapped(TowerCodesError):
    """An automorphism maps an evaluation place outside the place list."""


class InfeasibleTarget(TowerCodesError):
    """Requested (delta, eps) target has negative rate."""


# -- sxcodes ---------------------------------------------------------------

class EnumerationBudgetExceeded(TowerCodesError):
    """A per-divisor enumeration would exceed the configured budget."""


# -- bounds ----------------------------------------------------------------

class DomainError(TowerCodesError):
    """Argument outside the validity interval of a bound formula."""


class EllTooSmall(TowerCodesError):
    """Comparison bound requires l > 3."""
