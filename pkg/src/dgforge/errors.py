"""Exception taxonomy shared by every module.

All failures raised on purpose derive from :class:`DgforgeError`, so callers
(and the command line front end) can separate deliberate diagnostics from
genuine bugs.  Exit-code mapping lives in ``cli.py``.
"""

from __future__ import annotations


class DgforgeError(Exception):
    """Base class for every deliberate failure."""


class RingMismatch(DgforgeError):
    """Operands live over different coefficient rings."""


class UnsupportedRing(DgforgeError):
    """The requested operation is not available over this ring."""


class InadmissibleMap(DgforgeError):
    """No canonical ring homomorphism exists between the given rings."""


class ShapeMismatch(DgforgeError):
    """Matrix or degreewise shape data is inconsistent."""


class InvalidComplex(DgforgeError):
    """A complex fails d∘d = 0 or its shape contract."""


class InvalidChainMap(DgforgeError):
    """A chain map fails to commute with the differentials."""


class InvalidHomotopy(DgforgeError):
    """Stored homotopy data does not witness the stated relation."""


class InvalidAlgebra(DgforgeError):
    """Structure constants violate associativity, unitality or Leibniz."""


class InvalidModule(DgforgeError):
    """Action constants violate the module axioms."""


class CertificateMismatch(DgforgeError):
    """A certificate does not match the object it claims to certify."""


class InvalidCertificate(DgforgeError):
    """A certificate fails its own stored equalities."""


class DuplicateName(DgforgeError):
    """Two cells share a name."""


class InvalidPresentation(DgforgeError):
    """A cell presentation violates its ordering/normalization contract."""


class NotAMorphism(DgforgeError):
    """Generator images fail the defining equations of a morphism."""


class InvalidWitness(DgforgeError):
    """A retract witness fails verification."""


class NotSplit(DgforgeError):
    """The requested splitting does not exist."""


class NoSplitFound(DgforgeError):
    """The splitting search exhausted its candidates (should not happen
    for inputs satisfying the stated preconditions)."""


class InvalidSquare(DgforgeError):
    """A ladder square is not homotopy-commutative as witnessed."""


class NotAQuasiIso(DgforgeError):
    """The map claimed to be a quasi-isomorphism is not one."""


class StageJoinOverflow(DgforgeError):
    """A localization stage would exceed the configured prime cap."""


class InvalidObject(DgforgeError):
    """An object file (or in-memory payload) is malformed."""


class NoSolution(DgforgeError):
    """An exact linear system has no solution over the requested ring."""
