"""
Spectral primitives on symmetric matrices.

Every matrix function is computed from one symmetric eigendecomposition and the result is re-symmetrised, so that
downstream positivity checks see exactly symmetric matrices.
"""
from dataclasses import dataclass
from typing import List, Tuple

import numpy as np
import scipy.linalg

from pygconvex.core.exceptions import ConditioningError, InputError

# Relative eigenvalue floor: lambda_min must exceed DEFAULT_EIG_FLOOR * lambda_max.
DEFAULT_EIG_FLOOR = 1e-12


def sym(a):
    """ (A + A^T) / 2 as float array. """
    a = np.asarray(a, dtype=float)
    return (a + a.T) / 2.0


class SymMatrix:
    """
    Immutable real symmetric matrix. The entries are symmetrised on construction.
    """
    __slots__ = ("_entries",)

    def __init__(self, entries):
        a = np.array(entries, dtype=float)
        if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] == 0:
            raise InputError("Expected a non empty square matrix, got shape " + str(a.shape))
        if not np.all(np.isfinite(a)):
            raise InputError("Matrix has non finite entries")
        a = sym(a)
        a.setflags(write=False)
        self._entries = a

    @classmethod
    def _wrap(cls, a):
        # a has to be a fresh symmetric array. Skips all checks.
        obj = cls.__new__(cls)
        a.setflags(write=False)
        obj._entries = a
        return obj

    @property
    def n(self):
        return self._entries.shape[0]

    @property
    def entries(self):
        return self._entries

    def __array__(self, dtype=None, copy=None):
        if dtype is None:
            return self._entries
        return self._entries.astype(dtype)

    def __repr__(self):
        return "%s(%s)" % (self.__class__.__name__, np.array2string(self._entries, separator=", "))


class SpdMatrix(SymMatrix):
    """
    Immutable symmetric positive definite matrix. Construction fails with a ConditioningError if the smallest
    eigenvalue is not above floor * largest eigenvalue.
    """
    __slots__ = ()

    def __init__(self, entries, floor=DEFAULT_EIG_FLOOR):
        super().__init__(entries)
        _check_floor(scipy.linalg.eigvalsh(self._entries), floor)


@dataclass(frozen=True)
class SymBasisElement:
    i: int
    j: int
    matrix: SymMatrix


def _as_sym_array(s):
    a = np.asarray(s, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise InputError("Expected a square matrix, got shape " + str(a.shape))
    if not np.all(np.isfinite(a)):
        raise InputError("Matrix has non finite entries")
    return sym(a)


def _check_floor(lam, floor):
    top = np.max(lam)
    if not top > 0 or np.min(lam) <= floor * top:
        raise ConditioningError("Matrix is not positive definite within floor %g: eigenvalues in [%g, %g]"
                                % (floor, np.min(lam), top))


def _eigh(a):
    lam, v = scipy.linalg.eigh(a)
    return lam, v


def _spd_eigh(p, floor):
    lam, v = _eigh(_as_sym_array(p))
    _check_floor(lam, floor)
    return lam, v


def compose_eig(v, values):
    """ V diag(values) V^T, symmetrised. """
    return sym((v * values) @ v.T)


def sym_eig(s) -> Tuple[np.ndarray, np.ndarray]:
    """
    Eigendecomposition of a symmetric matrix.
    :param s: SymMatrix or array like
    :return: eigenvalues in descending order and orthonormal eigenvectors as columns. Every eigenvector has its
    largest magnitude component positive.
    """
    lam, v = _eigh(_as_sym_array(s))
    lam, v = lam[::-1], v[:, ::-1]
    idx = np.argmax(np.abs(v), axis=0)
    signs = np.sign(v[idx, np.arange(v.shape[1])])
    signs[signs == 0] = 1.0
    return lam.copy(), v * signs


def spd_power(p, t: float, floor=DEFAULT_EIG_FLOOR) -> SpdMatrix:
    """
    P^t via the eigendecomposition of P.
    """
    lam, v = _spd_eigh(p, floor)
    return SpdMatrix._wrap(compose_eig(v, lam ** t))


def spd_sqrt_pair(p, floor=DEFAULT_EIG_FLOOR) -> Tuple[np.ndarray, np.ndarray]:
    """
    P^{1/2} and P^{-1/2} from a single eigendecomposition, as plain arrays.
    """
    lam, v = _spd_eigh(p, floor)
    root = np.sqrt(lam)
    return compose_eig(v, root), compose_eig(v, 1.0 / root)


def spd_log(p, floor=DEFAULT_EIG_FLOOR) -> SymMatrix:
    lam, v = _spd_eigh(p, floor)
    return SymMatrix._wrap(compose_eig(v, np.log(lam)))


def spd_logdet(p, floor=DEFAULT_EIG_FLOOR) -> float:
    lam, _ = _spd_eigh(p, floor)
    return float(np.sum(np.log(lam)))


def sym_exp(s) -> SpdMatrix:
    lam, v = _eigh(_as_sym_array(s))
    values = np.exp(lam)
    if not np.all(np.isfinite(values)) or not np.all(values > 0):
        raise ConditioningError("Matrix exponential over- or underflows: eigenvalues in [%g, %g]"
                                % (np.min(lam), np.max(lam)))
    return SpdMatrix._wrap(compose_eig(v, values))


def frame_index(n: int) -> List[Tuple[int, int]]:
    """ The ordering sigma of the pairs (i, j), i <= j, row-major. """
    return [(i, j) for i in range(n) for j in range(i, n)]


def sym_basis(n: int) -> List[SymBasisElement]:
    """
    Basis E_ij (i <= j) of the symmetric n x n matrices in frame order.
    """
    if n < 1:
        raise InputError("Matrix order has to be positive, got " + str(n))
    basis = []
    for i, j in frame_index(n):
        e = np.zeros((n, n))
        e[i, j] = 1.0
        e[j, i] = 1.0
        basis.append(SymBasisElement(i, j, SymMatrix._wrap(e)))
    return basis


def frame_dim(n: int) -> int:
    return n * (n + 1) // 2


def order_of_frame_dim(d: int) -> int:
    n = int(round((np.sqrt(8 * d + 1) - 1) / 2))
    if frame_dim(n) != d:
        raise InputError("%d is not the dimension of a space of symmetric matrices" % d)
    return n


def sym_to_frame(s) -> np.ndarray:
    """
    Frame coordinates of S in the basis E_ij, i.e. the upper triangle (diagonal included) row by row.
    """
    a = _as_sym_array(s)
    return a[np.triu_indices(a.shape[0])].copy()


def sym_from_frame(x, n: int = None) -> np.ndarray:
    """
    Inverse of sym_to_frame. n is derived from the length of x if not given.
    """
    x = np.asarray(x, dtype=float)
    if n is None:
        n = order_of_frame_dim(x.shape[0])
    if x.shape != (frame_dim(n),):
        raise InputError("Expected %d frame coordinates, got shape %s" % (frame_dim(n), x.shape))
    a = np.zeros((n, n))
    a[np.triu_indices(n)] = x
    return a + np.triu(a, 1).T
