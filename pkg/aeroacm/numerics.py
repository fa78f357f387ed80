"""
Complex matrix utilities and seeded random streams

Matrices are plain 2-D numpy arrays of dtype complex128. Random streams are
counter-based (Philox) so that every Monte-Carlo trial owns an independent,
reproducible sequence whatever the order in which trials are executed.
"""

from dataclasses import dataclass
import logging

import numpy as np
from scipy.linalg import cho_factor, cho_solve, eigh, eigvalsh

from aeroacm.errors import DomainError, NotHermitian, NotPSD, Singular

logger = logging.getLogger(__name__)

HERMITIAN_TOL = 1e-10
PSD_TOL = 1e-10
PD_RTOL = 1e-14


def as_cmatrix(a):
    """ Return `a` as a finite 2-D complex array """
    m = np.asarray(a, dtype=complex)
    if m.ndim == 0:
        m = m.reshape(1, 1)
    elif m.ndim == 1:
        m = m.reshape(-1, 1)
    if m.ndim != 2:
        raise DomainError("expected a matrix, got {}-d array".format(m.ndim))
    if not np.all(np.isfinite(m)):
        raise DomainError("matrix has non-finite entries")
    return m


def is_hermitian(a, tol=HERMITIAN_TOL):
    a = np.asarray(a)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        return False
    return bool(np.max(np.abs(a - a.conj().T), initial=0.0) <= tol)


def hermitize(a):
    """ Hermitian part (a + a^H)/2 """
    return 0.5*(a + a.conj().T)


def kron(a, b):
    """ Kronecker product, entry (i*p+k, j*q+l) = a[i,j]*b[k,l] """
    return np.kron(as_cmatrix(a), as_cmatrix(b))


def hermitian_sqrt(a):
    """
    Hermitian PSD square root by eigendecomposition

    Eigenvalues in [-1e-10, 0) are clipped to zero, anything below raises
    NotPSD.
    """
    a = as_cmatrix(a)
    if not is_hermitian(a):
        raise NotHermitian("matrix asymmetry exceeds {:g}".format(
            HERMITIAN_TOL))
    w, u = eigh(hermitize(a))
    if w[0] < -PSD_TOL:
        raise NotPSD("eigenvalue {:.3e} below -{:g}".format(w[0], PSD_TOL))
    w = np.clip(w, 0.0, None)
    s = (u*np.sqrt(w)) @ u.conj().T
    return hermitize(s)


def solve_hpd(a, b):
    """ Solve a X = b for Hermitian positive definite a """
    a = as_cmatrix(a)
    b = np.asarray(b, dtype=complex)
    if a.shape[0] != a.shape[1] or a.shape[0] != b.shape[0]:
        raise DomainError("incompatible shapes {} and {}".format(
            a.shape, b.shape))
    a = hermitize(a)
    w = eigvalsh(a)
    if w[-1] <= 0.0 or w[0] <= PD_RTOL*w[-1]:
        raise Singular("min/max eigenvalue {:.3e}/{:.3e}".format(w[0], w[-1]))
    c = cho_factor(a, lower=True, check_finite=False)
    return cho_solve(c, b, check_finite=False)


@dataclass(frozen=True)
class RngStream:
    """
    Value-semantic handle on an independent random sequence

    (master_seed, stream_id, subkey) feed the spawn key of a numpy
    SeedSequence, which seeds a Philox bit generator.
    """

    master_seed: int
    stream_id: int = 0
    subkey: tuple = ()

    def child(self, i):
        return RngStream(self.master_seed, self.stream_id,
                         self.subkey + (int(i),))

    def generator(self):
        ss = np.random.SeedSequence(int(self.master_seed),
                                    spawn_key=(int(self.stream_id),)
                                    + tuple(self.subkey))
        return np.random.Generator(np.random.Philox(ss))


def complex_normal(rng, shape, var=1.0):
    """ CN(0, var) samples drawn from an existing Generator """
    scale = np.sqrt(0.5*var)
    return scale*(rng.standard_normal(shape) + 1j*rng.standard_normal(shape))


def gaussian_matrix(rows, cols, stream):
    """ rows x cols matrix of i.i.d. CN(0,1) entries """
    return complex_normal(stream.generator(), (rows, cols))
