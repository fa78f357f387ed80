"""
Matched-filter transmit precoding and the received data-symbol model

Data-side channels are N_r x N_t, precoders N_t x N_r. The precoder of a
link is its training-side channel estimate, so row n of H V is the
effective gain seen by DRA n.
"""

from dataclasses import dataclass
import logging

import numpy as np

from aeroacm.errors import DimensionMismatch, IndexOutOfRange
from aeroacm.numerics import as_cmatrix, complex_normal

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class Precoder:
    v: np.ndarray


@dataclass(frozen=True)
class TermPowers:
    """ powers of the five parts of the signal at one DRA """

    desired: float
    est_error: float
    inter_antenna: float
    interferer: float
    noise: float

    @property
    def interference_plus_noise(self):
        return self.est_error + self.inter_antenna + self.interferer + \
            self.noise

    @property
    def total(self):
        return self.desired + self.interference_plus_noise

    def sinr(self, cap=1e12):
        den = self.interference_plus_noise
        if den <= 0.0:
            return cap
        return min(self.desired/den, cap)


def mf_precoder(h_hat):
    """ MF precoder, the training-side estimate itself """
    return Precoder(as_cmatrix(h_hat))


def received_symbol(h_data, precoders, powers, symbols, noise_var, stream):
    """
    Y = sum_k sqrt(P_k) H_k V_k x_k + W, first entry is the desired link

    symbols may be N_r x 1 vectors or N_r x B batches.
    """
    if not len(h_data) == len(precoders) == len(powers) == len(symbols):
        raise DimensionMismatch("link lists of unequal length")
    n_r = np.asarray(h_data[0]).shape[0]
    nb = np.asarray(symbols[0]).reshape(n_r, -1).shape[1]
    y = complex_normal(stream.generator(), (n_r, nb), noise_var)
    for h, pre, p, x in zip(h_data, precoders, powers, symbols):
        h = np.asarray(h)
        v = pre.v if isinstance(pre, Precoder) else np.asarray(pre)
        if h.shape[0] != n_r or h.shape[1] != v.shape[0]:
            raise DimensionMismatch("channel {} vs precoder {}".format(
                h.shape, v.shape))
        x = np.asarray(x).reshape(v.shape[1], -1)
        y = y + np.sqrt(p)*(h @ v) @ x
    return y


def expected_gains(est):
    """ closed-form mean gains E{h_n^H v_n} = Tr{Theta_n} of the MF link """
    return np.array([np.real(np.trace(t)) for t in est.theta_blocks])


def measured_gains(h_data, precoders):
    """
    Sample mean of the matched gains h_n^H v_n over channel realizations

    h_data and precoders are equally long sequences of data-side channels
    and precoders of the same link.
    """
    if len(h_data) != len(precoders) or not len(h_data):
        raise DimensionMismatch("{} channels vs {} precoders".format(
            len(h_data), len(precoders)))
    g = [np.einsum('nt,tn->n', np.asarray(h),
                   pre.v if isinstance(pre, Precoder) else np.asarray(pre))
         for h, pre in zip(h_data, precoders)]
    return np.mean(g, axis=0)


def decompose_terms(h_data, precoder, power, mean_gain, antenna,
                    interferers=(), noise_var=0.0, stream=None, batch=0):
    """
    Split the signal at DRA `antenna` into desired-mean, estimation-error,
    inter-antenna, interferer and noise powers

    mean_gain holds the mean matched gain E{h_n^H v_n} of every DRA, from
    measured_gains() or expected_gains(). Without a stream the powers are
    expectations over unit-power symbols; with a stream they are means over
    `batch` symbol and noise draws for the fixed channels. interferers holds
    (h_data, precoder, power) triples.
    """
    h_data = np.asarray(h_data)
    v = precoder.v
    n_r = h_data.shape[0]
    if not 0 <= antenna < n_r:
        raise IndexOutOfRange("antenna {} of {}".format(antenna, n_r))
    if h_data.shape[1] != v.shape[0]:
        raise DimensionMismatch("channel {} vs precoder {}".format(
            h_data.shape, v.shape))
    mean_gain = np.asarray(mean_gain).reshape(-1)
    if mean_gain.size != v.shape[1]:
        raise DimensionMismatch("{} mean gains for {} streams".format(
            mean_gain.size, v.shape[1]))
    row = h_data[antenna] @ v
    tr = complex(mean_gain[antenna])
    others = np.arange(v.shape[1]) != antenna
    rows_i = [(np.asarray(h)[antenna] @ pre.v, p) for h, pre, p in interferers]

    if stream is None or batch <= 0:
        desired = power*abs(tr)**2
        est_error = power*abs(row[antenna] - tr)**2
        inter = power*float(np.sum(np.abs(row[others])**2))
        interf = float(sum(p*np.sum(np.abs(r)**2) for r, p in rows_i))
        return TermPowers(desired, est_error, inter, interf, float(noise_var))

    rng = stream.generator()
    x0 = complex_normal(rng, (v.shape[1], batch))
    xs = [complex_normal(rng, (r.shape[0], batch)) for r, _ in rows_i]
    w = complex_normal(rng, batch, noise_var)

    px = np.mean(np.abs(x0[antenna])**2)
    desired = power*abs(tr)**2*px
    est_error = power*abs(row[antenna] - tr)**2*px
    inter = power*np.mean(np.abs(row[others] @ x0[others])**2)
    y_i = np.zeros(batch, dtype=complex)
    for (r, p), x in zip(rows_i, xs):
        y_i += np.sqrt(p)*(r @ x)
    interf = np.mean(np.abs(y_i)**2)
    noise = np.mean(np.abs(w)**2)
    return TermPowers(float(desired), float(est_error), float(inter),
                      float(interf), float(noise))
