"""Pure-numpy implementations of the hot per-element kernels.

Array layout for both kernels is (batch, node, channel): the batch axis runs
over elements (times any transverse node index in 2-D) and the channel axis
flattens everything the contraction does not touch.
"""

import numpy as np


def batched_diff(dmat, values, scale):
    """scale[b] * (dmat @ values[b]) for every batch entry b.

    values: (B, Q, K), dmat: (P, Q), scale: (B,) -> (B, P, K)
    """
    out = np.einsum("pq,bqk->bpk", dmat, values)
    out *= scale[:, None, None]
    return out


def fr_residual(dflux, jump_left, jump_right, gl_prime, gr_prime, inv_dx):
    """Add the interface correction terms to a local flux derivative.

    dflux: (B, P, K) local derivative in physical coordinates,
    jump_left/right: (B, K) numerical-flux minus boundary trace of the
    discontinuous flux, inv_dx: (B,) -> residual (B, P, K).
    """
    corr = jump_right[:, None, :] * gr_prime[None, :, None]
    corr += jump_left[:, None, :] * gl_prime[None, :, None]
    corr *= inv_dx[:, None, None]
    return dflux + corr
