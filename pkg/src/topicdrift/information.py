"""Information-theoretic measures over finite distributions.

All quantities are reported in bits (base-2 logarithms); the rest of the
package works in nats.  The 0 * log 0 = 0 convention applies throughout.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import ParameterError

_JOINT_TOL = 1e-9


@dataclass(frozen=True)
class DiscreteDist:
    """A probability vector over a finite support."""

    p: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.p, dtype=float)
        if p.ndim != 1 or p.size == 0:
            raise ParameterError("p must be a nonempty 1-d vector")
        if np.any(p < 0.0):
            raise ParameterError("probabilities must be nonnegative")
        if abs(p.sum() - 1.0) > 1e-12:
            raise ParameterError(f"probabilities must sum to 1, got {p.sum()!r}")
        object.__setattr__(self, "p", p)

    @property
    def support_size(self):
        return self.p.size


def _xlog2x(p):
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(p > 0.0, p * np.log2(np.where(p > 0.0, p, 1.0)), 0.0)
    return out


def _as_dist(p):
    return p if isinstance(p, DiscreteDist) else DiscreteDist(np.asarray(p, dtype=float))


def _check_joint(joint):
    joint = np.asarray(joint, dtype=float)
    if joint.ndim != 2 or joint.size == 0:
        raise ParameterError("joint must be a 2-d matrix")
    if np.any(joint < 0.0):
        raise ParameterError("joint entries must be nonnegative")
    if abs(joint.sum() - 1.0) > _JOINT_TOL:
        raise ParameterError(f"joint must sum to 1, got {joint.sum()!r}")
    return joint


def entropy(p):
    """Shannon entropy H(X) in bits."""
    p = _as_dist(p)
    return float(-_xlog2x(p.p).sum())


def joint_conditional_entropy(joint):
    """Joint entropy H(X, Y) and conditional entropy H(Y | X), in bits.

    Rows of ``joint`` index X, columns index Y.  The chain rule
    H(X, Y) = H(X) + H(Y | X) holds by construction.
    """
    joint = _check_joint(joint)
    h_joint = float(-_xlog2x(joint).sum())
    px = joint.sum(axis=1)
    h_x = float(-_xlog2x(px).sum())
    return h_joint, h_joint - h_x


def kl_divergence(p, q):
    """Information divergence D(p || q) in bits.

    Returns ``inf`` when p puts mass where q does not (absolute-continuity
    violation); that is a well-defined value, not an error.
    """
    p = _as_dist(p)
    q = _as_dist(q)
    if p.support_size != q.support_size:
        raise ParameterError("p and q must share a support size")
    mask = p.p > 0.0
    if np.any(q.p[mask] <= 0.0):
        return math.inf
    return float(np.sum(p.p[mask] * np.log2(p.p[mask] / q.p[mask])))


def mutual_information(joint):
    """Mutual information I(X; Y) in bits, from a joint probability matrix."""
    joint = _check_joint(joint)
    px = joint.sum(axis=1)
    py = joint.sum(axis=0)
    indep = np.outer(px, py)
    mask = joint > 0.0
    return float(np.sum(joint[mask] * np.log2(joint[mask] / indep[mask])))
