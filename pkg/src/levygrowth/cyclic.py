"""Cyclic angle arithmetic on [-pi, pi) and arc-overlap geometry."""

import numpy as np

TWO_PI = 2.0 * np.pi


def wrap(phi):
    """Map angles to the principal interval [-pi, pi)."""
    return np.mod(np.asarray(phi) + np.pi, TWO_PI) - np.pi


def cyc_dist(a, b):
    """Cyclic distance between two angles, in [0, pi]."""
    return np.abs(wrap(np.asarray(a) - np.asarray(b)))


def arc_overlap_length(delta, w1, w2):
    """Length of the intersection of two circular arcs.

    The arcs are centered ``delta`` apart (cyclically) with half-widths
    ``w1`` and ``w2``, each clamped to [0, pi].  Two half-circle-or-wider
    arcs can intersect in two components; both are counted.
    """
    delta = np.abs(wrap(delta))
    w1 = np.minimum(np.asarray(w1, dtype=float), np.pi)
    w2 = np.minimum(np.asarray(w2, dtype=float), np.pi)

    def _ov(lo1, hi1, lo2, hi2):
        return np.maximum(0.0, np.minimum(hi1, hi2) - np.maximum(lo1, lo2))

    # Main overlap plus the component reached across the cut at -pi.
    main = _ov(-w1, w1, delta - w2, delta + w2)
    wrapped = _ov(-w1, w1, delta - TWO_PI - w2, delta - TWO_PI + w2)
    return np.minimum(main + wrapped, TWO_PI)
