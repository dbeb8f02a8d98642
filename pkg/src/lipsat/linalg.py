"""Sparse exact linear algebra over Q(zeta_N).

Vectors are dicts key -> CycRat.  ``SpanBasis`` keeps an incrementally
echelonized basis and remembers how each basis row was built from the input
vectors, so membership queries can return an explicit combination.
"""

from __future__ import annotations

from .cyclo import CycRat

__all__ = ["SpanBasis", "rank"]


def _axpy(y: dict, a, x: dict):
    """y - a*x, in place."""
    for k, v in x.items():
        nv = y[k] - a * v if k in y else -(a * v)
        if nv:
            y[k] = nv
        else:
            y.pop(k, None)


class SpanBasis:
    def __init__(self, track: bool = False, order=None):
        self.rows = {}  # pivot key -> (monic row, combination or None)
        self.track = track
        self.count = 0
        self._order = order or (lambda k: k)

    def _pivot(self, v: dict):
        return min(v, key=self._order)

    def reduce(self, v: dict, combo=None):
        v = dict(v)
        combo = dict(combo) if combo is not None else None
        # rows are fully reduced, so one pass over the pivots present suffices
        for k in [k for k in v if k in self.rows]:
            a = v.get(k)
            if not a:
                continue
            row, rc = self.rows[k]
            _axpy(v, a, row)
            if combo is not None and rc is not None:
                _axpy(combo, a, rc)
        return v, combo

    def add(self, v: dict) -> bool:
        """Insert a vector; True if it enlarged the span."""
        idx = self.count
        self.count += 1
        combo = {idx: CycRat.rational(1)} if self.track else None
        r, combo = self.reduce(v, combo)
        if not r:
            return False
        k = self._pivot(r)
        inv = r[k].inverse()
        r = {key: val * inv for key, val in r.items()}
        if combo is not None:
            combo = {key: val * inv for key, val in combo.items()}
        # keep the basis fully reduced with respect to the new pivot
        for pk, (row, rc) in list(self.rows.items()):
            if k in row:
                a = row[k]
                _axpy(row, a, r)
                if rc is not None and combo is not None:
                    _axpy(rc, a, combo)
        self.rows[k] = (r, combo)
        return True

    def rank(self) -> int:
        return len(self.rows)

    def express(self, v: dict):
        """Coefficients c with sum c[i] * input_i = v, or None if v is not in the span."""
        r, combo = self.reduce(v, {})
        if r:
            return None
        # reduce() subtracted a*combination from the (empty) combo; negate it
        return {k: -val for k, val in combo.items()}


def rank(vectors) -> int:
    b = SpanBasis()
    for v in vectors:
        b.add(v)
    return b.rank()
