"""Exact Gaussian elimination over the scalar field."""

from __future__ import annotations

from typing import Hashable, Sequence

from .qcoeff import ONE, ZERO, QScalar


def _cost(x: QScalar) -> int:
    return len(str(x))


def nullspace(columns: Sequence[dict[Hashable, QScalar]]) -> list[list[QScalar]]:
    """Basis of {c : sum_j c_j columns[j] = 0}, each vector of length len(columns).

    Columns are sparse maps row-key -> scalar.  Pivots are chosen by the
    shortest printed entry, which keeps rational functions small.
    """
    ncols = len(columns)
    # row-major sparse copy
    rows: dict[Hashable, dict[int, QScalar]] = {}
    for j, col in enumerate(columns):
        for r, v in col.items():
            if not v.is_zero():
                rows.setdefault(r, {})[j] = v
    pivots: dict[int, dict[int, QScalar]] = {}  # pivot column -> normalized row
    for row in rows.values():
        row = dict(row)
        # reduce against existing pivots
        for pc, prow in pivots.items():
            if pc in row:
                f = row[pc]
                for k, v in prow.items():
                    s = row.get(k, ZERO) - f * v
                    if s.is_zero():
                        row.pop(k, None)
                    else:
                        row[k] = s
        if not row:
            continue
        pc = min(row, key=lambda k: (_cost(row[k]), k))
        inv = row[pc].inverse()
        row = {k: v * inv for k, v in row.items()}
        # keep existing pivot rows reduced in the new pivot column
        for opc, orow in pivots.items():
            if pc in orow:
                f = orow[pc]
                for k, v in row.items():
                    s = orow.get(k, ZERO) - f * v
                    if s.is_zero():
                        orow.pop(k, None)
                    else:
                        orow[k] = s
        pivots[pc] = row
    free = [j for j in range(ncols) if j not in pivots]
    basis = []
    for fj in free:
        vec = [ZERO] * ncols
        vec[fj] = ONE
        for pc, prow in pivots.items():
            vec[pc] = -prow.get(fj, ZERO)
        basis.append(vec)
    return basis


def rank(columns: Sequence[dict[Hashable, QScalar]]) -> int:
    return len(columns) - len(nullspace(columns))
