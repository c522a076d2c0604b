"""Exact integer matrices: Smith normal form and abelianization of finite
presentations. Entries are Python ints throughout; no floating point."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Sequence, Tuple

from .words import exponent_sums

IntMatrix = List[List[int]]


class UnknownGenerator(ValueError):
    pass


class SNFVerificationError(ArithmeticError):
    pass


def identity(n: int) -> IntMatrix:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def as_int_matrix(a) -> IntMatrix:
    rows = [[int(x) for x in row] for row in a]
    if rows and any(len(r) != len(rows[0]) for r in rows):
        raise ValueError("ragged matrix")
    return rows


def shape(a: IntMatrix) -> Tuple[int, int]:
    return len(a), (len(a[0]) if a else 0)


def matmul(a: IntMatrix, b: IntMatrix) -> IntMatrix:
    bt = list(zip(*b))
    return [[sum(x * y for x, y in zip(row, col)) for col in bt] for row in a]


def det(a: IntMatrix) -> int:
    """Bareiss fraction-free determinant."""
    n = len(a)
    if n == 0:
        return 1
    m = [list(row) for row in a]
    sign, prev = 1, 1
    for k in range(n - 1):
        if m[k][k] == 0:
            for i in range(k + 1, n):
                if m[i][k] != 0:
                    m[k], m[i] = m[i], m[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
        prev = m[k][k]
    return sign * m[n - 1][n - 1]


@dataclass(frozen=True)
class SNFResult:
    """U A V = D with U, V unimodular and D diagonal, d1 | d2 | ... | d_rank."""

    D: Tuple[Tuple[int, ...], ...]
    U: Tuple[Tuple[int, ...], ...]
    V: Tuple[Tuple[int, ...], ...]
    rank: int

    @property
    def diagonal(self) -> Tuple[int, ...]:
        m, n = len(self.D), len(self.D[0]) if self.D else 0
        return tuple(self.D[i][i] for i in range(min(m, n)))

    @property
    def invariant_factors(self) -> Tuple[int, ...]:
        return self.diagonal[: self.rank]


def smith_normal_form(a) -> SNFResult:
    a = as_int_matrix(a)
    m, n = shape(a)
    if m == 0 or n == 0:
        raise ValueError("smith_normal_form needs a nonempty matrix")
    d = [row[:] for row in a]
    u = identity(m)
    v = identity(n)

    def swap_rows(i, j):
        d[i], d[j] = d[j], d[i]
        u[i], u[j] = u[j], u[i]

    def swap_cols(i, j):
        for row in d:
            row[i], row[j] = row[j], row[i]
        for row in v:
            row[i], row[j] = row[j], row[i]

    def add_row(dst, src, q):  # row_dst += q * row_src
        d[dst] = [x + q * y for x, y in zip(d[dst], d[src])]
        u[dst] = [x + q * y for x, y in zip(u[dst], u[src])]

    def add_col(dst, src, q):
        for row in d:
            row[dst] += q * row[src]
        for row in v:
            row[dst] += q * row[src]

    rank = 0
    for t in range(min(m, n)):
        while True:
            # pivot of least absolute value limits entry growth
            best = None
            for i in range(t, m):
                for j in range(t, n):
                    x = d[i][j]
                    if x and (best is None or abs(x) < best[0]):
                        best = (abs(x), i, j)
            if best is None:
                break
            _, i, j = best
            swap_rows(t, i)
            swap_cols(t, j)
            p = d[t][t]
            for i in range(t + 1, m):
                if d[i][t]:
                    add_row(i, t, -(d[i][t] // p))
            for j in range(t + 1, n):
                if d[t][j]:
                    add_col(j, t, -(d[t][j] // p))
            if any(d[i][t] for i in range(t + 1, m)) or any(d[t][j] for j in range(t + 1, n)):
                continue
            bad = next(
                (i for i in range(t + 1, m) for j in range(t + 1, n) if d[i][j] % p),
                None,
            )
            if bad is None:
                break
            add_row(t, bad, 1)
        if d[t][t] == 0:
            break
        if d[t][t] < 0:
            d[t] = [-x for x in d[t]]
            u[t] = [-x for x in u[t]]
        rank += 1

    res = SNFResult(
        D=tuple(map(tuple, d)), U=tuple(map(tuple, u)), V=tuple(map(tuple, v)), rank=rank
    )
    verify_snf(a, res)
    return res


def verify_snf(a: IntMatrix, res: SNFResult) -> None:
    """Exact witness check; raises SNFVerificationError on any failure."""
    u = [list(r) for r in res.U]
    v = [list(r) for r in res.V]
    dd = [list(r) for r in res.D]
    if matmul(matmul(u, a), v) != dd:
        raise SNFVerificationError("U A V != D")
    if abs(det(u)) != 1 or abs(det(v)) != 1:
        raise SNFVerificationError("U or V is not unimodular")
    m, n = shape(dd)
    for i in range(m):
        for j in range(n):
            if i != j and dd[i][j]:
                raise SNFVerificationError("D is not diagonal")
    diag = res.diagonal
    if any(x <= 0 for x in diag[: res.rank]) or any(diag[res.rank :]):
        raise SNFVerificationError("diagonal not of the form (positive..., 0...)")
    for x, y in zip(diag[: res.rank], diag[1 : res.rank]):
        if y % x:
            raise SNFVerificationError("divisibility chain broken")


# -- abelianization ------------------------------------------------------------

@dataclass(frozen=True)
class AbelianInvariants:
    """Z^free_rank + Z/t1 + ... + Z/tk with t1 | t2 | ... | tk, all ti > 1."""

    free_rank: int
    torsion: Tuple[int, ...] = field(default_factory=tuple)

    def __str__(self):
        parts = []
        if self.free_rank:
            parts.append("Z" if self.free_rank == 1 else f"Z^{self.free_rank}")
        parts += [f"Z_{t}" for t in self.torsion]
        return " + ".join(parts) if parts else "0"


def exponent_matrix(pres) -> IntMatrix:
    """Row i holds the exponent sums of each generator in relator i."""
    gens = list(pres.generators)
    index = {g: j for j, g in enumerate(gens)}
    rows = []
    for rel in pres.relators:
        row = [0] * len(gens)
        for lab, k in exponent_sums(rel).items():
            if lab not in index:
                raise UnknownGenerator(f"relator uses unknown generator {lab!r}")
            row[index[lab]] += k
        rows.append(row)
    return rows


def invariants_of_matrix(rows: Sequence[Sequence[int]], ngens: int) -> AbelianInvariants:
    if ngens == 0:
        return AbelianInvariants(0, ())
    if not rows:
        return AbelianInvariants(ngens, ())
    res = smith_normal_form(rows)
    tors = tuple(x for x in res.invariant_factors if x > 1)
    return AbelianInvariants(ngens - res.rank, tors)


def abelian_invariants(pres) -> AbelianInvariants:
    return invariants_of_matrix(exponent_matrix(pres), len(pres.generators))


def matrix_to_json(a: IntMatrix) -> dict:
    r, c = shape(a)
    return {"rows": r, "cols": c, "data": [list(map(int, row)) for row in a]}


def matrix_from_json(obj: dict) -> IntMatrix:
    data = as_int_matrix(obj["data"])
    if shape(data) != (obj["rows"], obj["cols"]) and data:
        raise ValueError("matrix JSON: rows/cols do not match data")
    return data
