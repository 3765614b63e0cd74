"""Exact linear algebra over the rationals.

Two regimes:

* small systems use plain fraction-based Gaussian elimination (gmpy2.mpq
  entries, deterministic first-nonzero pivoting), which also powers RREF
  and nullspace computation;
* large solves with many right-hand sides go through a multimodular
  path: eliminate modulo several 31-bit primes with vectorized numpy
  integer arithmetic, combine by CRT, recover rationals by rational
  reconstruction, and verify the candidate against an independent prime.

All matrices are lists of rows; entries are mpq (or ints).
"""

import math

import numpy as np
from gmpy2 import is_prime, mpq

# n*n mpq elimination is fine below this size; above it the multimodular
# route is much faster because coefficient growth is avoided
DENSE_EXACT_LIMIT = 60


class SingularMatrixError(ValueError):
    pass


# -- small exact routines ---------------------------------------------


def rref(rows):
    """Reduced row echelon form; returns (rref_rows, pivot_columns)."""
    mat = [[mpq(v) for v in row] for row in rows]
    nrows = len(mat)
    ncols = len(mat[0]) if nrows else 0
    pivots = []
    r = 0
    for c in range(ncols):
        piv = None
        for i in range(r, nrows):
            if mat[i][c] != 0:
                piv = i
                break
        if piv is None:
            continue
        mat[r], mat[piv] = mat[piv], mat[r]
        inv = 1 / mat[r][c]
        mat[r] = [v * inv for v in mat[r]]
        for i in range(nrows):
            if i != r and mat[i][c] != 0:
                f = mat[i][c]
                mat[i] = [a - f * b for a, b in zip(mat[i], mat[r])]
        pivots.append(c)
        r += 1
        if r == nrows:
            break
    return mat, pivots


def nullspace(rows, ncols=None):
    """Basis of the right nullspace, one vector per free column.

    Vectors follow the RREF convention: vector j has entry 1 at its free
    column and that column is zero in every other vector, so coordinates
    with respect to this basis can be read off directly.
    """
    if ncols is None:
        ncols = len(rows[0])
    if not rows:
        return [
            [mpq(1) if i == j else mpq(0) for i in range(ncols)] for j in range(ncols)
        ]
    red, pivots = rref(rows)
    pivot_set = set(pivots)
    free = [c for c in range(ncols) if c not in pivot_set]
    basis = []
    for fc in free:
        vec = [mpq(0)] * ncols
        vec[fc] = mpq(1)
        for r, pc in enumerate(pivots):
            vec[pc] = -red[r][fc]
        basis.append(vec)
    return basis


def solve_exact(A, B):
    """Solve A X = B exactly by mpq elimination; B holds columns."""
    n = len(A)
    r = len(B[0])
    M = [[mpq(v) for v in A[i]] + [mpq(v) for v in B[i]] for i in range(n)]
    for c in range(n):
        piv = None
        for i in range(c, n):
            if M[i][c] != 0:
                piv = i
                break
        if piv is None:
            raise SingularMatrixError("singular matrix in exact solve")
        M[c], M[piv] = M[piv], M[c]
        inv = 1 / M[c][c]
        M[c] = [v * inv for v in M[c]]
        for i in range(c + 1, n):
            if M[i][c] != 0:
                f = M[i][c]
                M[i] = [a - f * b for a, b in zip(M[i], M[c])]
    for c in range(n - 1, -1, -1):
        for i in range(c):
            if M[i][c] != 0:
                f = M[i][c]
                M[i] = [a - f * b for a, b in zip(M[i], M[c])]
    return [[M[i][n + j] for j in range(r)] for i in range(n)]


def solve_particular(A, B):
    """One exact solution of A X = B for a possibly singular A (rows may
    outnumber or undercount columns); free variables are set to zero.
    Raises SingularMatrixError when a right-hand side is inconsistent.
    """
    nrows = len(A)
    ncols = len(A[0]) if nrows else 0
    r = len(B[0])
    aug = [[mpq(v) for v in A[i]] + [mpq(v) for v in B[i]] for i in range(nrows)]
    red, pivots = rref(aug)
    X = [[mpq(0)] * r for _ in range(ncols)]
    for i, pc in enumerate(pivots):
        if pc >= ncols:
            raise SingularMatrixError("inconsistent linear system")
        for j in range(r):
            X[pc][j] = red[i][ncols + j]
    # rows beyond the pivot count must be identically zero, which rref
    # guarantees, so consistency is fully checked by the pivot scan
    return X


def determinant(A):
    """Exact determinant by fraction elimination."""
    n = len(A)
    M = [[mpq(v) for v in row] for row in A]
    det = mpq(1)
    for c in range(n):
        piv = None
        for i in range(c, n):
            if M[i][c] != 0:
                piv = i
                break
        if piv is None:
            return mpq(0)
        if piv != c:
            M[c], M[piv] = M[piv], M[c]
            det = -det
        det *= M[c][c]
        inv = 1 / M[c][c]
        for i in range(c + 1, n):
            if M[i][c] != 0:
                f = M[i][c] * inv
                M[i] = [a - f * b for a, b in zip(M[i], M[c])]
    return det


def is_positive_definite(A):
    """Leading-principal-minor test, exact."""
    n = len(A)
    for size in range(1, n + 1):
        minor = [row[:size] for row in A[:size]]
        if determinant(minor) <= 0:
            return False
    return True


# -- multimodular solve ------------------------------------------------

_PRIME_CACHE = []


def _primes(count):
    p = _PRIME_CACHE[-1] - 1 if _PRIME_CACHE else (1 << 31) - 1
    while len(_PRIME_CACHE) < count:
        while not is_prime(p):
            p -= 1
        _PRIME_CACHE.append(p)
        p -= 1
    return _PRIME_CACHE[:count]


def _solve_mod(Ap, Bp, p):
    """Solve mod p with vectorized elimination; raises if singular mod p."""
    n = Ap.shape[0]
    M = np.concatenate([Ap, Bp], axis=1).astype(np.int64) % p
    for col in range(n):
        nz = np.nonzero(M[col:, col])[0]
        if nz.size == 0:
            raise SingularMatrixError("singular modulo %d" % p)
        piv = col + int(nz[0])
        if piv != col:
            M[[col, piv]] = M[[piv, col]]
        inv = pow(int(M[col, col]), p - 2, p)
        M[col, col:] = (M[col, col:] * inv) % p
        rows = np.nonzero(M[col + 1 :, col])[0] + col + 1
        if rows.size:
            f = M[rows, col][:, None]
            M[rows, col:] = (M[rows, col:] - f * M[col, col:][None, :]) % p
    for col in range(n - 1, 0, -1):
        rows = np.nonzero(M[:col, col])[0]
        if rows.size:
            f = M[rows, col][:, None]
            M[rows, n:] = (M[rows, n:] - f * M[col, n:][None, :]) % p
            M[rows, col] = 0
    return M[:, n:]


def rational_reconstruct(r, M):
    """Recover n/d with |n|, d <= sqrt(M/2) from r mod M, or None."""
    bound = math.isqrt(M // 2)
    r %= M
    r0, r1 = M, r
    s0, s1 = 0, 1
    while r1 > bound:
        q = r0 // r1
        r0, r1 = r1, r0 - q * r1
        s0, s1 = s1, s0 - q * s1
    if s1 == 0 or abs(s1) > bound:
        return None
    n, d = r1, s1
    if d < 0:
        n, d = -n, -d
    if math.gcd(n, d) != 1:
        return None
    return mpq(n, d)


def _lcm_den(values):
    acc = 1
    for v in values:
        acc = acc * v.denominator // math.gcd(acc, v.denominator)
    return acc


def solve_batched(A, B):
    """Solve A X = B exactly; A is n*n, B is n*r, entries mpq.

    Uses direct mpq elimination for small n, otherwise the multimodular
    route with a verification solve modulo an extra prime.
    """
    n = len(A)
    if n == 0:
        return []
    A = [[mpq(v) for v in row] for row in A]
    B = [[mpq(v) for v in row] for row in B]
    r = len(B[0])
    if n <= DENSE_EXACT_LIMIT:
        return solve_exact(A, B)

    dA = _lcm_den(v for row in A for v in row)
    Ai = [[int(v * dA) for v in row] for row in A]
    col_scale = [_lcm_den(B[i][j] for i in range(n)) for j in range(r)]
    Bi = [
        [int(B[i][j] * (dA * col_scale[j])) for j in range(r)] for i in range(n)
    ]

    residues = []
    used = []
    next_idx = 0
    target = 3  # primes used for reconstruction; one extra verifies
    while True:
        while len(used) < target + 1:
            p = _primes(next_idx + 1)[next_idx]
            next_idx += 1
            Ap = np.array([[v % p for v in row] for row in Ai], dtype=np.int64)
            Bp = np.array([[v % p for v in row] for row in Bi], dtype=np.int64)
            try:
                Xp = _solve_mod(Ap, Bp, p)
            except SingularMatrixError:
                # a prime dividing det(A); rare, just take another
                if next_idx - len(used) > 20:
                    raise SingularMatrixError("matrix is singular")
                continue
            residues.append(Xp)
            used.append(p)
        # last prime is held out for verification
        X = _reconstruct(residues[:-1], used[:-1], n, r)
        if X is not None and _check_mod(X, residues[-1], used[-1]):
            return [
                [X[i][j] / col_scale[j] for j in range(r)] for i in range(n)
            ]
        target += 3
        if target > 60:
            raise SingularMatrixError("multimodular reconstruction failed")


def _reconstruct(residues, primes, n, r):
    if not residues:
        return None
    # incremental CRT per entry, then rational reconstruction
    Mtot = 1
    for p in primes:
        Mtot *= p
    X = []
    for i in range(n):
        row_res = [res[i] for res in residues]
        row = []
        for j in range(r):
            x = 0
            M = 1
            for res, p in zip(row_res, primes):
                rj = int(res[j])
                t = ((rj - x) * pow(M % p, p - 2, p)) % p
                x += M * t
                M *= p
            q = rational_reconstruct(x, Mtot)
            if q is None:
                return None
            row.append(q)
        X.append(row)
    return X


def _check_mod(X, Xp, p):
    for i, row in enumerate(X):
        for j, q in enumerate(row):
            den = q.denominator % p
            if den == 0:
                return False
            lhs = (q.numerator % p) * pow(den, p - 2, p) % p
            if lhs != int(Xp[i][j]) % p:
                return False
    return True


def singular_modulo_primes(rows, trials=3):
    """Fast singularity check for a square rational matrix.

    Returns False as soon as the matrix has full rank modulo one 31-bit
    prime (a certificate of nonsingularity); returns True when it is
    singular modulo `trials` distinct primes.  A nonsingular matrix can
    slip through only if every tried prime divides its determinant, so
    callers treating True as "degenerate" must still be prepared for
    consistent solves (solve_particular handles both cases exactly).
    """
    n = len(rows)
    if n == 0:
        return False
    dA = _lcm_den(mpq(v) for row in rows for v in row)
    Ai = [[int(mpq(v) * dA) for v in row] for row in rows]
    empty = np.zeros((n, 0), dtype=np.int64)
    hits = 0
    idx = 0
    while hits < trials:
        p = _primes(idx + 1)[idx]
        idx += 1
        if dA % p == 0:
            continue
        Ap = np.array([[v % p for v in row] for row in Ai], dtype=np.int64)
        try:
            _solve_mod(Ap, empty, p)
        except SingularMatrixError:
            hits += 1
            continue
        return False
    return True


# matrices up to this size precompute an exact inverse for reuse
INVERSE_CACHE_LIMIT = 150


class ExactSolver:
    """Cached exact solver for repeated solves against one matrix.

    Matrices up to INVERSE_CACHE_LIMIT store their exact inverse once,
    making later solves a sparse matrix product; larger ones defer to
    solve_batched per call, so callers should batch right-hand sides.
    """

    def __init__(self, A):
        self.A = [[mpq(v) for v in row] for row in A]
        self.n = len(self.A)
        self._inv = None
        if 0 < self.n <= INVERSE_CACHE_LIMIT:
            ident = [
                [mpq(1) if i == j else mpq(0) for j in range(self.n)]
                for i in range(self.n)
            ]
            self._inv = solve_exact(self.A, ident)

    def solve_many(self, B):
        if self.n == 0:
            return []
        if self._inv is None:
            return solve_batched(self.A, B)
        r = len(B[0])
        out = [[mpq(0)] * r for _ in range(self.n)]
        for t in range(self.n):
            row_b = B[t]
            if all(v == 0 for v in row_b):
                continue
            for i in range(self.n):
                f = self._inv[i][t]
                if f != 0:
                    orow = out[i]
                    for j in range(r):
                        if row_b[j] != 0:
                            orow[j] += f * row_b[j]
        return out

    def solve(self, b):
        cols = self.solve_many([[v] for v in b])
        return [row[0] for row in cols]
