"""Multivariate gcd and resultants over the rationals.

Two exact routes are provided:

* :func:`subresultant_gcd` treats a polynomial as univariate in its last used
  variable with polynomial coefficients and runs the subresultant remainder
  sequence on primitive parts, recursing into the coefficient ring for contents.
* :func:`modular_gcd` is Brown's dense modular algorithm (images modulo word-size
  primes, evaluation/interpolation in all but one variable, CRT, trial division).

:func:`gcd_multivariate` and :func:`gcd_list` choose between them by size, after
stripping the common monomial factor and bounding the gcd degree in every
variable from univariate modular images.  A bound of zero in every variable
proves the remaining gcd is constant without running either algorithm.
"""

from __future__ import annotations

import random
from functools import reduce
from math import gcd as igcd
from typing import Iterable, Sequence

from .poly import Poly, content_and_primitive, divide_exact

# subresultant route is used while the product of term counts stays below this
SMALL_PRODUCT = 400


# -- helpers ----------------------------------------------------------------


def normalize(p: Poly) -> Poly:
    """Primitive integer form with positive leading coefficient (zero stays zero)."""
    if not p:
        return p
    return content_and_primitive(p)[1]


def _monomial_gcd(polys: Sequence[Poly]) -> tuple[int, ...]:
    n = polys[0].nvars
    low = [None] * n
    for p in polys:
        for e, _ in p.as_dict().items():
            for i, k in enumerate(e):
                if low[i] is None or k < low[i]:
                    low[i] = k
    return tuple(x or 0 for x in low)


def _shift(p: Poly, m: tuple[int, ...]) -> Poly:
    if not any(m):
        return p
    return Poly._raw(p.nvars, {tuple(a - b for a, b in zip(e, m)): c for e, c in p.as_dict().items()})


def _to_univariate(p: Poly, v: int) -> list[Poly]:
    """Coefficients of ``p`` as a polynomial in variable ``v`` (index = power)."""
    groups: dict[int, dict] = {}
    for e, c in p.as_dict().items():
        k = e[v]
        f = e[:v] + (0,) + e[v + 1 :]
        groups.setdefault(k, {})[f] = c
    deg = max(groups, default=-1)
    return [Poly._raw(p.nvars, groups.get(k, {})) for k in range(deg + 1)]


def _from_univariate(coeffs: Sequence[Poly], v: int, nvars: int) -> Poly:
    d = {}
    for k, q in enumerate(coeffs):
        for e, c in q.as_dict().items():
            d[e[:v] + (k,) + e[v + 1 :]] = c
    return Poly._raw(nvars, d)


def _exact(p: Poly, q: Poly) -> Poly:
    r = divide_exact(p, q)
    if r is None:
        raise ArithmeticError("internal error: expected exact division")
    return r


# -- univariate-over-polynomials arithmetic (dense lists, low degree first) ----


def _strip(a: list[Poly]) -> list[Poly]:
    while a and not a[-1]:
        a.pop()
    return a


def _prem(a: list[Poly], b: list[Poly]) -> list[Poly]:
    """Pseudo-remainder of a by b."""
    a = list(a)
    db = len(b) - 1
    lc = b[-1]
    delta = len(a) - 1 - db + 1
    while len(a) - 1 >= db and a:
        shift = len(a) - 1 - db
        la = a[-1]
        a = [c * lc for c in a]
        for i, c in enumerate(b):
            a[i + shift] = a[i + shift] - la * c
        a.pop()
        _strip(a)
        delta -= 1
    if delta > 0 and a:
        f = lc**delta
        a = [c * f for c in a]
    return a


def _subresultant_prs(f: list[Poly], g: list[Poly]) -> list[list[Poly]]:
    """Subresultant remainder sequence of f, g with deg f >= deg g >= 1."""
    prs = [f, g]
    m = len(g) - 1
    d = len(f) - 1 - m
    h = [c * (-1) ** (d + 1) for c in _prem(f, g)]
    lc = g[-1]
    c = -(lc**d)
    while h:
        k = len(h) - 1
        prs.append(h)
        f, g, d, m = g, h, m - k, k
        b = -lc * c**d
        h = [_exact(x, b) for x in _prem(f, g)]
        lc = g[-1]
        if d > 1:
            c = _exact((-lc) ** d, c ** (d - 1))
        else:
            c = -lc
    return prs


def _main_var(*polys: Poly) -> int | None:
    used = set()
    for p in polys:
        used.update(p.used_vars())
    return max(used) if used else None


def _content_in(coeffs: Sequence[Poly]) -> Poly:
    return reduce(subresultant_gcd, [c for c in coeffs if c])


def subresultant_gcd(p: Poly, q: Poly) -> Poly:
    """Normalized gcd via recursive contents and subresultant PRS."""
    p._check(q)
    if not p and not q:
        raise ValueError("gcd of two zero polynomials is undefined")
    if not p:
        return normalize(q)
    if not q:
        return normalize(p)
    v = _main_var(p, q)
    if v is None:
        return Poly.const(p.nvars, 1)
    up, uq = _to_univariate(p, v), _to_univariate(q, v)
    if len(up) == 1 or len(uq) == 1:
        # one side is free of v: gcd divides every v-coefficient of the other
        return normalize(reduce(subresultant_gcd, [c for c in up + uq if c]))
    cp, cq = _content_in(up), _content_in(uq)
    cont = subresultant_gcd(cp, cq)
    up = [_exact(c, cp) for c in up]
    uq = [_exact(c, cq) for c in uq]
    if len(up) < len(uq):
        up, uq = uq, up
    prs = _subresultant_prs(up, uq)
    last = prs[-1]
    if len(last) == 1:
        g = cont
    else:
        pp = [_exact(c, _content_in(last)) for c in last]
        g = cont * _from_univariate(pp, v, p.nvars)
    return normalize(g)


def resultant(p: Poly, q: Poly, v: int) -> Poly:
    """Resultant of ``p`` and ``q`` with respect to variable index ``v``.

    Computed as the fraction-free (Bareiss) determinant of the Sylvester matrix.
    """
    p._check(q)
    up, uq = _strip(_to_univariate(p, v)), _strip(_to_univariate(q, v))
    nv = p.nvars
    if not up or not uq:
        return Poly.zero(nv)
    m, n = len(up) - 1, len(uq) - 1
    if m == 0:
        return up[0] ** n
    if n == 0:
        return uq[0] ** m
    zero = Poly.zero(nv)
    rows = []
    for i in range(n):
        row = [zero] * (m + n)
        for j, c in enumerate(reversed(up)):
            row[i + j] = c
        rows.append(row)
    for i in range(m):
        row = [zero] * (m + n)
        for j, c in enumerate(reversed(uq)):
            row[i + j] = c
        rows.append(row)
    return _bareiss_det(rows)


def _bareiss_det(rows: list[list[Poly]]) -> Poly:
    n = len(rows)
    nv = rows[0][0].nvars
    m = [list(r) for r in rows]
    sign = 1
    prev = Poly.const(nv, 1)
    for k in range(n - 1):
        if not m[k][k]:
            for i in range(k + 1, n):
                if m[i][k]:
                    m[k], m[i] = m[i], m[k]
                    sign = -sign
                    break
            else:
                return Poly.zero(nv)
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = _exact(m[i][j] * m[k][k] - m[i][k] * m[k][j], prev)
        prev = m[k][k]
    return m[n - 1][n - 1] * sign


# -- arithmetic modulo a prime ------------------------------------------------


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _primes(start: int = (1 << 61) - 1):
    n = start
    while True:
        if _is_prime(n):
            yield n
        n -= 2


# univariate polynomials mod p: lists of ints, low degree first


def _ustrip(a):
    while a and a[-1] == 0:
        a.pop()
    return a


def _umonic(a, p):
    if not a:
        return a
    inv = pow(a[-1], -1, p)
    return [c * inv % p for c in a]


def _udivmod(a, b, p):
    a = list(a)
    db = len(b) - 1
    inv = pow(b[-1], -1, p)
    q = [0] * max(len(a) - db, 0)
    while len(a) - 1 >= db and a:
        shift = len(a) - 1 - db
        c = a[-1] * inv % p
        q[shift] = c
        for i, bc in enumerate(b):
            a[i + shift] = (a[i + shift] - c * bc) % p
        a.pop()
        _ustrip(a)
    return q, a


def _ugcd(a, b, p):
    a, b = _ustrip(list(a)), _ustrip(list(b))
    while b:
        a, b = b, _udivmod(a, b, p)[1]
    return _umonic(a, p)


def _umul(a, b, p):
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] = (out[i + j] + x * y) % p
    return out


def _ueval(a, x, p):
    r = 0
    for c in reversed(a):
        r = (r * x + c) % p
    return r


def _reduce_mod(p: Poly, prime: int) -> dict:
    """Integer polynomial reduced mod ``prime`` as exponent dict."""
    out = {}
    for e, c in p.as_dict().items():
        c = int(c) % prime
        if c:
            out[e] = c
    return out


def _lex_lead(A: dict, vars_: Sequence[int]):
    """Lexicographic leading monomial restricted to ``vars_``."""
    return max(tuple(e[v] for v in vars_) for e in A)


def _split(A: dict, x: int) -> dict:
    """Group by exponents outside variable x -> dense univariate coefficients in x."""
    out: dict[tuple, list] = {}
    for e, c in A.items():
        k = e[x]
        f = e[:x] + (0,) + e[x + 1 :]
        lst = out.get(f)
        if lst is None:
            lst = out[f] = []
        if len(lst) <= k:
            lst.extend([0] * (k + 1 - len(lst)))
        lst[k] = c
    return out


def _join(S: dict, x: int) -> dict:
    out = {}
    for f, lst in S.items():
        for k, c in enumerate(lst):
            if c:
                out[f[:x] + (k,) + f[x + 1 :]] = c
    return out


def _divides_modp(A: dict, B: dict, prime: int, vars_: Sequence[int]) -> bool:
    """Does B divide A in F_p[vars_]?  Lex division with a dict remainder."""
    def key(e):
        return tuple(e[v] for v in vars_)

    bterms = sorted(B.items(), key=lambda t: key(t[0]), reverse=True)
    lb, lc = bterms[0]
    inv = pow(lc, -1, prime)
    rem = dict(A)
    lbk = key(lb)
    while rem:
        e = max(rem, key=key)
        c = rem.pop(e)
        ek = key(e)
        if any(a < b for a, b in zip(ek, lbk)):
            return False
        t = tuple(a - b for a, b in zip(e, lb))
        a = c * inv % prime
        for f, bc in bterms[1:]:
            g = tuple(x + y for x, y in zip(t, f))
            v = (rem.get(g, 0) - a * bc) % prime
            if v:
                rem[g] = v
            else:
                rem.pop(g, None)
    return True


def _monic_lex(A: dict, vars_: Sequence[int], prime: int) -> dict:
    lead = max(A, key=lambda e: tuple(e[v] for v in vars_))
    inv = pow(A[lead], -1, prime)
    return {e: c * inv % prime for e, c in A.items()}


def _pgcd(A: dict, B: dict, vars_: tuple[int, ...], prime: int, rng: random.Random) -> dict:
    """Monic (lex) gcd of A, B in F_p[vars_]; both nonzero."""
    n = len(next(iter(A)))
    if len(vars_) == 1:
        (x,) = vars_
        ua, ub = _split(A, x), _split(B, x)
        zero = (0,) * n
        g = _ugcd(ua[zero], ub[zero], prime)
        return _join({zero: g}, x)
    x = vars_[-1]
    rest = vars_[:-1]
    SA, SB = _split(A, x), _split(B, x)
    cA = reduce(lambda a, b: _ugcd(a, b, prime), SA.values())
    cB = reduce(lambda a, b: _ugcd(a, b, prime), SB.values())
    if len(cA) > 1:
        SA = {f: _udivmod(l, cA, prime)[0] for f, l in SA.items()}
    if len(cB) > 1:
        SB = {f: _udivmod(l, cB, prime)[0] for f, l in SB.items()}
    cont = _ugcd(cA, cB, prime)
    leadA = max(SA, key=lambda f: tuple(f[v] for v in rest))
    leadB = max(SB, key=lambda f: tuple(f[v] for v in rest))
    lcA, lcB = SA[leadA], SB[leadB]
    g = _ugcd(lcA, lcB, prime)
    bound = (len(g) - 1) + min(max(len(l) for l in SA.values()), max(len(l) for l in SB.values())) - 1
    A1, B1 = _join(SA, x), _join(SB, x)

    H = None  # dict: rest-exps -> dense univariate in x
    q = [1]
    mdeg = None
    tried = set()
    while True:
        if len(tried) >= prime - 1:
            raise ArithmeticError("ran out of evaluation points")
        b = rng.randrange(prime)
        if b in tried:
            continue
        tried.add(b)
        gb = _ueval(g, b, prime)
        if gb == 0 or _ueval(lcA, b, prime) == 0 or _ueval(lcB, b, prime) == 0:
            continue
        Ab = {}
        for f, l in SA.items():
            v = _ueval(l, b, prime)
            if v:
                Ab[f] = v
        Bb = {}
        for f, l in SB.items():
            v = _ueval(l, b, prime)
            if v:
                Bb[f] = v
        Cb = _pgcd(Ab, Bb, rest, prime, rng)
        m = _lex_lead(Cb, rest)
        if not any(m):
            # coprime primitive parts
            return _join({(0,) * n: cont}, x) if len(cont) > 1 else {(0,) * n: 1}
        Cb = {e: c * gb % prime for e, c in Cb.items()}
        if mdeg is None or m < mdeg:
            H = {f: [c] for f, c in Cb.items()}
            q = [(-b) % prime, 1]
            mdeg = m
            changed = True
        elif m > mdeg:
            continue
        else:
            qb = _ueval(q, b, prime)
            inv = pow(qb, -1, prime)
            changed = False
            keys = set(H) | set(Cb)
            for f in keys:
                cur = H.get(f, [])
                diff = (Cb.get(f, 0) - _ueval(cur, b, prime)) % prime
                if diff:
                    changed = True
                    corr = [c * diff * inv % prime for c in q]
                    new = list(cur) + [0] * max(0, len(corr) - len(cur))
                    for i, c in enumerate(corr):
                        new[i] = (new[i] + c) % prime
                    _ustrip(new)
                    if new:
                        H[f] = new
                    else:
                        H.pop(f, None)
            q = _umul(q, [(-b) % prime, 1], prime)
        if (not changed and len(q) > 2) or len(q) - 1 > bound:
            hc = reduce(lambda a, c: _ugcd(a, c, prime), H.values())
            C = {f: _udivmod(l, hc, prime)[0] for f, l in H.items()} if len(hc) > 1 else H
            Cd = _join(C, x)
            if _divides_modp(A1, Cd, prime, vars_) and _divides_modp(B1, Cd, prime, vars_):
                if len(cont) > 1:
                    Cd = _join({f: _umul(l, cont, prime) for f, l in _split(Cd, x).items()}, x)
                return _monic_lex(Cd, vars_, prime)
            if len(q) - 1 > bound + 2:
                # interpolation went through an undetected unlucky point; start over
                H, q, mdeg = None, [1], None


def modular_gcd(p: Poly, q: Poly, seed: int = 0) -> Poly:
    """Normalized gcd by Brown's modular algorithm."""
    p._check(q)
    if not p or not q:
        return subresultant_gcd(p, q)
    _, P = content_and_primitive(p)
    _, Q = content_and_primitive(q)
    vars_ = tuple(sorted(set(P.used_vars()) | set(Q.used_vars())))
    if not vars_:
        return Poly.const(p.nvars, 1)
    if not set(P.used_vars()) or not set(Q.used_vars()):
        return subresultant_gcd(P, Q)

    def lexlead(X: Poly):
        e = max(X.as_dict(), key=lambda e: tuple(e[v] for v in vars_))
        return X.coeff(e)

    la, lb = int(lexlead(P)), int(lexlead(Q))
    g = igcd(la, lb)
    rng = random.Random(seed)
    H = None
    M = 1
    mdeg = None
    prev = None
    for prime in _primes():
        if la % prime == 0 or lb % prime == 0:
            continue
        Cp = _pgcd(_reduce_mod(P, prime), _reduce_mod(Q, prime), vars_, prime, rng)
        m = _lex_lead(Cp, vars_)
        if not any(m):
            return Poly.const(p.nvars, 1)
        Cp = {e: c * g % prime for e, c in _monic_lex(Cp, vars_, prime).items()}
        if mdeg is None or m < mdeg:
            H, M, mdeg, prev = Cp, prime, m, None
        elif m > mdeg:
            continue
        else:
            newH = {}
            inv = pow(M, -1, prime)
            for e in set(H) | set(Cp):
                a = H.get(e, 0)
                b = Cp.get(e, 0)
                t = (b - a) * inv % prime
                v = (a + M * t) % (M * prime)
                if v:
                    newH[e] = v
            H, M = newH, M * prime
        half = M // 2
        cand = Poly._raw(p.nvars, {e: (c - M if c > half else c) for e, c in H.items()})
        if cand == prev or M > (1 << 600):
            G = normalize(cand)
            if divide_exact(P, G) is not None and divide_exact(Q, G) is not None:
                return G
        prev = cand


# -- degree bounds and the public entry points --------------------------------

_BOUND_PRIME = (1 << 61) - 1


def degree_bounds(polys: Sequence[Poly], seed: int = 0) -> list[int]:
    """Certified upper bounds on the degree of gcd(polys) in each variable.

    For each variable v the other variables are set to random residues modulo a
    large prime; whenever some input keeps its leading coefficient in v at that
    point, the degree of the univariate gcd of the images bounds deg_v of the
    true gcd from above.  Otherwise the smallest input degree is reported.
    """
    rng = random.Random(seed)
    n = polys[0].nvars
    prime = _BOUND_PRIME
    ints = [content_and_primitive(p)[1] for p in polys if p]
    bounds = []
    for v in range(n):
        dmin = min(p.degree_in(v) for p in ints)
        if dmin == 0:
            bounds.append(0)
            continue
        point = [rng.randrange(1, prime) for _ in range(n)]
        images = []
        certified = False
        for P in ints:
            img = {}
            for e, c in P.as_dict().items():
                t = int(c) % prime
                for i, k in enumerate(e):
                    if i != v and k:
                        t = t * pow(point[i], k, prime) % prime
                img[e[v]] = (img.get(e[v], 0) + t) % prime
            dense = [img.get(k, 0) for k in range(P.degree_in(v) + 1)]
            if dense[-1] != 0:
                certified = True
            images.append(dense)
        if not certified:
            bounds.append(dmin)
            continue
        g = reduce(lambda a, b: _ugcd(a, b, prime), images)
        bounds.append(max(len(g) - 1, 0))
    return bounds


def gcd_list(polys: Iterable[Poly], seed: int = 0) -> Poly:
    """Normalized gcd of several polynomials (zeros are ignored)."""
    polys = list(polys)
    if not polys:
        raise ValueError("gcd of an empty list")
    nv = polys[0].nvars
    for p in polys:
        polys[0]._check(p)
    polys = [normalize(p) for p in polys if p]
    if not polys:
        raise ValueError("gcd of zero polynomials is undefined")
    mono = _monomial_gcd(polys)
    mono_poly = Poly.monomial(mono)
    polys = [_shift(p, mono) for p in polys]
    polys = list(dict.fromkeys(polys))
    if len(polys) == 1:
        return normalize(mono_poly * polys[0])
    if any(p.is_constant for p in polys):
        return mono_poly
    rest = _gcd_no_monomial(polys, seed)
    return normalize(mono_poly * rest)


def _gcd_no_monomial(polys: list[Poly], seed: int) -> Poly:
    nv = polys[0].nvars
    bounds = degree_bounds(polys, seed)
    if not any(bounds):
        return Poly.const(nv, 1)
    free = [v for v, b in enumerate(bounds) if b == 0 and any(p.degree_in(v) > 0 for p in polys)]
    if free:
        # the gcd does not involve these variables: it divides every coefficient
        pieces = polys
        for v in free:
            pieces = [c for p in pieces for c in _to_univariate(p, v) if c]
        pieces = list(dict.fromkeys(normalize(c) for c in pieces))
        return gcd_list(pieces, seed)
    polys = sorted(polys, key=len)
    g = polys[0]
    for p in polys[1:]:
        g = _gcd2(g, p, seed)
        if g.is_constant:
            return Poly.const(nv, 1)
    return g


def _gcd2(p: Poly, q: Poly, seed: int) -> Poly:
    if len(p) * len(q) <= SMALL_PRODUCT:
        return subresultant_gcd(p, q)
    return modular_gcd(p, q, seed)


def gcd_multivariate(p: Poly, q: Poly, seed: int = 0) -> Poly:
    """Normalized gcd of two polynomials, not both zero."""
    p._check(q)
    if not p and not q:
        raise ValueError("gcd of two zero polynomials is undefined")
    return gcd_list([p, q], seed)
