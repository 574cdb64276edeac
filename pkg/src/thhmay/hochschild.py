"""Hochschild homology of free graded-commutative F_p algebras.

``hh_free`` is the closed form (HH of an exterior factor adds a divided
power class on its suspension, a polynomial factor adds an exterior one,
and HH is monoidal).  ``hh_bar_oracle`` computes the same dimensions from
the normalized Hochschild complex and is what the closed form is tested
against.
"""

from __future__ import annotations

from .algebra import (AlgebraPresentation, GeneratorSpec, Kind, Monomial,
                      PoincareSeries, PresentationError)
from .fp import Echelon


def sigma(name: str) -> str:
    return "σ" + name


def hh_free(pres: AlgebraPresentation, N: int | None = None) -> AlgebraPresentation:
    N = pres.cutoff if N is None else N
    if pres.table is not None:
        raise PresentationError("hh_free needs a free presentation")
    names = {g.name for g in pres.generators}
    new = []
    for g in pres.generators:
        if g.kind is Kind.EXTERIOR:
            kind = Kind.DIVIDED_POWER
        elif g.kind is Kind.POLYNOMIAL:
            kind = Kind.EXTERIOR
        else:
            raise PresentationError(
                f"no closed form for HH of the {g.kind.value} factor {g.name}; use hh_bar_oracle")
        s = sigma(g.name)
        if s in names:
            raise PresentationError(f"{s} already present")
        if g.degree + 1 <= N:
            new.append(GeneratorSpec(s, g.degree + 1, g.weight, kind))
    gens = tuple(g for g in pres.generators if g.degree <= N) + tuple(new)
    return AlgebraPresentation(pres.p, gens, N)


def _mul(alg, a: Monomial, b: Monomial):
    return alg.mul_monomials(a, b)


def _block_rank(imgs, p):
    # pivoting on the last index keeps fill-in low for bar-complex boundaries
    ech = Echelon(p, last=True)
    return sum(1 for v in imgs if ech.add(v))


def hh_bar_oracle(pres: AlgebraPresentation, N: int | None = None) -> PoincareSeries:
    """Dimensions of HH_k(pres) for k <= N from the normalized complex.

    A chain a0[a1|...|an] has total degree sum|ai| + n; every ai with i >= 1
    has positive degree, so each total degree is a finite complex.
    """
    N = pres.cutoff if N is None else N
    alg = pres.with_cutoff(N + 1) if pres.cutoff < N + 1 else pres
    p = alg.p
    monos = {d: alg.basis_in_degree(d) for d in range(N + 2)}

    # chains[k] = list of tuples (a0, a1, ..., an)
    chains: dict[int, list[tuple]] = {k: [] for k in range(N + 2)}

    def extend(prefix, deg):
        chains[deg].append(prefix)
        for d in range(1, N + 2 - deg - 1 + 1):
            if deg + d + 1 > N + 1:
                break
            for m in monos[d]:
                extend(prefix + (m,), deg + d + 1)

    for d0 in range(N + 2):
        for m in monos[d0]:
            extend((m,), d0)

    index = {k: {c: i for i, c in enumerate(cs)} for k, cs in chains.items()}

    def boundary(chain) -> dict:
        n = len(chain) - 1
        out: dict = {}
        if n == 0:
            return out
        degs = [alg.degree(a) for a in chain]
        # face maps d_i, i < n: multiply a_i a_{i+1}
        for i in range(n):
            sgn = -1 if i % 2 else 1
            for c, m in _mul(alg, chain[i], chain[i + 1]):
                if i > 0 and alg.degree(m) == 0:
                    continue  # degenerate in the normalized complex
                new = chain[:i] + (m,) + chain[i + 2:]
                out[new] = (out.get(new, 0) + sgn * c) % p
        # last face: a_n a_0
        moved = degs[n] * sum(degs[:n])
        for c, m in _mul(alg, chain[n], chain[0]):
            new = (m,) + chain[1:n]
            sgn = -1 if (n + moved) % 2 else 1
            out[new] = (out.get(new, 0) + sgn * c) % p
        return {k: v for k, v in out.items() if v}

    # the boundary preserves the total exponent of every slot, so the ranks
    # split over these multidegrees
    def content(chain):
        if alg.table is not None:
            return ()
        return tuple(sum(col) for col in zip(*(a[1:] for a in chain)))

    ranks = {0: 0}
    for k in range(1, N + 2):
        blocks: dict = {}
        for ch in chains[k]:
            b = boundary(ch)
            blocks.setdefault(content(ch), []).append(
                {index[k - 1][key]: v for key, v in b.items()})
        ranks[k] = sum(_block_rank(imgs, p) for imgs in blocks.values())
    dims = tuple(len(chains[k]) - ranks[k] - ranks[k + 1] for k in range(N + 1))
    return PoincareSeries(N, dims)
