"""Graded noncommutative rewriting to PBW normal form.

Three presentations are supported:

* ``deformed``  -- generators Y < V- < H < V+ < X with the deformed
  commutation relations (sinh/cosh factors expanded as truncated series in h,
  so every rule coefficient is a polynomial in h).
* ``classical`` -- generators J- < v- < J0 < v+ < J+ of osp(2/1).
* ``borel``     -- generators H < X < V+ with the deformed relations,
  normal-ordered as H^k X^l V+^m (used by the duality layer).

A PBW monomial is stored as a tuple of exponents under the fixed generator
order; odd generators carry exponent at most 1 (squares reduce through the
presentation's square rules).  Elements are immutable dictionaries from
monomials to HSeries coefficients with no zero coefficients stored.

Rewriting works one generator at a time: the product of a normal monomial
with a single generator is computed by one pair rule at the junction and is
memoized per presentation.  Confluence is not assumed; it is certified by the
associativity fuzz suite in the tests.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Dict, Iterable, List, Sequence, Tuple

from .scalars import DEFAULT_ORDER, HSeries

Mono = Tuple[int, ...]          # exponent vector under the PBW generator order
Terms = Dict[Mono, HSeries]
Rule = List[Tuple[Tuple[int, ...], HSeries]]   # replacement words (gen indices)

EVEN, ODD = 0, 1


class AlphabetMismatch(ValueError):
    """Raised when elements of different presentations are combined."""


class NonHomogeneous(ValueError):
    """Raised when an operation requires a parity-homogeneous element."""


def _merge(dst: Terms, src: Terms, factor: HSeries = None) -> None:
    for m, c in src.items():
        cc = c if factor is None else c * factor
        if m in dst:
            s = dst[m] + cc
            if s.is_zero():
                del dst[m]
            else:
                dst[m] = s
        elif not cc.is_zero():
            dst[m] = cc


class Presentation:
    """Generator data plus the adjacent-pair rewrite table for one alphabet."""

    def __init__(self, name: str, gens: Sequence[str], parities: Dict[str, int],
                 word_rules: Dict[Tuple[str, str], Dict[Tuple[str, ...], HSeries]],
                 order: int):
        self.name = name
        self.gens = tuple(gens)
        self.ngens = len(gens)
        self.index = {g: i for i, g in enumerate(gens)}
        self.parity = dict(parities)
        self.parity_vec = tuple(parities[g] for g in gens)
        self.order = order
        # compile rules: (hi_index, lo_index) -> [(replacement index word, coeff)]
        self.rules: Dict[Tuple[int, int], Rule] = {}
        for (a, b), table in word_rules.items():
            key = (self.index[a], self.index[b])
            self.rules[key] = [
                (tuple(self.index[g] for g in w), c) for w, c in table.items()
            ]
        self.unit_mono: Mono = (0,) * self.ngens
        self._mul_memo: Dict[Tuple[Mono, int], Terms] = {}
        self._pair_memo: Dict[Tuple[Mono, Mono], Terms] = {}

    # -- monomial helpers ---------------------------------------------------

    def mono_parity(self, mono: Mono) -> int:
        return sum(e * p for e, p in zip(mono, self.parity_vec)) % 2

    def mono_word(self, mono: Mono) -> Tuple[str, ...]:
        out: List[str] = []
        for g, e in zip(self.gens, mono):
            out.extend([g] * e)
        return tuple(out)

    def word_mono(self, word: Iterable[str]) -> Mono:
        """Exponent tuple of an already normal-ordered word."""
        m = [0] * self.ngens
        prev = -1
        for g in word:
            i = self.index[g]
            if i < prev:
                raise ValueError(f"word {tuple(word)} is not normal-ordered")
            prev = i
            m[i] += 1
        return tuple(m)

    # -- rewriting ----------------------------------------------------------

    def _times_gen(self, mono: Mono, gi: int) -> Terms:
        """Normal form of (normal monomial) * generator, memoized."""
        key = (mono, gi)
        memo = self._mul_memo
        hit = memo.get(key)
        if hit is not None:
            return hit
        # highest-index generator present in mono
        j = -1
        for k in range(self.ngens - 1, -1, -1):
            if mono[k]:
                j = k
                break
        if j < gi or (j == gi and self.parity_vec[gi] == EVEN):
            m = list(mono)
            m[gi] += 1
            res = {tuple(m): HSeries.one(self.order)}
            memo[key] = res
            return res
        # violation: strip one factor of gens[j] and apply the pair rule
        prefix = list(mono)
        prefix[j] -= 1
        prefix_m = tuple(prefix)
        rule = self.rules[(j, gi)]
        out: Terms = {}
        for repl, c in rule:
            acc: Terms = {prefix_m: c}
            for letter in repl:
                nxt: Terms = {}
                for m, cc in acc.items():
                    _merge(nxt, self._times_gen(m, letter), cc)
                acc = nxt
            _merge(out, acc)
        memo[key] = out
        return out

    def _times_word(self, terms: Terms, letters: Sequence[int]) -> Terms:
        acc = terms
        for letter in letters:
            nxt: Terms = {}
            for m, c in acc.items():
                _merge(nxt, self._times_gen(m, letter), c)
            acc = nxt
        return acc

    def nf_word(self, word: Iterable[str]) -> Terms:
        letters = [self.index[g] for g in word]
        return self._times_word({self.unit_mono: HSeries.one(self.order)}, letters)

    def _mono_letters(self, mono: Mono) -> List[int]:
        out: List[int] = []
        for i, e in enumerate(mono):
            out.extend([i] * e)
        return out

    def mono_mul(self, m1: Mono, m2: Mono) -> Terms:
        """Normal form of the product of two normal monomials, memoized."""
        key = (m1, m2)
        hit = self._pair_memo.get(key)
        if hit is not None:
            return hit
        res = self._times_word({m1: HSeries.one(self.order)},
                               self._mono_letters(m2))
        self._pair_memo[key] = res
        return res

    def mul_terms(self, t1: Terms, t2: Terms) -> Terms:
        """Product of two normal-form term dictionaries."""
        out: Terms = {}
        for m1, c1 in t1.items():
            for m2, c2 in t2.items():
                c = c1 * c2
                if not c.is_zero():
                    _merge(out, self.mono_mul(m1, m2), c)
        return out

    # -- element constructors ------------------------------------------------

    def zero(self) -> "Element":
        return Element(self, {})

    def one(self) -> "Element":
        return Element(self, {self.unit_mono: HSeries.one(self.order)})

    def gen(self, name: str) -> "Element":
        if name not in self.index:
            raise AlphabetMismatch(f"{name} is not a generator of {self.name}")
        m = list(self.unit_mono)
        m[self.index[name]] = 1
        return Element(self, {tuple(m): HSeries.one(self.order)})

    def from_word(self, word: Iterable[str], coeff=1) -> "Element":
        word = tuple(word)
        for g in word:
            if g not in self.index:
                raise AlphabetMismatch(f"{g} is not a generator of {self.name}")
        c = coeff if isinstance(coeff, HSeries) else HSeries.const(coeff, self.order)
        if c.is_zero():
            return self.zero()
        letters = [self.index[g] for g in word]
        return Element(self, self._times_word({self.unit_mono: c}, letters))

    def element(self, terms: Terms) -> "Element":
        return Element(self, {m: c for m, c in terms.items() if not c.is_zero()})


class Element:
    """Finite linear combination of PBW monomials over HSeries. Immutable."""

    __slots__ = ("pres", "terms")

    def __init__(self, pres: Presentation, terms: Terms):
        self.pres = pres
        self.terms = terms

    def _check(self, other: "Element") -> None:
        if self.pres is not other.pres:
            raise AlphabetMismatch(
                f"mixed alphabets: {self.pres.name} vs {other.pres.name}"
            )

    def __add__(self, other: "Element") -> "Element":
        self._check(other)
        out = dict(self.terms)
        _merge(out, other.terms)
        return Element(self.pres, out)

    def __neg__(self) -> "Element":
        return Element(self.pres, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other: "Element") -> "Element":
        return self + (-other)

    def scale(self, c) -> "Element":
        if not isinstance(c, HSeries):
            c = HSeries.const(c, self.pres.order)
        if c.is_zero():
            return Element(self.pres, {})
        out = {}
        for m, v in self.terms.items():
            cv = v * c
            if not cv.is_zero():
                out[m] = cv
        return Element(self.pres, out)

    def __mul__(self, other: "Element") -> "Element":
        self._check(other)
        return Element(self.pres, self.pres.mul_terms(self.terms, other.terms))

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other):
        if not isinstance(other, Element):
            return NotImplemented
        return self.pres is other.pres and self.terms == other.terms

    def __hash__(self):
        return hash((id(self.pres), frozenset(self.terms.items())))

    def parity(self) -> int:
        """Parity of a homogeneous element; raises for mixed parities."""
        ps = {self.pres.mono_parity(m) for m in self.terms}
        if not ps:
            return EVEN
        if len(ps) > 1:
            raise NonHomogeneous("element mixes even and odd monomials")
        return ps.pop()

    def is_homogeneous(self) -> bool:
        return len({self.pres.mono_parity(m) for m in self.terms}) <= 1

    def truncate(self, k: int) -> "Element":
        """Drop all h powers above k in every coefficient."""
        out = {}
        for m, c in self.terms.items():
            t = c.truncate(k)
            if not t.is_zero():
                out[m] = t
        return Element(self.pres, out)

    def coefficient(self, word: Iterable[str]) -> HSeries:
        """Coefficient of a normal-ordered monomial, given as a letter word."""
        m = self.pres.word_mono(word)
        return self.terms.get(m, HSeries.zero(self.pres.order))

    def map_coeffs(self, fn) -> "Element":
        out = {}
        for m, c in self.terms.items():
            v = fn(c)
            if not v.is_zero():
                out[m] = v
        return Element(self.pres, out)

    def exp(self) -> "Element":
        """exp of an element all of whose coefficients vanish at h=0."""
        for c in self.terms.values():
            if c.at_h0() != 0:
                raise ValueError("exp requires an O(h) element")
        acc = self.pres.one()
        term = self.pres.one()
        for k in range(1, self.pres.order + 1):
            term = (term * self).scale(Fraction(1, k))
            if term.is_zero():
                break
            acc = acc + term
        return acc

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for m in sorted(self.terms):
            c = self.terms[m]
            word = self.pres.mono_word(m)
            mono = "*".join(word) if word else "1"
            parts.append(f"({c})*{mono}" if word else f"({c})")
        return " + ".join(parts)

    __repr__ = __str__


# ---------------------------------------------------------------------------
# Rule tables
# ---------------------------------------------------------------------------

DEFORMED_GENS = ("Y", "V-", "H", "V+", "X")
CLASSICAL_GENS = ("J-", "v-", "J0", "v+", "J+")
BOREL_GENS = ("H", "X", "V+")

DEFORMED_PARITY = {"Y": EVEN, "V-": ODD, "H": EVEN, "V+": ODD, "X": EVEN}
CLASSICAL_PARITY = {"J-": EVEN, "v-": ODD, "J0": EVEN, "v+": ODD, "J+": EVEN}
BOREL_PARITY = {"H": EVEN, "X": EVEN, "V+": ODD}

RENAME_TO_CLASSICAL = {"H": "J0", "X": "J+", "Y": "J-", "V+": "v+", "V-": "v-"}
RENAME_TO_DEFORMED = {v: k for k, v in RENAME_TO_CLASSICAL.items()}

WordTerms = Dict[Tuple[str, ...], HSeries]


def _wmerge(dst: WordTerms, src: WordTerms) -> None:
    for w, c in src.items():
        if w in dst:
            dst[w] = dst[w] + c
        else:
            dst[w] = c


def _cosh_words(pre: str, post: str, order: int, scale: Fraction) -> WordTerms:
    """scale * pre . cosh(hX) . post expanded in words (pre/post may be '')."""
    out: WordTerms = {}
    for k in range(0, order + 1, 2):
        w = (tuple([pre] if pre else []) + ("X",) * k
             + tuple([post] if post else []))
        out[w] = HSeries.h_power(k, Fraction(scale, math.factorial(k)), order)
    return out


def _sinh_over_h_words(order: int, scale: Fraction) -> WordTerms:
    """scale * sinh(hX)/h expanded in words X^k with h-polynomial coefficients."""
    out: WordTerms = {}
    for k in range(1, order + 2, 2):
        out[("X",) * k] = HSeries.h_power(k - 1, Fraction(scale, math.factorial(k)), order)
    return out


def _h_sinh_words(pre: str, post: str, order: int, scale: Fraction) -> WordTerms:
    """scale * h * pre . sinh(hX) . post expanded in words."""
    out: WordTerms = {}
    for k in range(1, order, 2):
        w = (pre,) + ("X",) * k + (post,)
        out[w] = HSeries.h_power(k + 1, Fraction(scale, math.factorial(k)), order)
    return out


def _one_term(word: Tuple[str, ...], order: int, c=1) -> WordTerms:
    return {word: HSeries.const(c, order)}


def _build_deformed_rules(order: int) -> Dict[Tuple[str, str], WordTerms]:
    half = Fraction(1, 2)
    quarter = Fraction(1, 4)
    rules: Dict[Tuple[str, str], WordTerms] = {}

    # [Y, V-] = 0
    rules[("V-", "Y")] = _one_term(("Y", "V-"), order)
    # H*Y = Y*H + [H,Y]
    r: WordTerms = {}
    _wmerge(r, _one_term(("Y", "H"), order))
    _wmerge(r, _cosh_words("Y", "", order, -half))
    _wmerge(r, _cosh_words("", "Y", order, -half))
    _wmerge(r, _h_sinh_words("V-", "V+", order, Fraction(1)))
    _wmerge(r, _h_sinh_words("V+", "V-", order, Fraction(-1)))
    rules[("H", "Y")] = r
    # H*V- = V-*H + [H,V-]
    r = {}
    _wmerge(r, _one_term(("V-", "H"), order))
    _wmerge(r, _cosh_words("V-", "", order, -quarter))
    _wmerge(r, _cosh_words("", "V-", order, -quarter))
    rules[("H", "V-")] = r
    # V+*Y = Y*V+ - [Y,V+]
    r = {}
    _wmerge(r, _one_term(("Y", "V+"), order))
    _wmerge(r, _cosh_words("V-", "", order, -half))
    _wmerge(r, _cosh_words("", "V-", order, -half))
    rules[("V+", "Y")] = r
    # V+*V- = -(1/2)H - V-*V+
    rules[("V+", "V-")] = {
        ("H",): HSeries.const(-half, order),
        ("V-", "V+"): HSeries.const(-1, order),
    }
    # V+*H = H*V+ - [H,V+]
    r = {}
    _wmerge(r, _one_term(("H", "V+"), order))
    _wmerge(r, _cosh_words("V+", "", order, -half))
    rules[("V+", "H")] = r
    # X*Y = Y*X + 2H
    rules[("X", "Y")] = {("Y", "X"): HSeries.one(order),
                         ("H",): HSeries.const(2, order)}
    # X*V- = V-*X + V+
    rules[("X", "V-")] = {("V-", "X"): HSeries.one(order),
                          ("V+",): HSeries.one(order)}
    # X*H = H*X - sinh(hX)/h
    r = {}
    _wmerge(r, _one_term(("H", "X"), order))
    _wmerge(r, _sinh_over_h_words(order, Fraction(-1)))
    rules[("X", "H")] = r
    # [X, V+] = 0
    rules[("X", "V+")] = _one_term(("V+", "X"), order)
    # V+^2 = sinh(hX)/(4h)
    rules[("V+", "V+")] = _sinh_over_h_words(order, quarter)
    # V-^2 = -(1/4)Y
    rules[("V-", "V-")] = {("Y",): HSeries.const(-quarter, order)}
    return rules


def _build_classical_rules(order: int) -> Dict[Tuple[str, str], WordTerms]:
    half = Fraction(1, 2)
    one = HSeries.one(order)
    return {
        ("v-", "J-"): _one_term(("J-", "v-"), order),
        ("J0", "J-"): {("J-", "J0"): one, ("J-",): HSeries.const(-1, order)},
        ("J0", "v-"): {("v-", "J0"): one, ("v-",): HSeries.const(-half, order)},
        ("v+", "J-"): {("J-", "v+"): one, ("v-",): HSeries.const(-1, order)},
        ("v+", "v-"): {("J0",): HSeries.const(-half, order),
                       ("v-", "v+"): HSeries.const(-1, order)},
        ("v+", "J0"): {("J0", "v+"): one, ("v+",): HSeries.const(-half, order)},
        ("J+", "J-"): {("J-", "J+"): one, ("J0",): HSeries.const(2, order)},
        ("J+", "v-"): {("v-", "J+"): one, ("v+",): one},
        ("J+", "J0"): {("J0", "J+"): one, ("J+",): HSeries.const(-1, order)},
        ("J+", "v+"): _one_term(("v+", "J+"), order),
        ("v+", "v+"): {("J+",): HSeries.const(Fraction(1, 4), order)},
        ("v-", "v-"): {("J-",): HSeries.const(Fraction(-1, 4), order)},
    }


def _build_borel_rules(order: int) -> Dict[Tuple[str, str], WordTerms]:
    rules: Dict[Tuple[str, str], WordTerms] = {}
    # X*H = H*X - sinh(hX)/h
    r: WordTerms = {}
    _wmerge(r, _one_term(("H", "X"), order))
    _wmerge(r, _sinh_over_h_words(order, Fraction(-1)))
    rules[("X", "H")] = r
    # V+*H = H*V+ - (1/2) V+ cosh(hX)  (X commutes with V+; keep X powers left)
    r = {}
    _wmerge(r, _one_term(("H", "V+"), order))
    _wmerge(r, _cosh_words("", "V+", order, Fraction(-1, 2)))
    rules[("V+", "H")] = r
    rules[("V+", "X")] = _one_term(("X", "V+"), order)
    rules[("V+", "V+")] = _sinh_over_h_words(order, Fraction(1, 4))
    return rules


_PRES_CACHE: Dict[Tuple[str, int], Presentation] = {}


def presentation(name: str, order: int = DEFAULT_ORDER) -> Presentation:
    """Shared presentation instance for (alphabet, truncation order)."""
    key = (name, order)
    if key in _PRES_CACHE:
        return _PRES_CACHE[key]
    if name == "deformed":
        p = Presentation(name, DEFORMED_GENS, DEFORMED_PARITY,
                         _build_deformed_rules(order), order)
    elif name == "classical":
        p = Presentation(name, CLASSICAL_GENS, CLASSICAL_PARITY,
                         _build_classical_rules(order), order)
    elif name == "borel":
        p = Presentation(name, BOREL_GENS, BOREL_PARITY,
                         _build_borel_rules(order), order)
    else:
        raise ValueError(f"unknown presentation {name!r}")
    _PRES_CACHE[key] = p
    return p


def super_bracket(a: Element, b: Element) -> Element:
    """ab - (-1)^(p(a)p(b)) ba for parity-homogeneous a, b."""
    sign = (-1) ** (a.parity() * b.parity())
    return a * b - (b * a).scale(sign)


def series_of_X(lam, order: int = DEFAULT_ORDER, pres: Presentation = None) -> Element:
    """exp(lam*h*X) truncated: sum_k (lam h)^k X^k / k!."""
    p = pres or presentation("deformed", order)
    lam = Fraction(lam)
    xi = p.index["X"]
    terms: Terms = {}
    for k in range(p.order + 1):
        c = HSeries.h_power(k, lam ** k / math.factorial(k), p.order)
        if not c.is_zero():
            m = [0] * p.ngens
            m[xi] = k
            terms[tuple(m)] = c
    return Element(p, terms)


def classical_limit(el: Element) -> Element:
    """h -> 0 with generator renaming (H,X,Y,V+,V-) -> (J0,J+,J-,v+,v-)."""
    if el.pres.name != "deformed":
        raise AlphabetMismatch("classical_limit expects a deformed element")
    cp = presentation("classical", el.pres.order)
    out = cp.zero()
    for m, c in el.terms.items():
        c0 = c.at_h0()
        if c0 == 0:
            continue
        word = tuple(RENAME_TO_CLASSICAL[g] for g in el.pres.mono_word(m))
        out = out + cp.from_word(word, c0)
    return out
