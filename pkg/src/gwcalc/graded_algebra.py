"""Exact cohomology-ring arithmetic for calculator targets.

A target bundles a finite graded Q-algebra basis with its intersection
pairing, a diagonal involution action on cohomology, and the curve-class
constants the solvers read off it (first-Chern pairing, Euler
characteristic, how the involution acts on curve degrees).  Complex
projective spaces are built in; arbitrary ring data can be loaded from
JSON, mainly so the sign machinery can be exercised on odd-degree
classes.

All scalars are exact `fractions.Fraction`; basis indices are 1-based
everywhere in the public interface, and the basis is ordered by
cohomological degree with the unit first.
"""

from __future__ import annotations

import json
from fractions import Fraction


def frac_to_str(x):
    """Serialize a rational as 'p/q' (integers print without '/1')."""
    return str(Fraction(x))


def frac_from_str(s):
    """Parse 'p/q' or a bare integer string into a Fraction."""
    return Fraction(str(s))


class TargetValidationError(ValueError):
    """Raised when target ring data violates a structural requirement."""


class CohClass:
    """A cohomology class: sparse rational combination of basis elements.

    Coefficients live in ``coeffs`` as a dict mapping 1-based basis index
    to a nonzero Fraction.  Instances are tied to their target and support
    +, -, scalar multiplication and cup product via ``*``.
    """

    __slots__ = ("target", "coeffs")

    def __init__(self, target, coeffs):
        self.target = target
        self.coeffs = {i: Fraction(c) for i, c in coeffs.items() if c}

    def __bool__(self):
        return bool(self.coeffs)

    def __eq__(self, other):
        return (isinstance(other, CohClass) and self.target is other.target
                and self.coeffs == other.coeffs)

    def __hash__(self):
        return hash(frozenset(self.coeffs.items()))

    def __add__(self, other):
        out = dict(self.coeffs)
        for i, c in other.coeffs.items():
            out[i] = out.get(i, Fraction(0)) + c
        return CohClass(self.target, out)

    def __neg__(self):
        return CohClass(self.target, {i: -c for i, c in self.coeffs.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, r):
        r = Fraction(r)
        return CohClass(self.target, {i: c * r for i, c in self.coeffs.items()})

    def __mul__(self, other):
        if isinstance(other, CohClass):
            return self.target.cup(self, other)
        return self.scale(other)

    __rmul__ = scale

    def is_homogeneous(self):
        degs = {self.target.degree(i) for i in self.coeffs}
        return len(degs) <= 1

    def degree(self):
        """Cohomological degree; raises on inhomogeneous or zero classes."""
        degs = {self.target.degree(i) for i in self.coeffs}
        if len(degs) != 1:
            raise ValueError("degree of a non-homogeneous class: %r" % (self.coeffs,))
        return degs.pop()

    def __repr__(self):
        if not self.coeffs:
            return "0"
        bits = []
        for i in sorted(self.coeffs):
            bits.append("%s*e%d" % (self.coeffs[i], i))
        return " + ".join(bits)


class TargetSpace:
    """A finite graded ring with pairing and involution data.

    Fields (mirroring the JSON serialization):

    - ``name``: identifier string
    - ``complex_dim``: complex dimension n of the underlying space
    - basis degrees, cup-product structure constants, intersection pairing
    - ``involution_signs``: the diagonal action of pullback on the basis
    - ``c1_pairing``: first Chern class paired with the curve generator
    - ``degree_negation``: k with pushforward acting on curve degrees
      as d -> -k*d (so a real curve of conjugation-invariant class has
      even underlying degree when k = 1)
    - ``euler_char``: topological Euler characteristic
    - ``fixed_locus_empty``: whether the involution on the space itself
      is free (controls which real theories exist)
    """

    def __init__(self, name, complex_dim, basis_degrees, mult_table, pairing,
                 involution_signs, c1_pairing, degree_negation, euler_char,
                 fixed_locus_empty, validate=True):
        self.name = str(name)
        self.complex_dim = int(complex_dim)
        self._degs = [int(d) for d in basis_degrees]
        n = len(self._degs)
        self._mult = []
        for i in range(n):
            row = []
            for j in range(n):
                vec = mult_table[i][j]
                row.append({k + 1: Fraction(c) for k, c in enumerate(vec) if Fraction(c)})
            self._mult.append(row)
        self._pairing = [[Fraction(c) for c in row] for row in pairing]
        self._signs = [int(s) for s in involution_signs]
        self.c1_pairing = int(c1_pairing)
        self.degree_negation = int(degree_negation)
        self.euler_char = int(euler_char)
        self.fixed_locus_empty = bool(fixed_locus_empty)
        self._pairing_inv = None
        self._diag = None
        self._is_proj = None
        if validate:
            self._validate()

    # -- basic accessors (all 1-based) ----------------------------------

    @property
    def num_basis(self):
        return len(self._degs)

    def degree(self, i):
        """Cohomological degree of basis element e_i (1-based)."""
        return self._degs[i - 1]

    def sign(self, i):
        """Involution pullback sign on basis element e_i."""
        return self._signs[i - 1]

    def pairing_entry(self, i, j):
        return self._pairing[i - 1][j - 1]

    def basis_element(self, i):
        return CohClass(self, {i: Fraction(1)})

    def unit(self):
        return self.basis_element(1)

    def zero(self):
        return CohClass(self, {})

    def h(self, k):
        """k-th power of the degree-2 generator on a projective target.

        Valid for the built-in single-generator bases where e_{k+1} = h^k;
        h(0) is the unit and h(complex_dim) the point class.
        """
        if not (0 <= k <= self.complex_dim and self._degs[k] == 2 * k):
            raise ValueError("no h^%d basis element on %s" % (k, self.name))
        return self.basis_element(k + 1)

    def point_class(self):
        return self.basis_element(self.num_basis)

    # -- ring operations ------------------------------------------------

    def mult_basis(self, i, j):
        """Structure constants of e_i * e_j as a {k: Fraction} dict."""
        return self._mult[i - 1][j - 1]

    def cup(self, a, b):
        """Cup product of two classes (graded-commutative, exact)."""
        out = {}
        for i, ca in a.coeffs.items():
            for j, cb in b.coeffs.items():
                for k, c in self.mult_basis(i, j).items():
                    out[k] = out.get(k, Fraction(0)) + ca * cb * c
        return CohClass(self, out)

    def integral(self, a):
        """Pairing of a class against the fundamental class: <a, X>.

        Equals g(a, 1) with g the intersection pairing, i.e. the
        top-degree coefficient in the chosen volume normalization.
        """
        tot = Fraction(0)
        for i, c in a.coeffs.items():
            tot += c * self.pairing_entry(i, 1)
        return tot

    def pairing_value(self, a, b):
        """g(a, b) for two classes."""
        tot = Fraction(0)
        for i, ca in a.coeffs.items():
            for j, cb in b.coeffs.items():
                tot += ca * cb * self.pairing_entry(i, j)
        return tot

    def pairing_inverse(self):
        """Inverse pairing matrix as nested lists (1-based via helper).

        Raises TargetValidationError if the pairing is degenerate.
        """
        if self._pairing_inv is None:
            self._pairing_inv = _invert_rational_matrix(self._pairing)
            if self._pairing_inv is None:
                raise TargetValidationError(
                    "intersection pairing of %s is degenerate" % self.name)
        return self._pairing_inv

    def pairing_inverse_entry(self, i, j):
        return self.pairing_inverse()[i - 1][j - 1]

    def diagonal_decomposition(self):
        """Diagonal class as a list of (coefficient, (i, j)) triples.

        The coefficients are the inverse-pairing entries, so that
        sum_{ij} g^{ij} e_i <e_j * x, X> = x for every class x.  Only
        nonzero entries are listed, ordered by (i, j).
        """
        if self._diag is None:
            inv = self.pairing_inverse()
            out = []
            n = self.num_basis
            for i in range(1, n + 1):
                for j in range(1, n + 1):
                    c = inv[i - 1][j - 1]
                    if c:
                        out.append((c, (i, j)))
            self._diag = tuple(out)
        return list(self._diag)

    def apply_involution(self, a):
        """Pullback of a class along the involution (diagonal action)."""
        return CohClass(self, {i: c * self.sign(i) for i, c in a.coeffs.items()})

    def plus_minus_decompose(self, a):
        """Split a class into (plus, minus) eigenparts of the pullback."""
        plus = {i: c for i, c in a.coeffs.items() if self.sign(i) == 1}
        minus = {i: c for i, c in a.coeffs.items() if self.sign(i) == -1}
        return CohClass(self, plus), CohClass(self, minus)

    def is_projective_space(self):
        """Structural check for the single-generator projective ring shape.

        True when the basis is 1, h, ..., h^n with h^i * h^j = h^{i+j}
        (zero past the top), the pairing is the anti-diagonal unit matrix,
        and the curve constants match (c1 = n+1, Euler characteristic
        n+1).  The solver modules only accept such targets.
        """
        if self._is_proj is None:
            self._is_proj = self._projective_check()
        return self._is_proj

    def _projective_check(self):
        n = self.complex_dim
        N = self.num_basis
        if N != n + 1 or self._degs != [2 * k for k in range(N)]:
            return False
        for i in range(1, N + 1):
            for j in range(1, N + 1):
                k = i + j - 1
                expect = {k: Fraction(1)} if k <= N else {}
                if self.mult_basis(i, j) != expect:
                    return False
                want = Fraction(1) if i + j == N + 1 else Fraction(0)
                if self.pairing_entry(i, j) != want:
                    return False
        if self.c1_pairing != n + 1 or self.euler_char != n + 1:
            return False
        if self.degree_negation != 1:
            return False
        return True

    # -- validation -----------------------------------------------------

    def _validate(self):
        n = self.num_basis
        if n == 0:
            raise TargetValidationError("empty basis")
        if len(self._signs) != n or len(self._pairing) != n or len(self._mult) != n:
            raise TargetValidationError("basis data of inconsistent lengths")
        for row in self._pairing:
            if len(row) != n:
                raise TargetValidationError("pairing matrix is not square")
        if any(s not in (1, -1) for s in self._signs):
            raise TargetValidationError("involution signs must be +1 or -1")
        if self._degs != sorted(self._degs) or self._degs[0] != 0:
            raise TargetValidationError(
                "basis must be ordered by degree with the unit (degree 0) first")
        if any(d < 0 for d in self._degs):
            raise TargetValidationError("negative cohomological degree")
        # e_1 is the unit.
        for i in range(1, n + 1):
            for (a, b) in ((1, i), (i, 1)):
                prod = self.mult_basis(a, b)
                if prod != {i: Fraction(1)}:
                    raise TargetValidationError(
                        "e_1 is not a two-sided unit (e_%d * e_%d)" % (a, b))
        top = 2 * self.complex_dim
        for i in range(1, n + 1):
            di = self.degree(i)
            for j in range(1, n + 1):
                dj = self.degree(j)
                # graded commutativity and degree additivity of the product
                prod = self.mult_basis(i, j)
                flip = self.mult_basis(j, i)
                sgn = -1 if (di % 2 and dj % 2) else 1
                if prod != {k: sgn * c for k, c in flip.items()}:
                    raise TargetValidationError(
                        "cup product not graded-commutative at (%d, %d)" % (i, j))
                for k in prod:
                    if self.degree(k) != di + dj:
                        raise TargetValidationError(
                            "cup product not graded at (%d, %d)" % (i, j))
                # pairing: graded-symmetric, supported in complementary degree
                gij = self.pairing_entry(i, j)
                gji = self.pairing_entry(j, i)
                if gij != sgn * gji:
                    raise TargetValidationError(
                        "pairing not graded-symmetric at (%d, %d)" % (i, j))
                if gij and di + dj != top:
                    raise TargetValidationError(
                        "pairing supported outside complementary degrees")
                # involution is a ring map and interacts with the pairing
                # through a global sign fixed by the dimension
                si, sj = self.sign(i), self.sign(j)
                for k in prod:
                    if self.sign(k) != si * sj:
                        raise TargetValidationError(
                            "involution signs are not multiplicative at (%d, %d)" % (i, j))
                if gij and si * sj != (-1) ** self.complex_dim:
                    raise TargetValidationError(
                        "involution signs incompatible with the pairing at (%d, %d)"
                        % (i, j))
        if n <= 8:
            for i in range(1, n + 1):
                for j in range(1, n + 1):
                    for k in range(1, n + 1):
                        left = self.cup(self.cup(self.basis_element(i),
                                                 self.basis_element(j)),
                                        self.basis_element(k))
                        right = self.cup(self.basis_element(i),
                                         self.cup(self.basis_element(j),
                                                  self.basis_element(k)))
                        if left != right:
                            raise TargetValidationError(
                                "cup product not associative at (%d, %d, %d)"
                                % (i, j, k))

    # -- serialization --------------------------------------------------

    def to_json(self):
        """Serialize to the documented JSON dict (rationals as 'p/q')."""
        n = self.num_basis
        return {
            "name": self.name,
            "complex_dim": self.complex_dim,
            "basis_degrees": list(self._degs),
            "mult_table": [[[frac_to_str(self._mult[i][j].get(k + 1, Fraction(0)))
                             for k in range(n)]
                            for j in range(n)]
                           for i in range(n)],
            "pairing": [[frac_to_str(c) for c in row] for row in self._pairing],
            "involution_signs": list(self._signs),
            "c1_pairing": self.c1_pairing,
            "degree_negation": self.degree_negation,
            "euler_char": self.euler_char,
            "fixed_locus_empty": self.fixed_locus_empty,
        }

    @classmethod
    def from_json(cls, data, validate=True):
        """Build a target from its JSON dict (inverse of to_json).

        ``involution_signs`` may also be a full square matrix; only a
        diagonal one is accepted (converted to the sign list).
        """
        signs = data["involution_signs"]
        if signs and isinstance(signs[0], (list, tuple)):
            n = len(signs)
            diag = []
            for i in range(n):
                for j in range(n):
                    v = Fraction(str(signs[i][j]))
                    if i == j:
                        diag.append(int(v))
                    elif v:
                        raise TargetValidationError(
                            "only diagonal involution actions are supported")
            signs = diag
        return cls(
            name=data["name"],
            complex_dim=data["complex_dim"],
            basis_degrees=data["basis_degrees"],
            mult_table=[[[frac_from_str(c) for c in vec] for vec in row]
                        for row in data["mult_table"]],
            pairing=[[frac_from_str(c) for c in row] for row in data["pairing"]],
            involution_signs=signs,
            c1_pairing=data["c1_pairing"],
            degree_negation=data["degree_negation"],
            euler_char=data["euler_char"],
            fixed_locus_empty=data["fixed_locus_empty"],
            validate=validate,
        )

    def dumps(self):
        return json.dumps(self.to_json(), sort_keys=True)

    @classmethod
    def loads(cls, text, validate=True):
        return cls.from_json(json.loads(text), validate=validate)

    def __eq__(self, other):
        return isinstance(other, TargetSpace) and self.to_json() == other.to_json()

    def __hash__(self):
        return hash(self.dumps())

    def __repr__(self):
        return "TargetSpace(%s)" % self.name


def _invert_rational_matrix(m):
    """Exact inverse of a square Fraction matrix, or None if singular."""
    n = len(m)
    a = [list(row) + [Fraction(int(i == j)) for j in range(n)]
         for i, row in enumerate(m)]
    for col in range(n):
        piv = None
        for r in range(col, n):
            if a[r][col]:
                piv = r
                break
        if piv is None:
            return None
        a[col], a[piv] = a[piv], a[col]
        inv = Fraction(1) / a[col][col]
        a[col] = [x * inv for x in a[col]]
        for r in range(n):
            if r != col and a[r][col]:
                f = a[r][col]
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
    return [row[n:] for row in a]


def make_projective(m, involution):
    """Build complex projective space P^{2m-1} with a real structure.

    ``involution`` is "tau" (the standard conjugation, real points form
    RP^{2m-1}) or "eta" (the free quaternionic-type involution, empty
    fixed locus).  Both act on h^k by (-1)^k, which is forced by the
    pushforward acting on the curve generator as L -> -L together with
    invariance of the intersection pairing.  Odd complex dimension keeps
    the curve-degree negation consistent, so m >= 1.
    """
    if not isinstance(m, int) or m < 1:
        raise ValueError("make_projective needs an integer m >= 1")
    if involution not in ("tau", "eta"):
        raise ValueError("involution must be 'tau' or 'eta'")
    n = 2 * m - 1
    N = n + 1
    mult = [[[Fraction(int(i + j == k)) for k in range(N)]
             for j in range(N)] for i in range(N)]
    pairing = [[Fraction(int(i + j == N - 1)) for j in range(N)] for i in range(N)]
    return TargetSpace(
        name="P%d-%s" % (n, involution),
        complex_dim=n,
        basis_degrees=[2 * k for k in range(N)],
        mult_table=mult,
        pairing=pairing,
        involution_signs=[(-1) ** k for k in range(N)],
        c1_pairing=N,
        degree_negation=1,
        euler_char=N,
        fixed_locus_empty=(involution == "eta"),
    )


def make_p2():
    """Complex projective plane with its standard conjugation.

    Used as the complex-theory workhorse; its real theory is not driven
    by the solvers here (the curve-degree bookkeeping of the real
    recursion needs the odd-dimensional setup), so the involution data
    is carried but only the complex side is exercised.
    """
    n = 2
    N = 3
    mult = [[[Fraction(int(i + j == k)) for k in range(N)]
             for j in range(N)] for i in range(N)]
    pairing = [[Fraction(int(i + j == N - 1)) for j in range(N)] for i in range(N)]
    return TargetSpace(
        name="P2",
        complex_dim=n,
        basis_degrees=[0, 2, 4],
        mult_table=mult,
        pairing=pairing,
        involution_signs=[1, -1, 1],
        c1_pairing=3,
        degree_negation=1,
        euler_char=3,
        fixed_locus_empty=False,
    )


_BUILTIN_FACTORIES = {
    "P2": make_p2,
    "P1-tau": lambda: make_projective(1, "tau"),
    "P3-tau": lambda: make_projective(2, "tau"),
    "P3-eta": lambda: make_projective(2, "eta"),
    "P5-tau": lambda: make_projective(3, "tau"),
    "P5-eta": lambda: make_projective(3, "eta"),
    "P7-tau": lambda: make_projective(4, "tau"),
    "P7-eta": lambda: make_projective(4, "eta"),
}


def builtin_target(name):
    """Look up a built-in target by CLI name (P2, P3-tau, P5-eta, ...)."""
    try:
        factory = _BUILTIN_FACTORIES[name]
    except KeyError:
        raise KeyError("unknown target %r (known: %s)"
                       % (name, ", ".join(sorted(_BUILTIN_FACTORIES))))
    return factory()


def builtin_target_names():
    return sorted(_BUILTIN_FACTORIES)
