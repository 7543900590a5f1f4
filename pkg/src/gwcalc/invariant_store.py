"""Canonical invariant keys, memoized tables, and file persistence.

A key pins down one curve count: complex or real theory, genus, curve
degree, and a multiset of insertions tau_a(e_b) recorded as (a, basis
index) pairs.  Canonicalization sorts insertions by (a, basis index) and
carries the Koszul sign of the sort separately (trivial on the all-even
projective bases, exercised on synthetic odd-degree rings).  The
normalizer also expands general classes by multilinearity and drops
real-theory insertions whose eigenspace parity forces the invariant to
vanish, so structurally zero entries never reach a table.

Tables map keys to exact rationals with a provenance tag per entry and
persist to a versioned JSON file; a conflicting put is a fatal error
(the relation systems are overdetermined, and a conflict means an
inconsistency a verifier must see).
"""

from __future__ import annotations

import json
import os
import tempfile
import threading
from fractions import Fraction

from .graded_algebra import CohClass, TargetSpace, frac_from_str, frac_to_str

COMPLEX = "complex"
REAL = "real"
KINDS = (COMPLEX, REAL)

PROVENANCE_TAGS = ("seed", "classical", "wdvv", "rwdvv", "trr", "rtrr",
                   "axiom-reduction")

SCHEMA_VERSION = 1

CACHE_ENV_VAR = "GWCALC_CACHE"


class StoreConflictError(RuntimeError):
    """A put tried to overwrite an existing key with a different value."""


class StoreFormatError(ValueError):
    """A cache file failed schema or target validation."""


class InvariantKey:
    """Immutable canonical identifier of a single invariant."""

    __slots__ = ("kind", "genus", "degree", "insertions", "_hash")

    def __init__(self, kind, genus, degree, insertions):
        if kind not in KINDS:
            raise ValueError("kind must be one of %r" % (KINDS,))
        if genus < 0:
            raise ValueError("genus must be nonnegative")
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "genus", int(genus))
        object.__setattr__(self, "degree", int(degree))
        ins = tuple((int(a), int(b)) for a, b in insertions)
        for a, b in ins:
            if a < 0 or b < 1:
                raise ValueError("bad insertion (%d, %d)" % (a, b))
        object.__setattr__(self, "insertions", ins)
        object.__setattr__(self, "_hash",
                           hash((kind, genus, degree, ins)))

    def __setattr__(self, name, value):
        raise AttributeError("InvariantKey is immutable")

    def is_canonical(self):
        return list(self.insertions) == sorted(self.insertions)

    def canonical(self):
        return InvariantKey(self.kind, self.genus, self.degree,
                            sorted(self.insertions))

    @property
    def num_insertions(self):
        return len(self.insertions)

    def total_descendant_power(self):
        return sum(a for a, _ in self.insertions)

    def sort_key(self):
        return (self.kind, self.degree, self.genus, len(self.insertions),
                self.insertions)

    def __eq__(self, other):
        return (isinstance(other, InvariantKey)
                and self.kind == other.kind and self.genus == other.genus
                and self.degree == other.degree
                and self.insertions == other.insertions)

    def __hash__(self):
        return self._hash

    def __repr__(self):
        ins = ", ".join("t%d(e%d)" % (a, b) for a, b in self.insertions)
        return "<%s g=%d d=%d | %s>" % (self.kind, self.genus, self.degree, ins)

    def to_json(self):
        return {
            "kind": self.kind,
            "genus": self.genus,
            "degree": self.degree,
            "insertions": [{"a": a, "basis": b} for a, b in self.insertions],
        }

    @classmethod
    def from_json(cls, data):
        return cls(data["kind"], data["genus"], data["degree"],
                   [(ins["a"], ins["basis"]) for ins in data["insertions"]])


def real_insertion_vanishes(target, a, basis):
    """Parity vanishing of a real-theory insertion tau_a(e_basis).

    An insertion survives only when the involution eigenvalue of its
    class is (-1)**(a+1); the complementary parity forces the invariant
    to vanish identically.
    """
    return target.sign(basis) == (-1) ** a


def normalize(target, kind, genus, degree, raw_insertions):
    """Expand and canonicalize a raw insertion list.

    ``raw_insertions`` is an iterable of (a, cls) with cls either a
    1-based basis index or a CohClass (expanded by multilinearity).
    Returns a list of (coefficient, InvariantKey) pairs, sorted by key;
    coefficients carry the Koszul signs of sorting the insertions into
    canonical (a, basis) order.  For ``real`` kind, parity-vanishing
    expansion branches are dropped eagerly.
    """
    expanded = [(Fraction(1), [])]
    for a, cls in raw_insertions:
        a = int(a)
        if isinstance(cls, CohClass):
            terms = sorted(cls.coeffs.items())
        else:
            terms = [(int(cls), Fraction(1))]
        nxt = []
        for coeff, ins in expanded:
            for basis, c in terms:
                if not c:
                    continue
                nxt.append((coeff * c, ins + [(a, basis)]))
        expanded = nxt

    out = {}
    for coeff, ins in expanded:
        if kind == REAL and any(real_insertion_vanishes(target, a, b)
                                for a, b in ins):
            continue
        sorted_ins, sign = _sort_with_sign(target, ins)
        key = InvariantKey(kind, genus, degree, sorted_ins)
        out[key] = out.get(key, Fraction(0)) + coeff * sign
    items = [(c, k) for k, c in out.items() if c]
    items.sort(key=lambda t: t[1].sort_key())
    return items


def _sort_with_sign(target, insertions):
    """Sort (a, basis) pairs, counting odd-odd crossings of the sort."""
    items = list(insertions)
    exp = 0
    for i in range(1, len(items)):
        cur = items[i]
        cur_odd = target.degree(cur[1]) % 2
        j = i - 1
        while j >= 0 and items[j] > cur:
            items[j + 1] = items[j]
            if cur_odd and target.degree(items[j][1]) % 2:
                exp += 1
            j -= 1
        items[j + 1] = cur
    return items, (-1 if exp % 2 else 1)


class InvariantTable:
    """Mapping from canonical keys to exact values with provenance.

    Thread-safe for concurrent readers with exclusive writers; content
    for a fixed target, seed and degree bound is deterministic and
    independent of fill order (conflicting fills abort).
    """

    def __init__(self, target, seed_sign=1):
        if seed_sign not in (1, -1):
            raise ValueError("seed_sign must be +1 or -1")
        self.target = target
        self.seed_sign = seed_sign
        self._entries = {}
        self._lock = threading.Lock()

    def __len__(self):
        return len(self._entries)

    def __contains__(self, key):
        return key in self._entries

    def get(self, key):
        entry = self._entries.get(key)
        return entry[0] if entry is not None else None

    def provenance(self, key):
        entry = self._entries.get(key)
        return entry[1] if entry is not None else None

    def put(self, key, value, provenance):
        if provenance not in PROVENANCE_TAGS:
            raise ValueError("unknown provenance %r" % (provenance,))
        if not key.is_canonical():
            raise ValueError("put of non-canonical key %r" % (key,))
        value = Fraction(value)
        with self._lock:
            old = self._entries.get(key)
            if old is not None:
                if old[0] != value:
                    raise StoreConflictError(
                        "conflicting values for %r: %s (from %s) vs %s (from %s)"
                        % (key, old[0], old[1], value, provenance))
                return
            self._entries[key] = (value, provenance)

    def items(self):
        """Entries as (key, value, provenance), deterministically ordered."""
        out = [(k, v, p) for k, (v, p) in self._entries.items()]
        out.sort(key=lambda t: t[0].sort_key())
        return out

    def keys(self):
        return [k for k, _, _ in self.items()]

    # -- persistence ----------------------------------------------------

    def to_json(self):
        return {
            "schema": SCHEMA_VERSION,
            "target": self.target.to_json(),
            "seed_sign": "+1" if self.seed_sign == 1 else "-1",
            "entries": [
                dict(key.to_json(), value=frac_to_str(value), provenance=prov)
                for key, value, prov in self.items()
            ],
        }

    def save(self, path):
        """Atomically write the table as versioned JSON."""
        payload = json.dumps(self.to_json(), indent=1, sort_keys=True)
        directory = os.path.dirname(os.path.abspath(path)) or "."
        fd, tmp = tempfile.mkstemp(prefix=".gwcache-", dir=directory)
        try:
            with os.fdopen(fd, "w") as fh:
                fh.write(payload)
                fh.write("\n")
            os.replace(tmp, path)
        except BaseException:
            try:
                os.unlink(tmp)
            except OSError:
                pass
            raise

    @classmethod
    def load(cls, path, target=None):
        """Load a table; verifies schema version and target identity.

        When ``target`` is given the file's target must serialize
        identically, and the in-memory target object is reused.
        """
        with open(path) as fh:
            data = json.load(fh)
        if data.get("schema") != SCHEMA_VERSION:
            raise StoreFormatError(
                "unsupported cache schema %r (expected %d)"
                % (data.get("schema"), SCHEMA_VERSION))
        file_target = TargetSpace.from_json(data["target"])
        if target is not None:
            if target.to_json() != file_target.to_json():
                raise StoreFormatError(
                    "cache file is for target %s, session target is %s"
                    % (file_target.name, target.name))
            file_target = target
        seed_sign = {"+1": 1, "-1": -1}.get(data.get("seed_sign"))
        if seed_sign is None:
            raise StoreFormatError("bad seed_sign %r" % (data.get("seed_sign"),))
        table = cls(file_target, seed_sign)
        for entry in data["entries"]:
            key = InvariantKey.from_json(entry)
            if not key.is_canonical():
                raise StoreFormatError("non-canonical key in cache: %r" % (key,))
            prov = entry["provenance"]
            if prov not in PROVENANCE_TAGS:
                raise StoreFormatError("unknown provenance %r" % (prov,))
            table.put(key, frac_from_str(entry["value"]), prov)
        return table


def default_cache_path():
    """Cache path from the GWCALC_CACHE environment variable, if set."""
    path = os.environ.get(CACHE_ENV_VAR)
    return path if path else None
