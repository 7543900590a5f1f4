"""Command-line front end: compute tables, verify consistency, manage cache.

Exit codes: 0 success / all suites pass, 1 suite failure or I/O error,
2 bad flags or inputs, 3 inconsistent data (store conflicts, rank
problems, corrupt cache), 4 underdetermined system (e.g. a fixed-locus
free involution with no seed sign supplied).

Output is deterministic: identical flags on identical caches print
byte-identical text regardless of --threads.
"""

import argparse
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction

from .graded_algebra import (TargetValidationError, TargetSpace,
                             builtin_target, builtin_target_names,
                             frac_to_str)
from .invariant_store import (CACHE_ENV_VAR, COMPLEX, REAL, InvariantKey,
                              InvariantTable, StoreConflictError,
                              StoreFormatError, normalize)
from .complex_solver import (AxiomPreconditionError, ComplexSession,
                             InconsistentSystemError, SolverError,
                             UnderdeterminedError, filter_complex,
                             key_degree_sum, reduce_axioms,
                             reduce_descendant_trr, vdim_complex,
                             wdvv_instances)
from .real_solver import (RealSession, filter_real, reduce_real_axioms,
                          reduce_descendant_rtrr, rwdvv_instances,
                          vdim_real)
from .potentials import (build_potentials, residual_dilaton_complex,
                         residual_dilaton_real, residual_rwdvv_pde,
                         residual_string_complex, residual_string_real,
                         residual_wdvv_pde, GradedSeries, _multisets_exact)

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_USAGE = 2
EXIT_INCONSISTENT = 3
EXIT_UNDERDETERMINED = 4

SUITES = ("grading", "wdvv", "rwdvv", "string", "dilaton", "divisor",
          "trr-cross", "rtrr-cross")


class UsageError(Exception):
    pass


# ----- argument plumbing -----------------------------------------------------


def build_parser():
    parser = argparse.ArgumentParser(
        prog="gwcalc",
        description="Exact calculator for genus-0 curve counts of "
                    "projective spaces, complex and real.")
    sub = parser.add_subparsers(dest="command")

    def add_common(p):
        p.add_argument("--target", help="built-in target name (%s)" %
                       ", ".join(builtin_target_names()))
        p.add_argument("--target-file", help="path to a target JSON file")
        p.add_argument("--cache", help="cache file path (default: $%s)" %
                       CACHE_ENV_VAR)
        p.add_argument("--threads", type=int, default=None,
                       help="worker threads (default: hardware count)")
        p.add_argument("--format", choices=("text", "json", "csv"),
                       default="text")

    pc = sub.add_parser("compute", help="solve and print invariants")
    add_common(pc)
    pc.add_argument("--real", action="store_true",
                    help="real invariants instead of complex")
    pc.add_argument("--max-degree", type=int, default=None)
    pc.add_argument("--degree", type=int, default=None)
    pc.add_argument("--insertions", default=None,
                    help="comma-separated insertions, each [a:]CLS with "
                         "CLS one of 1, h, h2, ..., pt")
    pc.add_argument("--insertions-only", default=None, metavar="CLS",
                    help="restrict table output to keys whose insertions "
                         "all equal CLS")
    pc.add_argument("--seed-sign", default=None,
                    help="sign of the degree-1 real seed: + or -")
    pc.add_argument("--descendant-depth", type=int, default=2)

    pv = sub.add_parser("verify", help="run consistency suites")
    add_common(pv)
    pv.add_argument("--suite", default="all",
                    help="one of %s, or all" % ", ".join(SUITES))
    pv.add_argument("--max-degree", type=int, default=3)
    pv.add_argument("--seed-sign", default=None)
    pv.add_argument("--descendant-depth", type=int, default=2)

    pk = sub.add_parser("cache", help="inspect or edit the cache file")
    pk.add_argument("action", choices=("show", "clear", "export"))
    pk.add_argument("--cache", help="cache file path (default: $%s)" %
                    CACHE_ENV_VAR)
    pk.add_argument("--format", choices=("json", "csv"), default="json")
    return parser


def _load_target(args):
    if args.target and args.target_file:
        raise UsageError("give either --target or --target-file, not both")
    if args.target_file:
        try:
            with open(args.target_file, "r") as fh:
                return TargetSpace.loads(fh.read())
        except OSError as e:
            raise UsageError("cannot read target file: %s" % e)
        except (ValueError, KeyError, TargetValidationError) as e:
            raise UsageError("bad target file: %s" % e)
    if args.target:
        try:
            return builtin_target(args.target)
        except KeyError:
            raise UsageError(
                "unknown target %r (built-ins: %s)"
                % (args.target, ", ".join(builtin_target_names())))
    raise UsageError("a target is required (--target or --target-file)")


def _cache_path(args):
    if getattr(args, "cache", None):
        return args.cache
    return os.environ.get(CACHE_ENV_VAR)


def _load_table(args, target):
    path = _cache_path(args)
    if path and os.path.exists(path):
        return InvariantTable.load(path, target=target), path
    return InvariantTable(target), path


def _parse_seed_sign(raw):
    if raw is None:
        return None
    if raw in ("+", "+1", "1"):
        return 1
    if raw in ("-", "-1"):
        return -1
    raise UsageError("--seed-sign must be + or -, got %r" % raw)


def _threads(args):
    n = args.threads if args.threads else (os.cpu_count() or 1)
    if n < 1:
        raise UsageError("--threads must be positive")
    return n


# ----- class-name handling ---------------------------------------------------


def parse_class_name(target, name):
    """Map a class name (1, h, h2, ..., pt) to its 1-based basis index."""
    name = name.strip()
    nb = target.num_basis
    if name == "1":
        return 1
    if name == "pt":
        return nb
    if name == "h":
        k = 1
    elif name.startswith("h^"):
        k = int(name[2:])
    elif name.startswith("h") and name[1:].isdigit():
        k = int(name[1:])
    else:
        raise UsageError("unknown class name %r" % name)
    if not 1 <= k <= nb - 1:
        raise UsageError("class %r out of range for this target" % name)
    return k + 1


def class_name(target, i):
    if i == 1:
        return "1"
    if i == target.num_basis:
        return "pt"
    if i == 2:
        return "h"
    return "h%d" % (i - 1)


def parse_insertions(target, spec):
    """Parse 'a:cls,cls,...' into a list of (a, basis index) pairs."""
    out = []
    for item in spec.split(","):
        item = item.strip()
        if not item:
            raise UsageError("empty insertion in %r" % spec)
        if ":" in item:
            a_str, cls = item.split(":", 1)
            try:
                a = int(a_str)
            except ValueError:
                raise UsageError("bad descendant power in %r" % item)
            if a < 0:
                raise UsageError("descendant power must be >= 0 in %r" % item)
        else:
            a, cls = 0, item
        out.append((a, parse_class_name(target, cls)))
    if not out:
        raise UsageError("no insertions given")
    return out


# ----- output ----------------------------------------------------------------


def _render_insertion(target, a, i):
    name = class_name(target, i)
    return name if a == 0 else "tau_%d(%s)" % (a, name)


def _render_text_row(target, key, value):
    ins = ", ".join(_render_insertion(target, a, i)
                    for a, i in key.insertions)
    return "%s g=%d d=%d <%s> = %s" % (
        key.kind, key.genus, key.degree, ins, frac_to_str(value))


def _csv_insertions(key):
    return ";".join("%d:%d" % (a, i) for a, i in key.insertions)


def emit_rows(target, rows, fmt, out):
    """Print (key, value) pairs in the chosen format, deterministically."""
    if fmt == "text":
        for key, value in rows:
            out.write(_render_text_row(target, key, value) + "\n")
    elif fmt == "csv":
        out.write("kind,genus,degree,insertions,value\n")
        for key, value in rows:
            out.write("%s,%d,%d,%s,%s\n" % (
                key.kind, key.genus, key.degree,
                _csv_insertions(key), frac_to_str(value)))
    else:
        entries = []
        for key, value in rows:
            entry = key.to_json()
            entry["value"] = frac_to_str(value)
            entries.append(entry)
        payload = {"target": target.name, "entries": entries}
        out.write(json.dumps(payload, indent=2, sort_keys=True) + "\n")


# ----- compute ---------------------------------------------------------------


def cmd_compute(args, out=None):
    out = sys.stdout if out is None else out
    target = _load_target(args)
    seed_sign = _parse_seed_sign(args.seed_sign)
    if args.degree is not None and args.degree < 0:
        raise UsageError("--degree must be >= 0")
    if args.max_degree is not None and args.max_degree < 0:
        raise UsageError("--max-degree must be >= 0")
    if args.degree is None and args.max_degree is None:
        raise UsageError("give --degree or --max-degree")
    if args.degree is not None and args.max_degree is not None:
        raise UsageError("give either --degree or --max-degree, not both")
    if args.descendant_depth < 0:
        raise UsageError("--descendant-depth must be >= 0")
    if args.real and target.complex_dim % 2 == 0:
        raise UsageError("--real needs a target of odd complex dimension")
    table, path = _load_table(args, target)
    csession = ComplexSession(target, table)
    rsession = None
    if args.real:
        rsession = RealSession(target, table, seed_sign=seed_sign,
                               complex_session=csession)
    top = args.degree if args.degree is not None else args.max_degree
    degrees = [args.degree] if args.degree is not None else \
        list(range(1, args.max_degree + 1))

    if args.insertions is not None:
        if args.insertions_only is not None:
            raise UsageError("--insertions and --insertions-only clash")
        if args.degree is None:
            raise UsageError("--insertions needs --degree")
        raw = parse_insertions(target, args.insertions)
        kind = REAL if args.real else COMPLEX
        session = rsession if args.real else csession
        total = Fraction(0)
        for coeff, key in normalize(target, kind, 0, args.degree, raw):
            total += coeff * session.value(key)
        key = InvariantKey(kind, 0, args.degree, sorted(raw))
        rows = [(key, total)]
    else:
        session = rsession if args.real else csession
        if args.real:
            rsession.ensure_real(top)
        else:
            csession.ensure_primary(top)
        keys = []
        for d in degrees:
            keys.extend(session.primary_keys(d))
        if args.insertions_only is not None:
            only = parse_class_name(target, args.insertions_only)
            keys = [k for k in keys
                    if k.insertions and
                    all(a == 0 and i == only for a, i in k.insertions)]
        with ThreadPoolExecutor(max_workers=_threads(args)) as ex:
            values = list(ex.map(session.value, keys))
        rows = list(zip(keys, values))
        rows.sort(key=lambda kv: kv[0].sort_key())
    emit_rows(target, rows, args.format, out)
    if path:
        table.save(path)
    return EXIT_OK


# ----- verify suites ---------------------------------------------------------


def _instance_caps(session, max_degree):
    """Per-degree relation tuple-length caps mirroring the solver."""
    caps = {}
    for d in range(1, max_degree + 1):
        keys = session.primary_keys(d)
        if keys:
            caps[d] = max(k.num_insertions for k in keys)
    return caps


def _descendant_keys(target, kind, degree, max_insertions, depth):
    """All grading-admissible canonical keys with descendants at a degree."""
    variables = []
    for a in range(depth + 1):
        for i in range(1, target.num_basis + 1):
            variables.append((a, i))
    variables.sort(key=lambda v: 2 * v[0] + target.degree(v[1]))
    weights = [2 * a + target.degree(i) for a, i in variables]
    out = []
    for ell in range(1, max_insertions + 1):
        if kind == COMPLEX:
            want = vdim_complex(0, ell, degree, target)
        else:
            want = vdim_real(0, ell, degree, target)
        if want < 0:
            continue
        for multiset in _multisets_exact(variables, weights, ell, want):
            ins = []
            for (a, i), m in multiset:
                ins.extend([(a, i)] * m)
            ins.sort()
            key = InvariantKey(kind, 0, degree, ins)
            if key.total_descendant_power() == 0:
                continue
            if kind == COMPLEX and filter_complex(key, target) is None:
                out.append(key)
            elif kind == REAL and filter_real(key, target) is None:
                out.append(key)
    out.sort(key=lambda k: k.sort_key())
    return out


def suite_grading(target, args, csession, rsession):
    """Every stored entry passes the structural filters and the grading
    identity; a deterministic sample of filter-flagged keys evaluates to 0."""
    import random
    checks = 0
    for key, value, _prov in csession.table.items():
        checks += 1
        if key.kind == COMPLEX:
            reason = filter_complex(key, target)
            want = vdim_complex(key.genus, key.num_insertions,
                                key.degree, target)
        else:
            reason = filter_real(key, target)
            want = vdim_real(key.genus, key.num_insertions,
                             key.degree, target)
        if value != 0 and reason is not None:
            return False, "stored nonzero value at structurally-zero key " \
                "%r (%s)" % (key, reason), checks
        if value != 0 and key_degree_sum(key, target) != want:
            return False, "grading violation at %r" % (key,), checks
    rng = random.Random(20240811)
    nb = target.num_basis
    for _ in range(2000):
        kind = REAL if (rsession is not None and rng.random() < 0.5) \
            else COMPLEX
        ell = rng.randint(1, 6)
        ins = sorted((rng.randint(0, 2), rng.randint(1, nb))
                     for _ in range(ell))
        key = InvariantKey(kind, 0, rng.randint(0, args.max_degree), ins)
        if kind == COMPLEX:
            flagged = filter_complex(key, target) is not None
            val = csession.value(key) if flagged else None
        else:
            flagged = filter_real(key, target) is not None
            val = rsession.value(key) if flagged else None
        if flagged:
            checks += 1
            if val != 0:
                return False, "flagged key %r evaluated to %s" \
                    % (key, val), checks
    return True, "", checks


def suite_wdvv(target, args, csession, rsession):
    """Every exchange-relation instance in the solving window evaluates
    to zero on the table, and the associativity PDE residuals vanish."""
    csession.ensure_primary(args.max_degree)
    caps = _instance_caps(csession, args.max_degree)

    def check_instance(item):
        d, mu = item
        total = csession.relation_residual(mu, d)
        return None if total == 0 else "instance %r at degree %d sums to %s" \
            % (mu, d, total)

    work = [(d, mu) for d, cap in sorted(caps.items())
            for mu in wdvv_instances(target, d, max(cap + 1, 5))]
    with ThreadPoolExecutor(max_workers=_threads(args)) as ex:
        for bad in ex.map(check_instance, work):
            if bad:
                return False, bad, len(work)
    checks = len(work)
    pots = build_potentials(csession.table, (6, min(args.max_degree, 3)),
                            descendant_depth=0,
                            complex_value=csession.value,
                            real_value=rsession.value if rsession else None)
    phi = pots["complex_primary"]
    nb = target.num_basis
    for i1 in range(1, nb + 1):
        for i2 in range(1, nb + 1):
            for i3 in range(1, nb + 1):
                for i4 in range(1, nb + 1):
                    checks += 1
                    res = residual_wdvv_pde(phi, (i1, i2, i3, i4))
                    if not res.is_zero():
                        (q, vt), c = res.items()[0]
                        return False, "PDE residual (%d,%d,%d,%d) has %s " \
                            "at %s" % (i1, i2, i3, i4, frac_to_str(c),
                                       GradedSeries.monomial_string(q, vt)), \
                            checks
    return True, "", checks


def suite_rwdvv(target, args, csession, rsession):
    """Real exchange-relation instances and the real associativity PDE."""
    if rsession is None:
        return False, "target has no real theory (even complex dimension)", 0
    rsession.ensure_real(args.max_degree)
    caps = _instance_caps(rsession, args.max_degree)

    def check_instance(item):
        d, ks = item
        total = rsession.relation_residual(ks, d)
        return None if total == 0 else "instance %r at degree %d sums to %s" \
            % (ks, d, total)

    work = [(d, ks) for d, cap in sorted(caps.items())
            for ks in rwdvv_instances(target, d, max(cap + 2, 5))]
    with ThreadPoolExecutor(max_workers=_threads(args)) as ex:
        for bad in ex.map(check_instance, work):
            if bad:
                return False, bad, len(work)
    checks = len(work)
    pots = build_potentials(rsession.table, (6, min(args.max_degree, 4)),
                            descendant_depth=0,
                            complex_value=csession.value,
                            real_value=rsession.value)
    omega = pots["real_primary"]
    doubled = pots["complex_doubled"]
    nb = target.num_basis
    for i1 in range(1, nb + 1):
        if target.sign(i1) != 1:
            continue
        for i2 in range(1, nb + 1):
            if target.sign(i2) != -1:
                continue
            for i3 in range(1, nb + 1):
                if target.sign(i3) != -1:
                    continue
                checks += 1
                res = residual_rwdvv_pde(doubled, omega, (i1, i2, i3))
                if not res.is_zero():
                    (q, vt), c = res.items()[0]
                    return False, "PDE residual (%d,%d,%d) has %s at %s" \
                        % (i1, i2, i3, frac_to_str(c),
                           GradedSeries.monomial_string(q, vt)), checks
    return True, "", checks


def _potentials_for(target, args, csession, rsession, depth):
    q_cap = min(args.max_degree, 3)
    return build_potentials(
        csession.table, (6, q_cap), descendant_depth=depth,
        complex_value=csession.value,
        real_value=rsession.value if rsession is not None else None)


def suite_string(target, args, csession, rsession):
    """String-equation residuals on the descendant potentials."""
    depth = max(1, args.descendant_depth)
    pots = _potentials_for(target, args, csession, rsession, depth)
    checks = 1
    res = residual_string_complex(pots["complex_descendant"])
    if not res.is_zero():
        (q, vt), c = res.items()[0]
        return False, "complex residual has %s at %s" % (
            frac_to_str(c), GradedSeries.monomial_string(q, vt)), checks
    if rsession is not None:
        checks += 1
        res = residual_string_real(pots["real_descendant"])
        if not res.is_zero():
            (q, vt), c = res.items()[0]
            return False, "real residual has %s at %s" % (
                frac_to_str(c), GradedSeries.monomial_string(q, vt)), checks
    return True, "", checks


def suite_dilaton(target, args, csession, rsession):
    """Dilaton-equation residuals on the descendant potentials."""
    depth = max(1, args.descendant_depth)
    pots = _potentials_for(target, args, csession, rsession, depth)
    checks = 1
    res = residual_dilaton_complex(pots["complex_descendant"])
    if not res.is_zero():
        (q, vt), c = res.items()[0]
        return False, "complex residual has %s at %s" % (
            frac_to_str(c), GradedSeries.monomial_string(q, vt)), checks
    if rsession is not None:
        checks += 1
        res = residual_dilaton_real(pots["real_descendant"])
        if not res.is_zero():
            (q, vt), c = res.items()[0]
            return False, "real residual has %s at %s" % (
                frac_to_str(c), GradedSeries.monomial_string(q, vt)), checks
    return True, "", checks


def suite_divisor(target, args, csession, rsession):
    """Adding a unit, a dilaton slot, or a divisor to a solved key gives
    the predicted value."""
    checks = 0
    h = 2 if target.num_basis > 1 else None
    for d in range(1, args.max_degree + 1):
        for key in csession.primary_keys(d):
            base = csession.value(key)
            ins = list(key.insertions)
            unit_key = InvariantKey(COMPLEX, 0, d, sorted(ins + [(0, 1)]))
            checks += 1
            if csession.value(unit_key) != 0:
                return False, "unit insertion at %r is nonzero" % (unit_key,), checks
            dil_key = InvariantKey(COMPLEX, 0, d, sorted(ins + [(1, 1)]))
            checks += 1
            want = (2 * key.genus - 2 + key.num_insertions) * base
            got = csession.value(dil_key)
            if got != want:
                return False, "dilaton slot at %r: %s != %s" % (
                    dil_key, got, want), checks
            if h is not None:
                div_key = InvariantKey(COMPLEX, 0, d, sorted(ins + [(0, h)]))
                checks += 1
                got = csession.value(div_key)
                if got != d * base:
                    return False, "divisor insertion at %r: %s != %s" % (
                        div_key, got, d * base), checks
        if rsession is not None:
            for key in rsession.primary_keys(d):
                base = rsession.value(key)
                ins = list(key.insertions)
                if h is not None and target.sign(h) == -1:
                    div_key = InvariantKey(REAL, 0, d, sorted(ins + [(0, h)]))
                    checks += 1
                    got = rsession.value(div_key)
                    if got != d * base:
                        return False, "real divisor insertion at %r: %s != %s" \
                            % (div_key, got, d * base), checks
    return True, "", checks


def suite_trr_cross(target, args, csession, rsession):
    """Descendant reduction agrees with the axiom reductions on every
    admissible descendant key that both can handle."""
    checks = 0
    for d in range(1, args.max_degree + 1):
        for key in _descendant_keys(target, COMPLEX, d, 5, 2):
            try:
                terms = reduce_axioms(key, target)
            except AxiomPreconditionError:
                continue
            via_axiom = Fraction(0)
            for coeff, k in terms:
                via_axiom += coeff * csession.value(k)
            via_trr = Fraction(0)
            for coeff, keys in reduce_descendant_trr(key, target):
                prod = coeff
                for k in keys:
                    prod *= csession.value(k)
                via_trr += prod
            checks += 1
            if via_axiom != via_trr:
                return False, "key %r: reduction %s != axiom %s" % (
                    key, via_trr, via_axiom), checks
    if checks == 0:
        return False, "no cross-checkable descendant keys in range", 0
    return True, "", checks


def suite_rtrr_cross(target, args, csession, rsession):
    """Real descendant reduction agrees with the real axiom reductions."""
    if rsession is None:
        return False, "target has no real theory (even complex dimension)", 0
    rsession.ensure_real(args.max_degree)
    checks = 0
    for d in range(1, args.max_degree + 1):
        for key in _descendant_keys(target, REAL, d, 4, 2):
            try:
                terms = reduce_real_axioms(key, target)
            except AxiomPreconditionError:
                continue
            via_axiom = Fraction(0)
            for coeff, k in terms:
                via_axiom += coeff * rsession.value(k)
            via_rtrr = Fraction(0)
            for coeff, k in reduce_descendant_rtrr(key, rsession):
                via_rtrr += coeff * rsession.value(k)
            checks += 1
            if via_axiom != via_rtrr:
                return False, "key %r: reduction %s != axiom %s" % (
                    key, via_rtrr, via_axiom), checks
    if checks == 0:
        return False, "no cross-checkable real descendant keys in range", 0
    return True, "", checks


SUITE_FUNCS = {
    "grading": suite_grading,
    "wdvv": suite_wdvv,
    "rwdvv": suite_rwdvv,
    "string": suite_string,
    "dilaton": suite_dilaton,
    "divisor": suite_divisor,
    "trr-cross": suite_trr_cross,
    "rtrr-cross": suite_rtrr_cross,
}


def cmd_verify(args, out=None):
    out = sys.stdout if out is None else out
    target = _load_target(args)
    seed_sign = _parse_seed_sign(args.seed_sign)
    if args.max_degree < 0:
        raise UsageError("--max-degree must be >= 0")
    has_real = target.complex_dim % 2 == 1
    if args.suite == "all":
        names = [s for s in SUITES
                 if has_real or s not in ("rwdvv", "rtrr-cross")]
    else:
        if args.suite not in SUITES:
            raise UsageError("unknown suite %r (choose from %s, all)"
                             % (args.suite, ", ".join(SUITES)))
        names = [args.suite]
    table, path = _load_table(args, target)
    csession = ComplexSession(target, table)
    rsession = None
    if has_real:
        rsession = RealSession(target, table, seed_sign=seed_sign,
                               complex_session=csession)
    csession.ensure_primary(args.max_degree)
    if rsession is not None and any(s in ("rwdvv", "rtrr-cross", "string",
                                          "dilaton", "divisor", "grading")
                                    for s in names):
        rsession.ensure_real(args.max_degree)
    all_ok = True
    for name in names:
        ok, detail, checks = SUITE_FUNCS[name](target, args, csession,
                                               rsession)
        if ok:
            out.write("suite %-10s pass (%d checks)\n" % (name, checks))
        else:
            all_ok = False
            out.write("suite %-10s FAIL: %s\n" % (name, detail))
    if path and all_ok:
        table.save(path)
    return EXIT_OK if all_ok else EXIT_FAIL


# ----- cache -----------------------------------------------------------------


def cmd_cache(args, out=None):
    out = sys.stdout if out is None else out
    path = _cache_path(args)
    if not path:
        raise UsageError("a cache path is required (--cache or $%s)"
                         % CACHE_ENV_VAR)
    if args.action == "clear":
        if os.path.exists(path):
            os.remove(path)
        out.write("cache cleared\n")
        return EXIT_OK
    if not os.path.exists(path):
        if args.action == "show":
            out.write("0 entries\n")
            return EXIT_OK
        raise UsageError("no cache at %s" % path)
    table = InvariantTable.load(path)
    if args.action == "show":
        out.write("%d entries\n" % len(table))
        out.write("target: %s\n" % table.target.name)
        if len(table):
            by_kind = {}
            for key, _v, _p in table.items():
                by_kind[key.kind] = by_kind.get(key.kind, 0) + 1
            for kind in sorted(by_kind):
                out.write("  %s: %d\n" % (kind, by_kind[kind]))
        return EXIT_OK
    # export
    rows = [(key, value) for key, value, _prov in table.items()]
    emit_rows(table.target, rows, args.format, out)
    return EXIT_OK


# ----- entry point -----------------------------------------------------------


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code if e.code is not None else EXIT_USAGE
    if not args.command:
        parser.print_usage(sys.stderr)
        return EXIT_USAGE
    try:
        if args.command == "compute":
            return cmd_compute(args)
        if args.command == "verify":
            return cmd_verify(args)
        return cmd_cache(args)
    except UsageError as e:
        sys.stderr.write("error: %s\n" % e)
        return EXIT_USAGE
    except UnderdeterminedError as e:
        sys.stderr.write("underdetermined: %s\n" % e)
        return EXIT_UNDERDETERMINED
    except (InconsistentSystemError, StoreConflictError,
            StoreFormatError) as e:
        sys.stderr.write("inconsistent: %s\n" % e)
        return EXIT_INCONSISTENT
    except SolverError as e:
        sys.stderr.write("solver error: %s\n" % e)
        return EXIT_INCONSISTENT
    except OSError as e:
        sys.stderr.write("i/o error: %s\n" % e)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
