"""Domain-lifted weighted model counting for two-variable theories.

The pipeline turns an arbitrary theory of two-variable sentences into a sum
that is polynomial in the domain size:

1. *Normalization* rewrites every sentence into one of the prenex shapes
   ``forall x m``, ``forall x forall y m``, ``forall x exists y m``,
   ``exists x m`` or a quantifier-free combination of nullary atoms, using
   fresh definition predicates for nested quantifiers.  Definitions are
   equivalences, so each original world extends uniquely and the weighted
   count is unchanged.
2. *Skolemization* removes existentials: ``forall x exists y m`` becomes
   ``forall x forall y (m -> s(x))`` with a fresh unary ``s`` weighted
   ``(1, -1)``, so worlds without a witness cancel out of the sum.
3. *Conditioning* branches on the truth of nullary atoms, leaving pure
   universally quantified matrices per branch.
4. *Cell decomposition* groups elements by their complete truth assignment
   over unary and reflexive-binary atoms; the count is a sum over
   compositions of the domain into cells, with per-cell weights and
   per-cell-pair cross weights.

Arithmetic is generic: integer weights give exact (bignum) results, any
other weights run in complex floating point with overflow detection.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

from .errors import NumericOverflowError, UnsupportedSentenceError
from .logic import (
    And, Atom, Domain, Exists, FALSE, ForAll, Formula, Iff, Implies, Not, Or,
    Predicate, TRUE, Truth, Var, all_variables, contains_constants,
    contains_equality, free_variables,
)

_MAGNITUDE_LIMIT = 1e300


def cpow(base, exponent: int):
    """base**exponent by repeated squaring; exact for ints, checked for
    magnitude otherwise."""
    if isinstance(base, int):
        return base ** exponent
    result = 1
    b = base
    e = exponent
    while e:
        if e & 1:
            result = result * b
        e >>= 1
        if e:
            b = b * b
    if abs(result) > _MAGNITUDE_LIMIT or result != result:
        raise NumericOverflowError(
            f"|{base!r}**{exponent}| exceeds {_MAGNITUDE_LIMIT:g}")
    return result


@dataclass(frozen=True)
class Fo2Theory:
    """A finite set of closed two-variable sentences over a vocabulary."""

    sentences: tuple[Formula, ...]
    vocabulary: tuple[Predicate, ...]

    @staticmethod
    def of(sentences, vocabulary) -> "Fo2Theory":
        return Fo2Theory(tuple(sentences), tuple(vocabulary))


# --- normalized sentence shapes ------------------------------------------

@dataclass(frozen=True)
class _Forall1:
    var: Var
    matrix: Formula


@dataclass(frozen=True)
class _Forall2:
    var1: Var
    var2: Var
    matrix: Formula


@dataclass(frozen=True)
class _ForallExists:
    var1: Var
    var2: Var
    matrix: Formula


@dataclass(frozen=True)
class _Exists1:
    var: Var
    matrix: Formula


@dataclass(frozen=True)
class _Prop:
    matrix: Formula


class _Vocabulary:
    """Tracks predicates and hands out fresh names."""

    def __init__(self, preds):
        self.preds = list(preds)
        self._names = {p.name for p in self.preds}

    def fresh(self, base: str, arity: int) -> Predicate:
        i = 0
        name = f"{base}{i}"
        while name in self._names:
            i += 1
            name = f"{base}{i}"
        p = Predicate(name, arity)
        self._names.add(name)
        self.preds.append(p)
        return p


def _fold(f: Formula) -> Formula:
    """Constant-fold Truth leaves."""
    if isinstance(f, (Atom, Truth)):
        return f
    if isinstance(f, Not):
        b = _fold(f.body)
        if isinstance(b, Truth):
            return FALSE if b.value else TRUE
        return Not(b)
    if isinstance(f, (And, Or, Implies, Iff)):
        a = _fold(f.left)
        b = _fold(f.right)
        ta = a.value if isinstance(a, Truth) else None
        tb = b.value if isinstance(b, Truth) else None
        if isinstance(f, And):
            if ta is not None:
                return b if ta else FALSE
            if tb is not None:
                return a if tb else FALSE
        elif isinstance(f, Or):
            if ta is not None:
                return TRUE if ta else b
            if tb is not None:
                return TRUE if tb else a
        elif isinstance(f, Implies):
            if ta is not None:
                return b if ta else TRUE
            if tb is not None:
                return TRUE if tb else _fold(Not(a))
        else:
            if ta is not None:
                return b if ta else _fold(Not(b))
            if tb is not None:
                return a if tb else _fold(Not(a))
        return type(f)(a, b)
    if isinstance(f, (ForAll, Exists)):
        b = _fold(f.body)
        if isinstance(b, Truth):
            return b
        return type(f)(f.var, b)
    raise TypeError(f"not a formula: {f!r}")


def _drop_vacuous(f: Formula) -> Formula:
    """Remove quantifiers whose variable does not occur free in the body;
    sound because domains are nonempty."""
    if isinstance(f, (Atom, Truth)):
        return f
    if isinstance(f, Not):
        return Not(_drop_vacuous(f.body))
    if isinstance(f, (And, Or, Implies, Iff)):
        return type(f)(_drop_vacuous(f.left), _drop_vacuous(f.right))
    if isinstance(f, (ForAll, Exists)):
        body = _drop_vacuous(f.body)
        if f.var not in free_variables(body):
            return body
        return type(f)(f.var, body)
    raise TypeError(f"not a formula: {f!r}")


def _check_fragment(s: Formula) -> None:
    if free_variables(s):
        raise UnsupportedSentenceError(f"sentence has free variables: {s}")
    if contains_equality(s):
        raise UnsupportedSentenceError(
            "equality atoms are outside the lifted fragment")
    if contains_constants(s):
        raise UnsupportedSentenceError(
            "constants (domain elements) are outside the lifted fragment")
    names = {v.name for v in all_variables(s)}
    if len(names) > 2:
        raise UnsupportedSentenceError(
            f"sentence uses {len(names)} distinct variables: {s}")


def _eliminate_inner(f: Formula, vocab: _Vocabulary, out: list) -> Formula:
    """Replace quantified subformulas by fresh definition predicates,
    emitting the defining sentences into ``out``.  Returns a
    quantifier-free formula."""
    if isinstance(f, (Atom, Truth)):
        return f
    if isinstance(f, Not):
        return Not(_eliminate_inner(f.body, vocab, out))
    if isinstance(f, (And, Or, Implies, Iff)):
        return type(f)(_eliminate_inner(f.left, vocab, out),
                       _eliminate_inner(f.right, vocab, out))
    if isinstance(f, (ForAll, Exists)):
        inner = _eliminate_inner(f.body, vocab, out)
        v = f.var
        fv = sorted(free_variables(inner) - {v}, key=lambda u: u.name)
        if len(fv) > 1:
            raise UnsupportedSentenceError(
                f"quantified subformula with two free variables: {f}")
        exist = isinstance(f, Exists)
        if fv:
            u = fv[0]
            d = vocab.fresh("def", 1)
            datom = Atom(d, (u,))
            if exist:
                out.append(_Forall2(u, v, Implies(inner, datom)))
                out.append(_ForallExists(u, v, Implies(datom, inner)))
            else:
                out.append(_Forall2(u, v, Implies(datom, inner)))
                out.append(_ForallExists(u, v, Or(datom, Not(inner))))
        else:
            d = vocab.fresh("def", 0)
            datom = Atom(d, ())
            if exist:
                out.append(_Forall1(v, Implies(inner, datom)))
                out.append(_Exists1(v, Implies(datom, inner)))
            else:
                out.append(_Forall1(v, Implies(datom, inner)))
                out.append(_Exists1(v, Or(datom, Not(inner))))
        return datom
    raise TypeError(f"not a formula: {f!r}")


def _normalize_sentence(s: Formula, vocab: _Vocabulary, out: list) -> None:
    _check_fragment(s)
    s = _fold(_drop_vacuous(s))
    prefix = []
    body = s
    while isinstance(body, (ForAll, Exists)) and len(prefix) < 2:
        prefix.append((isinstance(body, Exists), body.var))
        body = body.body
    matrix = _fold(_eliminate_inner(body, vocab, out))

    if not prefix:
        out.append(_Prop(matrix))
        return
    if len(prefix) == 1:
        exist, v = prefix[0]
        out.append(_Exists1(v, matrix) if exist else _Forall1(v, matrix))
        return
    (e1, u), (e2, v) = prefix
    if not e1 and not e2:
        out.append(_Forall2(u, v, matrix))
    elif not e1 and e2:
        out.append(_ForallExists(u, v, matrix))
    else:
        # exists-first prefixes: name the inner quantified formula.
        d = vocab.fresh("def", 1)
        datom = Atom(d, (u,))
        if e2:
            out.append(_Forall2(u, v, Implies(matrix, datom)))
            out.append(_ForallExists(u, v, Implies(datom, matrix)))
        else:
            out.append(_Forall2(u, v, Implies(datom, matrix)))
            out.append(_ForallExists(u, v, Or(datom, Not(matrix))))
        out.append(_Exists1(u, datom))


def _other_var(v: Var) -> Var:
    return Var("y") if v.name != "y" else Var("x")


def _skolemize_records(records: list, vocab: _Vocabulary):
    """Replace existential shapes by universal ones with (1, -1) weighted
    relaxation predicates.  Returns (records, skolem weight entries)."""
    out = []
    weights = {}
    for rec in records:
        if isinstance(rec, _ForallExists):
            s = vocab.fresh("sk", 1)
            weights[s.name] = (1, -1)
            out.append(_Forall2(rec.var1, rec.var2,
                                Implies(rec.matrix, Atom(s, (rec.var1,)))))
        elif isinstance(rec, _Exists1):
            # forall x forall y (m(x) -> s(y)): if a witness exists every
            # s-atom is forced true (factor 1); otherwise s is free and the
            # assignments sum to (1 - 1)^n = 0.
            s = vocab.fresh("sk", 1)
            weights[s.name] = (1, -1)
            other = _other_var(rec.var)
            out.append(_Forall2(rec.var, other,
                                Implies(rec.matrix, Atom(s, (other,)))))
        else:
            out.append(rec)
    return out, weights


def _records_to_sentences(records) -> list[Formula]:
    out = []
    for rec in records:
        if isinstance(rec, _Prop):
            out.append(rec.matrix)
        elif isinstance(rec, _Forall1):
            out.append(ForAll(rec.var, rec.matrix))
        elif isinstance(rec, _Forall2):
            out.append(ForAll(rec.var1, ForAll(rec.var2, rec.matrix)))
        elif isinstance(rec, _ForallExists):
            out.append(ForAll(rec.var1, Exists(rec.var2, rec.matrix)))
        elif isinstance(rec, _Exists1):
            out.append(Exists(rec.var, rec.matrix))
        else:
            raise TypeError(rec)
    return out


def skolemize(t: Fo2Theory, w, wbar):
    """Equi-count elimination of existential quantifiers.

    Returns the input unchanged when there is nothing to do; otherwise a
    theory with only universal prefixes plus extended weight functions.
    """
    vocab = _Vocabulary(t.vocabulary)
    records = []
    for s in t.sentences:
        _normalize_sentence(s, vocab, records)
    if not any(isinstance(r, (_ForallExists, _Exists1)) for r in records):
        return t, w, wbar
    records, skolem_weights = _skolemize_records(records, vocab)
    new_w = w.updated({k: v[0] for k, v in skolem_weights.items()})
    new_wbar = wbar.updated({k: v[1] for k, v in skolem_weights.items()})
    return (Fo2Theory.of(_records_to_sentences(records), vocab.preds),
            new_w, new_wbar)


# --- cells -----------------------------------------------------------------

@dataclass(frozen=True)
class Cell:
    """Complete truth assignment over the unary and reflexive-binary atoms
    of one element."""

    assignment: tuple[tuple[Predicate, bool], ...]

    def value(self, pred: Predicate) -> bool:
        for p, v in self.assignment:
            if p == pred:
                return v
        raise KeyError(pred)


def _subst_vars(f: Formula, mapping: dict) -> Formula:
    if isinstance(f, Atom):
        return Atom(f.pred, tuple(mapping.get(a, a) if isinstance(a, Var) else a
                                  for a in f.args))
    if isinstance(f, Truth):
        return f
    if isinstance(f, Not):
        return Not(_subst_vars(f.body, mapping))
    if isinstance(f, (And, Or, Implies, Iff)):
        return type(f)(_subst_vars(f.left, mapping), _subst_vars(f.right, mapping))
    raise TypeError(f"quantifier inside matrix: {f!r}")


def _eval_qf(f: Formula, values: dict) -> bool:
    if isinstance(f, Atom):
        return values[f]
    if isinstance(f, Truth):
        return f.value
    if isinstance(f, Not):
        return not _eval_qf(f.body, values)
    if isinstance(f, And):
        return _eval_qf(f.left, values) and _eval_qf(f.right, values)
    if isinstance(f, Or):
        return _eval_qf(f.left, values) or _eval_qf(f.right, values)
    if isinstance(f, Implies):
        return (not _eval_qf(f.left, values)) or _eval_qf(f.right, values)
    if isinstance(f, Iff):
        return _eval_qf(f.left, values) == _eval_qf(f.right, values)
    raise TypeError(f"not a quantifier-free formula: {f!r}")


def _cell_atoms(preds) -> list[Atom]:
    """One atom per predicate: p(0) for unary, r(0, 0) for binary."""
    out = []
    for p in preds:
        out.append(Atom(p, (0,) * p.arity))
    return out


def _enumerate_cells(preds, diag_matrices) -> list[Cell]:
    """All assignments over the cell atoms consistent with every matrix
    evaluated at a single element (both variables identified)."""
    atoms = _cell_atoms(preds)
    diag = [_subst_vars(m, {v: 0 for v in free_variables(m)})
            for m in diag_matrices]
    cells = []
    for bits in itertools.product((False, True), repeat=len(atoms)):
        values = dict(zip(atoms, bits))
        if all(_eval_qf(m, values) for m in diag):
            cells.append(Cell(tuple(zip(preds, bits))))
    return cells


def enumerate_cells(vocab, matrix: Formula) -> list[Cell]:
    """Cells of the vocabulary consistent with ``matrix`` at y = x.

    ``matrix`` is quantifier-free; TRUE means unconstrained.
    """
    preds = [p for p in vocab if p.arity in (1, 2)]
    return _enumerate_cells(preds, [matrix])


def pair_weight(ci: Cell, cj: Cell, matrix: Formula, w, wbar):
    """Summed weight of cross-atom assignments between two distinct elements
    with the given cells, under ``matrix`` in both orientations."""
    preds = [p for p, _ in ci.assignment]
    table = _pair_table([matrix], preds, [ci, cj])
    total = 0
    for counts in table[(0, 1)]:
        term = 1
        for name, t, f in counts:
            term = term * cpow(w(name), t) * cpow(wbar(name), f)
        total = total + term
    return total


def _pair_table(matrices2, preds, cells):
    """For every pair of cell positions i <= j, the list of per-predicate
    (true, false) cross-atom count summaries of the satisfying assignments."""
    binary = [p for p in preds if p.arity == 2]
    cross = [Atom(p, (0, 1)) for p in binary] + [Atom(p, (1, 0)) for p in binary]
    inst = [_subst_vars(m, _direction(m, 0, 1)) for m in matrices2] + \
           [_subst_vars(m, _direction(m, 1, 0)) for m in matrices2]
    table = {}
    for i, ci in enumerate(cells):
        for j in range(i, len(cells)):
            cj = cells[j]
            base = {}
            for p, v in ci.assignment:
                base[Atom(p, (0,) * p.arity)] = v
            for p, v in cj.assignment:
                base[Atom(p, (1,) * p.arity)] = v
            rows = []
            for bits in itertools.product((False, True), repeat=len(cross)):
                values = dict(base)
                values.update(zip(cross, bits))
                if not all(_eval_qf(m, values) for m in inst):
                    continue
                per_pred = []
                for p in binary:
                    t = sum(1 for a, b in zip(cross, bits)
                            if a.pred == p and b)
                    f = sum(1 for a, b in zip(cross, bits)
                            if a.pred == p and not b)
                    per_pred.append((p.name, t, f))
                rows.append(tuple(per_pred))
            table[(i, j)] = tuple(rows)
    return table


def _direction(matrix: Formula, first: int, second: int) -> dict:
    fv = sorted(free_variables(matrix), key=lambda v: v.name)
    if len(fv) == 2:
        return {fv[0]: first, fv[1]: second}
    if len(fv) == 1:
        return {fv[0]: first}
    return {}


# --- compiled theories ------------------------------------------------------

@dataclass(frozen=True)
class _Branch:
    nullary_values: tuple[tuple[str, bool], ...]
    cells: tuple[Cell, ...]
    cell_counts: tuple[tuple[tuple[str, int, int], ...], ...]
    pair_counts: dict


@dataclass(frozen=True)
class CompiledTheory:
    vocabulary: tuple[Predicate, ...]
    branches: tuple[_Branch, ...]
    # (1, -1) weight pairs of the relaxation predicates introduced by
    # Skolemization; applied on top of caller weights at evaluation time.
    skolem_weights: tuple[tuple[str, tuple[int, int]], ...] = ()

    def wfomc(self, w, wbar, d: Domain):
        if self.skolem_weights:
            w = w.updated({k: v[0] for k, v in self.skolem_weights})
            wbar = wbar.updated({k: v[1] for k, v in self.skolem_weights})
        total = 0
        for branch in self.branches:
            factor = 1
            for name, value in branch.nullary_values:
                factor = factor * (w(name) if value else wbar(name))
            cells = _cell_weights(branch.cell_counts, w, wbar)
            pairs = _pair_weights(branch.pair_counts, len(branch.cells), w, wbar)
            value, _ = _config_sum(d.size, cells, pairs)
            total = total + factor * value
        if not isinstance(total, int):
            if total != total or abs(total) > _MAGNITUDE_LIMIT:
                raise NumericOverflowError(
                    "weighted count left the floating-point range")
        return total

    def composition_count(self, d: Domain) -> int:
        """Number of cell compositions the sum visits, over all branches."""
        return sum(math.comb(d.size + len(b.cells) - 1, len(b.cells) - 1)
                   for b in self.branches if b.cells)


def _cell_weights(cell_counts, w, wbar) -> list:
    out = []
    for counts in cell_counts:
        weight = 1
        for name, t, f in counts:
            weight = weight * cpow(w(name), t) * cpow(wbar(name), f)
        out.append(weight)
    return out


def _pair_weights(pair_counts, n_cells, w, wbar) -> list:
    r = [[0] * n_cells for _ in range(n_cells)]
    for (i, j), rows in pair_counts.items():
        total = 0
        for counts in rows:
            term = 1
            for name, t, f in counts:
                term = term * cpow(w(name), t) * cpow(wbar(name), f)
            total = total + term
        r[i][j] = total
        r[j][i] = total
    return r


def compile_theory(t: Fo2Theory) -> CompiledTheory:
    """Weight-independent compilation: normalize, Skolemize, branch on
    nullary atoms, and tabulate cells and cross-assignment counts."""
    vocab = _Vocabulary(t.vocabulary)
    records = []
    for s in t.sentences:
        _normalize_sentence(s, vocab, records)
    records, _skw = _skolemize_records(records, vocab)
    nullary = sorted(p.name for p in vocab.preds if p.arity == 0)
    element_preds = [p for p in vocab.preds if p.arity in (1, 2)]

    branches = []
    for bits in itertools.product((False, True), repeat=len(nullary)):
        values = dict(zip(nullary, bits))
        matrices1 = []
        matrices2 = []
        feasible = True
        for rec in records:
            if isinstance(rec, _Prop):
                m = _fold(_subst_nullary(rec.matrix, values))
                if not (isinstance(m, Truth) and m.value):
                    feasible = False
                    break
            elif isinstance(rec, _Forall1):
                m = _fold(_subst_nullary(rec.matrix, values))
                if isinstance(m, Truth):
                    if not m.value:
                        feasible = False
                        break
                else:
                    matrices1.append(m)
            elif isinstance(rec, _Forall2):
                m = _fold(_subst_nullary(rec.matrix, values))
                if isinstance(m, Truth):
                    if not m.value:
                        feasible = False
                        break
                else:
                    matrices2.append(m)
            else:
                raise TypeError(f"unexpected record after Skolemization: {rec}")
        if not feasible:
            continue
        cells = _enumerate_cells(element_preds, matrices1 + matrices2)
        cell_counts = []
        for cell in cells:
            counts = tuple((p.name, int(v), int(not v))
                           for p, v in cell.assignment)
            cell_counts.append(counts)
        pair_counts = _pair_table(matrices2, element_preds, cells)
        branches.append(_Branch(tuple(zip(nullary, bits)), tuple(cells),
                                tuple(cell_counts), pair_counts))
    return CompiledTheory(tuple(vocab.preds), tuple(branches),
                          tuple(sorted(_skw.items())))


def _subst_nullary(f: Formula, values: dict) -> Formula:
    if isinstance(f, Atom):
        if f.pred.arity == 0 and f.pred.name in values:
            return TRUE if values[f.pred.name] else FALSE
        return f
    if isinstance(f, Truth):
        return f
    if isinstance(f, Not):
        return Not(_subst_nullary(f.body, values))
    if isinstance(f, (And, Or, Implies, Iff)):
        return type(f)(_subst_nullary(f.left, values),
                       _subst_nullary(f.right, values))
    raise TypeError(f"quantifier inside matrix: {f!r}")


def _config_sum(n: int, cell_weights: list, r: list):
    """Sum over compositions of n elements into cells, in colexicographic
    order, of multinomial(n; counts) * prod w_i^{n_i} * prod r_ii^{C(n_i,2)}
    * prod_{i<j} r_ij^{n_i n_j}.  Returns (value, compositions_visited)."""
    c = len(cell_weights)
    if c == 0:
        return (1 if n == 0 else 0), 0
    pow_cache: dict = {}

    def rpow(i: int, j: int, e: int):
        key = (i, j, e)
        got = pow_cache.get(key)
        if got is None:
            got = cpow(r[i][j], e)
            pow_cache[key] = got
        return got

    total = 0
    leaves = 0
    # Assign the last cell's count in the outermost loop so completed
    # compositions appear in colexicographic order.
    assigned: list[tuple[int, int]] = []

    def rec(idx: int, remaining: int, acc):
        nonlocal total, leaves
        if idx == 0:
            k = remaining
            term = acc
            if k:
                term = term * cpow(cell_weights[0], k)
                term = term * rpow(0, 0, k * (k - 1) // 2)
                for j, nj in assigned:
                    term = term * rpow(0, j, k * nj)
            total += term
            leaves += 1
            return
        for k in range(remaining + 1):
            if k == 0:
                rec(idx - 1, remaining, acc)
                continue
            term = acc * math.comb(remaining, k)
            term = term * cpow(cell_weights[idx], k)
            term = term * rpow(idx, idx, k * (k - 1) // 2)
            for j, nj in assigned:
                term = term * rpow(idx, j, k * nj)
            assigned.append((idx, k))
            rec(idx - 1, remaining - k, term)
            assigned.pop()

    rec(c - 1, n, 1)
    return total, leaves


def lifted_wfomc(t: Fo2Theory, w, wbar, d: Domain):
    """Weighted model count over all worlds of the theory's vocabulary,
    polynomial in the domain size.  Skolemizes internally as needed."""
    return compile_theory(t).wfomc(w, wbar, d)
