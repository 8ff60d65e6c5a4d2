"""Function-free first-order logic over finite integer domains.

Formulas are immutable trees built from atoms, boolean connectives,
quantifiers and (for the exhaustive oracle only) equality atoms.  Domain
elements are canonically the integers ``0..size-1``, which fixes every
enumeration order used elsewhere in the engine.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterator, Union

from .errors import TooManyVariablesError, VocabularyError


@dataclass(frozen=True)
class Domain:
    """A finite domain; elements are the integers ``0..size-1``."""

    size: int

    def __post_init__(self):
        if self.size < 1:
            raise ValueError("domain size must be >= 1")

    @property
    def elements(self) -> range:
        return range(self.size)


@dataclass(frozen=True, order=True)
class Predicate:
    name: str
    arity: int

    def __post_init__(self):
        if self.arity < 0 or self.arity > 2:
            raise VocabularyError(
                f"predicate {self.name}/{self.arity}: arity must be 0, 1 or 2"
            )

    def __str__(self):
        return f"{self.name}/{self.arity}"


@dataclass(frozen=True, order=True)
class Var:
    name: str

    def __str__(self):
        return self.name


# A term is a logic variable or a concrete domain element.
Term = Union[Var, int]


class Formula:
    """Base class of all formula nodes."""

    __slots__ = ()

    def __and__(self, other: "Formula") -> "Formula":
        return And(self, other)

    def __or__(self, other: "Formula") -> "Formula":
        return Or(self, other)

    def __invert__(self) -> "Formula":
        return Not(self)

    def __str__(self):
        return pretty(self)

    def __repr__(self):
        return f"{type(self).__name__}({pretty(self)!r})"


@dataclass(frozen=True, repr=False)
class Atom(Formula):
    pred: Predicate
    args: tuple[Term, ...]

    def __post_init__(self):
        if len(self.args) != self.pred.arity:
            raise VocabularyError(
                f"atom {self.pred.name} given {len(self.args)} argument(s), "
                f"declared arity is {self.pred.arity}"
            )

    def is_ground(self) -> bool:
        return all(isinstance(a, int) for a in self.args)


@dataclass(frozen=True, repr=False)
class Eq(Formula):
    """Equality between two terms; exhaustive-oracle only."""

    left: Term
    right: Term


@dataclass(frozen=True, repr=False)
class Truth(Formula):
    value: bool


TRUE = Truth(True)
FALSE = Truth(False)


@dataclass(frozen=True, repr=False)
class Not(Formula):
    body: Formula


@dataclass(frozen=True, repr=False)
class And(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True, repr=False)
class Or(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True, repr=False)
class Implies(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True, repr=False)
class Iff(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True, repr=False)
class ForAll(Formula):
    var: Var
    body: Formula


@dataclass(frozen=True, repr=False)
class Exists(Formula):
    var: Var
    body: Formula


_BINARY = {And: "&", Or: "|", Implies: "->", Iff: "<->"}


def conjoin(formulas) -> Formula:
    """Left-associated conjunction; TRUE for an empty sequence."""
    out = None
    for f in formulas:
        out = f if out is None else And(out, f)
    return TRUE if out is None else out


@dataclass(frozen=True)
class PossibleWorld:
    """A finite set of true ground atoms."""

    true_atoms: frozenset[Atom]

    def __post_init__(self):
        for a in self.true_atoms:
            if not a.is_ground():
                raise ValueError(f"world contains non-ground atom {a}")

    def __contains__(self, atom: Atom) -> bool:
        return atom in self.true_atoms

    def __len__(self):
        return len(self.true_atoms)


def free_variables(f: Formula) -> frozenset[Var]:
    """Variables of ``f`` not bound to any quantifier."""
    if isinstance(f, Atom):
        return frozenset(a for a in f.args if isinstance(a, Var))
    if isinstance(f, Eq):
        return frozenset(t for t in (f.left, f.right) if isinstance(t, Var))
    if isinstance(f, Truth):
        return frozenset()
    if isinstance(f, Not):
        return free_variables(f.body)
    if isinstance(f, (And, Or, Implies, Iff)):
        return free_variables(f.left) | free_variables(f.right)
    if isinstance(f, (ForAll, Exists)):
        return free_variables(f.body) - {f.var}
    raise TypeError(f"not a formula: {f!r}")


def all_variables(f: Formula) -> frozenset[Var]:
    """All variable names in the tree, bound or free."""
    if isinstance(f, Atom):
        return frozenset(a for a in f.args if isinstance(a, Var))
    if isinstance(f, Eq):
        return frozenset(t for t in (f.left, f.right) if isinstance(t, Var))
    if isinstance(f, Truth):
        return frozenset()
    if isinstance(f, Not):
        return all_variables(f.body)
    if isinstance(f, (And, Or, Implies, Iff)):
        return all_variables(f.left) | all_variables(f.right)
    if isinstance(f, (ForAll, Exists)):
        return all_variables(f.body) | {f.var}
    raise TypeError(f"not a formula: {f!r}")


def predicates_of(f: Formula) -> frozenset[Predicate]:
    if isinstance(f, Atom):
        return frozenset((f.pred,))
    if isinstance(f, (Eq, Truth)):
        return frozenset()
    if isinstance(f, Not):
        return predicates_of(f.body)
    if isinstance(f, (And, Or, Implies, Iff)):
        return predicates_of(f.left) | predicates_of(f.right)
    if isinstance(f, (ForAll, Exists)):
        return predicates_of(f.body)
    raise TypeError(f"not a formula: {f!r}")


def contains_equality(f: Formula) -> bool:
    if isinstance(f, Eq):
        return True
    if isinstance(f, (Atom, Truth)):
        return False
    if isinstance(f, Not):
        return contains_equality(f.body)
    if isinstance(f, (And, Or, Implies, Iff)):
        return contains_equality(f.left) or contains_equality(f.right)
    if isinstance(f, (ForAll, Exists)):
        return contains_equality(f.body)
    raise TypeError(f"not a formula: {f!r}")


def contains_constants(f: Formula) -> bool:
    """True if any atom argument is a concrete domain element."""
    if isinstance(f, Atom):
        return any(isinstance(a, int) for a in f.args)
    if isinstance(f, Eq):
        return isinstance(f.left, int) or isinstance(f.right, int)
    if isinstance(f, Truth):
        return False
    if isinstance(f, Not):
        return contains_constants(f.body)
    if isinstance(f, (And, Or, Implies, Iff)):
        return contains_constants(f.left) or contains_constants(f.right)
    if isinstance(f, (ForAll, Exists)):
        return contains_constants(f.body)
    raise TypeError(f"not a formula: {f!r}")


def check_variable_limit(f: Formula, limit: int = 2) -> None:
    names = {v.name for v in all_variables(f)}
    if len(names) > limit:
        raise TooManyVariablesError(
            f"formula uses {len(names)} distinct variables "
            f"({', '.join(sorted(names))}); at most {limit} allowed"
        )


def substitute(f: Formula, binding: dict[Var, int]) -> Formula:
    """Replace free occurrences of the bound variables by domain elements."""
    if isinstance(f, Atom):
        return Atom(f.pred, tuple(binding.get(a, a) if isinstance(a, Var) else a
                                  for a in f.args))
    if isinstance(f, Eq):
        left = binding.get(f.left, f.left) if isinstance(f.left, Var) else f.left
        right = binding.get(f.right, f.right) if isinstance(f.right, Var) else f.right
        return Eq(left, right)
    if isinstance(f, Truth):
        return f
    if isinstance(f, Not):
        return Not(substitute(f.body, binding))
    if isinstance(f, (And, Or, Implies, Iff)):
        return type(f)(substitute(f.left, binding), substitute(f.right, binding))
    if isinstance(f, (ForAll, Exists)):
        inner = {v: e for v, e in binding.items() if v != f.var}
        return type(f)(f.var, substitute(f.body, inner)) if inner else f
    raise TypeError(f"not a formula: {f!r}")


def groundings(f: Formula, d: Domain) -> list[Formula]:
    """One ground formula per assignment of elements to the free variables.

    Assignments run lexicographically: variables sorted by name, elements
    ascending, first variable slowest.  A closed formula yields itself.
    """
    fv = sorted(free_variables(f), key=lambda v: v.name)
    if not fv:
        return [f]
    out = []
    for combo in itertools.product(d.elements, repeat=len(fv)):
        out.append(substitute(f, dict(zip(fv, combo))))
    return out


def evaluate(f: Formula, w: PossibleWorld, d: Domain) -> bool:
    """Truth value of a closed formula in ``w``; quantifiers range over ``d``."""
    if isinstance(f, Atom):
        if not f.is_ground():
            raise ValueError(f"cannot evaluate open atom {f}")
        return f in w
    if isinstance(f, Eq):
        if isinstance(f.left, Var) or isinstance(f.right, Var):
            raise ValueError(f"cannot evaluate open equality {f}")
        return f.left == f.right
    if isinstance(f, Truth):
        return f.value
    if isinstance(f, Not):
        return not evaluate(f.body, w, d)
    if isinstance(f, And):
        return evaluate(f.left, w, d) and evaluate(f.right, w, d)
    if isinstance(f, Or):
        return evaluate(f.left, w, d) or evaluate(f.right, w, d)
    if isinstance(f, Implies):
        return (not evaluate(f.left, w, d)) or evaluate(f.right, w, d)
    if isinstance(f, Iff):
        return evaluate(f.left, w, d) == evaluate(f.right, w, d)
    if isinstance(f, ForAll):
        return all(evaluate(substitute(f.body, {f.var: e}), w, d)
                   for e in d.elements)
    if isinstance(f, Exists):
        return any(evaluate(substitute(f.body, {f.var: e}), w, d)
                   for e in d.elements)
    raise TypeError(f"not a formula: {f!r}")


def count_true_groundings(f: Formula, w: PossibleWorld, d: Domain) -> int:
    """N(f, w): number of groundings of ``f`` true in ``w``."""
    return sum(1 for g in groundings(f, d) if evaluate(g, w, d))


def ground_atoms(vocab, d: Domain) -> list[Atom]:
    """Every ground atom over the vocabulary, in the fixed enumeration order:
    predicates in declaration order, argument tuples lexicographic."""
    atoms = []
    for p in vocab:
        for args in itertools.product(d.elements, repeat=p.arity):
            atoms.append(Atom(p, args))
    return atoms


# Precedence levels for the printer; must match the surface grammar.
_PREC = {Iff: 1, Implies: 2, Or: 3, And: 4, Not: 5}


def pretty(f: Formula) -> str:
    """Render a formula in the surface syntax; ``parse_formula`` inverts it."""
    return _pretty(f, 0)


def _term_str(t: Term) -> str:
    return t.name if isinstance(t, Var) else str(t)


def _pretty(f: Formula, parent_prec: int) -> str:
    if isinstance(f, Atom):
        if f.pred.arity == 0:
            return f.pred.name
        return f"{f.pred.name}({', '.join(_term_str(a) for a in f.args)})"
    if isinstance(f, Eq):
        return f"{_term_str(f.left)} = {_term_str(f.right)}"
    if isinstance(f, Truth):
        return "true" if f.value else "false"
    if isinstance(f, Not):
        return "!" + _pretty(f.body, _PREC[Not])
    if isinstance(f, (And, Or, Implies, Iff)):
        prec = _PREC[type(f)]
        # -> is right-associative; & and | associate left.
        if isinstance(f, Implies):
            text = f"{_pretty(f.left, prec + 1)} -> {_pretty(f.right, prec)}"
        else:
            text = (f"{_pretty(f.left, prec)} {_BINARY[type(f)]} "
                    f"{_pretty(f.right, prec + 1)}")
        return f"({text})" if prec < parent_prec else text
    if isinstance(f, (ForAll, Exists)):
        word = "forall" if isinstance(f, ForAll) else "exists"
        text = f"{word} {f.var.name} {_pretty(f.body, 0)}"
        # A quantifier body extends to the end of the expression, so any
        # enclosing operator context needs explicit parentheses.
        return f"({text})" if parent_prec > 0 else text
    raise TypeError(f"not a formula: {f!r}")


def universal_closure(f: Formula) -> Formula:
    """Quantify every free variable universally, in sorted name order."""
    out = f
    for v in sorted(free_variables(f), key=lambda v: v.name, reverse=True):
        out = ForAll(v, out)
    return out


def iter_subformulas(f: Formula) -> Iterator[Formula]:
    yield f
    if isinstance(f, Not):
        yield from iter_subformulas(f.body)
    elif isinstance(f, (And, Or, Implies, Iff)):
        yield from iter_subformulas(f.left)
        yield from iter_subformulas(f.right)
    elif isinstance(f, (ForAll, Exists)):
        yield from iter_subformulas(f.body)
