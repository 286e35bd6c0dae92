"""Type and logic translation driven by a user-extensible knowledge base.

Embeddings map a source type onto a target type (totally, or partially under
a side condition); symbol and relation rules map the operations and
predicates of the source theory onto target counterparts; conversions unfold
definitional wrappers on the fly.  Every rule is registered together with a
proof obligation stated as a named lemma.  `db_add` checks the *shape* of
each lemma against the registered rule, and `validate_db` checks the lemmas
themselves against a finite model before the rules are trusted.

`translate_goal` rewrites a goal along the registered rules.  The rewrite is
all-or-nothing: when some subterm has no applicable rule the original goal
is returned untouched, together with a diagnostic naming the obstruction.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from . import terms as T
from .checker import whnf_unfold
from .oracle import EnumerationError, EvalError, Oracle, default_model, reify
from .printer import print_ty
from .syntax import TraktCommand
from .terms import (
    BOOL, INT, Arrow, Const, Eq, Forall, Goal, GlobalEnv, Hyp, IndTy, IsTrue,
    PredApp, Scheme, Var, alpha_eq, arrow, arrow_split, forall_chain,
    forall_split, fresh, impl_chain, mk_app, mk_eq, spine, subst_parallel,
    substitute,
)


class TraktError(T.SnipeError):
    pass


class UntranslatableResidue(TraktError):
    """A subterm of the goal is not covered by any rule in the database."""


# ---------------------------------------------------------------------------
# Knowledge base


@dataclass(frozen=True)
class Embedding:
    """`source` is carried onto `target` by `embed_fn`, with `project_fn` as
    a (one-sided) inverse.  A partial embedding restricts the retraction to
    target values satisfying `cond` (a formula over the variable `cond_var`);
    quantifiers over the source type are then relativised to `cond`."""

    source: T.Ty
    target: T.Ty
    embed_fn: str
    project_fn: str
    cond_var: str | None = None
    cond: object | None = None

    @property
    def is_partial(self) -> bool:
        return self.cond is not None


@dataclass(frozen=True)
class SymbolRule:
    """Term-level rewrite `source a1..an  ~>  template[params := a1'..an']`
    where the primed arguments are the translations of the originals."""

    source: str
    arity: int
    params: tuple[str, ...]
    template: T.Term
    target: "T.Ty | None"  # embedding target the rule belongs to, if any


@dataclass(frozen=True)
class RelationRule:
    """Atom-level rewrite for a predicate (or for equality at a fixed type,
    keyed `("eq", ty)`).  `kind` is "pp" when the template is a formula and
    "pb" when it is a boolean term to be coerced with `= true`.  `src_bool`
    marks rules whose left-hand side is a boolean test `R a1..an = true`
    rather than a Prop atom."""

    key: object
    arity: int
    kind: str
    src_bool: bool
    params: tuple[str, ...]
    template: object
    target: "T.Ty | None"


@dataclass
class KnowledgeDb:
    embeddings: list[Embedding] = field(default_factory=list)
    symbols: dict[str, SymbolRule] = field(default_factory=dict)
    relations: dict[object, RelationRule] = field(default_factory=dict)
    conversions: list[str] = field(default_factory=list)
    claims: list[tuple[str, object]] = field(default_factory=list)

    def embedding_for(self, source: T.Ty, target: T.Ty) -> "Embedding | None":
        for emb in self.embeddings:
            if emb.source == source and emb.target == target:
                return emb
        return None


@dataclass(frozen=True)
class ClaimStatus:
    name: str
    ok: bool
    detail: str = ""


@dataclass(frozen=True)
class TraktReport:
    changed: bool
    fired: tuple[str, ...]
    residue: "str | None" = None


# ---------------------------------------------------------------------------
# Structural helpers


def _replace(x, old: T.Term, new: T.Term):
    """Replace every occurrence of the subterm `old` (structural equality)
    by `new`, in a term or formula."""
    if T.is_term(x) and x == old:
        return new
    if isinstance(x, (T.Var, T.Const, T.IntLit, T.BoolLit, T.TrueF, T.FalseF)):
        return x
    if isinstance(x, T.Ctor):
        return T.Ctor(x.ind, x.name, x.tyargs,
                      tuple(_replace(a, old, new) for a in x.args))
    if isinstance(x, T.App):
        return T.App(_replace(x.fn, old, new), _replace(x.arg, old, new))
    if isinstance(x, T.Lam):
        return T.Lam(x.var, x.ann, _replace(x.body, old, new))
    if isinstance(x, T.Match):
        return T.Match(_replace(x.scrutinee, old, new), x.ind,
                       tuple(T.Branch(b.ctor, b.binders, _replace(b.rhs, old, new))
                             for b in x.branches))
    if isinstance(x, T.Fix):
        return T.Fix(x.name, x.ann, _replace(x.body, old, new))
    if isinstance(x, (T.Forall, T.Exists)):
        return type(x)(x.var, x.ann, _replace(x.body, old, new))
    if isinstance(x, (T.And, T.Or, T.Impl, T.Iff)):
        return type(x)(_replace(x.lhs, old, new), _replace(x.rhs, old, new))
    if isinstance(x, T.Not):
        return T.Not(_replace(x.body, old, new))
    if isinstance(x, T.Eq):
        return T.Eq(x.ty, _replace(x.lhs, old, new), _replace(x.rhs, old, new))
    if isinstance(x, T.PredApp):
        return T.PredApp(x.name, x.tyargs,
                         tuple(_replace(a, old, new) for a in x.args))
    if isinstance(x, T.IsTrue):
        return T.IsTrue(_replace(x.arg, old, new))
    raise TraktError(f"cannot rewrite inside {type(x).__name__}")


def _count(x, target: T.Term) -> int:
    """Number of occurrences of the subterm `target` in `x`."""
    n = 0
    stack = [x]
    while stack:
        y = stack.pop()
        if y == target:
            n += 1
            continue  # occurrences never nest in the shapes we count
        if isinstance(y, T.Ctor):
            stack.extend(y.args)
        elif isinstance(y, T.App):
            stack.extend((y.fn, y.arg))
        elif isinstance(y, (T.Lam, T.Fix, T.Not, T.Forall, T.Exists)):
            stack.append(y.body)
        elif isinstance(y, T.Match):
            stack.append(y.scrutinee)
            stack.extend(b.rhs for b in y.branches)
        elif isinstance(y, (T.And, T.Or, T.Impl, T.Iff)):
            stack.extend((y.lhs, y.rhs))
        elif isinstance(y, T.Eq):
            stack.extend((y.lhs, y.rhs))
        elif isinstance(y, T.PredApp):
            stack.extend(y.args)
        elif isinstance(y, T.IsTrue):
            stack.append(y.arg)
    return n


def _app1(fname: str, arg: T.Term) -> T.Term:
    return T.App(Const(fname, ()), arg)


def _decompose(t: T.Term) -> "tuple[str, list[T.Term]] | None":
    """View `t` as a named head applied to arguments.  Covers both constant
    applications and (saturated) constructor nodes."""
    head, args = spine(t)
    if isinstance(head, Const):
        return head.name, args
    if isinstance(head, T.Ctor):
        return head.name, list(head.args) + args
    return None


def _resolve_ty(env: GlobalEnv, name: str, cmd: TraktCommand) -> T.Ty:
    if name == "Z":
        return INT
    if name == "bool":
        return BOOL
    decl = env.inductives.get(name)
    if decl is not None:
        if decl.params:
            raise TraktError(
                f"line {cmd.line}: cannot embed the parametric type {name}")
        return IndTy(name, ())
    if name in env.base_sorts:
        return T.BaseTy(name)
    raise TraktError(f"line {cmd.line}: unknown type {name}")


def _lemma(env: GlobalEnv, name: str, cmd: TraktCommand):
    f = env.lemmas.get(name)
    if f is None:
        raise TraktError(f"line {cmd.line}: unknown lemma {name}")
    return f


def _check_fn_ty(env: GlobalEnv, name: str, want: T.Ty, cmd: TraktCommand) -> None:
    sch = env.const_scheme(name)
    if sch is None or sch.vars or sch.body != want:
        raise TraktError(
            f"line {cmd.line}: {name} must have type {print_ty(want)}")


# ---------------------------------------------------------------------------
# Registering commands


def db_add(env: GlobalEnv, db: KnowledgeDb, cmd: TraktCommand) -> None:
    """Validate a knowledge-base command against its lemmas and register the
    corresponding rule."""
    if cmd.kind == "embedding":
        _add_embedding(env, db, cmd)
    elif cmd.kind == "symbol":
        _add_symbol(env, db, cmd)
    elif cmd.kind == "relation":
        _add_relation(env, db, cmd)
    elif cmd.kind == "conversion":
        _add_conversion(env, db, cmd)
    else:  # pragma: no cover - the parser only emits the four kinds
        raise TraktError(f"line {cmd.line}: unknown command kind {cmd.kind}")


def build_db(env: GlobalEnv, commands) -> KnowledgeDb:
    db = KnowledgeDb()
    for cmd in commands:
        db_add(env, db, cmd)
    return db


def bool_counterparts(env: GlobalEnv, db: KnowledgeDb) -> dict[str, str]:
    """Map each Prop relation with a registered boolean decision procedure
    to the defined constant implementing it."""
    out: dict[str, str] = {}
    for key, rule in db.relations.items():
        if not isinstance(key, str) or rule.src_bool or rule.kind != "pb":
            continue
        head = _decompose(rule.template)
        if head is not None and head[0] in env.defs:
            out[key] = head[0]
    return out


def _add_embedding(env: GlobalEnv, db: KnowledgeDb, cmd: TraktCommand) -> None:
    src_name, tgt_name, e, p = cmd.args[:4]
    source = _resolve_ty(env, src_name, cmd)
    target = _resolve_ty(env, tgt_name, cmd)
    if source == target:
        raise TraktError(f"line {cmd.line}: embedding source equals target")
    if db.embedding_for(source, target) is not None:
        raise TraktError(
            f"line {cmd.line}: duplicate embedding {src_name} into {tgt_name}")
    _check_fn_ty(env, e, arrow(source, target), cmd)
    _check_fn_ty(env, p, arrow(target, source), cmd)

    sect_name = cmd.args[4]
    sect = _lemma(env, sect_name, cmd)
    want = Forall("x", source,
                  Eq(source, _app1(p, _app1(e, Var("x"))), Var("x")))
    if not alpha_eq(sect, want):
        raise TraktError(
            f"line {cmd.line}: {sect_name} must state "
            f"forall x : {src_name}, {p} ({e} x) = x")

    if len(cmd.args) == 6:  # total embedding
        retr_name = cmd.args[5]
        retr = _lemma(env, retr_name, cmd)
        want = Forall("x", target,
                      Eq(target, _app1(e, _app1(p, Var("x"))), Var("x")))
        if not alpha_eq(retr, want):
            raise TraktError(
                f"line {cmd.line}: {retr_name} must state "
                f"forall x : {tgt_name}, {e} ({p} x) = x")
        emb = Embedding(source, target, e, p)
        db.embeddings.append(emb)
        db.claims.extend([(sect_name, sect), (retr_name, retr)])
        return

    # Partial embedding: conditional retraction plus image condition.
    retr_name, img_name = cmd.args[5], cmd.args[6]
    retr = _lemma(env, retr_name, cmd)
    if not (isinstance(retr, Forall) and retr.ann == target
            and isinstance(retr.body, T.Impl)):
        raise TraktError(
            f"line {cmd.line}: {retr_name} must state "
            f"forall x : {tgt_name}, C x -> {e} ({p} x) = x")
    v, cond, body = retr.var, retr.body.lhs, retr.body.rhs
    want_eq = Eq(target, _app1(e, _app1(p, Var(v))), Var(v))
    if body != want_eq:
        raise TraktError(
            f"line {cmd.line}: conclusion of {retr_name} must be "
            f"{e} ({p} {v}) = {v}")
    img = _lemma(env, img_name, cmd)
    want = Forall("x", source, substitute(cond, v, _app1(e, Var("x"))))
    if not alpha_eq(img, want):
        raise TraktError(
            f"line {cmd.line}: {img_name} must state that the condition of "
            f"{retr_name} holds on the image of {e}")
    emb = Embedding(source, target, e, p, cond_var=v, cond=cond)
    db.embeddings.append(emb)
    db.claims.extend([(sect_name, sect), (retr_name, retr), (img_name, img)])


def _strip_wrapped_args(db: KnowledgeDb, rhs, binders, cmd: TraktCommand):
    """Replace each embedded argument occurrence `e_j x_j` in `rhs` by the
    bare variable `x_j`, checking that no unembedded occurrence remains.
    Returns the rewritten right-hand side and the target type of any
    embedding involved."""
    target = None
    for x, ty in binders:
        embs = [emb for emb in db.embeddings if emb.source == ty]
        if not embs:
            continue
        if len(embs) > 1:
            raise TraktError(
                f"line {cmd.line}: ambiguous embedding for argument {x}")
        emb = embs[0]
        target = target or emb.target
        wrapped = _app1(emb.embed_fn, Var(x))
        n_wrapped = _count(rhs, wrapped)
        n_bare = _count(rhs, Var(x))
        if n_bare != n_wrapped:
            raise TraktError(
                f"line {cmd.line}: every occurrence of {x} on the right-hand "
                f"side must appear under {emb.embed_fn}")
        rhs = _replace(rhs, wrapped, Var(x))
    return rhs, target


def _head_matches(t, name: str) -> bool:
    if isinstance(t, T.IntLit):
        return name == str(t.value)
    if isinstance(t, T.BoolLit):
        return name == ("true" if t.value else "false")
    if isinstance(t, T.PredApp):
        return t.name == name
    if isinstance(t, T.Eq):
        return name == "eq"
    if T.is_term(t):
        d = _decompose(t)
        if d is not None:
            return d[0] == name
    return False


def _add_symbol(env: GlobalEnv, db: KnowledgeDb, cmd: TraktCommand) -> None:
    s, s2, lem_name = cmd.args
    lem = _lemma(env, lem_name, cmd)
    binders, matrix = forall_split(lem)
    if any(isinstance(ty, T.TypeSort) for _, ty in binders):
        raise TraktError(
            f"line {cmd.line}: polymorphic symbol rules are not supported")
    if not isinstance(matrix, Eq):
        raise TraktError(f"line {cmd.line}: {lem_name} must be an equation")
    lhs, rhs = matrix.lhs, matrix.rhs

    # The left-hand side is `s x1 .. xn`, optionally wrapped in the output
    # embedding when the result type of `s` is itself embedded.
    target = None
    d = _decompose(lhs)
    if d is not None and len(d[1]) == 1:
        for emb in db.embeddings:
            if d[0] == emb.embed_fn:
                target = emb.target
                d = _decompose(d[1][0])
                break
    if d is None or d[0] != s:
        raise TraktError(
            f"line {cmd.line}: left-hand side of {lem_name} must be "
            f"{s} applied to the bound variables")
    if list(d[1]) != [Var(x) for x, _ in binders]:
        raise TraktError(
            f"line {cmd.line}: arguments of {s} in {lem_name} must be exactly "
            f"the bound variables, in order")

    template, arg_target = _strip_wrapped_args(db, rhs, binders, cmd)
    target = target or arg_target
    if not _head_matches(template, s2):
        raise TraktError(
            f"line {cmd.line}: right-hand side of {lem_name} does not have "
            f"head {s2}")
    _register_symbol(db, cmd,
                     SymbolRule(s, len(binders),
                                tuple(x for x, _ in binders), template, target))
    db.claims.append((lem_name, lem))


def _register_symbol(db: KnowledgeDb, cmd: TraktCommand, rule: SymbolRule) -> None:
    if rule.source in db.symbols:
        raise TraktError(
            f"line {cmd.line}: duplicate symbol rule for {rule.source}")
    db.symbols[rule.source] = rule


def _add_relation(env: GlobalEnv, db: KnowledgeDb, cmd: TraktCommand) -> None:
    arity_s, r, r2, lem_name = cmd.args
    if not arity_s.isdigit():
        raise TraktError(f"line {cmd.line}: relation arity must be a number")
    arity = int(arity_s)
    lem = _lemma(env, lem_name, cmd)
    binders, matrix = forall_split(lem)
    if len(binders) != arity:
        raise TraktError(
            f"line {cmd.line}: {lem_name} must bind exactly {arity} variables")
    params = tuple(x for x, _ in binders)
    want_args = [Var(x) for x in params]

    if isinstance(matrix, Eq) and matrix.ty == BOOL:
        # bool-to-bool rule: an equation between boolean applications.  It
        # fires at the term level, so it is registered as a symbol rule.
        d = _decompose(matrix.lhs)
        if d is None or d[0] != r or list(d[1]) != want_args:
            raise TraktError(
                f"line {cmd.line}: left-hand side of {lem_name} must be "
                f"{r} applied to the bound variables")
        template, target = _strip_wrapped_args(db, matrix.rhs, binders, cmd)
        if not _head_matches(template, r2):
            raise TraktError(
                f"line {cmd.line}: right-hand side of {lem_name} does not "
                f"have head {r2}")
        _register_symbol(db, cmd, SymbolRule(r, arity, params, template, target))
        db.claims.append((lem_name, lem))
        return

    if not isinstance(matrix, T.Iff):
        raise TraktError(
            f"line {cmd.line}: {lem_name} must be an equivalence or a "
            f"boolean equation")
    lhs, rhs = matrix.lhs, matrix.rhs

    src_bool = False
    if isinstance(lhs, PredApp) and lhs.name == r:
        if list(lhs.args) != want_args:
            raise TraktError(
                f"line {cmd.line}: arguments of {r} in {lem_name} must be "
                f"exactly the bound variables, in order")
        key: object = r
    elif isinstance(lhs, IsTrue):
        d = _decompose(lhs.arg)
        if d is None or d[0] != r or list(d[1]) != want_args:
            raise TraktError(
                f"line {cmd.line}: left-hand side of {lem_name} must be "
                f"the boolean test {r} applied to the bound variables")
        src_bool = True
        key = r
    elif isinstance(lhs, Eq) and r == "eq":
        if arity != 2 or list((lhs.lhs, lhs.rhs)) != want_args:
            raise TraktError(
                f"line {cmd.line}: an equality rule must state "
                f"forall x y, x = y <-> ...")
        key = ("eq", lhs.ty)
    else:
        raise TraktError(
            f"line {cmd.line}: left-hand side of {lem_name} must be an "
            f"atom headed by {r}")

    template, target = _strip_wrapped_args(db, rhs, binders, cmd)
    if isinstance(template, IsTrue):
        kind, template = "pb", template.arg
    else:
        kind = "pp"
    if not _head_matches(template, r2):
        raise TraktError(
            f"line {cmd.line}: right-hand side of {lem_name} does not have "
            f"head {r2}")
    if key in db.relations:
        raise TraktError(f"line {cmd.line}: duplicate relation rule for {r}")
    db.relations[key] = RelationRule(key, arity, kind, src_bool, params,
                                     template, target)
    db.claims.append((lem_name, lem))


def _add_conversion(env: GlobalEnv, db: KnowledgeDb, cmd: TraktCommand) -> None:
    name = cmd.args[0]
    entry = env.defs.get(name)
    if entry is None or entry.body is None:
        raise TraktError(
            f"line {cmd.line}: {name} is not a defined constant")
    if name in db.conversions:
        raise TraktError(f"line {cmd.line}: duplicate conversion {name}")
    db.conversions.append(name)


# ---------------------------------------------------------------------------
# Claim validation


def _inverse_interp(env: GlobalEnv, emb: Embedding, model):
    """Interpret an opaque projection as the inverse of its embedding over
    the enumerated source domain — which is exactly how the registered
    lemmas characterise it."""
    probe = Oracle(env, model)
    table: dict = {}
    default = None
    for s in probe.enumerate_ty(emb.source):
        if default is None:
            default = s
        v = probe.eval_value(T.App(Const(emb.embed_fn, ()), reify(s)))
        if v not in table:
            table[v] = s
    if default is None:
        raise EnumerationError(
            f"embedding source {print_ty(emb.source)} is uninhabited")

    def fn(v):
        return table.get(v, default)

    return 1, fn


def validate_db(env: GlobalEnv, db: KnowledgeDb, model=None) -> list[ClaimStatus]:
    """Evaluate every registered proof obligation in a finite model.

    Opaque projection functions are given the only semantics compatible
    with their lemmas: the partial inverse of the corresponding embedding.
    """
    model = model if model is not None else default_model()
    interp = {}
    for emb in db.embeddings:
        entry = env.defs.get(emb.project_fn)
        if entry is not None and entry.body is None:
            interp[emb.project_fn] = _inverse_interp(env, emb, model)
    oracle = Oracle(env, model, interp=interp)
    out = []
    for name, f in db.claims:
        try:
            ok = bool(oracle.eval_formula(f))
            detail = "" if ok else "falsified in the finite model"
            out.append(ClaimStatus(name, ok, detail))
        except (EvalError, EnumerationError) as exc:
            out.append(ClaimStatus(name, False, f"not evaluable: {exc}"))
    return out


# ---------------------------------------------------------------------------
# Goal translation


class _Translator:
    def __init__(self, env: GlobalEnv, db: KnowledgeDb, embed_target: T.Ty):
        self.env = env
        self.db = db
        self.embed_target = embed_target
        self.actives = [e for e in db.embeddings if e.target == embed_target]
        self.rename: dict[str, str] = {}
        self.used: set[str] = set()
        self.fired: list[str] = []

    # -- bookkeeping

    def _fire(self, what: str) -> None:
        if what not in self.fired:
            self.fired.append(what)

    def _residue(self, why: str) -> UntranslatableResidue:
        return UntranslatableResidue(why)

    def _rule_applies(self, target: "T.Ty | None") -> bool:
        return target is None or target == self.embed_target

    # -- types

    def _source_of(self, ty: T.Ty) -> "Embedding | None":
        for emb in self.actives:
            if ty == emb.source:
                return emb
        return None

    def embed_ty(self, ty: T.Ty) -> T.Ty:
        emb = self._source_of(ty)
        if emb is not None:
            return emb.target
        if isinstance(ty, Arrow):
            return Arrow(self.embed_ty(ty.dom), self.embed_ty(ty.cod))
        return ty

    def _ty_mentions(self, ty) -> bool:
        """Whether a source type occurs anywhere in `ty`, including in
        positions (inductive parameters) the translation cannot reach."""
        if self._source_of(ty) is not None:
            return True
        if isinstance(ty, Arrow):
            return self._ty_mentions(ty.dom) or self._ty_mentions(ty.cod)
        if isinstance(ty, IndTy):
            return any(self._ty_mentions(p) for p in ty.params)
        if isinstance(ty, Scheme):
            return self._ty_mentions(ty.body)
        return False

    def cond_for(self, ty: T.Ty, subject: T.Term):
        """Relativisation guard for a translated binder of original type
        `ty`, or None when the type carries no condition."""
        emb = self._source_of(ty)
        if emb is not None:
            if emb.cond is None:
                return None
            return substitute(emb.cond, emb.cond_var, subject)
        if isinstance(ty, Arrow):
            doms, cod = arrow_split(ty)
            cod_emb = self._source_of(cod)
            if cod_emb is None or cod_emb.cond is None:
                return None
            avoid = set(self.used)
            binders, premises, args = [], [], []
            for dom in doms:
                x = fresh("x", avoid)
                avoid.add(x)
                binders.append((x, self.embed_ty(dom)))
                guard = self.cond_for(dom, Var(x))
                if guard is not None:
                    premises.append(guard)
                args.append(Var(x))
            concl = substitute(cod_emb.cond, cod_emb.cond_var,
                               mk_app(subject, args))
            return forall_chain(binders, impl_chain(premises, concl))
        return None

    # -- scope management

    def _shadow(self, name: str):
        """Mark `name` as re-bound in the current scope; returns a token for
        `_unshadow`."""
        old = self.rename.pop(name, None)
        newly_used = name not in self.used
        self.used.add(name)
        return name, old, newly_used

    def _unshadow(self, token) -> None:
        name, old, newly_used = token
        if old is not None:
            self.rename[name] = old
        if newly_used:
            self.used.discard(name)

    # -- terms

    def tr_term(self, t: T.Term) -> T.Term:
        if isinstance(t, Var):
            return Var(self.rename.get(t.name, t.name))
        if isinstance(t, (T.IntLit, T.BoolLit)):
            return t
        if isinstance(t, T.Lam):
            if not isinstance(t.ann, T.TypeSort) and self._ty_mentions(t.ann):
                raise self._residue(
                    f"function literal binds a variable of the embedded type "
                    f"{print_ty(t.ann)}")
            tok = self._shadow(t.var)
            try:
                body = self.tr_term(t.body)
            finally:
                self._unshadow(tok)
            return T.Lam(t.var, t.ann, body)
        if isinstance(t, T.Match):
            return self._tr_match(t)
        if isinstance(t, T.Fix):
            if self._ty_mentions(t.ann):
                raise self._residue(
                    "recursive function over the embedded type")
            tok = self._shadow(t.name)
            try:
                body = self.tr_term(t.body)
            finally:
                self._unshadow(tok)
            return T.Fix(t.name, t.ann, body)

        head, args = spine(t)
        if isinstance(head, Var):
            h = Var(self.rename.get(head.name, head.name))
            return mk_app(h, [self.tr_term(a) for a in args])
        if isinstance(head, (T.Lam, T.Match, T.Fix)):
            return mk_app(self.tr_term(head), [self.tr_term(a) for a in args])

        if isinstance(head, Const):
            name, hargs = head.name, args
            if name in self.db.conversions:
                unfolded = whnf_unfold(self.env, t, frozenset({name}))
                if unfolded != t:
                    self._fire(f"conversion {name}")
                    return self.tr_term(unfolded)
            for emb in self.actives:
                if name == emb.embed_fn:
                    if len(hargs) != 1:
                        raise self._residue(
                            f"embedding function {name} used as a value")
                    self._fire(self._emb_label(emb))
                    return self.tr_term(hargs[0])
        elif isinstance(head, T.Ctor):
            name, hargs = head.name, list(head.args) + args
        else:  # pragma: no cover - no other term heads exist
            raise self._residue(f"unsupported head {type(head).__name__}")

        rule = self.db.symbols.get(name)
        if rule is not None and self._rule_applies(rule.target):
            if len(hargs) < rule.arity:
                raise self._residue(f"under-applied symbol {name}")
            targs = [self.tr_term(a) for a in hargs]
            out = subst_parallel(rule.template,
                                 dict(zip(rule.params, targs[:rule.arity])))
            self._fire(f"symbol {name}")
            return mk_app(out, targs[rule.arity:])

        if isinstance(head, Const):
            sch = self.env.const_scheme(name)
            if sch is None:
                raise self._residue(f"unknown constant {name}")
            sig = T.subst_ty(sch.body, dict(zip(sch.vars, head.tyargs)))
            if self._ty_mentions(sig) or any(self._ty_mentions(a)
                                             for a in head.tyargs):
                raise self._residue(f"no translation rule for {name}")
            return mk_app(head, [self.tr_term(a) for a in hargs])

        # Constructor of a non-embedded inductive type.
        result_ty = IndTy(head.ind, head.tyargs)
        arg_tys = self.env.ctor_arg_tys(head.ind, head.name, head.tyargs)
        if self._ty_mentions(result_ty) or any(self._ty_mentions(a)
                                               for a in arg_tys):
            raise self._residue(f"no translation rule for constructor {name}")
        return T.Ctor(head.ind, head.name, head.tyargs,
                      tuple(self.tr_term(a) for a in head.args))

    def _emb_label(self, emb: Embedding) -> str:
        return f"embedding {print_ty(emb.source)} into {print_ty(emb.target)}"

    def _tr_match(self, t: T.Match) -> T.Term:
        if t.ind != "bool":
            decl = self.env.inductives[t.ind]
            if decl.params or self._source_of(IndTy(t.ind, ())) is not None:
                # Without the instantiating parameters the branch binder
                # types cannot be checked to be source-free.
                if self.actives:
                    raise self._residue(
                        f"pattern matching over {t.ind} cannot be translated")
            elif any(self._ty_mentions(ty)
                     for c in decl.ctors for _, ty in c.binders):
                raise self._residue(
                    f"pattern matching binds variables of an embedded type")
        scrut = self.tr_term(t.scrutinee)
        branches = []
        for b in t.branches:
            toks = [self._shadow(x) for x in b.binders]
            try:
                rhs = self.tr_term(b.rhs)
            finally:
                for tok in reversed(toks):
                    self._unshadow(tok)
            branches.append(T.Branch(b.ctor, b.binders, rhs))
        return T.Match(scrut, t.ind, tuple(branches))

    # -- formulas

    def tr_formula(self, f):
        if isinstance(f, (T.TrueF, T.FalseF)):
            return f
        if isinstance(f, T.Not):
            return T.Not(self.tr_formula(f.body))
        if isinstance(f, (T.And, T.Or, T.Impl, T.Iff)):
            return type(f)(self.tr_formula(f.lhs), self.tr_formula(f.rhs))
        if isinstance(f, (Forall, T.Exists)):
            return self._tr_quant(f)
        if isinstance(f, IsTrue):
            d = _decompose(f.arg)
            if d is not None:
                rule = self.db.relations.get(d[0])
                if (rule is not None and rule.src_bool
                        and len(d[1]) == rule.arity
                        and self._rule_applies(rule.target)):
                    return self._fire_relation(rule, d[0], d[1])
            return IsTrue(self.tr_term(f.arg))
        if isinstance(f, Eq):
            return self._tr_eq(f)
        if isinstance(f, PredApp):
            return self._tr_predapp(f)
        raise self._residue(  # pragma: no cover - exhaustive over formulas
            f"unsupported formula {type(f).__name__}")

    def _fire_relation(self, rule: RelationRule, name, args):
        targs = [self.tr_term(a) for a in args]
        sub = dict(zip(rule.params, targs))
        out = subst_parallel(rule.template, sub)
        self._fire(f"relation {name if isinstance(name, str) else 'eq'}")
        return IsTrue(out) if rule.kind == "pb" else out

    def _tr_quant(self, f):
        cls = type(f)
        if isinstance(f.ann, T.TypeSort):
            tok = self._shadow(f.var)
            try:
                body = self.tr_formula(f.body)
            finally:
                self._unshadow(tok)
            return cls(f.var, f.ann, body)
        new_ann = self.embed_ty(f.ann)
        if new_ann == f.ann:
            if self._ty_mentions(f.ann):
                raise self._residue(
                    f"binder of type {print_ty(f.ann)} cannot be embedded")
            tok = self._shadow(f.var)
            try:
                body = self.tr_formula(f.body)
            finally:
                self._unshadow(tok)
            return cls(f.var, f.ann, body)
        if self._ty_mentions(new_ann):
            raise self._residue(
                f"binder of type {print_ty(f.ann)} cannot be fully embedded")
        emb = self._source_of(f.ann)
        if emb is None:
            # An arrow type mixing embedded positions.
            doms, cod = arrow_split(f.ann)
            emb = self._source_of(cod) or next(
                (self._source_of(d) for d in doms
                 if self._source_of(d) is not None), None)
        new_var = fresh(f.var + "'", self.used)
        self.used.add(new_var)
        guard = self.cond_for(f.ann, Var(new_var))
        if emb is not None:
            self._fire(self._emb_label(emb))
        old = self.rename.get(f.var)
        self.rename[f.var] = new_var
        try:
            body = self.tr_formula(f.body)
        finally:
            if old is None:
                del self.rename[f.var]
            else:
                self.rename[f.var] = old
        if guard is not None:
            body = T.Impl(guard, body) if cls is Forall else T.And(guard, body)
        return cls(new_var, new_ann, body)

    def _tr_eq(self, f: Eq):
        if isinstance(f.ty, Scheme):
            if self._ty_mentions(f.ty):
                raise self._residue(
                    "polymorphic equation over the embedded type")
            return Eq(f.ty, self.tr_term(f.lhs), self.tr_term(f.rhs))
        rule = self.db.relations.get(("eq", f.ty))
        if rule is not None and self._rule_applies(rule.target):
            return self._fire_relation(rule, ("eq", f.ty), [f.lhs, f.rhs])
        new_ty = self.embed_ty(f.ty)
        if self._ty_mentions(new_ty):
            raise self._residue(
                f"equality at type {print_ty(f.ty)} cannot be embedded")
        if new_ty != f.ty:
            self._fire(self._emb_label(self._source_of(f.ty))
                       if self._source_of(f.ty) else
                       f"embedding {print_ty(f.ty)} into {print_ty(new_ty)}")
        return mk_eq(new_ty, self.tr_term(f.lhs), self.tr_term(f.rhs))

    def _tr_predapp(self, f: PredApp):
        if f.name in self.rename:
            return PredApp(self.rename[f.name], f.tyargs,
                           tuple(self.tr_term(a) for a in f.args))
        rule = self.db.relations.get(f.name)
        if (rule is not None and not rule.src_bool
                and len(f.args) == rule.arity
                and self._rule_applies(rule.target)):
            return self._fire_relation(rule, f.name, list(f.args))
        if f.name in T.BUILTIN_RELS:
            return PredApp(f.name, (), tuple(self.tr_term(a) for a in f.args))
        decl = self.env.inductives.get(f.name)
        if decl is not None:
            sub = dict(zip(decl.params, f.tyargs))
            index_tys = [T.subst_ty(ty, sub) for ty in decl.index_tys]
            if any(self._ty_mentions(ty) for ty in index_tys) or \
                    any(self._ty_mentions(a) for a in f.tyargs):
                raise self._residue(f"no translation rule for {f.name}")
            return PredApp(f.name, f.tyargs,
                           tuple(self.tr_term(a) for a in f.args))
        sch = self.env.const_scheme(f.name)
        if sch is not None:
            sig = T.subst_ty(sch.body, dict(zip(sch.vars, f.tyargs)))
            if self._ty_mentions(sig) or any(self._ty_mentions(a)
                                             for a in f.tyargs):
                raise self._residue(f"no translation rule for {f.name}")
        return PredApp(f.name, f.tyargs,
                       tuple(self.tr_term(a) for a in f.args))

    # -- context entries

    def tr_var_hyp(self, h: Hyp) -> list[Hyp]:
        ty = h.body
        self.used.add(h.name)
        new_ty = self.embed_ty(ty)
        if new_ty == ty:
            if self._ty_mentions(ty):
                raise self._residue(
                    f"context variable {h.name} of type {print_ty(ty)} "
                    f"cannot be embedded")
            return [h]
        if self._ty_mentions(new_ty):
            raise self._residue(
                f"context variable {h.name} of type {print_ty(ty)} "
                f"cannot be fully embedded")
        new_name = fresh(h.name + "'", self.used)
        self.used.add(new_name)
        self.rename[h.name] = new_name
        emb = self._source_of(ty)
        if emb is not None:
            self._fire(self._emb_label(emb))
        out = [Hyp(new_name, new_ty)]
        guard = self.cond_for(ty, Var(new_name))
        if guard is not None:
            out.append(Hyp(fresh(new_name + "_cond", self.used), guard))
            self.used.add(out[-1].name)
        return out


def _seed_names(goal: Goal) -> set[str]:
    names = set()
    for h in goal.hyps:
        names.add(h.name)
        if not h.is_var:
            names |= T.free_vars(h.body)
    names |= T.free_vars(goal.concl)
    return names


def translate_goal(env: GlobalEnv, db: KnowledgeDb, goal: Goal,
                   embed_target: T.Ty = INT, target_logic: str = "Prop",
                   add_claims_as_hyps: bool = False):
    """Translate a goal along the knowledge base.

    Returns `(goal', report)`.  When some subterm is not covered by the
    rules, the original goal is returned unchanged and `report.residue`
    names the obstruction.
    """
    if target_logic not in ("Prop", "Bool"):
        raise TraktError(f"unknown target logic {target_logic!r}")
    tr = _Translator(env, db, embed_target)
    tr.used |= _seed_names(goal)
    try:
        hyps: list[Hyp] = []
        for h in goal.hyps:
            if h.is_var:
                hyps.extend(tr.tr_var_hyp(h))
            else:
                hyps.append(Hyp(h.name, tr.tr_formula(h.body)))
        concl = tr.tr_formula(goal.concl)
    except UntranslatableResidue as exc:
        return goal, TraktReport(False, (), str(exc))
    if target_logic == "Bool":
        hyps = [h if h.is_var else Hyp(h.name, _bool_stage(h.body))
                for h in hyps]
        concl = _bool_stage(concl)
    if add_claims_as_hyps:
        names = {h.name for h in hyps}
        for name, claim in db.claims:
            hname = fresh(f"trakt_{name}", names)
            names.add(hname)
            hyps.append(Hyp(hname, claim))
    out = Goal(tuple(hyps), concl)
    changed = out != goal
    return out, TraktReport(changed, tuple(tr.fired))


# ---------------------------------------------------------------------------
# Boolean stage

_BOOL_OF_PRED = {"Z.le": "Z.leb", "Z.lt": "Z.ltb"}
_BOOL_OF_CONN = {T.And: "Bool.andb", T.Or: "Bool.orb", T.Impl: "Bool.implb",
                 T.Iff: "Bool.eqb"}


def _try_bool(f) -> "T.Term | None":
    """Boolean reflection of a quantifier-free formula, when every atom has
    a boolean counterpart."""
    if isinstance(f, IsTrue):
        return f.arg
    if isinstance(f, T.TrueF):
        return T.BoolLit(True)
    if isinstance(f, T.FalseF):
        return T.BoolLit(False)
    if isinstance(f, Eq):
        if f.ty == INT:
            return mk_app(Const("Z.eqb", ()), [f.lhs, f.rhs])
        if f.ty == BOOL:
            return mk_app(Const("Bool.eqb", ()), [f.lhs, f.rhs])
        return None
    if isinstance(f, PredApp) and f.name in _BOOL_OF_PRED:
        return mk_app(Const(_BOOL_OF_PRED[f.name], ()), list(f.args))
    if isinstance(f, T.Not):
        b = _try_bool(f.body)
        return None if b is None else mk_app(Const("Bool.negb", ()), [b])
    if isinstance(f, (T.And, T.Or, T.Impl, T.Iff)):
        lhs, rhs = _try_bool(f.lhs), _try_bool(f.rhs)
        if lhs is None or rhs is None:
            return None
        return mk_app(Const(_BOOL_OF_CONN[type(f)], ()), [lhs, rhs])
    return None


def _bool_stage(f):
    """Push a formula into the boolean fragment wherever possible, leaving
    a single `= true` coercion around each reflected region."""
    b = _try_bool(f)
    if b is not None:
        return IsTrue(b)
    if isinstance(f, (Forall, T.Exists)):
        return type(f)(f.var, f.ann, _bool_stage(f.body))
    if isinstance(f, (T.And, T.Or, T.Impl, T.Iff)):
        return type(f)(_bool_stage(f.lhs), _bool_stage(f.rhs))
    if isinstance(f, T.Not):
        return T.Not(_bool_stage(f.body))
    return f
