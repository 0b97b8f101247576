"""Assignment-based evaluator used as an independent oracle in the tests."""
from fo2t.formula import And, Atom, Const, Eq, Exists, Forall, Iff, Implies, Not, Or


def naive_holds(f, A, env=None):
    env = dict(env or {})
    U, B = A.relations()
    sig = A.sig

    def ev(g, env):
        if isinstance(g, Const):
            return g.value
        if isinstance(g, Eq):
            return env[g.left] == env[g.right]
        if isinstance(g, Atom):
            vals = tuple(env[v] for v in g.args)
            if len(vals) == 1:
                return bool(U[vals[0], sig.unary.index(g.pred)])
            return bool(B[vals[0], vals[1], sig.binary.index(g.pred)])
        if isinstance(g, Not):
            return not ev(g.arg, env)
        if isinstance(g, And):
            return all(ev(a, env) for a in g.args)
        if isinstance(g, Or):
            return any(ev(a, env) for a in g.args)
        if isinstance(g, Implies):
            return (not ev(g.left, env)) or ev(g.right, env)
        if isinstance(g, Iff):
            return ev(g.left, env) == ev(g.right, env)
        if isinstance(g, (Forall, Exists)):
            vals = (ev(g.body, {**env, g.var: a}) for a in A.elements)
            return all(vals) if isinstance(g, Forall) else any(vals)
        raise TypeError(g)

    return ev(f, env)
