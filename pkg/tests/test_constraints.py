import pytest
from hypothesis import given, strategies as st

from fdlab.constraints import (
    EQ,
    GEQ,
    LEQ,
    PostError,
    post_alldifferent,
    post_bool_and,
    post_bool_sum,
    post_fix,
    post_le,
    post_lex_leq,
    post_linear,
    post_ne_const,
)
from fdlab.model import BOOL_INT, BOOL_NATIVE, SUM_DECOMPOSED, Model


def _fix(model):
    model.engine.schedule_all()
    return model.engine.fixpoint()


def test_linear_eq_prunes_both_sides():
    model = Model()
    x = model.new_int_var(0, 5)
    y = model.new_int_var(3, 5)
    post_linear(model, [(1, x), (1, y)], EQ, 5)
    assert _fix(model)
    assert model.store.domain_values(x) == [0, 1, 2]
    assert model.store.domain_values(y) == [3, 4, 5]


def test_linear_negative_coefficients():
    model = Model()
    x = model.new_int_var(0, 9)
    y = model.new_int_var(0, 9)
    d = model.new_int_var(-9, 9)
    post_linear(model, [(1, d), (-1, x), (1, y)], EQ, 0)  # d = x - y
    post_fix(model, x, 7)
    post_fix(model, y, 2)
    assert _fix(model)
    assert model.store.value(d) == 5


def test_linear_detects_failure():
    model = Model()
    x = model.new_int_var(0, 2)
    y = model.new_int_var(0, 2)
    post_linear(model, [(1, x), (1, y)], GEQ, 5)
    assert not _fix(model)


def test_linear_rejects_bad_terms():
    model = Model()
    x = model.new_int_var(0, 5)
    with pytest.raises(PostError):
        post_linear(model, [], EQ, 0)
    with pytest.raises(PostError):
        post_linear(model, [(0, x)], EQ, 0)
    with pytest.raises(PostError):
        post_linear(model, [(1, x)], "neq", 0)
    b = model.new_bool_var()
    with pytest.raises(PostError):
        post_linear(model, [(1, b)], EQ, 0)


def test_linear_overflow_contract():
    model = Model()
    x = model.new_int_var(0, 1000)
    with pytest.raises(PostError):
        post_linear(model, [(2**55, x)], LEQ, 0)


def test_alldifferent_value_consistency():
    model = Model()
    xs = [model.new_int_var(0, 3) for _ in range(3)]
    post_alldifferent(model, xs)
    post_fix(model, xs[0], 2)
    assert _fix(model)
    assert model.store.domain_values(xs[1]) == [0, 1, 3]
    assert model.store.domain_values(xs[2]) == [0, 1, 3]


def test_alldifferent_duplicate_assignment_fails():
    model = Model()
    xs = [model.new_int_var(1, 1), model.new_int_var(1, 1)]
    post_alldifferent(model, xs)
    assert not _fix(model)


def test_alldifferent_rejects_bools_and_singletons():
    model = Model()
    with pytest.raises(PostError):
        post_alldifferent(model, [model.new_int_var(0, 3)])
    with pytest.raises(PostError):
        post_alldifferent(model, [model.new_bool_var(), model.new_bool_var()])


def test_ne_const_and_fix():
    model = Model()
    x = model.new_int_var(0, 3)
    post_ne_const(model, x, 2)
    assert _fix(model)
    assert model.store.domain_values(x) == [0, 1, 3]


def test_le_strict_chain():
    model = Model()
    x = model.new_int_var(0, 5)
    y = model.new_int_var(0, 5)
    z = model.new_int_var(0, 5)
    post_le(model, x, y, strict=True)
    post_le(model, y, z, strict=True)
    assert _fix(model)
    assert model.store.max(x) == 3
    assert model.store.min(z) == 2


@pytest.mark.parametrize("bool_mode", [BOOL_NATIVE, BOOL_INT])
def test_bool_and_truth_table(bool_mode):
    import itertools

    for vx, vy in itertools.product([0, 1], repeat=2):
        model = Model(bool_mode=bool_mode)
        z = model.new_01_var()
        x = model.new_01_var()
        y = model.new_01_var()
        post_bool_and(model, z, x, y)
        model.store.assign(x, vx)
        model.store.assign(y, vy)
        assert _fix(model)
        assert model.store.value(z) == (vx and vy)


def test_bool_and_backward_direction():
    model = Model()
    z = model.new_01_var()
    x = model.new_01_var()
    y = model.new_01_var()
    post_bool_and(model, z, x, y)
    model.store.assign(z, 1)
    assert _fix(model)
    assert model.store.value(x) == 1 and model.store.value(y) == 1

    model = Model()
    z = model.new_01_var()
    x = model.new_01_var()
    y = model.new_01_var()
    post_bool_and(model, z, x, y)
    model.store.assign(z, 0)
    model.store.assign(x, 1)
    assert _fix(model)
    assert model.store.value(y) == 0


def test_bool_and_contradiction():
    model = Model()
    z = model.new_01_var()
    x = model.new_01_var()
    y = model.new_01_var()
    post_bool_and(model, z, x, y)
    model.store.assign(z, 0)
    model.store.assign(x, 1)
    model.store.assign(y, 1)
    assert not _fix(model)


@pytest.mark.parametrize("bool_mode", [BOOL_NATIVE, BOOL_INT])
def test_bool_sum_forcing(bool_mode):
    model = Model(bool_mode=bool_mode)
    vs = [model.new_01_var() for _ in range(4)]
    post_bool_sum(model, vs, EQ, 1)
    model.store.assign(vs[0], 1)
    assert _fix(model)
    assert [model.store.value(v) for v in vs[1:]] == [0, 0, 0]

    model = Model(bool_mode=bool_mode)
    vs = [model.new_01_var() for _ in range(3)]
    post_bool_sum(model, vs, GEQ, 3)
    assert _fix(model)
    assert all(model.store.value(v) == 1 for v in vs)


def test_bool_sum_failure():
    model = Model()
    vs = [model.new_01_var() for _ in range(2)]
    post_bool_sum(model, vs, LEQ, 1)
    model.store.assign(vs[0], 1)
    model.store.assign(vs[1], 1)
    assert not _fix(model)


@given(
    st.lists(st.sampled_from([0, 1, None]), min_size=2, max_size=6),
    st.sampled_from([EQ, LEQ, GEQ]),
    st.integers(0, 6),
)
def test_bool_sum_native_matches_int_model(states, rel, c):
    """The counter propagator and the linear remodelling must prune alike."""

    def run(bool_mode):
        model = Model(bool_mode=bool_mode)
        vs = [model.new_01_var() for _ in range(len(states))]
        post_bool_sum(model, vs, rel, c)
        for v, state in zip(vs, states):
            if state is not None:
                model.store.assign(v, state)
        ok = _fix(model)
        return ok, [model.store.domain_values(v) for v in vs] if ok else None

    assert run(BOOL_NATIVE) == run(BOOL_INT)


def test_lex_leq_basic():
    model = Model()
    xs = [model.new_int_var(0, 1) for _ in range(3)]
    ys = [model.new_int_var(0, 1) for _ in range(3)]
    post_lex_leq(model, xs, ys)
    model.store.assign(xs[0], 1)
    assert _fix(model)
    # [1,..] <=lex [y0,..] forces y0 = 1
    assert model.store.value(ys[0]) == 1


def test_lex_leq_strict_on_equal_prefix():
    model = Model()
    xs = [model.new_int_var(1, 1), model.new_int_var(0, 1)]
    ys = [model.new_int_var(1, 1), model.new_int_var(0, 0)]
    post_lex_leq(model, xs, ys, strict=True)
    assert not _fix(model)


def test_lex_leq_tail_decides_strictness():
    model = Model()
    xs = [model.new_int_var(0, 1), model.new_int_var(1, 1)]
    ys = [model.new_int_var(0, 1), model.new_int_var(0, 0)]
    post_lex_leq(model, xs, ys)
    assert _fix(model)
    # the tail forces x < y at position 0: x0=0, y0=1
    assert model.store.value(xs[0]) == 0
    assert model.store.value(ys[0]) == 1


def test_lex_rejects_mismatched_vectors():
    model = Model()
    x = model.new_int_var(0, 1)
    with pytest.raises(PostError):
        post_lex_leq(model, [x], [])


def test_sum_mode_posts_decomposed_pair():
    model = Model(sum_mode=SUM_DECOMPOSED)
    x = model.new_int_var(0, 5)
    y = model.new_int_var(0, 5)
    n = post_linear(model, [(1, x), (1, y)], EQ, 5)
    assert n == 2
    assert len(model.engine.props) == 2
    assert _fix(model)
    assert model.store.max(x) == 5 and model.store.min(x) == 0


def test_decomposed_fixpoint_matches_native():
    def run(sum_mode):
        model = Model(sum_mode=sum_mode)
        x = model.new_int_var(0, 5)
        y = model.new_int_var(3, 5)
        post_linear(model, [(1, x), (1, y)], EQ, 5)
        assert _fix(model)
        return model.store.domain_values(x), model.store.domain_values(y)

    assert run("native") == run(SUM_DECOMPOSED)


def test_constraint_counting_conventions():
    model = Model()
    x = model.new_int_var(0, 5)
    y = model.new_int_var(0, 5)
    post_linear(model, [(1, x), (1, y)], EQ, 5)  # 1 native / 2 decomposed
    post_linear(model, [(1, x)], LEQ, 4)  # 1 / 1
    post_bool_sum(
        model, [model.new_01_var(), model.new_01_var()], LEQ, 1, pair_counted=True
    )  # 1 / 2
    post_ne_const(model, y, 3)  # 1 / 1
    assert model.count_native == 4
    assert model.count_decomposed == 6


@given(
    st.lists(
        st.tuples(st.integers(-3, 3).filter(bool), st.integers(0, 6), st.integers(0, 6)),
        min_size=1,
        max_size=4,
    ),
    st.sampled_from([EQ, LEQ, GEQ]),
    st.integers(-10, 10),
)
def test_linear_fixpoint_is_sound_and_contracting(terms_spec, rel, c):
    """Values surviving propagation can still participate in a support, and
    the fixpoint never contains values outside the original domains."""
    import itertools

    model = Model()
    terms = []
    domains = []
    for coeff, lo, width in terms_spec:
        var = model.new_int_var(lo, lo + width)
        terms.append((coeff, var))
        domains.append(list(range(lo, lo + width + 1)))
    post_linear(model, terms, rel, c)
    ok = _fix(model)

    def sat(combo):
        total = sum(a * v for (a, _), v in zip(terms, combo))
        if rel == EQ:
            return total == c
        return total <= c if rel == LEQ else total >= c

    solutions = [combo for combo in itertools.product(*domains) if sat(combo)]
    if not solutions:
        # bounds reasoning may not prove emptiness, but must never invent it
        if ok:
            assert all(
                model.store.size(v) >= 1 for _, v in terms
            )
        return
    assert ok
    for i, (_, var) in enumerate(terms):
        left = set(model.store.domain_values(var))
        assert left <= set(domains[i])
        # every value used by some solution must survive bounds pruning
        assert {combo[i] for combo in solutions} <= left
