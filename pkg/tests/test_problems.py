import numpy as np
import pytest

from fde.errors import ProblemFileError, UnknownProblem, UnsupportedFamily
from fde.kernels import BcFamily
from fde.problems import (
    BUILTIN_NAMES,
    builtin,
    builtin_spec,
    bundled_path,
    dump_problem,
    load_problem,
    parse_problem,
    passes_residual,
    residual,
    resolve,
)

MINIMAL = """\
order = 3
interval = 1
rhs = u + v
phi = t/2
bc_family = third_a
bc = 0, 0, 0
"""


@pytest.mark.parametrize("name", BUILTIN_NAMES)
def test_builtin_round_trip(name):
    spec = builtin_spec(name)
    again = parse_problem(dump_problem(spec))
    assert again == spec


@pytest.mark.parametrize("name", BUILTIN_NAMES)
def test_builtin_residuals(name):
    res = residual(builtin(name))
    assert res["equation"] <= 1e-6
    assert res["bc"] <= 1e-6


def test_builtin_shapes():
    assert builtin("ex4_1").lipschitz == (2.76, 2.13)
    assert builtin("ex4_3").lipschitz == (0.25, 0.25)
    assert builtin("ex7_2").order == 5
    assert builtin("ex5_1").bc_family is BcFamily.FOURTH_CLAMPED
    assert bundled_path("ex4_1").exists()


def test_ex4_6_reading_is_recorded():
    spec = builtin_spec("ex4_6")
    assert spec.note.startswith("reading:")
    assert passes_residual(spec.to_problem())


def test_wrong_reading_fails_residual():
    text = MINIMAL.replace("rhs = u + v", "rhs = u/2").replace("bc = 0, 0, 0", "bc = 1, 1, e") + "exact = exp(t)\n"
    assert not passes_residual(load_problem(text))


def test_minimal_file():
    p = load_problem(MINIMAL)
    assert p.order == 3 and p.interval_length == 1.0 and p.exact is None
    with pytest.raises(ValueError):
        residual(p)


def test_comments_and_bracket_interval():
    text = "# header\n" + MINIMAL.replace("interval = 1", "interval = [0, 2]  # trailing")
    assert parse_problem(text).interval == 2.0


def test_load_from_path(tmp_path):
    path = tmp_path / "mine.fde"
    path.write_text(MINIMAL)
    assert load_problem(path).name == "mine"
    assert load_problem(str(path)).name == "mine"
    assert resolve(str(path)).name == "mine"
    with pytest.raises(ProblemFileError):
        load_problem(tmp_path / "missing.fde")


def test_resolve():
    assert resolve("ex4_2").name == "ex4_2"
    with pytest.raises(UnknownProblem):
        resolve("nope_nothing_here")
    with pytest.raises(UnknownProblem):
        builtin("ex9_9")


@pytest.mark.parametrize(
    "text,line",
    [
        (MINIMAL + "colour = red\n", 7),
        (MINIMAL + "order = 3\n", 7),
        (MINIMAL + "note =\n", 7),
        (MINIMAL + "just words\n", 7),
        (MINIMAL.replace("rhs = u + v", "rhs = u +"), 3),
        (MINIMAL.replace("rhs = u + v", "rhs = u + w"), 3),
        (MINIMAL.replace("order = 3", "order = three"), 1),
        (MINIMAL.replace("interval = 1", "interval = [1, 2]"), 2),
        (MINIMAL + "lipschitz = 1\n", 7),
    ],
)
def test_file_errors_carry_line_numbers(text, line):
    with pytest.raises(ProblemFileError) as info:
        parse_problem(text)
    assert info.value.line == line


def test_missing_key():
    with pytest.raises(ProblemFileError) as info:
        parse_problem(MINIMAL.replace("phi = t/2\n", ""))
    assert "phi" in str(info.value)


def test_unknown_family():
    with pytest.raises(UnsupportedFamily):
        parse_problem(MINIMAL.replace("bc_family = third_a", "bc_family = sixth"))


def test_family_order_mismatch():
    with pytest.raises(UnsupportedFamily):
        load_problem(MINIMAL.replace("order = 3", "order = 4"))


def test_problem_is_callable_on_arrays():
    p = builtin("ex4_1")
    t = np.linspace(0, 1, 7)
    assert p.rhs(t, p.exact(t), p.exact(p.phi(t))).shape == t.shape
