from __future__ import annotations

import copy
import json

import numpy as np
import pytest

from conftest import EXAMPLE_DOC, make_example
from fraccreep.errors import ProblemFileError
from fraccreep.problem_file import dump_problem, parse_problem, problem_from_dict, problem_to_dict
from fraccreep.solver import DelayTerm


def doc(**changes):
    d = copy.deepcopy(EXAMPLE_DOC)
    d.update(changes)
    return d


def term_doc(j, **changes):
    d = copy.deepcopy(EXAMPLE_DOC)
    d["terms"][j].update(changes)
    return d


def test_parses_example(example_file):
    p = parse_problem(example_file)
    assert (p.alpha, p.lam, p.horizon, len(p.terms)) == (0.5, 1.0, 1.0, 3)
    assert [t.delay for t in p.terms] == pytest.approx([1, 0.5, 1 / 3])
    assert [t.lipschitz for t in p.terms] == pytest.approx([0.25, 0.2, 1 / 6])
    assert p.terms[1].b(0.5) == 0.25
    assert p.history(-0.5) == -0.5


def test_equals_programmatic_example(example_file):
    assert parse_problem(example_file) == make_example()


def test_lipschitz_derived_for_affine():
    d = copy.deepcopy(EXAMPLE_DOC)
    for t in d["terms"]:
        del t["lipschitz"]
    p = problem_from_dict(d)
    assert [t.lipschitz for t in p.terms] == pytest.approx([0.25, 0.2, 1 / 6])


def test_lipschitz_required_for_nonlinear():
    d = term_doc(0, g="sin(x) + 1")
    del d["terms"][0]["lipschitz"]
    with pytest.raises(ProblemFileError) as info:
        problem_from_dict(d)
    assert info.value.field == "terms[0].lipschitz"


def test_round_trip(example_file):
    p = parse_problem(example_file)
    text = dump_problem(p)
    again = problem_from_dict(json.loads(text))
    assert again == p
    assert dump_problem(again) == text


def test_grid_step():
    assert problem_from_dict(doc(grid_step=1 / 256)).cells() == 256
    with pytest.raises(ProblemFileError, match="grid_step"):
        problem_from_dict(doc(grid_step=0.3))


@pytest.mark.parametrize(
    "document,field,fragment",
    [
        (doc(terms=[]), "terms", "at least one delay term required"),
        (doc(history="t + 1"), "history", "history must vanish at 0"),
        (doc(alpha=1.5), "alpha", "(0, 1]"),
        (doc(alpha="abc"), "alpha", "constant expression"),
        (doc(alpha=True), "alpha", "number"),
        (doc(schema_version=2), "schema_version", "unsupported"),
        (doc(extra=1), "extra", "unknown"),
        (doc(horizon=-1), "horizon", "positive"),
        (doc(**{"lambda": 0}), "lambda", "positive"),
        (term_doc(0, delay=0), "terms[0].delay", "positive"),
        (term_doc(0, delay=2), "terms[0].delay", "exceeds"),
        (term_doc(1, b="t +"), "terms[1].b", "syntax"),
        (term_doc(2, g="t + 1"), "terms[2].g", "unknown name"),
        (term_doc(2, color="red"), "terms[2].color", "unknown"),
        (term_doc(0, b_sup=-1), "terms[0].b_sup", "non-negative"),
        (term_doc(0, lipschitz=0), "terms[0].lipschitz", "positive"),
    ],
)
def test_rejections_name_the_field(document, field, fragment):
    with pytest.raises(ProblemFileError) as info:
        problem_from_dict(document)
    assert info.value.field == field
    assert fragment in str(info.value)


def test_missing_field():
    d = doc()
    del d["history"]
    with pytest.raises(ProblemFileError, match="history: missing"):
        problem_from_dict(d)


def test_invalid_json(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text('{"alpha": 0.5,\n "lambda": }')
    with pytest.raises(ProblemFileError, match="line 2"):
        parse_problem(path)


def test_missing_file(tmp_path):
    with pytest.raises(ProblemFileError, match="cannot read"):
        parse_problem(tmp_path / "nope.json")


def test_non_expression_problem_not_serialisable():
    p = make_example(terms=(DelayTerm(np.cos, np.exp, 1.0, 0.5),))
    with pytest.raises(ProblemFileError, match="terms\\[0\\].b"):
        problem_to_dict(p)
