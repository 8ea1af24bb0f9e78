"""Small shared pieces for the test suite."""

from facetlang.facets import STAR, Facet, LabelId
from facetlang.interp import run_source
from facetlang.facets import render


def run(source):
    """Run source, return the list of bare-expression values."""
    _, values = run_source(source)
    return values


def run1(source):
    values = run(source)
    assert values, "program produced no bare-expression value"
    return values[-1]


def rendered(source):
    return [render(v) for v in run(source)]


def rendered1(source):
    return render(run1(source))


def labels(*names):
    """Fresh LabelIds with ordinals in argument order."""
    return [LabelId(i, n) for i, n in enumerate(names)]


def project(value, assignment):
    """Ground-truth projection: walk the tree picking each label's side."""
    while isinstance(value, Facet):
        value = value.left if assignment[value.label] else value.right
    return value


def all_assignments(label_list):
    out = [{}]
    for lab in label_list:
        out = [{**a, lab: bit} for a in out for bit in (True, False)]
    return out
