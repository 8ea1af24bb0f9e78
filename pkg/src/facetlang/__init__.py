"""facetlang: a Scheme-like language with faceted execution.

Secure values are facet trees pairing a private view with a public one;
first-class labels carry store-allocated policy functions, and obs projects
a facet away when the policy admits the observer's key.
"""

from .errors import (
    ArityError,
    EvalError,
    FacetEscapeError,
    LangError,
    MissingLabelError,
    NotOracleSafeError,
    ParseError,
    PcConsistencyError,
    PolicyError,
    StarObservedError,
    UnboundVariableError,
    UserError,
    WrongTypeError,
)
from .facets import (
    NIL,
    STAR,
    Address,
    Branch,
    Closure,
    Env,
    Facet,
    LabelId,
    LabelVal,
    Pair,
    Primitive,
    Store,
    construct_facet,
    is_canonical,
    mkfacet,
    neg,
    obs_project,
    pc_extend,
    pos,
    render,
    render_pc,
    store_read,
    store_write,
)
from .interp import EvalResult, Interp, run_source, truthy
from .oracle import (
    OracleReport,
    analyze,
    check_projection_equivalence,
    project_program,
    project_value,
    random_program,
    standard_eval,
)
from .reader import parse_expr, parse_program, unparse, unparse_program

__version__ = "0.1.0"
