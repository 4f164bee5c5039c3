"""Exact distinction-multiplicity computations for SL_n over quadratic
extensions of small finite fields: field towers, enumerated matrix groups,
Dixon-Schneider character tables, and the verification suite."""

from .ff import (
    AddChar,
    FieldElem,
    FieldTower,
    MultChar,
    TowerError,
    addchars_trivial_on_F,
    all_chars_E,
    all_chars_F,
    build_tower,
    chars_trivial_on_F,
    compose_with_norm,
    frobenius,
    norm,
    restrict_to_F,
    trace,
)

__version__ = "0.1.0"

__all__ = [
    "AddChar",
    "FieldElem",
    "FieldTower",
    "MultChar",
    "TowerError",
    "addchars_trivial_on_F",
    "all_chars_E",
    "all_chars_F",
    "build_tower",
    "chars_trivial_on_F",
    "compose_with_norm",
    "frobenius",
    "norm",
    "restrict_to_F",
    "trace",
    "__version__",
]
