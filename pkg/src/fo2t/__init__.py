"""Satisfiability workbench for two-variable logic with one transitive relation."""
from .formula import FragmentClass, Signature, classify_fragment, parse, to_nnf, to_text
from .normal_form import NormalForm, scottify, verify_equisat_small
from .structure import Structure, check_model, cliques, royal_part, splice

__version__ = "0.1.0"

__all__ = [
    "FragmentClass",
    "Signature",
    "classify_fragment",
    "parse",
    "to_nnf",
    "to_text",
    "NormalForm",
    "scottify",
    "verify_equisat_small",
    "Structure",
    "check_model",
    "cliques",
    "royal_part",
    "splice",
]
