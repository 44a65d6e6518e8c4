"""Builders for parametrised families of models and the shipped catalog."""

from .assembly import Clause, ConstraintReport, direct_sum, relabel_model
from .bases import BASE_NAMES, base_by_name, flat_base, kahler_form, product_base, so3_base, sphere_base, u2_base
from .builders import (D2N2_PAIRING, dimL1_model, dimL2_model, dimL3_model, dimLge4_model, lie_group_model,
                       plane_wave_model, vertical_model)
from .extension import ExtensionInput, d2n2_extension, extend_product, extension_clauses, extension_instances
from .families import (FAMILIES, GRID_VALUES, LABEL_CASES, Family, FamilyParams, build_family,
                       case_matches_label, catalog, default_grid, family_constraint_check, get_family, iter_grid)
from .weak import build_weak_type, weak_type_clauses

__all__ = [
    "BASE_NAMES", "Clause", "ConstraintReport", "D2N2_PAIRING", "ExtensionInput", "FAMILIES", "Family",
    "FamilyParams", "GRID_VALUES", "LABEL_CASES", "base_by_name", "build_family", "build_weak_type",
    "case_matches_label", "catalog", "d2n2_extension", "default_grid", "dimL1_model", "dimL2_model",
    "dimL3_model", "dimLge4_model", "direct_sum", "extend_product", "extension_clauses", "extension_instances",
    "family_constraint_check", "flat_base", "get_family", "iter_grid", "kahler_form", "lie_group_model",
    "plane_wave_model", "product_base", "relabel_model", "so3_base", "sphere_base", "u2_base", "vertical_model",
    "weak_type_clauses",
]
