"""Exact polynomial arithmetic, Gröbner bases, and finitely presented algebras."""

from .algebra import (
    AlgebraMap,
    FinitelyPresentedAlgebra,
    IllDefinedMap,
    Localization,
    NotAUnit,
    NotInImage,
    extend_to_localization,
    inverse_map,
    invert,
    is_isomorphism,
    is_surjective,
    kernel_of_map,
    localize,
    product_algebra,
    simplify,
    substitute_point,
    tensor_affine,
    tensor_product,
)
from .field import GF, QQ, Field, PrimeField, RationalField, field_from_spec
from .groebner import buchberger, divide, is_groebner_basis, normal_form, s_polynomial
from .ideal import Ideal, elimination_ideal, eliminate, fresh_name, ideal_intersection, ideal_membership, transfer
from .oracle import macaulay_membership, macaulay_subring_elements, subalgebra_contains
from .parse import PolynomialSyntaxError, format_polynomial, parse_polynomial
from .ring import GREVLEX, LEX, MonomialOrder, Polynomial, PolynomialRing, block_order, polynomial_ring

__all__ = [name for name in dir() if not name.startswith("_")]
