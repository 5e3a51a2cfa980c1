"""Closed-form data for the projective line, shared by the model and
acceptance tests."""

from affmodel.polyalg import AlgebraMap, FinitelyPresentedAlgebra, Ideal, ideal_intersection, polynomial_ring
from affmodel.pushout import fiber_product_from_ambient, induced_map

# model coordinates written in the closed-form coordinates x, y, z, w, t
IDENTIFICATION = {"x": "x", "a1_1": "x+w", "a1_2": "y", "b1_2": "y+z-w", "g1_1": "t"}


def closed_form_ring(field):
    return polynomial_ring("x y z w t", field)


def closed_form_ideal(field):
    """((w, t) ∩ (w - z, t - (xy - 1))) in k[x, y, z, w, t]."""
    R = closed_form_ring(field)
    x, y, z, w, t = R.gens
    return ideal_intersection(Ideal(R, [w, t]), Ideal(R, [w - z, t - (x * y - 1)]))


def identified_ideal(M, identification=IDENTIFICATION):
    """The model's defining ideal pushed through the identification."""
    R = closed_form_ring(M.algebra.field)
    imgs = [R(identification[n]) for n in M.algebra.names]
    phi = AlgebraMap(FinitelyPresentedAlgebra.free(M.algebra.ring), FinitelyPresentedAlgebra.free(R), imgs)
    return Ideal(R, [phi.raw(g) for g in M.algebra.ideal.gens]), phi


def mutual_membership(I, J):
    return all(J.contains(g) for g in I.gens) and all(I.contains(g) for g in J.gens)


def closed_form_pushout(field):
    """The same algebra as a fiber product over k[x, y, z] glued along
    z = 0 = xy - 1, with gluing variables named w and t."""
    R = polynomial_ring("x y z", field)
    x, y, z = R.gens
    return fiber_product_from_ambient(R, Ideal(R, []), Ideal(R, []), [z, x * y - 1], aux_names=("w", "t"))


def induced_identification(M):
    """Second route: the map from the model to the closed form induced by
    the chart-level identifications, and its inverse."""
    r = M.result
    ref = closed_form_pushout(M.algebra.field)
    xl, yl = r.to_x.target, r.to_y.target
    x, y, z = ref.ambient.gens
    fwd = induced_map(r, ref, AlgebraMap(xl, ref.to_x.target, [x, x + z, y]),
                      AlgebraMap(yl, ref.to_y.target, [y, x, y + z])).compose(M.from_trim)
    X, Y = xl.ring.gens, yl.ring.gens
    back = induced_map(ref, r, AlgebraMap(ref.to_x.target, xl, [X[0], X[2], X[1] - X[0]]),
                       AlgebraMap(ref.to_y.target, yl, [Y[1], Y[0], Y[2] - Y[0]]))
    back = AlgebraMap(ref.algebra, M.algebra, [M.to_trim(g) for g in back.images])
    return fwd, back, ref
