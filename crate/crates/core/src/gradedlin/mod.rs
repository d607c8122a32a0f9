//! Graded linear algebra over `S = Sym(V)` with `V` in degree 2: degreewise
//! components of free modules and of quotients `S/α`, minimal generators,
//! kernels, truncations, and specialization to a line `S -> k[T]`.

mod module;
mod poly;
mod polymap;
mod specialize;

pub use module::{
    degree_dim, first_intersection, free_dim, generated_span, minimal_generators, Ambient, Block, Generators,
    GradedMultiset, GradedSpan, Layout,
};
pub use poly::{monomial_basis, LinearQuotient, Monomial, MonomialBasis, Poly};
pub use polymap::{kernel_generators, var, PolyMap};
pub use specialize::{
    graded_torsion_decomposition, specialize_to_line, Line, SpecializedMatrix, TorsionDecomposition,
};
