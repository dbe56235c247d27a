//! The ambient finite topos: presheaves of finite sets on a finite poset,
//! natural maps between them, and families fibred over finite index sets.

mod cover;
mod hom;
mod poset;
mod presheaf;

pub use cover::{family_components, Component, Family, FamilyMorphism};
pub use hom::{find_iso, hom_enumerate, hom_find, hom_search, is_isomorphic};
pub use poset::FinPoset;
pub(crate) use presheaf::same_base;
pub use presheaf::{
    connected_components, coproduct, is_connected, is_epi_family, pairing, product, product_n, quotient_by_pairs,
    tuple_coords, tuple_index, Presheaf, PresheafMap,
};

/// `constant_presheaf(s, p)`: every fiber `s`, every restriction the identity.
pub fn constant_presheaf<S: AsRef<str>>(s: &[S], base: std::sync::Arc<FinPoset>) -> Presheaf {
    Presheaf::constant(s, base)
}
