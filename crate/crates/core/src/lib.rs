//! Exact arithmetic for desk-scale models of Morava E-theory coefficient
//! rings, their localizations `L_t`, Lubin–Tate formal group laws, torsion
//! algebras, and the transchromatic character map for abelian `p`-groups.

pub mod error;
pub mod algebra;
pub mod character;
pub mod biseries;
pub mod fgl;
pub mod groups;
pub mod torsion;
pub mod linalg;
pub mod ring;
pub mod series;
pub mod weierstrass;

pub use error::{Error, Result};
pub use ring::{Flavor, MtWeight, RingCtx, RingElem, RingSpec, UnitResult};
