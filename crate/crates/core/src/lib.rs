//! Exact combinatorics of Newton strata for unramified groups.

pub mod error;
pub mod rational;
pub mod laurent;
pub mod polygons;
pub mod root_data;
pub mod satake;
pub mod truncation;
pub mod traces;
pub mod nonvanish;

pub use error::{Result, StrataError};
pub use rational::{Rat, Vector};
pub use root_data::{
    build_root_datum, ClassicalType, Family, GroupDescriptor, ParabolicType, RootDatum, WeylKind,
};
pub use laurent::{QPoly, TraceValue};
pub use polygons::{enumerate_b, NewtonPoint, Polygon};
pub use satake::{SphericalFunction, UnramifiedCharacter};
pub use nonvanish::{Certificate, RepresentationClass, Verdict};
pub use traces::{Divisibility, RepresentationSpec, TraceResult};
