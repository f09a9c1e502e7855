//! Zero-dimensional sublevel-set persistence of sampled 1-D functions.
//!
//! A series is read as the piecewise-linear function through its samples,
//! extended past both ends by continuing the first and last non-flat edges
//! as rays. A ray that descends contributes a component born at `-inf`, so
//! the endpoint is recorded as a minimum of height `-inf`; a rising ray makes
//! the endpoint a maximum of height `+inf`. Only pairs with both coordinates
//! finite are kept; the one component that never dies is stored separately
//! as the essential class.
//!
//! Runs of equal consecutive samples (plateaus) are collapsed to their first
//! index before extrema are classified.

mod bottleneck;
mod bruteforce;
mod diagram;
mod extrema;
mod fast;
mod radix;

pub use bottleneck::bottleneck_distance;
pub use bruteforce::{sublevel_persistence_bruteforce, ORACLE_MAX_LEN};
pub use diagram::{lifetimes, PersistenceDiagram, PersistencePair};
pub use extrema::{extract_extrema, Extremum, ExtremaList, ExtremumKind};
pub use fast::sublevel_persistence;
