//! Instance library and the on-disk instance description.

mod generators;
mod spec;

pub use generators::{
    make_convex_scheduling, make_deterministic, make_random_finite, make_sigmoidal_scheduling,
    ObjectiveFamily,
};
pub use spec::{
    Certificates, ConstraintSpec, DistributedSpec, InstanceSpec, LoadedInstance, NodeSpec,
    StateSpec, SPEC_VERSION,
};
