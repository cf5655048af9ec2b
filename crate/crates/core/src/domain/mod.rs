//! Problem domains that plug into the [`crate::engine`].

pub mod greater_than;
pub mod wellbeing;
