//! Seeded synthetic pen recordings for four age-group archetypes.

mod generate;
mod params;

pub use generate::{
    generate_cohort, generate_subject, read_manifest, subject_id, subject_seed, write_cohort, ManifestEntry, SyntheticRecording,
    MANIFEST_FILE,
};
pub use params::{CohortConfig, GroupParams};
