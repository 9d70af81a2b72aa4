//! Per-subject feature tables and normalized binary task datasets.

mod table;
mod task;

pub use table::{build_tables, FeatureRecord, FeatureTable, SubjectFeatures, TableKind, Tables, MISSING};
pub use task::{make_task, make_task_for_groups, Scaler, Task, TaskDataset};
