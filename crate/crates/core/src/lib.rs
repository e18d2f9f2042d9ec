//! Chidamber & Kemerer object-oriented metrics with a rule-based quality
//! assessment and cross-version comparison.

pub mod frontend;
pub mod metrics;
pub mod model;
pub mod report;
pub mod rules;
pub mod table;
pub mod versions;

pub use metrics::{compute_all, format_value, Metric, MetricMeans, MetricRecord, ProjectMetrics};
pub use model::{load_class_model, validate_model, CallTarget, ClassInfo, ClassModel, FieldInfo, MethodInfo};
