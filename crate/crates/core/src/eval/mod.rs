//! Gallery ranking, AP / mAP, CMC and the result tables.

mod metrics;
mod ranking;
mod report;

pub use metrics::{average_precision, evaluate, EvalOptions, EvalResult, DEFAULT_RANKS};
pub use ranking::{rank_gallery, GalleryEntry, RankedList};
pub use report::{Report, ReportRow, REPORT_VERSION};
