//! Benchmark harness for the GLNSA solver: batch runs, brute-force oracle,
//! CSV/JSON reports and Gantt SVG export.

pub mod bench;
pub mod bestknown;
pub mod gantt;
pub mod oracle;
pub mod report;
