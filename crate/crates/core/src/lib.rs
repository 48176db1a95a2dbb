//! Planning toolkit for Wi-Fi network design.
//!
//! The toolkit decomposes network design into two steps: access-point
//! location (choose a cover `S` of candidate sites so that every test point
//! is covered) and frequency assignment (assign each installed AP one of
//! `|F|` non-overlapping channels). Both steps maximize *access efficiency*,
//! the sum over test points of the data rate scaled by `1/(1 + interferers)`.
//!
//! Modules:
//!
//! - [`instance`] — problem data model, random 2D generators, JSON file I/O
//! - [`topology`] — derived set structures (covering, neighbor and
//!   association-related sets) and induced associations
//! - [`efficiency`] — the four access-efficiency objectives
//! - [`aploc`] — AP location solvers (exact search and local search) and
//!   interference-scenario enumeration
//! - [`freqassign`] — frequency assignment solvers and the AP overlap graph
//!   coloring reduction
//! - [`milp`] — 0-1 linear model builders for the five formulations, LP file
//!   emission, solution checking and design embedding
//! - [`oracle`] — independent brute-force references used by the test suites
//! - [`pipeline`] — the two-phase alpha-sweep pipeline with CSV reporting

pub mod aploc;
pub mod efficiency;
pub mod freqassign;
pub mod instance;
pub mod milp;
pub mod oracle;
pub mod pipeline;
pub mod topology;

pub use efficiency::{Alpha, EfficiencyValue};
pub use instance::{GeneratorConfig, Instance, Propagation};
pub use topology::{Association, Cover, NotACover, Topology};
