//! Indicator-based subset selection problem (ISSP) instances and exact
//! landscape analysis.
//!
//! The crate covers the full pipeline: generating non-dominated point sets
//! on seven Pareto-front shapes, evaluating seven quality indicators over
//! k-of-n subsets, enumerating the whole solution space into a dense
//! fitness table, computing exact landscape measures (optima, plateaus,
//! neutrality, ruggedness, fitness-distance correlation, basins), building
//! local optima networks with escape edges, and running the three baseline
//! subset-selection methods.

pub mod assignment;
pub mod error;
pub mod indicators;
pub mod instance;
pub mod landscape;
pub mod lon;
pub mod pointset;
pub mod solvers;
pub mod stats;
pub mod subsetspace;

pub use error::{Error, Result};
pub use indicators::{Evaluator, IndicatorConfig, IndicatorKind, IndicatorValue};
pub use instance::IsspInstance;
pub use landscape::{
    compute_basins, fdc, find_optima, neighbor_scan, rank_correlation, BasinMap, Comparator,
    FdcMetric, NeighborScan, OptimaReport, PointDistances,
};
pub use lon::{build_lon, escape_ball_size, LonEdge, LonGraph, LonNode};
pub use pointset::{Point, PointSet, Shape};
pub use solvers::{run_experiment, Method, RunResult};
pub use subsetspace::{ComboSpace, FitnessTable, Subset, DEFAULT_TABLE_BUDGET};
