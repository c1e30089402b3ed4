//! Experiment orchestration: configuration, Monte Carlo campaigns and
//! reproduction reports.

mod config;
mod curves;
mod run;
mod table1;

pub use config::{
    CodesSection, CrossoverSource, DecoderSection, ExperimentConfig, Mode, RunSection, ScenarioSection, SplitSection,
    StrategyKind,
};
pub use curves::{
    distortion_at_rate, emit_curves, write_curves_csv, CurveKind, CurveRow, EmpiricalPoint, FIG4_NOISE, FIG5_NOISE,
    FIG6_NOISE,
};
pub use run::{run_experiment, ExperimentReport, SummaryRow, TrialRecord};
pub use table1::{
    compare, published_row, reproduce_table1, row_config, Check, PublishedRow, RowOverrides, Table1Report, Tolerances,
    PUBLISHED_ROWS,
};
