//! CSV and JSON artifacts written by the experiments.

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use acs_core::solver::StepReport;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::CliError;

pub const RANK_HISTORY_CSV: &str = "rank_history.csv";
pub const CONVERGENCE_CSV: &str = "convergence.csv";
pub const COMPLEXITY_CSV: &str = "complexity.csv";
pub const GMRES_SCALING_CSV: &str = "gmres_scaling.csv";
pub const GMRES_CSV: &str = "gmres.csv";
pub const SUMMARY_JSON: &str = "summary.json";

/// GMRES iteration counts of the stages of one step, written as `a;b;c`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct StageIterations(pub Vec<usize>);

impl Serialize for StageIterations {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let text: Vec<String> = self.0.iter().map(|k| k.to_string()).collect();
        s.serialize_str(&text.join(";"))
    }
}

impl<'de> Deserialize<'de> for StageIterations {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        if text.is_empty() {
            return Ok(Self(Vec::new()));
        }
        text.split(';')
            .map(|p| p.parse().map_err(serde::de::Error::custom))
            .collect::<Result<_, _>>()
            .map(Self)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankHistoryRecord {
    pub t: f64,
    pub rank_before_trunc: usize,
    pub rank_after_trunc: usize,
    pub basis_size_x: usize,
    pub basis_size_y: usize,
    pub krylov_iters: usize,
    pub gmres_iters: StageIterations,
    pub residual: f64,
}

impl From<&StepReport> for RankHistoryRecord {
    fn from(r: &StepReport) -> Self {
        Self {
            t: r.t,
            rank_before_trunc: r.rank_before_trunc,
            rank_after_trunc: r.rank_after_trunc,
            basis_size_x: r.basis_size_x,
            basis_size_y: r.basis_size_y,
            krylov_iters: r.krylov_iters,
            gmres_iters: StageIterations(r.gmres_iters.clone()),
            residual: r.residual,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRecord {
    pub integrator: String,
    pub n: usize,
    pub dt: f64,
    pub lambda_d: f64,
    pub l1_error: f64,
    /// Order observed between this step size and the previous row; empty on
    /// the first row.
    pub observed_order: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplexityRecord {
    pub n: usize,
    pub dt: f64,
    /// Empty when timing is disabled.
    pub wall_time_s: Option<f64>,
    pub max_rank: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GmresScalingRecord {
    pub rank: usize,
    pub solve_time_s: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GmresRecord {
    pub n: usize,
    pub preconditioned: bool,
    pub iteration: usize,
    pub residual: f64,
}

/// Summary of a `run`, written as JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub example: String,
    pub integrator: String,
    pub n: usize,
    pub dt: f64,
    pub lambda_d: f64,
    pub lambda_a: f64,
    pub t_final: f64,
    pub steps: usize,
    pub final_residual: f64,
    pub max_rank: usize,
    pub final_rank: usize,
    /// L¹ distance of the final solution to the equilibrium, for problems
    /// that have one.
    pub steady_state_error: Option<f64>,
    pub wall_time_s: Option<f64>,
    pub seed: u64,
}

pub fn write_csv<T: Serialize>(writer: impl Write, rows: &[T]) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(writer);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

/// Writes `rows` with their header. An empty table still gets its header.
pub fn write_csv_file<T: Serialize>(path: &Path, header: &str, rows: &[T]) -> Result<(), CliError> {
    let mut f = File::create(path)?;
    if rows.is_empty() {
        writeln!(f, "{header}")?;
        return Ok(());
    }
    write_csv(f, rows)
}

pub fn read_csv<T: DeserializeOwned>(reader: impl Read) -> Result<Vec<T>, CliError> {
    let mut r = csv::Reader::from_reader(reader);
    Ok(r.deserialize().collect::<Result<Vec<T>, _>>()?)
}

pub fn read_csv_file<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>, CliError> {
    read_csv(File::open(path)?)
}

pub const RANK_HISTORY_HEADER: &str =
    "t,rank_before_trunc,rank_after_trunc,basis_size_x,basis_size_y,krylov_iters,gmres_iters,residual";
pub const CONVERGENCE_HEADER: &str = "integrator,n,dt,lambda_d,l1_error,observed_order";
pub const COMPLEXITY_HEADER: &str = "n,dt,wall_time_s,max_rank";
pub const GMRES_SCALING_HEADER: &str = "rank,solve_time_s";
pub const GMRES_HEADER: &str = "n,preconditioned,iteration,residual";

#[cfg(test)]
mod tests {
    use super::*;

    fn header_of<T: Serialize>(row: &T) -> String {
        let mut buf = Vec::new();
        write_csv(&mut buf, std::slice::from_ref(row)).unwrap();
        String::from_utf8(buf).unwrap().lines().next().unwrap().to_string()
    }

    #[test]
    fn headers_are_exact() {
        let rank = RankHistoryRecord {
            t: 0.1,
            rank_before_trunc: 5,
            rank_after_trunc: 3,
            basis_size_x: 12,
            basis_size_y: 12,
            krylov_iters: 1,
            gmres_iters: StageIterations(vec![4, 5]),
            residual: 1e-9,
        };
        assert_eq!(header_of(&rank), RANK_HISTORY_HEADER);
        let conv = ConvergenceRecord {
            integrator: "be".into(),
            n: 8,
            dt: 0.1,
            lambda_d: 1.0,
            l1_error: 0.5,
            observed_order: None,
        };
        assert_eq!(header_of(&conv), CONVERGENCE_HEADER);
        let cx = ComplexityRecord {
            n: 8,
            dt: 0.1,
            wall_time_s: Some(0.2),
            max_rank: 3,
        };
        assert_eq!(header_of(&cx), COMPLEXITY_HEADER);
        assert_eq!(
            header_of(&GmresScalingRecord {
                rank: 4,
                solve_time_s: None
            }),
            GMRES_SCALING_HEADER
        );
        let g = GmresRecord {
            n: 8,
            preconditioned: true,
            iteration: 0,
            residual: 1.0,
        };
        assert_eq!(header_of(&g), GMRES_HEADER);
    }

    #[test]
    fn stage_iterations_format() {
        let row = RankHistoryRecord {
            t: 1.0,
            rank_before_trunc: 1,
            rank_after_trunc: 1,
            basis_size_x: 1,
            basis_size_y: 1,
            krylov_iters: 1,
            gmres_iters: StageIterations(vec![3, 4, 5]),
            residual: 0.0,
        };
        let mut buf = Vec::new();
        write_csv(&mut buf, std::slice::from_ref(&row)).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.contains(",3;4;5,"));
        assert_eq!(read_csv::<RankHistoryRecord>(buf.as_slice()).unwrap(), vec![row]);
    }

    #[test]
    fn empty_table_keeps_header() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("g.csv");
        write_csv_file::<GmresRecord>(&p, GMRES_HEADER, &[]).unwrap();
        assert_eq!(std::fs::read_to_string(&p).unwrap().trim(), GMRES_HEADER);
        assert!(read_csv_file::<GmresRecord>(&p).unwrap().is_empty());
    }
}
