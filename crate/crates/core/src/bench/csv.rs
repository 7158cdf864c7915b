use super::{BenchError, BenchmarkRecord, Summary};
use crate::oracle::SpectrumEntry;
use std::fmt::Write as _;
use std::path::Path;

pub const RECORD_HEADER: &str =
    "r,state,optimizer,repetition,seed,energy,exact,log_error,evaluations,wall_seconds,converged";

pub const SUMMARY_HEADER: &str =
    "r,state,optimizer,count,mean_energy,std_dev,exact,log_error,min_log_error,max_log_error";

pub const EXACT_HEADER: &str = "r,index,energy,n_particles,s_squared,s_z,label";

/// 17 significant digits in scientific notation.
pub fn format_float(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn records_to_csv(records: &[BenchmarkRecord]) -> String {
    let mut s = String::from(RECORD_HEADER);
    s.push('\n');
    for r in records {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{},{},{},{}",
            format_float(r.r),
            r.state,
            r.optimizer,
            r.repetition,
            r.seed,
            format_float(r.energy),
            format_float(r.exact),
            format_float(r.log_error),
            r.evaluations,
            format_float(r.wall_seconds),
            r.converged
        );
    }
    s
}

pub fn summaries_to_csv(summaries: &[Summary]) -> String {
    let mut s = String::from(SUMMARY_HEADER);
    s.push('\n');
    for m in summaries {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{},{},{}",
            format_float(m.r),
            m.state,
            m.optimizer,
            m.count,
            format_float(m.mean_energy),
            format_float(m.std_dev),
            format_float(m.exact),
            format_float(m.log_error),
            format_float(m.min_log_error),
            format_float(m.max_log_error)
        );
    }
    s
}

fn write(path: &Path, text: &str) -> Result<(), BenchError> {
    std::fs::write(path, text).map_err(|source| BenchError::Io { path: path.display().to_string(), source })
}

pub fn emit_csv(records: &[BenchmarkRecord], path: impl AsRef<Path>) -> Result<(), BenchError> {
    write(path.as_ref(), &records_to_csv(records))
}

pub fn emit_summary_csv(summaries: &[Summary], path: impl AsRef<Path>) -> Result<(), BenchError> {
    write(path.as_ref(), &summaries_to_csv(summaries))
}

/// All eigenpairs per bond length.
pub fn emit_exact_csv(spectra: &[(f64, Vec<SpectrumEntry<f64>>)], path: impl AsRef<Path>) -> Result<(), BenchError> {
    let mut s = String::from(EXACT_HEADER);
    s.push('\n');
    for (r, entries) in spectra {
        for (i, e) in entries.iter().enumerate() {
            let _ = writeln!(
                s,
                "{},{},{},{},{},{},{}",
                format_float(*r),
                i,
                format_float(e.energy),
                format_float(e.n_particles),
                format_float(e.s_squared),
                format_float(e.s_z),
                e.label
            );
        }
    }
    write(path.as_ref(), &s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bench::TargetState;
    use crate::optimizers::OptimizerId;

    #[test]
    fn header_only_and_one_row() {
        assert_eq!(records_to_csv(&[]).lines().count(), 1);
        let rec = BenchmarkRecord {
            r: 0.1,
            state: TargetState::Singlet,
            optimizer: OptimizerId::NelderMead,
            repetition: 2,
            seed: 9,
            energy: -1.0,
            exact: -1.1,
            log_error: -1.0,
            evaluations: 10,
            wall_seconds: 0.0,
            converged: false,
        };
        let text = records_to_csv(&[rec]);
        assert_eq!(text.lines().count(), 2);
        let row = text.lines().nth(1).unwrap();
        assert!(row.starts_with("1.0000000000000001e-1,singlet,nelder-mead,2,9,-1.0000000000000000e0,"));
        assert_eq!(row.split(',').count(), RECORD_HEADER.split(',').count());
    }

    #[test]
    fn seventeen_digits_round_trip() {
        for v in [0.1, -1.1372838344885023, 1e-300, 2.5] {
            assert_eq!(format_float(v).parse::<f64>().unwrap(), v);
        }
    }
}
