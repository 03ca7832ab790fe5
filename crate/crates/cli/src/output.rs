//! CSV emission.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use gaoi_core::EnsembleStats;

use crate::CliError;

pub const SUMMARY_HEADER: &str = "policy,num_paths,horizon,p_change,entropy_rate,mean_cum_aoi,se_cum_aoi,mean_cum_delay,se_cum_delay,mean_cum_gaoi,scaled_aoi,residual";
pub const SERIES_HEADER: &str = "n,mean_aoi,mean_gaoi,mean_cum_aoi,mean_cum_gaoi";

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

pub fn summary_row(s: &EnsembleStats) -> String {
    let scaled = s.p_change.map(|p| p * s.cum_aoi.mean);
    format!(
        "{},{},{},{},{},{},{},{},{},{},{},{}",
        s.policy,
        s.num_paths,
        s.horizon,
        opt(s.p_change),
        opt(s.entropy_rate),
        s.cum_aoi.mean,
        s.cum_aoi.se,
        s.cum_delay.mean,
        s.cum_delay.se,
        s.cum_gaoi.mean,
        opt(scaled),
        opt(s.residual.map(|r| r.mean)),
    )
}

pub fn summary_csv(stats: &[EnsembleStats]) -> String {
    let mut out = String::from(SUMMARY_HEADER);
    out.push('\n');
    for s in stats {
        out.push_str(&summary_row(s));
        out.push('\n');
    }
    out
}

pub fn series_csv(stats: &EnsembleStats) -> String {
    let mut out = String::from(SERIES_HEADER);
    out.push('\n');
    for r in &stats.series {
        writeln!(
            out,
            "{},{},{},{},{}",
            r.n, r.mean_aoi, r.mean_gaoi, r.mean_cum_aoi, r.mean_cum_gaoi
        )
        .unwrap();
    }
    out
}

fn write(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|e| CliError::Io(format!("writing {}: {e}", path.display())))
}

fn mkdir(path: &Path) -> Result<(), CliError> {
    fs::create_dir_all(path).map_err(|e| CliError::Io(format!("creating {}: {e}", path.display())))
}

/// `summary.csv` in `dir`, plus `series.csv` in `dir` for a single policy or
/// in `dir/<policy>/` for several.
pub fn write_outputs(dir: &Path, stats: &[EnsembleStats]) -> Result<(), CliError> {
    mkdir(dir)?;
    write(&dir.join("summary.csv"), &summary_csv(stats))?;
    if let [single] = stats {
        write(&dir.join("series.csv"), &series_csv(single))?;
    } else {
        for s in stats {
            let sub = dir.join(s.policy);
            mkdir(&sub)?;
            write(&sub.join("series.csv"), &series_csv(s))?;
        }
    }
    Ok(())
}
