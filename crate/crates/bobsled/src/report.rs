//! Evaluation report (JSON) and plot-ready CSV companions.

use std::fmt::Write;

use bobsled_core::evaluation::{AngleSummary, EvaluationReport};
use serde::Serialize;

use crate::provenance::Provenance;

/// Lateral-model error of one evaluated run [N].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LateralRmse {
    pub run: String,
    pub fitted: f64,
    pub reference: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportDocument<'a> {
    pub provenance: &'a Provenance,
    #[serde(flatten)]
    pub report: &'a EvaluationReport,
    pub lateral_rmse: &'a [LateralRmse],
}

pub fn format_report(
    report: &EvaluationReport,
    rmse: &[LateralRmse],
    provenance: &Provenance,
) -> String {
    let doc = ReportDocument {
        provenance,
        report,
        lateral_rmse: rmse,
    };
    let mut out = serde_json::to_string_pretty(&doc).expect("report serializes to JSON");
    out.push('\n');
    out
}

/// One row per run with the relative losses, for box plots per driver or
/// track.
pub fn losses_csv(report: &EvaluationReport, provenance: &Provenance) -> String {
    let mut out = provenance.comment_lines();
    out += "run,driver,track,runtime,distance,e_tot_loss,de_ice_f,de_ice_r,de_aero,de_tot\n";
    for r in &report.runs {
        let b = &r.breakdown;
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{}",
            r.run,
            r.driver,
            r.track,
            r.runtime,
            r.distance,
            b.e_tot_loss,
            b.de_ice_f,
            b.de_ice_r,
            b.de_aero,
            b.de_tot
        );
    }
    out
}

/// Angle distributions per driver in degrees, for bar charts of the
/// exceedance shares.
pub fn angles_csv(report: &EvaluationReport, provenance: &Provenance) -> String {
    let mut out = provenance.comment_lines();
    out += "driver,angle,count,median_deg,q75_deg,max_deg,above_2deg,above_4deg\n";
    for (driver, stats) in &report.angles {
        let rows: [(&str, &AngleSummary); 3] = [
            ("delta", &stats.delta),
            ("alpha_f", &stats.alpha_f),
            ("alpha_r", &stats.alpha_r),
        ];
        for (name, a) in rows {
            let q = &a.quantiles;
            let _ = writeln!(
                out,
                "{driver},{name},{},{},{},{},{},{}",
                a.count,
                q.median.to_degrees(),
                q.q75.to_degrees(),
                q.max.to_degrees(),
                a.above_2deg,
                a.above_4deg
            );
        }
    }
    out
}
