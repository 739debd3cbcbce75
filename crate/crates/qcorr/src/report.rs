//! Report rendering: structured text objects for correlation reports and
//! proof traces, and comma-separated rows for ensemble scans.
//!
//! Machine output carries 17 significant digits so values round-trip through
//! f64 exactly; human output carries 12.

use crate::correlations::CorrelationReport;
use crate::dilation::{ProofTrace, ProofVerdict};
use crate::mat::DimSplit;
use crate::Mat;

pub const REPORT_SCHEMA_VERSION: u64 = 1;
pub const SCAN_SCHEMA_VERSION: u64 = 1;

/// Header line of every scan table.
pub const SCAN_CSV_HEADER: &str =
    "index,seed,dims,s_a,s_b,s_ab,mi,j,discord,bound_margin,discord_sb_margin,d_minus_sa_sign";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Precision {
    /// 12 significant digits, for eyeballing.
    Human,
    /// 17 significant digits, exact f64 round-trip.
    Machine,
}

impl Precision {
    pub fn format(&self, x: f64) -> String {
        match self {
            Precision::Human => format!("{:.11e}", x),
            Precision::Machine => format!("{:.16e}", x),
        }
    }
}

fn json_f64_list(items: &[f64], p: Precision) -> String {
    let parts: Vec<String> = items.iter().map(|x| p.format(*x)).collect();
    format!("[{}]", parts.join(","))
}

fn json_matrix(m: &Mat, p: Precision) -> String {
    let mut parts = Vec::with_capacity(m.rows() * m.cols());
    for r in 0..m.rows() {
        for c in 0..m.cols() {
            let z = m[(r, c)];
            parts.push(format!("[{},{}]", p.format(z.re), p.format(z.im)));
        }
    }
    format!("{{\"rows\":{},\"cols\":{},\"entries\":[{}]}}", m.rows(), m.cols(), parts.join(","))
}

/// Renders a correlation report as a structured text object.
pub fn render_correlation_report(
    report: &CorrelationReport,
    split: DimSplit,
    seed: u64,
    p: Precision,
) -> String {
    let mut out = String::new();
    out.push_str("{\n");
    out.push_str(&format!("  \"schema_version\": {},\n", REPORT_SCHEMA_VERSION));
    out.push_str("  \"kind\": \"correlation_report\",\n");
    out.push_str(&format!("  \"dims\": [{},{}],\n", split.dim_a, split.dim_b));
    out.push_str(&format!("  \"seed\": {},\n", seed));
    out.push_str(&format!(
        "  \"measurement_class\": \"{}\",\n",
        report.measurement_class.as_str()
    ));
    out.push_str(&format!("  \"optimizer_restarts\": {},\n", report.optimizer_restarts));
    for (name, value) in [
        ("s_a", report.s_a),
        ("s_b", report.s_b),
        ("s_ab", report.s_ab),
        ("mutual_information", report.mutual_information),
        ("classical_j", report.classical_j),
        ("discord", report.discord),
        ("bound_margin", report.bound_margin),
        ("discord_sb_margin", report.discord_sb_margin),
    ] {
        out.push_str(&format!("  \"{}\": {},\n", name, p.format(value)));
    }
    out.push_str(&format!(
        "  \"best_measurement_params\": {}\n",
        json_f64_list(&report.best_measurement.params, p)
    ));
    out.push_str("}\n");
    out
}

/// Renders a proof trace plus its verdict. Matrices are included only when
/// `full` is set; the scalar chain is always present.
pub fn render_proof_report(
    trace: &ProofTrace,
    verdict: &ProofVerdict,
    full: bool,
    p: Precision,
) -> String {
    let split = trace.state.split();
    let mut out = String::new();
    out.push_str("{\n");
    out.push_str(&format!("  \"schema_version\": {},\n", REPORT_SCHEMA_VERSION));
    out.push_str("  \"kind\": \"proof_trace_report\",\n");
    out.push_str(&format!("  \"dims\": [{},{}],\n", split.dim_a, split.dim_b));
    out.push_str(&format!(
        "  \"construction\": \"{}\",\n",
        trace.extension.construction.as_str()
    ));
    out.push_str(&format!("  \"ancilla_dim\": {},\n", trace.extension.ancilla_dim));
    out.push_str(&format!("  \"outcome_count\": {},\n", trace.extension.projectors.len()));

    for (name, value) in [
        ("s_a", trace.s_a),
        ("s_b", trace.s_b),
        ("s_bbbar", trace.s_bbbar),
        ("s_prime_ac", trace.s_p_ac),
        ("s_prime_a", trace.s_p_a),
        ("s_prime_bbbarc", trace.s_p_bbbarc),
        ("s_prime_bbbar", trace.s_p_bbbar),
        ("h_outcomes", trace.h_p),
        ("avg_conditional_entropy", trace.avg_conditional_entropy),
        ("ssa_slack", verdict.ssa_slack),
        ("final_margin_sb", verdict.final_margin_sb),
        ("final_margin_sa", verdict.final_margin_sa),
        ("compression_residual", trace.extension.compression_residual()),
        ("double_sum_residual", trace.double_sum_residual),
        ("literal_vs_luders_residual", trace.literal_vs_luders_residual),
    ] {
        out.push_str(&format!("  \"{}\": {},\n", name, p.format(value)));
    }
    out.push_str(&format!(
        "  \"probabilities\": {},\n",
        json_f64_list(&trace.probabilities, p)
    ));

    out.push_str("  \"checks\": [\n");
    let rendered: Vec<String> = verdict
        .checks
        .iter()
        .map(|c| {
            format!(
                "    {{\"name\": \"{}\", \"residual\": {}, \"tolerance\": {}, \"required\": {}, \"passed\": {}}}",
                c.name,
                p.format(c.residual),
                p.format(c.tolerance),
                c.required,
                c.passed
            )
        })
        .collect();
    out.push_str(&rendered.join(",\n"));
    out.push_str("\n  ],\n");
    out.push_str(&format!("  \"all_required_pass\": {}", verdict.all_required_pass));

    if full {
        out.push_str(",\n  \"matrices\": {\n");
        let mut entries: Vec<String> = Vec::new();
        entries.push(format!("    \"rho_ab\": {}", json_matrix(trace.state.matrix(), p)));
        for (name, m) in [
            ("rho_bbbar", &trace.rho_bbbar),
            ("rho_prime_abbbar", &trace.rho_p_abbbar),
            ("rho_prime_ab", &trace.rho_p_ab),
            ("rho_prime_abbbarc", &trace.rho_p_abbbarc),
            ("rho_prime_ac", &trace.rho_p_ac),
            ("rho_prime_a", &trace.rho_p_a),
            ("rho_prime_bbbarc", &trace.rho_p_bbbarc),
            ("rho_prime_bbbar", &trace.rho_p_bbbar),
            ("stinespring_unitary", &trace.dilation.unitary_u),
        ] {
            entries.push(format!("    \"{}\": {}", name, json_matrix(m, p)));
        }
        for (k, pi) in trace.extension.projectors.projectors().iter().enumerate() {
            entries.push(format!("    \"projector_{}\": {}", k, json_matrix(pi, p)));
        }
        out.push_str(&entries.join(",\n"));
        out.push_str("\n  }\n");
    } else {
        out.push('\n');
    }
    out.push_str("}\n");
    out
}

/// One row of an ensemble scan.
#[derive(Debug, Clone)]
pub struct ScanRow {
    pub index: usize,
    pub seed: u64,
    pub dims: DimSplit,
    pub s_a: f64,
    pub s_b: f64,
    pub s_ab: f64,
    pub mutual_information: f64,
    pub classical_j: f64,
    pub discord: f64,
    pub bound_margin: f64,
    pub discord_sb_margin: f64,
    /// −1, 0, +1: sign of D − S(ρ_A) with a 1e-9 dead zone.
    pub d_minus_sa_sign: i8,
}

impl ScanRow {
    pub fn from_report(index: usize, seed: u64, dims: DimSplit, r: &CorrelationReport) -> Self {
        let delta = r.discord - r.s_a;
        let sign = if delta.abs() <= 1e-9 {
            0
        } else if delta > 0.0 {
            1
        } else {
            -1
        };
        ScanRow {
            index,
            seed,
            dims,
            s_a: r.s_a,
            s_b: r.s_b,
            s_ab: r.s_ab,
            mutual_information: r.mutual_information,
            classical_j: r.classical_j,
            discord: r.discord,
            bound_margin: r.bound_margin,
            discord_sb_margin: r.discord_sb_margin,
            d_minus_sa_sign: sign,
        }
    }

    pub fn to_csv_line(&self, p: Precision) -> String {
        format!(
            "{},{},{}x{},{},{},{},{},{},{},{},{},{}",
            self.index,
            self.seed,
            self.dims.dim_a,
            self.dims.dim_b,
            p.format(self.s_a),
            p.format(self.s_b),
            p.format(self.s_ab),
            p.format(self.mutual_information),
            p.format(self.classical_j),
            p.format(self.discord),
            p.format(self.bound_margin),
            p.format(self.discord_sb_margin),
            self.d_minus_sa_sign
        )
    }
}

/// Renders a whole scan table: schema comment, header, one line per row.
pub fn render_scan_csv(rows: &[ScanRow], p: Precision) -> String {
    let mut out = String::new();
    out.push_str(&format!("# schema_version {}\n", SCAN_SCHEMA_VERSION));
    out.push_str(SCAN_CSV_HEADER);
    out.push('\n');
    for row in rows {
        out.push_str(&row.to_csv_line(p));
        out.push('\n');
    }
    out
}

/// Scan summary printed to standard error.
pub fn scan_summary(rows: &[ScanRow]) -> String {
    let min_bound = rows.iter().map(|r| r.bound_margin).fold(f64::INFINITY, f64::min);
    let min_discord = rows.iter().map(|r| r.discord_sb_margin).fold(f64::INFINITY, f64::min);
    let violations = rows.iter().filter(|r| r.bound_margin < -1e-9).count();
    format!(
        "rows {}  min bound_margin {:.6e}  min discord_sb_margin {:.6e}  violations {}",
        rows.len(),
        min_bound,
        min_discord,
        violations
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::correlations::{quantum_discord, DiscordOptions};
    use crate::dilation::{build_proof_trace, verify_proof, NeumarkConstruction};
    use crate::measurement::computational_basis;
    use crate::state::{bell_phi_plus, werner};

    #[test]
    fn machine_format_round_trips() {
        for &x in &[0.1, 1.0 / 3.0, 0.8112781244591328, -2.5e-17] {
            let s = Precision::Machine.format(x);
            let back: f64 = s.parse().unwrap();
            assert_eq!(back, x);
        }
    }

    #[test]
    fn correlation_report_renders_and_is_deterministic() {
        let rho = werner(0.5).unwrap();
        let opt = DiscordOptions { restarts: 2, seed: 11, ..Default::default() };
        let r = quantum_discord(&rho, &opt).unwrap();
        let a = render_correlation_report(&r, rho.split(), 11, Precision::Machine);
        let b = render_correlation_report(&r, rho.split(), 11, Precision::Machine);
        assert_eq!(a, b);
        assert!(a.contains("\"schema_version\": 1"));
        assert!(a.contains("\"classical_j\""));
    }

    #[test]
    fn proof_report_scalar_vs_full() {
        let trace = build_proof_trace(
            &bell_phi_plus(),
            &computational_basis(2).as_povm(),
            NeumarkConstruction::Rank1,
            crate::dilation::DEFAULT_DIMENSION_CAP,
        )
        .unwrap();
        let verdict = verify_proof(&trace);
        let lean = render_proof_report(&trace, &verdict, false, Precision::Human);
        let full = render_proof_report(&trace, &verdict, true, Precision::Machine);
        assert!(!lean.contains("\"matrices\""));
        assert!(full.contains("\"matrices\""));
        assert!(full.contains("\"stinespring_unitary\""));
        assert!(lean.contains("\"ssa_slack\""));
        assert!(lean.contains("\"all_required_pass\": true"));
    }

    #[test]
    fn scan_csv_layout() {
        let rho = bell_phi_plus();
        let opt = DiscordOptions { restarts: 2, seed: 3, ..Default::default() };
        let r = quantum_discord(&rho, &opt).unwrap();
        let row = ScanRow::from_report(0, 3, rho.split(), &r);
        let csv = render_scan_csv(&[row], Precision::Machine);
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), "# schema_version 1");
        assert_eq!(lines.next().unwrap(), SCAN_CSV_HEADER);
        let data = lines.next().unwrap();
        assert_eq!(data.split(',').count(), SCAN_CSV_HEADER.split(',').count());
        assert!(data.starts_with("0,3,2x2,"));
    }
}
