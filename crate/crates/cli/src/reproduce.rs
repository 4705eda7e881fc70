//! The `reproduce` command: recompute the worked examples and audit them
//! against their reference values, emitting a match/mismatch verdict per
//! value plus reconciliation notes for the ones that disagree.

use serde::Serialize;

use qsl_core::bounds::{combined_bound, ml_bound, mt_bound_constant};
use qsl_core::cptp::{canonical_bound, canonical_system, cptp_bound, dilate};
use qsl_core::eig::propagator;
use qsl_core::ensemble::{random_axis, random_bloch, rng_from_seed};
use qsl_core::matrix::{dot_pauli, ComplexMatrix};
use qsl_core::seeding;
use qsl_core::states::DensityMatrix;

use crate::report_out::sig6;

/// Tolerance for references printed to two decimal places.
const PRINTED_TOL: f64 = 5e-3;
/// Tolerance for references with exact closed forms.
const EXACT_TOL: f64 = 1e-9;

#[derive(Debug, Serialize)]
pub struct AuditRow {
    pub name: String,
    pub computed: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reference: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub abs_diff: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    pub verdict: &'static str,
}

impl AuditRow {
    fn compare(name: &str, computed: f64, reference: f64, tol: f64) -> Self {
        let diff = (computed - reference).abs();
        Self {
            name: name.to_string(),
            computed,
            reference: Some(reference),
            abs_diff: Some(diff),
            tolerance: Some(tol),
            verdict: if diff <= tol { "match" } else { "mismatch" },
        }
    }

    fn check(name: &str, computed: f64, tol: f64) -> Self {
        Self {
            name: name.to_string(),
            computed,
            reference: Some(0.0),
            abs_diff: Some(computed.abs()),
            tolerance: Some(tol),
            verdict: if computed.abs() <= tol { "pass" } else { "fail" },
        }
    }

    fn info(name: &str, computed: f64) -> Self {
        Self {
            name: name.to_string(),
            computed,
            reference: None,
            abs_diff: None,
            tolerance: None,
            verdict: "info",
        }
    }
}

#[derive(Debug, Serialize)]
pub struct AuditReport {
    pub example: String,
    pub rows: Vec<AuditRow>,
    pub notes: Vec<String>,
    /// True when every internal-consistency check passed (reference
    /// mismatches do not count against this).
    pub internally_consistent: bool,
}

impl AuditReport {
    fn finish(example: &str, rows: Vec<AuditRow>, notes: Vec<String>) -> Self {
        let internally_consistent = rows.iter().all(|r| r.verdict != "fail");
        Self {
            example: example.to_string(),
            rows,
            notes,
            internally_consistent,
        }
    }

    pub fn to_table(&self) -> String {
        let mut out = format!("audit: {}\n", self.example);
        out.push_str(&format!(
            "  {:<44} {:>14} {:>14} {:>10}  verdict\n",
            "quantity", "computed", "reference", "|diff|"
        ));
        for row in &self.rows {
            let reference = row.reference.map(sig6).unwrap_or_default();
            let diff = row.abs_diff.map(sig6).unwrap_or_default();
            out.push_str(&format!(
                "  {:<44} {:>14} {:>14} {:>10}  {}\n",
                row.name,
                sig6(row.computed),
                reference,
                diff,
                row.verdict
            ));
        }
        if !self.notes.is_empty() {
            out.push_str("notes:\n");
            for n in &self.notes {
                out.push_str(&format!("  - {n}\n"));
            }
        }
        out.push_str(&format!(
            "internally consistent: {}\n",
            self.internally_consistent
        ));
        out
    }
}

/// Worked single-qubit instance: axis n = (1/sqrt2, 1/sqrt3, -1/sqrt6),
/// Bloch vector (0, 0, 1/2), H = n.sigma + I, elapsed time a = pi/2.
pub fn qubit_example() -> AuditReport {
    let n = [
        1.0 / 2.0_f64.sqrt(),
        1.0 / 3.0_f64.sqrt(),
        -1.0 / 6.0_f64.sqrt(),
    ];
    let r = [0.0, 0.0, 0.5];
    let rho = DensityMatrix::from_bloch(r).unwrap();
    let h = dot_pauli(n).add(&ComplexMatrix::identity(2));
    let t = std::f64::consts::FRAC_PI_2;

    let u = propagator(&h, t, 1.0).unwrap();
    let evolved = rho.evolved(&u).bloch_vector().unwrap();
    let ndotr = n[0] * r[0] + n[1] * r[1] + n[2] * r[2];
    let rule = [
        2.0 * n[0] * ndotr - r[0],
        2.0 * n[1] * ndotr - r[1],
        2.0 * n[2] * ndotr - r[2],
    ];
    let reference_rp = [-4.0 * 3.0_f64.sqrt() / 15.0, 2.0_f64.sqrt() / 15.0, -1.0 / 6.0];

    let report = combined_bound(&rho, &h, t, 1.0).unwrap();
    let mt = report.mt_bound.value().unwrap();
    let ml = report.ml_bound.value().unwrap();
    let combined = report.combined_bound.value().unwrap();
    let baseline = report.bures_baseline_bound.value().unwrap();

    let mut rows = vec![
        AuditRow::check(
            "evolved Bloch vs rule 2n(n.r)-r (max dev)",
            max_dev(&evolved, &rule),
            1e-12,
        ),
        AuditRow::compare("r'_x at a = pi/2", evolved[0], reference_rp[0], 1e-12),
        AuditRow::compare("r'_y at a = pi/2", evolved[1], reference_rp[1], 1e-12),
        AuditRow::compare("r'_z at a = pi/2", evolved[2], reference_rp[2], 1e-12),
        AuditRow::info("visibility at a = pi/2", report.visibility),
        AuditRow::info("bargmann angle s0", report.bargmann_angle),
        AuditRow::info("energy uncertainty dH", report.delta_h),
        AuditRow::compare("uncertainty (MT) bound", mt, 1.09, PRINTED_TOL),
        AuditRow::compare("mean-energy (ML) bound", ml, 0.86, PRINTED_TOL),
        AuditRow::compare("combined bound", combined, 1.09, PRINTED_TOL),
        AuditRow::compare("bures baseline bound", baseline, 0.31, PRINTED_TOL),
        AuditRow::check("combined bound <= T (slack >= 0)", (t - combined).min(0.0), 1e-9),
        AuditRow::check("saturation |combined - T|", combined - t, EXACT_TOL),
        AuditRow::check(
            "ML branch equals pi/2 exactly",
            ml - std::f64::consts::FRAC_PI_2,
            EXACT_TOL,
        ),
    ];

    // Reconciliation: the reference values correspond to the rotation
    // parameter a = atan(2), not the stated pi/2.
    let a2 = 2.0_f64.atan();
    let u2 = propagator(&h, a2, 1.0).unwrap();
    let evolved2 = rho.evolved(&u2.dagger()).bloch_vector().unwrap();
    let mt2 = mt_bound_constant(&rho, &h, a2, 1.0).unwrap();
    let ml2 = ml_bound(&rho, &h, a2, 1.0).unwrap();
    rows.push(AuditRow::compare(
        "r'_x at a = atan(2), conjugate sense",
        evolved2[0],
        reference_rp[0],
        1e-12,
    ));
    rows.push(AuditRow::compare(
        "r'_y at a = atan(2), conjugate sense",
        evolved2[1],
        reference_rp[1],
        1e-12,
    ));
    rows.push(AuditRow::compare(
        "r'_z at a = atan(2), conjugate sense",
        evolved2[2],
        reference_rp[2],
        1e-12,
    ));
    rows.push(AuditRow::compare("MT bound at a = atan(2)", mt2, 1.09, PRINTED_TOL));
    rows.push(AuditRow::compare("ML bound at a = atan(2)", ml2, 0.86, PRINTED_TOL));
    rows.push(AuditRow::compare(
        "(2/pi) x bures baseline at a = pi/2",
        baseline * 2.0 / std::f64::consts::PI,
        0.31,
        PRINTED_TOL,
    ));

    let notes = vec![
        format!(
            "the reference endpoint triple (-4sqrt3/15, sqrt2/15, -1/6) is reproduced \
             exactly by rotation parameter a = atan(2) ~ {} applied with the conjugate \
             unitary; at the stated a = pi/2 the endpoint is 2n(n.r)-r = \
             (-sqrt3/6, -sqrt2/6, -1/3)",
            sig6(a2)
        ),
        format!(
            "the reference bounds 1.09 and 0.86 match the recomputation at a = atan(2) \
             ({}, {}) to their printed precision; at a = pi/2 the recomputed bounds are \
             {} and pi/2, and the combined bound is tight (equals T)",
            sig6(mt2),
            sig6(ml2),
            sig6(mt)
        ),
        format!(
            "the reference baseline 0.31 equals (2/pi) x the Bures-angle analogue \
             computed here ({}) to printed precision",
            sig6(baseline)
        ),
    ];

    AuditReport::finish("qubit-example", rows, notes)
}

fn max_dev(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

/// The saturation family: for any qubit state and axis, H = n.sigma + I at
/// a = pi/2 makes the mean-energy branch exactly pi/2 and keeps the
/// uncertainty branch at or below it.
pub fn saturation_family(seed: u64, instances: usize) -> AuditReport {
    let t = std::f64::consts::FRAC_PI_2;
    let mut max_ml_dev: f64 = 0.0;
    let mut max_mt_excess: f64 = f64::NEG_INFINITY;
    for k in 0..instances {
        let mut rng = rng_from_seed(seeding::derive(seed, "saturation", k as u64));
        let r = random_bloch(&mut rng);
        let n = random_axis(&mut rng);
        let ndotr = n[0] * r[0] + n[1] * r[1] + n[2] * r[2];
        if 1.0 + ndotr < 1e-6 {
            continue;
        }
        let rho = DensityMatrix::from_bloch(r).unwrap();
        let h = dot_pauli(n).add(&ComplexMatrix::identity(2));
        let ml = ml_bound(&rho, &h, t, 1.0).unwrap();
        let mt = mt_bound_constant(&rho, &h, t, 1.0).unwrap();
        max_ml_dev = max_ml_dev.max((ml - t).abs());
        max_mt_excess = max_mt_excess.max(mt - t);
    }
    let rows = vec![
        AuditRow::info("instances", instances as f64),
        AuditRow::check("max |ML - pi/2|", max_ml_dev, 1e-9),
        AuditRow::check("max (MT - pi/2), clamped at 0", max_mt_excess.max(0.0), 1e-9),
    ];
    let notes = vec![
        "for H = n.sigma + I at a = pi/2 the elapsed time equals the combined bound, \
         so the inequality is saturated for every qubit state"
            .to_string(),
    ];
    AuditReport::finish("saturation-family", rows, notes)
}

/// The canonical two-qubit channel family: closed-form bound against the
/// numerically dilated one, plus the theta1 = theta3 = pi reduction.
pub fn cptp_example(seed: u64, instances: usize) -> AuditReport {
    let mut max_closed_vs_dilated: f64 = 0.0;
    let mut max_completeness_dev: f64 = 0.0;
    for k in 0..instances {
        let mut rng = rng_from_seed(seeding::derive(seed, "cptp-example", k as u64));
        let mut draw = |lo: f64, hi: f64| -> f64 { qsl_core::ensemble::uniform(&mut rng, lo, hi) };
        let mu = [draw(-1.5, 1.5), draw(-1.5, 1.5), draw(-1.5, 1.5)];
        let r3 = draw(-1.0, 1.0);
        let t = draw(0.05, 6.0);
        let closed = canonical_bound(mu, r3, t, 1.0).unwrap();
        let sys = canonical_system(mu, 1.0).unwrap();
        let rho = DensityMatrix::from_bloch([0.0, 0.0, r3]).unwrap();
        let numeric = cptp_bound(&rho, &sys, t).unwrap();
        max_closed_vs_dilated = max_closed_vs_dilated.max((closed - numeric).abs());

        let ch = dilate(&sys, t).unwrap();
        let mut sum = ComplexMatrix::zeros(2);
        for e in ch.operators() {
            sum = sum.add(&e.dagger().mul(e));
        }
        max_completeness_dev =
            max_completeness_dev.max(sum.max_abs_diff(&ComplexMatrix::identity(2)));
    }

    // theta1 = theta3 = pi reduction at a grid of theta2.
    let t = 2.0;
    let mu_pi = std::f64::consts::PI / t;
    let mut max_reduction_dev: f64 = 0.0;
    for step in 0..=20 {
        let th2 = step as f64 * std::f64::consts::FRAC_PI_2 / 20.0;
        let r3 = 0.37;
        let mu = [mu_pi, th2 / t, mu_pi];
        let closed = canonical_bound(mu, r3, t, 1.0).unwrap();
        let den = (mu[0] * mu[0] + mu[1] * mu[1] + mu[2] * mu[2] * (1.0 - r3 * r3)
            - 2.0 * mu[0] * mu[1] * r3)
            .sqrt();
        max_reduction_dev = max_reduction_dev.max((closed - th2 / den).abs());
    }

    // One concrete instance for the record.
    let mu = [0.9, 0.4, -0.7];
    let r3 = 0.5;
    let t_inst = 2.0;
    let closed = canonical_bound(mu, r3, t_inst, 1.0).unwrap();
    let sys = canonical_system(mu, 1.0).unwrap();
    let rho = DensityMatrix::from_bloch([0.0, 0.0, r3]).unwrap();
    let e_eff = sys.effective_operator(t_inst).unwrap();
    let v_nu = rho.matrix().trace_mul(&e_eff).norm();

    let rows = vec![
        AuditRow::info("instances", instances as f64),
        AuditRow::check("max |closed-form - dilated bound|", max_closed_vs_dilated, 1e-9),
        AuditRow::check("max Kraus completeness deviation", max_completeness_dev, 1e-9),
        AuditRow::check(
            "max reduction deviation at theta1 = theta3 = pi",
            max_reduction_dev,
            1e-12,
        ),
        AuditRow::info("sample bound at mu=(0.9,0.4,-0.7), r3=0.5, T=2", closed),
        AuditRow::info("sample visibility |Tr(rho E_0)|", v_nu),
    ];
    let notes = vec![
        "the closed form and the numerically dilated bound agree to solver precision; \
         the reduction formula holds exactly on the tested grid"
            .to_string(),
    ];
    AuditReport::finish("cptp-example", rows, notes)
}

/// Worked single-qubit and channel examples as baseline data for tests.
pub fn run(which: &str, seed: u64) -> Option<AuditReport> {
    match which {
        "qubit-example" => Some(qubit_example()),
        "saturation-family" => Some(saturation_family(seed, 100)),
        "cptp-example" => Some(cptp_example(seed, 100)),
        _ => None,
    }
}
