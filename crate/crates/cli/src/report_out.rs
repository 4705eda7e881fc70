//! Output rendering: JSON with full precision, CSV, and fixed-width tables
//! rounded to six significant digits.

use qsl_core::bounds::{BoundReport, BoundValue};

/// Six significant digits; plain notation in the everyday range, scientific
/// outside it. Full f64 precision stays in JSON only.
pub fn sig6(x: f64) -> String {
    if !x.is_finite() {
        return format!("{x}");
    }
    if x == 0.0 {
        return "0".to_string();
    }
    let a = x.abs();
    if !(1e-4..1e7).contains(&a) {
        return format!("{:.5e}", x);
    }
    let mag = a.log10().floor() as i32;
    let decimals = (5 - mag).clamp(0, 17) as usize;
    let s = format!("{:.*}", decimals, x);
    // Trim trailing zeros but keep at least one digit after the point.
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

/// Full-precision CSV cell: empty when absent, "inf" for the sentinel.
pub fn bound_cell(b: &BoundValue) -> String {
    match b.value() {
        Some(v) => v.to_string(),
        None => match b {
            BoundValue::Infinite { .. } => "inf".to_string(),
            _ => String::new(),
        },
    }
}

pub const REPORT_CSV_HEADER: &str = "t,hbar,dim,visibility,phase,bargmann_angle,bures_angle,\
delta_h,mean_h,e_de,h_psd,mt,ml,combined,chau,improved_chau,bures_baseline";

pub fn report_csv_row(r: &BoundReport) -> String {
    format!(
        "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
        r.t_total,
        r.hbar,
        r.dim,
        r.visibility,
        r.phase,
        r.bargmann_angle,
        r.bures_angle,
        r.delta_h,
        r.mean_h,
        r.e_de,
        r.h_psd,
        bound_cell(&r.mt_bound),
        bound_cell(&r.ml_bound),
        bound_cell(&r.combined_bound),
        bound_cell(&r.chau_bound),
        bound_cell(&r.improved_chau_bound),
        bound_cell(&r.bures_baseline_bound),
    )
}

/// One comparison table per report: quantities first, then every bound next
/// to the elapsed time and its slack.
pub fn report_table(r: &BoundReport) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "instance: dim={} T={} hbar={} (generator {})\n",
        r.dim,
        sig6(r.t_total),
        sig6(r.hbar),
        if r.h_psd { "PSD" } else { "indefinite" }
    ));
    out.push_str(&format!(
        "  visibility={} phase={} s0={} theta_B={} dH={} <H>={} E_DE={}\n",
        sig6(r.visibility),
        sig6(r.phase),
        sig6(r.bargmann_angle),
        sig6(r.bures_angle),
        sig6(r.delta_h),
        sig6(r.mean_h),
        sig6(r.e_de),
    ));
    out.push_str("  bound              value        slack (T - bound)\n");
    for (name, b) in [
        ("uncertainty (MT)", &r.mt_bound),
        ("mean-energy (ML)", &r.ml_bound),
        ("combined", &r.combined_bound),
        ("chau", &r.chau_bound),
        ("improved chau", &r.improved_chau_bound),
        ("bures baseline", &r.bures_baseline_bound),
    ] {
        match b.value() {
            Some(v) => out.push_str(&format!(
                "  {:<18} {:<12} {}\n",
                name,
                sig6(v),
                sig6(r.t_total - v)
            )),
            None => {
                let why = match b {
                    BoundValue::Infinite { reason } => format!("inf ({reason})"),
                    BoundValue::Absent { reason } => format!("- ({reason})"),
                    BoundValue::Finite(_) => unreachable!(),
                };
                out.push_str(&format!("  {:<18} {}\n", name, why));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sig6_rounds_sensibly() {
        assert_eq!(sig6(std::f64::consts::FRAC_PI_2), "1.5708");
        assert_eq!(sig6(0.204124145231932), "0.204124");
        assert_eq!(sig6(0.0), "0");
        assert_eq!(sig6(123456.789), "123457");
        assert_eq!(sig6(-0.00012345678), "-0.000123457");
        assert_eq!(sig6(3.9e-16), "3.90000e-16");
    }
}
