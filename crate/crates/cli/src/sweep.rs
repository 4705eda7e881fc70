//! The `sweep` command: random (rho, H, T) instances with every bound and
//! its slack, one CSV/JSON row per instance, deterministic in the seed.

use serde::Serialize;

use qsl_core::bounds::combined_bound;
use qsl_core::cptp::{cptp_bound, DilatedSystem};
use qsl_core::ensemble::{
    random_density, random_hermitian, random_psd_hamiltonian, random_pure, rng_from_seed,
};
use qsl_core::seeding;
use qsl_core::states::DensityMatrix;

#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    pub index: usize,
    pub dim: usize,
    pub psd: bool,
    /// State flavor: "mixed", "pure", or "maximally-mixed".
    pub state: &'static str,
    pub t: f64,
    pub visibility: f64,
    pub bargmann_angle: f64,
    pub bures_angle: f64,
    pub mt: Option<f64>,
    pub ml: Option<f64>,
    pub chau: Option<f64>,
    pub improved_chau: Option<f64>,
    pub bures_baseline: Option<f64>,
    pub cptp: Option<f64>,
    /// `T` minus the largest defined bound.
    pub slack: f64,
}

#[derive(Debug, Clone, Copy)]
pub struct SweepConfig {
    pub dims: [bool; 5], // index = dimension, 2..=4 used
    pub instances: usize,
    pub t_max: f64,
    pub seed: u64,
    pub hbar: f64,
}

pub fn run(config: &SweepConfig) -> Vec<SweepRow> {
    let dims: Vec<usize> = (2..=4).filter(|&d| config.dims[d]).collect();
    let indices: Vec<usize> = (0..config.instances).collect();

    // Instances are independent and seeded per index, so parallel chunks
    // produce the same rows as a serial run; output stays index-ordered.
    let workers = std::thread::available_parallelism()
        .map(|n| n.get())
        .unwrap_or(1)
        .clamp(1, 8);
    let chunk = indices.len().div_ceil(workers).max(1);
    let mut rows: Vec<SweepRow> = Vec::with_capacity(indices.len());
    std::thread::scope(|scope| {
        let mut handles = Vec::new();
        for ids in indices.chunks(chunk) {
            let dims = dims.clone();
            handles.push(scope.spawn(move || {
                ids.iter()
                    .map(|&index| row_for(index, &dims, config))
                    .collect::<Vec<_>>()
            }));
        }
        for handle in handles {
            rows.extend(handle.join().expect("sweep worker"));
        }
    });
    rows.sort_by_key(|r| r.index);
    rows
}

fn row_for(index: usize, dims: &[usize], config: &SweepConfig) -> SweepRow {
    let mut rng = rng_from_seed(seeding::derive(config.seed, "sweep", index as u64));
    let dim = dims[index % dims.len()];
    let psd = index % 2 == 1;
    // Mostly Hilbert-Schmidt mixed states, with pure and maximally mixed
    // rows cycled in: the first pin the pure-state angle equality, the
    // second the vanishing Bures angle on a moving orbit.
    let (state, rho) = match index % 5 {
        3 => ("pure", random_pure(dim, &mut rng)),
        4 => ("maximally-mixed", DensityMatrix::maximally_mixed(dim)),
        _ => ("mixed", random_density(dim, &mut rng)),
    };
    let h = if psd {
        random_psd_hamiltonian(dim, &mut rng)
    } else {
        random_hermitian(dim, &mut rng)
    };
    let t = qsl_core::ensemble::uniform(&mut rng, 1e-3, config.t_max);
    let report = combined_bound(&rho, &h, t, config.hbar).expect("valid random instance");

    // A dilated companion instance on the same system state.
    let h_ab = random_hermitian(dim * 2, &mut rng);
    let sys = DilatedSystem::new(h_ab, (dim, 2), 0, config.hbar).expect("valid dilation");
    let cptp = cptp_bound(&rho, &sys, t).ok().filter(|b| b.is_finite());

    let mt = report.mt_bound.value();
    let ml = report.ml_bound.value();
    let chau = report.chau_bound.value();
    let improved_chau = report.improved_chau_bound.value();
    let bures_baseline = report.bures_baseline_bound.value();
    let max_bound = [mt, ml, chau, improved_chau, bures_baseline, cptp]
        .iter()
        .flatten()
        .fold(f64::NEG_INFINITY, |a, &b| a.max(b));

    SweepRow {
        index,
        dim,
        psd,
        state,
        t,
        visibility: report.visibility,
        bargmann_angle: report.bargmann_angle,
        bures_angle: report.bures_angle,
        mt,
        ml,
        chau,
        improved_chau,
        bures_baseline,
        cptp,
        slack: t - max_bound,
    }
}

pub const SWEEP_CSV_HEADER: &str =
    "index,dim,psd,state,t,visibility,bargmann_angle,bures_angle,mt,ml,chau,improved_chau,\
bures_baseline,cptp,slack";

pub fn to_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from(SWEEP_CSV_HEADER);
    out.push('\n');
    let cell = |x: Option<f64>| x.map(|v| v.to_string()).unwrap_or_default();
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
            r.index,
            r.dim,
            r.psd,
            r.state,
            r.t,
            r.visibility,
            r.bargmann_angle,
            r.bures_angle,
            cell(r.mt),
            cell(r.ml),
            cell(r.chau),
            cell(r.improved_chau),
            cell(r.bures_baseline),
            cell(r.cptp),
            r.slack,
        ));
    }
    out
}
