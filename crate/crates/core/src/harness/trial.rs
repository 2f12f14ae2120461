use serde::Serialize;

use crate::distributions::{minkowski_map, sample_uniform_ball};
use crate::exponent::PExponent;
use crate::polytope::{
    body_summary, facet_l1_bound, isotropic_constant, mc_l1_over_simplices, subset_sup_bound,
    summary_from_simplices, triangulate, BodySummary, SymmetricPolytope, MAX_SUBSET_GENERATORS,
};
use crate::rng::RandomSource;
use crate::{Error, Result};

/// Schema tag written into every record row.
pub const SCHEMA_VERSION: u32 = 1;

/// Measured quantities of one `(p, n, N)` trial. Optional fields were
/// skipped; `notes` says why. Wall time is kept out of serialized output so
/// records stay byte-identical across runs and worker counts.
#[derive(Debug, Clone, Serialize)]
pub struct TrialRecord {
    pub schema_version: u32,
    pub p: f64,
    pub n: usize,
    #[serde(rename = "N")]
    pub n_points: usize,
    pub trial_index: usize,
    pub seed_stream: u64,
    pub status: String,
    pub l_isotropic: Option<f64>,
    pub vol_radius: Option<f64>,
    pub trace_cov: Option<f64>,
    pub l1_mean: Option<f64>,
    pub l1_se: Option<f64>,
    pub subset_bound: Option<f64>,
    pub facet_bound: Option<f64>,
    pub coupling_ok: Option<bool>,
    pub regime_ok: bool,
    pub notes: String,
    #[serde(skip)]
    pub wall_time_ms: f64,
}

impl TrialRecord {
    fn empty(p: f64, n: usize, n_points: usize, trial_index: usize, seed_stream: u64) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            p,
            n,
            n_points,
            trial_index,
            seed_stream,
            status: String::new(),
            l_isotropic: None,
            vol_radius: None,
            trace_cov: None,
            l1_mean: None,
            l1_se: None,
            subset_bound: None,
            facet_bound: None,
            coupling_ok: None,
            regime_ok: check_regime(n, n_points),
            notes: String::new(),
            wall_time_ms: 0.0,
        }
    }

    pub fn is_ok(&self) -> bool {
        self.status == "ok"
    }
}

/// `n + 1 ≤ N ≤ e^{√n}`: the generator-count regime of the stability
/// statements. Outside the regime is a flag, not an error.
pub fn check_regime(n: usize, n_points: usize) -> bool {
    n_points >= n + 1 && (n_points as f64) <= (n as f64).sqrt().exp()
}

fn push_note(notes: &mut String, msg: &str) {
    if !notes.is_empty() {
        notes.push_str("; ");
    }
    notes.push_str(msg);
}

/// Draw ball points, radially project them to cone-measure generators, and
/// return both collections. The projection couples the two polytopes so the
/// projected hull always contains the ball hull.
fn coupled_sample(
    p: PExponent,
    n: usize,
    n_points: usize,
    rng: &mut RandomSource,
) -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
    let mut ball = Vec::with_capacity(n_points);
    let mut cone = Vec::with_capacity(n_points);
    while ball.len() < n_points {
        let y = sample_uniform_ball(n, p, rng);
        match minkowski_map(&y, p) {
            Ok(x) => {
                ball.push(y);
                cone.push(x.into_coords());
            }
            Err(_) => continue, // zero draw: resample
        }
    }
    (ball, cone)
}

/// Run one trial: sample `N` cone-measure generators (through the ball
/// coupling), build the hull, and measure every recorded quantity. Hull
/// degeneracy is recorded as a failed trial, not an error.
pub fn run_trial(
    p: PExponent,
    n: usize,
    n_points: usize,
    rng: &mut RandomSource,
    mc_samples: usize,
) -> TrialRecord {
    let start = std::time::Instant::now();
    let mut rec = TrialRecord::empty(p.get(), n, n_points, 0, rng.stream_index());
    let (ball, cone) = coupled_sample(p, n, n_points, rng);
    let polytope = match SymmetricPolytope::from_generators(cone) {
        Ok(p) => p,
        Err(e) => {
            rec.status = format!("failed: {e}");
            rec.wall_time_ms = start.elapsed().as_secs_f64() * 1e3;
            return rec;
        }
    };
    match fill_metrics(&polytope, rng, mc_samples, &mut rec) {
        Ok(()) => rec.status = "ok".into(),
        Err(e) => rec.status = format!("failed: {e}"),
    }
    // Pathwise inclusion: every signed ball point inside the projected hull.
    let coupled = ball.iter().all(|y| {
        let neg: Vec<f64> = y.iter().map(|v| -v).collect();
        polytope.contains(y) && polytope.contains(&neg)
    });
    rec.coupling_ok = Some(coupled);
    rec.wall_time_ms = start.elapsed().as_secs_f64() * 1e3;
    rec
}

fn fill_metrics(
    polytope: &SymmetricPolytope,
    rng: &mut RandomSource,
    mc_samples: usize,
    rec: &mut TrialRecord,
) -> Result<()> {
    let n = polytope.dim();
    let simplices = triangulate(polytope)?;
    let summary = summary_from_simplices(&simplices, n)?;
    rec.l_isotropic = Some(isotropic_constant(&summary, n)?);
    rec.vol_radius = Some(summary.volume.powf(1.0 / n as f64));
    rec.trace_cov = Some((0..n).map(|i| summary.covariance[(i, i)]).sum());
    let (mean, se) = mc_l1_over_simplices(&simplices, n, rng, mc_samples)?;
    rec.l1_mean = Some(mean);
    rec.l1_se = Some(se);
    if polytope.num_generators() <= MAX_SUBSET_GENERATORS {
        rec.subset_bound = Some(subset_sup_bound(polytope)?);
    } else {
        push_note(&mut rec.notes, "subset_bound skipped: N > 24");
    }
    match facet_l1_bound(polytope) {
        Ok(b) => rec.facet_bound = Some(b),
        Err(Error::Capability(msg)) => {
            push_note(&mut rec.notes, &format!("facet_bound skipped: {msg}"));
        }
        Err(e) => return Err(e),
    }
    Ok(())
}

/// Outcome of one coupling check: the projected-generator polytope, the
/// ball-point polytope it must contain, and their summaries.
#[derive(Debug, Clone)]
pub struct CouplingOutcome {
    /// Inclusion held pathwise and the volumes are ordered accordingly.
    pub ok: bool,
    pub cone_summary: BodySummary,
    pub ball_summary: BodySummary,
}

/// Draw ball points, build both the ball hull and the projected hull, and
/// check the pathwise inclusion together with the volume ordering.
pub fn verify_coupling(
    p: PExponent,
    n: usize,
    n_points: usize,
    rng: &mut RandomSource,
) -> Result<CouplingOutcome> {
    let (ball, cone) = coupled_sample(p, n, n_points, rng);
    let outer = SymmetricPolytope::from_generators(cone)?;
    let inner = SymmetricPolytope::from_generators(ball.clone())?;
    let contained = ball.iter().all(|y| {
        let neg: Vec<f64> = y.iter().map(|v| -v).collect();
        outer.contains(y) && outer.contains(&neg)
    });
    let cone_summary = body_summary(&outer)?;
    let ball_summary = body_summary(&inner)?;
    let ok = contained && cone_summary.volume >= ball_summary.volume - 1e-12;
    Ok(CouplingOutcome {
        ok,
        cone_summary,
        ball_summary,
    })
}
