//! The end-to-end verification battery: sampler moment identities, oracle
//! equivalences, exact inequality suites, the ball/sphere coupling, ψ₂
//! uniformity, tail bounds, and determinism. Every check runs on seeded
//! substreams of the config's master seed; failures are collected, never
//! fatal.

use serde::Serialize;

use crate::distributions::{minkowski_map, sample_cone, sample_gg_scalar, sample_gg_vector,
    sample_uniform_ball};
use crate::exponent::{dot, PExponent};
use crate::harness::config::ExperimentConfig;
use crate::harness::trial::{run_trial, verify_coupling};
use crate::moments::{
    bernstein_bound, cone_moment_estimate, default_psi2_qmax, empirical_lq, gamma_ratio_moment,
    gk_equiv, psi2_estimate, EquivalenceBand, MomentQuery,
};
use crate::polytope::{
    body_summary, facet_l1_bound, isotropic_constant, mc_integral_l1, subset_sup_bound,
    SymmetricPolytope,
};
use crate::rng::{stable_hash, RandomSource};

#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub pass: bool,
    pub details: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub checks: Vec<CheckResult>,
}

impl VerifyReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

fn src(cfg: &ExperimentConfig, label: &str) -> RandomSource {
    RandomSource::new(cfg.master_seed, stable_hash(label.as_bytes()))
}

fn result(name: &str, pass: bool, details: String) -> CheckResult {
    CheckResult {
        name: name.into(),
        pass,
        details,
    }
}

#[derive(Clone)]
struct MeanAcc {
    sum: f64,
    sum_sq: f64,
    count: usize,
}

impl MeanAcc {
    fn new() -> Self {
        Self {
            sum: 0.0,
            sum_sq: 0.0,
            count: 0,
        }
    }

    fn push(&mut self, x: f64) {
        self.sum += x;
        self.sum_sq += x * x;
        self.count += 1;
    }

    fn mean(&self) -> f64 {
        self.sum / self.count as f64
    }

    fn se(&self) -> f64 {
        let m = self.mean();
        ((self.sum_sq / self.count as f64 - m * m).max(0.0) / self.count as f64).sqrt()
    }
}

const SCALAR_P_GRID: [f64; 5] = [1.0, 1.5, 2.0, 3.0, 5.0];
const Q_GRID: [f64; 3] = [1.0, 2.0, 4.0];

pub(crate) fn check_scalar_moments(cfg: &ExperimentConfig) -> CheckResult {
    let m = 40_000;
    let mut worst = 0.0f64;
    let mut fails = 0;
    for &pv in &SCALAR_P_GRID {
        let pe = PExponent::new(pv).unwrap();
        let mut rng = src(cfg, &format!("scalar_moments/{pv}"));
        let draws: Vec<f64> = (0..m).map(|_| sample_gg_scalar(pe, &mut rng)).collect();
        for &q in &Q_GRID {
            let mut acc = MeanAcc::new();
            for &g in &draws {
                acc.push(g.abs().powf(q));
            }
            let expect = gamma_ratio_moment(1, pe, q);
            let dev = (acc.mean() - expect).abs() / acc.se();
            worst = worst.max(dev);
            if dev > 4.0 {
                fails += 1;
            }
        }
    }
    result(
        "sampler_scalar_moments",
        fails == 0,
        format!("worst deviation {worst:.2} se over {} cells", 15),
    )
}

pub(crate) fn check_radial_identity(cfg: &ExperimentConfig) -> CheckResult {
    let m = 30_000;
    let mut worst = 0.0f64;
    let mut fails = 0;
    let mut cells = 0;
    for &pv in &SCALAR_P_GRID {
        let pe = PExponent::new(pv).unwrap();
        for n in [2usize, 5, 8] {
            let mut rng = src(cfg, &format!("radial/{pv}/{n}"));
            let norms: Vec<f64> = (0..m)
                .map(|_| pe.norm(&sample_gg_vector(n, pe, &mut rng)))
                .collect();
            for &q in &Q_GRID {
                let mut acc = MeanAcc::new();
                for &x in &norms {
                    acc.push(x.powf(q));
                }
                let expect = gamma_ratio_moment(n, pe, q);
                let dev = (acc.mean() - expect).abs() / acc.se();
                worst = worst.max(dev);
                cells += 1;
                if dev > 4.0 {
                    fails += 1;
                }
            }
        }
    }
    result(
        "radial_norm_identity",
        fails == 0,
        format!("worst deviation {worst:.2} se over {cells} cells"),
    )
}

pub(crate) fn check_cone_sphere_norm(cfg: &ExperimentConfig) -> CheckResult {
    let m = 20_000;
    let mut worst = 0.0f64;
    for &pv in &[1.0, 1.5, 2.0, 3.0] {
        let pe = PExponent::new(pv).unwrap();
        for n in [2usize, 5, 8] {
            let mut rng = src(cfg, &format!("sphere_norm/{pv}/{n}"));
            for _ in 0..m {
                worst = worst.max(sample_cone(n, pe, &mut rng).norm_defect());
            }
        }
    }
    result(
        "cone_points_on_sphere",
        worst <= 1e-12,
        format!("max norm defect {worst:.3e}"),
    )
}

pub(crate) fn check_norm_direction_independence(cfg: &ExperimentConfig) -> CheckResult {
    let m = 50_000;
    let mut worst = 0.0f64;
    for &pv in &[1.0, 2.0, 3.0] {
        let pe = PExponent::new(pv).unwrap();
        let n = 4;
        let mut rng = src(cfg, &format!("independence/{pv}"));
        let theta = sample_cone(n, PExponent::new(2.0).unwrap(), &mut rng).into_coords();
        let mut xs = Vec::with_capacity(m);
        let mut ys = Vec::with_capacity(m);
        for _ in 0..m {
            let g = sample_gg_vector(n, pe, &mut rng);
            let norm = pe.norm(&g);
            if norm == 0.0 {
                continue;
            }
            xs.push(norm);
            ys.push(dot(&g, &theta) / norm);
        }
        worst = worst.max(pearson(&xs, &ys).abs() * (xs.len() as f64).sqrt());
    }
    result(
        "norm_direction_independence",
        worst <= 4.0,
        format!("worst |corr|·√m = {worst:.2}"),
    )
}

fn pearson(a: &[f64], b: &[f64]) -> f64 {
    let m = a.len() as f64;
    let (ma, mb) = (a.iter().sum::<f64>() / m, b.iter().sum::<f64>() / m);
    let mut num = 0.0;
    let mut va = 0.0;
    let mut vb = 0.0;
    for (&x, &y) in a.iter().zip(b) {
        num += (x - ma) * (y - mb);
        va += (x - ma).powi(2);
        vb += (y - mb).powi(2);
    }
    num / (va.sqrt() * vb.sqrt())
}

pub(crate) fn check_pushforward(cfg: &ExperimentConfig) -> CheckResult {
    let m = 40_000;
    let mut worst = 0.0f64;
    for &pv in &[1.0, 1.5, 3.0] {
        let pe = PExponent::new(pv).unwrap();
        let n = 3;
        let mut rng = src(cfg, &format!("pushforward/{pv}"));
        let theta = sample_cone(n, PExponent::new(2.0).unwrap(), &mut rng).into_coords();
        for q in [1i32, 2] {
            let mut cone = MeanAcc::new();
            let mut push = MeanAcc::new();
            for _ in 0..m {
                let y = sample_cone(n, pe, &mut rng);
                cone.push(dot(y.coords(), &theta).abs().powi(q));
                let x = loop {
                    let x = sample_uniform_ball(n, pe, &mut rng);
                    if let Ok(pt) = minkowski_map(&x, pe) {
                        break pt;
                    }
                };
                push.push(dot(x.coords(), &theta).abs().powi(q));
            }
            let se = (cone.se().powi(2) + push.se().powi(2)).sqrt();
            worst = worst.max((cone.mean() - push.mean()).abs() / se);
        }
    }
    result(
        "pushforward_matches_cone_law",
        worst <= 4.0,
        format!("worst moment gap {worst:.2} combined se"),
    )
}

pub(crate) fn check_cone_isotropy(cfg: &ExperimentConfig) -> CheckResult {
    let m = 40_000;
    let n = 3;
    let mut worst = 0.0f64;
    for &pv in &[1.0, 2.0, 4.0] {
        let pe = PExponent::new(pv).unwrap();
        let mut rng = src(cfg, &format!("isotropy/{pv}"));
        let mut acc = vec![MeanAcc::new(); n * n];
        for _ in 0..m {
            let y = sample_cone(n, pe, &mut rng);
            let c = y.coords();
            for i in 0..n {
                for j in 0..n {
                    acc[i * n + j].push(c[i] * c[j]);
                }
            }
        }
        let diag = (0..n).map(|i| acc[i * n + i].mean()).sum::<f64>() / n as f64;
        for i in 0..n {
            for j in 0..n {
                let target = if i == j { diag } else { 0.0 };
                let cell = &acc[i * n + j];
                worst = worst.max((cell.mean() - target).abs() / cell.se());
            }
        }
    }
    result(
        "cone_second_moment_isotropic",
        worst <= 4.0,
        format!("worst entry deviation {worst:.2} se"),
    )
}

pub(crate) fn check_determinism(cfg: &ExperimentConfig) -> CheckResult {
    let mut a = src(cfg, "determinism");
    let mut b = src(cfg, "determinism");
    let words_match = (0..4096).all(|_| {
        use rand::RngCore;
        a.next_u64() == b.next_u64()
    });
    let pe = PExponent::new(1.5).unwrap();
    let mut r1 = src(cfg, "determinism/trial");
    let mut r2 = src(cfg, "determinism/trial");
    let t1 = run_trial(pe, 3, 5, &mut r1, cfg.mc_samples);
    let t2 = run_trial(pe, 3, 5, &mut r2, cfg.mc_samples);
    let trials_match = t1.l_isotropic == t2.l_isotropic
        && t1.l1_mean == t2.l1_mean
        && t1.vol_radius == t2.vol_radius;
    result(
        "determinism",
        words_match && trials_match,
        format!("streams bitwise equal: {words_match}, trials identical: {trials_match}"),
    )
}

pub(crate) fn check_geometry_goldens(_cfg: &ExperimentConfig) -> CheckResult {
    let mut msgs = Vec::new();
    let mut pass = true;
    for n in 2..=6usize {
        let gens: Vec<Vec<f64>> = (0..n)
            .map(|i| {
                let mut g = vec![0.0; n];
                g[i] = 1.0;
                g
            })
            .collect();
        let p = match SymmetricPolytope::from_generators(gens) {
            Ok(p) => p,
            Err(e) => {
                pass = false;
                msgs.push(format!("n={n} build failed: {e}"));
                continue;
            }
        };
        let vol = body_summary(&p).unwrap().volume;
        let expect = 2f64.powi(n as i32) / (1..=n).product::<usize>() as f64;
        if ((vol - expect) / expect).abs() > 1e-10 {
            pass = false;
            msgs.push(format!("n={n} volume {vol} vs {expect}"));
        }
    }
    let b12 = SymmetricPolytope::from_generators(vec![vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
    let s = body_summary(&b12).unwrap();
    for i in 0..2 {
        for j in 0..2 {
            let expect = if i == j { 1.0 / 6.0 } else { 0.0 };
            if (s.covariance[(i, j)] - expect).abs() > 1e-10 {
                pass = false;
                msgs.push("cross-polytope covariance off".into());
            }
        }
    }
    let target = 1.0 / 12f64.sqrt();
    let l_b12 = isotropic_constant(&s, 2).unwrap();
    let cube = SymmetricPolytope::from_generators(vec![
        vec![1.0, 1.0, 1.0],
        vec![1.0, 1.0, -1.0],
        vec![1.0, -1.0, 1.0],
        vec![-1.0, 1.0, 1.0],
    ])
    .unwrap();
    let l_cube = isotropic_constant(&body_summary(&cube).unwrap(), 3).unwrap();
    if ((l_b12 - target) / target).abs() > 1e-8 || ((l_cube - target) / target).abs() > 1e-8 {
        pass = false;
        msgs.push(format!("isotropic constants {l_b12} / {l_cube} vs {target}"));
    }
    result(
        "geometry_goldens",
        pass,
        if msgs.is_empty() {
            "volumes, covariance and isotropic constants exact".into()
        } else {
            msgs.join("; ")
        },
    )
}

/// Rejection-sampling route: uniform box proposals filtered by membership.
/// Returns (volume, volume se, covariance entries with ses).
fn rejection_summary(
    p: &SymmetricPolytope,
    rng: &mut RandomSource,
    samples: usize,
) -> (f64, f64, Vec<((usize, usize), f64, f64)>) {
    let n = p.dim();
    let half: f64 = p
        .vertex_points()
        .map(|v| v.iter().fold(0.0f64, |m, &x| m.max(x.abs())))
        .fold(0.0, f64::max);
    let box_vol = (2.0 * half).powi(n as i32);
    let mut hits = 0usize;
    let mut acc = vec![MeanAcc::new(); n * n];
    let mut x = vec![0.0f64; n];
    for _ in 0..samples {
        for c in &mut x {
            *c = (rng.uniform() * 2.0 - 1.0) * half;
        }
        if p.contains(&x) {
            hits += 1;
            for i in 0..n {
                for j in i..n {
                    acc[i * n + j].push(x[i] * x[j]);
                }
            }
        }
    }
    let frac = hits as f64 / samples as f64;
    let vol = box_vol * frac;
    let vol_se = box_vol * (frac * (1.0 - frac) / samples as f64).sqrt();
    let mut cov = Vec::new();
    for i in 0..n {
        for j in i..n {
            let cell = &acc[i * n + j];
            cov.push(((i, j), cell.mean(), cell.se()));
        }
    }
    (vol, vol_se, cov)
}

pub(crate) fn check_volume_mc_oracle(cfg: &ExperimentConfig) -> CheckResult {
    let mut worst = 0.0f64;
    let mut fails = 0;
    let mut rng = src(cfg, "mc_oracle");
    for trial in 0..6 {
        let n = 2 + trial % 2;
        let pe = PExponent::new([1.0, 2.0, 3.0][trial % 3]).unwrap();
        let gens: Vec<Vec<f64>> = (0..n + 3)
            .map(|_| sample_cone(n, pe, &mut rng).into_coords())
            .collect();
        let poly = match SymmetricPolytope::from_generators(gens) {
            Ok(p) => p,
            Err(_) => continue,
        };
        let s = body_summary(&poly).unwrap();
        let (vol, vol_se, cov) = rejection_summary(&poly, &mut rng, 40_000);
        let dev = (s.volume - vol).abs() / vol_se;
        worst = worst.max(dev);
        if dev > 3.0 {
            fails += 1;
        }
        for ((i, j), mean, se) in cov {
            // Rejection covariance is about the (zero) barycenter too.
            let exact = s.covariance[(i, j)];
            let dev = (exact - mean).abs() / se;
            worst = worst.max(dev);
            if dev > 3.0 {
                fails += 1;
            }
        }
    }
    result(
        "volume_covariance_mc_oracle",
        fails == 0,
        format!("worst deviation {worst:.2} se"),
    )
}

fn random_trial_polytope(
    cfg: &ExperimentConfig,
    rng: &mut RandomSource,
) -> Option<(SymmetricPolytope, PExponent)> {
    use rand::Rng;
    let p_grid = if cfg.p_grid.is_empty() {
        vec![2.0]
    } else {
        cfg.p_grid.clone()
    };
    let pv = p_grid[rng.gen_range(0..p_grid.len())];
    let pe = PExponent::new(pv).ok()?;
    let n = 2 + rng.gen_range(0..4usize); // 2..=5: exhaustive bounds stay fast
    let count = n + 1 + rng.gen_range(0..4usize);
    let gens: Vec<Vec<f64>> = (0..count)
        .map(|_| sample_cone(n, pe, rng).into_coords())
        .collect();
    SymmetricPolytope::from_generators(gens).ok().map(|p| (p, pe))
}

pub(crate) fn check_subset_bound(cfg: &ExperimentConfig) -> CheckResult {
    let mut rng = src(cfg, "subset_bound");
    let mut checked = 0;
    let mut fails = 0;
    while checked < cfg.trials.max(20) {
        let Some((poly, _)) = random_trial_polytope(cfg, &mut rng) else {
            continue;
        };
        let s = body_summary(&poly).unwrap();
        let trace: f64 = (0..poly.dim()).map(|i| s.covariance[(i, i)]).sum();
        if trace > subset_sup_bound(&poly).unwrap() + 1e-12 {
            fails += 1;
        }
        checked += 1;
    }
    result(
        "subset_sup_bound_inequality",
        fails == 0,
        format!("{fails} violations in {checked} random polytopes"),
    )
}

pub(crate) fn check_facet_l1(cfg: &ExperimentConfig) -> CheckResult {
    let mut rng = src(cfg, "facet_l1");
    let mut checked = 0;
    let mut fails = 0;
    while checked < cfg.trials.max(20) {
        let Some((poly, _)) = random_trial_polytope(cfg, &mut rng) else {
            continue;
        };
        let bound = match facet_l1_bound(&poly) {
            Ok(b) => b,
            Err(_) => continue, // non-simplicial facet: outside this check
        };
        let (mean, se) = mc_integral_l1(&poly, &mut rng, cfg.mc_samples).unwrap();
        if mean > bound + 3.0 * se {
            fails += 1;
        }
        checked += 1;
    }
    result(
        "facet_l1_bound_inequality",
        fails == 0,
        format!("{fails} violations in {checked} random polytopes"),
    )
}

pub(crate) fn check_coupling(cfg: &ExperimentConfig) -> CheckResult {
    let mut rng = src(cfg, "coupling");
    let mut checked = 0;
    let mut fails = 0;
    while checked < cfg.trials.max(20) {
        use rand::Rng;
        let pv = [1.0, 1.5, 2.0, 3.0][rng.gen_range(0..4usize)];
        let pe = PExponent::new(pv).unwrap();
        let n = 2 + rng.gen_range(0..2usize);
        match verify_coupling(pe, n, n + 2, &mut rng) {
            Ok(out) if out.ok => {}
            Ok(_) => fails += 1,
            Err(_) => continue,
        }
        checked += 1;
    }
    result(
        "coupling_inclusion",
        fails == 0,
        format!("{fails} violations in {checked} couplings"),
    )
}

pub(crate) fn check_gk_equivalence(cfg: &ExperimentConfig) -> CheckResult {
    let band = match EquivalenceBand::new(cfg.band) {
        Ok(b) => b,
        Err(e) => return result("gk_moment_equivalence", false, e.to_string()),
    };
    let m = 50_000;
    let mut worst_lo = f64::INFINITY;
    let mut worst_hi = 0.0f64;
    let mut fails = 0;
    for &pv in &[1.0, 1.5, 2.0, 3.0] {
        let pe = PExponent::new(pv).unwrap();
        for n in [4usize, 8] {
            let mut rng = src(cfg, &format!("gk/{pv}/{n}"));
            let dirs: Vec<Vec<f64>> = (0..3)
                .map(|_| sample_gg_vector(n, PExponent::new(2.0).unwrap(), &mut rng))
                .collect();
            // Accumulate Σ|⟨a,G⟩|^q for q ∈ {2,4,8} in one pass.
            let mut sums = vec![[0.0f64; 3]; dirs.len()];
            for _ in 0..m {
                let g = sample_gg_vector(n, pe, &mut rng);
                for (d, dir) in dirs.iter().enumerate() {
                    let v = dot(dir, &g).abs();
                    let v2 = v * v;
                    sums[d][0] += v2;
                    sums[d][1] += v2 * v2;
                    sums[d][2] += v2 * v2 * v2 * v2;
                }
            }
            for (d, dir) in dirs.iter().enumerate() {
                for (k, q) in [2usize, 4, 8].into_iter().enumerate() {
                    let emp = (sums[d][k] / m as f64).powf(1.0 / q as f64);
                    let oracle = gk_equiv(dir, pe, q).unwrap();
                    let ratio = emp / oracle;
                    worst_lo = worst_lo.min(ratio);
                    worst_hi = worst_hi.max(ratio);
                    if !band.contains(ratio) {
                        fails += 1;
                    }
                }
            }
        }
    }
    result(
        "gk_moment_equivalence",
        fails == 0,
        format!("ratios in [{worst_lo:.3}, {worst_hi:.3}], band C = {}", band.c()),
    )
}

pub(crate) fn check_cone_moment_equivalence(cfg: &ExperimentConfig) -> CheckResult {
    let band = match EquivalenceBand::new(cfg.band) {
        Ok(b) => b,
        Err(e) => return result("cone_moment_equivalence", false, e.to_string()),
    };
    let m = 50_000;
    let mut worst_lo = f64::INFINITY;
    let mut worst_hi = 0.0f64;
    let mut fails = 0;
    for &pv in &[1.0, 1.5, 2.0, 3.0] {
        let pe = PExponent::new(pv).unwrap();
        for n in [4usize, 8] {
            let mut rng = src(cfg, &format!("cone_moment/{pv}/{n}"));
            let theta = sample_gg_vector(n, PExponent::new(2.0).unwrap(), &mut rng);
            let mut sums = [0.0f64; 3];
            for _ in 0..m {
                let y = sample_cone(n, pe, &mut rng);
                let v = dot(y.coords(), &theta).abs();
                let v2 = v * v;
                sums[0] += v2;
                sums[1] += v2 * v2;
                sums[2] += v2 * v2 * v2 * v2;
            }
            for (k, q) in [2usize, 4, 8].into_iter().enumerate() {
                let emp = (sums[k] / m as f64).powf(1.0 / q as f64);
                let query = MomentQuery::new(n, pe, q as f64, theta.clone()).unwrap();
                let oracle = cone_moment_estimate(&query).unwrap();
                let ratio = emp / oracle;
                worst_lo = worst_lo.min(ratio);
                worst_hi = worst_hi.max(ratio);
                if !band.contains(ratio) {
                    fails += 1;
                }
            }
        }
    }
    // Euclidean reference: exact (E⟨Y,e₁⟩²)^{1/2} = 1/√n on the 2-sphere law.
    let p2 = PExponent::new(2.0).unwrap();
    for n in [2usize, 4, 8, 16] {
        let mut theta = vec![0.0; n];
        theta[0] = 1.0;
        let query = MomentQuery::new(n, p2, 2.0, theta).unwrap();
        let ratio = (1.0 / (n as f64).sqrt()) / cone_moment_estimate(&query).unwrap();
        worst_lo = worst_lo.min(ratio);
        worst_hi = worst_hi.max(ratio);
        if !band.contains(ratio) {
            fails += 1;
        }
    }
    result(
        "cone_moment_equivalence",
        fails == 0,
        format!("ratios in [{worst_lo:.3}, {worst_hi:.3}], band C = {}", band.c()),
    )
}

/// ψ₂ uniformity across dimensions. For p ≥ 2 the functional is
/// `n^{1/p}·⟨Y, θ⟩` with θ Euclidean-unit; for p < 2 it is
/// `n^{1/p−1/2}·⟨Y, θ⟩` with θ a sign vector (the normalization that keeps
/// the ψ₂ norm dimension-free in each regime).
fn psi2_profile(
    cfg: &ExperimentConfig,
    pv: f64,
    m: usize,
    dims: impl Iterator<Item = usize>,
) -> Vec<f64> {
    let pe = PExponent::new(pv).unwrap();
    let p2 = PExponent::new(2.0).unwrap();
    let q_max = default_psi2_qmax(m);
    let mut values = Vec::new();
    for n in dims {
        let mut rng = src(cfg, &format!("psi2/{pv}/{n}"));
        let (theta, scale) = if pv >= 2.0 {
            (
                sample_cone(n, p2, &mut rng).into_coords(),
                (n as f64).powf(1.0 / pv),
            )
        } else {
            let signs: Vec<f64> = (0..n).map(|_| rng.sign()).collect();
            (signs, (n as f64).powf(1.0 / pv - 0.5))
        };
        let samples: Vec<f64> = (0..m)
            .map(|_| scale * dot(sample_cone(n, pe, &mut rng).coords(), &theta))
            .collect();
        values.push(psi2_estimate(&samples, q_max).unwrap());
    }
    values
}

pub(crate) fn check_psi2_uniformity(cfg: &ExperimentConfig) -> CheckResult {
    let m = 30_000;
    let mut msgs = Vec::new();
    let mut pass = true;
    for &pv in &[2.0, 3.0, 5.0, 1.0, 1.5] {
        let values = psi2_profile(cfg, pv, m, 2..=10);
        let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = values.iter().copied().fold(0.0f64, f64::max);
        let spread = hi / lo;
        if spread > 3.0 {
            pass = false;
        }
        msgs.push(format!("p={pv}: spread {spread:.2}"));
    }
    result("psi2_uniformity", pass, msgs.join(", "))
}

pub(crate) fn check_bernstein_tail(cfg: &ExperimentConfig) -> CheckResult {
    // Rademacher summands: the exact ψ₂ (Luxemburg) norm is 1/√ln 2.
    let c = 1.0 / (2f64.ln()).sqrt();
    let n_terms = 50usize;
    let reps = 10_000usize;
    let mut rng = src(cfg, "bernstein");
    let mut sums = Vec::with_capacity(reps);
    for _ in 0..reps {
        let s: f64 = (0..n_terms).map(|_| rng.sign()).sum();
        sums.push(s.abs());
    }
    let mut pass = true;
    let mut msgs = Vec::new();
    for eps in [0.2, 0.4, 0.6, 0.8, 1.0] {
        let thresh = eps * n_terms as f64;
        let freq = sums.iter().filter(|&&s| s > thresh).count() as f64 / reps as f64;
        let bound = bernstein_bound(eps, n_terms, c);
        let se = (freq * (1.0 - freq) / reps as f64).sqrt();
        if freq > bound + 3.0 * se {
            pass = false;
        }
        msgs.push(format!("eps={eps}: {freq:.4} <= {:.4}", bound.min(1.0)));
    }
    result("bernstein_tail_bound", pass, msgs.join(", "))
}

pub(crate) fn check_empirical_lq_gaussian(cfg: &ExperimentConfig) -> CheckResult {
    // Standard Gaussian fourth moment is 3, so ‖g‖₄ = 3^{1/4}; the ψ₂
    // estimate of the same samples sits in a fixed band around √(2/e).
    use rand_distr::{Distribution, StandardNormal};
    let m = 100_000;
    let mut rng = src(cfg, "lq_gaussian");
    let samples: Vec<f64> = (0..m).map(|_| StandardNormal.sample(&mut rng)).collect();
    let l4 = empirical_lq(&samples, 4.0).unwrap();
    let expect = 3f64.powf(0.25);
    let mut acc = MeanAcc::new();
    for &s in &samples {
        acc.push(s.powi(4));
    }
    // Delta method: se(‖·‖₄) = se(m₄) · (1/4) m₄^{-3/4}.
    let se4 = acc.se() * 0.25 * acc.mean().powf(-0.75);
    let ok_l4 = (l4 - expect).abs() <= 4.0 * se4;
    let psi2 = psi2_estimate(&samples, 64).unwrap();
    let ok_psi2 = (0.70..=0.95).contains(&psi2);
    result(
        "gaussian_lq_and_psi2",
        ok_l4 && ok_psi2,
        format!("l4 {l4:.4} vs {expect:.4}, psi2 {psi2:.3} in [0.70, 0.95]"),
    )
}

/// Run the whole battery; failures are reported, never fatal.
pub fn verify_suite(cfg: &ExperimentConfig) -> VerifyReport {
    let checks = vec![
        check_scalar_moments(cfg),
        check_radial_identity(cfg),
        check_cone_sphere_norm(cfg),
        check_norm_direction_independence(cfg),
        check_pushforward(cfg),
        check_cone_isotropy(cfg),
        check_determinism(cfg),
        check_geometry_goldens(cfg),
        check_volume_mc_oracle(cfg),
        check_subset_bound(cfg),
        check_facet_l1(cfg),
        check_coupling(cfg),
        check_gk_equivalence(cfg),
        check_cone_moment_equivalence(cfg),
        check_psi2_uniformity(cfg),
        check_bernstein_tail(cfg),
        check_empirical_lq_gaussian(cfg),
    ];
    VerifyReport { checks }
}
