//! End-to-end acceptance checks. Prints one `[PASS]`/`[FAIL]` line per
//! criterion and exits non-zero if any criterion fails.

use std::path::Path;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::Rng;

use fhtgibbs::commands::{cmd_pipeline, with_workers};
use fhtgibbs::diagnose::{model_marginal, MODE_CENTERS};
use fhtgibbs::fit::run_fit;
use fhtgibbs::sample::{run_sampler, SampleOutput};
use fhtgibbs::RunConfig;
use fhtgibbs_core::ais::{ais_weighted, birth_death, mean_weight, snooker_move};
use fhtgibbs_core::diagnostics::{
    empirical_marginal, grid_ball_masses, sample_ball_masses, tv_distance, Histogram2D,
};
use fhtgibbs_core::fht::{linspace, trapezoid_2d, Core};
use fhtgibbs_core::kernels::run_mala;
use fhtgibbs_core::potential::{Quadratic, SeparableDoubleWell};
use fhtgibbs_core::quadrature::gauss_legendre;
use fhtgibbs_core::sketch::{sketch_fit, FitParams};
use fhtgibbs_core::{
    build_potential, build_tree, make_schedule, FhtModel, FourierBasis, KernelParams,
    ParticleEnsemble, Potential, PotentialSpec, ScaledTarget, ScheduleKind, SeedPath, SiteOrder,
};

struct Verdict {
    pass: bool,
    detail: String,
    elapsed: Duration,
}

fn verdict(pass: bool, detail: String, elapsed: Duration) -> Verdict {
    Verdict {
        pass,
        detail,
        elapsed,
    }
}

fn within(elapsed: Duration, limit_s: u64) -> bool {
    elapsed <= Duration::from_secs(limit_s)
}

fn run(id: u32, name: &str, f: impl FnOnce() -> Verdict) -> bool {
    let v = f();
    let tag = if v.pass { "PASS" } else { "FAIL" };
    println!(
        "[{tag}] {id:>2} {name}: {} ({:.1} s)",
        v.detail,
        v.elapsed.as_secs_f64()
    );
    v.pass
}

fn gradient_check() -> Verdict {
    let start = Instant::now();
    let variants = [
        ("chain", PotentialSpec::chain(32, 0.1, 0.0)),
        ("chain asymmetric", PotentialSpec::chain(32, 0.5, 0.01)),
        ("grid", PotentialSpec::grid(64, 0.1, 0.0)),
        ("grid asymmetric", PotentialSpec::grid(64, 0.5, 0.01)),
    ];
    let mut worst: f64 = 0.0;
    let mut rng = SeedPath::new(1).rng();
    for (_, spec) in variants {
        let v = build_potential(spec).unwrap();
        let d = v.dim();
        let mut g = vec![0.0; d];
        for _ in 0..100 {
            let x: Vec<f64> = (0..d).map(|_| rng.random_range(-1.5..1.5)).collect();
            v.value_and_grad(&x, &mut g);
            let h = 1e-5;
            let (mut num, mut den) = (0.0, 0.0);
            let mut y = x.clone();
            for k in 0..d {
                y[k] = x[k] + h;
                let up = v.value(&y);
                y[k] = x[k] - h;
                let dn = v.value(&y);
                y[k] = x[k];
                let fd = (up - dn) / (2.0 * h);
                num += (fd - g[k]) * (fd - g[k]);
                den += g[k] * g[k];
            }
            worst = worst.max((num / den).sqrt());
        }
    }
    let ok = worst < 1e-6 && start.elapsed() < Duration::from_secs(1);
    verdict(
        ok,
        format!("max relative error {worst:.2e} < 1e-6 over 4 variants x 100 points"),
        start.elapsed(),
    )
}

fn mala_exactness() -> Verdict {
    let start = Instant::now();
    let target = SeparableDoubleWell { dim: 2, coef: 2.0 };
    let kernel = KernelParams::new(0.05).unwrap();
    let chains = 1000;
    let per_chain = 100;
    let seed = SeedPath::new(2);
    let mut ens = ParticleEnsemble::gaussian(chains, 2, &mut seed.child(0).rng());
    run_mala(&mut ens, &target, &kernel, 1000, seed.child(1)).unwrap();
    let mut collected = Vec::with_capacity(chains * per_chain * 2);
    for k in 0..per_chain {
        run_mala(
            &mut ens,
            &target,
            &kernel,
            20,
            seed.child(2).child(k as u64),
        )
        .unwrap();
        collected.extend_from_slice(ens.as_flat());
    }
    let samples = ParticleEnsemble::from_flat(2, collected).unwrap();
    let (lo, hi, bins) = (-2.5, 2.5, 50);
    let emp = empirical_marginal(&samples, 0, 1, bins, lo, hi).unwrap();
    let exact =
        Histogram2D::from_density(bins, lo, hi, 4, |x, y| (-target.value(&[x, y])).exp()).unwrap();
    let tv = tv_distance(&emp, &exact).unwrap();
    let ok = tv < 0.05 && within(start.elapsed(), 60);
    verdict(
        ok,
        format!(
            "TV {tv:.4} < 0.05 with {} samples on 50x50 bins",
            samples.len()
        ),
        start.elapsed(),
    )
}

fn ais_unbiased() -> Verdict {
    let start = Instant::now();
    let potential = Quadratic {
        dim: 1,
        stiffness: 1.0,
    };
    let levels = 20;
    let betas: Vec<f64> = (0..=levels)
        .map(|l| 4f64.powf(l as f64 / levels as f64))
        .collect();
    let seed = SeedPath::new(3);
    let initial = ParticleEnsemble::gaussian(10_000, 1, &mut seed.child(0).rng());
    let kernel = KernelParams::new(0.1).unwrap();
    let chains = ais_weighted(&initial, &betas, &potential, &kernel, 5, seed.child(1)).unwrap();
    let (mean, se) = mean_weight(&chains).unwrap();
    let ok = (mean - 0.5).abs() <= 3.0 * se && within(start.elapsed(), 60);
    verdict(
        ok,
        format!(
            "mean weight {mean:.4} vs 0.5, |diff| {:.4} <= 3 SE = {:.4}",
            (mean - 0.5).abs(),
            3.0 * se
        ),
        start.elapsed(),
    )
}

fn metastable_config() -> RunConfig {
    RunConfig::from_toml(
        r#"
        potential.geometry = "chain"
        potential.d = 32
        potential.lambda_factor = 0.1
        sampler.beta0 = 1.0
        sampler.beta = 3.0
        sampler.scale = 12.0
        sampler.levels = 10
        sampler.mala_steps = 700
        sampler.n_ensembles = 10
        sampler.particles_per_ensemble = 100
        sampler.init = "all_plus"
        fht.q = 15
        fht.rank = 3
        "#,
    )
    .unwrap()
}

fn final_iota(trace: &[fhtgibbs::sample::TracePoint]) -> f64 {
    trace.last().map_or(f64::NAN, |p| p.iota)
}

fn metastability(out: &SampleOutput, elapsed: Duration) -> Verdict {
    let iota = final_iota(&out.trace);
    let base = final_iota(&out.baseline.as_ref().unwrap().1);
    let ok = (0.45..=0.55).contains(&iota) && base > 0.9 && within(elapsed, 600);
    verdict(
        ok,
        format!("annealed ratio {iota:.4} in [0.45, 0.55], baseline ratio {base:.4} > 0.9"),
        elapsed,
    )
}

fn conservation() -> Verdict {
    let start = Instant::now();
    let potential = build_potential(PotentialSpec::chain(4, 0.1, 0.0)).unwrap();
    let schedule = make_schedule(1.0, 3.0, 10, ScheduleKind::Geometric).unwrap();
    let mut rng = SeedPath::new(5).rng();
    let mut calls = 0usize;
    let mut violations = 0usize;
    while calls < 1_000_000 {
        let n = rng.random_range(2..40);
        let mut ens = ParticleEnsemble::gaussian(n, 4, &mut rng);
        let beta = rng.random_range(0.5..4.0);
        let target = ScaledTarget::new(&potential, beta).unwrap();
        for _ in 0..200 {
            let k = rng.random_range(0..n);
            if calls % 2 == 0 {
                snooker_move(&mut ens, k, &target, 2.0, &mut rng).unwrap();
            } else {
                let l = rng.random_range(1..=10);
                birth_death(&mut ens, k, &schedule, l, &potential, &mut rng).unwrap();
            }
            calls += 1;
            if ens.len() != n || ens.as_flat().len() != n * 4 {
                violations += 1;
            }
        }
    }
    let ok = violations == 0 && within(start.elapsed(), 60);
    verdict(
        ok,
        format!("{violations} size changes in {calls} snooker/birth-death calls"),
        start.elapsed(),
    )
}

/// Random density-like model: leaf functions are a constant plus small
/// trigonometric terms, so they stay positive, and transfer cores are
/// nonnegative. Values then carry no cancellation.
fn random_model(d: usize, q: usize, rank: usize, seed: u64) -> FhtModel {
    let tree = build_tree(d, SiteOrder::Identity).unwrap();
    let basis = FourierBasis::new(q, 2.5).unwrap();
    let mut rng = SeedPath::new(seed).rng();
    let cores = (0..tree.node_count())
        .map(|node| {
            let shape = if tree.is_leaf(node) {
                [basis.len(), rank, 1]
            } else if node == 0 {
                [rank, rank, 1]
            } else {
                [rank, rank, rank]
            };
            let len: usize = shape.iter().product();
            let mut v: Vec<f64> = (0..len).map(|_| rng.random_range(0.0..1.0)).collect();
            if tree.is_leaf(node) {
                for (k, x) in v.iter_mut().enumerate() {
                    *x = if k < rank { 1.0 + *x } else { 0.1 * (*x - 0.5) };
                }
            }
            Core::new(shape, v).unwrap()
        })
        .collect();
    FhtModel::new(tree, basis, cores).unwrap()
}

/// Sums the full coefficient tensor of a d = 4 model against the basis.
fn brute_force_d4(m: &FhtModel, x: &[f64]) -> f64 {
    let tree = m.tree();
    let n = m.basis().len();
    let c = m.cores();
    let psi: Vec<Vec<f64>> = (0..4)
        .map(|leaf| m.basis().eval(x[tree.leaf_site(leaf)]))
        .collect();
    let r = |q: usize| m.edge_rank(q);
    let mut total = 0.0;
    for i0 in 0..n {
        for i1 in 0..n {
            for i2 in 0..n {
                for i3 in 0..n {
                    let basis = psi[0][i0] * psi[1][i1] * psi[2][i2] * psi[3][i3];
                    let mut coef = 0.0;
                    for a in 0..r(3) {
                        for b in 0..r(4) {
                            for e in 0..r(1) {
                                let left =
                                    c[3].get(i0, a, 0) * c[4].get(i1, b, 0) * c[1].get(a, b, e);
                                for cc in 0..r(5) {
                                    for f in 0..r(6) {
                                        for g in 0..r(2) {
                                            coef += left
                                                * c[5].get(i2, cc, 0)
                                                * c[6].get(i3, f, 0)
                                                * c[2].get(cc, f, g)
                                                * c[0].get(e, g, 0);
                                        }
                                    }
                                }
                            }
                        }
                    }
                    total += coef * basis;
                }
            }
        }
    }
    total
}

fn structural() -> Verdict {
    let start = Instant::now();
    let m = random_model(4, 2, 2, 6);
    let mut rng = SeedPath::new(60).rng();
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let x: Vec<f64> = (0..4).map(|_| rng.random_range(-2.5..2.5)).collect();
        let exact = brute_force_d4(&m, &x);
        let fast = m.eval(&x).unwrap();
        worst = worst.max((fast - exact).abs() / exact.abs());
    }
    let ok = worst < 1e-12 && start.elapsed() < Duration::from_secs(1);
    verdict(
        ok,
        format!("max relative error {worst:.2e} < 1e-12 at 100 points"),
        start.elapsed(),
    )
}

fn double_well_1d(t: f64) -> f64 {
    (-2.0 * (1.0 - t * t).powi(2)).exp()
}

fn separable_recovery() -> (Verdict, FhtModel) {
    let start = Instant::now();
    let (d, count, w) = (8, 100_000, 2.5);
    let mut rng = SeedPath::new(7).rng();
    let mut data = Vec::with_capacity(d * count);
    while data.len() < d * count {
        let t = rng.random_range(-w..w);
        if rng.random::<f64>() < double_well_1d(t) {
            data.push(t);
        }
    }
    let samples = ParticleEnsemble::from_flat(d, data).unwrap();
    let (x, wt) = gauss_legendre(400, -w, w);
    let z: f64 = x.iter().zip(&wt).map(|(t, a)| a * double_well_1d(*t)).sum();
    let second: f64 = x
        .iter()
        .zip(&wt)
        .map(|(t, a)| a * t * t * double_well_1d(*t))
        .sum::<f64>()
        / z;
    let tree = build_tree(d, SiteOrder::Identity).unwrap();
    let basis = FourierBasis::new(15, w).unwrap();
    let params = FitParams::uniform(&tree, 1);
    let model = sketch_fit(&samples, None, &tree, &basis, &params)
        .unwrap()
        .model;
    let (mut mean_err, mut second_err): (f64, f64) = (0.0, 0.0);
    for i in 0..d {
        let (m1, m2) = model.moments(i, i).unwrap();
        mean_err = mean_err.max(m1.abs());
        second_err = second_err.max((m2 - second).abs());
    }
    let ok = mean_err < 0.05 && second_err < 0.05 && within(start.elapsed(), 120);
    (
        verdict(ok, format!("max |E[x_i]| {mean_err:.4} < 0.05, max |E[x_i^2] - {second:.4}| {second_err:.4} < 0.05"), start.elapsed()),
        model,
    )
}

/// Mixture of two product densities, each factor `(1 + sum_k a_k trig_k) / 2w`
/// with modes `k <= 3`. This is an FHT of rank 2 on every edge.
struct Mixture {
    weights: [f64; 2],
    /// Per component and site: (amplitude, basis index).
    factors: Vec<Vec<Vec<(f64, usize)>>>,
    basis: FourierBasis,
}

impl Mixture {
    fn random(d: usize, seed: SeedPath) -> Self {
        let basis = FourierBasis::new(3, 2.5).unwrap();
        let mut rng = seed.rng();
        // Component 0 leans left and component 1 right at every site
        // (index 2 is the first sine), plus small random modes.
        let factors = [0.5, -0.5]
            .iter()
            .map(|&lean| {
                (0..d)
                    .map(|_| {
                        (1..basis.len())
                            .map(|a| {
                                (
                                    if a == 2 {
                                        lean
                                    } else {
                                        rng.random_range(-0.08..0.08)
                                    },
                                    a,
                                )
                            })
                            .collect()
                    })
                    .collect()
            })
            .collect();
        Mixture {
            weights: [0.4, 0.6],
            factors,
            basis,
        }
    }

    fn factor(&self, c: usize, s: usize, t: f64) -> f64 {
        let w = self.basis.half_width();
        let psi = self.basis.eval(t);
        let wave: f64 = self.factors[c][s]
            .iter()
            .map(|&(a, k)| a * psi[k] * w.sqrt())
            .sum();
        (1.0 + wave) / (2.0 * w)
    }

    fn density(&self, x: &[f64]) -> f64 {
        (0..2)
            .map(|c| {
                self.weights[c]
                    * (0..x.len())
                        .map(|s| self.factor(c, s, x[s]))
                        .product::<f64>()
            })
            .sum()
    }

    fn model(&self, d: usize) -> FhtModel {
        let tree = build_tree(d, SiteOrder::Identity).unwrap();
        let n = self.basis.len();
        let w = self.basis.half_width();
        let cores = (0..tree.node_count())
            .map(|node| match tree.node_leaf(node) {
                Some(leaf) => {
                    let s = tree.leaf_site(leaf);
                    let mut core = Core::zeros([n, 2, 1]);
                    for c in 0..2 {
                        core.set(0, c, 0, 1.0 / (2.0 * w).sqrt());
                        for &(a, k) in &self.factors[c][s] {
                            core.set(k, c, 0, a * w.sqrt() / (2.0 * w));
                        }
                    }
                    core
                }
                None if node == 0 => {
                    let mut core = Core::zeros([2, 2, 1]);
                    core.set(0, 0, 0, self.weights[0]);
                    core.set(1, 1, 0, self.weights[1]);
                    core
                }
                None => {
                    let mut core = Core::zeros([2, 2, 2]);
                    core.set(0, 0, 0, 1.0);
                    core.set(1, 1, 1, 1.0);
                    core
                }
            })
            .collect();
        FhtModel::new(tree, self.basis, cores).unwrap()
    }

    fn sample(&self, d: usize, count: usize, seed: SeedPath) -> ParticleEnsemble {
        let w = self.basis.half_width();
        let mut rng = seed.rng();
        let mut data = Vec::with_capacity(d * count);
        for _ in 0..count {
            let c = usize::from(rng.random::<f64>() >= self.weights[0]);
            for s in 0..d {
                let bound: f64 = (1.0
                    + self.factors[c][s].iter().map(|(a, _)| a.abs()).sum::<f64>())
                    / (2.0 * w);
                loop {
                    let t = rng.random_range(-w..w);
                    if rng.random::<f64>() * bound < self.factor(c, s, t) {
                        data.push(t);
                        break;
                    }
                }
            }
        }
        ParticleEnsemble::from_flat(d, data).unwrap()
    }
}

fn in_class_recovery() -> (Verdict, FhtModel) {
    let start = Instant::now();
    let d = 8;
    let seed = SeedPath::new(8);
    let mix = Mixture::random(d, seed.child(0));
    let truth = mix.model(d);
    let samples = mix.sample(d, 1_000_000, seed.child(1));
    let tree = truth.tree().clone();
    let params = FitParams::uniform(&tree, 2);
    let fit = |s: &ParticleEnsemble| {
        sketch_fit(s, None, &tree, truth.basis(), &params)
            .unwrap()
            .model
    };
    let full = fit(&samples);
    let batches = 10;
    let per = samples.len() / batches;
    let batch_models: Vec<FhtModel> = (0..batches)
        .map(|b| {
            fit(&ParticleEnsemble::from_flat(
                d,
                samples.as_flat()[b * per * d..(b + 1) * per * d].to_vec(),
            )
            .unwrap())
        })
        .collect();
    let points = mix.sample(d, 50, seed.child(2));
    let mut worst: f64 = 0.0;
    let mut misses = 0;
    for x in points.iter() {
        let exact = mix.density(x);
        let model_exact = truth.eval(x).unwrap();
        assert!((exact - model_exact).abs() <= 1e-10 * exact.abs());
        let batch: Vec<f64> = batch_models.iter().map(|m| m.eval(x).unwrap()).collect();
        let mean = batch.iter().sum::<f64>() / batches as f64;
        let var = batch.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (batches - 1) as f64;
        let se = (var / batches as f64).sqrt();
        let z = (full.eval(x).unwrap() - exact).abs() / se;
        worst = worst.max(z);
        if z > 3.0 {
            misses += 1;
        }
    }
    let ok = misses == 0 && within(start.elapsed(), 300);
    (
        verdict(
            ok,
            format!("{misses} of 50 points beyond 3 SE (max {worst:.2} SE)"),
            start.elapsed(),
        ),
        full,
    )
}

fn normalization(models: &[&FhtModel]) -> Verdict {
    let start = Instant::now();
    let mut worst_integral: f64 = 0.0;
    let mut worst_marginal: f64 = 0.0;
    for m in models {
        worst_integral = worst_integral.max((m.integral() - 1.0).abs());
        let w = m.basis().half_width();
        let g = linspace(-w, w, 200);
        for (i, j) in [(0, 1), (1, 0), (0, m.dim() - 1)] {
            let v = m.marginal_2d(i, j, &g, &g).unwrap();
            worst_marginal = worst_marginal.max((trapezoid_2d(&v, &g, &g) - 1.0).abs());
        }
    }
    let ok = worst_integral <= 1e-12 && worst_marginal <= 1e-3;
    verdict(
        ok,
        format!("{} models: max |integral - 1| {worst_integral:.1e}, max |2-marginal mass - 1| {worst_marginal:.1e}", models.len()),
        start.elapsed(),
    )
}

fn four_peaks(out: &SampleOutput, model: &FhtModel) -> Verdict {
    let start = Instant::now();
    let (gpts, values) = model_marginal(model, 1, 0, 200).unwrap();
    let masses = grid_ball_masses(&values, &gpts, &gpts, &MODE_CENTERS, 0.5).unwrap();
    let total: f64 = masses.iter().sum();
    let (pp, mm) = (masses[0], masses[3]);
    let baseline = &out.baseline.as_ref().unwrap().0;
    let base = sample_ball_masses(baseline, 1, 0, &MODE_CENTERS, 0.5).unwrap()[0];
    let ok = total > 0.9 && (pp - mm).abs() <= 0.1 && base > 0.9;
    verdict(
        ok,
        format!(
            "model mass in four balls {total:.4} > 0.9, |(+,+) - (-,-)| = |{pp:.4} - {mm:.4}| <= 0.1, baseline (+,+) mass {base:.4} > 0.9"
        ),
        start.elapsed(),
    )
}

fn asymmetric() -> Verdict {
    let start = Instant::now();
    let text = |init: &str| {
        format!(
            r#"
            potential.geometry = "chain"
            potential.d = 32
            potential.lambda_factor = 0.5
            potential.cubic_a = 0.01
            sampler.beta0 = 3.0
            sampler.beta = 6.0
            sampler.scale = 20.0
            sampler.levels = 10
            sampler.mala_steps = 700
            sampler.n_ensembles = 10
            sampler.particles_per_ensemble = 100
            sampler.init = "{init}"
            "#
        )
    };
    let plus = RunConfig::from_toml(&text("all_plus")).unwrap();
    let minus = RunConfig::from_toml(&text("all_minus")).unwrap();
    let a = run_sampler(&plus, true).unwrap();
    let b = run_sampler(&minus, false).unwrap();
    let (ia, ib) = (final_iota(&a.trace), final_iota(&b.trace));
    let base = final_iota(&a.baseline.unwrap().1);
    let ok = (ia - ib).abs() <= 0.05 && base > 0.9 && within(start.elapsed(), 900);
    verdict(ok, format!("ratios from (+1)^d {ia:.4} and (-1)^d {ib:.4} differ by {:.4} <= 0.05, baseline {base:.4} > 0.9", (ia - ib).abs()), start.elapsed())
}

fn files_in(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut v: Vec<_> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap())
        .map(|e| {
            (
                e.file_name().to_string_lossy().into_owned(),
                std::fs::read(e.path()).unwrap(),
            )
        })
        .filter(|(name, _)| name != "manifest.toml")
        .collect();
    v.sort();
    v
}

fn reproducibility() -> Verdict {
    let start = Instant::now();
    let base = tempfile::tempdir().unwrap();
    let mut outs = Vec::new();
    for workers in [1, 3] {
        let dir = base.path().join(format!("w{workers}"));
        let mut cfg = RunConfig::from_toml(
            r#"
            potential.geometry = "grid"
            potential.d = 16
            potential.lambda_factor = 0.1
            sampler.beta0 = 1.0
            sampler.beta = 2.0
            sampler.scale = 12.0
            sampler.levels = 3
            sampler.mala_steps = 50
            sampler.n_ensembles = 4
            sampler.particles_per_ensemble = 50
            sampler.burn_in_time = 0.1
            sampler.baseline = true
            fht.q = 5
            fht.rank = 2
            diagnose.pairs = [[1, 0], [5, 6]]
            diagnose.model_samples = 200
            diagnose.grid_points = 50
            io.seed = 12
            "#,
        )
        .unwrap();
        cfg.io.out = dir.clone();
        cfg.io.workers = workers;
        cmd_pipeline(&cfg).unwrap();
        outs.push(files_in(&dir));
    }
    let names: Vec<&str> = outs[0].iter().map(|(n, _)| n.as_str()).collect();
    let ok = outs[0] == outs[1] && names.contains(&"samples.gls") && names.contains(&"model.fht");
    verdict(
        ok,
        format!(
            "{} output files byte-identical with 1 and 3 workers",
            names.len()
        ),
        start.elapsed(),
    )
}

fn main() -> ExitCode {
    let mut results = Vec::new();
    results.push(run(1, "gradient correctness", gradient_check));
    results.push(run(2, "MALA exactness", mala_exactness));
    results.push(run(3, "AIS unbiasedness", ais_unbiased));

    let cfg = metastable_config();
    let start = Instant::now();
    let shared = with_workers(0, || run_sampler(&cfg, true))
        .unwrap()
        .unwrap();
    let sample_time = start.elapsed();
    results.push(run(4, "metastability contrast", || {
        metastability(&shared, sample_time)
    }));
    results.push(run(5, "ensemble conservation", conservation));
    results.push(run(6, "FHT structural consistency", structural));
    let (v7, separable) = separable_recovery();
    results.push(run(7, "sketch recovery, rank 1", || v7));
    let (v8, in_class) = in_class_recovery();
    results.push(run(8, "in-class recovery, rank 2", || v8));
    let fitted = run_fit(&cfg, &shared.samples, None).unwrap().model;
    results.push(run(9, "normalization", || {
        normalization(&[&separable, &in_class, &fitted])
    }));
    results.push(run(10, "four-peak marginal", || {
        four_peaks(&shared, &fitted)
    }));
    results.push(run(11, "asymmetric two-start consistency", asymmetric));
    results.push(run(12, "reproducibility", reproducibility));

    let failed = results.iter().filter(|p| !**p).count();
    println!(
        "{} of {} criteria passed",
        results.len() - failed,
        results.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
