//! End-to-end acceptance run. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any criterion fails.
//!
//! Training criteria use a desk-scale profile: 32^3 fields, two residual
//! blocks of width 128, batches of 1000 and 2000 iterations, with the
//! learning rate dropping tenfold after each third of the run. The sine
//! frequency follows the field: low for the smooth rotation fields, higher
//! for the ABC flow, which packs a full period into the cube.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use streamfn::eval::{constancy_check, global_range, resample_fidelity, trace_streamline};
use streamfn::export::{read_vtk, write_vtk, VtkData};
use streamfn::net::{
    deserialize, param_gradients, serialize, to_bytes, Architecture, Batch, FnField, GradientFunction, LossKind,
    Network, Objective, ScalarFunction, StreamNet,
};
use streamfn::train::{sample_rake, LrSchedule, RakeSpec};
use streamfn::volume::{
    curl, frenet_normal, gen_analytic, load_raw, read_sidecar, save_raw, Dims, ScalarField, VectorField,
};
use streamfn::{err_volume, train, ErrStats, TrainConfig};

const SMOOTH_OMEGA: f64 = 3.0;
const ABC_OMEGA: f64 = 16.0;
const DESK_ITERATIONS: usize = 2000;

fn desk_config(loss: LossKind, omega0: f64) -> TrainConfig {
    TrainConfig {
        loss,
        iterations: DESK_ITERATIONS,
        batch_size: Some(1000),
        schedule: LrSchedule {
            lr0: 1e-4,
            factor: 10.0,
            every: DESK_ITERATIONS / 3,
        },
        architecture: Architecture {
            hidden_layers: 4,
            width: 128,
            omega0,
        },
        log_every: 0,
        ..TrainConfig::default()
    }
}

fn field(name: &str) -> VectorField {
    gen_analytic(name, Dims::cube(32).unwrap(), &BTreeMap::new()).unwrap()
}

struct Report {
    failures: usize,
}

impl Report {
    fn record(&mut self, id: u32, title: &str, pass: bool, detail: String, elapsed: Duration) {
        let verdict = if pass { "PASS" } else { "FAIL" };
        println!("criterion {id:>2} {verdict}  {title}: {detail} [{:.1}s]", elapsed.as_secs_f64());
        if !pass {
            self.failures += 1;
        }
    }
}

fn random_points(rng: &mut ChaCha8Rng, n: usize) -> Vec<[f64; 3]> {
    (0..n).map(|_| [0; 3].map(|_| rng.random_range(-1.0..1.0))).collect()
}

/// Worst componentwise relative error of analytic input gradients against
/// central differences, each component relative to the gradient's largest.
fn input_gradient_oracle() -> f64 {
    let h = 1e-4;
    let mut worst: f64 = 0.0;
    for trial in 0..10u64 {
        let width = 32 + (trial as usize * 7) % 33;
        let net = StreamNet::init(Architecture::new(4, width).unwrap(), 1000 + trial)
            .unwrap()
            .cast::<f64>();
        let mut rng = ChaCha8Rng::seed_from_u64(trial);
        let points = random_points(&mut rng, 100);
        let analytic = net.forward_with_grad_batch(&points).unwrap().1;
        for (p, g) in points.iter().zip(&analytic) {
            let mut fd = [0.0; 3];
            for c in 0..3 {
                let (mut a, mut b) = (*p, *p);
                a[c] += h;
                b[c] -= h;
                fd[c] = (net.forward(a).unwrap() - net.forward(b).unwrap()) / (2.0 * h);
            }
            let scale = fd.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            for c in 0..3 {
                worst = worst.max((g[c] - fd[c]).abs() / fd[c].abs().max(scale));
            }
        }
    }
    worst
}

fn reference_loss(net: &Network<f64>, batch: &Batch<f64>, seeds: &[[f64; 3]], kind: LossKind) -> f64 {
    let (_, grads) = net.forward_with_grad_batch(&batch.points).unwrap();
    let n = batch.points.len() as f64;
    let mut total = 0.0;
    if kind.uses_perp() {
        total += grads
            .iter()
            .zip(&batch.vectors)
            .map(|(g, v)| (g[0] * v[0] + g[1] * v[1] + g[2] * v[2]).abs())
            .sum::<f64>()
            / n;
    }
    if kind.uses_pss() {
        total += grads
            .iter()
            .zip(batch.normals.as_ref().unwrap())
            .map(|(g, m)| {
                let c = g[0] * m[0] + g[1] * m[1] + g[2] * m[2];
                let q = g.iter().map(|x| x * x).sum::<f64>();
                let r = m.iter().map(|x| x * x).sum::<f64>();
                1.0 - c * c / (q * r)
            })
            .sum::<f64>()
            / n;
    }
    if kind.uses_seeds() {
        let f = net.forward_batch(seeds).unwrap();
        total += f.iter().map(|v| v.abs()).sum::<f64>() / f.len() as f64;
    }
    total
}

/// Worst relative error of `<grad, d>` against central differences of the loss.
fn parameter_gradient_oracle() -> f64 {
    let eps = 1e-6;
    let mut worst: f64 = 0.0;
    for (trial, kind) in [LossKind::Perp, LossKind::Pss, LossKind::PerpSeeds].into_iter().enumerate() {
        let net = StreamNet::init(Architecture::new(4, 32).unwrap(), 70 + trial as u64)
            .unwrap()
            .cast::<f64>();
        let mut rng = ChaCha8Rng::seed_from_u64(500 + trial as u64);
        let batch = Batch {
            points: random_points(&mut rng, 32),
            vectors: random_points(&mut rng, 32),
            normals: Some(random_points(&mut rng, 32)),
        };
        let seeds = random_points(&mut rng, 16);
        let (_, grads) = param_gradients(&net, &batch, Some(&seeds), &Objective::new(kind)).unwrap();
        for _ in 0..20 {
            let dir: Vec<f64> = (0..grads.len()).map(|_| rng.random_range(-1.0..1.0)).collect();
            let at = |s: f64| {
                let mut moved = net.clone();
                for (p, d) in moved.params_mut().iter_mut().zip(&dir) {
                    *p += s * d;
                }
                reference_loss(&moved, &batch, &seeds, kind)
            };
            let fd = (at(eps) - at(-eps)) / (2.0 * eps);
            let analytic: f64 = grads.iter().zip(&dir).map(|(g, d)| g * d).sum();
            worst = worst.max((fd - analytic).abs() / fd.abs().max(analytic.abs()).max(1e-12));
        }
    }
    worst
}

fn stats_line(s: &ErrStats) -> String {
    format!("median {:.4} deg, mean {:.4} deg, max {:.2} deg", s.median_deg, s.mean_deg, s.max_deg)
}

fn ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        let mid = (i + j) as f64 / 2.0;
        for &k in &order[i..=j] {
            ranks[k] = mid;
        }
        i = j + 1;
    }
    ranks
}

fn spearman(a: &[f64], b: &[f64]) -> f64 {
    let (ra, rb) = (ranks(a), ranks(b));
    let n = a.len() as f64;
    let (ma, mb) = (ra.iter().sum::<f64>() / n, rb.iter().sum::<f64>() / n);
    let cov: f64 = ra.iter().zip(&rb).map(|(x, y)| (x - ma) * (y - mb)).sum();
    let va: f64 = ra.iter().map(|x| (x - ma).powi(2)).sum();
    let vb: f64 = rb.iter().map(|y| (y - mb).powi(2)).sum();
    cov / (va * vb).sqrt()
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

fn is_interior(dims: Dims, idx: usize) -> bool {
    let [i, j, k] = dims.unravel(idx);
    let inside = |c: usize, n: usize| c > 0 && c + 1 < n;
    inside(i, dims.nx) && inside(j, dims.ny) && inside(k, dims.nz)
}

fn main() {
    let mut report = Report { failures: 0 };

    // 1
    let t = Instant::now();
    let worst = input_gradient_oracle();
    let el = t.elapsed();
    report.record(
        1,
        "input-gradient oracle",
        worst <= 1e-4 && el < Duration::from_secs(10),
        format!("worst relative error {worst:.2e} (<= 1e-4)"),
        el,
    );

    // 2
    let t = Instant::now();
    let worst = parameter_gradient_oracle();
    let el = t.elapsed();
    report.record(
        2,
        "parameter-gradient oracle",
        worst <= 1e-3 && el < Duration::from_secs(30),
        format!("worst relative error {worst:.2e} (<= 1e-3)"),
        el,
    );

    // 3
    let rigid = field("rigid_rotation");
    let t = Instant::now();
    let (rigid_net, _) = train(&rigid, &desk_config(LossKind::Perp, SMOOTH_OMEGA)).unwrap();
    let (_, rigid_stats) = err_volume(&rigid_net, &rigid).unwrap();
    let el = t.elapsed();
    report.record(
        3,
        "rigid rotation L_perp",
        rigid_stats.median_deg <= 0.5 && rigid_stats.mean_deg <= 1.0 && el <= Duration::from_secs(300),
        stats_line(&rigid_stats),
        el,
    );

    // 4
    let abc = field("abc");
    let t = Instant::now();
    let (abc_net, _) = train(&abc, &desk_config(LossKind::Perp, ABC_OMEGA)).unwrap();
    let (_, abc_stats) = err_volume(&abc_net, &abc).unwrap();
    report.record(4, "ABC flow L_perp", abc_stats.median_deg <= 2.0, stats_line(&abc_stats), t.elapsed());

    // 5
    let t = Instant::now();
    let (pss_net, _) = train(&rigid, &desk_config(LossKind::Pss, SMOOTH_OMEGA)).unwrap();
    let (_, pss_stats) = err_volume(&pss_net, &rigid).unwrap();
    let (normals, _) = frenet_normal(&rigid).unwrap();
    let dims = rigid.dims();
    let coords: Vec<[f64; 3]> = dims.coords().collect();
    let bundles = pss_net.eval_with_grad_batch(&coords).unwrap();
    let mut to_normal = Vec::new();
    let mut f_vals = Vec::new();
    let mut radii = Vec::new();
    for (idx, b) in bundles.iter().enumerate() {
        let n = normals.data()[idx].map(f64::from);
        let nn = n.iter().map(|c| c * c).sum::<f64>().sqrt();
        let gn = b.grad.iter().map(|c| c * c).sum::<f64>().sqrt();
        if !is_interior(dims, idx) || nn < 1e-12 || gn < 1e-12 {
            continue;
        }
        let cos = (b.grad[0] * n[0] + b.grad[1] * n[1] + b.grad[2] * n[2]) / (nn * gn);
        to_normal.push(cos.abs().min(1.0).acos().to_degrees());
        f_vals.push(b.value);
        radii.push(coords[idx][0].hypot(coords[idx][1]));
    }
    let angle_n = median(to_normal);
    let rho = spearman(&f_vals, &radii);
    report.record(
        5,
        "principal stream surfaces",
        pss_stats.median_deg <= 5.0 && angle_n <= 10.0 && rho.abs() >= 0.9,
        format!("{}; median angle to N {angle_n:.3} deg; spearman(f, r) {rho:.4}", stats_line(&pss_stats)),
        t.elapsed(),
    );

    // 6
    let t = Instant::now();
    let rake = RakeSpec::segment([-0.5, -0.5, -0.5], [0.5, 0.5, 0.5], 256);
    let mut cfg = desk_config(LossKind::PerpSeeds, ABC_OMEGA);
    cfg.rake = Some(rake.clone());
    let (seeded_net, _) = train(&abc, &cfg).unwrap();
    let (_, seeded_stats) = err_volume(&seeded_net, &abc).unwrap();
    let on_rake = seeded_net.eval_batch(&sample_rake(&rake).unwrap()).unwrap();
    let mean_abs = on_rake.iter().map(|v| v.abs()).sum::<f64>() / on_rake.len() as f64;
    let range = global_range(&seeded_net).unwrap();
    let ratio = seeded_stats.median_deg / abc_stats.median_deg;
    report.record(
        6,
        "seeding rake",
        mean_abs <= 0.01 * range && ratio <= 2.0,
        format!(
            "mean |f| on rake {:.3}% of range; median {:.4} deg = {ratio:.2}x perp-only",
            100.0 * mean_abs / range,
            seeded_stats.median_deg
        ),
        t.elapsed(),
    );

    // 7
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut lines = Vec::new();
    while lines.len() < 50 {
        let seed: [f64; 3] = [0; 3].map(|_| rng.random_range(-0.9..0.9));
        if seed[0].hypot(seed[1]) < 0.05 {
            continue;
        }
        lines.push(trace_streamline(&rigid, seed, 0.01, 2000).unwrap());
    }
    let trained = constancy_check(&rigid_net, &lines).unwrap();
    let exact = FnField::new(|x: [f64; 3]| x[0] * x[0] + x[1] * x[1]);
    let oracle = constancy_check(&exact, &lines).unwrap();
    report.record(
        7,
        "streamline constancy",
        trained.median_relative <= 0.02 && oracle.max_relative <= 1e-6,
        format!(
            "median relative variation {:.3}%; analytic oracle {:.2e}",
            100.0 * trained.median_relative,
            oracle.max_relative
        ),
        t.elapsed(),
    );

    // 8
    let t = Instant::now();
    let vort = curl(&rigid).unwrap();
    let mut curl_err: f64 = 0.0;
    for idx in 0..dims.count() {
        if is_interior(dims, idx) {
            let w = vort.data()[idx];
            curl_err = curl_err.max(
                (f64::from(w[0]).abs())
                    .max(f64::from(w[1]).abs())
                    .max((f64::from(w[2]) - 2.0).abs()),
            );
        }
    }
    let (vort_net, _) = train(&vort, &desk_config(LossKind::Perp, SMOOTH_OMEGA)).unwrap();
    let (_, vort_stats) = err_volume(&vort_net, &vort).unwrap();
    report.record(
        8,
        "vortex tubes via curl",
        curl_err <= 1e-5 && vort_stats.median_deg <= 0.5,
        format!("max |curl - (0,0,2)| {curl_err:.1e}; {}", stats_line(&vort_stats)),
        t.elapsed(),
    );

    // 9
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let rows = resample_fidelity(&rigid_net, &[64, 128, 256], 10_000, &mut rng).unwrap();
    let decreasing = rows.windows(2).all(|w| w[1].mean_abs_dev < w[0].mean_abs_dev);
    report.record(
        9,
        "resample fidelity",
        decreasing,
        rows.iter()
            .map(|r| format!("{}^3 {:.3e}", r.resolution, r.mean_abs_dev))
            .collect::<Vec<_>>()
            .join(", "),
        t.elapsed(),
    );

    // 10
    let t = Instant::now();
    let dir = tempfile::tempdir().unwrap();
    let small = gen_analytic("abc", Dims::cube(12).unwrap(), &BTreeMap::new()).unwrap();
    let short = TrainConfig {
        iterations: 40,
        batch_size: Some(256),
        architecture: Architecture::new(2, 16).unwrap(),
        log_every: 0,
        seed: 11,
        ..TrainConfig::default()
    };
    let (a, _) = train(&small, &short).unwrap();
    let (b, _) = train(&small, &short).unwrap();
    let models_identical = to_bytes(&a) == to_bytes(&b);
    let model_path = dir.path().join("m.snf");
    serialize(&a, &model_path, serde_json::Value::Null).unwrap();
    let model_round_trip = to_bytes(&deserialize(&model_path).unwrap()) == to_bytes(&a);
    let raw_path = dir.path().join("v.raw");
    save_raw(&small, &raw_path).unwrap();
    let back = load_raw(&raw_path, &read_sidecar(&raw_path).unwrap()).unwrap();
    let bits = |f: &VectorField| f.data().iter().flatten().map(|c| c.to_bits()).collect::<Vec<_>>();
    let raw_round_trip = bits(&back) == bits(&small);
    let scalar = ScalarField::from_fn(Dims::new(5, 6, 7).unwrap(), |x| (x[0] * 3.0).sin() + x[1] * x[2]).unwrap();
    let vtk_path = dir.path().join("s.vtk");
    write_vtk(&scalar, "f", &vtk_path).unwrap();
    let vtk_round_trip = match read_vtk(&vtk_path).unwrap() {
        VtkData::Scalars(s) => s.data() == scalar.data() && s.dims() == scalar.dims(),
        VtkData::Vectors(_) => false,
    };
    report.record(
        10,
        "determinism and round trips",
        models_identical && model_round_trip && raw_round_trip && vtk_round_trip,
        format!(
            "identical models {models_identical}, model {model_round_trip}, raw {raw_round_trip}, vtk {vtk_round_trip}"
        ),
        t.elapsed(),
    );

    if report.failures > 0 {
        println!("{} acceptance criteria failed", report.failures);
        std::process::exit(1);
    }
    println!("all acceptance criteria passed");
}
