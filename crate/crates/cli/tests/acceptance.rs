//! Acceptance suite. Prints one PASS/FAIL line per check and a summary line
//! per criterion; exits non-zero if anything fails.

use std::f64::consts::PI;
use std::process::Command;
use std::time::{Duration, Instant};

use rand::Rng;
use unilab::analytic::quadrature::{integrate, Tolerance};
use unilab::analytic::{
    b3_q_integrals, cdf_absj, cdf_absj_quadrature, density_absj, h_k, lemma_integral,
    likelihood_ratio_at, mean_entropy_b3, mean_entropy_mu, q_moments, volume_ratio, DEFAULT_TOL,
    J_MAX, J_OBS,
};
use unilab::bistochastic::{
    all_link_triples, birkhoff_volume_exact, chain_link_feasible, classify,
    embedding_gram_determinant, extreme_q_search, hilbert_schmidt_distance, max_ball_radius, q_of,
};
use unilab::estimators::{
    collect_absj, collect_samples, estimate_many, estimate_mean, ks_distance, moment_suite,
    EmpiricalCdf, EstimateResult, Parallelism, Statistic,
};
use unilab::unitary::reconstruct;
use unilab::{
    BVector, BistochasticMatrix, MeasureSpec, NamedMatrix, Rational, RngStream, StochasticityClass,
    Unitary3,
};

const PAR: Parallelism = Parallelism { threads: 0 };
const SEED: u64 = 20_240_601;

#[derive(Default)]
struct Report {
    failed: Vec<u8>,
}

impl Report {
    fn check(&mut self, criterion: u8, label: &str, ok: bool, detail: impl AsRef<str>) {
        let tag = if ok { "PASS" } else { "FAIL" };
        println!("{tag} [{criterion}] {label}: {}", detail.as_ref());
        if !ok {
            self.failed.push(criterion);
        }
    }

    fn close(&mut self, criterion: u8, label: &str, got: f64, want: f64, tol: f64) {
        let err = (got - want).abs();
        self.check(
            criterion,
            label,
            err <= tol,
            format!("{got:.15e} vs {want:.15e} (|diff| {err:.1e} <= {tol:.0e})"),
        );
    }

    fn z(&mut self, criterion: u8, r: &EstimateResult, elapsed: Duration, limit: Duration) {
        let z = r.z_score.unwrap_or(f64::NAN);
        let ok = z.abs() < 4.0 && elapsed < limit;
        self.check(
            criterion,
            &format!("{} under {}", r.name, r.measure),
            ok,
            format!(
                "{:.6e} ± {:.2e} vs {:.6e}, z = {z:+.2}, n = {}, {:.1}s",
                r.estimate,
                r.std_error,
                r.reference.unwrap_or(f64::NAN),
                r.n_samples,
                elapsed.as_secs_f64()
            ),
        );
    }

    fn summary(&self, criterion: u8, title: &str) {
        let ok = !self.failed.contains(&criterion);
        println!(
            "{} criterion {criterion}: {title}",
            if ok { "PASS" } else { "FAIL" }
        );
        println!();
    }
}

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let t = Instant::now();
    let v = f();
    (v, t.elapsed())
}

fn criterion_1(r: &mut Report) {
    let start = Instant::now();
    r.close(
        1,
        "h_3/2 = pi^2/105",
        h_k(1.5).unwrap(),
        PI * PI / 105.0,
        1e-12,
    );
    r.close(1, "h_1 = pi/2", h_k(1.0).unwrap(), PI / 2.0, 1e-12);
    r.close(
        1,
        "volume ratio = 8 pi^2/105",
        volume_ratio(),
        8.0 * PI * PI / 105.0,
        1e-12,
    );
    r.close(
        1,
        "volume ratio = 0.751969...",
        volume_ratio(),
        0.751_969,
        1e-6,
    );
    let vol = birkhoff_volume_exact();
    r.check(
        1,
        "Birkhoff 4-volume = 9/8 (exact)",
        vol == Rational::new(9, 8),
        vol.to_string(),
    );
    let gram = embedding_gram_determinant();
    r.check(
        1,
        "Gram determinant = 81 (exact)",
        gram == Rational::from_integer(81),
        gram.to_string(),
    );
    r.close(
        1,
        "<S> mu_1 = 5/6",
        mean_entropy_mu(1.0).unwrap(),
        5.0 / 6.0,
        1e-12,
    );
    r.close(
        1,
        "<S> mu_3/2 = 286/315",
        mean_entropy_mu(1.5).unwrap(),
        286.0 / 315.0,
        1e-12,
    );
    r.close(1, "<S> B3 = 53/60", mean_entropy_b3(), 53.0 / 60.0, 1e-12);
    r.close(
        1,
        "<J^2> mu_1 = 1/720",
        q_moments(1.0, 1).unwrap() / 4.0,
        1.0 / 720.0,
        1e-12,
    );
    r.close(
        1,
        "<J^2> mu_3/2 = 3/1144",
        q_moments(1.5, 1).unwrap() / 4.0,
        3.0 / 1144.0,
        1e-12,
    );
    let bq = b3_q_integrals();
    r.check(
        1,
        "<Q> B3 = 1/168 (exact)",
        bq.mean_exact == Rational::new(1, 168),
        bq.mean_exact.to_string(),
    );
    r.check(
        1,
        "<Q^2> B3 = 1/5940 (exact)",
        bq.second_exact == Rational::new(1, 5940),
        bq.second_exact.to_string(),
    );
    r.close(1, "<Q> B3 (f64)", bq.mean, 1.0 / 168.0, 1e-12);
    r.close(1, "<Q^2> B3 (f64)", bq.second, 1.0 / 5940.0, 1e-12);
    let q_schur = q_of(&NamedMatrix::Schur.matrix().bvec());
    r.check(
        1,
        "Q(Schur) = -1/16 (exact)",
        q_schur == Rational::new(-1, 16),
        q_schur.to_string(),
    );
    let q_w = q_of(&NamedMatrix::W.matrix().bvec());
    r.check(
        1,
        "Q(W) = 1/27 (exact)",
        q_w == Rational::new(1, 27),
        q_w.to_string(),
    );
    r.close(
        1,
        "J(F3)^2 = 1/108",
        Unitary3::<f64>::fourier().jarlskog().powi(2),
        1.0 / 108.0,
        1e-12,
    );
    let elapsed = start.elapsed();
    r.check(
        1,
        "runtime < 1 s",
        elapsed < Duration::from_secs(1),
        format!("{:.3}s", elapsed.as_secs_f64()),
    );
    r.summary(1, "exact constants");
}

fn criterion_2(r: &mut Report) {
    let limit = Duration::from_secs(60);
    let n = 1_000_000;
    let (res, t) = timed(|| {
        estimate_many(
            MeasureSpec::FlatB3,
            &[Statistic::IndicatorQNonneg, Statistic::Q],
            n,
            SEED,
            PAR,
        )
        .unwrap()
    });
    r.z(2, &res[0], t, limit);
    r.check(
        2,
        "P{Q>=0} vs earlier MC 0.7520 ± 0.0005",
        (res[0].estimate - 0.7520).abs()
            < 4.0 * (0.0005f64.powi(2) + res[0].std_error.powi(2)).sqrt(),
        format!("{:.5}", res[0].estimate),
    );
    let sigma = res[1].sample_std;
    r.check(
        2,
        "sigma_Q under B3 = 0.01153 ± 2%",
        rel(sigma, 0.01153) < 0.02 && t < limit,
        format!(
            "{sigma:.6} (closed form {:.6}), {:.1}s",
            b3_q_integrals().sigma,
            t.as_secs_f64()
        ),
    );
    for k in [1.0, 1.5] {
        let (res, t) = timed(|| {
            estimate_mean(
                MeasureSpec::mu_k(k).unwrap(),
                Statistic::Entropy,
                n,
                SEED + 1,
                PAR,
            )
            .unwrap()
        });
        r.z(2, &res, t, limit);
    }
    for k in [1.0, 1.5, 2.0] {
        let (res, t) = timed(|| moment_suite(k, 3, n, SEED + 2, PAR).unwrap());
        for m in &res[1..] {
            r.z(2, m, t, limit);
        }
    }
    r.summary(2, "Monte Carlo vs analytic");
}

fn criterion_3(r: &mut Report) {
    let y = J_OBS.value;
    let p1 = cdf_absj(1.0, y, DEFAULT_TOL).unwrap().value;
    r.check(
        3,
        "cdf_absj(1, 3.08e-5) in [7.3e-4, 8.2e-4]",
        (7.3e-4..=8.2e-4).contains(&p1),
        format!("{p1:.6e}"),
    );
    let p2 = cdf_absj(1.0, 1e-4, DEFAULT_TOL).unwrap().value;
    r.check(
        3,
        "cdf_absj(1, 1e-4) = 2.5085e-3 ± 1%",
        rel(p2, 2.5085e-3) < 0.01,
        format!("{p2:.6e}"),
    );
    let p3 = cdf_absj(1.5, y, DEFAULT_TOL).unwrap().value;
    r.check(
        3,
        "cdf_absj(3/2, 3.08e-5) = 3.98e-7 ± 2%",
        rel(p3, 3.98e-7) < 0.02,
        format!("{p3:.6e}"),
    );
    let p3q = cdf_absj_quadrature(1.5, y, 1e-15).unwrap().value;
    r.check(
        3,
        "cdf_absj(3/2, 3.08e-5): series vs quadrature",
        rel(p3, p3q) < 1e-6,
        format!("{p3:.12e} vs {p3q:.12e}"),
    );
    let p1q = cdf_absj_quadrature(1.0, y, 1e-15).unwrap().value;
    r.check(
        3,
        "cdf_absj(1, 3.08e-5): series vs quadrature",
        rel(p1, p1q) < 1e-6,
        format!("{p1:.12e} vs {p1q:.12e}"),
    );
    let lr = likelihood_ratio_at(y).unwrap();
    r.check(
        3,
        "likelihood_ratio_at(3.08e-5) = 1200 ± 10%",
        rel(lr, 1200.0) < 0.1,
        format!("{lr:.2}"),
    );
    let (res, t) = timed(|| {
        estimate_mean(
            MeasureSpec::Haar,
            Statistic::IndicatorAbsjLeq(y),
            10_000_000,
            SEED + 3,
            PAR,
        )
        .unwrap()
    });
    r.z(3, &res, t, Duration::from_secs(600));
    r.summary(3, "CKM probabilities");
}

fn criterion_4(r: &mut Report) {
    let n = 1_000_000;
    for (label, measure, k) in [
        ("Haar", MeasureSpec::Haar, 1.0),
        ("mu_3/2", MeasureSpec::MuK(1.5), 1.5),
    ] {
        let samples = collect_absj(measure, n, SEED + 4, PAR).unwrap();
        let ecdf = EmpiricalCdf::new(samples).unwrap();
        let d = ks_distance(&ecdf, |y| cdf_absj(k, y.min(J_MAX), 1e-12).unwrap().value);
        r.check(
            4,
            &format!("KS {label} |J| vs cdf_absj(k = {k}) < 0.003"),
            d < 0.003,
            format!("D = {d:.5}, n = {n}"),
        );
    }
    for k in [1.0, 1.5] {
        let norm = integrate(
            |x| density_absj(k, x, 1e-15).unwrap().value,
            0.0,
            1.0,
            Tolerance::absolute(1e-12),
        )
        .unwrap()
        .value;
        r.close(4, &format!("integral of f0 = 1 (k = {k})"), norm, 1.0, 1e-8);
    }
    r.close(
        4,
        "lemma integral = 3",
        lemma_integral(1e-12).unwrap().value,
        3.0,
        1e-8,
    );
    r.summary(4, "distributional agreement");
}

fn criterion_5(r: &mut Report) {
    let mu = collect_samples(MeasureSpec::MuK(1.5), 10_000, SEED + 5, PAR).unwrap();
    let (mut worst_back, mut worst_defect) = (0.0f64, 0.0f64);
    for s in &mu {
        let m = s.b.matrix();
        let u = reconstruct(&m).unwrap().unitary;
        worst_defect = worst_defect.max(u.unitarity_defect());
        worst_back = worst_back.max(u.to_bistochastic().unwrap().max_abs_diff(&m));
    }
    r.check(
        5,
        "reconstruction round trip on 1e4 mu_3/2 samples",
        worst_back < 1e-10 && worst_defect < 1e-10,
        format!("max |f(U)-B| = {worst_back:.1e}, max defect = {worst_defect:.1e}"),
    );

    let haar = collect_samples(MeasureSpec::Haar, 100_000, SEED + 6, PAR).unwrap();
    let worst = haar
        .iter()
        .map(|s| (s.jarlskog.unwrap().powi(2) - q_of(&s.b) / 4.0).abs())
        .fold(0.0, f64::max);
    r.check(
        5,
        "J^2 = Q/4 on 1e5 Haar samples",
        worst < 1e-12,
        format!("max |diff| = {worst:.1e}"),
    );

    let flat = collect_samples(MeasureSpec::FlatB3, 100_000, SEED + 7, PAR).unwrap();
    let mut worst = 0.0f64;
    for s in flat.iter().take(10_000) {
        let m = s.b.matrix();
        let q = q_of(&s.b);
        for img in m.symmetry_images() {
            worst = worst.max((q_of(&img.bvec()) - q).abs());
        }
    }
    let exact_ok = {
        let m: BistochasticMatrix<Rational> = BistochasticMatrix::from_b(
            BVector::new(
                Rational::new(1, 5),
                Rational::new(2, 7),
                Rational::new(1, 3),
                Rational::new(3, 11),
            )
            .unwrap(),
        );
        let q = q_of(&m.bvec());
        m.symmetry_images().iter().all(|i| q_of(&i.bvec()) == q)
    };
    r.check(
        5,
        "Q invariant under all 72 symmetries",
        worst < 1e-15 && exact_ok,
        format!("1e4 samples, max |diff| = {worst:.1e}; exact rational check {exact_ok}"),
    );

    let mut mismatches = 0;
    for s in &flat {
        let m = s.b.matrix();
        let nonneg = classify(&m).class != StochasticityClass::NotUnistochastic;
        for triple in all_link_triples(&m) {
            if chain_link_feasible(&triple).unwrap() != nonneg {
                mismatches += 1;
            }
        }
    }
    r.check(
        5,
        "chain-link <=> Q >= 0 on 1e5 samples",
        mismatches == 0,
        format!("{mismatches} mismatches"),
    );

    let e = extreme_q_search(24, 1e-12).unwrap();
    let ok = (e.min_value + 1.0 / 16.0).abs() < 1e-9 && (e.max_value - 1.0 / 27.0).abs() < 1e-9;
    r.check(
        5,
        "extreme_q_search recovers (-1/16, 1/27)",
        ok,
        format!("({:.12e}, {:.12e})", e.min_value, e.max_value),
    );

    let radius = max_ball_radius::<f64>() - 1e-9;
    let w = NamedMatrix::W.matrix().to_f64();
    let mut rng = RngStream::new(SEED + 8, 0).rng();
    let (mut inside, mut bad) = (0, 0);
    let half = 2.0 / 3.0 * radius + 1e-3;
    while inside < 100_000 {
        let b = [0; 4].map(|_| 1.0 / 3.0 + half * (2.0 * rng.random::<f64>() - 1.0));
        let Ok(m) =
            BistochasticMatrix::from_rows(BVector::new_unchecked(b[0], b[1], b[2], b[3]).entries())
        else {
            continue;
        };
        if hilbert_schmidt_distance(&m, &w) > radius {
            continue;
        }
        inside += 1;
        if !classify(&m).class.is_unistochastic() {
            bad += 1;
        }
    }
    r.check(
        5,
        "ball of radius sqrt(2)/3 around W is unistochastic",
        bad == 0,
        format!("{bad} of {inside} in-ball points outside U3"),
    );
    r.summary(5, "structural properties");
}

fn cli(args: &[&str]) -> Vec<u8> {
    let o = Command::new(env!("CARGO_BIN_EXE_unilab"))
        .args(args)
        .env_remove("UNILAB_THREADS")
        .output()
        .expect("binary runs");
    assert!(
        o.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&o.stderr)
    );
    o.stdout
}

fn criterion_6(r: &mut Report) {
    let stats = [
        Statistic::Q,
        Statistic::Entropy,
        Statistic::IndicatorQNonneg,
    ];
    for measure in [
        MeasureSpec::Haar,
        MeasureSpec::MuK(1.5),
        MeasureSpec::FlatB3,
    ] {
        let runs: Vec<Vec<u64>> = [1, 1, 3, 8]
            .iter()
            .map(|&t| {
                estimate_many(measure, &stats, 300_000, SEED, Parallelism::threads(t))
                    .unwrap()
                    .iter()
                    .flat_map(|e| [e.estimate.to_bits(), e.std_error.to_bits()])
                    .collect()
            })
            .collect();
        let same = runs.iter().all(|x| x == &runs[0]);
        r.check(
            6,
            &format!("estimators bit-identical across runs and threads ({measure})"),
            same,
            "threads 1, 1, 3, 8",
        );
        let draw = |t| {
            collect_samples(measure, 200_000, SEED, Parallelism::threads(t))
                .unwrap()
                .iter()
                .flat_map(|s| s.b.to_array().map(f64::to_bits))
                .collect::<Vec<_>>()
        };
        r.check(
            6,
            &format!("samples bit-identical across threads ({measure})"),
            draw(1) == draw(6),
            "threads 1, 6",
        );
    }
    let commands: [&[&str]; 5] = [
        &[
            "sample",
            "--measure",
            "haar",
            "--n",
            "150000",
            "--seed",
            "7",
        ],
        &[
            "sample",
            "--measure",
            "mu:3/2",
            "--n",
            "150000",
            "--seed",
            "7",
        ],
        &[
            "estimate",
            "--target",
            "volume-ratio",
            "--n",
            "150000",
            "--seed",
            "7",
        ],
        &[
            "estimate",
            "--target",
            "moments",
            "--measure",
            "mu:2",
            "--n",
            "150000",
            "--seed",
            "7",
        ],
        &[
            "estimate",
            "--target",
            "prob-jobs",
            "--n",
            "150000",
            "--seed",
            "7",
        ],
    ];
    for args in commands {
        let outs: Vec<Vec<u8>> = ["1", "1", "4"]
            .iter()
            .map(|t| {
                let mut a = args.to_vec();
                a.extend(["--threads", t]);
                cli(&a)
            })
            .collect();
        let same = outs.iter().all(|o| o == &outs[0]) && !outs[0].is_empty();
        r.check(
            6,
            &format!("`unilab {}` reproducible", args.join(" ")),
            same,
            "threads 1, 1, 4",
        );
    }
    r.summary(6, "determinism");
}

fn main() {
    let mut r = Report::default();
    criterion_1(&mut r);
    criterion_2(&mut r);
    criterion_3(&mut r);
    criterion_4(&mut r);
    criterion_5(&mut r);
    criterion_6(&mut r);
    let mut failed = r.failed.clone();
    failed.dedup();
    if failed.is_empty() {
        println!("acceptance: all criteria passed");
    } else {
        println!("acceptance: failed criteria {failed:?}");
        std::process::exit(1);
    }
}
