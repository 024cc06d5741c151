//! Acceptance checks. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

use std::f64::consts::PI;
use std::time::Instant;

use rellich_cli::{canonical, run, RunConfig};
use rellich_core::fields::{catalog, make_field, Family, FamilyParams, ScalarField};
use rellich_core::identities::{
    batch_reports, check_corollary, check_pointwise, check_rellich_equalities,
    check_rellich_inequality, check_theorem2, extremiser_scan, lemma_suite, IdentityReport, Suite,
    TermBatch, LEMMA_TOLERANCE,
};
use rellich_core::quadrature::{sphere_product_rule, QuadratureSettings, QuadratureSpec};

type Outcome = Result<String, String>;

fn field(f: Family, n: usize) -> ScalarField {
    make_field(&FamilyParams::new(f, n)).unwrap()
}

fn batch(f: &ScalarField, settings: &QuadratureSettings) -> Result<TermBatch, String> {
    let spec = QuadratureSpec::auto(f, settings).map_err(|e| e.to_string())?;
    TermBatch::compute(f, &spec).map_err(|e| e.to_string())
}

fn term(r: &IdentityReport, label: &str) -> f64 {
    r.term(label).map(|t| t.value).unwrap_or(f64::NAN)
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn gaussian() -> Family {
    Family::GaussianRadial { sigma: 1.0 }
}

/// ∫_{ℝⁿ} |Σ c_i r^{p_i}|² e^{−r²} dx by Γ-integrals.
fn gamma_profile(n: usize, terms: &[(i32, f64)]) -> f64 {
    let h = n as f64 / 2.0;
    let area = 2.0 * PI.powf(h) / libm::tgamma(h);
    let mut acc = 0.0;
    for &(p, a) in terms {
        for &(q, b) in terms {
            acc += a * b * area * libm::tgamma(h + (p + q) as f64 / 2.0) / 2.0;
        }
    }
    acc
}

fn criterion1() -> Outcome {
    let start = Instant::now();
    let mut worst: (f64, String) = (0.0, String::new());
    let mut count = 0;
    for n in 5..=9 {
        for f in catalog(n).map_err(|e| e.to_string())? {
            for r in check_pointwise(&f, 1000, 1).map_err(|e| e.to_string())? {
                count += 1;
                if !r.pass || r.rel_residual > 1e-9 {
                    return Err(format!("{} on {} (n = {n}): {:e}", r.name, f.id(), r.rel_residual));
                }
                if r.rel_residual > worst.0 {
                    worst = (r.rel_residual, format!("{} on {}", r.name, f.id()));
                }
            }
        }
    }
    let t = start.elapsed().as_secs_f64();
    let detail = format!("{count} reports, worst {:.2e} ({}), {t:.2} s", worst.0, worst.1);
    if t < 10.0 {
        Ok(detail)
    } else {
        Err(format!("runtime target missed: {detail}"))
    }
}

fn criterion2() -> Outcome {
    let b = batch(&field(gaussian(), 5), &QuadratureSettings::default())?;
    let rellich = check_rellich_equalities(&b).map_err(|e| e.to_string())?;
    let t2 = check_theorem2(&b).map_err(|e| e.to_string())?;
    let k = 1.25;
    let oracle = [
        ("‖f/r²‖²", term(&rellich[0], "weighted_f_over_r2") / (k * k), gamma_profile(5, &[(-2, 1.0)])),
        ("‖Δf‖²", term(&t2[0], "laplacian"), gamma_profile(5, &[(2, 1.0), (0, -5.0)])),
        ("‖Af‖²", term(&rellich[0], "bessel"), gamma_profile(5, &[(2, 1.0), (0, -5.0)])),
        ("‖R₁f‖²", term(&rellich[0], "r1"), gamma_profile(5, &[(2, 1.0), (0, -5.0), (-2, k)])),
        (
            "2K‖R₂f‖²",
            term(&rellich[0], "weighted_r2"),
            2.0 * k * gamma_profile(5, &[(0, -1.0), (-2, 0.5)]),
        ),
    ];
    let stated = [4.0 / 3.0, 35.0 / 4.0, 35.0 / 4.0, 5.0, 2.5 * 2.0 / 3.0].map(|c| c * PI.powf(2.5));
    for ((name, q, o), s) in oracle.iter().zip(stated) {
        if rel(*o, s) > 1e-13 {
            return Err(format!("Γ oracle for {name} is {o}, stated closed form {s}"));
        }
        if rel(*q, *o) > 1e-8 {
            return Err(format!("{name}: quadrature {q} vs oracle {o}"));
        }
    }
    let worst = rellich.iter().map(|r| r.rel_residual).fold(0.0, f64::max);
    if worst > 1e-8 || rellich.iter().any(|r| !r.pass) {
        return Err(format!("equality residual {worst:e}"));
    }
    let r = &rellich[0];
    Ok(format!(
        "{:.7} − {:.7} − {:.7} = {:.7}, worst rel residual {worst:.1e}",
        term(r, "bessel"),
        term(r, "r1"),
        term(r, "weighted_r2"),
        term(r, "weighted_f_over_r2")
    ))
}

fn criterion3() -> Outcome {
    let b = batch(&field(gaussian(), 5), &QuadratureSettings::default())?;
    let r = check_rellich_inequality(&b).map_err(|e| e.to_string())?;
    let rho = r.ratio.ok_or("no ratio")?;
    let d = (rho * rho - 5.0 / 21.0).abs();
    if r.pass && d <= 1e-8 {
        Ok(format!("ρ² = {:.12}, |ρ² − 5/21| = {d:.1e}", rho * rho))
    } else {
        Err(format!("ρ² = {}, pass = {}", rho * rho, r.pass))
    }
}

fn criterion4() -> Outcome {
    let start = Instant::now();
    let families = || {
        vec![
            gaussian(),
            Family::PolyGaussian {
                alpha: vec![1],
                sigma: 1.0,
            },
            Family::PolyGaussian {
                alpha: vec![1, 1],
                sigma: 1.0,
            },
            Family::PolyGaussian {
                alpha: vec![2],
                sigma: 1.0,
            },
            Family::AnnulusBump {
                inner: 0.5,
                outer: 2.0,
                width: 0.5,
            },
            Family::SolidGaussian {
                axis: 0,
                sigma: 1.0,
            },
        ]
    };
    let suites = [
        Suite::Hardy,
        Suite::Rellich,
        Suite::Theorem2,
        Suite::Corollary,
        Suite::Inequality,
        Suite::ProofChain,
    ];
    let settings = QuadratureSettings {
        mc_samples: 1_000_000,
        seed: Some(2024),
        ..QuadratureSettings::default()
    };
    let (mut count, mut worst_product) = (0, 0.0f64);
    let mut worst_mc: f64 = 0.0;
    for n in 5..=9 {
        for fam in families() {
            let f = field(fam, n);
            let b = batch(&f, &settings)?;
            let mc = b.is_monte_carlo();
            if mc != (n >= 8) {
                return Err(format!("{} at n = {n}: unexpected rule choice", f.id()));
            }
            for r in batch_reports(&b, &suites).map_err(|e| e.to_string())? {
                count += 1;
                if !r.pass || (!mc && r.rel_residual > 1e-7) {
                    return Err(format!(
                        "{}/{} on {} (n = {n}): rel {:e}, tol {:e}",
                        r.suite, r.name, r.fingerprint.field, r.rel_residual, r.tolerance
                    ));
                }
                if mc {
                    if r.tolerance > 0.0 {
                        worst_mc = worst_mc.max(r.rel_residual / r.tolerance);
                    }
                } else {
                    worst_product = worst_product.max(r.rel_residual);
                }
            }
        }
    }
    let t = start.elapsed().as_secs_f64();
    let detail = format!(
        "{count} reports; product worst rel {worst_product:.1e}; MC worst residual/(4 SE bound) {worst_mc:.2}; {t:.0} s"
    );
    if t < 300.0 {
        Ok(detail)
    } else {
        Err(format!("runtime target missed: {detail}"))
    }
}

fn criterion5() -> Outcome {
    let s = QuadratureSettings::default();
    let radial = [
        gaussian(),
        Family::AnnulusBump {
            inner: 0.5,
            outer: 2.0,
            width: 0.5,
        },
        Family::NearExtremiser { delta: 0.25 },
    ];
    let mut worst_radial: f64 = 0.0;
    for n in 5..=7 {
        for fam in &radial {
            let b = batch(&field(fam.clone(), n), &s)?;
            let r = check_corollary(&b).map_err(|e| e.to_string())?;
            let g = term(&r, "gap").abs() / term(&r, "laplacian");
            if !r.pass || g > 1e-9 {
                return Err(format!("{} at n = {n}: relative gap {g:e}", b.field_id()));
            }
            worst_radial = worst_radial.max(g);
        }
    }
    let mut detail = String::new();
    for n in 5..=7 {
        let b = batch(&field(Family::SolidGaussian { axis: 0, sigma: 1.0 }, n), &s)?;
        let r = check_corollary(&b).map_err(|e| e.to_string())?;
        let (lap, gap, ang) = (term(&r, "laplacian"), term(&r, "gap"), term(&r, "angular_sum"));
        if !r.pass || gap < 1e-2 * lap || rel(gap, ang) > 1e-7 {
            return Err(format!("solid-gaussian n = {n}: gap {gap}, angular sum {ang}, ‖Δf‖² {lap}"));
        }
        if n == 5 {
            detail = format!("solid-gaussian n=5 gap/‖Δf‖² = {:.4}, |gap − angular|/gap = {:.1e}", gap / lap, rel(gap, ang));
        }
    }
    Ok(format!("radial worst |gap|/‖Δf‖² = {worst_radial:.1e}; {detail}"))
}

fn criterion6() -> Outcome {
    let start = Instant::now();
    let reports = lemma_suite(1000, 7);
    let t = start.elapsed().as_secs_f64();
    let worst = reports.iter().map(|r| r.rel_residual).fold(0.0, f64::max);
    if reports.len() == 1000 && reports.iter().all(|r| r.pass) && worst <= LEMMA_TOLERANCE && t < 1.0 {
        Ok(format!("1000 triples, worst residual {worst:.1e}, {:.1} ms", t * 1e3))
    } else {
        Err(format!("worst residual {worst:e}, {t:.3} s"))
    }
}

fn criterion7() -> Outcome {
    let deltas = [0.5, 0.25, 0.1, 0.05];
    let table = extremiser_scan(&deltas, 5, &QuadratureSettings::default()).map_err(|e| e.to_string())?;
    let finest_resolved = table.rows[2..]
        .iter()
        .all(|r| r.failure.is_none() && r.rho_error <= 1e-8 && r.share_error <= 1e-8);
    let rhos: Vec<String> = table.rows.iter().map(|r| format!("{:.6}", r.rho)).collect();
    let shares: Vec<String> = table.rows.iter().map(|r| format!("{:.4}", r.share)).collect();
    let detail = format!("ρ = [{}], s = [{}]", rhos.join(", "), shares.join(", "));
    if table.all_below_one && table.rho_increasing && table.share_decreasing && finest_resolved {
        Ok(detail)
    } else {
        Err(format!(
            "below one {}, ρ increasing {}, s decreasing {}, resolved {finest_resolved}: {detail}",
            table.all_below_one, table.rho_increasing, table.share_decreasing
        ))
    }
}

fn sphere_oracle(alpha: &[u32]) -> f64 {
    if alpha.iter().any(|a| a % 2 == 1) {
        return 0.0;
    }
    let total: u32 = alpha.iter().sum();
    let num: f64 = alpha.iter().map(|&a| libm::tgamma((a as f64 + 1.0) / 2.0)).product();
    2.0 * num / libm::tgamma((total as f64 + alpha.len() as f64) / 2.0)
}

fn monomials(n: usize, left: u32, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
    if prefix.len() == n {
        out.push(prefix.clone());
        return;
    }
    for e in 0..=left {
        prefix.push(e);
        monomials(n, left - e, prefix, out);
        prefix.pop();
    }
}

fn criterion8() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for n in [5, 6, 7] {
        for d in [6u32, 10] {
            let rule = sphere_product_rule(n, d).map_err(|e| e.to_string())?;
            let mut alphas = Vec::new();
            monomials(n, d, &mut vec![], &mut alphas);
            let mut sums = vec![0.0; alphas.len()];
            let mut pw = vec![vec![1.0; d as usize + 1]; n];
            for k in 0..rule.len() {
                for (i, x) in rule.direction(k).iter().enumerate() {
                    for p in 1..=d as usize {
                        pw[i][p] = pw[i][p - 1] * x;
                    }
                }
                let w = rule.weight(k);
                for (s, a) in sums.iter_mut().zip(&alphas) {
                    let mut v = w;
                    for (i, &e) in a.iter().enumerate() {
                        v *= pw[i][e as usize];
                    }
                    *s += v;
                }
            }
            let area = 2.0 * PI.powf(n as f64 / 2.0) / libm::tgamma(n as f64 / 2.0);
            for (a, q) in alphas.iter().zip(sums) {
                let exact = sphere_oracle(a);
                let scale = if exact == 0.0 { area } else { exact };
                worst = worst.max((q - exact).abs() / scale);
                count += 1;
            }
        }
    }
    if worst <= 1e-11 {
        Ok(format!("{count} monomials, worst relative error {worst:.1e}"))
    } else {
        Err(format!("worst relative error {worst:e}"))
    }
}

fn criterion9() -> Outcome {
    let mut config = RunConfig {
        dims: vec![5, 8],
        fields: vec![
            "gaussian:sigma=1".into(),
            "solid-gaussian:axis=1".into(),
            "poly-gaussian:alpha=1/1".into(),
            "annulus-bump:r0=0.5,r1=2".into(),
            "shifted-bump:center=2,rho=1".into(),
            "(gaussian:sigma=1)+i(solid-gaussian:axis=2)".into(),
        ],
        seed: Some(99),
        ..RunConfig::default()
    };
    config.quadrature.mc_samples = 100_000;
    let once = |threads: usize, stamp: &str| -> Result<String, String> {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| e.to_string())?;
        let mut out = Vec::new();
        pool.install(|| run(&config, &mut out, stamp)).map_err(|e| e.to_string())?;
        String::from_utf8(out).map_err(|e| e.to_string())
    };
    let a = once(1, "first")?;
    let b = once(4, "second")?;
    if a == b {
        return Err("timestamps did not reach the output".into());
    }
    let lines = a.lines().count();
    if canonical(&a) == canonical(&b) && lines > 1000 {
        Ok(format!("{lines} json-lines records byte-identical on 1 and 4 threads (timestamp excluded)"))
    } else {
        Err(format!("outputs differ ({lines} lines)"))
    }
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("pointwise suite, n = 5..9, full catalog", criterion1),
        ("Gaussian ledger at n = 5", criterion2),
        ("Rellich ratio of the unit Gaussian", criterion3),
        ("integrated identities over the sweep", criterion4),
        ("Bessel gap vanishes iff radial", criterion5),
        ("Hermitian lemma on 1000 triples", criterion6),
        ("near-extremiser scan", criterion7),
        ("sphere rule exactness", criterion8),
        ("determinism across thread counts", criterion9),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let outcome = std::panic::catch_unwind(check).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(detail) => println!("PASS criterion {}: {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL criterion {}: {name}: {detail}", i + 1);
            }
        }
    }
    println!("{} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
