use std::f64::consts::PI;

use rellich_core::quadrature::io::{read_sphere_rule, sphere_rule_hash, write_sphere_rule};
use rellich_core::quadrature::{sphere_product_rule, SphereRule};

/// 2 Π Γ((α_i+1)/2) / Γ((|α|+n)/2) when every α_i is even, else 0.
fn oracle(alpha: &[u32]) -> f64 {
    if alpha.iter().any(|a| a % 2 == 1) {
        return 0.0;
    }
    let total: u32 = alpha.iter().sum();
    let num: f64 = alpha.iter().map(|&a| libm::tgamma((a as f64 + 1.0) / 2.0)).product();
    2.0 * num / libm::tgamma((total as f64 + alpha.len() as f64) / 2.0)
}

/// Every monomial of degree ≤ d, integrated in one sweep over the nodes.
fn all_moments(rule: &SphereRule, d: u32) -> Vec<(Vec<u32>, f64)> {
    let n = rule.dim();
    let mut alphas = Vec::new();
    enumerate(n, d, &mut vec![], &mut alphas);
    let mut sums = vec![0.0; alphas.len()];
    let mut powers = vec![vec![1.0; d as usize + 1]; n];
    for k in 0..rule.len() {
        let w = rule.weight(k);
        for (i, x) in rule.direction(k).iter().enumerate() {
            for p in 1..=d as usize {
                powers[i][p] = powers[i][p - 1] * x;
            }
        }
        for (s, a) in sums.iter_mut().zip(&alphas) {
            let mut v = w;
            for (i, &e) in a.iter().enumerate() {
                v *= powers[i][e as usize];
            }
            *s += v;
        }
    }
    alphas.into_iter().zip(sums).collect()
}

fn enumerate(n: usize, left: u32, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
    if prefix.len() == n {
        out.push(prefix.clone());
        return;
    }
    for e in 0..=left {
        prefix.push(e);
        enumerate(n, left - e, prefix, out);
        prefix.pop();
    }
}

#[test]
fn product_rules_integrate_every_monomial_up_to_degree() {
    for n in [5, 6, 7] {
        for d in [6, 10] {
            let rule = sphere_product_rule(n, d).unwrap();
            let area = 2.0 * PI.powf(n as f64 / 2.0) / libm::tgamma(n as f64 / 2.0);
            let mut worst: f64 = 0.0;
            for (alpha, q) in all_moments(&rule, d) {
                let exact = oracle(&alpha);
                let scale = if exact == 0.0 { area } else { exact.abs() };
                worst = worst.max((q - exact).abs() / scale);
            }
            assert!(worst <= 1e-11, "n = {n}, d = {d}: worst relative error {worst:e}");
        }
    }
}

#[test]
fn degree_is_sharp_for_even_powers() {
    let rule = sphere_product_rule(5, 6).unwrap();
    let q = rule.monomial(&[8]);
    assert!((q - oracle(&[8, 0, 0, 0, 0])).abs() > 1e-6);
}

#[test]
fn emitted_rule_round_trips() {
    let rule = sphere_product_rule(5, 6).unwrap();
    let text = write_sphere_rule(&rule);
    let back = read_sphere_rule(&text).unwrap();
    assert_eq!(sphere_rule_hash(&rule), sphere_rule_hash(&back));
    assert_eq!(rule.weights(), back.weights());
    assert!((back.total_weight() - 26.318945069571622).abs() < 1e-11);
}

#[test]
fn unsupported_rules_are_errors() {
    assert!(sphere_product_rule(12, 6).is_err());
    assert!(sphere_product_rule(5, 7).is_err());
}
