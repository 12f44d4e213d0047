//! Independent reference computations for the acceptance suite. Nothing in
//! here shares a code path with the implementations it checks.

use std::collections::BTreeSet;

use crate::capped_simplex::ProbVector;

/// KL projection onto the simplex capped at `kappa` via the stationarity
/// structure directly: the projection is `q_i = min(kappa, s * v_i)` for the
/// scalar `s` making the result sum to one. `g(s) = sum_i min(kappa, s v_i)`
/// is nondecreasing, so bisection on s suffices.
pub fn kl_projection_bisection(v: &ProbVector, kappa: f64) -> Vec<f64> {
    let g = |s: f64| -> f64 { v.iter().map(|&x| (s * x).min(kappa)).sum() };
    let mut lo = 0.0f64;
    let min_pos = v
        .iter()
        .cloned()
        .filter(|&x| x > 0.0)
        .fold(f64::INFINITY, f64::min);
    let mut hi = (kappa / min_pos).max(1.0) * 2.0;
    for _ in 0..300 {
        let mid = 0.5 * (lo + hi);
        if g(mid) < 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let s = 0.5 * (lo + hi);
    v.iter().map(|&x| (s * x).min(kappa)).collect()
}

/// All extreme points of the heterogeneous-cap polytope by exhaustive scan
/// of integer unit vectors: u in {0..k}^n with sum k, u_i <= cap_i, and at
/// most one coordinate strictly between 0 and its cap.
pub fn alpha_vertices_integer_scan(cap_units: &[u64], k: usize) -> BTreeSet<Vec<u64>> {
    let n = cap_units.len();
    let k = k as u64;
    let mut out = BTreeSet::new();
    let mut u = vec![0u64; n];
    loop {
        let total: u64 = u.iter().sum();
        if total == k {
            let feasible = u.iter().zip(cap_units).all(|(&x, &c)| x <= c);
            let interior = u
                .iter()
                .zip(cap_units)
                .filter(|&(&x, &c)| x > 0 && x < c)
                .count();
            if feasible && interior <= 1 {
                out.insert(u.clone());
            }
        }
        // odometer increment over {0..k}^n
        let mut pos = 0;
        loop {
            if pos == n {
                return out;
            }
            if u[pos] == k {
                u[pos] = 0;
                pos += 1;
            } else {
                u[pos] += 1;
                break;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bisection_oracle_identity_case() {
        let v = ProbVector::uniform(4);
        let q = kl_projection_bisection(&v, 0.5);
        for &x in &q {
            assert!((x - 0.25).abs() < 1e-9);
        }
    }

    #[test]
    fn bisection_oracle_known_projection() {
        let v = ProbVector::new(vec![0.7, 0.2, 0.1]).unwrap();
        let q = kl_projection_bisection(&v, 0.5);
        assert!((q[0] - 0.5).abs() < 1e-9);
        assert!((q[1] - 1.0 / 3.0).abs() < 1e-9);
        assert!((q[2] - 1.0 / 6.0).abs() < 1e-9);
    }

    #[test]
    fn integer_scan_matches_known_vertex_sets() {
        // caps 1/2 each, k = 2 over three coordinates: the three pair vertices
        let verts = alpha_vertices_integer_scan(&[1, 1, 1], 2);
        let expect: BTreeSet<Vec<u64>> =
            [vec![1, 1, 0], vec![1, 0, 1], vec![0, 1, 1]].into_iter().collect();
        assert_eq!(verts, expect);

        let verts = alpha_vertices_integer_scan(&[2, 1], 2);
        let expect: BTreeSet<Vec<u64>> = [vec![2, 0], vec![1, 1]].into_iter().collect();
        assert_eq!(verts, expect);
    }
}
