//! Independent oracles shared by the integration and acceptance suites.
//!
//! Nothing here reuses the library's solver or special-function code paths:
//! the t-distribution CDF is computed by adaptive quadrature of the density
//! kernel (normalized numerically), and the penalized objective is minimized
//! by derivative-free coordinate search.

#![allow(dead_code)]

use isee_core::{Mat, Vector};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

/// Adaptive Simpson quadrature.
fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn simpson(f: &dyn Fn(f64) -> f64, a: f64, fa: f64, b: f64, fb: f64) -> (f64, f64, f64) {
        let m = 0.5 * (a + b);
        let fm = f(m);
        ((b - a) / 6.0 * (fa + 4.0 * fm + fb), m, fm)
    }
    #[allow(clippy::too_many_arguments)]
    fn recurse(
        f: &dyn Fn(f64) -> f64,
        a: f64,
        fa: f64,
        b: f64,
        fb: f64,
        whole: f64,
        m: f64,
        fm: f64,
        tol: f64,
        depth: usize,
    ) -> f64 {
        let (left, lm, flm) = simpson(f, a, fa, m, fm);
        let (right, rm, frm) = simpson(f, m, fm, b, fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            left + right + delta / 15.0
        } else {
            recurse(f, a, fa, m, fm, left, lm, flm, 0.5 * tol, depth - 1)
                + recurse(f, m, fm, b, fb, right, rm, frm, 0.5 * tol, depth - 1)
        }
    }
    let fa = f(a);
    let fb = f(b);
    let (whole, m, fm) = simpson(f, a, fa, b, fb);
    recurse(f, a, fa, b, fb, whole, m, fm, tol, 40)
}

/// Unnormalized t density kernel.
fn t_kernel(s: f64, df: f64) -> f64 {
    (1.0 + s * s / df).powf(-0.5 * (df + 1.0))
}

/// Half-line mass of the kernel via the substitution s = tan(u).
fn t_kernel_half_mass(df: f64) -> f64 {
    let g = move |u: f64| {
        let t = u.tan();
        let sec2 = 1.0 + t * t;
        t_kernel(t, df) * sec2
    };
    adaptive_simpson(&g, 0.0, std::f64::consts::FRAC_PI_2 - 1e-12, 1e-13)
}

/// Oracle CDF of the t distribution by quadrature.
pub fn oracle_t_cdf(t: f64, df: f64) -> f64 {
    let half = t_kernel_half_mass(df);
    let signed = if t >= 0.0 {
        adaptive_simpson(&|s| t_kernel(s, df), 0.0, t, 1e-13)
    } else {
        -adaptive_simpson(&|s| t_kernel(s, df), 0.0, -t, 1e-13)
    };
    0.5 + 0.5 * signed / half
}

/// Oracle t quantile by bisection on the quadrature CDF.
pub fn oracle_t_quantile(prob: f64, df: f64) -> f64 {
    assert!(prob > 0.0 && prob < 1.0);
    if prob < 0.5 {
        return -oracle_t_quantile(1.0 - prob, df);
    }
    let mut lo = 0.0f64;
    let mut hi = 1.0f64;
    while oracle_t_cdf(hi, df) < prob {
        lo = hi;
        hi *= 2.0;
        assert!(hi < 1e12, "bracket expansion ran away");
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if oracle_t_cdf(mid, df) < prob {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-9 {
            break;
        }
    }
    0.5 * (lo + hi)
}

/// Oracle value of the automatic penalty rule, built entirely on the
/// quadrature quantile.
pub fn oracle_universal_lambda(n: usize, p: usize) -> f64 {
    let nf = n as f64;
    let pf = p as f64;
    let arg = 1.0 - nf.sqrt() / (2.0 * pf * pf.ln());
    let b = oracle_t_quantile(arg, nf - 1.0);
    b / ((nf - 1.0) + b * b).sqrt()
}

/// Independently written penalized objective: residual sum of squares over
/// `2 n sigma`, plus `sigma / 2`, plus the weighted L1 penalty.
pub fn oracle_objective(y: &Vector, x: &Mat, lambda: f64, beta: &[f64], sigma: f64) -> f64 {
    let n = y.len();
    let mut rss = 0.0;
    for i in 0..n {
        let mut r = y[i];
        for (k, b) in beta.iter().enumerate() {
            r -= x[(i, k)] * b;
        }
        rss += r * r;
    }
    let mut penalty = 0.0;
    for (k, b) in beta.iter().enumerate() {
        let scale = (x.column(k).iter().map(|v| v * v).sum::<f64>() / n as f64).sqrt();
        penalty += scale * b.abs();
    }
    rss / (2.0 * n as f64 * sigma) + 0.5 * sigma + lambda * penalty
}

/// Golden-section minimization of a univariate convex function on [lo, hi],
/// expanding the interval whenever the minimizer lands on a boundary.
fn line_minimize(f: &dyn Fn(f64) -> f64, start: f64, floor: Option<f64>) -> f64 {
    let mut radius = 1.0;
    let clamp = |v: f64| match floor {
        Some(fl) => v.max(fl),
        None => v,
    };
    loop {
        let mut lo = clamp(start - radius);
        let mut hi = start + radius;
        let phi = 0.5 * (3.0 - 5f64.sqrt());
        let mut x1 = lo + phi * (hi - lo);
        let mut x2 = hi - phi * (hi - lo);
        let mut f1 = f(x1);
        let mut f2 = f(x2);
        for _ in 0..120 {
            if f1 <= f2 {
                hi = x2;
                x2 = x1;
                f2 = f1;
                x1 = lo + phi * (hi - lo);
                f1 = f(x1);
            } else {
                lo = x1;
                x1 = x2;
                f1 = f2;
                x2 = hi - phi * (hi - lo);
                f2 = f(x2);
            }
            if hi - lo < 1e-13 * (1.0 + hi.abs()) {
                break;
            }
        }
        let min = 0.5 * (lo + hi);
        let at_low_edge = (min - clamp(start - radius)).abs() < 1e-9
            && floor.map(|fl| min > fl + 1e-9).unwrap_or(true);
        let at_high_edge = (start + radius - min).abs() < 1e-9;
        if at_low_edge || at_high_edge {
            radius *= 4.0;
            if radius > 1e6 {
                return min;
            }
            continue;
        }
        return min;
    }
}

/// Brute-force minimizer of the penalized objective by cyclic coordinate
/// search over (beta, sigma). The objective is jointly convex with a
/// separable nonsmooth part, so coordinate-wise minimization reaches the
/// global minimum.
pub fn oracle_minimize(y: &Vector, x: &Mat, lambda: f64, sigma_floor: f64) -> (Vec<f64>, f64, f64) {
    let m = x.ncols();
    let n = y.len() as f64;
    let mut beta = vec![0.0f64; m];
    let mut sigma = (y.dot(y) / n).sqrt().max(sigma_floor);
    let mut value = oracle_objective(y, x, lambda, &beta, sigma);
    for _pass in 0..300 {
        let mut moved = 0.0f64;
        for k in 0..m {
            let current = beta[k];
            let objective_at = |v: f64| {
                let mut b = beta.clone();
                b[k] = v;
                oracle_objective(y, x, lambda, &b, sigma)
            };
            let best = line_minimize(&objective_at, current, None);
            moved = moved.max((best - current).abs());
            beta[k] = best;
        }
        let objective_at = |v: f64| oracle_objective(y, x, lambda, &beta, v);
        let best_sigma = line_minimize(&objective_at, sigma, Some(sigma_floor));
        moved = moved.max((best_sigma - sigma).abs());
        sigma = best_sigma;

        let new_value = oracle_objective(y, x, lambda, &beta, sigma);
        let improved = value - new_value;
        value = new_value;
        if moved < 1e-11 && improved.abs() < 1e-14 {
            break;
        }
    }
    (beta, sigma, value)
}

pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random dense matrix with standard normal entries.
pub fn gaussian_matrix(n: usize, m: usize, rng: &mut ChaCha8Rng) -> Mat {
    Mat::from_fn(n, m, |_, _| StandardNormal.sample(rng))
}

pub fn gaussian_vector(n: usize, rng: &mut ChaCha8Rng) -> Vector {
    Vector::from_fn(n, |_, _| StandardNormal.sample(rng))
}

/// Random symmetric positive definite matrix with moderate conditioning.
pub fn random_spd(p: usize, rng: &mut ChaCha8Rng) -> Mat {
    let a = gaussian_matrix(p, p, rng);
    let mut m = &a * a.transpose() / p as f64;
    for i in 0..p {
        m[(i, i)] += 0.5;
    }
    // Exact symmetry for downstream constructors.
    for j in 0..p {
        for i in 0..j {
            let v = 0.5 * (m[(i, j)] + m[(j, i)]);
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
    m
}

/// Uniformly random permutation of 0..p.
pub fn random_permutation(p: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let mut perm: Vec<usize> = (0..p).collect();
    for i in (1..p).rev() {
        let j = rng.random_range(0..=i);
        perm.swap(i, j);
    }
    perm
}

/// Entrywise max absolute difference.
pub fn linf(a: &Mat, b: &Mat) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}
