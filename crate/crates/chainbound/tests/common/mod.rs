//! Shared test oracles, independent of the library's evaluation paths.

#![allow(dead_code)]

use chainbound::rng::Rng;

/// Adaptive Simpson quadrature with Richardson error control.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    fn simpson<F: Fn(f64) -> f64>(f: &F, a: f64, fa: f64, b: f64, fb: f64) -> (f64, f64, f64) {
        let m = 0.5 * (a + b);
        let fm = f(m);
        ((b - a) / 6.0 * (fa + 4.0 * fm + fb), m, fm)
    }
    #[allow(clippy::too_many_arguments)]
    fn recurse<F: Fn(f64) -> f64>(
        f: &F,
        a: f64,
        fa: f64,
        b: f64,
        fb: f64,
        whole: f64,
        m: f64,
        fm: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let (left, lm, flm) = simpson(f, a, fa, m, fm);
        let (right, rm, frm) = simpson(f, m, fm, b, fb);
        let delta = left + right - whole;
        // always split the first few levels: symmetric integrands can zero
        // the Richardson estimate on coarse intervals
        if depth == 0 || (depth <= 42 && delta.abs() <= 15.0 * tol) {
            return left + right + delta / 15.0;
        }
        recurse(f, a, fa, m, fm, left, lm, flm, 0.5 * tol, depth - 1)
            + recurse(f, m, fm, b, fb, right, rm, frm, 0.5 * tol, depth - 1)
    }
    if a == b {
        return 0.0;
    }
    let fa = f(a);
    let fb = f(b);
    let (whole, m, fm) = simpson(f, a, fa, b, fb);
    recurse(f, a, fa, b, fb, whole, m, fm, tol, 48)
}

/// The defining integral of the scalar non-convexity, evaluated by
/// quadrature only: 120 * integral_1^x t^2(t-1)/(1+(t/r)^2) dt.
pub fn upsilon_by_quadrature(x: f64, r: f64) -> f64 {
    let integrand = move |t: f64| 120.0 * t * t * (t - 1.0) / (1.0 + (t / r) * (t / r));
    let scale = 1.0 + x.abs().max(1.0).powi(4);
    adaptive_simpson(&integrand, 1.0, x, 1e-13 * scale)
}

/// Random orthogonal matrix via Gram-Schmidt on a Gaussian sample.
pub fn random_orthogonal(dim: usize, rng: &mut Rng) -> Vec<Vec<f64>> {
    loop {
        let mut cols: Vec<Vec<f64>> = (0..dim)
            .map(|_| (0..dim).map(|_| rng.normal()).collect())
            .collect();
        let mut ok = true;
        for i in 0..dim {
            for j in 0..i {
                let proj: f64 = cols[i].iter().zip(&cols[j]).map(|(a, b)| a * b).sum();
                let (head, tail) = cols.split_at_mut(i);
                for (v, &w) in tail[0].iter_mut().zip(&head[j]) {
                    *v -= proj * w;
                }
            }
            let norm: f64 = cols[i].iter().map(|v| v * v).sum::<f64>().sqrt();
            if norm < 1e-6 {
                ok = false;
                break;
            }
            for v in cols[i].iter_mut() {
                *v /= norm;
            }
        }
        if ok {
            // rows of U are the orthonormal columns we built
            return cols;
        }
    }
}

/// y = M x for a dense row-major matrix.
pub fn matvec(m: &[Vec<f64>], x: &[f64]) -> Vec<f64> {
    m.iter()
        .map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum())
        .collect()
}

/// y = M^T x.
pub fn matvec_t(m: &[Vec<f64>], x: &[f64]) -> Vec<f64> {
    let dim = m[0].len();
    let mut y = vec![0.0; dim];
    for (row, &xi) in m.iter().zip(x) {
        for (yj, &mij) in y.iter_mut().zip(row) {
            *yj += mij * xi;
        }
    }
    y
}
