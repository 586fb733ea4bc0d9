//! Deterministic Nelder-Mead minimizer for the low-dimensional fit problems.
//!
//! Standard reflect/expand/contract/shrink with alpha=1, gamma=2, rho=1/2,
//! sigma=1/2. Ties are broken by the stable sort, so a given start always
//! walks the same path; there is no randomness anywhere.

pub(crate) fn minimize<F: Fn(&[f64]) -> f64>(
    f: F,
    x0: &[f64],
    steps: &[f64],
    max_iter: usize,
    tol: f64,
) -> (Vec<f64>, f64) {
    let n = x0.len();
    assert!(n >= 1 && steps.len() == n);
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    let fx0 = f(x0);
    simplex.push((x0.to_vec(), fx0));
    for i in 0..n {
        let mut x = x0.to_vec();
        x[i] += steps[i];
        let fx = f(&x);
        simplex.push((x, fx));
    }
    for _ in 0..max_iter {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let best = simplex[0].1;
        let worst = simplex[n].1;
        if (worst - best).abs() <= tol * best.abs().max(1.0) {
            break;
        }
        let mut centroid = vec![0.0; n];
        for (x, _) in &simplex[..n] {
            for (c, xi) in centroid.iter_mut().zip(x) {
                *c += xi / n as f64;
            }
        }
        let blend = |a: f64, b: f64| -> Vec<f64> {
            centroid
                .iter()
                .zip(&simplex[n].0)
                .map(|(c, w)| a * c + b * w)
                .collect()
        };
        let xr = blend(2.0, -1.0);
        let fr = f(&xr);
        if fr < best {
            let xe = blend(3.0, -2.0);
            let fe = f(&xe);
            simplex[n] = if fe < fr { (xe, fe) } else { (xr, fr) };
        } else if fr < simplex[n - 1].1 {
            simplex[n] = (xr, fr);
        } else {
            let xc = blend(0.5, 0.5);
            let fc = f(&xc);
            if fc < worst {
                simplex[n] = (xc, fc);
            } else {
                let best_x = simplex[0].0.clone();
                for entry in simplex.iter_mut().skip(1) {
                    for (xi, bi) in entry.0.iter_mut().zip(&best_x) {
                        *xi = 0.5 * (*xi + bi);
                    }
                    entry.1 = f(&entry.0);
                }
            }
        }
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    let (x, fx) = simplex.swap_remove(0);
    (x, fx)
}
