//! Nelder–Mead descent on the unit box.

/// Outcome of [`nelder_mead`].
#[derive(Clone, Debug, PartialEq)]
pub struct SimplexResult {
    pub point: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    /// Stopping criterion met before the iteration limit.
    pub converged: bool,
}

fn clamp_unit(u: &mut [f64]) {
    for x in u {
        *x = x.clamp(0.0, 1.0);
    }
}

/// Minimizes `f` over `[0, 1]^d` from `start`. Trial points are clamped to
/// the box. Stops when `f_worst − f_best ≤ rel_tol · (f_best + floor)` or
/// when the simplex has collapsed below `1e-12`.
pub fn nelder_mead<F>(f: F, start: &[f64], initial_step: f64, rel_tol: f64, floor: f64, max_iter: usize) -> SimplexResult
where
    F: Fn(&[f64]) -> f64,
{
    let d = start.len();
    let eval = |u: &[f64]| {
        let v = f(u);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };
    let mut pts: Vec<Vec<f64>> = vec![start.to_vec()];
    for i in 0..d {
        let mut p = start.to_vec();
        p[i] = if p[i] + initial_step <= 1.0 { p[i] + initial_step } else { p[i] - initial_step };
        pts.push(p);
    }
    let mut vals: Vec<f64> = pts.iter().map(|p| eval(p)).collect();
    let mut iterations = 0;
    let mut converged = false;
    while iterations < max_iter {
        let mut order: Vec<usize> = (0..=d).collect();
        order.sort_by(|&a, &b| vals[a].total_cmp(&vals[b]));
        pts = order.iter().map(|&i| pts[i].clone()).collect();
        vals = order.iter().map(|&i| vals[i]).collect();
        let (best, worst) = (vals[0], vals[d]);
        let size = pts[1..].iter().flat_map(|p| p.iter().zip(&pts[0]).map(|(a, b)| (a - b).abs())).fold(0.0, f64::max);
        if (worst - best <= rel_tol * (best.abs() + floor) && worst.is_finite()) || size < 1e-12 {
            converged = true;
            break;
        }
        iterations += 1;

        let centroid: Vec<f64> = (0..d).map(|j| pts[..d].iter().map(|p| p[j]).sum::<f64>() / d as f64).collect();
        let along = |t: f64| {
            let mut p: Vec<f64> = centroid.iter().zip(&pts[d]).map(|(c, w)| c + t * (c - w)).collect();
            clamp_unit(&mut p);
            p
        };
        let xr = along(1.0);
        let fr = eval(&xr);
        if fr < vals[0] {
            let xe = along(2.0);
            let fe = eval(&xe);
            (pts[d], vals[d]) = if fe < fr { (xe, fe) } else { (xr, fr) };
        } else if fr < vals[d - 1] {
            (pts[d], vals[d]) = (xr, fr);
        } else {
            let (xc, fc) = if fr < vals[d] {
                let x = along(0.5);
                let v = eval(&x);
                (x, v)
            } else {
                let x = along(-0.5);
                let v = eval(&x);
                (x, v)
            };
            if fc < vals[d].min(fr) {
                (pts[d], vals[d]) = (xc, fc);
            } else {
                for i in 1..=d {
                    let p: Vec<f64> = pts[i].iter().zip(&pts[0]).map(|(a, b)| b + 0.5 * (a - b)).collect();
                    vals[i] = eval(&p);
                    pts[i] = p;
                }
            }
        }
    }
    let i = (0..=d).min_by(|&a, &b| vals[a].total_cmp(&vals[b])).expect("non-empty simplex");
    SimplexResult { point: pts[i].clone(), value: vals[i], iterations, converged }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_bowl() {
        let r = nelder_mead(|u| (u[0] - 0.3).powi(2) + 4.0 * (u[1] - 0.7).powi(2) + 1.0, &[0.9, 0.1], 0.1, 1e-14, 0.0, 2000);
        assert!(r.converged);
        assert!((r.point[0] - 0.3).abs() < 1e-5 && (r.point[1] - 0.7).abs() < 1e-5, "{:?}", r.point);
    }

    #[test]
    fn minimum_on_boundary() {
        let r = nelder_mead(|u| u[0] + (u[1] - 0.5).powi(2), &[0.5, 0.2], 0.1, 1e-12, 1e-12, 2000);
        assert!(r.point[0] < 1e-8, "{:?}", r.point);
        assert!(r.point.iter().all(|x| (0.0..=1.0).contains(x)));
    }

    #[test]
    fn rosenbrock() {
        let f = |u: &[f64]| {
            let (x, y) = (4.0 * u[0] - 2.0, 4.0 * u[1] - 2.0);
            (1.0 - x).powi(2) + 100.0 * (y - x * x).powi(2)
        };
        let r = nelder_mead(f, &[0.2, 0.6], 0.05, 1e-16, 1e-16, 5000);
        assert!(r.value < 1e-10, "{r:?}");
    }

    #[test]
    fn non_finite_trials_are_avoided() {
        let r = nelder_mead(|u| if u[0] > 0.6 { f64::NAN } else { (u[0] - 0.5).powi(2) }, &[0.1], 0.1, 1e-12, 1e-12, 500);
        assert!((r.point[0] - 0.5).abs() < 1e-4);
        assert!(r.iterations <= 500);
    }
}
