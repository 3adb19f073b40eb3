//! Nelder-Mead minimization on a fixed-dimension parameter vector.

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Minimum<const N: usize> {
    pub x: [f64; N],
    pub fx: f64,
    pub iterations: usize,
}

/// Minimizes `f` from `x0` with an axis-aligned initial simplex of edge
/// `step`. Stops after `max_iter` iterations or once the spread of function
/// values drops below `ftol`. The returned value never exceeds `f(x0)`.
pub fn nelder_mead<const N: usize, F>(f: F, x0: [f64; N], step: f64, max_iter: usize, ftol: f64) -> Minimum<N>
where
    F: Fn(&[f64; N]) -> f64,
{
    let mut pts: Vec<([f64; N], f64)> = Vec::with_capacity(N + 1);
    pts.push((x0, f(&x0)));
    for k in 0..N {
        let mut x = x0;
        x[k] += step;
        pts.push((x, f(&x)));
    }
    let mut iterations = 0;
    while iterations < max_iter {
        // Stable sort keeps earlier vertices first among ties.
        pts.sort_by(|a, b| a.1.total_cmp(&b.1));
        if (pts[N].1 - pts[0].1).abs() <= ftol {
            break;
        }
        iterations += 1;
        let mut centroid = [0.0; N];
        for (x, _) in &pts[..N] {
            for k in 0..N {
                centroid[k] += x[k] / N as f64;
            }
        }
        let worst = pts[N];
        let along = |t: f64| {
            let mut y = [0.0; N];
            for k in 0..N {
                y[k] = centroid[k] + t * (worst.0[k] - centroid[k]);
            }
            y
        };
        let xr = along(-1.0);
        let fr = f(&xr);
        if fr < pts[0].1 {
            let xe = along(-2.0);
            let fe = f(&xe);
            pts[N] = if fe < fr { (xe, fe) } else { (xr, fr) };
        } else if fr < pts[N - 1].1 {
            pts[N] = (xr, fr);
        } else {
            let (xc, fc) = if fr < worst.1 {
                let x = along(-0.5);
                (x, f(&x))
            } else {
                let x = along(0.5);
                (x, f(&x))
            };
            if fc < worst.1.min(fr) {
                pts[N] = (xc, fc);
            } else {
                let best = pts[0].0;
                for p in pts.iter_mut().skip(1) {
                    for k in 0..N {
                        p.0[k] = best[k] + 0.5 * (p.0[k] - best[k]);
                    }
                    p.1 = f(&p.0);
                }
            }
        }
    }
    pts.sort_by(|a, b| a.1.total_cmp(&b.1));
    Minimum { x: pts[0].0, fx: pts[0].1, iterations }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rosenbrock() {
        let f = |x: &[f64; 2]| (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2);
        let m = nelder_mead(f, [-1.2, 1.0], 0.5, 2000, 1e-20);
        assert!((m.x[0] - 1.0).abs() < 1e-5 && (m.x[1] - 1.0).abs() < 1e-5, "{m:?}");
    }

    #[test]
    fn never_worse_than_start() {
        let f = |x: &[f64; 3]| (x[0] * 3.0).sin() + x[1].cos() * x[2];
        for iters in [0, 1, 5, 50] {
            let m = nelder_mead(f, [0.2, -0.1, 0.4], 0.3, iters, 0.0);
            assert!(m.fx <= f(&[0.2, -0.1, 0.4]));
        }
    }
}
