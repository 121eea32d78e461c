use crate::symexpr::Q;

use super::chart::{from_f64, to_f64, Chart, Domain};

pub const MAX_NEWTON_ITERATIONS: usize = 20;

/// A solution of `Z_B(x′) = target`.
#[derive(Clone, Debug, PartialEq)]
pub struct NewtonResult {
    pub x: Vec<f64>,
    /// `max_i |Z_B(x′)_i − target_i|`.
    pub residual: f64,
    pub iterations: usize,
}

fn eval_f(chart: &Chart, x: &[f64]) -> Option<Vec<f64>> {
    let xq: Vec<Q> = x.iter().map(|&v| from_f64(v)).collect::<Option<_>>()?;
    let z = chart.eval(&xq).ok()?;
    Some(z.iter().map(to_f64).collect())
}

fn eval_j(chart: &Chart, x: &[f64]) -> Option<Vec<Vec<f64>>> {
    let xq: Vec<Q> = x.iter().map(|&v| from_f64(v)).collect::<Option<_>>()?;
    let j = chart.eval_jacobian(&xq).ok()?;
    Some(j.iter().map(|r| r.iter().map(to_f64).collect()).collect())
}

fn sup(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, a| m.max(a.abs()))
}

/// Damped Newton for `Z_B(x′) = target` from `seed`; the chart functions and
/// their derivatives are evaluated exactly at the floating-point iterate.
pub fn newton(chart: &Chart, target: &[f64], seed: &[f64], tol: f64) -> Option<NewtonResult> {
    let n = target.len();
    let thr = tol * (1.0 + sup(target));
    let resid = |x: &[f64]| -> Option<(Vec<f64>, f64)> {
        let f: Vec<f64> = eval_f(chart, x)?.iter().zip(target).map(|(a, b)| a - b).collect();
        let r = sup(&f);
        r.is_finite().then_some((f, r))
    };
    let mut x = seed.to_vec();
    let (mut f, mut r) = resid(&x)?;
    let mut it = 0;
    while it < MAX_NEWTON_ITERATIONS {
        it += 1;
        let j = eval_j(chart, &x)?;
        let step: Vec<f64> = if n == 1 {
            vec![-f[0] / j[0][0]]
        } else {
            let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
            vec![-(f[0] * j[1][1] - j[0][1] * f[1]) / det, -(j[0][0] * f[1] - f[0] * j[1][0]) / det]
        };
        if !step.iter().all(|s| s.is_finite()) {
            break;
        }
        let mut lambda = 1.0;
        let mut accepted = None;
        while lambda > 1e-4 {
            let cand: Vec<f64> = x.iter().zip(&step).map(|(a, s)| a + lambda * s).collect();
            if let Some((fc, rc)) = resid(&cand) {
                if rc < r || rc <= thr {
                    accepted = Some((cand, fc, rc));
                    break;
                }
            }
            lambda /= 2.0;
        }
        let Some((cand, fc, rc)) = accepted else { break };
        let moved = sup(&cand.iter().zip(&x).map(|(a, b)| a - b).collect::<Vec<_>>());
        x = cand;
        f = fc;
        r = rc;
        // polish until the step is at rounding level
        if r <= thr && moved <= 1e-14 * (1.0 + sup(&x)) {
            break;
        }
    }
    (r <= thr).then_some(NewtonResult { x, residual: r, iterations: it })
}

/// Matches `target` in chart `B`, trying grid seeds of `B` in order of
/// increasing chart distance (at most `tries` of them). Charts need not be
/// injective, so solutions outside `within` are discarded.
pub fn match_point(
    chart: &Chart,
    seeds: &[(Vec<f64>, Vec<f64>)],
    target: &[f64],
    tol: f64,
    tries: usize,
    within: Option<&Domain>,
) -> Option<NewtonResult> {
    let mut order: Vec<(f64, usize)> = seeds
        .iter()
        .enumerate()
        .map(|(k, (_, z))| (z.iter().zip(target).fold(0.0f64, |m, (a, b)| m.max((a - b).abs())), k))
        .collect();
    order.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let inside = |x: &[f64]| match within {
        None => true,
        Some(d) => d.bounds.iter().zip(x).all(|((lo, hi), v)| {
            let slack = 1e-9 * (1.0 + v.abs());
            to_f64(lo) - slack <= *v && *v <= to_f64(hi) + slack
        }),
    };
    order
        .into_iter()
        .take(tries)
        .filter_map(|(_, k)| newton(chart, target, &seeds[k].0, tol))
        .find(|r| inside(&r.x))
}
