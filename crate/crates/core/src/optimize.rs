//! Local minimizers: limited-memory BFGS with a strong-Wolfe line search,
//! and a derivative-free Nelder–Mead simplex.

use std::collections::VecDeque;

use crate::Result;

pub const MSG_PGTOL: &str = "CONVERGENCE: NORM_OF_PROJECTED_GRADIENT_<=_PGTOL";
pub const MSG_MAXITER: &str = "STOP: TOTAL NO. OF ITERATIONS REACHED LIMIT";
pub const MSG_LINESEARCH: &str = "ABNORMAL_TERMINATION_IN_LNSRCH";
pub const MSG_SIMPLEX: &str = "Optimization terminated successfully.";

#[derive(Debug, Clone, PartialEq)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub f: f64,
    pub grad: Vec<f64>,
    pub nit: usize,
    pub nfev: usize,
    pub njev: usize,
    pub converged: bool,
    pub message: String,
}

#[derive(Debug, Clone, Copy)]
pub struct LbfgsOptions {
    pub history: usize,
    pub pgtol: f64,
    pub max_iter: usize,
    pub c1: f64,
    pub c2: f64,
}

impl Default for LbfgsOptions {
    fn default() -> Self {
        Self {
            history: 10,
            pgtol: 1e-9,
            max_iter: 200,
            c1: 1e-4,
            c2: 0.9,
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn inf_norm(a: &[f64]) -> f64 {
    a.iter().fold(0.0, |m, x| m.max(x.abs()))
}

struct Point {
    x: Vec<f64>,
    f: f64,
    g: Vec<f64>,
}

struct Counter<F> {
    fg: F,
    nfev: usize,
}

impl<F: FnMut(&[f64]) -> Result<(f64, Vec<f64>)>> Counter<F> {
    fn eval(&mut self, x: Vec<f64>) -> Result<Point> {
        self.nfev += 1;
        let (f, g) = (self.fg)(&x)?;
        Ok(Point { x, f, g })
    }
}

/// Minimizes `fg`, which returns the value and gradient.
pub fn lbfgs(fg: impl FnMut(&[f64]) -> Result<(f64, Vec<f64>)>, x0: &[f64], opts: &LbfgsOptions) -> Result<Minimum> {
    let mut counter = Counter { fg, nfev: 0 };
    let mut cur = counter.eval(x0.to_vec())?;
    let mut mem: VecDeque<(Vec<f64>, Vec<f64>, f64)> = VecDeque::new();
    let mut nit = 0;
    let finish = |p: Point, nit: usize, nfev: usize, converged: bool, message: &str| Minimum {
        x: p.x,
        f: p.f,
        grad: p.g,
        nit,
        nfev,
        njev: nfev,
        converged,
        message: message.to_string(),
    };

    loop {
        if inf_norm(&cur.g) <= opts.pgtol {
            return Ok(finish(cur, nit, counter.nfev, true, MSG_PGTOL));
        }
        if nit >= opts.max_iter {
            return Ok(finish(cur, nit, counter.nfev, false, MSG_MAXITER));
        }

        // two-loop recursion
        let mut q: Vec<f64> = cur.g.iter().map(|v| -v).collect();
        let mut alphas = Vec::with_capacity(mem.len());
        for (s, y, rho) in mem.iter().rev() {
            let a = rho * dot(s, &q);
            for (qi, yi) in q.iter_mut().zip(y) {
                *qi -= a * yi;
            }
            alphas.push(a);
        }
        if let Some((s, y, _)) = mem.back() {
            let gamma = dot(s, y) / dot(y, y);
            q.iter_mut().for_each(|v| *v *= gamma);
        }
        for ((s, y, rho), a) in mem.iter().zip(alphas.iter().rev()) {
            let b = rho * dot(y, &q);
            for (qi, si) in q.iter_mut().zip(s) {
                *qi += (a - b) * si;
            }
        }
        let mut d = q;
        let mut d0 = dot(&d, &cur.g);
        if d0 >= 0.0 {
            // lost descent; restart from steepest descent
            mem.clear();
            d = cur.g.iter().map(|v| -v).collect();
            d0 = dot(&d, &cur.g);
        }
        let step0 = if mem.is_empty() {
            (1.0 / inf_norm(&cur.g)).min(1.0)
        } else {
            1.0
        };

        match strong_wolfe(&mut counter, &cur, &d, d0, step0, opts)? {
            Some(next) => {
                let s: Vec<f64> = next.x.iter().zip(&cur.x).map(|(a, b)| a - b).collect();
                let y: Vec<f64> = next.g.iter().zip(&cur.g).map(|(a, b)| a - b).collect();
                let sy = dot(&s, &y);
                if sy > 1e-12 * dot(&y, &y).max(f64::MIN_POSITIVE) {
                    if mem.len() == opts.history {
                        mem.pop_front();
                    }
                    mem.push_back((s, y, 1.0 / sy));
                }
                cur = next;
                nit += 1;
            }
            None => return Ok(finish(cur, nit, counter.nfev, false, MSG_LINESEARCH)),
        }
    }
}

fn strong_wolfe<F: FnMut(&[f64]) -> Result<(f64, Vec<f64>)>>(
    counter: &mut Counter<F>,
    start: &Point,
    d: &[f64],
    d0: f64,
    step0: f64,
    opts: &LbfgsOptions,
) -> Result<Option<Point>> {
    let f0 = start.f;
    let at = |a: f64| -> Vec<f64> { start.x.iter().zip(d).map(|(x, di)| x + a * di).collect() };
    let armijo = |a: f64, f: f64| f <= f0 + opts.c1 * a * d0;

    let (mut a_prev, mut f_prev, mut d_prev) = (0.0, f0, d0);
    let mut a = step0;
    for i in 0..25 {
        let p = counter.eval(at(a))?;
        if !p.f.is_finite() {
            a = 0.5 * (a_prev + a);
            continue;
        }
        let dp = dot(&p.g, d);
        if !armijo(a, p.f) || (i > 0 && p.f >= f_prev) {
            return zoom(counter, start, d, d0, opts, (a_prev, f_prev, d_prev), (a, p.f, dp), at);
        }
        if dp.abs() <= -opts.c2 * d0 {
            return Ok(Some(p));
        }
        if dp >= 0.0 {
            return zoom(counter, start, d, d0, opts, (a, p.f, dp), (a_prev, f_prev, d_prev), at);
        }
        a_prev = a;
        f_prev = p.f;
        d_prev = dp;
        a *= 2.0;
    }
    Ok(None)
}

#[allow(clippy::too_many_arguments)]
fn zoom<F: FnMut(&[f64]) -> Result<(f64, Vec<f64>)>>(
    counter: &mut Counter<F>,
    start: &Point,
    d: &[f64],
    d0: f64,
    opts: &LbfgsOptions,
    mut lo: (f64, f64, f64),
    mut hi: (f64, f64, f64),
    at: impl Fn(f64) -> Vec<f64>,
) -> Result<Option<Point>> {
    let f0 = start.f;
    let mut best: Option<Point> = None;
    for _ in 0..30 {
        let (a_lo, a_hi) = (lo.0, hi.0);
        let width = (a_hi - a_lo).abs();
        if width < 1e-16 * a_lo.abs().max(1.0) {
            break;
        }
        let a = cubic_min(lo, hi)
            .filter(|&a| {
                let (l, h) = (a_lo.min(a_hi), a_lo.max(a_hi));
                a > l + 0.1 * width && a < h - 0.1 * width
            })
            .unwrap_or(0.5 * (a_lo + a_hi));
        let p = counter.eval(at(a))?;
        let dp = dot(&p.g, d);
        if p.f > f0 + opts.c1 * a * d0 || p.f >= lo.1 {
            hi = (a, p.f, dp);
        } else {
            if dp.abs() <= -opts.c2 * d0 {
                return Ok(Some(p));
            }
            if dp * (hi.0 - lo.0) >= 0.0 {
                hi = lo;
            }
            lo = (a, p.f, dp);
            best = Some(p);
        }
    }
    // accept a point with sufficient decrease even if the curvature test failed
    Ok(best.filter(|p| p.f < f0))
}

/// Minimizer of the cubic interpolating values and slopes at two points.
fn cubic_min(a: (f64, f64, f64), b: (f64, f64, f64)) -> Option<f64> {
    let (x1, f1, g1) = a;
    let (x2, f2, g2) = b;
    let d1 = g1 + g2 - 3.0 * (f1 - f2) / (x1 - x2);
    let disc = d1 * d1 - g1 * g2;
    if disc < 0.0 {
        return None;
    }
    let d2 = (x2 - x1).signum() * disc.sqrt();
    let denom = g2 - g1 + 2.0 * d2;
    if denom == 0.0 {
        return None;
    }
    let x = x2 - (x2 - x1) * (g2 + d2 - d1) / denom;
    x.is_finite().then_some(x)
}

#[derive(Debug, Clone, Copy)]
pub struct NelderMeadOptions {
    pub xatol: f64,
    pub fatol: f64,
    pub max_iter: usize,
    pub initial_step: f64,
}

impl Default for NelderMeadOptions {
    fn default() -> Self {
        Self {
            xatol: 1e-7,
            fatol: 1e-9,
            max_iter: 4000,
            initial_step: 0.1,
        }
    }
}

/// Nelder–Mead with dimension-adaptive coefficients.
pub fn nelder_mead(mut f: impl FnMut(&[f64]) -> Result<f64>, x0: &[f64], opts: &NelderMeadOptions) -> Result<Minimum> {
    let n = x0.len();
    let mut nfev = 0;
    let mut eval = |x: &[f64]| -> Result<f64> {
        nfev += 1;
        f(x)
    };
    if n == 0 {
        let v = eval(x0)?;
        return Ok(Minimum {
            x: vec![],
            f: v,
            grad: vec![],
            nit: 0,
            nfev: 1,
            njev: 0,
            converged: true,
            message: MSG_SIMPLEX.into(),
        });
    }
    let nf = n as f64;
    let (rho, chi, psi, sigma) = (1.0, 1.0 + 2.0 / nf, 0.75 - 1.0 / (2.0 * nf), 1.0 - 1.0 / nf);

    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    simplex.push((x0.to_vec(), eval(x0)?));
    for k in 0..n {
        let mut x = x0.to_vec();
        x[k] += opts.initial_step;
        let v = eval(&x)?;
        simplex.push((x, v));
    }

    let mut nit = 0;
    let mut converged = false;
    while nit < opts.max_iter {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let best = &simplex[0];
        let xspread = simplex[1..]
            .iter()
            .flat_map(|(x, _)| x.iter().zip(&best.0).map(|(a, b)| (a - b).abs()))
            .fold(0.0, f64::max);
        let fspread = simplex[1..].iter().map(|(_, v)| (v - best.1).abs()).fold(0.0, f64::max);
        if xspread <= opts.xatol && fspread <= opts.fatol {
            converged = true;
            break;
        }
        nit += 1;

        let centroid: Vec<f64> = (0..n)
            .map(|k| simplex[..n].iter().map(|(x, _)| x[k]).sum::<f64>() / nf)
            .collect();
        let worst = simplex[n].clone();
        let blend = |t: f64| -> Vec<f64> { centroid.iter().zip(&worst.0).map(|(c, w)| c + t * (c - w)).collect() };

        let xr = blend(rho);
        let fr = eval(&xr)?;
        if fr < simplex[0].1 {
            let xe = blend(rho * chi);
            let fe = eval(&xe)?;
            simplex[n] = if fe < fr { (xe, fe) } else { (xr, fr) };
            continue;
        }
        if fr < simplex[n - 1].1 {
            simplex[n] = (xr, fr);
            continue;
        }
        let (xc, fc) = if fr < worst.1 {
            let xc = blend(rho * psi);
            let fc = eval(&xc)?;
            (xc, fc)
        } else {
            let xc = blend(-psi);
            let fc = eval(&xc)?;
            (xc, fc)
        };
        if fc < worst.1.min(fr) {
            simplex[n] = (xc, fc);
            continue;
        }
        let x_best = simplex[0].0.clone();
        for item in simplex.iter_mut().skip(1) {
            let x: Vec<f64> = x_best.iter().zip(&item.0).map(|(b, xi)| b + sigma * (xi - b)).collect();
            let v = eval(&x)?;
            *item = (x, v);
        }
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    let (x, v) = simplex.swap_remove(0);
    Ok(Minimum {
        x,
        f: v,
        grad: vec![],
        nit,
        nfev,
        njev: 0,
        converged,
        message: if converged {
            MSG_SIMPLEX.into()
        } else {
            "Maximum number of iterations has been exceeded.".into()
        },
    })
}
