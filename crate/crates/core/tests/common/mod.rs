//! Independent reference computations shared by the integration tests.
#![allow(dead_code)]

use lcmodel::gp::GpFit;
use lcmodel::lightcurve::{Lightcurve, Observation};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

// ---------------------------------------------------------------------------
// Double-double arithmetic (about 32 significant digits).

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dd {
    pub hi: f64,
    pub lo: f64,
}

fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

fn quick_two_sum(a: f64, b: f64) -> Dd {
    let s = a + b;
    Dd { hi: s, lo: b - (s - a) }
}

impl Dd {
    pub const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };

    pub fn from(x: f64) -> Self {
        Dd { hi: x, lo: 0.0 }
    }

    pub fn add(self, o: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, o.hi);
        let (t, f) = two_sum(self.lo, o.lo);
        let r = quick_two_sum(s, e + t);
        quick_two_sum(r.hi, r.lo + f)
    }

    pub fn neg(self) -> Dd {
        Dd { hi: -self.hi, lo: -self.lo }
    }

    pub fn sub(self, o: Dd) -> Dd {
        self.add(o.neg())
    }

    pub fn mul(self, o: Dd) -> Dd {
        let p = self.hi * o.hi;
        let e = self.hi.mul_add(o.hi, -p);
        quick_two_sum(p, e + (self.hi * o.lo + self.lo * o.hi))
    }

    pub fn div(self, o: Dd) -> Dd {
        let q1 = self.hi / o.hi;
        let r = self.sub(o.mul(Dd::from(q1)));
        let q2 = r.hi / o.hi;
        let r = r.sub(o.mul(Dd::from(q2)));
        let q3 = r.hi / o.hi;
        quick_two_sum(q1, q2).add(Dd::from(q3))
    }

    pub fn abs(self) -> Dd {
        if self.hi < 0.0 {
            self.neg()
        } else {
            self
        }
    }

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }
}

/// Inverse by Gauss-Jordan elimination with partial pivoting, in
/// double-double precision.
pub fn dd_inverse(a: &[Vec<f64>]) -> Vec<Vec<Dd>> {
    let n = a.len();
    let mut m: Vec<Vec<Dd>> = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r: Vec<Dd> = row.iter().map(|&v| Dd::from(v)).collect();
            r.extend((0..n).map(|j| Dd::from(if i == j { 1.0 } else { 0.0 })));
            r
        })
        .collect();
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| m[i][col].abs().hi.total_cmp(&m[j][col].abs().hi))
            .unwrap();
        m.swap(col, piv);
        let p = m[col][col];
        for v in m[col].iter_mut() {
            *v = v.div(p);
        }
        let pivot_row = m[col].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i == col {
                continue;
            }
            let f = row[col];
            if f.hi == 0.0 {
                continue;
            }
            for (v, pv) in row.iter_mut().zip(&pivot_row) {
                *v = v.sub(f.mul(*pv));
            }
        }
    }
    m.into_iter().map(|r| r[n..].to_vec()).collect()
}

/// Posterior mean and variance at `targets` by explicit inversion of
/// `K + (σ_n² + 1e-8·σ_f²) I`, accumulated in double-double.
pub fn oracle_posterior(
    t: &[f64],
    y: &[f64],
    sigma_f2: f64,
    sigma_n2: f64,
    ell: f64,
    psi: f64,
    targets: &[f64],
) -> (Vec<f64>, Vec<f64>) {
    let n = t.len();
    let k = |a: f64, b: f64| sigma_f2 * (-(a - b) * (a - b) / (2.0 * ell * ell)).exp();
    let a: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| k(t[i], t[j]) + if i == j { sigma_n2 + 1e-8 * sigma_f2 } else { 0.0 })
                .collect()
        })
        .collect();
    let inv = dd_inverse(&a);
    let r: Vec<Dd> = y.iter().map(|&v| Dd::from(v).sub(Dd::from(psi))).collect();
    let w: Vec<Dd> = inv
        .iter()
        .map(|row| row.iter().zip(&r).fold(Dd::ZERO, |acc, (a, b)| acc.add(a.mul(*b))))
        .collect();
    let mut mean = Vec::with_capacity(targets.len());
    let mut var = Vec::with_capacity(targets.len());
    for &u in targets {
        let ku: Vec<Dd> = t.iter().map(|&ti| Dd::from(k(u, ti))).collect();
        let m = ku.iter().zip(&w).fold(Dd::from(psi), |acc, (a, b)| acc.add(a.mul(*b)));
        let mut q = Dd::ZERO;
        for i in 0..n {
            let row = inv[i].iter().zip(&ku).fold(Dd::ZERO, |acc, (a, b)| acc.add(a.mul(*b)));
            q = q.add(ku[i].mul(row));
        }
        mean.push(m.to_f64());
        var.push(Dd::from(sigma_f2).sub(q).to_f64().max(0.0));
    }
    (mean, var)
}

// ---------------------------------------------------------------------------
// Random curves.

pub const TEN_MIN: f64 = 10.0 / 1440.0;

/// Survey-like curve with `n` detections: visits of 1-4 exposures ten
/// minutes apart spread over `span` days, a sinusoid plus noise, and a few
/// censored rows mixed in.
pub fn random_curve(rng: &mut ChaCha8Rng, id: &str, n: usize, span: f64) -> Lightcurve {
    let mut t = Vec::with_capacity(n);
    t.push(0.0);
    while t.len() < n {
        let start = rng.random::<f64>() * span;
        for e in 0..rng.random_range(1..=4) {
            if t.len() < n - 1 {
                t.push(start + TEN_MIN * e as f64);
            }
        }
        if t.len() == n - 1 {
            t.push(span);
        }
    }
    let base = rng.random_range(15.0..19.0);
    let amp = rng.random_range(0.0..1.0);
    let period = rng.random_range(1.0..400.0);
    let phase = rng.random_range(0.0..6.3);
    let mut obs: Vec<Observation> = t
        .iter()
        .map(|&t| {
            let s = rng.random_range(0.05..0.3);
            let noise = s * (rng.random::<f64>() + rng.random::<f64>() + rng.random::<f64>() - 1.5) * 2.0;
            Observation {
                t,
                y: base + amp * (t / period * std::f64::consts::TAU + phase).sin() + noise,
                s,
                censored: false,
            }
        })
        .collect();
    for _ in 0..rng.random_range(0..3) {
        obs.push(Observation {
            t: rng.random::<f64>() * span,
            y: 20.5,
            s: 0.0,
            censored: true,
        });
    }
    Lightcurve::new(id, Some("non-transient".into()), obs)
}

// ---------------------------------------------------------------------------
// Brute-force measures, written from the definitions without the library's
// helpers.

fn median_of(v: &[f64]) -> f64 {
    let mut s = v.to_vec();
    s.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = s.len();
    if n % 2 == 1 {
        s[n / 2]
    } else {
        (s[n / 2 - 1] + s[n / 2]) / 2.0
    }
}

fn pct(v: &[f64], p: f64) -> f64 {
    let mut s = v.to_vec();
    s.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let pos = p / 100.0 * (s.len() - 1) as f64;
    let i = pos.floor() as usize;
    if i + 1 >= s.len() {
        return s[s.len() - 1];
    }
    s[i] * (1.0 - (pos - i as f64)) + s[i + 1] * (pos - i as f64)
}

fn safe_div(a: f64, b: f64) -> f64 {
    if a == 0.0 && b == 0.0 {
        0.0
    } else {
        a / b
    }
}

fn phi(z: f64) -> f64 {
    (-z * z / 2.0).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

pub fn oracle_measures(lc: &Lightcurve, fit: &GpFit, gap: f64) -> Vec<(&'static str, f64)> {
    let det: Vec<&Observation> = lc.observations().iter().filter(|o| !o.censored).collect();
    let t: Vec<f64> = det.iter().map(|o| o.t).collect();
    let y: Vec<f64> = det.iter().map(|o| o.y).collect();
    let s: Vec<f64> = det.iter().map(|o| o.s).collect();
    let n = y.len();
    let nf = n as f64;

    let mean = y.iter().sum::<f64>() / nf;
    let central = |k: i32| y.iter().map(|v| (v - mean).powi(k)).sum::<f64>() / nf;
    let (m2, m3, m4) = (central(2), central(3), central(4));
    let sd = (y.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (nf - 1.0)).sqrt();
    let med = median_of(&y);
    let ymax = y.iter().cloned().fold(f64::MIN, f64::max);
    let ymin = y.iter().cloned().fold(f64::MAX, f64::min);
    let amplitude = (ymax - ymin) / 2.0;
    let mut maxslope = 0.0f64;
    for i in 1..n {
        let dt = (t[i] - t[i - 1]).max(1e-6);
        maxslope = maxslope.max(((y[i] - y[i - 1]) / dt).abs());
    }
    let mad = median_of(&y.iter().map(|v| (v - med).abs()).collect::<Vec<_>>());
    let count = |f: &dyn Fn(f64) -> bool| y.iter().filter(|&&v| f(v)).count() as f64 / nf;
    let beyond = count(&|v| (v - mean).abs() > sd);
    let medbuf = count(&|v| (v - med).abs() <= 0.1 * amplitude);
    let rcorbor = count(&|v| v - med > 1.5);
    let start = if n > 31 { n - 31 } else { 0 };
    let (mut pos, mut tot) = (0usize, 0usize);
    for i in start + 1..n {
        tot += 1;
        if (y[i] - y[i - 1]) / (t[i] - t[i - 1]).max(1e-6) > 0.0 {
            pos += 1;
        }
    }
    let pairslope = safe_div(pos as f64, tot as f64);
    let range = pct(&y, 97.5) - pct(&y, 2.5);
    let fpr = |k: f64| safe_div(pct(&y, 50.0 + k / 2.0) - pct(&y, 50.0 - k / 2.0), range);

    // Fitted-curve measures.
    let f = &fit.mean_on_grid;
    let u = &fit.grid;
    let m = f.len();
    let mut totvar = 0.0;
    let mut quadvar = 0.0;
    for j in 0..m - 1 {
        totvar += (f[j + 1] - f[j]).abs();
        quadvar += (f[j + 1] - f[j]).powi(2);
    }
    let famp = f.iter().cloned().fold(f64::MIN, f64::max) - f.iter().cloned().fold(f64::MAX, f64::min);
    let mut fslope = 0.0f64;
    for j in 0..m {
        let (a, b) = if j == 0 { (0, 1) } else if j == m - 1 { (m - 2, m - 1) } else { (j - 1, j + 1) };
        fslope = fslope.max(((f[b] - f[a]) / (u[b] - u[a])).abs());
    }
    let mut outl = 0.0f64;
    for i in 0..n {
        outl = outl.max(((y[i] - fit.mean_at_obs[i]) / s[i]).abs());
    }

    // Groups: split where consecutive detections are more than `gap` apart.
    let mut groups: Vec<Vec<usize>> = vec![vec![0]];
    for i in 1..n {
        if t[i] - t[i - 1] > gap {
            groups.push(vec![i]);
        } else {
            groups.last_mut().unwrap().push(i);
        }
    }
    let gm: Vec<f64> = groups
        .iter()
        .map(|g| g.iter().map(|&i| y[i]).sum::<f64>() / g.len() as f64)
        .collect();
    let mut ss = 0.0;
    for (g, mu) in groups.iter().zip(&gm) {
        for &i in g {
            ss += (y[i] - mu).powi(2);
        }
    }
    let big_g = groups.len();
    let pooled = (ss / (if n > big_g { n - big_g } else { 1 }) as f64).sqrt();
    let sig = if pooled < 1e-6 { 1e-6 } else { pooled };
    let fbar = gm.iter().sum::<f64>() / big_g as f64;
    let gtvar = (1..big_g).map(|g| (gm[g] - gm[g - 1]).abs()).sum::<f64>() / nf;
    let gscore = gm.iter().map(|g| phi((g - fbar) / sig)).sum::<f64>() / nf;

    let mut shov = 0.0;
    let mut maxdiff = 0.0f64;
    for i in 1..n {
        shov += (y[i] - y[i - 1]).abs();
        maxdiff = maxdiff.max((y[i] - y[i - 1]).abs());
    }
    let dscore = (0..n).map(|i| phi((y[i] - med) / s[i])).sum::<f64>() / nf;

    vec![
        ("skew", safe_div(m3, m2.powf(1.5))),
        ("kurtosis", safe_div(m4, m2 * m2) - if m2 == 0.0 { 0.0 } else { 3.0 }),
        ("std", sd),
        ("beyond1std", beyond),
        ("amplitude", amplitude),
        ("maxslope", maxslope),
        ("mad", mad),
        ("medbuf", medbuf),
        ("pairslope", pairslope),
        ("rcorbor", rcorbor),
        ("fpr20", fpr(20.0)),
        ("fpr35", fpr(35.0)),
        ("fpr50", fpr(50.0)),
        ("fpr80", fpr(80.0)),
        ("peramp", safe_div(ymax - ymin, med)),
        ("pdfp", safe_div(pct(&y, 95.0) - pct(&y, 5.0), med)),
        ("totvar", totvar / m as f64),
        ("quadvar", quadvar / m as f64),
        ("famp", famp),
        ("fslope", fslope),
        ("outl", outl),
        ("lsd", sig.ln()),
        ("gtvar", gtvar),
        ("gscore", gscore),
        ("shov", shov / nf),
        ("maxdiff", maxdiff),
        ("dscore", dscore),
    ]
}

/// Relative agreement `|a − b| ≤ tol·max(|a|, |b|)`; exact zeros match.
pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    a == b || (a - b).abs() <= tol * a.abs().max(b.abs())
}
