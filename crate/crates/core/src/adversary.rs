//! Adversarial workers: which responses get corrupted and what they are replaced with.

use std::fmt;
use std::str::FromStr;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::codec::{CodedTask, VectorSpline};
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::scalar::Real;
use crate::spline::SplineModel;
use crate::tolerance::{CONSTRAINT_TOL, TIE_EPS};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Strategy {
    /// Workers nearest each encoder point report `+M`.
    ClusterMax,
    /// Workers around one encoder point report a smooth polynomial bump.
    ImpossibilityPoly,
    /// Random workers report uniform noise on `[-M, M]^m`.
    RandomUniform,
    None,
}

impl Strategy {
    pub fn name(self) -> &'static str {
        match self {
            Strategy::ClusterMax => "cluster_max",
            Strategy::ImpossibilityPoly => "impossibility_poly",
            Strategy::RandomUniform => "random_uniform",
            Strategy::None => "none",
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cluster_max" => Ok(Strategy::ClusterMax),
            "impossibility_poly" => Ok(Strategy::ImpossibilityPoly),
            "random_uniform" => Ok(Strategy::RandomUniform),
            "none" => Ok(Strategy::None),
            other => Err(Error::Unsupported(format!("unknown strategy `{other}`"))),
        }
    }
}

/// Corruption budget, strategy and strategy parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AttackPlan<T> {
    pub gamma: usize,
    pub strategy: Strategy,
    /// Bump height above the encoder for the polynomial attack.
    pub delta: T,
    /// Encoder point attacked by the polynomial attack; defaults to `⌊K/2⌋` (1-based).
    pub target_index: Option<usize>,
    pub seed: u64,
}

impl<T: Real> AttackPlan<T> {
    pub fn new(gamma: usize, strategy: Strategy, seed: u64) -> Self {
        AttackPlan {
            gamma,
            strategy,
            delta: T::one(),
            target_index: None,
            seed,
        }
    }

    pub fn honest() -> Self {
        Self::new(0, Strategy::None, 0)
    }

    /// 0-based index of the attacked encoder point.
    fn target(&self, k: usize) -> usize {
        self.target_index.unwrap_or((k / 2).max(1) - 1).min(k - 1)
    }
}

/// Sorted 0-based indices of the nearest points to `center`, ties to the lower index.
fn nearest<T: Real>(points: &[T], center: T, count: usize) -> Vec<usize> {
    let tie = T::lit(TIE_EPS);
    let mut idx: Vec<usize> = (0..points.len()).collect();
    idx.sort_by(|&a, &b| {
        let (da, db) = ((points[a] - center).abs(), (points[b] - center).abs());
        if (da - db).abs() <= tie {
            a.cmp(&b)
        } else {
            da.partial_cmp(&db).expect("finite distances")
        }
    });
    idx.truncate(count);
    idx
}

/// Window `[α_min, α_max]` of the polynomial attack, of width `γ/N` around the target.
pub fn attack_window<T: Real>(plan: &AttackPlan<T>, task: &CodedTask<T>) -> (T, T, T) {
    let mid = task.alpha()[plan.target(task.k())];
    let half = T::from_usize_lossy(plan.gamma) / T::from_usize_lossy(task.n()) / T::lit(2.0);
    ((mid - half).max(T::zero()), mid, (mid + half).min(T::one()))
}

/// Indices (0-based, sorted) of the workers the adversary controls.
pub fn select_corrupted<T: Real>(plan: &AttackPlan<T>, task: &CodedTask<T>) -> Result<Vec<usize>> {
    let n = task.n();
    if plan.gamma > n {
        return Err(Error::BudgetExceeded {
            gamma: plan.gamma,
            workers: n,
        });
    }
    let beta = task.beta();
    let mut chosen = match plan.strategy {
        Strategy::None => Vec::new(),
        _ if plan.gamma == 0 => Vec::new(),
        Strategy::ClusterMax => {
            let per = plan.gamma / task.k();
            let mut all: Vec<usize> = task
                .alpha()
                .iter()
                .flat_map(|&a| nearest(beta, a, per))
                .collect();
            all.sort_unstable();
            all.dedup();
            all.truncate(plan.gamma);
            all
        }
        Strategy::ImpossibilityPoly => {
            let (lo, mid, hi) = attack_window(plan, task);
            let inside: Vec<usize> = (0..n).filter(|&i| beta[i] >= lo && beta[i] <= hi).collect();
            let keep = nearest(
                &inside.iter().map(|&i| beta[i]).collect::<Vec<_>>(),
                mid,
                plan.gamma,
            );
            keep.into_iter().map(|j| inside[j]).collect()
        }
        Strategy::RandomUniform => {
            let mut rng = ChaCha8Rng::seed_from_u64(plan.seed);
            sample(&mut rng, n, plan.gamma).into_vec()
        }
    };
    chosen.sort_unstable();
    Ok(chosen)
}

/// Replaces the responses of the workers in `corrupted`.
pub fn corrupt_responses<T: Real>(
    plan: &AttackPlan<T>,
    corrupted: &[usize],
    honest: &[Vec<T>],
    task: &CodedTask<T>,
    encoder: &VectorSpline<T>,
) -> Result<Vec<Vec<T>>> {
    let mut out = honest.to_vec();
    if corrupted.is_empty() {
        return Ok(out);
    }
    let (m, bound) = (task.m(), task.bound());
    match plan.strategy {
        Strategy::None => {}
        Strategy::ClusterMax => {
            for &i in corrupted {
                out[i] = vec![bound; m];
            }
        }
        Strategy::RandomUniform => {
            let mut rng = ChaCha8Rng::seed_from_u64(plan.seed);
            rng.set_stream(1);
            let b = bound.to_f64().unwrap_or(1.0);
            for &i in corrupted {
                out[i] = (0..m).map(|_| T::lit(rng.gen_range(-b..=b))).collect();
            }
        }
        Strategy::ImpossibilityPoly => {
            if encoder.dim() != m {
                return Err(Error::InvalidTask(format!(
                    "polynomial attack needs input dimension {} to equal output dimension {m}",
                    encoder.dim()
                )));
            }
            let (lo, mid, hi) = attack_window(plan, task);
            let k = plan.target(task.k());
            for (j, component) in encoder.components().iter().enumerate() {
                let at_mid = component.evaluate(mid)?;
                let slip = at_mid - task.inputs()[k][j];
                let target = at_mid + plan.delta + T::lit(2.0) * slip.abs();
                let p = build_attack_polynomial(component, lo, hi, mid, target)?;
                for &i in corrupted {
                    out[i][j] = p.eval(task.beta()[i]).max(-bound).min(bound);
                }
            }
        }
    }
    Ok(out)
}

/// Degree-7 polynomial in `s = (x - center) / half_width`, stored as monomial coefficients.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AttackPolynomial<T> {
    coef: [T; 8],
    center: T,
    half_width: T,
}

impl<T: Real> AttackPolynomial<T> {
    /// Coefficients of `s^0 .. s^7`.
    pub fn coefficients(&self) -> &[T; 8] {
        &self.coef
    }

    pub fn center(&self) -> T {
        self.center
    }

    pub fn half_width(&self) -> T {
        self.half_width
    }

    pub fn eval(&self, x: T) -> T {
        self.derivative(x, 0)
    }

    /// Derivative of order 0, 1 or 2 in `x`.
    pub fn derivative(&self, x: T, order: usize) -> T {
        let s = (x - self.center) / self.half_width;
        let mut acc = T::zero();
        for p in (order..8).rev() {
            let falling = (0..order).fold(T::one(), |f, q| f * T::from_usize_lossy(p - q));
            acc = acc * s + falling * self.coef[p];
        }
        acc / self.half_width.powi(order as i32)
    }
}

/// Polynomial matching the encoder's value, slope and curvature at `alpha_min` and
/// `alpha_max` and taking the value `y_a` at `alpha_mid`.
///
/// A quintic Hermite part carries the six end conditions; the remaining freedom is
/// `(1 - s²)³ (a + b s)`, and the minimal-norm `(a, b)` meeting the midpoint value is used.
pub fn build_attack_polynomial<T: Real>(
    encoder: &SplineModel<T>,
    alpha_min: T,
    alpha_max: T,
    alpha_mid: T,
    y_a: T,
) -> Result<AttackPolynomial<T>> {
    if !(alpha_min < alpha_mid && alpha_mid < alpha_max) {
        return Err(Error::InvalidAbscissae(format!(
            "need alpha_min < alpha_mid < alpha_max, got {alpha_min}, {alpha_mid}, {alpha_max}"
        )));
    }
    let half = (alpha_max - alpha_min) / T::lit(2.0);
    let center = (alpha_max + alpha_min) / T::lit(2.0);
    let sm = (alpha_mid - center) / half;
    let bump = (T::one() - sm * sm).powi(3);
    if half < T::lit(1e-6) || bump < T::lit(1e-8) {
        return Err(Error::IllConditioned(format!(
            "window [{alpha_min}, {alpha_max}] with midpoint {alpha_mid}"
        )));
    }
    let mut ends = [T::zero(); 6];
    for (slot, x) in [alpha_min, alpha_max].into_iter().enumerate() {
        for order in 0..3 {
            ends[slot * 3 + order] = encoder.derivative(x, order)? * half.powi(order as i32);
        }
    }
    // Rows: value, slope, curvature of the quintic at s = -1 and s = +1.
    let a = Matrix::from_fn(6, 6, |r, p| {
        let s = if r < 3 { -T::one() } else { T::one() };
        let order = r % 3;
        if p < order {
            return T::zero();
        }
        let falling = (0..order).fold(T::one(), |f, q| f * T::from_usize_lossy(p - q));
        falling * s.powi((p - order) as i32)
    });
    let h = a.solve(&Matrix::column(&ends))?.col(0);
    let mut coef = [T::zero(); 8];
    coef[..6].copy_from_slice(&h);
    let quintic_mid = h.iter().rev().fold(T::zero(), |acc, &c| acc * sm + c);
    let r = (y_a - quintic_mid) / bump;
    let norm = T::one() + sm * sm;
    let (ca, cb) = (r / norm, r * sm / norm);
    // (1 - s²)³ = 1 - 3s² + 3s⁴ - s⁶
    let shape = [
        T::one(),
        T::zero(),
        T::lit(-3.0),
        T::zero(),
        T::lit(3.0),
        T::zero(),
        -T::one(),
    ];
    for (p, &w) in shape.iter().enumerate() {
        coef[p] = coef[p] + ca * w;
        coef[p + 1] = coef[p + 1] + cb * w;
    }
    let poly = AttackPolynomial {
        coef,
        center,
        half_width: half,
    };
    let scale = T::one() + y_a.abs() + ends.iter().fold(T::zero(), |m, v| m.max(v.abs()));
    let tol = T::lit(CONSTRAINT_TOL) * scale;
    let mut worst = (poly.eval(alpha_mid) - y_a).abs();
    for x in [alpha_min, alpha_max] {
        for order in 0..3 {
            worst = worst.max((poly.derivative(x, order) - encoder.derivative(x, order)?).abs());
        }
    }
    if !(worst <= tol) {
        return Err(Error::IllConditioned(format!(
            "constraint residual {worst}"
        )));
    }
    Ok(poly)
}
