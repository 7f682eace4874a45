use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::spline::SmoothingOperator;
use crate::tolerance::BANDWIDTH_C0;

/// Silverman's interior kernel `κ(u) = ½ exp(-|u|/√2) sin(|u|/√2 + π/4)`.
pub fn kernel_silverman<T: Real>(u: T) -> T {
    let a = u.abs() / T::SQRT_2();
    T::lit(0.5) * (-a).exp() * (a + T::FRAC_PI_4()).sin()
}

fn phi<T: Real>(u: T, v: T) -> T {
    (-u).exp() * (u.cos() - u.sin() + T::lit(2.0) * v.cos())
}

/// Equivalent kernel `K_λ(x, t)` on [0, 1] with both boundary corrections.
pub fn kernel_k<T: Real>(x: T, t: T, lambda: T) -> Result<T> {
    if !(lambda > T::zero() && lambda <= T::one()) {
        return Err(Error::InvalidLambda(lambda.to_f64().unwrap_or(f64::NAN)));
    }
    for v in [x, t] {
        if !(v >= T::zero() && v <= T::one()) {
            return Err(Error::OutOfDomain(v.to_f64().unwrap_or(f64::NAN)));
        }
    }
    let h = T::SQRT_2() * lambda.sqrt().sqrt();
    let d = (x - t) / h;
    let interior = (-d.abs()).exp() * (d.abs().sin() + d.cos());
    let left = phi((x + t) / h, d);
    let (rx, rt) = ((T::one() - x) / h, (T::one() - t) / h);
    let right = phi(rx + rt, rx - rt);
    Ok((interior + left + right) / (T::lit(2.0) * h))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelBoundReport<T> {
    pub lambda: T,
    /// Largest `|K_λ|` over the 201 × 201 grid.
    pub sup: T,
    /// `(9/√2) λ^{-1/4}`.
    pub bound: T,
    pub pass: bool,
}

/// Compares `sup |K_λ|` on a 201 × 201 grid of [0, 1]² with `(9/√2) λ^{-1/4}`.
pub fn check_kernel_bound<T: Real>(lambda: T) -> Result<KernelBoundReport<T>> {
    let grid: Vec<T> = (0..=200).map(|i| T::lit(i as f64 / 200.0)).collect();
    let mut sup = T::zero();
    for &x in &grid {
        for &t in &grid {
            sup = sup.max(kernel_k(x, t, lambda)?.abs());
        }
    }
    let bound = T::lit(9.0) / T::SQRT_2() / lambda.sqrt().sqrt();
    Ok(KernelBoundReport {
        lambda,
        sup,
        bound,
        pass: sup < bound,
    })
}

/// `sup |G_{N,λ}(x, t_i) - K_λ(x, t_i)|` with `t_i = i/N` and `x` on a 201-point grid.
pub fn weight_kernel_gap<T: Real>(n: usize, lambda: T) -> Result<T> {
    if n < 3 {
        return Err(Error::TooFewPoints {
            required: 3,
            actual: n,
        });
    }
    let width = T::from_usize_lossy(n) * lambda.sqrt().sqrt();
    if !(width > T::lit(BANDWIDTH_C0)) {
        return Err(Error::BandwidthTooNarrow(
            width.to_f64().unwrap_or(f64::NAN),
        ));
    }
    let nt = T::from_usize_lossy(n);
    let points: Vec<T> = (1..=n).map(|i| T::from_usize_lossy(i) / nt).collect();
    let op = SmoothingOperator::new(&points, lambda)?;
    let grid: Vec<T> = (0..=200).map(|i| T::lit(i as f64 / 200.0)).collect();
    let mut sup = T::zero();
    for (i, &t) in points.iter().enumerate() {
        let g = op.impulse_response(i)?;
        for &x in &grid {
            let diff = nt * g.value_at(x) - kernel_k(x, t, lambda)?;
            sup = sup.max(diff.abs());
        }
    }
    Ok(sup)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceReport<T> {
    /// `(N, λ(N), sup-grid gap)` per entry of the schedule.
    pub entries: Vec<(usize, T, T)>,
    /// Whether the gap strictly decreases along the schedule.
    pub pass: bool,
}

/// Evaluates [`weight_kernel_gap`] along `n_list` with `λ = lambda_rule(N)`.
pub fn check_kernel_weight_convergence<T: Real>(
    lambda_rule: impl Fn(usize) -> T,
    n_list: &[usize],
) -> Result<ConvergenceReport<T>> {
    let entries = n_list
        .iter()
        .map(|&n| {
            let lambda = lambda_rule(n);
            weight_kernel_gap(n, lambda).map(|gap| (n, lambda, gap))
        })
        .collect::<Result<Vec<_>>>()?;
    let pass = entries.windows(2).all(|w| w[1].2 < w[0].2);
    Ok(ConvergenceReport { entries, pass })
}
