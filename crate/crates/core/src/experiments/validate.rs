use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::adversary::Strategy;
use crate::codec::choose_lambda_d;
use crate::error::{Error, Result};
use crate::simulation::{registry_get, run_repeated, RepeatSpec};
use crate::sobolev::{
    check_interpolation_inequality, check_kernel_bound, check_kernel_weight_convergence,
    check_norm_equivalence, norm_equivalence_corpus, FunctionHandle,
};
use crate::spline::dense::{dense_hat_matrix, DenseSpline};
use crate::spline::{RegressionData, SmoothingOperator};
use crate::tolerance::{NORM_EQUIVALENCE_SLACK, SOLVER_RTOL};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Splines,
    Kernels,
    Norms,
    Impossibility,
    All,
}

impl Suite {
    pub fn name(self) -> &'static str {
        match self {
            Suite::Splines => "splines",
            Suite::Kernels => "kernels",
            Suite::Norms => "norms",
            Suite::Impossibility => "impossibility",
            Suite::All => "all",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "splines" => Ok(Suite::Splines),
            "kernels" => Ok(Suite::Kernels),
            "norms" => Ok(Suite::Norms),
            "impossibility" => Ok(Suite::Impossibility),
            "all" => Ok(Suite::All),
            other => Err(Error::Unsupported(format!("unknown suite `{other}`"))),
        }
    }
}

/// Outcome of one named check.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub detail: String,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub suite: Suite,
    pub checks: Vec<Check>,
}

impl ValidationReport {
    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.pass)
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            let tag = if c.pass { "PASS" } else { "FAIL" };
            writeln!(f, "{tag} {}: {}", c.name, c.detail)?;
        }
        Ok(())
    }
}

fn check(name: &str, pass: bool, detail: String) -> Check {
    Check {
        name: name.to_string(),
        detail,
        pass,
    }
}

pub fn validate(suite: Suite) -> Result<ValidationReport> {
    let checks = match suite {
        Suite::Splines => spline_checks()?,
        Suite::Kernels => kernel_checks()?,
        Suite::Norms => norm_checks()?,
        Suite::Impossibility => impossibility_checks()?,
        Suite::All => {
            let mut all = spline_checks()?;
            all.extend(kernel_checks()?);
            all.extend(norm_checks()?);
            all.extend(impossibility_checks()?);
            all
        }
    };
    Ok(ValidationReport { suite, checks })
}

fn normwise(a: &[f64], b: &[f64]) -> f64 {
    let diff = a
        .iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max);
    let scale = b.iter().map(|y| y.abs()).fold(0.0, f64::max);
    if scale > 0.0 {
        diff / scale
    } else {
        diff
    }
}

/// Largest normwise relative discrepancy between the banded solver and the dense
/// kernel construction, over fitted values, `c`, `d` and the hat matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleReport {
    pub instances: usize,
    pub max_n: usize,
    pub worst: f64,
}

/// Compares the banded and dense routes on random instances with `3 <= n <= max_n`
/// and `lambda` log-uniform on `[1e-6, 1]`.
pub fn spline_oracle_check(instances: usize, max_n: usize, seed: u64) -> Result<OracleReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for _ in 0..instances {
        let n = rng.gen_range(3..=max_n.max(3));
        let mut t: Vec<f64> = (0..n).map(|_| rng.gen::<f64>()).collect();
        t.sort_by(f64::total_cmp);
        t.dedup();
        if t.len() < 3 {
            continue;
        }
        let y: Vec<f64> = t.iter().map(|_| rng.gen_range(-1.0..1.0)).collect();
        let lambda = 10f64.powf(rng.gen_range(-6.0..=0.0));

        let op = SmoothingOperator::new(&t, lambda)?;
        let fast = op.fit(&y)?;
        let slow = DenseSpline::fit(&t, &y, lambda)?;
        worst = worst.max(normwise(fast.fitted(), &slow.fitted()));
        worst = worst.max(normwise(fast.coef_kernel(), slow.coef_kernel()));
        worst = worst.max(normwise(&fast.coef_poly(), &slow.coef_poly()));

        let a = op.hat_matrix()?;
        let d = dense_hat_matrix(&t, lambda)?;
        let m = t.len();
        let diff = (0..m)
            .flat_map(|i| (0..m).map(move |j| (i, j)))
            .map(|(i, j)| (a.get(i, j) - d[(i, j)]).abs())
            .fold(0.0, f64::max);
        let scale = (0..m)
            .flat_map(|i| (0..m).map(move |j| (i, j)))
            .map(|(i, j)| d[(i, j)].abs())
            .fold(0.0, f64::max);
        worst = worst.max(diff / scale);
    }
    Ok(OracleReport {
        instances,
        max_n,
        worst,
    })
}

/// Sup error when smoothing exact samples of lines, over `lambdas`.
pub fn null_space_check(lambdas: &[f64]) -> Result<f64> {
    let t: Vec<f64> = (0..25)
        .map(|i| 0.02 + 0.04 * i as f64 + 0.003 * (i as f64).sin())
        .collect();
    let mut worst = 0.0f64;
    for &(a, b) in &[(0.0, 1.0), (2.5, -3.0), (-1.0, 0.25)] {
        let line = |x: f64| a + b * x;
        let data = RegressionData::new(t.clone(), t.iter().map(|&x| line(x)).collect())?;
        for &lambda in lambdas {
            let model = crate::spline::fit(&data, lambda)?;
            for k in 0..=200 {
                let x = k as f64 / 200.0;
                worst = worst.max((model.evaluate(x)? - line(x)).abs());
            }
        }
    }
    Ok(worst)
}

fn spline_checks() -> Result<Vec<Check>> {
    let oracle = spline_oracle_check(200, 50, 0x5eed)?;
    let lines = null_space_check(&[1e-6, 1.0, 1e6])?;
    Ok(vec![
        check(
            "splines/dense-oracle",
            oracle.worst <= SOLVER_RTOL,
            format!(
                "{} instances, n <= {}, worst relative error {:.3e} (limit {SOLVER_RTOL:.0e})",
                oracle.instances, oracle.max_n, oracle.worst
            ),
        ),
        check(
            "splines/null-space",
            lines <= 1e-9,
            format!("line reproduction sup error {lines:.3e} (limit 1e-9)"),
        ),
    ])
}

pub const KERNEL_LAMBDAS: [f64; 5] = [1.0, 1e-1, 1e-2, 1e-3, 1e-4];

fn kernel_checks() -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for lambda in KERNEL_LAMBDAS {
        let r = check_kernel_bound(lambda)?;
        out.push(check(
            &format!("kernels/bound lambda={lambda:e}"),
            r.pass,
            format!("sup |K| = {:.6} < {:.6}", r.sup, r.bound),
        ));
    }
    let conv = check_kernel_weight_convergence(|n| (n as f64).powf(-1.6), &[64, 128, 256])?;
    let gaps: Vec<String> = conv
        .entries
        .iter()
        .map(|(n, _, g)| format!("N={n}: {g:.4e}"))
        .collect();
    out.push(check(
        "kernels/weight-convergence",
        conv.pass,
        gaps.join(", "),
    ));
    Ok(out)
}

fn norm_checks() -> Result<Vec<Check>> {
    let lo = 0.2 - NORM_EQUIVALENCE_SLACK;
    let hi = 7.0 + NORM_EQUIVALENCE_SLACK;
    let mut out = Vec::new();
    let mut min_ratio = f64::INFINITY;
    let mut max_ratio = 0.0f64;
    let mut bad = Vec::new();
    let corpus = norm_equivalence_corpus::<f64>();
    for (name, f) in &corpus {
        let r = check_norm_equivalence(f)?;
        min_ratio = min_ratio.min(r.ratio);
        max_ratio = max_ratio.max(r.ratio);
        if !r.pass {
            bad.push(name.clone());
        }
    }
    out.push(check(
        "norms/equivalence",
        bad.is_empty() && min_ratio >= lo && max_ratio <= hi,
        format!(
            "{} functions, ratios in [{min_ratio:.4}, {max_ratio:.4}] (allowed [{lo}, {hi}]){}",
            corpus.len(),
            if bad.is_empty() {
                String::new()
            } else {
                format!(", outside: {}", bad.join(" "))
            }
        ),
    ));
    for k in 1..=3 {
        let w = 2.0 * PI * k as f64;
        let f = FunctionHandle::new(move |t: f64| (w * t).sin())
            .with_first(move |t| w * (w * t).cos())
            .with_second(move |t| -w * w * (w * t).sin());
        let r = check_interpolation_inequality(&f)?;
        out.push(check(
            &format!("norms/interpolation sin({}πt)", 2 * k),
            r.pass,
            format!("sup |f| = {:.4} <= {:.4}", r.sup, r.bound),
        ));
    }
    Ok(out)
}

/// Mean errors of the polynomial attack with `γ = ⌊N/4⌋` and of the honest
/// pipeline, both on `f = identity` over the same schedule.
#[derive(Debug, Clone, PartialEq)]
pub struct ImpossibilityReport {
    pub n_list: Vec<usize>,
    pub attacked: Vec<f64>,
    pub honest: Vec<f64>,
}

impl ImpossibilityReport {
    /// Last attacked error over the first.
    pub fn attacked_retention(&self) -> f64 {
        self.attacked[self.attacked.len() - 1] / self.attacked[0]
    }

    /// First honest error over the last.
    pub fn honest_decay(&self) -> f64 {
        self.honest[0] / self.honest[self.honest.len() - 1]
    }

    pub fn pass(&self) -> bool {
        self.attacked_retention() >= 0.5 && self.honest_decay() >= 10.0
    }
}

pub const IMPOSSIBILITY_SCHEDULE: [usize; 4] = [512, 1024, 2048, 4096];

/// Decoder rule constant `J` for the impossibility runs (exponent 0).
pub const IMPOSSIBILITY_J: f64 = 0.1;

pub fn impossibility_check(
    n_list: &[usize],
    repetitions: usize,
    seed: u64,
) -> Result<ImpossibilityReport> {
    let function = registry_get("identity")?;
    let mut attacked = Vec::new();
    let mut honest = Vec::new();
    for &n in n_list {
        let lambda_d = choose_lambda_d(n, 0.0, IMPOSSIBILITY_J, 1.0)?;
        for (strategy, gamma, out) in [
            (Strategy::ImpossibilityPoly, n / 4, &mut attacked),
            (Strategy::None, 0, &mut honest),
        ] {
            let spec = RepeatSpec {
                function: function.clone(),
                k: 10,
                n,
                gamma,
                strategy,
                delta: 1.0,
                lambda_d,
                lambda_e: 0.0,
                sort_inputs: true,
            };
            out.push(run_repeated(&spec, repetitions, seed ^ n as u64)?.mean);
        }
    }
    Ok(ImpossibilityReport {
        n_list: n_list.to_vec(),
        attacked,
        honest,
    })
}

fn impossibility_checks() -> Result<Vec<Check>> {
    let r = impossibility_check(&IMPOSSIBILITY_SCHEDULE, 10, 0x1bad)?;
    let fmt = |v: &[f64]| {
        v.iter()
            .map(|e| format!("{e:.3e}"))
            .collect::<Vec<_>>()
            .join(" ")
    };
    Ok(vec![
        check(
            "impossibility/attack-persists",
            r.attacked_retention() >= 0.5,
            format!(
                "errors {} ; last/first = {:.3} (need >= 0.5)",
                fmt(&r.attacked),
                r.attacked_retention()
            ),
        ),
        check(
            "impossibility/honest-decays",
            r.honest_decay() >= 10.0,
            format!(
                "errors {} ; first/last = {:.1} (need >= 10)",
                fmt(&r.honest),
                r.honest_decay()
            ),
        ),
    ])
}

/// Honest sup decoder error at `lambda` and at `lambda / 16` for one draw of inputs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LambdaScaling {
    pub lambda: f64,
    pub sup_coarse: f64,
    pub sup_fine: f64,
}

impl LambdaScaling {
    /// `sup_coarse / sup_fine`; `16^{3/4} = 8` when the error scales as `lambda^{3/4}`.
    pub fn ratio(&self) -> f64 {
        self.sup_coarse / self.sup_fine
    }
}

/// Runs the honest pipeline twice on the same sorted inputs, with `lambda` and `lambda / 16`.
pub fn lambda_scaling_check(
    function_id: &str,
    n: usize,
    k: usize,
    lambda: f64,
    seed: u64,
) -> Result<LambdaScaling> {
    let f = registry_get(function_id)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut inputs = f.sample_inputs(k, &mut rng);
    inputs.sort_by(|a, b| a[0].total_cmp(&b[0]));
    let task = crate::codec::CodedTask::new(inputs, n, f.m(), f.bound())?;
    let honest = crate::adversary::AttackPlan::honest();
    let sup = |l: f64| -> Result<f64> {
        Ok(crate::simulation::run_pipeline(&task, &f, &honest, l, 0.0)?.sup_error)
    };
    Ok(LambdaScaling {
        lambda,
        sup_coarse: sup(lambda)?,
        sup_fine: sup(lambda / 16.0)?,
    })
}
