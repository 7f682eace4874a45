//! End-to-end coded computation: encode, compute on simulated workers, corrupt, decode.

use std::sync::OnceLock;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Deserialize;

use crate::adversary::{corrupt_responses, select_corrupted, AttackPlan, Strategy};
use crate::codec::{decode, design_encoder, encode, CodedTask, RangePolicy};
use crate::error::{Error, Result};

const MLP_SMALL: &str = include_str!("../fixtures/mlp_small.json");

/// Identifiers accepted by [`registry_get`].
pub const FUNCTION_IDS: [&str; 4] = ["xsinx", "identity", "cubic", "mlp_small"];

#[derive(Debug, Clone, PartialEq, Deserialize)]
struct Layer {
    w: Vec<Vec<f64>>,
    b: Vec<f64>,
    act: String,
}

/// Fixed-weight feed-forward network with `tanh` or linear layers.
#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct Mlp {
    layers: Vec<Layer>,
    d: usize,
    m: usize,
    #[serde(rename = "M")]
    bound: f64,
}

impl Mlp {
    pub fn from_json(text: &str) -> Result<Self> {
        let mlp: Mlp = serde_json::from_str(text)
            .map_err(|e| Error::InvalidTask(format!("network description: {e}")))?;
        if mlp.d == 0 || mlp.d > 16 || mlp.m == 0 || mlp.m > 4 || !(mlp.bound > 0.0) {
            return Err(Error::InvalidTask(format!(
                "network needs 1 <= d <= 16, 1 <= m <= 4, M > 0 (got d = {}, m = {}, M = {})",
                mlp.d, mlp.m, mlp.bound
            )));
        }
        let mut width = mlp.d;
        for (i, layer) in mlp.layers.iter().enumerate() {
            if layer.w.len() != layer.b.len() || layer.w.iter().any(|row| row.len() != width) {
                return Err(Error::InvalidTask(format!(
                    "layer {i} has inconsistent shapes"
                )));
            }
            if layer.act != "tanh" && layer.act != "linear" {
                return Err(Error::InvalidTask(format!(
                    "layer {i}: unknown activation `{}`",
                    layer.act
                )));
            }
            width = layer.b.len();
        }
        if width != mlp.m {
            return Err(Error::InvalidTask(format!(
                "network output width {width} != m = {}",
                mlp.m
            )));
        }
        Ok(mlp)
    }

    pub fn forward(&self, x: &[f64]) -> Vec<f64> {
        let mut h = x.to_vec();
        for layer in &self.layers {
            h = layer
                .w
                .iter()
                .zip(&layer.b)
                .map(|(row, b)| {
                    let z = row.iter().zip(&h).map(|(w, v)| w * v).sum::<f64>() + b;
                    if layer.act == "tanh" {
                        z.tanh()
                    } else {
                        z
                    }
                })
                .collect();
        }
        h
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Kind {
    XSinX,
    Identity,
    Cubic,
    Mlp(Mlp),
}

/// The function `f: R^d -> [-M, M]^m` the workers compute.
#[derive(Debug, Clone, PartialEq)]
pub struct ComputeFunction {
    id: String,
    d: usize,
    m: usize,
    bound: f64,
    input_box: (f64, f64),
    lipschitz_hint: Option<f64>,
    curvature_hint: Option<f64>,
    kind: Kind,
}

impl ComputeFunction {
    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// Output bound `M`.
    pub fn bound(&self) -> f64 {
        self.bound
    }

    /// Every input coordinate is drawn from this interval.
    pub fn input_box(&self) -> (f64, f64) {
        self.input_box
    }

    /// Bound on `‖f'‖_∞` over the input box, when known.
    pub fn lipschitz_hint(&self) -> Option<f64> {
        self.lipschitz_hint
    }

    /// Bound on `‖f''‖_∞` over the input box, when known.
    pub fn curvature_hint(&self) -> Option<f64> {
        self.curvature_hint
    }

    /// `f(x)`, clamped to `[-M, M]^m`.
    pub fn eval(&self, x: &[f64]) -> Vec<f64> {
        let raw = match &self.kind {
            Kind::XSinX => vec![x[0] * x[0].sin()],
            Kind::Identity => vec![x[0]],
            Kind::Cubic => vec![x[0] * x[0] * x[0] - x[0]],
            Kind::Mlp(net) => net.forward(x),
        };
        raw.into_iter()
            .map(|v| v.clamp(-self.bound, self.bound))
            .collect()
    }

    /// `K` inputs drawn uniformly from the input box.
    pub fn sample_inputs(&self, k: usize, rng: &mut impl Rng) -> Vec<Vec<f64>> {
        let (lo, hi) = self.input_box;
        (0..k)
            .map(|_| (0..self.d).map(|_| rng.gen_range(lo..hi)).collect())
            .collect()
    }
}

/// Looks up one of [`FUNCTION_IDS`].
pub fn registry_get(id: &str) -> Result<ComputeFunction> {
    let tau = std::f64::consts::TAU;
    let scalar = |kind, bound, input_box, nu, eta| ComputeFunction {
        id: id.to_string(),
        d: 1,
        m: 1,
        bound,
        input_box,
        lipschitz_hint: Some(nu),
        curvature_hint: Some(eta),
        kind,
    };
    match id {
        "xsinx" => Ok(scalar(Kind::XSinX, tau, (0.0, tau), 1.0 + tau, 2.0 + tau)),
        "identity" => Ok(scalar(Kind::Identity, 10.0, (-1.0, 1.0), 1.0, 0.0)),
        "cubic" => Ok(scalar(Kind::Cubic, 2.0, (-1.0, 1.0), 2.0, 6.0)),
        "mlp_small" => {
            let net = Mlp::from_json(MLP_SMALL)?;
            Ok(ComputeFunction {
                id: id.to_string(),
                d: net.d,
                m: net.m,
                bound: net.bound,
                input_box: (-1.0, 1.0),
                lipschitz_hint: None,
                curvature_hint: None,
                kind: Kind::Mlp(net),
            })
        }
        other => Err(Error::NotFound(other.to_string())),
    }
}

/// Parameters identifying a pipeline run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunMetadata {
    pub n: usize,
    pub k: usize,
    pub gamma: usize,
    pub lambda_d: f64,
    pub strategy: Strategy,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineResult {
    /// Decoded `f̂(x_k)`.
    pub estimates: Vec<Vec<f64>>,
    /// Ground truth `f(x_k)`.
    pub truth: Vec<Vec<f64>>,
    /// `‖f̂(x_k) - f(x_k)‖²` per data point.
    pub per_point_sq_error: Vec<f64>,
    /// Mean of `per_point_sq_error`. The adversary is one fixed strategy, so this
    /// is a lower bound on the worst case over all adversaries.
    pub avg_error: f64,
    /// `max_k max_j |f̂_j(x_k) - f_j(x_k)|`.
    pub sup_error: f64,
    /// Workers whose responses were replaced.
    pub corrupted: Vec<usize>,
    pub metadata: RunMetadata,
}

/// Encodes, evaluates `f` at every coded input, lets the adversary overwrite its
/// workers and decodes.
pub fn run_pipeline(
    task: &CodedTask<f64>,
    f: &ComputeFunction,
    plan: &AttackPlan<f64>,
    lambda_d: f64,
    lambda_e: f64,
) -> Result<PipelineResult> {
    if f.d() != task.d() || f.m() != task.m() {
        return Err(Error::InvalidTask(format!(
            "function `{}` maps R^{} to R^{}, task has d = {}, m = {}",
            f.id(),
            f.d(),
            f.m(),
            task.d(),
            task.m()
        )));
    }
    let encoder = design_encoder(task, lambda_e)?;
    let coded = encode(&encoder, task.beta())?;
    let honest: Vec<Vec<f64>> = coded.iter().map(|x| f.eval(x)).collect();
    let corrupted = select_corrupted(plan, task)?;
    let responses = corrupt_responses(plan, &corrupted, &honest, task, &encoder)?;
    let estimates = decode(
        task.beta(),
        &responses,
        lambda_d,
        task.alpha(),
        task.bound(),
        RangePolicy::Clamp,
    )?;
    let truth: Vec<Vec<f64>> = task.inputs().iter().map(|x| f.eval(x)).collect();
    let mut sup_error = 0.0f64;
    let per_point_sq_error: Vec<f64> = estimates
        .iter()
        .zip(&truth)
        .map(|(e, t)| {
            e.iter()
                .zip(t)
                .map(|(a, b)| {
                    sup_error = sup_error.max((a - b).abs());
                    (a - b) * (a - b)
                })
                .sum()
        })
        .collect();
    let avg_error = per_point_sq_error.iter().sum::<f64>() / per_point_sq_error.len() as f64;
    Ok(PipelineResult {
        estimates,
        truth,
        per_point_sq_error,
        avg_error,
        sup_error,
        corrupted,
        metadata: RunMetadata {
            n: task.n(),
            k: task.k(),
            gamma: plan.gamma,
            lambda_d,
            strategy: plan.strategy,
            seed: plan.seed,
        },
    })
}

/// Everything except the inputs needed for repeated pipeline runs.
#[derive(Debug, Clone, PartialEq)]
pub struct RepeatSpec {
    pub function: ComputeFunction,
    pub k: usize,
    pub n: usize,
    pub gamma: usize,
    pub strategy: Strategy,
    /// Bump height of the polynomial attack.
    pub delta: f64,
    pub lambda_d: f64,
    pub lambda_e: f64,
    /// Assign the drawn inputs to the encoder points in increasing order of their
    /// first coordinate, which keeps the encoder smooth.
    pub sort_inputs: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RepeatedResult {
    /// One result per repetition, in repetition order.
    pub results: Vec<PipelineResult>,
    pub mean: f64,
    /// Sample standard deviation; `None` for a single repetition.
    pub stddev: Option<f64>,
}

/// Rayon pool capped by `CODEDSPLINE_THREADS` when that is set to a positive integer.
pub fn thread_pool() -> &'static rayon::ThreadPool {
    static POOL: OnceLock<rayon::ThreadPool> = OnceLock::new();
    POOL.get_or_init(|| {
        let threads = std::env::var("CODEDSPLINE_THREADS")
            .ok()
            .and_then(|v| v.trim().parse::<usize>().ok())
            .filter(|&t| t > 0)
            .unwrap_or(0);
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .expect("thread pool")
    })
}

/// Runs `repetitions` independent pipelines. Repetition `r` draws its inputs and
/// attack randomness from stream `r` of a generator seeded with `seed`, so the
/// outcome does not depend on scheduling.
pub fn run_repeated(spec: &RepeatSpec, repetitions: usize, seed: u64) -> Result<RepeatedResult> {
    if repetitions == 0 {
        return Err(Error::InvalidTask(
            "at least one repetition is required".into(),
        ));
    }
    let one = |r: usize| -> Result<PipelineResult> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(r as u64);
        let mut inputs = spec.function.sample_inputs(spec.k, &mut rng);
        if spec.sort_inputs {
            inputs.sort_by(|a, b| a[0].total_cmp(&b[0]));
        }
        let task = CodedTask::new(inputs, spec.n, spec.function.m(), spec.function.bound())?;
        let mut plan = AttackPlan::new(spec.gamma, spec.strategy, rng.next_u64());
        plan.delta = spec.delta;
        run_pipeline(&task, &spec.function, &plan, spec.lambda_d, spec.lambda_e)
    };
    let results: Vec<PipelineResult> = thread_pool().install(|| {
        (0..repetitions)
            .into_par_iter()
            .map(one)
            .collect::<Result<Vec<_>>>()
    })?;
    let errors: Vec<f64> = results.iter().map(|r| r.avg_error).collect();
    let mean = errors.iter().sum::<f64>() / repetitions as f64;
    let stddev = (repetitions > 1).then(|| {
        let ss: f64 = errors.iter().map(|e| (e - mean) * (e - mean)).sum();
        (ss / (repetitions - 1) as f64).sqrt()
    });
    Ok(RepeatedResult {
        results,
        mean,
        stddev,
    })
}
