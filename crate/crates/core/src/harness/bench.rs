//! Runtime measurements across a ladder, fitted in log-log space.

use std::hint::black_box;

use serde::Serialize;

use crate::encoding::Instance;
use crate::error::{Error, Result};
use crate::problems::wordstats;

use super::catalog;
use super::config::SuiteConfig;
use super::fit::{fit_runtime, FitResult, Model};
use super::generate::rng_for;
use super::timing::median_ns;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BenchPoint {
    pub nominal_size: usize,
    pub input_size: usize,
    pub time_ns: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BenchFit {
    pub name: String,
    pub points: Vec<BenchPoint>,
    pub fit: FitResult,
    /// Only checked for preprocessing fits.
    pub residual_threshold: Option<f64>,
    pub pass: bool,
}

fn rung_inputs(name: &str, config: &SuiteConfig) -> Result<(Vec<usize>, Vec<Instance>)> {
    let (ladder, mut generate) = catalog::ladder_generator(name, config)?;
    let inputs = ladder
        .iter()
        .enumerate()
        .map(|(rung, &n)| {
            generate(rung, n)
                .into_iter()
                .next()
                .ok_or(Error::GeneratorExhausted { rung, size: n })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((ladder, inputs))
}

/// Times `op(rung)` for every rung, interleaving rungs within each repeat so
/// that slow drift does not line up with size.
fn interleaved(config: &SuiteConfig, rungs: usize, mut op: impl FnMut(usize)) -> Vec<f64> {
    for rung in 0..rungs {
        for _ in 0..config.warmup {
            op(rung);
        }
    }
    let mut samples = vec![Vec::with_capacity(config.repeats); rungs];
    for _ in 0..config.repeats {
        for (rung, s) in samples.iter_mut().enumerate() {
            s.push(median_ns(0, 1, || op(rung)));
        }
    }
    samples
        .into_iter()
        .map(|mut s| {
            s.sort_by(f64::total_cmp);
            s[s.len() / 2]
        })
        .collect()
}

/// Runtime of `Π` against input size; polynomial in `n` of degree at most
/// `fit_max_degree`, with a residual below the configured threshold.
pub fn preprocessing_fit(name: &str, config: &SuiteConfig) -> Result<BenchFit> {
    let w = catalog::witness(name, config)?;
    let (ladder, inputs) = rung_inputs(name, config)?;
    let times = interleaved(config, inputs.len(), |r| {
        black_box(w.digest(&inputs[r]));
    });
    let points: Vec<BenchPoint> = ladder
        .iter()
        .zip(&inputs)
        .zip(times)
        .map(|((&n, x), t)| BenchPoint {
            nominal_size: n,
            input_size: x.len(),
            time_ns: t.max(1.0),
        })
        .collect();
    let measurements: Vec<_> = points.iter().map(|p| (p.input_size, p.time_ns)).collect();
    let fit = fit_runtime(&measurements, Model::PolyInN, f64::from(config.fit_max_degree), config.slope_slack)?;
    Ok(BenchFit {
        name: format!("preprocessing/{name}"),
        pass: fit.pass && fit.residual <= config.residual_threshold,
        points,
        fit,
        residual_threshold: Some(config.residual_threshold),
    })
}

/// Queries timed against each rung's digest.
fn latency_queries(name: &str, config: &SuiteConfig) -> Result<Vec<Instance>> {
    Ok(match name {
        "wordstats-example1" => {
            let lexicon = config.lexicon()?;
            let mut rng = rng_for(config.seed, "latency-queries", 0);
            let counts = wordstats::Counts(vec![1 << 20; lexicon.len()]);
            wordstats::random_queries(&counts, &lexicon, 64, &mut rng)
                .into_iter()
                .map(|(p, k, _)| Instance::from(wordstats::query_text(&p, k)))
                .collect()
        }
        _ => vec![Instance::empty()],
    })
}

/// Time per query once `Π(D)` is computed, against `|D|`; polynomial in
/// `log n` with exponent at most the digest bound's `k` plus slack.
pub fn query_latency_fit(name: &str, config: &SuiteConfig) -> Result<BenchFit> {
    let w = catalog::witness(name, config)?;
    let (ladder, inputs) = rung_inputs(name, config)?;
    let digests: Vec<Instance> = inputs.iter().map(|x| w.digest(x)).collect();
    let queries = latency_queries(name, config)?;
    let batch = config.query_batch;
    let times = interleaved(config, digests.len(), |r| {
        let d = &digests[r];
        let mut accepted = 0usize;
        for i in 0..batch {
            accepted += usize::from(w.post.contains(black_box(d), &queries[i % queries.len()]));
        }
        black_box(accepted);
    });
    let points: Vec<BenchPoint> = ladder
        .iter()
        .zip(&inputs)
        .zip(times)
        .map(|((&n, x), t)| BenchPoint {
            nominal_size: n,
            input_size: x.len(),
            time_ns: (t / batch as f64).max(f64::MIN_POSITIVE),
        })
        .collect();
    let measurements: Vec<_> = points.iter().map(|p| (p.input_size, p.time_ns)).collect();
    let fit = fit_runtime(&measurements, Model::PolyInLogN, f64::from(w.output_bound.k), config.slope_slack)?;
    Ok(BenchFit {
        name: format!("query-latency/{name}"),
        pass: fit.pass,
        points,
        fit,
        residual_threshold: None,
    })
}

/// Both fits for the witness of a problem name.
pub fn bench(problem: &str, config: &SuiteConfig) -> Result<Vec<BenchFit>> {
    let name = match problem {
        "wordstats" => "wordstats-example1",
        "cvp" => "cvp-example2",
        "bds" => "bds-example3",
        other => return Err(Error::UnknownProblem(other.to_owned())),
    };
    Ok(vec![preprocessing_fit(name, config)?, query_latency_fit(name, config)?])
}
