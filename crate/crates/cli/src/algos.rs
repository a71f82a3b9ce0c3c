//! One entry point per colourer, returning the colouring plus a JSON summary.

use std::fmt::Write as _;

use anyhow::{anyhow, Result};
use peacekit::dsatur::dsatur;
use peacekit::nibble::{default_low_band, nibble_colour, postprocess_recolour, NibbleParams, Policy};
use peacekit::oneshot::{oneshot_colour, OneShotParams};
use peacekit::oracle::{min_peacefulness_with, OracleOptions};
use peacekit::zcolour::{zcolour, ZParams};
use peacekit::{greedy_extend, Graph, LogBase, PartialColouring};
use serde::{Deserialize, Deserializer, Serialize};
use serde_json::{json, Value};

use crate::scalar::ScalarArg;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Algorithm {
    /// First fit with `Δ + 1` colours in vertex order.
    Greedy,
    /// DSATUR with `Δ + 1` colours.
    Dsatur,
    Oneshot,
    Zcolour,
    Nibble,
    /// Exhaustive minimum peacefulness (tiny graphs only).
    Oracle,
}

impl Algorithm {
    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Greedy => "greedy",
            Algorithm::Dsatur => "dsatur",
            Algorithm::Oneshot => "oneshot",
            Algorithm::Zcolour => "zcolour",
            Algorithm::Nibble => "nibble",
            Algorithm::Oracle => "oracle",
        }
    }
}

/// `restart:K` or `monitor-only`.
pub fn parse_policy(s: &str) -> Result<Policy, String> {
    match s {
        "monitor-only" | "monitor" => Ok(Policy::MonitorOnly),
        _ => {
            let k = s
                .strip_prefix("restart:")
                .and_then(|k| k.parse().ok())
                .ok_or_else(|| format!("expected monitor-only or restart:K, got `{s}`"))?;
            Ok(Policy::RestartOnViolation { max_restarts: k })
        }
    }
}

fn policy_name(p: Policy) -> String {
    match p {
        Policy::MonitorOnly => "monitor-only".into(),
        Policy::RestartOnViolation { max_restarts } => format!("restart:{max_restarts}"),
    }
}

fn de_scalar<'de, D: Deserializer<'de>>(d: D) -> Result<Option<ScalarArg>, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Raw {
        Num(f64),
        Text(String),
    }
    Ok(match Option::<Raw>::deserialize(d)? {
        None => None,
        Some(Raw::Num(x)) => Some(ScalarArg::Float(x)),
        Some(Raw::Text(s)) => Some(s.parse().map_err(serde::de::Error::custom)?),
    })
}

fn de_policy<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Policy>, D::Error> {
    Option::<String>::deserialize(d)?
        .map(|s| parse_policy(&s).map_err(serde::de::Error::custom))
        .transpose()
}

/// Algorithm settings; unset fields take the library defaults.
#[derive(Clone, Debug, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgoParams {
    #[serde(default, deserialize_with = "de_scalar")]
    pub mu: Option<ScalarArg>,
    pub palette: Option<usize>,
    pub max_rounds: Option<usize>,
    #[serde(default, deserialize_with = "de_scalar")]
    pub epsilon: Option<ScalarArg>,
    pub b_const: Option<f64>,
    #[serde(default, deserialize_with = "de_policy")]
    pub policy: Option<Policy>,
    pub monitor_sample: Option<usize>,
    /// Nibble only: recolour into a total colouring afterwards (default true).
    pub postprocess: Option<bool>,
    /// Oracle only: number of colours (default `Δ + 1`).
    pub colours: Option<usize>,
}

impl AlgoParams {
    /// Canonical `key=value;...` form of the fields that are set.
    pub fn render(&self) -> String {
        let mut out = String::new();
        let mut put = |k: &str, v: String| {
            if !out.is_empty() {
                out.push(';');
            }
            let _ = write!(out, "{k}={v}");
        };
        if let Some(x) = self.mu {
            put("mu", x.to_string());
        }
        if let Some(x) = self.palette {
            put("palette", x.to_string());
        }
        if let Some(x) = self.max_rounds {
            put("max_rounds", x.to_string());
        }
        if let Some(x) = self.epsilon {
            put("epsilon", x.to_string());
        }
        if let Some(x) = self.b_const {
            put("b_const", x.to_string());
        }
        if let Some(x) = self.policy {
            put("policy", policy_name(x));
        }
        if let Some(x) = self.monitor_sample {
            put("monitor_sample", x.to_string());
        }
        if let Some(x) = self.postprocess {
            put("postprocess", x.to_string());
        }
        if let Some(x) = self.colours {
            put("colours", x.to_string());
        }
        out
    }
}

pub struct AlgoRun {
    pub colouring: PartialColouring,
    /// `ok`, or `best-effort` when a randomized stage ran out of rounds.
    pub status: &'static str,
    pub summary: Value,
}

fn status(best_effort: bool) -> &'static str {
    if best_effort {
        "best-effort"
    } else {
        "ok"
    }
}

fn run_oneshot<T: peacekit::scalar::Threshold>(g: &Graph, mu: T, p: &AlgoParams, seed: u64) -> Result<AlgoRun> {
    let params = OneShotParams {
        palette_size: p.palette,
        max_resample_rounds: p.max_rounds,
        ..OneShotParams::new(mu, seed)
    };
    let (colouring, stats) = oneshot_colour(g, &params)?;
    Ok(AlgoRun {
        colouring,
        status: status(stats.best_effort),
        summary: serde_json::to_value(&stats)?,
    })
}

fn run_zcolour<T: peacekit::scalar::Threshold>(
    g: &Graph,
    eps: T,
    p: &AlgoParams,
    seed: u64,
    log_base: LogBase,
) -> Result<AlgoRun> {
    let params = ZParams {
        max_rounds: p.max_rounds,
        log_base,
        ..ZParams::new(eps, seed)
    };
    let out = zcolour(g, &params)?;
    Ok(AlgoRun {
        colouring: out.colouring,
        status: status(out.stats.best_effort),
        summary: json!({ "stats": out.stats, "z": out.z, "report": out.report }),
    })
}

/// Nibble parameters from the shared settings.
pub fn nibble_params(p: &AlgoParams, seed: u64, log_base: LogBase) -> NibbleParams {
    let mut params = NibbleParams::new(seed);
    params.log_base = log_base;
    if let Some(b) = p.b_const {
        params.b_const = b;
    }
    if let Some(policy) = p.policy {
        params.policy = policy;
    }
    if let Some(k) = p.monitor_sample {
        params.monitor_sample = k;
    }
    params
}

pub fn run(g: &Graph, alg: Algorithm, p: &AlgoParams, seed: u64, log_base: LogBase) -> Result<AlgoRun> {
    let delta = g.max_degree();
    match alg {
        Algorithm::Greedy => {
            let colouring = greedy_extend(g, &PartialColouring::uncoloured(g.n(), delta + 1))
                .ok_or_else(|| anyhow!("greedy ran out of colours"))?;
            Ok(AlgoRun {
                colouring,
                status: "ok",
                summary: json!({}),
            })
        }
        Algorithm::Dsatur => {
            let colouring = dsatur(g, &PartialColouring::uncoloured(g.n(), delta + 1), 0..delta + 1)?;
            Ok(AlgoRun {
                colouring,
                status: "ok",
                summary: json!({}),
            })
        }
        Algorithm::Oneshot => match p.mu.unwrap_or(ScalarArg::Float(0.5)) {
            ScalarArg::Exact(mu) => run_oneshot(g, mu, p, seed),
            ScalarArg::Float(mu) => run_oneshot(g, mu, p, seed),
        },
        Algorithm::Zcolour => match p.epsilon {
            Some(ScalarArg::Exact(e)) => run_zcolour(g, e, p, seed, log_base),
            Some(ScalarArg::Float(e)) => run_zcolour(g, e, p, seed, log_base),
            None => run_zcolour(g, peacekit::zcolour::default_epsilon::<peacekit::Rational>(), p, seed, log_base),
        },
        Algorithm::Nibble => {
            let out = nibble_colour(g, &nibble_params(p, seed, log_base))?;
            let mut colouring = out.colouring;
            if p.postprocess.unwrap_or(true) {
                colouring = postprocess_recolour(g, &colouring, default_low_band(delta, log_base))?;
            }
            let trace = json!({ "l": out.trace.l, "g": out.trace.g, "d": out.trace.d });
            Ok(AlgoRun {
                colouring,
                status: status(out.stats.anomalies > 0 || out.stats.codegree_warning),
                summary: json!({ "stats": out.stats, "trace": trace }),
            })
        }
        Algorithm::Oracle => {
            let c = p.colours.unwrap_or(delta + 1);
            let res = min_peacefulness_with(g, c, OracleOptions::default())?;
            Ok(AlgoRun {
                colouring: res.witness,
                status: "ok",
                summary: json!({ "p_star": res.p_star }),
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn params_render_canonically() {
        let p: AlgoParams = toml::from_str("mu = \"1/2\"\nmax_rounds = 10\npolicy = \"restart:3\"").unwrap();
        assert_eq!(p.render(), "mu=1/2;max_rounds=10;policy=restart:3");
        let q: AlgoParams = toml::from_str("mu = 0.5").unwrap();
        assert_eq!(q.render(), "mu=0.5");
        assert!(toml::from_str::<AlgoParams>("nu = 1").is_err());
    }

    #[test]
    fn every_algorithm_runs_on_a_small_graph() {
        let g = Graph::petersen();
        for alg in [Algorithm::Greedy, Algorithm::Dsatur, Algorithm::Oneshot, Algorithm::Oracle] {
            let run = run(&g, alg, &AlgoParams::default(), 1, LogBase::Natural).unwrap();
            run.colouring.validate_total(&g).unwrap();
        }
        let k = peacekit::graph::random_regular(200, 20, 1).unwrap();
        let nib = run(&k, Algorithm::Nibble, &AlgoParams::default(), 1, LogBase::Natural).unwrap();
        nib.colouring.validate_total(&k).unwrap();
    }
}
