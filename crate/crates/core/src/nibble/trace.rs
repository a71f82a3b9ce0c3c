//! The deterministic recurrences tracked by the nibble, and the list-size
//! schedule derived from them.

use num_traits::{Float, FromPrimitive};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::LogBase;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TraceError {
    #[error("delta = {0} is too small; need delta >= 16 and log log delta > 0")]
    DeltaTooSmall(usize),
    #[error("list-size schedule reaches {value} at iteration {iteration}")]
    ScheduleExhausted { iteration: usize, value: i64 },
}

/// `l_i, g_i, D_i, n_i` for `i = 1..=i*+1`, stored at index `i - 1`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IdealizedTrace<F> {
    pub delta: usize,
    pub b_const: F,
    pub log_base: LogBase,
    pub alpha: F,
    pub i_star: usize,
    /// `Δ + ⌈BΔ / log log Δ⌉`, the palette size.
    pub l1: usize,
    pub l: Vec<F>,
    pub g: Vec<F>,
    pub d: Vec<F>,
    pub n: Vec<F>,
}

fn cast<F: FromPrimitive>(x: f64) -> F {
    F::from_f64(x).expect("representable")
}

/// Evaluates the recurrences
///
/// ```text
/// l_{i+1} = l_i (1 - 1/l_1)^{n_i}
/// g_{i+1} = g_i (1 - 1/l_1)^{n_i} + n_i l_i / l_1
/// D_{i+1} = D_i - n_i,  n_i = α D_i
/// ```
///
/// from `l_1 = Δ + ⌈BΔ/log log Δ⌉`, `g_1 = 0`, `D_1 = Δ`, with
/// `α = 1/log²Δ` and `i* = ⌈log²Δ · log log Δ⌉`.
pub fn idealized_trace<F: Float + FromPrimitive>(
    delta: usize,
    b_const: F,
    log_base: LogBase,
) -> Result<IdealizedTrace<F>, TraceError> {
    let dd: F = cast(delta as f64);
    let loglog = log_base.log_log(dd);
    if delta < 16 || loglog <= F::zero() {
        return Err(TraceError::DeltaTooSmall(delta));
    }
    let log_sq = log_base.log_pow(dd, cast(2.0));
    let alpha = F::one() / log_sq;
    let i_star = (log_sq * loglog).ceil().to_usize().expect("finite");
    let l1 = delta + (b_const * dd / loglog).ceil().to_usize().expect("finite");
    let l1f: F = cast(l1 as f64);
    let shrink = F::one() - F::one() / l1f;

    let len = i_star + 1;
    let (mut l, mut g, mut d, mut n) = (
        Vec::with_capacity(len),
        Vec::with_capacity(len),
        Vec::with_capacity(len),
        Vec::with_capacity(len),
    );
    l.push(l1f);
    g.push(F::zero());
    d.push(dd);
    n.push(alpha * dd);
    for i in 1..len {
        let (lp, gp, dp, np) = (l[i - 1], g[i - 1], d[i - 1], n[i - 1]);
        let factor = shrink.powf(np);
        l.push(lp * factor);
        g.push(gp * factor + np * lp / l1f);
        let dn = dp - np;
        d.push(dn);
        n.push(alpha * dn);
    }
    Ok(IdealizedTrace {
        delta,
        b_const,
        log_base,
        alpha,
        i_star,
        l1,
        l,
        g,
        d,
        n,
    })
}

impl<F: Float + FromPrimitive> IdealizedTrace<F> {
    /// Number of stored iterations, `i* + 1`.
    pub fn len(&self) -> usize {
        self.l.len()
    }

    pub fn is_empty(&self) -> bool {
        self.l.is_empty()
    }

    pub fn l_at(&self, i: usize) -> F {
        self.l[i - 1]
    }

    pub fn g_at(&self, i: usize) -> F {
        self.g[i - 1]
    }

    pub fn d_at(&self, i: usize) -> F {
        self.d[i - 1]
    }

    pub fn n_at(&self, i: usize) -> F {
        self.n[i - 1]
    }

    fn log_pow(&self, power: f64) -> F {
        self.log_base.log_pow(cast::<F>(self.delta as f64), cast(power))
    }

    /// Target list size `l'_i`: `l_1` for `i = 1`, else `⌊l_i⌋ - ⌈iΔ / log⁵Δ⌉`.
    pub fn list_target(&self, i: usize) -> i64 {
        if i == 1 {
            return self.l1 as i64;
        }
        let slack = (cast::<F>((i * self.delta) as f64) / self.log_pow(5.0)).ceil();
        self.l_at(i).floor().to_i64().expect("finite") - slack.to_i64().expect("finite")
    }

    /// `p*_i = (l'_{i+1} + Δ^{2/3}) / l'_i`.
    pub fn p_star(&self, i: usize) -> F {
        let next: F = cast(self.list_target(i + 1) as f64);
        let here: F = cast(self.list_target(i) as f64);
        (next + self.delta_pow(2.0 / 3.0)) / here
    }

    pub fn delta_pow(&self, power: f64) -> F {
        cast::<F>(self.delta as f64).powf(cast(power))
    }

    /// Checks that every `l'_i`, `i <= i* + 1`, is positive.
    pub fn check_schedule(&self) -> Result<(), TraceError> {
        for i in 1..=self.len() {
            let value = self.list_target(i);
            if value <= 0 {
                return Err(TraceError::ScheduleExhausted { iteration: i, value });
            }
        }
        Ok(())
    }

    pub fn to_f64(&self) -> IdealizedTrace<f64> {
        let conv = |v: &[F]| v.iter().map(|x| x.to_f64().unwrap_or(f64::NAN)).collect();
        IdealizedTrace {
            delta: self.delta,
            b_const: self.b_const.to_f64().unwrap_or(f64::NAN),
            log_base: self.log_base,
            alpha: self.alpha.to_f64().unwrap_or(f64::NAN),
            i_star: self.i_star,
            l1: self.l1,
            l: conv(&self.l),
            g: conv(&self.g),
            d: conv(&self.d),
            n: conv(&self.n),
        }
    }
}
