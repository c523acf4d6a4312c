//! The boundary embedding of signatures, sampling from zw-measures, and
//! weak-convergence diagnostics for pushforward empirical measures.

use std::io::Write;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::characters::{f_omega, OmegaPoint};
use crate::gt_graph::MeasureTable;
use crate::signatures::{frobenius_split, Signature};
use crate::zw_measure::{build_table, log_p_prime, ZwParams};
use crate::{Error, Result};

/// A signature mapped into the boundary: modified Frobenius coordinates of
/// the positive/negative parts divided by the level, with
/// `c± = |la±| / N` as the deltas (so the gammas vanish).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmbeddedPoint {
    pub omega: OmegaPoint,
    pub source_level: usize,
    pub source_signature: Signature,
}

/// Embeds a level-`n` signature into the boundary.
pub fn embed(la: &Signature, n: usize) -> Result<EmbeddedPoint> {
    if la.level() != n || n == 0 {
        return Err(Error::LevelMismatch {
            lo: la.level(),
            hi: n,
            expected: 0,
        });
    }
    let f = frobenius_split(la);
    let nf = n as f64;
    let scale =
        |two_x: &[i64]| -> Vec<f64> { two_x.iter().map(|&v| v as f64 / (2.0 * nf)).collect() };
    let omega = OmegaPoint {
        alpha_plus: scale(&f.two_p_plus),
        beta_plus: scale(&f.two_q_plus),
        alpha_minus: scale(&f.two_p_minus),
        beta_minus: scale(&f.two_q_minus),
        delta_plus: f.size_plus as f64 / nf,
        delta_minus: f.size_minus as f64 / nf,
    };
    Ok(EmbeddedPoint {
        omega,
        source_level: n,
        source_signature: la.clone(),
    })
}

impl EmbeddedPoint {
    /// Verifies the boundary constraints in half-integer arithmetic, where
    /// they hold exactly: strict ordering of the modified coordinates, the
    /// sum rule `sum(p~ + q~) = |la±|` per part, and the beta cap
    /// `q~_1(la+) + q~_1(la-) <= N`.
    pub fn validate_exact(&self) -> Result<()> {
        let f = frobenius_split(&self.source_signature);
        let n = self.source_level as i64;
        for (name, two) in [
            ("p+", &f.two_p_plus),
            ("q+", &f.two_q_plus),
            ("p-", &f.two_p_minus),
            ("q-", &f.two_q_minus),
        ] {
            if two.windows(2).any(|w| w[0] <= w[1]) || two.iter().any(|&x| x <= 0) {
                return Err(Error::InvalidOmega(format!(
                    "{name} coordinates not strictly decreasing positive at {}",
                    self.source_signature
                )));
            }
        }
        let sum_plus: i64 = f.two_p_plus.iter().sum::<i64>() + f.two_q_plus.iter().sum::<i64>();
        let sum_minus: i64 = f.two_p_minus.iter().sum::<i64>() + f.two_q_minus.iter().sum::<i64>();
        if sum_plus != 2 * f.size_plus || sum_minus != 2 * f.size_minus {
            return Err(Error::InvalidOmega(format!(
                "Frobenius sum rule broken at {}",
                self.source_signature
            )));
        }
        let b1p = f.two_q_plus.first().copied().unwrap_or(0);
        let b1m = f.two_q_minus.first().copied().unwrap_or(0);
        if b1p + b1m > 2 * n {
            return Err(Error::InvalidOmega(format!(
                "beta cap broken at {}: {b1p}/2 + {b1m}/2 > {n}",
                self.source_signature
            )));
        }
        // the float view must be the integer data divided by 2N
        self.omega.validate()?;
        Ok(())
    }
}

/// A weighted collection of embedded points with total weight one.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EmpiricalMeasure {
    pub points: Vec<(EmbeddedPoint, f64)>,
}

impl EmpiricalMeasure {
    pub fn new(points: Vec<(EmbeddedPoint, f64)>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::Empty(
                "an empirical measure needs at least one point",
            ));
        }
        if points.iter().any(|(_, w)| *w < 0.0) {
            return Err(Error::Domain("negative weight".into()));
        }
        let total: f64 = points.iter().map(|(_, w)| w).sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::Domain(format!("weights sum to {total}, not 1")));
        }
        Ok(EmpiricalMeasure { points })
    }

    /// Weighted average of a test function on the boundary.
    pub fn integrate(&self, f: impl Fn(&OmegaPoint) -> f64) -> f64 {
        self.points.iter().map(|(p, w)| w * f(&p.omega)).sum()
    }

    /// One JSON record per line: embedded point plus weight.
    pub fn write_jsonl<W: Write>(&self, out: &mut W) -> std::io::Result<()> {
        for (p, w) in &self.points {
            let rec = serde_json::json!({
                "signature": p.source_signature,
                "level": p.source_level,
                "omega": p.omega,
                "weight": w,
            });
            writeln!(out, "{rec}")?;
        }
        Ok(())
    }

    /// CSV with the leading two coordinates of each family plus the deltas.
    pub fn write_csv<W: Write>(&self, out: &mut W) -> std::io::Result<()> {
        writeln!(out, "a1p,a2p,b1p,b2p,a1m,a2m,b1m,b2m,cp,cm,weight")?;
        let coord = |v: &[f64], i: usize| v.get(i).copied().unwrap_or(0.0);
        for (p, w) in &self.points {
            let o = &p.omega;
            writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{},{}",
                coord(&o.alpha_plus, 0),
                coord(&o.alpha_plus, 1),
                coord(&o.beta_plus, 0),
                coord(&o.beta_plus, 1),
                coord(&o.alpha_minus, 0),
                coord(&o.alpha_minus, 1),
                coord(&o.beta_minus, 0),
                coord(&o.beta_minus, 1),
                o.delta_plus,
                o.delta_minus,
                w
            )?;
        }
        Ok(())
    }
}

/// How to draw signatures from a zw-measure.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum SampleMethod {
    /// Inverse CDF over an enumerated table with the given mass tolerance.
    Enumerate { mass_tolerance: f64 },
    /// Metropolis chain with single-coordinate +-1 proposals. `None` picks
    /// the defaults: burn-in `1000 N`, thinning `N`.
    Mcmc {
        burn_in: Option<usize>,
        thinning: Option<usize>,
    },
}

impl SampleMethod {
    pub fn enumerate_default() -> Self {
        SampleMethod::Enumerate {
            mass_tolerance: 1e-8,
        }
    }

    pub fn mcmc_default() -> Self {
        SampleMethod::Mcmc {
            burn_in: None,
            thinning: None,
        }
    }
}

#[derive(Clone)]
enum SamplerState {
    Enumerate {
        entries: Vec<(Signature, f64)>, // cumulative probabilities
    },
    Mcmc {
        params: ZwParams,
        current: Signature,
        current_lw: f64,
        burn_in: usize,
        thinning: usize,
        burned: bool,
        bounds: (Option<i64>, Option<i64>),
    },
}

/// A reusable sampler for the level-`n` zw-measure.
#[derive(Clone)]
pub struct SignatureSampler {
    level: usize,
    state: SamplerState,
}

impl SignatureSampler {
    pub fn new(n: usize, p: &ZwParams, method: SampleMethod) -> Result<Self> {
        p.admissibility().map_err(Error::NotAdmissible)?;
        match method {
            SampleMethod::Enumerate { mass_tolerance } => {
                let table = build_table(n, p, mass_tolerance)?;
                Ok(SignatureSampler {
                    level: n,
                    state: SamplerState::Enumerate {
                        entries: cumulative(&table),
                    },
                })
            }
            SampleMethod::Mcmc { burn_in, thinning } => {
                let bounds = p.degenerate_bounds();
                let start_entry = 0i64
                    .min(bounds.0.unwrap_or(0))
                    .max(bounds.1.unwrap_or(i64::MIN));
                let current = Signature::new(vec![start_entry; n]).expect("constant is decreasing");
                let current_lw = log_p_prime(&current, p)?
                    .ok_or_else(|| Error::Domain("chain start fell outside the support".into()))?;
                Ok(SignatureSampler {
                    level: n,
                    state: SamplerState::Mcmc {
                        params: *p,
                        current,
                        current_lw,
                        burn_in: burn_in.unwrap_or(1000 * n),
                        thinning: thinning.unwrap_or(n.max(1)),
                        burned: false,
                        bounds,
                    },
                })
            }
        }
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn sample<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Signature {
        match &mut self.state {
            SamplerState::Enumerate { entries } => {
                let u: f64 = rng.random();
                let idx = entries
                    .partition_point(|(_, c)| *c < u)
                    .min(entries.len() - 1);
                entries[idx].0.clone()
            }
            SamplerState::Mcmc {
                params,
                current,
                current_lw,
                burn_in,
                thinning,
                burned,
                bounds,
            } => {
                let steps = if *burned {
                    *thinning
                } else {
                    *burned = true;
                    *burn_in + *thinning
                };
                for _ in 0..steps {
                    mcmc_step(params, current, current_lw, *bounds, rng);
                }
                current.clone()
            }
        }
    }
}

fn cumulative(table: &MeasureTable) -> Vec<(Signature, f64)> {
    // conditional on the captured box; the defect is the caller's bias bound
    let total = table.captured_mass();
    let mut acc = 0.0;
    let mut out = Vec::with_capacity(table.masses.len());
    for (sig, &lw) in &table.masses {
        acc += (lw - table.log_target_total).exp() / total;
        out.push((sig.clone(), acc));
    }
    if let Some(last) = out.last_mut() {
        last.1 = 1.0;
    }
    out
}

fn mcmc_step<R: Rng + ?Sized>(
    p: &ZwParams,
    current: &mut Signature,
    current_lw: &mut f64,
    bounds: (Option<i64>, Option<i64>),
    rng: &mut R,
) {
    let n = current.level();
    let i = rng.random_range(0..n);
    let delta: i64 = if rng.random::<f64>() < 0.5 { 1 } else { -1 };
    let e = current.entries();
    let v = e[i] + delta;
    // stay ordered and inside any degenerate support
    if i > 0 && v > e[i - 1] {
        return;
    }
    if i + 1 < n && v < e[i + 1] {
        return;
    }
    if let Some(hi) = bounds.0 {
        if i == 0 && v > hi {
            return;
        }
    }
    if let Some(lo) = bounds.1 {
        if i == n - 1 && v < lo {
            return;
        }
    }
    let mut entries = e.to_vec();
    entries[i] = v;
    let proposal = Signature::new(entries).expect("ordering checked");
    let lw = match log_p_prime(&proposal, p) {
        Ok(Some(lw)) => lw,
        _ => return, // exact zero or phase failure: reject
    };
    if lw >= *current_lw || rng.random::<f64>() < (lw - *current_lw).exp() {
        *current = proposal;
        *current_lw = lw;
    }
}

/// Convenience single draw; prefer [`SignatureSampler`] for repeated use.
pub fn sample_signature<R: Rng + ?Sized>(
    n: usize,
    p: &ZwParams,
    method: SampleMethod,
    rng: &mut R,
) -> Result<Signature> {
    Ok(SignatureSampler::new(n, p, method)?.sample(rng))
}

/// Pushforward of the level-`n` zw-measure under the boundary embedding:
/// `n_samples` embedded draws with equal weights.
pub fn pushforward<R: Rng + ?Sized>(
    n: usize,
    p: &ZwParams,
    n_samples: usize,
    method: SampleMethod,
    rng: &mut R,
) -> Result<EmpiricalMeasure> {
    if n_samples == 0 {
        return Err(Error::Empty("pushforward needs a positive sample count"));
    }
    let mut sampler = SignatureSampler::new(n, p, method)?;
    let w = 1.0 / n_samples as f64;
    let mut points = Vec::with_capacity(n_samples);
    for _ in 0..n_samples {
        let la = sampler.sample(rng);
        points.push((embed(&la, n)?, w));
    }
    EmpiricalMeasure::new(points)
}

/// A bounded continuous test function on the boundary.
pub type PanelFunction = Box<dyn Fn(&OmegaPoint) -> f64>;

/// The fixed panel of bounded continuous test functions on the boundary:
/// leading two coordinates of each alpha/beta family, both deltas, and the
/// real and imaginary parts of `F(u0)` at `u0 = exp(i pi / 3)`.
pub fn diagnostic_panel() -> Vec<(&'static str, PanelFunction)> {
    let u0 = Complex64::from_polar(1.0, std::f64::consts::FRAC_PI_3);
    let coord = |pick: fn(&OmegaPoint) -> &Vec<f64>, i: usize| {
        move |o: &OmegaPoint| pick(o).get(i).copied().unwrap_or(0.0)
    };
    vec![
        ("alpha1_plus", Box::new(coord(|o| &o.alpha_plus, 0))),
        ("alpha2_plus", Box::new(coord(|o| &o.alpha_plus, 1))),
        ("beta1_plus", Box::new(coord(|o| &o.beta_plus, 0))),
        ("beta2_plus", Box::new(coord(|o| &o.beta_plus, 1))),
        ("alpha1_minus", Box::new(coord(|o| &o.alpha_minus, 0))),
        ("alpha2_minus", Box::new(coord(|o| &o.alpha_minus, 1))),
        ("beta1_minus", Box::new(coord(|o| &o.beta_minus, 0))),
        ("beta2_minus", Box::new(coord(|o| &o.beta_minus, 1))),
        ("c_plus", Box::new(|o: &OmegaPoint| o.delta_plus)),
        ("c_minus", Box::new(|o: &OmegaPoint| o.delta_minus)),
        (
            "re_f_at_u0",
            Box::new(move |o: &OmegaPoint| f_omega(o, u0).re),
        ),
        (
            "im_f_at_u0",
            Box::new(move |o: &OmegaPoint| f_omega(o, u0).im),
        ),
    ]
}

/// Panel integrals for a sequence of empirical measures at increasing
/// levels, with successive differences. No convergence rate is asserted;
/// the report shows the observed differences only.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DiagnosticsReport {
    pub test_functions: Vec<String>,
    /// integrals[f][k]: panel function f against the k-th measure
    pub integrals: Vec<Vec<f64>>,
    /// successive absolute differences along the measure sequence
    pub successive_diffs: Vec<Vec<f64>>,
}

pub fn convergence_diagnostics(seq: &[EmpiricalMeasure]) -> Result<DiagnosticsReport> {
    if seq.is_empty() {
        return Err(Error::Empty("diagnostics need at least one measure"));
    }
    let panel = diagnostic_panel();
    let mut integrals = Vec::with_capacity(panel.len());
    let mut diffs = Vec::with_capacity(panel.len());
    let mut names = Vec::with_capacity(panel.len());
    for (name, f) in &panel {
        let vals: Vec<f64> = seq.iter().map(|m| m.integrate(f)).collect();
        diffs.push(vals.windows(2).map(|w| (w[1] - w[0]).abs()).collect());
        integrals.push(vals);
        names.push(name.to_string());
    }
    Ok(DiagnosticsReport {
        test_functions: names,
        integrals,
        successive_diffs: diffs,
    })
}
