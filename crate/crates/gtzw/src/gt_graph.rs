//! The Gelfand-Tsetlin graph as a weighted branching graph: cotransition
//! probabilities, iterated transitions, coherency verification and downward
//! path sampling for central measures.

use std::collections::BTreeMap;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::signatures::{enumerate_down, interlaces, log_weyl_dim, weyl_dim, Signature};
use crate::{Error, Result};

/// A finite truncated measure over signatures at a fixed level.
///
/// Masses are stored as real log-weights against a log-scale target total
/// (`log S_N` for zw-tables, 0 for plain probability tables). The mass not
/// captured by the table is reported as a defect, never hidden.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MeasureTable {
    pub level: usize,
    /// signature -> log-weight; keys sorted lexicographically
    #[serde(with = "masses_serde")]
    pub masses: BTreeMap<Signature, f64>,
    /// log of the summed stored weights
    pub log_total_captured: f64,
    /// log of the exact total the weights are normalized against
    pub log_target_total: f64,
}

/// Maps of signatures serialize as sorted arrays of entry records, since
/// JSON object keys must be strings.
mod masses_serde {
    use super::*;
    use serde::ser::SerializeSeq;
    use serde::{Deserializer, Serializer};

    #[derive(Serialize, Deserialize)]
    struct Entry {
        signature: Signature,
        log_weight: f64,
    }

    pub fn serialize<S: Serializer>(
        masses: &BTreeMap<Signature, f64>,
        ser: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = ser.serialize_seq(Some(masses.len()))?;
        for (sig, &lw) in masses {
            seq.serialize_element(&Entry {
                signature: sig.clone(),
                log_weight: lw,
            })?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        de: D,
    ) -> std::result::Result<BTreeMap<Signature, f64>, D::Error> {
        let entries: Vec<Entry> = Vec::deserialize(de)?;
        Ok(entries
            .into_iter()
            .map(|e| (e.signature, e.log_weight))
            .collect())
    }
}

impl MeasureTable {
    /// A probability table from explicit (signature, probability) pairs.
    pub fn from_probabilities(level: usize, items: Vec<(Signature, f64)>) -> Result<Self> {
        let mut masses = BTreeMap::new();
        let mut logs = Vec::new();
        for (sig, p) in items {
            if sig.level() != level {
                return Err(Error::LevelMismatch {
                    lo: sig.level(),
                    hi: level,
                    expected: 0,
                });
            }
            if p < 0.0 {
                return Err(Error::Domain(format!("negative mass {p} at {sig}")));
            }
            if p > 0.0 {
                masses.insert(sig, p.ln());
                logs.push(p.ln());
            }
        }
        let log_total_captured = crate::numerics::log_sum_exp(&logs)?;
        if log_total_captured > 1e-12 {
            return Err(Error::Domain(format!(
                "captured mass exceeds the probability target: log total {log_total_captured:.3e}"
            )));
        }
        Ok(MeasureTable {
            level,
            masses,
            log_total_captured,
            log_target_total: 0.0,
        })
    }

    pub fn delta(la: Signature) -> Self {
        let level = la.level();
        let mut masses = BTreeMap::new();
        masses.insert(la, 0.0);
        MeasureTable {
            level,
            masses,
            log_total_captured: 0.0,
            log_target_total: 0.0,
        }
    }

    /// Normalized probability of one signature.
    pub fn probability(&self, la: &Signature) -> f64 {
        self.masses
            .get(la)
            .map(|&lw| (lw - self.log_target_total).exp())
            .unwrap_or(0.0)
    }

    /// Captured probability mass (at most 1 up to roundoff).
    pub fn captured_mass(&self) -> f64 {
        (self.log_total_captured - self.log_target_total).exp()
    }

    /// Certified mass defect: target minus captured, clamped at zero.
    pub fn defect(&self) -> f64 {
        (1.0 - self.captured_mass()).max(0.0)
    }
}

/// RNG stream derivation rule: every worker (or record index) gets the
/// ChaCha stream of its id under the shared master seed. Streams are
/// statistically independent and reproducible.
pub fn stream_rng(master_seed: u64, stream: u64) -> rand_chacha::ChaCha8Rng {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(stream);
    rng
}

/// Cotransition probability `q(nu, la) = Dim nu / Dim la` for interlacing
/// pairs, zero otherwise. `q(empty, la) = 1` for level-1 `la`.
pub fn cotransition(nu: &Signature, la: &Signature) -> Result<f64> {
    if !interlaces(nu, la)? {
        return Ok(0.0);
    }
    match (weyl_dim(nu), weyl_dim(la)) {
        (Ok(dn), Ok(dl)) => Ok(dn as f64 / dl as f64),
        _ => Ok((log_weyl_dim(nu) - log_weyl_dim(la)).exp()),
    }
}

/// Cotransition probability as an exact reduced fraction. Only valid while
/// the dimensions fit 128 bits.
pub fn cotransition_rational(nu: &Signature, la: &Signature) -> Result<(i128, i128)> {
    if !interlaces(nu, la)? {
        return Ok((0, 1));
    }
    let dn = weyl_dim(nu)?;
    let dl = weyl_dim(la)?;
    let g = gcd(dn, dl);
    Ok((dn / g, dl / g))
}

fn gcd(a: i128, b: i128) -> i128 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a.max(1)
}

/// Number of interlacing chains from `nu` (level n) up to `la` (level N),
/// by downward dynamic programming from `la`.
pub fn chain_count(nu: &Signature, la: &Signature) -> Result<i128> {
    let n = nu.level();
    let top = la.level();
    if n >= top {
        return Err(Error::LevelMismatch {
            lo: n,
            hi: top,
            expected: 1,
        });
    }
    let mut counts: BTreeMap<Signature, i128> = BTreeMap::new();
    counts.insert(la.clone(), 1);
    for _ in (n + 1..=top).rev() {
        let mut next: BTreeMap<Signature, i128> = BTreeMap::new();
        for (sig, c) in counts {
            for down in enumerate_down(&sig) {
                *next.entry(down).or_insert(0) += c;
            }
        }
        counts = next;
    }
    Ok(counts.get(nu).copied().unwrap_or(0))
}

/// Iterated cotransition probability
/// `q(nu, la) = Dim_n(nu) * Dim_{nN}(nu, la) / Dim_N(la)` for `n < N`.
pub fn cotransition_iterated(nu: &Signature, la: &Signature) -> Result<f64> {
    if nu.level() + 1 == la.level() {
        return cotransition(nu, la);
    }
    let chains = chain_count(nu, la)?;
    if chains == 0 {
        return Ok(0.0);
    }
    match (weyl_dim(nu), weyl_dim(la)) {
        (Ok(dn), Ok(dl)) => Ok(dn as f64 * chains as f64 / dl as f64),
        _ => Ok((log_weyl_dim(nu) + (chains as f64).ln() - log_weyl_dim(la)).exp()),
    }
}

/// Result of checking the coherency relation between two adjacent tables.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CoherencyReport {
    pub max_abs_residual: f64,
    pub worst_vertex: Option<Signature>,
    /// Mass defect of the upper table; unseen mass can shift each residual
    /// by at most this amount.
    pub defect_allowance: f64,
    pub tolerance: f64,
    pub passes: bool,
}

/// Checks `P_{N-1}(nu) = sum_la q(nu, la) P_N(la)` over the captured
/// supports. The reported bound incorporates the upper table's mass defect.
///
/// Upper entries whose aggregate probability stays three orders of
/// magnitude below the tolerance are not pushed down: they cannot move any
/// residual by more than that, and wide truncation boxes put almost all of
/// their interlacing edges under such entries.
pub fn verify_coherency(
    pn_minus1: &MeasureTable,
    pn: &MeasureTable,
    tol: f64,
) -> Result<CoherencyReport> {
    if pn_minus1.level + 1 != pn.level {
        return Err(Error::LevelMismatch {
            lo: pn_minus1.level,
            hi: pn.level,
            expected: 1,
        });
    }
    let mut upper: Vec<(&Signature, f64)> = pn
        .masses
        .iter()
        .map(|(la, &lw)| (la, (lw - pn.log_target_total).exp()))
        .collect();
    upper.sort_by(|a, b| a.1.partial_cmp(&b.1).expect("finite probabilities"));
    let skip_budget = tol.max(0.0) * 1e-3;
    let mut skipped = 0.0f64;
    let mut start = 0usize;
    while start < upper.len() && skipped + upper[start].1 <= skip_budget {
        skipped += upper[start].1;
        start += 1;
    }
    // Push the significant part of the upper table down once.
    let mut pushed: BTreeMap<Signature, f64> = BTreeMap::new();
    for &(la, p) in &upper[start..] {
        let log_dim_la = log_weyl_dim(la);
        for nu in enumerate_down(la) {
            let q = (log_weyl_dim(&nu) - log_dim_la).exp();
            *pushed.entry(nu).or_insert(0.0) += q * p;
        }
    }
    let mut max_abs_residual = 0.0f64;
    let mut worst_vertex = None;
    for (nu, &lw) in &pn_minus1.masses {
        let want = (lw - pn_minus1.log_target_total).exp();
        let got = pushed.get(nu).copied().unwrap_or(0.0);
        let r = (want - got).abs();
        if r > max_abs_residual {
            max_abs_residual = r;
            worst_vertex = Some(nu.clone());
        }
    }
    let defect_allowance = pn.defect();
    Ok(CoherencyReport {
        max_abs_residual,
        worst_vertex,
        defect_allowance,
        tolerance: tol,
        passes: max_abs_residual <= tol + defect_allowance,
    })
}

/// A downward path through the graph, stored top level last and prefixed by
/// the empty signature. Serializes as a bare array of signatures.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Path {
    pub vertices: Vec<Signature>,
}

impl Path {
    /// Vertex at a given level (level 0 is the empty signature).
    pub fn at_level(&self, level: usize) -> &Signature {
        &self.vertices[level]
    }

    pub fn top(&self) -> &Signature {
        self.vertices
            .last()
            .expect("paths contain at least the empty signature")
    }

    pub fn is_valid(&self) -> bool {
        self.vertices
            .first()
            .map(|s| s.level() == 0)
            .unwrap_or(false)
            && self
                .vertices
                .windows(2)
                .all(|w| interlaces(&w[0], &w[1]).unwrap_or(false))
    }
}

/// Samples a uniform path from the empty signature to `la`, one cotransition
/// step at a time: the step from level N to N-1 draws `nu` with probability
/// `q(nu, la)`. Conditioned on the endpoint, paths come out uniform.
pub fn sample_path_down<R: Rng + ?Sized>(la: &Signature, rng: &mut R) -> Path {
    let mut vertices = vec![la.clone()];
    let mut current = la.clone();
    while current.level() > 0 {
        let choices = enumerate_down(&current);
        let next = if choices.len() == 1 {
            choices.into_iter().next().unwrap()
        } else {
            // log-domain weights normalized over the down-set
            let logs: Vec<f64> = choices.iter().map(log_weyl_dim).collect();
            let total = crate::numerics::log_sum_exp(&logs).expect("nonempty down-set");
            let u: f64 = rng.random();
            let mut acc = 0.0;
            let mut picked = choices.len() - 1;
            for (i, lw) in logs.iter().enumerate() {
                acc += (lw - total).exp();
                if u < acc {
                    picked = i;
                    break;
                }
            }
            choices.into_iter().nth(picked).unwrap()
        };
        vertices.push(next.clone());
        current = next;
    }
    vertices.reverse();
    Path { vertices }
}
