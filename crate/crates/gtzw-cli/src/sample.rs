//! Sampling commands: JSON-lines output with a self-describing header
//! record, reproducible from the seed via per-record (or per-chain) RNG
//! streams.

use std::path::PathBuf;

use clap::{Args, Subcommand, ValueEnum};
use gtzw::gt_graph::stream_rng;
use gtzw::rmt::{
    haar_unitary, hua_pickrell_log_weight, matrix_to_json, sample_hua_pickrell, HuaPickrellMode,
};
use gtzw::spectral::{embed, SampleMethod, SignatureSampler};
use gtzw::zw_measure::parse_complex;
use gtzw::Signature;

use crate::{log, write_output, OutputFormat, ParamArgs, GIT_DESCRIBE, VERSION};

#[derive(Subcommand)]
pub enum SampleCommand {
    /// Draw signatures from a zw-measure.
    Signatures(SignatureArgs),
    /// Draw signatures and push them through the boundary embedding.
    Embed(SignatureArgs),
    /// Draw weighted unitary matrices from a Hua-Pickrell measure.
    HuaPickrell(HuaPickrellArgs),
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Enumerate,
    Mcmc,
}

#[derive(Args)]
pub struct SignatureArgs {
    #[command(flatten)]
    params: ParamArgs,
    /// level N
    #[arg(long)]
    level: usize,
    /// number of samples
    #[arg(short = 'n', long = "samples")]
    samples: usize,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = Method::Enumerate)]
    method: Method,
    /// captured-mass tolerance (enumerate mode)
    #[arg(long, default_value_t = 1e-8)]
    mass_tol: f64,
    /// chain burn-in (mcmc mode; default 1000 N)
    #[arg(long)]
    burn_in: Option<usize>,
    /// chain thinning (mcmc mode; default N)
    #[arg(long)]
    thinning: Option<usize>,
    /// worker threads; enumerate-mode records do not depend on this
    #[arg(long, default_value_t = 1)]
    workers: usize,
    #[arg(long, value_enum, default_value_t = OutputFormat::Json)]
    format: OutputFormat,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
pub struct HuaPickrellArgs {
    /// matrix dimension N
    #[arg(long = "dim", visible_alias = "N")]
    dim: usize,
    /// parameter s as "re" or "re,im"; requires Re s > -1/2
    #[arg(long)]
    s: String,
    #[arg(short = 'n', long = "samples")]
    samples: usize,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = HpMode::Importance)]
    mode: HpMode,
    /// burn-in of the independence chain (metropolis mode)
    #[arg(long, default_value_t = 500)]
    burn_in: usize,
    /// warn when the effective sample size falls below this fraction
    #[arg(long, default_value_t = 0.1)]
    ess_warn: f64,
    /// worker threads (importance mode; records do not depend on this)
    #[arg(long, default_value_t = 1)]
    workers: usize,
    #[arg(long, value_enum, default_value_t = OutputFormat::Json)]
    format: OutputFormat,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
pub enum HpMode {
    Importance,
    Metropolis,
}

pub fn run(cmd: &SampleCommand) -> Result<(), (u8, String)> {
    match cmd {
        SampleCommand::Signatures(args) => run_signatures(args, false),
        SampleCommand::Embed(args) => run_signatures(args, true),
        SampleCommand::HuaPickrell(args) => run_hua_pickrell(args),
    }
}

/// Draws `count` signatures. Enumerate mode gives record `i` its own RNG
/// stream, so the output is identical for any worker count; MCMC runs one
/// chain per worker and interleaves chain-major.
fn draw_signatures(
    args: &SignatureArgs,
) -> Result<(Vec<Signature>, serde_json::Value), (u8, String)> {
    let params = args.params.parse().map_err(|e| (2, e))?;
    params
        .admissibility()
        .map_err(|r| (2, format!("parameters not admissible: {r}")))?;
    if args.samples == 0 {
        return Err((2, "sample count must be positive".into()));
    }
    let workers = args.workers.max(1);
    let method = match args.method {
        Method::Enumerate => SampleMethod::Enumerate {
            mass_tolerance: args.mass_tol,
        },
        Method::Mcmc => SampleMethod::Mcmc {
            burn_in: args.burn_in,
            thinning: args.thinning,
        },
    };
    let proto =
        SignatureSampler::new(args.level, &params, method).map_err(|e| (2, e.to_string()))?;

    let count = args.samples;
    let mut sigs: Vec<Signature> = vec![Signature::empty(); count];
    match args.method {
        Method::Enumerate => {
            std::thread::scope(|scope| {
                for (w, chunk) in sigs.chunks_mut(count.div_ceil(workers)).enumerate() {
                    let mut sampler = proto.clone();
                    let offset = w * count.div_ceil(workers);
                    let seed = args.seed;
                    scope.spawn(move || {
                        for (j, slot) in chunk.iter_mut().enumerate() {
                            let mut rng = stream_rng(seed, (offset + j) as u64);
                            *slot = sampler.sample(&mut rng);
                        }
                    });
                }
            });
        }
        Method::Mcmc => {
            let per = count.div_ceil(workers);
            std::thread::scope(|scope| {
                for (chain, chunk) in sigs.chunks_mut(per).enumerate() {
                    let mut sampler = proto.clone();
                    let seed = args.seed;
                    scope.spawn(move || {
                        let mut rng = stream_rng(seed, chain as u64);
                        for slot in chunk.iter_mut() {
                            *slot = sampler.sample(&mut rng);
                        }
                    });
                }
            });
        }
    }

    let header = serde_json::json!({
        "type": "header",
        "command": "sample",
        "version": VERSION,
        "git": GIT_DESCRIBE,
        "params": params,
        "level": args.level,
        "seed": args.seed,
        "count": count,
        "method": match args.method { Method::Enumerate => "enumerate", Method::Mcmc => "mcmc" },
        "mass_tolerance": args.mass_tol,
        "workers": workers,
    });
    Ok((sigs, header))
}

fn run_signatures(args: &SignatureArgs, embed_points: bool) -> Result<(), (u8, String)> {
    log(
        "info",
        &format!(
            "sampling {} signatures at level {}",
            args.samples, args.level
        ),
    );
    let (sigs, mut header) = draw_signatures(args)?;
    header["record"] = serde_json::json!(if embed_points {
        "embedded_point"
    } else {
        "signature"
    });

    let mut content = String::new();
    match (args.format, embed_points) {
        (OutputFormat::Json, false) => {
            content.push_str(&format!("{header}\n"));
            for (i, la) in sigs.iter().enumerate() {
                let rec = serde_json::json!({ "type": "signature", "index": i, "value": la });
                content.push_str(&format!("{rec}\n"));
            }
        }
        (OutputFormat::Json, true) => {
            content.push_str(&format!("{header}\n"));
            for (i, la) in sigs.iter().enumerate() {
                let pt = embed(la, args.level).map_err(|e| (2, e.to_string()))?;
                pt.validate_exact().map_err(|e| (2, e.to_string()))?;
                let rec = serde_json::json!({
                    "type": "embedded_point",
                    "index": i,
                    "signature": la,
                    "omega": pt.omega,
                });
                content.push_str(&format!("{rec}\n"));
            }
        }
        (OutputFormat::Csv, false) => {
            content.push_str("index,entries\n");
            for (i, la) in sigs.iter().enumerate() {
                let joined: Vec<String> = la.entries().iter().map(|e| e.to_string()).collect();
                content.push_str(&format!("{i},{}\n", joined.join(" ")));
            }
        }
        (OutputFormat::Csv, true) => {
            content.push_str("index,a1p,a2p,b1p,b2p,a1m,a2m,b1m,b2m,cp,cm\n");
            let coord = |v: &[f64], i: usize| v.get(i).copied().unwrap_or(0.0);
            for (i, la) in sigs.iter().enumerate() {
                let pt = embed(la, args.level).map_err(|e| (2, e.to_string()))?;
                let o = &pt.omega;
                content.push_str(&format!(
                    "{i},{},{},{},{},{},{},{},{},{},{}\n",
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
                ));
            }
        }
    }
    write_output(&args.out, &content).map_err(|e| (2, e.to_string()))
}

fn run_hua_pickrell(args: &HuaPickrellArgs) -> Result<(), (u8, String)> {
    if args.format == OutputFormat::Csv {
        return Err((2, "matrix samples support only JSON output".into()));
    }
    let s = parse_complex(&args.s).map_err(|e| (2, e.to_string()))?;
    if s.re <= -0.5 {
        return Err((2, format!("Re s = {} must exceed -1/2", s.re)));
    }
    if args.samples == 0 {
        return Err((2, "sample count must be positive".into()));
    }
    log(
        "info",
        &format!(
            "sampling {} Hua-Pickrell matrices at N = {}",
            args.samples, args.dim
        ),
    );

    let count = args.samples;
    let workers = args.workers.max(1);
    let (samples, ess, acceptance) = match args.mode {
        HpMode::Importance => {
            // per-record streams: output independent of the worker count
            let mut mats = vec![None; count];
            let mut logws = vec![0.0f64; count];
            std::thread::scope(|scope| {
                let chunk_len = count.div_ceil(workers);
                for (w, (mchunk, lchunk)) in mats
                    .chunks_mut(chunk_len)
                    .zip(logws.chunks_mut(chunk_len))
                    .enumerate()
                {
                    let offset = w * chunk_len;
                    let seed = args.seed;
                    let dim = args.dim;
                    scope.spawn(move || {
                        for (j, (mslot, lslot)) in
                            mchunk.iter_mut().zip(lchunk.iter_mut()).enumerate()
                        {
                            let mut rng = stream_rng(seed, (offset + j) as u64);
                            let u = haar_unitary(dim, &mut rng).expect("haar");
                            *lslot = hua_pickrell_log_weight(&u, s).expect("finite dimension");
                            *mslot = Some(u);
                        }
                    });
                }
            });
            let total = gtzw::numerics::log_sum_exp(&logws).map_err(|e| (2, e.to_string()))?;
            let weights: Vec<f64> = logws.iter().map(|lw| (lw - total).exp()).collect();
            let ess = 1.0 / weights.iter().map(|w| w * w).sum::<f64>();
            let samples: Vec<_> = mats
                .into_iter()
                .map(|m| m.expect("filled by workers"))
                .zip(weights)
                .collect();
            (samples, ess, None)
        }
        HpMode::Metropolis => {
            let mut rng = stream_rng(args.seed, 0);
            let out = sample_hua_pickrell(
                args.dim,
                s,
                count,
                HuaPickrellMode::IndependenceMetropolis {
                    burn_in: args.burn_in,
                },
                &mut rng,
            )
            .map_err(|e| (2, e.to_string()))?;
            (out.samples, out.ess, out.acceptance)
        }
    };

    let ess_threshold = args.ess_warn * count as f64;
    let ess_warning = ess < ess_threshold;
    if ess_warning {
        log(
            "info",
            &format!("effective sample size {ess:.1} below threshold {ess_threshold:.1}"),
        );
    }
    let header = serde_json::json!({
        "type": "header",
        "command": "sample hua-pickrell",
        "version": VERSION,
        "git": GIT_DESCRIBE,
        "dim": args.dim,
        "s": [s.re, s.im],
        "seed": args.seed,
        "count": count,
        "mode": match args.mode { HpMode::Importance => "importance", HpMode::Metropolis => "metropolis" },
        "ess": ess,
        "ess_warning": ess_warning,
        "acceptance": acceptance,
        "workers": workers,
    });
    let mut content = format!("{header}\n");
    for (i, (u, weight)) in samples.iter().enumerate() {
        let rec = serde_json::json!({
            "type": "matrix",
            "index": i,
            "weight": weight,
            "matrix": matrix_to_json(u.matrix()),
        });
        content.push_str(&format!("{rec}\n"));
    }
    write_output(&args.out, &content).map_err(|e| (2, e.to_string()))
}
