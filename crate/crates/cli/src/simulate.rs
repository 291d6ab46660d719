use std::fmt::Write as _;
use std::path::Path;

use ocb_core::linksim::{run_trials, Proportion};
use ocb_core::{LinearCode, LinkConfig, SimStats, Stage2Input};

use crate::error::{CliError, CliResult};
use crate::manifest::{sha256_hex, sidecar_path, write_output};
use crate::{Run, SimulateArgs, ValueList};

const DEFAULT_CODE: &str = "hamming74";
const DEFAULT_GAMMAS: [f64; 5] = [0.5, 1.0, 2.0, 4.0, 8.0];
const DEFAULT_TRIALS: u64 = 1000;
const DEFAULT_SHARDS: usize = 8;

/// Proportions in column order, each as `<name>_errors,<name>_trials,<name>,<name>_ci95`.
const STATS: [&str; 6] = ["ber1", "ber2", "fer1", "fer2", "v1_ser", "cond_ber2"];

fn proportions(s: &SimStats) -> [Proportion; 6] {
    [
        s.ber1,
        s.ber2,
        s.fer1,
        s.fer2,
        s.v1_symbol_errors,
        s.cond_ber2_given_v1_err,
    ]
}

pub(crate) fn header() -> String {
    let mut h = String::from("code1,code2,gamma,alpha,sigma2,stage2,trials,seed");
    for name in STATS {
        let _ = write!(h, ",{name}_errors,{name}_trials,{name},{name}_ci95");
    }
    h
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// A code from its spec, reading `file:PATH` generator files.
fn load_code(spec: &str, inputs: &mut Vec<(String, String)>) -> CliResult<LinearCode> {
    match spec.strip_prefix("file:") {
        Some(path) => {
            let bytes = std::fs::read(path).map_err(|e| CliError::io(Path::new(path), e))?;
            let text = String::from_utf8(bytes)
                .map_err(|_| CliError::Config(format!("{path}: generator file is not UTF-8")))?;
            inputs.push((path.to_string(), sha256_hex(text.as_bytes())));
            Ok(LinearCode::from_text(path, &text)?)
        }
        None => Ok(LinearCode::by_name(spec)?),
    }
}

fn pair_up(c1: &[String], c2: &[String]) -> CliResult<Vec<(String, String)>> {
    match (c1.len(), c2.len()) {
        (a, b) if a == b => Ok(c1.iter().cloned().zip(c2.iter().cloned()).collect()),
        (1, _) => Ok(c2.iter().map(|b| (c1[0].clone(), b.clone())).collect()),
        (_, 1) => Ok(c1.iter().map(|a| (a.clone(), c2[0].clone())).collect()),
        (a, b) => Err(CliError::Config(format!(
            "{a} stream-1 codes cannot be paired with {b} stream-2 codes"
        ))),
    }
}

pub(crate) fn run(args: &SimulateArgs, mut run: Run) -> CliResult<()> {
    let s = &mut run.settings;
    let default_code = ValueList(vec![DEFAULT_CODE.to_string()]);
    let code1 = s.resolve("code1", args.code1.clone(), default_code.clone())?;
    let code2 = s.resolve("code2", args.code2.clone(), default_code)?;
    let gammas = s.resolve(
        "gamma",
        args.gamma.clone(),
        ValueList(DEFAULT_GAMMAS.to_vec()),
    )?;
    let alpha = s.resolve("alpha", args.alpha, std::f64::consts::FRAC_1_SQRT_2)?;
    let trials = s.resolve("trials", args.trials, DEFAULT_TRIALS)?;
    let stage2 = s.resolve("stage2", args.stage2, Stage2Input::Reconstructed)?;
    let shards = s.resolve("shards", args.shards, DEFAULT_SHARDS)?;
    let (mut manifest, common, started) = run.manifest("simulate")?;
    let out = common.out.expect("simulate has a default output");

    let mut configs = Vec::new();
    for (spec1, spec2) in pair_up(&code1.0, &code2.0)? {
        let c1 = load_code(&spec1, &mut manifest.inputs)?;
        let c2 = load_code(&spec2, &mut manifest.inputs)?;
        for &gamma in &gammas.0 {
            if !(gamma > 0.0 && gamma.is_finite()) {
                return Err(CliError::Config(format!(
                    "gamma must be positive and finite, got {gamma}"
                )));
            }
            let sigma2 = 2.0 * alpha * alpha / gamma;
            let cfg = LinkConfig::new(c1.clone(), c2.clone(), alpha, sigma2)?
                .with_trials(trials)
                .with_seed(common.seed)
                .with_stage2_input(stage2)
                .with_shards(shards);
            configs.push((spec1.clone(), spec2.clone(), gamma, cfg));
        }
    }

    let mut csv = header();
    csv.push('\n');
    for (spec1, spec2, gamma, cfg) in &configs {
        let stats = run_trials(cfg)?;
        let _ = write!(
            csv,
            "{spec1},{spec2},{gamma},{},{},{},{},{}",
            cfg.alpha, cfg.sigma2, cfg.stage2_input, cfg.trials, cfg.seed
        );
        for p in proportions(&stats) {
            let _ = write!(
                csv,
                ",{},{},{},{}",
                p.errors,
                p.trials,
                opt(p.rate()),
                opt(p.ci95())
            );
        }
        csv.push('\n');
    }

    manifest.outputs.push(write_output(&out, csv.as_bytes())?);
    manifest.wall_clock = started.elapsed();
    manifest.write(&sidecar_path(&out))?;
    println!("wrote {} rows to {}", configs.len(), out.display());
    Ok(())
}
