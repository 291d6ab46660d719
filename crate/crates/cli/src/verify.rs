use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt::Write as _;

use ocb_core::awgn_info::{mi_bpsk_with_order, mi_monte_carlo_grouped, mi_qpsk_with_order};
use ocb_core::linksim::run_trials;
use ocb_core::modem::{demap_stage1, hard_stage1, hard_stage2, symbol_index};
use ocb_core::rates::{
    check_superposition_inequality, claimed_excess_interval, rate_ocb_exact_with_order, sweep,
    Modulation,
};
use ocb_core::special::q_function;
use ocb_core::{
    mi_monte_carlo, Alphabet, Constellation, LinearCode, LinkConfig, NoiseModel, PointSet1D,
    PointSet2D, RateRow, RxSample, Stage2Input, SweepSpec,
};

use crate::curves::{excess_summary, EXCESS_THRESHOLD};
use crate::error::{CliError, CliResult};
use crate::manifest::{sidecar_path, write_output};
use crate::{Run, VerifyArgs};

const CHECK_SNRS: [f64; 5] = [0.5, 1.0, 2.0, 4.0, 8.0];
const GAP_TABLE_SNRS: [f64; 9] = [0.01, 0.1, 0.3, 1.0, 2.0, 3.0, 10.0, 30.0, 100.0];
const PROPAGATION_SNR: f64 = 2.0;
const MIN_PROPAGATION_EVENTS: u64 = 10_000;
const LINK_BLOCK: usize = 1000;
const ALPHABET_GRID: [f64; 5] = [0.25, 0.5, 1.0, 2.0, 4.0];

#[derive(Clone, Copy, Debug)]
pub(crate) struct Tolerances {
    pub mc_sigmas: f64,
    pub mc_samples: u64,
    pub identity_tol: f64,
    pub propagation_tol: f64,
    pub link_symbols: u64,
    pub seed: u64,
    pub order: usize,
}

#[derive(Clone, Debug)]
pub(crate) struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(name: &'static str, passed: bool, detail: String) -> Self {
        Self {
            name,
            passed,
            detail,
        }
    }

    pub fn line(&self) -> String {
        let tag = if self.passed { "PASS" } else { "FAIL" };
        format!("[{tag}] {}: {}", self.name, self.detail)
    }
}

/// Plain decimal for ordinary magnitudes, scientific otherwise.
fn num(x: f64) -> String {
    if x == 0.0 || (1e-3..1e6).contains(&x.abs()) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

fn max_abs(values: impl Iterator<Item = (f64, f64)>) -> (f64, f64) {
    values.fold((0.0, f64::NAN), |acc, (g, d)| {
        if d.abs() > acc.0 {
            (d.abs(), g)
        } else {
            acc
        }
    })
}

fn identity_check(
    name: &'static str,
    what: &str,
    rows: &[RateRow],
    tol: f64,
    f: impl Fn(&RateRow) -> CliResult<f64>,
) -> CliResult<Check> {
    let diffs = rows
        .iter()
        .map(|r| Ok((r.gamma, f(r)?)))
        .collect::<CliResult<Vec<_>>>()?;
    let (worst, at) = max_abs(diffs.into_iter());
    Ok(Check::new(
        name,
        worst < tol,
        format!(
            "max {what} = {worst:.3e} at gamma {at:.4} over {} points (tol {}, margin {:.3e})",
            rows.len(),
            num(tol),
            tol - worst
        ),
    ))
}

fn fig1_shape(rows: &[RateRow]) -> Check {
    let monotone = rows
        .windows(2)
        .all(|w| w[1].i_bpsk >= w[0].i_bpsk && w[1].i_qpsk >= w[0].i_qpsk);
    let last = rows.last().expect("sweep is nonempty");
    let gauss_slack = rows
        .iter()
        .map(|r| r.c_gauss_complex - r.i_qpsk)
        .fold(f64::INFINITY, f64::min);
    let passed = monotone && last.i_bpsk >= 0.999 && last.i_qpsk >= 1.98 && gauss_slack >= 0.0;
    Check::new(
        "rate curve shape",
        passed,
        format!(
            "monotone {monotone}; at gamma {}: I_b = {:.7} (>= 0.999), I_q = {:.7} (>= 1.98); min(c_gauss - I_q) = {gauss_slack:.4e}",
            last.gamma, last.i_bpsk, last.i_qpsk
        ),
    )
}

fn subadditivity() -> CliResult<Check> {
    let mut strict = 0usize;
    let mut total = 0usize;
    let mut min_gap = f64::INFINITY;
    let mut zero_dev: f64 = 0.0;
    for m in [Modulation::Bpsk, Modulation::Qpsk] {
        for &e1 in &ALPHABET_GRID {
            for &e2 in &ALPHABET_GRID {
                let c = check_superposition_inequality(e1, e2, 1.0, m)?;
                total += 1;
                strict += usize::from(c.holds);
                min_gap = min_gap.min(c.rhs - c.lhs);
            }
            let z = check_superposition_inequality(e1, 0.0, 1.0, m)?;
            zero_dev = zero_dev.max((z.lhs - z.rhs).abs());
        }
    }
    Ok(Check::new(
        "superposition subadditivity",
        strict == total && zero_dev <= 1e-9,
        format!(
            "strict at {strict}/{total} BPSK and QPSK energy pairs, min rhs - lhs = {min_gap:.4e}; max |lhs - rhs| with E2 = 0: {zero_dev:.1e} (tol 1e-9)"
        ),
    ))
}

fn backend_agreement(t: &Tolerances) -> CliResult<Check> {
    let unit = NoiseModel::new(1.0)?;
    let mut worst = (0.0, String::new());
    let mut count = 0;
    for &g in &CHECK_SNRS {
        let cons = Constellation::with_energy(g)?;
        let cases: [(&str, f64, Alphabet, Vec<usize>); 3] = [
            (
                "BPSK",
                mi_bpsk_with_order(g, t.order)?,
                PointSet1D::bpsk(g.sqrt()).into(),
                vec![0, 1],
            ),
            (
                "QPSK",
                mi_qpsk_with_order(g, t.order)?,
                PointSet2D::qpsk(g).into(),
                vec![0, 1, 2, 3],
            ),
            (
                "OCB axis grouping",
                rate_ocb_exact_with_order(g, t.order)?.i_v1,
                cons.point_set().into(),
                vec![0, 1, 0, 1],
            ),
        ];
        for (name, quad, alphabet, labels) in cases {
            let mc = if labels.iter().enumerate().all(|(i, &l)| i == l) {
                mi_monte_carlo(&alphabet, &unit, t.mc_samples, t.seed)?
            } else {
                mi_monte_carlo_grouped(&alphabet, &labels, &unit, t.mc_samples, t.seed)?
            };
            let z = if mc.stderr > 0.0 {
                (quad - mc.bits).abs() / mc.stderr
            } else if quad == mc.bits {
                0.0
            } else {
                f64::INFINITY
            };
            count += 1;
            if z >= worst.0 {
                worst = (z, format!("{name} at gamma {g}"));
            }
        }
    }
    let (z, at) = worst;
    Ok(Check::new(
        "quadrature vs Monte Carlo",
        z <= t.mc_sigmas,
        format!(
            "worst |quad - MC| = {z:.3} standard errors ({at}) over {count} comparisons, {} samples each (limit {}, margin {:.3})",
            t.mc_samples,
            num(t.mc_sigmas),
            t.mc_sigmas - z
        ),
    ))
}

fn geometry() -> CliResult<Check> {
    let mut worst_energy: f64 = 0.0;
    let mut ratio = f64::INFINITY;
    for alpha in [0.3, FRAC_1_SQRT_2, 1.7] {
        let cons = Constellation::new(alpha)?;
        let es = 2.0 * alpha * alpha;
        for p in cons.points() {
            worst_energy = worst_energy.max((p.energy() - es).abs() / es);
        }
        let qpsk = PointSet2D::qpsk(es);
        let q = qpsk.points();
        let qpsk_dmin = ((q[0].0 - q[1].0).powi(2) + (q[0].1 - q[1].1).powi(2)).sqrt();
        ratio = ratio.min(cons.decoupled_distance() / qpsk_dmin);
    }
    let passed = worst_energy <= 1e-12 && (ratio - 2f64.sqrt()).abs() <= 1e-12;
    Ok(Check::new(
        "constellation geometry",
        passed,
        format!(
            "max relative |E - 2 alpha^2| = {worst_energy:.1e}; decoupled BPSK distance / QPSK minimum distance = {ratio:.12} (sqrt 2)"
        ),
    ))
}

fn demapper_symmetry() -> CliResult<Check> {
    let cons = Constellation::new(FRAC_1_SQRT_2)?;
    let noise = NoiseModel::new(0.5)?;
    let points = cons.points();
    let mut worst_llr: f64 = 0.0;
    let mut mismatches = 0;
    let mut tested = 0;
    for i in -20..=20 {
        for j in -20..=20 {
            let y = RxSample::new(0.1 * i as f64 + 0.013, 0.1 * j as f64 - 0.007);
            let l = demap_stage1(&y, &cons, &noise);
            let r = demap_stage1(&y.rotate90(), &cons, &noise);
            worst_llr = worst_llr.max((l + r).abs() / (1.0 + l.abs()));

            let mut d: Vec<(f64, usize)> = points.iter().map(|p| p.distance(&y)).zip(0..).collect();
            d.sort_by(|a, b| a.0.total_cmp(&b.0));
            if d[1].0 - d[0].0 < 1e-9 {
                continue;
            }
            tested += 1;
            let v1 = hard_stage1(&y);
            let v2 = hard_stage2(&y, v1);
            mismatches += usize::from(symbol_index(v1, v2) != d[0].1);
        }
    }
    Ok(Check::new(
        "demapper symmetry",
        worst_llr <= 1e-12 && mismatches == 0,
        format!(
            "max relative |L1(y) + L1(rot90 y)| = {worst_llr:.1e}; hard decisions differ from nearest point at {mismatches}/{tested} grid samples"
        ),
    ))
}

fn uncoded_link(gamma: f64, input: Stage2Input, t: &Tolerances) -> CliResult<ocb_core::SimStats> {
    let code = LinearCode::identity(LINK_BLOCK)?;
    let blocks = t.link_symbols.div_ceil(LINK_BLOCK as u64).max(1);
    let cfg = LinkConfig::at_snr(code.clone(), code, gamma)?
        .with_trials(blocks)
        .with_seed(t.seed)
        .with_stage2_input(input)
        .with_shards(8);
    Ok(run_trials(&cfg)?)
}

fn genie_link(t: &Tolerances) -> CliResult<Check> {
    let mut worst = (0.0, 0.0);
    for &g in &CHECK_SNRS {
        let stats = uncoded_link(g, Stage2Input::Genie, t)?;
        let (alpha, sigma) = (FRAC_1_SQRT_2, (1.0 / g).sqrt());
        let p = q_function(2f64.sqrt() * alpha / sigma);
        let n = stats.ber2.trials as f64;
        let se = (p * (1.0 - p) / n).sqrt();
        let z = (stats.ber2.rate().unwrap_or(0.0) - p).abs() / se;
        if z >= worst.0 {
            worst = (z, g);
        }
    }
    Ok(Check::new(
        "genie stage-2 BER vs Q(sqrt(2) alpha / sigma)",
        worst.0 <= t.mc_sigmas,
        format!(
            "worst deviation {:.3} standard errors at gamma {} over {} SNRs (limit {}, margin {:.3})",
            worst.0,
            worst.1,
            CHECK_SNRS.len(),
            num(t.mc_sigmas),
            t.mc_sigmas - worst.0
        ),
    ))
}

fn error_propagation(t: &Tolerances) -> CliResult<Check> {
    let stats = uncoded_link(PROPAGATION_SNR, Stage2Input::RawHard, t)?;
    let c = stats.cond_ber2_given_v1_err;
    let dev = c.rate().map(|r| (r - 0.5).abs());
    let passed = c.trials >= MIN_PROPAGATION_EVENTS && dev.is_some_and(|d| d <= t.propagation_tol);
    let rate = c.rate().map_or("undefined".into(), |r| format!("{r:.4}"));
    Ok(Check::new(
        "error propagation",
        passed,
        format!(
            "P(stage-2 error | stage-1 error) = {rate} over {} events at gamma {PROPAGATION_SNR} (need >= {MIN_PROPAGATION_EVENTS}; tol 0.5 +/- {}, margin {:.4})",
            c.trials,
            num(t.propagation_tol),
            t.propagation_tol - dev.unwrap_or(f64::INFINITY)
        ),
    ))
}

fn bits_of(value: usize, len: usize) -> Vec<u8> {
    (0..len).map(|i| ((value >> i) & 1) as u8).collect()
}

fn llr_of(word: &[u8]) -> Vec<f64> {
    word.iter()
        .map(|&b| if b == 0 { 4.0 } else { -4.0 })
        .collect()
}

fn codec_exactness() -> CliResult<Check> {
    let hamming = LinearCode::hamming74();
    let mut corrected = 0;
    for msg in 0..16 {
        let source = bits_of(msg, 4);
        let word = hamming.encode(&source)?;
        for flip in 0..7 {
            let mut llr = llr_of(&word);
            llr[flip] = -llr[flip];
            corrected += usize::from(hamming.decode(&llr)? == source);
        }
    }
    let mut codes = vec![hamming, LinearCode::identity(12)?];
    for n in [1, 3, 5, 8] {
        codes.push(LinearCode::repetition(n)?);
    }
    let mut round_trips = 0usize;
    let mut words = 0usize;
    for code in &codes {
        for msg in 0..1usize << code.k() {
            let source = bits_of(msg, code.k());
            let word = code.encode(&source)?;
            words += 1;
            round_trips += usize::from(
                code.decode(&llr_of(&word))? == source && code.source_of(&word) == source,
            );
        }
    }
    Ok(Check::new(
        "codec exactness",
        corrected == 112 && round_trips == words,
        format!(
            "Hamming(7,4) corrects {corrected}/112 single flips; encode/decode identity on {round_trips}/{words} source words of {} codes",
            codes.len()
        ),
    ))
}

fn gap_table(order: usize) -> CliResult<String> {
    let mut s = String::from("claimed vs exact first-stream rate (bits per symbol):\n");
    let _ = writeln!(
        s,
        "{:>8}  {:>12}  {:>12}  {:>12}  {:>12}  {:>12}",
        "gamma", "R_c1 claimed", "I(V1;Y)", "gap", "R_J claimed", "I_q"
    );
    for &g in &GAP_TABLE_SNRS {
        let r = RateRow::at(g, order)?;
        let _ = writeln!(
            s,
            "{g:>8}  {:>12.8}  {:>12.8}  {:>12.8}  {:>12.8}  {:>12.8}",
            r.r_c1_claimed,
            r.i_v1_exact,
            r.c1_gap(),
            r.r_j_claimed,
            r.i_qpsk
        );
    }
    Ok(s)
}

pub(crate) fn checks(t: &Tolerances) -> CliResult<(Vec<Check>, String)> {
    let spec = SweepSpec {
        order: t.order,
        ..SweepSpec::default()
    };
    let rows = sweep(&spec)?;
    let interval = claimed_excess_interval(&spec, EXCESS_THRESHOLD)?;
    let order = t.order;
    let checks = vec![
        fig1_shape(&rows),
        identity_check(
            "QPSK decomposition",
            "|I_q(g) - 2 I_b(g/2)|",
            &rows,
            t.identity_tol,
            |r| Ok(r.i_qpsk - 2.0 * mi_bpsk_with_order(r.gamma / 2.0, order)?),
        )?,
        identity_check(
            "chain rule",
            "|I(V1;Y) + I(V2;Y|V1) - I_q|",
            &rows,
            t.identity_tol,
            |r| Ok(r.sum_exact - r.i_qpsk),
        )?,
        Check::new(
            "claimed excess over QPSK",
            interval.is_some(),
            excess_summary(interval.as_ref()),
        ),
        subadditivity()?,
        backend_agreement(t)?,
        geometry()?,
        demapper_symmetry()?,
        genie_link(t)?,
        error_propagation(t)?,
        codec_exactness()?,
    ];
    Ok((checks, gap_table(order)?))
}

pub(crate) fn run(args: &VerifyArgs, mut run: Run) -> CliResult<()> {
    let s = &mut run.settings;
    let t = Tolerances {
        mc_sigmas: s.resolve("mc-sigmas", args.mc_sigmas, 3.0)?,
        mc_samples: s.resolve("mc-samples", args.mc_samples, 1_000_000)?,
        identity_tol: s.resolve("identity-tol", args.identity_tol, 1e-6)?,
        propagation_tol: s.resolve("propagation-tol", args.propagation_tol, 0.02)?,
        link_symbols: s.resolve("link-symbols", args.link_symbols, 200_000)?,
        seed: run.common.seed,
        order: run.common.quad_order,
    };
    let (mut manifest, common, started) = run.manifest("verify")?;
    // Fail on a bad order before the slower checks run.
    mi_bpsk_with_order(1.0, t.order)?;

    let (checks, table) = checks(&t)?;
    let failed = checks.iter().filter(|c| !c.passed).count();
    let mut report = String::new();
    for c in &checks {
        let _ = writeln!(report, "{}", c.line());
    }
    let _ = writeln!(
        report,
        "{} of {} checks passed\n",
        checks.len() - failed,
        checks.len()
    );
    report.push_str(&table);
    print!("{report}");

    if let Some(out) = &common.out {
        manifest.outputs.push(write_output(out, report.as_bytes())?);
        manifest.wall_clock = started.elapsed();
        manifest.write(&sidecar_path(out))?;
    }
    if failed > 0 {
        return Err(CliError::VerifyFailed {
            failed,
            total: checks.len(),
        });
    }
    Ok(())
}
