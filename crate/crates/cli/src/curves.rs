use std::fmt::Write as _;
use std::path::Path;

use ocb_core::rates::{claimed_excess_interval, sweep, ExcessInterval};
use ocb_core::{RateRow, Spacing, SweepSpec};

use crate::error::CliResult;
use crate::manifest::{sidecar_path, write_output};
use crate::svg::{self, Panel, Series};
use crate::{CurvesArgs, Run};

/// Smallest `R_J − I_q` reported as an excess, at the quadrature accuracy.
pub(crate) const EXCESS_THRESHOLD: f64 = 1e-6;

pub(crate) fn csv(rows: &[RateRow]) -> String {
    let mut s = String::from(RateRow::CSV_HEADER);
    s.push('\n');
    for row in rows {
        let fields: Vec<String> = row.csv_fields().iter().map(f64::to_string).collect();
        s.push_str(&fields.join(","));
        s.push('\n');
    }
    s
}

fn plot(rows: &[RateRow], log_x: bool) -> String {
    let col = |f: fn(&RateRow) -> f64| rows.iter().map(|r| (r.gamma, f(r))).collect::<Vec<_>>();
    let x_label = "γ = Es/σ² (linear)";
    let panels = [
        Panel {
            title: "Rates of BPSK, QPSK and Gaussian inputs".into(),
            x_label: x_label.into(),
            y_label: "bits per symbol".into(),
            log_x,
            series: vec![
                Series::new("BPSK I_b(γ)", col(|r| r.i_bpsk)),
                Series::new("QPSK I_q(γ)", col(|r| r.i_qpsk)),
                Series::new("Gaussian log2(1+γ/2)", col(|r| r.c_gauss_complex)),
            ],
        },
        Panel {
            title: "OCB: claimed rates and exact split".into(),
            x_label: x_label.into(),
            y_label: "bits per symbol".into(),
            log_x,
            series: vec![
                Series::new("claimed R_J = R_c1 + R_c2", col(|r| r.r_j_claimed)),
                Series::new("QPSK I_q = I(V1;Y) + I(V2;Y|V1)", col(|r| r.i_qpsk)),
                Series::new("BPSK I_b = R_c2", col(|r| r.r_c2)),
                Series::new("claimed R_c1 = I_q/2", col(|r| r.r_c1_claimed)).dashed(),
                Series::new("exact I(V1;Y)", col(|r| r.i_v1_exact)).dashed(),
            ],
        },
    ];
    svg::render(&panels)
}

pub(crate) fn excess_summary(interval: Option<&ExcessInterval>) -> String {
    match interval {
        Some(e) => format!(
            "claimed R_J exceeds I_q by more than {:e} for gamma in [{:.6}, {:.6}]; peak gap {:.6} bits at gamma {:.6}",
            e.threshold, e.lower, e.upper, e.peak_gap, e.peak_gamma
        ),
        None => format!("claimed R_J never exceeds I_q by more than {EXCESS_THRESHOLD:e} on this grid"),
    }
}

pub(crate) fn run(args: &CurvesArgs, mut run: Run) -> CliResult<()> {
    let d = SweepSpec::default();
    let s = &mut run.settings;
    let spec = SweepSpec {
        gamma_min: s.resolve("gamma-min", args.gamma_min, d.gamma_min)?,
        gamma_max: s.resolve("gamma-max", args.gamma_max, d.gamma_max)?,
        count: s.resolve("points", args.points, d.count)?,
        spacing: s.resolve("spacing", args.spacing, d.spacing)?,
        order: run.common.quad_order,
    };
    let svg_path = s.resolve_opt("svg", args.svg.clone())?;
    let (mut manifest, common, started) = run.manifest("curves")?;
    let out = common.out.expect("curves has a default output");

    let rows = sweep(&spec)?;
    let interval = claimed_excess_interval(&spec, EXCESS_THRESHOLD)?;

    manifest
        .outputs
        .push(write_output(&out, csv(&rows).as_bytes())?);
    if let Some(path) = &svg_path {
        let svg = plot(&rows, spec.spacing == Spacing::Log);
        manifest
            .outputs
            .push(write_output(Path::new(path), svg.as_bytes())?);
    }
    manifest.wall_clock = started.elapsed();
    manifest.write(&sidecar_path(&out))?;

    let mut report = format!("wrote {} rows to {}\n", rows.len(), out.display());
    let _ = writeln!(report, "{}", excess_summary(interval.as_ref()));
    print!("{report}");
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_has_header_and_one_line_per_row() {
        let rows = [RateRow::at(1.0, 32).unwrap(), RateRow::at(2.0, 32).unwrap()];
        let text = csv(&rows);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 3);
        assert_eq!(lines[0], RateRow::CSV_HEADER);
        let back: Vec<f64> = lines[2].split(',').map(|f| f.parse().unwrap()).collect();
        assert_eq!(back, rows[1].csv_fields());
    }
}
