//! The four simulation commands. Each returns its files in memory; nothing
//! touches the disk until every computation has succeeded.

use std::path::{Path, PathBuf};

use magrep_core::dynamics::{
    concurrence_trace, default_trace_window, generate_bell_pair_with, LindbladParams, CAVITY, MAGNON,
};
use magrep_core::network::{simulate_chain_with, sweep, HopRecord, SweepAxis, SweepRow, USABLE_FIDELITY};
use magrep_core::qcore::{bell_state_on, concurrence, fidelity, BellKind, ComplexMatrix, DensityMatrix, C64};
use magrep_core::swap::{two_stage_batch, SwapResult};
use magrep_core::Execution;

use crate::config::settings_to_config;
use crate::output::{fmt_sig, heatmap, line_chart, CsvTable, Series};
use crate::{CliError, Command, RunConfig};

/// A file to be written into the output directory.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Artifact {
    pub name: String,
    pub contents: String,
}

impl Artifact {
    fn new(name: &str, contents: String) -> Self {
        Self { name: name.to_string(), contents }
    }
}

pub fn run(cfg: &RunConfig) -> Result<Vec<Artifact>, CliError> {
    cfg.validate()?;
    let mut files = match cfg.command {
        Command::Pair => pair(cfg)?,
        Command::Swap => swap(cfg)?,
        Command::Chain => chain(cfg)?,
        Command::Sweep => sweep_cmd(cfg)?,
    };
    let record = format!("# magrep {}\n{}", cfg.command.name(), settings_to_config(&cfg.settings));
    files.push(Artifact::new("run.cfg", record));
    Ok(files)
}

pub fn write_artifacts(dir: &Path, files: &[Artifact]) -> Result<Vec<PathBuf>, CliError> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    files
        .iter()
        .map(|f| {
            let path = dir.join(&f.name);
            std::fs::write(&path, &f.contents).map_err(|e| CliError::io(&path, e))?;
            Ok(path)
        })
        .collect()
}

fn pair_params(cfg: &RunConfig) -> Result<LindbladParams, CliError> {
    let s = &cfg.settings;
    let p = if s.ideal { s.lindblad.ideal() } else { s.lindblad.clone() };
    if p.dim_c != 2 || p.dim_m != 2 {
        return Err(CliError::Config(format!(
            "pair outputs need two-level modes (dim_c = {}, dim_m = {})",
            p.dim_c, p.dim_m
        )));
    }
    Ok(p)
}

fn ket(label: &str) -> String {
    format!("|{label}>")
}

fn pair(cfg: &RunConfig) -> Result<Vec<Artifact>, CliError> {
    let s = &cfg.settings;
    let p = pair_params(cfg)?;
    let window = s.t_final.unwrap_or_else(|| default_trace_window(&p));
    let trace = concurrence_trace(&p, window, s.samples, s.model)?;
    let snapshot = generate_bell_pair_with(&p, s.model)?;

    let mut out = Vec::new();
    let mut series = Vec::new();
    if cfg.csv {
        let mut t = CsvTable::new(&["t_ns", "concurrence", "pop_00", "pop_01", "pop_10", "pop_11"]);
        for ((time, c), pops) in trace.times.iter().zip(&trace.concurrences).zip(&trace.populations) {
            let mut row = vec![fmt_sig(time * 1e9), fmt_sig(c.unwrap_or(0.0))];
            row.extend(pops.iter().map(|&x| fmt_sig(x)));
            t.push(row);
        }
        out.push(Artifact::new("pair_trace.csv", t.render()));
    }

    let space = snapshot.state.space();
    let n = space.total_dim();
    let labels: Vec<String> = (0..n).map(|i| ket(&space.basis_label(i))).collect();
    let m = snapshot.state.matrix();
    if cfg.csv {
        let mut t = CsvTable::new(&["row_label", "col_label", "re", "im", "abs"]);
        for r in 0..n {
            for c in 0..n {
                let z = m.get(r, c);
                t.push(vec![labels[r].clone(), labels[c].clone(), fmt_sig(z.re), fmt_sig(z.im), fmt_sig(z.norm())]);
            }
        }
        out.push(Artifact::new("pair_dm.csv", t.render()));
    }
    if cfg.svg {
        series.push(Series {
            label: "concurrence".into(),
            points: trace.times.iter().zip(&trace.concurrences).map(|(t, c)| (t * 1e9, c.unwrap_or(0.0))).collect(),
            color: "black",
            dashed: false,
        });
        out.push(Artifact::new(
            "pair_concurrence.svg",
            line_chart("Magnon-photon concurrence", "t (ns)", "concurrence", &series, Some((0.0, 1.0))),
        ));
        let mags: Vec<Vec<f64>> = (0..n).map(|r| (0..n).map(|c| m.get(r, c).norm()).collect()).collect();
        out.push(Artifact::new(
            "pair_dm.svg",
            heatmap(&format!("|rho| at t = pi/(4 g), {MAGNON}{CAVITY} order"), &labels, &mags),
        ));
    }
    Ok(out)
}

/// Rotates `(|01> - i|10>)/sqrt(2)` into the singlet with a local phase on
/// the magnon.
fn align_to_singlet(pair: &DensityMatrix) -> Result<DensityMatrix, CliError> {
    let phase =
        ComplexMatrix::new(2, 2, vec![C64::new(1.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, -1.0)])
            .expect("2x2");
    Ok(pair.apply_local(MAGNON, &phase)?)
}

fn swap(cfg: &RunConfig) -> Result<Vec<Artifact>, CliError> {
    let s = &cfg.settings;
    let p = pair_params(cfg)?;
    let pair = align_to_singlet(&generate_bell_pair_with(&p, s.model)?.state)?;
    let report =
        two_stage_batch(&pair, s.noise.q_swap, &[s.seed], Execution::Sequential)?.pop().expect("one seed, one report");

    let describe = |stage: usize, measured: &str, r: &SwapResult| -> Result<Vec<String>, CliError> {
        let labels = r.post_state.space().labels();
        let singlet = bell_state_on(BellKind::PsiMinus, labels[0], labels[1])?;
        Ok(vec![
            stage.to_string(),
            measured.to_string(),
            r.outcome.kind.name().to_string(),
            fmt_sig(r.probability),
            labels.join(":"),
            fmt_sig(fidelity(&r.post_state, &singlet)?),
            fmt_sig(concurrence(&r.post_state)?),
        ])
    };
    let mut out = Vec::new();
    if cfg.csv {
        let mut t = CsvTable::new(&["stage", "measured", "outcome", "probability", "pair", "fidelity", "concurrence"]);
        t.push(describe(1, "c1:c2", &report.first_stage[0])?);
        t.push(describe(1, "c3:c4", &report.first_stage[1])?);
        t.push(describe(2, "c2:c3", &report.second_stage)?);
        out.push(Artifact::new("swap.csv", t.render()));
    }
    if cfg.svg {
        let st = &report.end_to_end;
        let n = st.dim();
        let labels: Vec<String> = (0..n).map(|i| ket(&st.space().basis_label(i))).collect();
        let mags: Vec<Vec<f64>> = (0..n).map(|r| (0..n).map(|c| st.matrix().get(r, c).norm()).collect()).collect();
        out.push(Artifact::new("swap_dm.svg", heatmap("|rho| of (m1, m4) after two-stage swapping", &labels, &mags)));
    }
    Ok(out)
}

fn hop_cells(h: &HopRecord) -> Vec<String> {
    vec![
        h.hop.to_string(),
        fmt_sig(h.fidelity),
        fmt_sig(h.concurrence),
        fmt_sig(h.p_hop),
        fmt_sig(h.p_cumulative),
        h.usable.to_string(),
    ]
}

const CHAIN_COLUMNS: [&str; 6] = ["hop", "fidelity", "concurrence", "p_hop", "p_cumulative", "usable"];

fn chain(cfg: &RunConfig) -> Result<Vec<Artifact>, CliError> {
    let s = &cfg.settings;
    let report = simulate_chain_with(&s.scenario, s.hops, &s.noise, s.pclick_override)?;
    let mut out = Vec::new();
    if cfg.csv {
        let mut t = CsvTable::new(&CHAIN_COLUMNS);
        for h in &report.hops {
            t.push(hop_cells(h));
        }
        out.push(Artifact::new("chain.csv", t.render()));
    }
    if cfg.svg {
        let xs: Vec<f64> = report.hops.iter().map(|h| h.hop as f64).collect();
        let series = [
            Series {
                label: "fidelity".into(),
                points: report.hops.iter().map(|h| (h.hop as f64, h.fidelity)).collect(),
                color: "#1f4e9c",
                dashed: false,
            },
            Series {
                label: "threshold 0.7".into(),
                points: vec![(xs[0], USABLE_FIDELITY), (*xs.last().expect("non-empty"), USABLE_FIDELITY)],
                color: "#b22222",
                dashed: true,
            },
            Series {
                label: "cumulative success".into(),
                points: report.hops.iter().map(|h| (h.hop as f64, h.p_cumulative)).collect(),
                color: "#2e7d32",
                dashed: true,
            },
        ];
        out.push(Artifact::new(
            "chain.svg",
            line_chart(&format!("Repeater chain, {}", s.scenario.name), "hop", "value", &series, Some((0.0, 1.0))),
        ));
    }
    Ok(out)
}

fn sweep_cmd(cfg: &RunConfig) -> Result<Vec<Artifact>, CliError> {
    let s = &cfg.settings;
    let axis = s.sweep_axis.expect("validated");
    let rows = sweep(&s.scenario, axis, &s.sweep_values, s.hops, &s.noise, s.pclick_override, Execution::default())?;
    let mut out = Vec::new();
    if cfg.csv {
        let mut header = vec![axis.name()];
        header.extend(CHAIN_COLUMNS);
        header.push("p_click");
        let mut t = CsvTable::new(&header);
        for r in &rows {
            let value = match axis {
                SweepAxis::Mux | SweepAxis::Hops => format!("{}", r.value as u64),
                SweepAxis::Conv | SweepAxis::Length => fmt_sig(r.value),
            };
            let mut cells = vec![value];
            cells.extend(hop_cells(&r.record));
            cells.push(fmt_sig(r.record.p_click));
            t.push(cells);
        }
        out.push(Artifact::new("sweep.csv", t.render()));
    }
    if cfg.svg {
        let mut last: Vec<&SweepRow> = Vec::new();
        for r in &rows {
            match last.last_mut() {
                Some(prev) if prev.value == r.value => *prev = r,
                _ => last.push(r),
            }
        }
        let series = [
            Series {
                label: "p_hop".into(),
                points: last.iter().map(|r| (r.value, r.record.p_hop)).collect(),
                color: "#1f4e9c",
                dashed: false,
            },
            Series {
                label: "p_cumulative (last hop)".into(),
                points: last.iter().map(|r| (r.value, r.record.p_cumulative)).collect(),
                color: "#2e7d32",
                dashed: true,
            },
            Series {
                label: "fidelity (last hop)".into(),
                points: last.iter().map(|r| (r.value, r.record.fidelity)).collect(),
                color: "#b22222",
                dashed: false,
            },
        ];
        out.push(Artifact::new(
            "sweep.svg",
            line_chart(
                &format!("Sweep over {axis}, {}", s.scenario.name),
                axis.name(),
                "value",
                &series,
                Some((0.0, 1.0)),
            ),
        ));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Settings;

    fn cfg(command: Command) -> RunConfig {
        RunConfig::new(command, Settings::default(), "unused")
    }

    fn file<'a>(files: &'a [Artifact], name: &str) -> &'a str {
        &files.iter().find(|f| f.name == name).unwrap_or_else(|| panic!("{name} missing")).contents
    }

    #[test]
    fn chain_csv_shape() {
        let files = run(&cfg(Command::Chain)).unwrap();
        let csv = file(&files, "chain.csv");
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "hop,fidelity,concurrence,p_hop,p_cumulative,usable");
        assert_eq!(lines.len(), 5);
        assert!(lines[1].starts_with("1,0.955000000,"));
        assert!(file(&files, "run.cfg").starts_with("# magrep chain\n"));
    }

    #[test]
    fn sweep_hops_matches_chain_row() {
        let mut c = cfg(Command::Sweep);
        c.settings.sweep_axis = Some(SweepAxis::Hops);
        c.settings.sweep_values = vec![1.0];
        let sweep_files = run(&c).unwrap();
        let chain_files = run(&cfg(Command::Chain)).unwrap();
        let sweep_row = file(&sweep_files, "sweep.csv").lines().nth(1).unwrap().to_string();
        let chain_row = file(&chain_files, "chain.csv").lines().nth(1).unwrap().to_string();
        assert!(sweep_row.starts_with(&format!("1,{chain_row},")), "{sweep_row} / {chain_row}");
    }

    #[test]
    fn swap_rows() {
        let mut c = cfg(Command::Swap);
        c.settings.ideal = true;
        c.settings.noise.q_swap = 1.0;
        let files = run(&c).unwrap();
        let csv = file(&files, "swap.csv");
        let rows: Vec<Vec<&str>> = csv.lines().skip(1).map(|l| l.split(',').collect()).collect();
        assert_eq!(rows.len(), 3);
        assert_eq!(rows[2][4], "m1:m4");
        for r in &rows {
            let f: f64 = r[5].parse().unwrap();
            assert!(f > 0.999, "{r:?}");
        }
    }

    #[test]
    fn svg_only_runs_skip_csv() {
        let mut c = cfg(Command::Chain);
        c.csv = false;
        c.svg = true;
        let files = run(&c).unwrap();
        assert!(files.iter().all(|f| !f.name.ends_with(".csv")));
        assert!(file(&files, "chain.svg").contains("stroke-dasharray"));
    }

    #[test]
    fn pair_needs_qubit_truncation() {
        let mut c = cfg(Command::Pair);
        c.settings.lindblad.dim_c = 3;
        assert!(matches!(run(&c), Err(CliError::Config(_))));
    }

    #[test]
    fn phase_alignment_gives_singlet() {
        let p = LindbladParams::default().ideal();
        let pair = generate_bell_pair_with(&p, Default::default()).unwrap().state;
        let aligned = align_to_singlet(&pair).unwrap();
        let singlet = bell_state_on(BellKind::PsiMinus, MAGNON, CAVITY).unwrap();
        assert!(fidelity(&aligned, &singlet).unwrap() > 0.9999);
    }
}
