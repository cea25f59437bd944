//! Command-line front end. Exit status 0 on success, 1 on a domain error,
//! 2 on a usage error.

pub mod cost;
pub mod format;

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use thiserror::Error;

use crate::dfg::{critical_path, feedforward_cutsets, CutSet, Dfg};
use crate::lifetime::{allocate_registers, lifetime_table, max_live, max_live_periodic, render_table, table_csv};
use crate::sim::{
    equivalence_check, simulate_dfg, simulate_folded, FixedPointConfig, Overflow, SimError, SimTrace, Stimulus,
    StimulusKind, DEFAULT_BASELINE_HZ, DEFAULT_POWER_LINE_HZ,
};
use crate::transforms::{
    fold, pipeline, search_folding_orders, FoldError, FoldedArch, FoldingSpec, PipelineError, SearchError,
};

pub use cost::{cost_report, CostReport, CostTable, DesignCounts};
use format::{parse_dfg_file, parse_folding_spec, parse_unit_assignment, serialize_dfg, FormatError};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{}: {source}", .path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{}: {source}", .path.display())]
    Format { path: PathBuf, source: FormatError },
    #[error(transparent)]
    Fold(#[from] FoldError),
    #[error(transparent)]
    Pipeline(#[from] PipelineError),
    #[error(transparent)]
    Search(#[from] SearchError),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error("{}: line {line}: `{text}` is not a number", .path.display())]
    StimulusFile { path: PathBuf, line: usize, text: String },
    #[error("no fold order of this unit assignment has non-negative folded delays")]
    NoFeasibleOrder,
    #[error("designs differ: {0}")]
    NotEquivalent(String),
}

#[derive(Debug, Parser)]
#[command(
    name = "dfg-fold",
    version,
    about = "Fold, pipeline and simulate adder/delay dataflow graphs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Parse and validate a graph file.
    Validate { dfg: PathBuf },
    /// Longest zero-delay path.
    CriticalPath { dfg: PathBuf },
    /// Feed-forward cut-sets, smallest first.
    Cutsets {
        dfg: PathBuf,
        #[arg(long, default_value_t = 100)]
        max: usize,
    },
    /// Insert registers on a feed-forward cut-set.
    Pipeline {
        dfg: PathBuf,
        #[arg(long, value_delimiter = ',', required = true)]
        cutset: Vec<String>,
        /// Registers added per cut edge.
        #[arg(long, default_value_t = 1)]
        stages: u32,
        /// Write the pipelined graph here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Folded delay of every edge under a folding spec.
    Fold {
        dfg: PathBuf,
        #[arg(long)]
        spec: PathBuf,
    },
    /// All feasible fold orders for a unit assignment.
    SearchOrders {
        dfg: PathBuf,
        #[arg(long)]
        factor: usize,
        #[arg(long)]
        units: PathBuf,
    },
    /// Lifetime table and register allocation of a folded design.
    Lifetime {
        dfg: PathBuf,
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Cycle-accurate simulation; with `--spec`, of the folded design.
    Simulate {
        dfg: PathBuf,
        #[arg(long)]
        spec: Option<PathBuf>,
        #[command(flatten)]
        sim: SimArgs,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Simulate the graph and its folded design and compare outputs.
    Compare {
        dfg: PathBuf,
        #[arg(long)]
        spec: PathBuf,
        #[command(flatten)]
        sim: SimArgs,
    },
    /// Structural cost before and after folding.
    Report {
        before: PathBuf,
        after_spec: PathBuf,
        #[arg(long)]
        cost_table: Option<PathBuf>,
    },
}

#[derive(Debug, clap::Args)]
struct SimArgs {
    /// impulse, step, sine, ecg, noise, random or file:<path>, with
    /// optional `:key=value,...` parameters.
    #[arg(long, value_parser = parse_stimulus_arg)]
    stimulus: StimulusArg,
    /// Sample periods to simulate.
    #[arg(long, default_value_t = 1000)]
    cycles: usize,
    /// Fixed-point format W.F.
    #[arg(long, default_value = "16.8")]
    fixed: String,
    #[arg(long, default_value = "saturate", value_parser = clap::value_parser!(Overflow))]
    overflow: Overflow,
    #[arg(long, default_value_t = 1)]
    seed: u64,
}

impl clap::ValueEnum for Overflow {
    fn value_variants<'a>() -> &'a [Self] {
        &[Overflow::Saturate, Overflow::Wrap]
    }

    fn to_possible_value(&self) -> Option<clap::builder::PossibleValue> {
        Some(clap::builder::PossibleValue::new(match self {
            Overflow::Saturate => "saturate",
            Overflow::Wrap => "wrap",
        }))
    }
}

#[derive(Clone, Debug)]
enum StimulusArg {
    Kind(StimulusKind),
    File(PathBuf),
}

fn parse_stimulus_arg(text: &str) -> Result<StimulusArg, String> {
    let (kind, params) = text.split_once(':').unwrap_or((text, ""));
    if kind == "file" {
        return if params.is_empty() {
            Err("`file:` needs a path".into())
        } else {
            Ok(StimulusArg::File(params.into()))
        };
    }
    let mut pairs = std::collections::BTreeMap::new();
    for kv in params.split(',').filter(|s| !s.is_empty()) {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| format!("expected key=value, found `{kv}`"))?;
        let v: f64 = v.parse().map_err(|_| format!("`{k}` needs a number, found `{v}`"))?;
        pairs.insert(k.to_string(), v);
    }
    let allowed: &[&str] = match kind {
        "impulse" | "step" | "random" => &["amp"],
        "sine" => &["freq", "fs", "amp", "phase"],
        "ecg" => &["bpm", "fs", "amp"],
        "noise" => &["bpm", "fs", "line", "baseline", "line_amp", "baseline_amp", "white"],
        other => return Err(format!("unknown stimulus kind `{other}`")),
    };
    if let Some(k) = pairs.keys().find(|k| !allowed.contains(&k.as_str())) {
        return Err(format!("`{kind}` takes {}, not `{k}`", allowed.join(", ")));
    }
    let get = |k: &str, default: f64| pairs.get(k).copied().unwrap_or(default);
    Ok(StimulusArg::Kind(match kind {
        "impulse" => StimulusKind::Impulse {
            amplitude: get("amp", 1.0),
        },
        "step" => StimulusKind::Step {
            amplitude: get("amp", 1.0),
        },
        "random" => StimulusKind::Random {
            amplitude: get("amp", 1.0),
            seed: 0,
        },
        "sine" => StimulusKind::Sine {
            freq_hz: *pairs.get("freq").ok_or("`sine` needs freq=<Hz>")?,
            sample_rate_hz: get("fs", 360.0),
            amplitude: get("amp", 1.0),
            phase: get("phase", 0.0),
        },
        "ecg" => StimulusKind::SyntheticEcg {
            heart_rate_bpm: get("bpm", 72.0),
            sample_rate_hz: get("fs", 360.0),
            amplitude: get("amp", 1.0),
        },
        _ => StimulusKind::NoiseMix {
            heart_rate_bpm: get("bpm", 72.0),
            sample_rate_hz: get("fs", 360.0),
            power_line_hz: get("line", DEFAULT_POWER_LINE_HZ),
            baseline_hz: get("baseline", DEFAULT_BASELINE_HZ),
            power_line_amplitude: get("line_amp", 0.2),
            baseline_amplitude: get("baseline_amp", 0.3),
            white_amplitude: get("white", 0.02),
            seed: 0,
        },
    }))
}

impl SimArgs {
    fn stimulus(&self) -> Result<Stimulus, CliError> {
        let kind = match &self.stimulus {
            StimulusArg::File(path) => {
                let text = read(path)?;
                let mut samples = Vec::new();
                for (i, l) in text.lines().enumerate() {
                    for tok in l
                        .split(|c: char| c == ',' || c.is_whitespace())
                        .filter(|t| !t.is_empty())
                    {
                        samples.push(tok.parse().map_err(|_| CliError::StimulusFile {
                            path: path.clone(),
                            line: i + 1,
                            text: tok.to_string(),
                        })?);
                    }
                }
                StimulusKind::External(samples)
            }
            StimulusArg::Kind(StimulusKind::Random { amplitude, .. }) => StimulusKind::Random {
                amplitude: *amplitude,
                seed: self.seed,
            },
            StimulusArg::Kind(StimulusKind::NoiseMix {
                heart_rate_bpm,
                sample_rate_hz,
                power_line_hz,
                baseline_hz,
                power_line_amplitude,
                baseline_amplitude,
                white_amplitude,
                ..
            }) => StimulusKind::NoiseMix {
                heart_rate_bpm: *heart_rate_bpm,
                sample_rate_hz: *sample_rate_hz,
                power_line_hz: *power_line_hz,
                baseline_hz: *baseline_hz,
                power_line_amplitude: *power_line_amplitude,
                baseline_amplitude: *baseline_amplitude,
                white_amplitude: *white_amplitude,
                seed: self.seed,
            },
            StimulusArg::Kind(k) => k.clone(),
        };
        Ok(Stimulus::new(kind, self.cycles))
    }

    fn format(&self) -> Result<FixedPointConfig, CliError> {
        Ok(FixedPointConfig::parse(&self.fixed, self.overflow)?)
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn load_dfg(path: &Path) -> Result<Dfg, CliError> {
    parse_dfg_file(&read(path)?).map_err(|source| CliError::Format {
        path: path.to_path_buf(),
        source,
    })
}

fn load_spec(path: &Path) -> Result<FoldingSpec, CliError> {
    parse_folding_spec(&read(path)?).map_err(|source| CliError::Format {
        path: path.to_path_buf(),
        source,
    })
}

fn load_folded(dfg: &Path, spec: &Path) -> Result<FoldedArch, CliError> {
    Ok(fold(&load_dfg(dfg)?, &load_spec(spec)?)?)
}

/// Runs one command line (`argv[0]` is the program name).
pub fn run_command<S: AsRef<str>>(argv: &[S], out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let cli = match Cli::try_parse_from(argv.iter().map(AsRef::as_ref)) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{text}");
                    0
                }
                _ => {
                    let _ = write!(err, "{text}");
                    2
                }
            };
        }
    };
    let mut buf = Vec::new();
    let result = dispatch(cli.command, &mut buf);
    let _ = out.write_all(&buf);
    match result {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            1
        }
    }
}

fn dispatch(command: Command, out: &mut Vec<u8>) -> Result<(), CliError> {
    macro_rules! say {
        ($($t:tt)*) => { let _ = writeln!(out, $($t)*); };
    }
    match command {
        Command::Validate { dfg } => {
            let g = load_dfg(&dfg)?;
            say!(
                "valid: {} nodes ({} compute), {} edges, {} delays",
                g.nodes().len(),
                g.compute_nodes().count(),
                g.edges().len(),
                g.total_delays()
            );
        }
        Command::CriticalPath { dfg } => {
            let cp = critical_path(&load_dfg(&dfg)?);
            say!("critical path: {} (length {})", cp.nodes.join(" -> "), cp.length);
        }
        Command::Cutsets { dfg, max } => {
            let cuts = feedforward_cutsets(&load_dfg(&dfg)?, max);
            say!("{} feed-forward cut-set(s)", cuts.len());
            for c in cuts {
                say!("{c}");
            }
        }
        Command::Pipeline {
            dfg,
            cutset,
            stages,
            out: path,
        } => {
            let g = load_dfg(&dfg)?;
            let p = pipeline(&g, &CutSet::new(cutset), stages)?;
            let (before, after) = (critical_path(&g), critical_path(&p.dfg));
            say!("inserted registers: {}", p.inserted_registers);
            say!("added latency: {} sample(s)", p.added_latency);
            say!("critical path: {} -> {}", before.length, after.length);
            say!("new critical path: {}", after.nodes.join(" -> "));
            let text = serialize_dfg(&p.dfg);
            match path {
                Some(path) => write_file(&path, &text)?,
                None => {
                    out.push(b'\n');
                    out.extend_from_slice(text.as_bytes());
                }
            }
        }
        Command::Fold { dfg, spec } => {
            let arch = load_folded(&dfg, &spec)?;
            let n = arch.factor();
            say!("spec: {}", arch.spec());
            for c in arch.connections() {
                say!(
                    "D_F({}: {} -> {}) = {n}({}) - {} + {} - {} = {}",
                    c.edge,
                    c.src,
                    c.dst,
                    c.delays,
                    c.producer_stages,
                    c.consume_slot,
                    c.produce_slot,
                    c.folded_delay
                );
            }
            let io = arch.io_schedule();
            for t in &io.inputs {
                say!(
                    "input tap {}: {} -> {}.p{} after {} cycle(s)",
                    t.edge,
                    t.input,
                    t.dst,
                    t.dst_port,
                    t.folded_delay
                );
            }
            for t in &io.outputs {
                say!(
                    "output tap {}: {} captured {} cycle(s) back",
                    t.edge,
                    t.output,
                    t.folded_delay
                );
            }
            say!(
                "output latency: {} sample(s), capture phase {}",
                arch.latency_samples(),
                arch.output_phase()
            );
            say!("total folded delay: {}", arch.total_folded_delay());
        }
        Command::SearchOrders { dfg, factor, units } => {
            let g = load_dfg(&dfg)?;
            let a = parse_unit_assignment(&read(&units)?).map_err(|source| CliError::Format {
                path: units.clone(),
                source,
            })?;
            let specs = search_folding_orders(&g, factor, &a.assignment, &a.stages)?;
            if specs.is_empty() {
                return Err(CliError::NoFeasibleOrder);
            }
            for (i, s) in specs.iter().enumerate() {
                let total = fold(&g, s)?.total_folded_delay();
                say!("{}. {s} (total D_F {total})", i + 1);
            }
        }
        Command::Lifetime { dfg, spec, csv } => {
            let arch = load_folded(&dfg, &spec)?;
            let table = lifetime_table(&arch);
            let alloc = allocate_registers(&table);
            let _ = write!(out, "{}", render_table(&table));
            say!("max live: {}", max_live(&table));
            say!("registers: {}", alloc.registers);
            for r in 0..alloc.registers {
                let held: Vec<String> = alloc
                    .occupants(&table, r)
                    .iter()
                    .map(|iv| format!("{} [{}, {})", iv.variable, iv.birth, iv.death))
                    .collect();
                say!("R{r}: {}", held.join(", "));
            }
            say!("steady-state max live (periodic): {}", max_live_periodic(&table));
            if let Some(path) = csv {
                write_file(&path, &table_csv(&table))?;
            }
        }
        Command::Simulate { dfg, spec, sim, csv } => {
            let g = load_dfg(&dfg)?;
            let stim = sim.stimulus()?;
            let cfg = sim.format()?;
            let trace = match &spec {
                Some(spec) => {
                    let arch = fold(&g, &load_spec(spec)?)?;
                    say!(
                        "design: folded, {} (latency {} sample(s))",
                        arch.spec(),
                        arch.latency_samples()
                    );
                    simulate_folded(&arch, &stim, &cfg)?
                }
                None => {
                    say!("design: unfolded");
                    simulate_dfg(&g, &stim, &cfg)?
                }
            };
            print_trace(out, &trace);
            if let Some(path) = csv {
                write_file(&path, &trace.to_csv())?;
            }
            trace.check_overflow()?;
        }
        Command::Compare { dfg, spec, sim } => {
            let g = load_dfg(&dfg)?;
            let arch = fold(&g, &load_spec(&spec)?)?;
            let stim = sim.stimulus()?;
            let cfg = sim.format()?;
            let reference = simulate_dfg(&g, &stim, &cfg)?;
            let folded = simulate_folded(&arch, &stim, &cfg)?;
            let report = equivalence_check(&reference, &folded)?;
            say!("{report}");
            say!("matched samples: {}", report.matched);
            if let Some(i) = report.first_mismatch {
                say!("first mismatch: sample {i}");
            }
            if !report.equivalent() {
                return Err(CliError::NotEquivalent(report.to_string()));
            }
        }
        Command::Report {
            before,
            after_spec,
            cost_table,
        } => {
            let g = load_dfg(&before)?;
            let arch = fold(&g, &load_spec(&after_spec)?)?;
            let table = match cost_table {
                Some(path) => CostTable::parse(&read(&path)?).map_err(|source| CliError::Format { path, source })?,
                None => crate::bundled::default_cost_table(),
            };
            let _ = write!(out, "{}", cost_report(&g, &arch, &table).render());
        }
    }
    Ok(())
}

fn print_trace(out: &mut Vec<u8>, trace: &SimTrace) {
    let cfg = trace.format;
    let _ = writeln!(
        out,
        "format: {}.{} {}",
        cfg.total_bits(),
        cfg.frac_bits(),
        cfg.overflow()
    );
    let _ = writeln!(
        out,
        "cycles: {} ({} per sample)",
        trace.cycles(),
        trace.cycles_per_sample
    );
    let _ = writeln!(out, "overflow events: {}", trace.overflow_count);
    let _ = writeln!(out, "sample,{}_raw,{}", trace.primary_name(), trace.primary_name());
    for (n, v) in trace.output_samples().into_iter().enumerate() {
        let _ = writeln!(out, "{n},{v},{}", cfg.to_real(v));
    }
}
