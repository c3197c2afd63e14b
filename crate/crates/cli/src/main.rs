use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use gqe_qsci::harness::{emit_reports, run_baseline, run_gqe, run_random_baseline, BaselineKind, ExperimentConfig, Problem, RunRecord};
use gqe_qsci::simulator::{run_circuit, sample, Circuit};
use gqe_qsci::{qsci, rng, CHEMICAL_PRECISION};

/// Generative circuit design for quantum-selected configuration interaction.
#[derive(Parser, Debug)]
#[command(name = "gqe-qsci", version)]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    cmd: Command,
}

/// Flags shared by every subcommand; they override the config file.
#[derive(Args, Debug)]
struct Common {
    /// Flat `key = value` experiment configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    fcidump: Option<PathBuf>,
    /// Excitation amplitude file; MP2 doubles are used when omitted.
    #[arg(long, global = true)]
    amps: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long = "d-max", global = true)]
    d_max: Option<usize>,
    /// Shots per circuit.
    #[arg(long, global = true)]
    shots: Option<u64>,
    #[arg(long, global = true)]
    iters: Option<usize>,
    /// Circuit length L.
    #[arg(long, global = true)]
    length: Option<usize>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Exact sector ground state and Hartree-Fock reference.
    Fci,
    /// Build the operator pool and write it as CSV.
    PoolBuild,
    /// Sample one circuit once and diagonalize the selected subspace.
    QsciOnce {
        /// Circuit file; the Hartree-Fock state when omitted.
        #[arg(long)]
        circuit: Option<PathBuf>,
        /// Comma-separated pool indices, as an alternative to --circuit.
        #[arg(long, conflicts_with = "circuit")]
        tokens: Option<String>,
    },
    /// Policy-driven optimization loop.
    RunGqe,
    /// Same loop with uniformly random circuits.
    RunRandom,
    /// One of the comparison state-preparation families.
    RunBaseline {
        /// time_evolved, sqdrift or exact.
        which: BaselineKind,
    },
    /// Shot sweep of a serialized circuit re-evaluated on fresh streams.
    Report {
        #[arg(long)]
        circuit: PathBuf,
        /// Comma-separated shot counts.
        #[arg(long, default_value = "1e3,1e4,1e5,1e6")]
        shot_list: String,
    },
}

fn config(c: &Common) -> Result<ExperimentConfig> {
    let mut cfg = match &c.config {
        Some(p) => ExperimentConfig::from_file(p).with_context(|| format!("reading config {}", p.display()))?,
        None => ExperimentConfig::default(),
    };
    if let Some(v) = &c.fcidump {
        cfg.fcidump = v.clone();
    }
    if let Some(v) = &c.amps {
        cfg.amps = Some(v.clone());
    }
    if let Some(v) = c.seed {
        cfg.seed = v;
    }
    if let Some(v) = &c.out {
        cfg.out = v.clone();
    }
    if let Some(v) = c.d_max {
        cfg.d_max = Some(v);
    }
    if let Some(v) = c.shots {
        cfg.n_shots = v;
    }
    if let Some(v) = c.iters {
        cfg.n_iter = v;
    }
    if let Some(v) = c.length {
        cfg.length = v;
    }
    if cfg.fcidump.as_os_str().is_empty() {
        bail!("no FCIDUMP given (--fcidump or `fcidump =` in the config)");
    }
    cfg.validate()?;
    Ok(cfg)
}

fn parse_count(s: &str) -> Result<u64> {
    let s = s.trim();
    if let Ok(v) = s.parse::<u64>() {
        return Ok(v);
    }
    let f: f64 = s.parse().with_context(|| format!("bad count '{s}'"))?;
    if f < 0.0 || f.fract() != 0.0 {
        bail!("bad count '{s}'");
    }
    Ok(f as u64)
}

fn writer(dir: &Path, name: &str) -> Result<BufWriter<File>> {
    std::fs::create_dir_all(dir)?;
    let p = dir.join(name);
    Ok(BufWriter::new(File::create(&p).with_context(|| format!("creating {}", p.display()))?))
}

fn summarize(r: &RunRecord, files: &[PathBuf]) {
    if let (Some(best), Some(global)) = (r.best_so_far(), r.global_energy()) {
        println!("method        {}", r.method);
        println!("E_FCI         {:.10}", r.e_fci);
        println!("best-so-far   {:.10}  (error {:.3e})", best, best - r.e_fci);
        println!("global        {:.10}  (error {:.3e})", global, global - r.e_fci);
        println!("shots         {}", r.total_shots());
        println!("chem. prec.   {}", if (global - r.e_fci).abs() < CHEMICAL_PRECISION { "reached" } else { "not reached" });
    }
    for f in files {
        println!("wrote {}", f.display());
    }
}

fn read_circuit(path: &Path, n_qubits: usize) -> Result<Circuit> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(Circuit::parse(&text, n_qubits)?)
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    let cfg = config(&cli.common)?;
    let problem = Problem::load(&cfg).with_context(|| format!("loading {}", cfg.fcidump.display()))?;
    let d_max = problem.d_max(&cfg);

    match cli.cmd {
        Command::Fci => {
            let hf = problem.ints.hf_determinant();
            println!("orbitals      {}  (alpha {}, beta {})", problem.ints.n_orb, problem.ints.n_alpha, problem.ints.n_beta);
            println!("sector dim    {}", problem.sector_dim);
            println!("E_HF          {:.12}", problem.e_hf);
            println!("E_FCI         {:.12}", problem.e_fci);
            println!("|<HF|FCI>|    {:.6}", problem.ground.coefficient(&hf).abs());
            problem.ground.write_csv(writer(&cfg.out, "fci_wavefunction.csv")?)?;
            println!("wrote {}", cfg.out.join("fci_wavefunction.csv").display());
        }
        Command::PoolBuild => {
            problem.pool.write_csv(writer(&cfg.out, "pool.csv")?)?;
            println!("{} tokens; wrote {}", problem.pool.len(), cfg.out.join("pool.csv").display());
        }
        Command::QsciOnce { circuit, tokens } => {
            let c = match (circuit, tokens) {
                (Some(p), _) => read_circuit(&p, problem.pool.n_qubits)?,
                (None, Some(t)) => {
                    let idx = t
                        .split(',')
                        .map(|x| x.trim().parse::<usize>().with_context(|| format!("bad token '{x}'")))
                        .collect::<Result<Vec<_>>>()?;
                    if let Some(bad) = idx.iter().find(|&&i| i >= problem.pool.len()) {
                        bail!("token {bad} outside pool of {}", problem.pool.len());
                    }
                    problem.circuit(&idx)
                }
                (None, None) => problem.circuit(&[]),
            };
            let state = run_circuit(&c);
            let mut s = rng::stream(cfg.seed, &[rng::purpose::SHOTS]);
            let hist = sample(&state, cfg.n_shots, &mut s);
            let wf = qsci::qsci_from_histogram(&hist, d_max, &problem.ints)?;
            println!("unique bitstrings {}", hist.unique());
            println!("n_dets        {}", wf.len());
            println!("E_QSCI        {:.12}  (error {:.3e})", wf.energy, wf.energy - problem.e_fci);
            wf.write_csv(writer(&cfg.out, "qsci_wavefunction.csv")?)?;
        }
        Command::RunGqe => {
            let r = run_gqe(&problem, &cfg)?;
            let files = emit_reports(&r, &cfg.out)?;
            summarize(&r, &files);
        }
        Command::RunRandom => {
            let r = run_random_baseline(&problem, &cfg)?;
            let files = emit_reports(&r, &cfg.out)?;
            summarize(&r, &files);
        }
        Command::RunBaseline { which } => {
            let r = run_baseline(&problem, &cfg, which)?;
            let files = emit_reports(&r, &cfg.out)?;
            summarize(&r, &files);
        }
        Command::Report { circuit, shot_list } => {
            let c = read_circuit(&circuit, problem.pool.n_qubits)?;
            let shots = shot_list.split(',').map(parse_count).collect::<Result<Vec<_>>>()?;
            let mut out = csv_writer(&cfg.out)?;
            out.write_record(["shots", "unique_bitstrings", "n_dets", "energy", "error", "chem_precision"])?;
            let state = run_circuit(&c);
            for (i, &n) in shots.iter().enumerate() {
                let mut s = rng::stream(cfg.seed, &[rng::purpose::REEVAL, i as u64]);
                let hist = sample(&state, n, &mut s);
                let (n_dets, e) = match qsci::qsci_from_histogram(&hist, d_max, &problem.ints) {
                    Ok(wf) => (wf.len(), wf.energy),
                    Err(gqe_qsci::Error::EmptySubspace) => (0, f64::NAN),
                    Err(e) => return Err(e.into()),
                };
                out.write_record([
                    n.to_string(),
                    hist.unique().to_string(),
                    n_dets.to_string(),
                    format!("{e}"),
                    format!("{:e}", e - problem.e_fci),
                    format!("{CHEMICAL_PRECISION:e}"),
                ])?;
                println!("{n:>10} shots  {n_dets:>6} dets  error {:.3e}", e - problem.e_fci);
            }
            out.flush()?;
            println!("wrote {}", cfg.out.join("shot_sweep.csv").display());
        }
    }
    Ok(())
}

fn csv_writer(dir: &Path) -> Result<csv::Writer<BufWriter<File>>> {
    Ok(csv::Writer::from_writer(writer(dir, "shot_sweep.csv")?))
}
