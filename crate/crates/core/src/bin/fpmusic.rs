use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use fpmusic::bench::{
    ru_music_costs, run_paired_trial, run_sweep, run_trials, write_csv, write_json, SweepConfig,
};
use fpmusic::doa::{write_spectrum_csv, Method};
use fpmusic::kernels::{parse_scheme_list, OpCounts, Scheme};
use fpmusic::{Error, Result};

#[derive(Parser)]
#[command(name = "fpmusic", version, about = "Finite-precision MUSIC DOA experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Monte-Carlo RMSE and cost sweep over SNR.
    Sweep(SweepArgs),
    /// Normalised pseudo-spectra of one trial.
    Spectrum(SpectrumArgs),
    /// Weighted costs of the metered RU-MUSIC dots per scheme.
    Costs(CostsArgs),
}

#[derive(Args)]
struct Geometry {
    /// Sensors M.
    #[arg(long, default_value_t = 20)]
    m: usize,
    /// Sources N.
    #[arg(long, default_value_t = 5)]
    n: usize,
    /// Snapshots T.
    #[arg(long, default_value_t = 40)]
    t: usize,
    /// Sketch rank K.
    #[arg(long, default_value_t = 10)]
    k: usize,
    /// Grid points F.
    #[arg(long, default_value_t = 1500)]
    f: usize,
    /// Comma-separated estimators.
    #[arg(long, default_value = "music,u_music,ru_music")]
    methods: String,
    /// Comma-separated precision schemes for ru_music.
    #[arg(
        long,
        default_value = "fp64,uniform:fp16,mp:fp16:fp64:B=2,ap:fp64,fp32,fp16:gamma=2^-16"
    )]
    schemes: String,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    geometry: Geometry,
    /// SNR values in dB: `start:step:stop` or a comma list.
    #[arg(long, default_value = "-10:5:20", allow_hyphen_values = true)]
    snr: String,
    #[arg(long, default_value_t = 200)]
    trials: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Check every metered call against the closed-form costs.
    #[arg(long)]
    audit: bool,
    /// Output file; `.json` writes JSON, anything else CSV. Stdout if absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SpectrumArgs {
    #[command(flatten)]
    geometry: Geometry,
    #[arg(long, default_value_t = 20.0, allow_hyphen_values = true)]
    snr: f64,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CostsArgs {
    #[arg(long, default_value_t = 20)]
    m: usize,
    #[arg(long, default_value_t = 10)]
    k: usize,
    #[arg(long, default_value_t = 1500)]
    f: usize,
    #[arg(long, default_value_t = 5)]
    n: usize,
    #[arg(
        long,
        default_value = "fp64,uniform:fp16,mp:fp16:fp64:B=2,ap:fp64,fp32,fp16:gamma=2^-16"
    )]
    schemes: String,
    /// Adaptive schemes are measured by simulation at this SNR.
    #[arg(long, default_value_t = 20.0, allow_hyphen_values = true)]
    snr: f64,
    #[arg(long, default_value_t = 20)]
    trials: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
}

fn parse_snr_list(s: &str) -> Result<Vec<f64>> {
    let bad = || Error::InvalidParameter(format!("bad SNR list {s:?}"));
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() == 3 {
        let v: Vec<f64> = parts
            .iter()
            .map(|p| p.trim().parse::<f64>().map_err(|_| bad()))
            .collect::<Result<_>>()?;
        let (start, step, stop) = (v[0], v[1], v[2]);
        if step <= 0.0 || stop < start {
            return Err(bad());
        }
        let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
        return Ok((0..count).map(|i| start + step * i as f64).collect());
    }
    s.split(',').map(|p| p.trim().parse::<f64>().map_err(|_| bad())).collect()
}

fn parse_methods(s: &str) -> Result<Vec<Method>> {
    s.split(',').map(str::parse).collect()
}

fn base_config(g: &Geometry) -> Result<SweepConfig> {
    Ok(SweepConfig {
        sensors: g.m,
        sources: g.n,
        snapshots: g.t,
        rank: g.k,
        grid_points: g.f,
        methods: parse_methods(&g.methods)?,
        schemes: parse_scheme_list(&g.schemes)?,
        ..SweepConfig::default()
    })
}

fn output(path: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout())),
    })
}

fn sweep(a: SweepArgs) -> Result<()> {
    let cfg = SweepConfig {
        snr_db: parse_snr_list(&a.snr)?,
        trials: a.trials,
        master_seed: a.seed,
        audit: a.audit,
        ..base_config(&a.geometry)?
    };
    let result = run_sweep(&cfg)?;
    let json = a
        .out
        .as_deref()
        .and_then(Path::extension)
        .is_some_and(|e| e.eq_ignore_ascii_case("json"));
    let out = output(&a.out)?;
    if json {
        write_json(out, &result)?;
    } else {
        write_csv(out, &result.rows)?;
    }
    if cfg.audit {
        eprintln!(
            "audit: {} metered calls, {} mismatches",
            result.audited_calls, result.audit_mismatches
        );
    }
    Ok(())
}

fn spectrum(a: SpectrumArgs) -> Result<()> {
    let cfg = SweepConfig {
        snr_db: vec![a.snr],
        trials: 1,
        master_seed: a.seed,
        ..base_config(&a.geometry)?
    };
    let trial = run_paired_trial(&cfg, 0, 0)?;
    eprintln!("true DOAs: {:?}", trial.true_doas);
    let mut spectra = Vec::new();
    for (method, scheme, result, _) in &trial.variants {
        match result {
            Ok(e) => {
                eprintln!("{method} {scheme}: {:?}", e.doas);
                spectra.push((method.to_string(), scheme.to_string(), &e.spectrum));
            }
            Err(err) => eprintln!("{method} {scheme}: failed: {err}"),
        }
    }
    write_spectrum_csv(output(&a.out)?, &spectra)
}

fn reduction(base: f64, x: f64) -> f64 {
    100.0 * (1.0 - x / base)
}

fn costs(a: CostsArgs) -> Result<()> {
    let schemes = parse_scheme_list(&a.schemes)?;
    let baseline = ru_music_costs(a.m, a.n, a.k, a.f, &Scheme::fp64())?.expect("uniform scheme");
    let mut out = output(&None)?;
    writeln!(
        out,
        "scheme,source,weighted_adds,weighted_muls,overhead,adds_reduction_pct,muls_reduction_pct"
    )?;
    for scheme in schemes {
        let (counts, source) = match ru_music_costs(a.m, a.n, a.k, a.f, &scheme)? {
            Some(c) => ((c.adds_f64(), c.muls_f64(), c.overhead_f64()), "closed_form"),
            None => (measure(&a, &scheme)?, "measured"),
        };
        writeln!(
            out,
            "{scheme},{source},{},{},{},{:.2},{:.2}",
            counts.0,
            counts.1,
            counts.2,
            reduction(baseline.adds_f64(), counts.0),
            reduction(baseline.muls_f64(), counts.1)
        )?;
    }
    out.flush()?;
    Ok(())
}

fn measure(a: &CostsArgs, scheme: &Scheme) -> Result<(f64, f64, f64)> {
    let cfg = SweepConfig {
        sensors: a.m,
        sources: a.n,
        rank: a.k,
        grid_points: a.f,
        snr_db: vec![a.snr],
        trials: a.trials,
        master_seed: a.seed,
        methods: vec![Method::RuMusic],
        schemes: vec![scheme.clone()],
        ..SweepConfig::default()
    };
    let mut total = OpCounts::default();
    let mut ok = 0usize;
    for t in run_trials(&cfg, 0)? {
        for o in t.outcomes.iter().filter(|o| o.estimate.is_ok()) {
            total += o.ledger.totals();
            ok += 1;
        }
    }
    if ok == 0 {
        return Err(Error::InvalidParameter("every trial failed".into()));
    }
    let k = ok as f64;
    Ok((total.adds_f64() / k, total.muls_f64() / k, total.overhead_f64() / k))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Sweep(a) => sweep(a),
        Command::Spectrum(a) => spectrum(a),
        Command::Costs(a) => costs(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
