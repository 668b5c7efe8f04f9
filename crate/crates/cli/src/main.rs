//! `graykeep`: embed, extract, verify and benchmark from the command line.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use graykeep::baselines::{decode_scheme, run_scheme, RunParams};
use graykeep::metrics::{format_psnr, invariance_report, psnr, QualityReport};
use graykeep::payload::{random_bits, read_payload, write_payload};
use graykeep::{load_image, save_image, BitBuf, ColorImage, EncodeReport, SchemeId, Thresholds};
use rayon::prelude::*;

#[derive(Parser)]
#[command(name = "graykeep", version, about = "Grayscale-invariant reversible data hiding")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Hide a payload in a cover image.
    Embed(EmbedArgs),
    /// Recover the cover image and payload from a marked image.
    Extract(ExtractArgs),
    /// Check that a marked image keeps the cover's grayscale outside row 0.
    Verify(VerifyArgs),
    /// Sweep images, capacities and methods, writing one CSV row per run.
    Bench(BenchArgs),
}

#[derive(Args)]
struct EmbedArgs {
    #[arg(long)]
    cover: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Payload file: 8-byte little-endian bit count, then MSB-first bits.
    #[arg(long, conflicts_with = "random_bits")]
    payload: Option<PathBuf>,
    /// Embed this many pseudo-random bits instead of a payload file.
    #[arg(long)]
    random_bits: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, requires = "t2", conflicts_with = "target_bits")]
    t1: Option<u8>,
    #[arg(long, requires = "t1")]
    t2: Option<u8>,
    /// Pick thresholds automatically for this many bits.
    #[arg(long)]
    target_bits: Option<usize>,
    #[arg(long, default_value = "proposed")]
    method: SchemeId,
}

#[derive(Args)]
struct ExtractArgs {
    #[arg(long)]
    marked: PathBuf,
    #[arg(long)]
    out_cover: PathBuf,
    #[arg(long)]
    out_payload: PathBuf,
    #[arg(long, default_value = "proposed")]
    method: SchemeId,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    cover: PathBuf,
    #[arg(long)]
    marked: PathBuf,
}

#[derive(Args)]
struct BenchArgs {
    /// Directory of `.png` / `.ppm` images; the file stem names the image.
    #[arg(long)]
    images: PathBuf,
    #[arg(long, value_delimiter = ',', default_values_t = [10_000, 50_000, 100_000, 150_000])]
    capacities: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_values_t = SchemeId::ALL.to_vec())]
    methods: Vec<SchemeId>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    csv: PathBuf,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Embed(a) => embed(a),
        Command::Extract(a) => extract(a),
        Command::Verify(a) => verify(a),
        Command::Bench(a) => bench(a),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn load(path: &Path) -> Result<ColorImage> {
    load_image(path).with_context(|| format!("reading {}", path.display()))
}

fn embed_payload(a: &EmbedArgs) -> Result<BitBuf> {
    let bits = match (&a.payload, a.random_bits, a.target_bits) {
        (Some(p), _, _) => read_payload(p).with_context(|| format!("reading {}", p.display()))?,
        (None, Some(n), _) | (None, None, Some(n)) => random_bits(n, a.seed),
        (None, None, None) => bail!("give --payload, --random-bits or --target-bits"),
    };
    if let Some(n) = a.target_bits {
        if n != bits.len() {
            bail!("payload has {} bits but --target-bits is {n}", bits.len());
        }
    }
    Ok(bits)
}

fn embed(a: EmbedArgs) -> Result<ExitCode> {
    let params = match (a.t1, a.t2, a.target_bits) {
        (Some(t1), Some(t2), _) => RunParams::Fixed(Thresholds::new(t1, t2)?),
        (None, None, Some(_)) => RunParams::Auto,
        _ => bail!("give --t1 and --t2, or --target-bits"),
    };
    let secret = embed_payload(&a)?;
    let cover = load(&a.cover)?;
    let (marked, report) = run_scheme(a.method, &cover, &secret, params)?;
    save_image(&marked, &a.out).with_context(|| format!("writing {}", a.out.display()))?;
    print_report(&cover, &marked, &report)?;
    Ok(ExitCode::SUCCESS)
}

fn print_report(cover: &ColorImage, marked: &ColorImage, r: &EncodeReport) -> Result<()> {
    let q = QualityReport::new(cover, marked, &r.units, r.capacity_bits)?;
    let mean_ued = if q.ued.is_empty() { 0.0 } else { q.ued.iter().sum::<f64>() / q.ued.len() as f64 };
    println!("method              {}", r.scheme);
    println!("thresholds          t1={} t2={}", r.thresholds.t1, r.thresholds.t2);
    println!("capacity_bits       {}", q.capacity_bits);
    println!("psnr_db             {}", format_psnr(q.psnr));
    println!("mse                 {:.6}", q.mse);
    println!("units               {} (mean UED {mean_ued:.3})", q.ued.len());
    println!("header              {} bits in {} pixels", r.header_bits, r.header_pixels);
    println!("location_map        {} flags set, {} bits, {} segments", r.lm_ones, r.map_bits, r.map_segments);
    println!("gray_changed_pixels {}", q.gray_changed_pixels);
    Ok(())
}

fn extract(a: ExtractArgs) -> Result<ExitCode> {
    let marked = load(&a.marked)?;
    let (cover, secret) = decode_scheme(a.method, &marked).context("decoding")?;
    save_image(&cover, &a.out_cover).with_context(|| format!("writing {}", a.out_cover.display()))?;
    if let Err(e) = write_payload(&a.out_payload, &secret) {
        let _ = std::fs::remove_file(&a.out_cover);
        return Err(e).with_context(|| format!("writing {}", a.out_payload.display()));
    }
    println!("recovered {} payload bits", secret.len());
    Ok(ExitCode::SUCCESS)
}

/// Locations listed before the rest are summarized.
const MAX_LISTED: usize = 64;

fn verify(a: VerifyArgs) -> Result<ExitCode> {
    let cover = load(&a.cover)?;
    let marked = load(&a.marked)?;
    let changed = invariance_report(&cover, &marked)?;
    println!("psnr_db             {}", format_psnr(psnr(&cover, &marked)?));
    println!("gray_changed_pixels {}", changed.len());
    for (i, j) in changed.iter().take(MAX_LISTED) {
        println!("  ({i}, {j})");
    }
    if changed.len() > MAX_LISTED {
        println!("  ... {} more", changed.len() - MAX_LISTED);
    }
    let outside = changed.iter().filter(|(i, _)| *i != 0).count();
    if outside == 0 {
        println!("invariant: yes");
        Ok(ExitCode::SUCCESS)
    } else {
        println!("invariant: no ({outside} changed pixels below row 0)");
        Ok(ExitCode::FAILURE)
    }
}

const CSV_HEADER: [&str; 8] = [
    "image",
    "scheme",
    "capacity_bits",
    "t1",
    "t2",
    "psnr_db",
    "gray_changed_pixels",
    "runtime_ms",
];

struct Job<'a> {
    image: &'a str,
    cover: &'a ColorImage,
    scheme: SchemeId,
    capacity: usize,
}

struct BenchRow {
    image: String,
    scheme: SchemeId,
    capacity: usize,
    outcome: std::result::Result<(EncodeReport, u128), String>,
}

impl BenchRow {
    fn record(&self) -> [String; 8] {
        let (image, scheme, cap) = (self.image.clone(), self.scheme.to_string(), self.capacity.to_string());
        match &self.outcome {
            Ok((r, ms)) => [
                image,
                scheme,
                cap,
                r.thresholds.t1.to_string(),
                r.thresholds.t2.to_string(),
                format_psnr(r.psnr),
                r.gray_changed_pixels.to_string(),
                ms.to_string(),
            ],
            Err(_) => [image, scheme, cap, String::new(), String::new(), String::new(), String::new(), String::new()],
        }
    }
}

fn bench_images(dir: &Path) -> Result<Vec<(String, ColorImage)>> {
    let mut paths: Vec<PathBuf> = std::fs::read_dir(dir)
        .with_context(|| format!("listing {}", dir.display()))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| {
            p.extension()
                .and_then(|e| e.to_str())
                .is_some_and(|e| matches!(e.to_ascii_lowercase().as_str(), "png" | "ppm"))
        })
        .collect();
    paths.sort();
    paths
        .iter()
        .map(|p| {
            let name = p.file_stem().unwrap_or_default().to_string_lossy().into_owned();
            Ok((name, load(p)?))
        })
        .collect()
}

fn run_job(job: &Job, seed: u64) -> BenchRow {
    let secret = random_bits(job.capacity, seed);
    let start = Instant::now();
    let outcome = run_scheme(job.scheme, job.cover, &secret, RunParams::Auto)
        .map_err(|e| e.to_string())
        .and_then(|(marked, report)| {
            let ms = start.elapsed().as_millis();
            match decode_scheme(job.scheme, &marked) {
                Ok((c, s)) if c == *job.cover && s == secret => Ok((report, ms)),
                Ok(_) => Err("decode mismatch".to_string()),
                Err(e) => Err(format!("decode: {e}")),
            }
        });
    BenchRow {
        image: job.image.to_string(),
        scheme: job.scheme,
        capacity: job.capacity,
        outcome,
    }
}

fn bench(a: BenchArgs) -> Result<ExitCode> {
    let images = bench_images(&a.images)?;
    if images.is_empty() {
        bail!("no .png or .ppm images in {}", a.images.display());
    }
    let mut methods = a.methods.clone();
    methods.sort();
    methods.dedup();
    let mut capacities = a.capacities.clone();
    capacities.sort();
    capacities.dedup();
    let mut jobs = Vec::new();
    for (name, cover) in &images {
        for &scheme in &methods {
            for &capacity in &capacities {
                jobs.push(Job {
                    image: name,
                    cover,
                    scheme,
                    capacity,
                });
            }
        }
    }

    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = std::env::var("GRAYKEEP_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        pool = pool.num_threads(n.max(1));
    }
    let pool = pool.build().context("starting worker threads")?;
    let mut rows: Vec<BenchRow> = pool.install(|| jobs.par_iter().map(|j| run_job(j, a.seed ^ j.capacity as u64)).collect());
    rows.sort_by(|x, y| (&x.image, x.scheme, x.capacity).cmp(&(&y.image, y.scheme, y.capacity)));

    write_csv(&a.csv, &rows).with_context(|| format!("writing {}", a.csv.display()))?;

    for row in &rows {
        match &row.outcome {
            Ok((r, ms)) => println!(
                "{:<10} {:<8} {:>7}  t=({},{})  psnr {:>7} dB  second-level violations {}  {ms} ms",
                row.image,
                row.scheme,
                row.capacity,
                r.thresholds.t1,
                r.thresholds.t2,
                format_psnr(r.psnr),
                r.second_level_violations()
            ),
            Err(e) => println!("{:<10} {:<8} {:>7}  failed: {e}", row.image, row.scheme, row.capacity),
        }
    }
    print_gaps(&rows, &capacities);
    Ok(ExitCode::SUCCESS)
}

fn write_csv(path: &Path, rows: &[BenchRow]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(CSV_HEADER)?;
    for row in rows {
        w.write_record(row.record())?;
    }
    w.flush()?;
    Ok(())
}

/// Average proposed-over-Hou PSNR gap per capacity, over images where both ran.
fn print_gaps(rows: &[BenchRow], capacities: &[usize]) {
    let psnr_of = |image: &str, scheme: SchemeId, cap: usize| {
        rows.iter()
            .find(|r| r.image == image && r.scheme == scheme && r.capacity == cap)
            .and_then(|r| r.outcome.as_ref().ok())
            .map(|(rep, _)| rep.psnr)
    };
    for &cap in capacities {
        let gaps: Vec<f64> = rows
            .iter()
            .filter(|r| r.scheme == SchemeId::Proposed && r.capacity == cap)
            .filter_map(|r| Some(psnr_of(&r.image, SchemeId::Proposed, cap)? - psnr_of(&r.image, SchemeId::Hou, cap)?))
            .filter(|g| g.is_finite())
            .collect();
        if !gaps.is_empty() {
            println!(
                "average proposed - hou gap at {cap} bits: {:.2} dB over {} images",
                gaps.iter().sum::<f64>() / gaps.len() as f64,
                gaps.len()
            );
        }
    }
}
