//! Command-line front end: instance generation, census with audits, and
//! parameter sweeps, with stable file formats for reproducible experiments.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use geoperm_core::audit::bound_curves;
use geoperm_core::generate::{generate, GenConfig, GenKind};
use geoperm_core::io::{
    arrangement_json, borders_csv, faces_csv, manifest_json, oracle_csv, summary_json,
    Instance, Manifest, ManifestFile,
};
use geoperm_core::pipeline::{run_pipeline, PipelineOptions, PipelineRun};
use geoperm_core::{Error, Rat};

#[derive(Parser)]
#[command(
    name = "geoperm",
    about = "Exact enumeration, certification and audits of geometric permutations \
             of disjoint convex polytopes",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a disjoint polytope instance file.
    Gen(GenArgs),
    /// Classify every direction-sphere face of an instance and run audits.
    Census(CensusArgs),
    /// Census with every audit enabled; exit nonzero unless all pass.
    Audit(CensusArgs),
    /// Census counts and bound curves over a range of n and seeds.
    Sweep(SweepArgs),
}

#[derive(Args)]
struct GenArgs {
    /// Instance family: grid_boxes | collinear | flower2d | flower3d.
    #[arg(long)]
    kind: String,
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 3)]
    dim: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(short, long)]
    out: PathBuf,
}

#[derive(Args)]
struct CensusArgs {
    /// Instance JSON file.
    instance: PathBuf,
    /// Deterministic interior samples per face.
    #[arg(long, default_value_t = 5)]
    probes: usize,
    /// Direction-grid oracle probes fed to the census (0 disables).
    #[arg(long = "oracle-density", default_value_t = 2000)]
    oracle_density: usize,
    /// Skip the exhaustive-removal border analysis.
    #[arg(long)]
    skip_removal: bool,
    /// Skip the two-faces-per-edge-pair audit.
    #[arg(long)]
    skip_k33: bool,
    /// Run even above the default size caps.
    #[arg(long)]
    cap_override: bool,
    /// Also dump the arrangement structure next to the summary.
    #[arg(long)]
    dump_arrangement: bool,
    /// Summary JSON path; CSV reports are written next to it.
    #[arg(short, long)]
    out: PathBuf,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long)]
    kind: String,
    #[arg(long, default_value_t = 3)]
    dim: usize,
    #[arg(long = "n-min", default_value_t = 3)]
    n_min: usize,
    #[arg(long = "n-max")]
    n_max: usize,
    /// Seeds 0..count per n.
    #[arg(long, default_value_t = 3)]
    seeds: u64,
    #[arg(long, default_value_t = 5)]
    probes: usize,
    #[arg(long = "oracle-density", default_value_t = 2000)]
    oracle_density: usize,
    #[arg(long)]
    cap_override: bool,
    #[arg(short, long)]
    out: PathBuf,
}

fn main() {
    if let Ok(threads) = std::env::var("GEOPERM_THREADS") {
        if let Ok(t) = threads.parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(t).build_global();
        }
    }
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Gen(args) => cmd_gen(args),
        Command::Census(args) => cmd_census(args, false),
        Command::Audit(args) => cmd_census(args, true),
        Command::Sweep(args) => cmd_sweep(args),
    };
    match outcome {
        Ok(code) => std::process::exit(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            std::process::exit(2);
        }
    }
}

fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, contents)
        .with_context(|| format!("writing {}", tmp.display()))?;
    fs::rename(&tmp, path).with_context(|| format!("renaming into {}", path.display()))?;
    Ok(())
}

fn record(outputs: &mut Vec<ManifestFile>, path: &Path, contents: &str, records: u64) {
    outputs.push(ManifestFile {
        path: path.display().to_string(),
        records,
        bytes: contents.len() as u64,
    });
}

fn check_cap(n: usize, dim: usize, cap_override: bool) -> Result<()> {
    let cap = if dim == 3 { 10 } else { 14 };
    if n > cap && !cap_override {
        bail!(
            "n = {n} exceeds the default cap {cap} for d = {dim}; \
             pass --cap-override to run anyway"
        );
    }
    Ok(())
}

fn cmd_gen(args: GenArgs) -> Result<i32> {
    let start = Instant::now();
    let kind: GenKind = args.kind.parse::<GenKind>().map_err(anyhow::Error::from)?;
    let cfg = GenConfig::<Rat>::new(args.n, args.dim, kind, args.seed);
    let bodies = generate(&cfg)?;
    let instance = Instance {
        dim: args.dim,
        seed: args.seed,
        bodies,
    };
    let json = instance.to_json();
    write_atomic(&args.out, &json)?;
    let mut outputs = Vec::new();
    record(&mut outputs, &args.out, &json, args.n as u64);
    let manifest = Manifest {
        command: "gen".into(),
        args: std::env::args().skip(1).collect(),
        seed: Some(args.seed),
        version: env!("CARGO_PKG_VERSION").into(),
        timing_ms: start.elapsed().as_millis(),
        outputs,
    };
    write_atomic(&args.out.with_extension("manifest.json"), &manifest_json(&manifest))?;
    println!("wrote {} ({} bodies)", args.out.display(), args.n);
    Ok(0)
}

fn load_instance(path: &Path) -> Result<Instance> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))?;
    Ok(Instance::from_json(&text)?)
}

fn run_census(args: &CensusArgs, force_all_audits: bool) -> Result<PipelineRun> {
    let instance = load_instance(&args.instance)?;
    check_cap(instance.bodies.len(), instance.dim, args.cap_override)?;
    let opts = PipelineOptions {
        probes_per_face: args.probes,
        oracle_density: args.oracle_density,
        with_removal: force_all_audits || !args.skip_removal,
        with_k33: force_all_audits || !args.skip_k33,
    };
    match run_pipeline(&instance, &opts) {
        Ok(run) => Ok(run),
        Err(Error::DisjointnessViolation(i, j)) => {
            bail!("bodies {i} and {j} are not disjoint")
        }
        Err(e) => Err(e.into()),
    }
}

fn cmd_census(args: CensusArgs, strict: bool) -> Result<i32> {
    let start = Instant::now();
    let run = run_census(&args, strict)?;
    let mut outputs = Vec::new();

    let summary = summary_json(&run.summary);
    write_atomic(&args.out, &summary)?;
    record(&mut outputs, &args.out, &summary, 1);

    let stem = args.out.with_extension("");
    let stem = stem.to_string_lossy();

    let faces_path = PathBuf::from(format!("{stem}_faces.csv"));
    let faces = faces_csv(&run.census, &run.sys.bodies);
    write_atomic(&faces_path, &faces)?;
    record(&mut outputs, &faces_path, &faces, run.census.classes.len() as u64);

    if let Some(analysis) = &run.removal {
        let borders_path = PathBuf::from(format!("{stem}_borders.csv"));
        let borders = borders_csv(analysis);
        write_atomic(&borders_path, &borders)?;
        record(&mut outputs, &borders_path, &borders, analysis.borders.len() as u64);
    }
    if let Some(oracle) = &run.oracle {
        let oracle_path = PathBuf::from(format!("{stem}_oracle.csv"));
        let text = oracle_csv(oracle, &run.sys.bodies);
        write_atomic(&oracle_path, &text)?;
        record(&mut outputs, &oracle_path, &text, oracle.directions.len() as u64);
    }
    if args.dump_arrangement {
        let arr_path = PathBuf::from(format!("{stem}_arrangement.json"));
        let text = arrangement_json(&run.arr);
        write_atomic(&arr_path, &text)?;
        record(&mut outputs, &arr_path, &text, run.arr.num_faces() as u64);
    }

    let manifest = Manifest {
        command: if strict { "audit" } else { "census" }.into(),
        args: std::env::args().skip(1).collect(),
        seed: None,
        version: env!("CARGO_PKG_VERSION").into(),
        timing_ms: start.elapsed().as_millis(),
        outputs,
    };
    write_atomic(&args.out.with_extension("manifest.json"), &manifest_json(&manifest))?;

    let ok = run.all_passed();
    println!(
        "faces={} acyclic={} certified={} permutations={} audits={}",
        run.summary.faces,
        run.summary.acyclic,
        run.summary.certified,
        run.summary.permutations_unoriented,
        if ok { "pass" } else { "FAIL" }
    );
    Ok(if ok { 0 } else { 1 })
}

fn cmd_sweep(args: SweepArgs) -> Result<i32> {
    let start = Instant::now();
    let kind: GenKind = args.kind.parse::<GenKind>().map_err(anyhow::Error::from)?;
    if args.n_min < 2 || args.n_min > args.n_max {
        bail!("need 2 <= n-min <= n-max");
    }
    for n in args.n_min..=args.n_max {
        check_cap(n, args.dim, args.cap_override)?;
    }
    let mut csv = String::from(
        "n,seed,kind,F,acyclic,certified,permutations_unoriented,popular_vertices,\
         popular_edges,E0,V0,wenger,main_poly,log2_n,main,planar,lower\n",
    );
    let mut rows = 0u64;
    let mut all_ok = true;
    for n in args.n_min..=args.n_max {
        for seed in 0..args.seeds {
            let cfg = GenConfig::<Rat>::new(n, args.dim, kind, seed);
            let bodies = generate(&cfg)?;
            let instance = Instance {
                dim: args.dim,
                seed,
                bodies,
            };
            let opts = PipelineOptions {
                probes_per_face: args.probes,
                oracle_density: args.oracle_density,
                with_removal: false,
                with_k33: false,
            };
            let run = run_pipeline(&instance, &opts)?;
            all_ok &= run.all_passed();
            let curves = bound_curves(n as u64, args.dim as u32);
            csv.push_str(&format!(
                "{},{},{},{},{},{},{},{},{},{},{},{},{},{:.6},{:.6},{},{}\n",
                n,
                seed,
                kind.as_str(),
                run.summary.faces,
                run.summary.acyclic,
                run.summary.certified,
                run.summary.permutations_unoriented,
                run.summary.popular_vertices,
                run.summary.popular_edges,
                run.summary.e0,
                run.summary.v0,
                curves.wenger,
                curves.main_poly,
                curves.log2_n,
                curves.main,
                curves.planar,
                curves.lower,
            ));
            rows += 1;
        }
    }
    write_atomic(&args.out, &csv)?;
    let manifest = Manifest {
        command: "sweep".into(),
        args: std::env::args().skip(1).collect(),
        seed: None,
        version: env!("CARGO_PKG_VERSION").into(),
        timing_ms: start.elapsed().as_millis(),
        outputs: vec![ManifestFile {
            path: args.out.display().to_string(),
            records: rows,
            bytes: csv.len() as u64,
        }],
    };
    write_atomic(&args.out.with_extension("manifest.json"), &manifest_json(&manifest))?;
    println!("wrote {} rows to {}", rows, args.out.display());
    Ok(if all_ok { 0 } else { 1 })
}
