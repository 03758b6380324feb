//! wstar: exact weak*-Hausdorff distances, hulls, exposure certificates and
//! dense-exposed-point constructions over sparse rational data.

mod manifest;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};
use wstar_core::faces::{
    exposed_all, exposure_certificate, extreme_deviation, polygon_degeneracy_sweep,
};
use wstar_core::geometry::{closed_convex_hull, irredundant_vertices, PolarSpec};
use wstar_core::hypermetrics::{hausdorff_full, immeasurable_witness, pseudometric_dh};
use wstar_core::io::{to_json, SetDocument};
use wstar_core::limits::{counterexample_demo, li_ls_diagnostic, monotone_limit, SequencePrefix};
use wstar_core::numerics::{ExtRational, Rational, SparseVec};
use wstar_core::poulsen::{construct, jordan_decompose, verify_trace, Variant};

use manifest::{
    parse_direction, parse_rational, read_json, read_metric_config, read_set, shorthand,
    write_json, CliError, CliResult, RunManifest,
};

#[derive(Parser)]
#[command(
    name = "wstar",
    version,
    about = "Exact weak*-Hausdorff geometry over finitely supported rational vectors",
    after_help = "EXIT CODES:\n  0 ok\n  1 verification failure\n  2 parse error\n  3 precondition violated"
)]
struct Cli {
    /// Add decimal renderings next to exact values (non-authoritative)
    #[arg(long, global = true)]
    approx: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Hausdorff metric between two bounded sets, or the pseudometric in one direction
    Distance {
        /// Set document
        a: PathBuf,
        /// Set document
        b: PathBuf,
        /// Test functional, as `e<k>` or a JSON vector; selects pseudometric mode
        #[arg(long, value_parser = parse_direction)]
        direction: Option<SparseVec>,
        /// Metric configuration document; defaults to the unit polar and coordinate functionals
        #[arg(long)]
        metric_config: Option<PathBuf>,
    },
    /// Densify a target polytope with certified exposed points
    Poulsen {
        /// Set document whose hull lies in the polar
        #[arg(long)]
        target: PathBuf,
        /// Positive rational, e.g. `1/4`
        #[arg(long, value_parser = parse_rational)]
        epsilon: Rational,
        /// Number of exposed points to add
        #[arg(long)]
        steps: usize,
        /// plain, positive or state
        #[arg(long, default_value = "plain", value_parser = parse_variant)]
        variant: Variant,
        /// Drives the choice of fresh coordinates
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Radius of the ℓ¹ polar
        #[arg(long, default_value = "1", value_parser = parse_rational)]
        radius: Rational,
        /// Directory for result, trace, report and manifest files
        #[arg(long)]
        out: PathBuf,
    },
    /// Exposure certificates for every vertex, or for one
    Expose {
        set: PathBuf,
        /// A single vertex as a JSON vector
        #[arg(long, value_parser = parse_direction_vector)]
        vertex: Option<SparseVec>,
    },
    /// Sandwich estimate of the distance from interior points to the extreme points
    Deviation {
        set: PathBuf,
        /// Number of sampled interior points
        #[arg(long, default_value_t = 64)]
        budget: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Report whether the estimate certifies deviation ≥ 1/m
        #[arg(long)]
        m: Option<u64>,
        /// Metric configuration document; defaults to the unit polar and coordinate functionals
        #[arg(long)]
        metric_config: Option<PathBuf>,
    },
    /// Irredundant closed convex hull
    Hull {
        set: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Extreme points
    Vertices { set: PathBuf },
    /// Split a vector into disjointly supported positive and negative parts
    Decompose {
        /// File holding a JSON vector
        vector: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Lower/upper limit diagnostics for a sequence of sets listed in a manifest
    Limits {
        /// JSON `{"sets": [paths…]}`; paths are relative to the manifest
        manifest: PathBuf,
        /// Points document to test for lower/upper limit membership
        #[arg(long)]
        candidates: Option<PathBuf>,
        /// Largest distance counted as membership
        #[arg(long, default_value = "0", value_parser = parse_rational)]
        tolerance: Rational,
        /// First index (0-based) of the tail the diagnostics look at
        #[arg(long, default_value_t = 0)]
        stabilization: usize,
        /// Also compute the increasing-sequence limit and its distance table
        #[arg(long)]
        monotone: bool,
        /// Metric configuration document; defaults to the unit polar and coordinate functionals
        #[arg(long)]
        metric_config: Option<PathBuf>,
    },
    /// A direction at infinite pseudodistance between two sets, if any
    Immeasurable { a: PathBuf, b: PathBuf },
    /// Norm blow-up of weak*-null hulls and the regular-polygon degeneracy sweep
    Demo {
        /// Number of points in the counterexample
        #[arg(long, default_value_t = 5)]
        m: usize,
        /// Sampled directions per polygon
        #[arg(long, default_value_t = 20)]
        directions: usize,
        #[arg(long, default_value_t = 6)]
        seed: u64,
    },
}

fn parse_variant(s: &str) -> Result<Variant, String> {
    s.parse().map_err(|e: wstar_core::Error| e.to_string())
}

fn parse_direction_vector(s: &str) -> Result<SparseVec, String> {
    wstar_core::io::from_json(s).map_err(|e| e.to_string())
}

#[derive(serde::Deserialize)]
#[serde(deny_unknown_fields)]
struct SequenceManifest {
    sets: Vec<PathBuf>,
}

struct Ctx {
    approx: bool,
}

impl Ctx {
    fn rational(&self, r: &Rational) -> Value {
        if self.approx {
            json!({ "exact": r, "approx": r.to_f64() })
        } else {
            json!(r)
        }
    }

    fn ext(&self, r: &ExtRational) -> Value {
        match r.finite() {
            Some(x) => self.rational(x),
            None => json!(r),
        }
    }
}

fn emit(manifest: &RunManifest, body: Value) {
    let mut out = json!({ "manifest": manifest });
    if let (Value::Object(o), Value::Object(b)) = (&mut out, body) {
        o.extend(b);
    }
    print!("{}", to_json(&out));
}

fn run(cli: Cli) -> CliResult<()> {
    let ctx = Ctx { approx: cli.approx };
    match cli.command {
        Command::Distance {
            a,
            b,
            direction,
            metric_config,
        } => {
            let mut m = RunManifest::new("distance", &[&a, &b]);
            let (fa, fb) = (read_set(&a)?, read_set(&b)?);
            match direction {
                Some(dir) => {
                    let d = pseudometric_dh(&fa.to_closed_set()?, &fb.to_closed_set()?, &dir);
                    emit(
                        &m,
                        json!({ "mode": "pseudometric", "direction": dir, "distance": ctx.ext(&d) }),
                    );
                }
                None => {
                    let doc = read_metric_config(metric_config.as_ref())?;
                    let cfg = doc.to_config()?;
                    m.metric_config = Some(doc);
                    let d = hausdorff_full(&fa.to_polyhedron()?, &fb.to_polyhedron()?, &cfg)?;
                    emit(
                        &m,
                        json!({ "mode": "hausdorff", "distance": ctx.rational(&d) }),
                    );
                }
            }
        }
        Command::Poulsen {
            target,
            epsilon,
            steps,
            variant,
            seed,
            radius,
            out,
        } => {
            let mut m = RunManifest::new("poulsen", &[&target]);
            m.polar_radius = Some(radius.clone());
            m.seed = Some(seed);
            m.variant = Some(variant);
            m.tolerance = Some(epsilon.clone());
            m.output_dir = Some(out.display().to_string());
            let u = read_set(&target)?.to_polyhedron()?;
            let polar = PolarSpec::new(radius)?;
            let (result, trace) = construct(&u, &polar, &epsilon, steps, variant, seed)?;
            let report = verify_trace(&u, &polar, &result, &trace);
            let files = [
                write_json(&out, "result.json", &SetDocument::from(&result))?,
                write_json(&out, "trace.json", &trace)?,
                write_json(&out, "report.json", &report)?,
                write_json(&out, "manifest.json", &m)?,
            ];
            let passed = report.passed();
            emit(
                &m,
                json!({
                    "passed": passed,
                    "hausdorff": report.hausdorff.as_ref().map(|d| ctx.rational(d)),
                    "bound": report.bound,
                    "checks": report.checks,
                    "files": files,
                }),
            );
            if !passed {
                let failed: Vec<&str> = report
                    .checks
                    .iter()
                    .filter(|c| !c.passed)
                    .map(|c| c.name.as_str())
                    .collect();
                return Err(CliError::Verification(failed.join(", ")));
            }
        }
        Command::Expose { set, vertex } => {
            let m = RunManifest::new("expose", &[&set]);
            let p = read_set(&set)?.to_polyhedron()?;
            let certs = match vertex {
                Some(v) => vec![exposure_certificate(&p, &v)?],
                None => exposed_all(&p)?,
            };
            emit(&m, json!({ "certificates": certs }));
        }
        Command::Deviation {
            set,
            budget,
            seed,
            m: level,
            metric_config,
        } => {
            let mut m = RunManifest::new("deviation", &[&set]);
            m.seed = Some(seed);
            let doc = read_metric_config(metric_config.as_ref())?;
            let cfg = doc.to_config()?;
            m.metric_config = Some(doc);
            let p = read_set(&set)?.to_polyhedron()?;
            let est = extreme_deviation(&p, &cfg, budget, seed)?;
            emit(
                &m,
                json!({
                    "lower": ctx.rational(&est.lower),
                    "upper": ctx.rational(&est.upper),
                    "argmax": est.argmax,
                    "samples": est.samples,
                    "smallest_certified_m": est.smallest_certified_m(),
                    "certifies_m": level.map(|l| est.certifies_m(l)),
                }),
            );
        }
        Command::Hull { set, out } => {
            let m = RunManifest::new("hull", &[&set]);
            let hull = closed_convex_hull(&read_set(&set)?.to_closed_set()?);
            let doc = SetDocument::from(&hull);
            let file = match out {
                Some(dir) => Some(write_json(&dir, "hull.json", &doc)?),
                None => None,
            };
            emit(&m, json!({ "hull": doc, "file": file }));
        }
        Command::Vertices { set } => {
            let m = RunManifest::new("vertices", &[&set]);
            let p = read_set(&set)?.to_polyhedron()?;
            emit(
                &m,
                json!({ "vertices": SetDocument::from(&irredundant_vertices(&p)) }),
            );
        }
        Command::Decompose { vector, out } => {
            let mut m = RunManifest::new("decompose", &[&vector]);
            m.output_dir = Some(out.display().to_string());
            let sigma: SparseVec = read_json(&vector)?;
            let (pos, neg) = jordan_decompose(&sigma);
            let files = [
                write_json(&out, "positive.json", &pos)?,
                write_json(&out, "negative.json", &neg)?,
            ];
            emit(
                &m,
                json!({ "positive": pos, "negative": neg, "files": files }),
            );
        }
        Command::Limits {
            manifest,
            candidates,
            tolerance,
            stabilization,
            monotone,
            metric_config,
        } => {
            let seq_doc: SequenceManifest = read_json(&manifest)?;
            let base = manifest.parent().unwrap_or(Path::new("."));
            let paths: Vec<PathBuf> = seq_doc.sets.iter().map(|p| base.join(p)).collect();
            let mut inputs: Vec<&Path> = vec![&manifest];
            inputs.extend(paths.iter().map(PathBuf::as_path));
            if let Some(c) = &candidates {
                inputs.push(c);
            }
            let mut m = RunManifest::new("limits", &inputs);
            m.tolerance = Some(tolerance.clone());
            let doc = read_metric_config(metric_config.as_ref())?;
            let cfg = doc.to_config()?;
            m.metric_config = Some(doc);
            let sets = paths
                .iter()
                .map(|p| Ok(read_set(p)?.to_polyhedron()?))
                .collect::<CliResult<Vec<_>>>()?;
            let seq = SequencePrefix::new(sets, tolerance, stabilization)?;
            let report = match &candidates {
                Some(c) => Some(li_ls_diagnostic(&seq, &read_set(c)?.to_point_set()?, &cfg)?),
                None => None,
            };
            let limit = if monotone {
                let (k, table) = monotone_limit(&seq, &cfg)?;
                Some(json!({
                    "limit": SetDocument::from(&k),
                    "distances": table.iter().map(|d| ctx.rational(d)).collect::<Vec<_>>(),
                }))
            } else {
                None
            };
            emit(&m, json!({ "diagnostic": report, "monotone": limit }));
        }
        Command::Immeasurable { a, b } => {
            let m = RunManifest::new("immeasurable", &[&a, &b]);
            let (pa, pb) = (
                read_set(&a)?.to_polyhedron()?,
                read_set(&b)?.to_polyhedron()?,
            );
            let w = immeasurable_witness(&pa, &pb);
            emit(
                &m,
                json!({
                    "immeasurable": w.is_some(),
                    "witness": w.as_ref().map(shorthand),
                    "witness_vector": w,
                }),
            );
        }
        Command::Demo {
            m: level,
            directions,
            seed,
        } => {
            let mut m = RunManifest::new("demo", &[]);
            m.seed = Some(seed);
            let ce = counterexample_demo(level)?;
            let sweep = polygon_degeneracy_sweep(3..=6, directions, seed)?;
            emit(
                &m,
                json!({
                    "counterexample": {
                        "points": ce.points,
                        "distances": ce.distances.iter().map(|(i, d)| json!([i, ctx.rational(d)])).collect::<Vec<_>>(),
                        "max_l1_norm": ctx.rational(&ce.max_l1_norm),
                    },
                    "polygon_sweep": sweep.iter().map(|r| json!({
                        "k": r.k,
                        "vertices": r.vertices,
                        "max_distance": ctx.rational(&r.max_distance),
                        "direction": r.best_direction,
                        "ratio": r.ratio.as_ref().map(|x| ctx.rational(x)),
                    })).collect::<Vec<_>>(),
                }),
            );
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("wstar: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
