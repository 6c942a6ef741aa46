//! `qdkit` command-line front end.

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64 as C64;
use qdkit::construct::{
    build_bounded_config, build_unbounded_config, count_complement_components, with_raster, ConstructionPlan, RASTER_RESOLUTION,
};
use qdkit::curvegeo::{analyze, census, BoundaryMap, Family, DEFAULT_GRID};
use qdkit::inscribe::{genuine_cardioid, genuine_deltoid, inscribe_cardioid, inscribe_circle, placed_points, InscriptionResult};
use qdkit::lenssolve::{check_sharp_bound, search_max_images, sharp_bound, solve_lens, verify_lefschetz, ConstructionSeed, RESIDUAL_TOL};
use qdkit::quadcheck::{schwarz_principal_part, verify_quadrature_identity, IDENTITY_TOL};
use qdkit::ratfun::{ComplexPoly, LaurentPoly, RationalMap};
use qdkit::suffridge::{extremalize, known_suffridge, starred_seed};
use qdkit::{Error, Result};
use serde_json::{json, Value};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

/// Environment variable naming the default output directory.
const OUT_DIR_ENV: &str = "QDKIT_OUT_DIR";

#[derive(Parser)]
#[command(name = "qdkit", version, about = "Quadrature domains, Suffridge polynomials and anti-holomorphic fixed points")]
struct Cli {
    /// Seed recorded in every output and used by randomized pipelines.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// JSON output path (default: <QDKIT_OUT_DIR>/<command>.json when the variable is set).
    #[arg(long, global = true)]
    json: Option<PathBuf>,
    /// SVG output path.
    #[arg(long, global = true)]
    svg: Option<PathBuf>,
    /// CSV output path.
    #[arg(long, global = true)]
    csv: Option<PathBuf>,
    #[command(subcommand)]
    command: Group,
}

#[derive(Subcommand)]
enum Group {
    /// Fixed points of r(z) = conj(z) and lens configurations.
    #[command(subcommand)]
    Lens(LensCmd),
    /// Boundary-curve singularities and curvature.
    #[command(subcommand)]
    Curve(CurveCmd),
    /// Quadrature identity checks.
    #[command(subcommand)]
    Quad(QuadCmd),
    /// Inscription into the deltoid.
    #[command(subcommand)]
    Inscribe(InscribeCmd),
    /// Extremalization toward Suffridge polynomials.
    #[command(subcommand)]
    Suffridge(SuffridgeCmd),
    /// Sharpness constructions.
    #[command(subcommand)]
    Construct(ConstructCmd),
}

#[derive(Subcommand)]
enum LensCmd {
    /// Solve r(z) = conj(z) and classify the fixed points.
    Solve(RationalArgs),
    /// Compare the fixed-point count with the sharp bound.
    Bound(RationalArgs),
    /// Search a lens configuration with many images.
    Search {
        /// Number of masses.
        #[arg(long, default_value_t = 2)]
        n: usize,
        /// Shear of the seed ellipse.
        #[arg(long, default_value_t = 0.5)]
        gamma: f64,
        /// Evaluation budget.
        #[arg(long, default_value_t = 10_000)]
        budget: usize,
    },
}

#[derive(Args)]
struct RationalArgs {
    /// Rational map as `num/den`, each a JSON array of [re, im] pairs by ascending power.
    #[arg(long)]
    rational: String,
    /// Residual tolerance for |r(z) - conj z|.
    #[arg(long, default_value_t = RESIDUAL_TOL)]
    tol: f64,
}

#[derive(Args)]
struct MapArgs {
    /// Family: S (polynomials on the disk) or Sigma (exterior Laurent maps).
    #[arg(long, default_value = "S")]
    family: String,
    /// Degree of an explicit Suffridge polynomial from the catalog.
    #[arg(long, conflicts_with = "coeffs")]
    known: Option<usize>,
    /// Coefficients as a JSON array of [re, im] pairs, starting at power `lo`.
    #[arg(long)]
    coeffs: Option<String>,
    /// Lowest power of `coeffs`.
    #[arg(long, default_value_t = 0, allow_negative_numbers = true)]
    lo: i32,
}

#[derive(Subcommand)]
enum CurveCmd {
    /// Cusps, double points, curvature and census.
    Analyze {
        #[command(flatten)]
        map: MapArgs,
        #[arg(long, default_value_t = 1024)]
        samples: usize,
        #[arg(long, default_value_t = DEFAULT_GRID)]
        grid: usize,
    },
    /// SVG (and optional CSV) of the boundary curve.
    Plot {
        #[command(flatten)]
        map: MapArgs,
        #[arg(long, default_value_t = 1024)]
        samples: usize,
        #[arg(long, default_value_t = DEFAULT_GRID)]
        grid: usize,
    },
}

#[derive(Subcommand)]
enum QuadCmd {
    /// Quadrature identity for moments k = 0..kmax.
    Verify {
        /// Catalog map given as FAMILY DEGREE (S-class only).
        #[arg(long, num_args = 2, value_names = ["FAMILY", "DEGREE"], conflicts_with = "poly")]
        known: Option<Vec<String>>,
        /// Polynomial as a JSON array of [re, im] pairs by ascending power.
        #[arg(long)]
        poly: Option<String>,
        #[arg(long, default_value_t = 5)]
        kmax: usize,
        #[arg(long, default_value_t = IDENTITY_TOL)]
        tol: f64,
    },
}

#[derive(Subcommand)]
enum InscribeCmd {
    /// Largest cardioid in the deltoid.
    Cardioid,
    /// Largest disk in the deltoid.
    Circle,
}

#[derive(Subcommand)]
enum SuffridgeCmd {
    /// Extremalize from the symmetric starred seed.
    Search {
        #[arg(long, default_value = "S")]
        family: String,
        #[arg(long)]
        d: usize,
        #[arg(long, default_value_t = 24)]
        max_rounds: usize,
    },
}

#[derive(Args)]
struct ConstructArgs {
    /// Node multiplicities, e.g. 2,1,1.
    #[arg(long, value_delimiter = ',', required = true)]
    partition: Vec<usize>,
    /// Also count faces with the rasterization oracle.
    #[arg(long)]
    raster: bool,
    #[arg(long, default_value_t = RASTER_RESOLUTION)]
    resolution: usize,
}

#[derive(Subcommand)]
enum ConstructCmd {
    /// Unbounded quadrature domain.
    Uqd {
        #[command(flatten)]
        args: ConstructArgs,
        /// Multiplicity of the node placed at infinity (one of the parts).
        #[arg(long)]
        infinity: Option<usize>,
    },
    /// Bounded quadrature domain.
    Bqd {
        #[command(flatten)]
        args: ConstructArgs,
    },
}

/// Files a command wants to write besides the JSON report.
#[derive(Default)]
struct Artifacts {
    /// Renders the SVG given the final manifest text.
    svg: Option<Box<dyn FnOnce(&str) -> String>>,
    csv: Option<String>,
    extra: Vec<(String, String)>,
}

struct Run {
    name: String,
    manifest: Value,
    result: Value,
    artifacts: Artifacts,
    violation: Option<String>,
}

fn family(s: &str) -> Result<Family> {
    Family::parse(s)
}

fn parse_json<T: serde::de::DeserializeOwned>(what: &str, s: &str) -> Result<T> {
    serde_json::from_str(s).map_err(|e| Error::Input(format!("malformed {what}: {e}")))
}

fn boundary_map(a: &MapArgs) -> Result<(BoundaryMap, Value)> {
    let fam = family(&a.family)?;
    match (a.known, &a.coeffs) {
        (Some(d), _) => Ok((known_suffridge(fam, d)?, json!({"family": fam, "known": d}))),
        (None, Some(c)) => {
            let coeffs: Vec<C64> = parse_json("coefficients", c)?;
            let map = BoundaryMap::new(fam, LaurentPoly::new(a.lo, coeffs.clone()))?;
            Ok((map, json!({"family": fam, "lo": a.lo, "coeffs": coeffs})))
        }
        (None, None) => Err(Error::Input("give --known or --coeffs".into())),
    }
}

fn c2(z: C64) -> Value {
    json!([z.re, z.im])
}

fn lens(cmd: LensCmd, seed: u64) -> Result<Run> {
    match cmd {
        LensCmd::Solve(a) => {
            let r = RationalMap::parse(&a.rational)?;
            let rep = solve_lens(&r, a.tol)?;
            Ok(Run {
                name: "lens-solve".into(),
                manifest: json!({"input": {"rational": a.rational}, "tolerances": {"residual": a.tol}}),
                result: rep.to_json(),
                artifacts: Artifacts::default(),
                violation: None,
            })
        }
        LensCmd::Bound(a) => {
            let r = RationalMap::parse(&a.rational)?;
            let rep = solve_lens(&r, a.tol)?;
            let bound = sharp_bound(rep.d, rep.n);
            let holds = check_sharp_bound(&rep);
            let lefschetz = verify_lefschetz(&rep).ok();
            let mut violation = (!holds).then(|| format!("Fhat = {} exceeds the bound {bound}", rep.fhat));
            if let Some(res) = lefschetz.filter(|&x| x != 0) {
                violation = Some(format!("Lefschetz residual {res}"));
            }
            Ok(Run {
                name: "lens-bound".into(),
                manifest: json!({"input": {"rational": a.rational}, "tolerances": {"residual": a.tol}}),
                result: json!({"Fhat": rep.fhat, "d": rep.d, "n": rep.n, "bound": bound, "holds": holds, "tight": rep.fhat == bound, "lefschetzResidual": lefschetz}),
                artifacts: Artifacts::default(),
                violation,
            })
        }
        LensCmd::Search { n, gamma, budget } => {
            let start = ConstructionSeed::ellipse_disks(n, gamma);
            let out = search_max_images(n, &start, budget, seed)?;
            let r = qdkit::lenssolve::lens_from_masses(&out.config)?;
            let rep = solve_lens(&r, RESIDUAL_TOL)?;
            let violation = (!check_sharp_bound(&rep)).then(|| format!("Fhat = {} exceeds the sharp bound", rep.fhat));
            Ok(Run {
                name: "lens-search".into(),
                manifest: json!({"input": {"n": n, "gamma": gamma, "seedGeometry": start}, "tolerances": {"residual": RESIDUAL_TOL}, "budget": budget}),
                result: json!({
                    "config": out.config,
                    "images": out.images,
                    "target": out.target,
                    "shortfall": out.shortfall,
                    "evaluations": out.evaluations,
                    "report": rep.to_json(),
                }),
                artifacts: Artifacts::default(),
                violation,
            })
        }
    }
}

fn census_json(map: &BoundaryMap, grid: usize) -> Result<Value> {
    let (cen, _) = census(map, grid)?;
    let (cap_c, cap_d) = map.caps();
    Ok(json!({
        "cusps": cen.cusp_count,
        "doubles": cen.double_point_count,
        "extreme": cen.is_extreme,
        "caps": [cap_c, cap_d],
        "perComponent": cen.per_component,
    }))
}

fn curve(cmd: CurveCmd) -> Result<Run> {
    let (plot, map_args, samples, grid) = match cmd {
        CurveCmd::Analyze { map, samples, grid } => (false, map, samples, grid),
        CurveCmd::Plot { map, samples, grid } => (true, map, samples, grid),
    };
    let (map, input) = boundary_map(&map_args)?;
    let curve = analyze(&map, samples, grid)?;
    let manifest = json!({"input": input, "samples": samples, "grid": grid});
    let mut result = json!({
        "family": map.family,
        "degree": curve.degree,
        "cusps": curve.cusps.iter().map(|c| json!({"t": c.t, "point": c2(c.point)})).collect::<Vec<_>>(),
        "doublePoints": curve.double_points.iter().map(|d| json!({"tMinus": d.t_minus, "tPlus": d.t_plus, "point": c2(d.point)})).collect::<Vec<_>>(),
        "warnings": curve.warnings,
    });
    if !plot {
        result["census"] = census_json(&map, grid)?;
        result["curvatureDeviation"] = json!(curve.curvature_deviation());
        result["doubleAngleResidual"] = json!(qdkit::curvegeo::verify_double_angle_relation(&curve));
    }
    let csv = curve.to_csv();
    let artifacts = Artifacts { svg: Some(Box::new(move |m: &str| curve.to_svg(m))), csv: Some(csv), extra: Vec::new() };
    Ok(Run { name: if plot { "curve-plot" } else { "curve-analyze" }.into(), manifest, result, artifacts, violation: None })
}

fn quad(cmd: QuadCmd) -> Result<Run> {
    let QuadCmd::Verify { known, poly, kmax, tol } = cmd;
    let (f, input) = match (known, poly) {
        (Some(k), _) => {
            let fam = family(&k[0])?;
            if fam != Family::S {
                return Err(Error::Input("quad verify takes S-class polynomials".into()));
            }
            let d: usize = k[1].parse().map_err(|_| Error::Input(format!("bad degree {:?}", k[1])))?;
            let map = known_suffridge(fam, d)?;
            let p = map.f.as_poly().ok_or_else(|| Error::Input("catalog map is not a polynomial".into()))?;
            (p, json!({"known": ["S", d]}))
        }
        (None, Some(p)) => {
            let f: ComplexPoly = parse_json("polynomial", &p)?;
            (f, json!({"poly": p}))
        }
        (None, None) => return Err(Error::Input("give --known or --poly".into())),
    };
    let data = schwarz_principal_part(&f)?;
    let res = verify_quadrature_identity(&f, kmax)?;
    let bad: Vec<usize> = res.iter().filter(|m| m.residual > tol * m.lhs.norm().max(1.0)).map(|m| m.k).collect();
    let violation = (!bad.is_empty()).then(|| format!("quadrature identity fails for k = {bad:?}"));
    Ok(Run {
        name: "quad-verify".into(),
        manifest: json!({"input": input, "kmax": kmax, "tolerances": {"identity": tol}}),
        result: json!({
            "quadratureFunction": data.to_json(),
            "moments": res.iter().map(|m| json!({"k": m.k, "area": c2(m.lhs), "contour": c2(m.rhs), "residual": m.residual})).collect::<Vec<_>>(),
        }),
        artifacts: Artifacts::default(),
        violation,
    })
}

fn inscription_run(name: &str, res: InscriptionResult, template: Option<&qdkit::planecurve::PlaneCurve>) -> Run {
    let target = genuine_deltoid();
    let manifest = json!({"input": {"target": "deltoid", "shape": name}, "tolerances": {
        "tangency": qdkit::inscribe::TANGENCY_TOL, "penetration": qdkit::inscribe::PENETRATION_TOL}});
    let placed = placed_points(&res, template, 1024);
    let violation = (res.penetration > qdkit::inscribe::PENETRATION_TOL).then(|| format!("penetration {:.3e}", res.penetration));
    let result = res.to_json();
    Run {
        name: format!("inscribe-{name}"),
        manifest,
        result,
        artifacts: Artifacts { svg: Some(Box::new(move |m: &str| res.to_svg(&target, &placed, m))), ..Default::default() },
        violation,
    }
}

fn inscribe(cmd: InscribeCmd) -> Result<Run> {
    let target = genuine_deltoid();
    match cmd {
        InscribeCmd::Cardioid => {
            let tpl = genuine_cardioid();
            let res = inscribe_cardioid(&target, &tpl)?;
            Ok(inscription_run("cardioid", res, Some(&tpl)))
        }
        InscribeCmd::Circle => Ok(inscription_run("circle", inscribe_circle(&target)?, None)),
    }
}

fn suffridge(cmd: SuffridgeCmd) -> Result<Run> {
    let SuffridgeCmd::Search { family: fam, d, max_rounds } = cmd;
    let fam = family(&fam)?;
    let seed_map = starred_seed(fam, d)?;
    let out = extremalize(&seed_map, max_rounds)?;
    Ok(Run {
        name: "suffridge-search".into(),
        manifest: json!({"input": {"family": fam, "d": d, "seedMap": seed_map.f}, "maxRounds": max_rounds}),
        result: json!({
            "starred": out.starred.f,
            "gauged": out.gauged.f,
            "census": {"cusps": out.census.cusp_count, "doubles": out.census.double_point_count, "extreme": out.census.is_extreme},
            "rounds": out.rounds,
            "shortfall": out.shortfall,
        }),
        artifacts: Artifacts { extra: vec![("trace.jsonl".into(), out.trace_jsonl())], ..Default::default() },
        violation: None,
    })
}

fn construct(cmd: ConstructCmd) -> Result<Run> {
    let (name, plan, args): (&str, ConstructionPlan, ConstructArgs) = match cmd {
        ConstructCmd::Uqd { args, infinity } => ("construct-uqd", build_unbounded_config(&args.partition, infinity)?, args),
        ConstructCmd::Bqd { args } => ("construct-bqd", build_bounded_config(&args.partition)?, args),
    };
    let mut report = count_complement_components(&plan)?;
    if args.raster {
        report = with_raster(report, &plan, args.resolution)?;
    }
    let mut violation = None;
    if let Some(r) = &report.raster {
        if r.components != report.face_count {
            violation = Some(format!("raster oracle counts {} faces, arrangement {}", r.components, report.face_count));
        }
    }
    let manifest = json!({"input": {"kind": plan.kind, "partition": args.partition, "infinity": plan.infinity},
        "raster": args.raster.then_some(args.resolution)});
    let result = json!({"plan": plan.to_json(), "report": report.to_json()});
    Ok(Run {
        name: name.into(),
        manifest,
        result,
        artifacts: Artifacts { svg: Some(Box::new(move |m: &str| plan.to_svg(m, Some(&report.arrangement)))), ..Default::default() },
        violation,
    })
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| Error::Input(format!("cannot create {}: {e}", dir.display())))?;
    }
    std::fs::write(path, text).map_err(|e| Error::Input(format!("cannot write {}: {e}", path.display())))
}

fn output_path(explicit: Option<PathBuf>, out_dir: Option<&Path>, name: &str, ext: &str) -> Option<PathBuf> {
    explicit.or_else(|| out_dir.map(|d| d.join(format!("{name}.{ext}"))))
}

fn execute(cli: Cli) -> Result<Option<String>> {
    let seed = cli.seed;
    let run = match cli.command {
        Group::Lens(c) => lens(c, seed)?,
        Group::Curve(c) => curve(c)?,
        Group::Quad(c) => quad(c)?,
        Group::Inscribe(c) => inscribe(c)?,
        Group::Suffridge(c) => suffridge(c)?,
        Group::Construct(c) => construct(c)?,
    };
    let out_dir = std::env::var_os(OUT_DIR_ENV).map(PathBuf::from);
    let out_dir = out_dir.as_deref();
    let json_path = output_path(cli.json, out_dir, &run.name, "json");
    let svg_path = run.artifacts.svg.as_ref().and_then(|_| output_path(cli.svg, out_dir, &run.name, "svg"));
    let csv_path = run.artifacts.csv.as_ref().and_then(|_| output_path(cli.csv, out_dir, &run.name, "csv"));
    let path_str = |p: &Option<PathBuf>| p.as_ref().map(|p| p.display().to_string());
    let mut manifest = run.manifest;
    manifest["subcommand"] = json!(run.name.replacen('-', " ", 1));
    manifest["seed"] = json!(seed);
    manifest["outputs"] = json!({"json": path_str(&json_path), "svg": path_str(&svg_path), "csv": path_str(&csv_path)});
    let manifest_text = manifest.to_string();
    let doc = json!({"schema": 1, "seed": seed, "manifest": manifest, "result": run.result});
    let text = serde_json::to_string_pretty(&doc).expect("JSON values serialize") + "\n";
    match &json_path {
        Some(p) => write_file(p, &text)?,
        None => print!("{text}"),
    }
    if let (Some(p), Some(render)) = (&svg_path, run.artifacts.svg) {
        write_file(p, &render(&manifest_text))?;
    }
    if let (Some(p), Some(csv)) = (&csv_path, &run.artifacts.csv) {
        write_file(p, csv)?;
    }
    if let Some(base) = json_path.as_ref().and_then(|p| p.parent()).or(out_dir) {
        for (suffix, body) in &run.artifacts.extra {
            write_file(&base.join(format!("{}.{suffix}", run.name)), body)?;
        }
    }
    Ok(run.violation)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(cli) {
        Ok(None) => ExitCode::SUCCESS,
        Ok(Some(v)) => {
            eprintln!("qdkit: invariant violated: {v}");
            ExitCode::from(2)
        }
        Err(e @ Error::Invariant(_)) => {
            eprintln!("qdkit: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("qdkit: {e}");
            ExitCode::from(1)
        }
    }
}
