use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Deserialize;
use serde_json::{json, Value};

use hilbsq::hyperbolic::{free_product_structure, signature_from_lambda, solve_triangle, distance_cosh, InteriorPoint, SignatureVerdict};
use hilbsq::isometry::{classify, fixed_points, g_star, FixedPoints, LatticeIsometry};
use hilbsq::json_int::JsonInt;
use hilbsq::lattice::{default_polarization, is_ample_hilb, is_k_very_ample, minus_d_classes, HilbClass, SurfaceClass};
use hilbsq::render::{disk_point, render_svg, DiskScene};
use hilbsq::verify::{self, VerifyConfig};
use hilbsq::words::decompose;

#[derive(Parser)]
#[command(name = "hilbsq", version, about = "Automorphisms of the Hilbert square of Cayley's K3 surface")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Coordinate bound for lattice searches.
    #[arg(long, global = true, default_value_t = 200, value_parser = clap::value_parser!(u64).range(1..))]
    bound: u64,
    /// Largest |l| tried when looking for a descending involution.
    #[arg(long = "lmax", global = true, default_value_t = 64, value_parser = clap::value_parser!(u64).range(1..))]
    l_max: u64,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Write the output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Subcommand)]
enum Command {
    /// Run the full check suite.
    Verify {
        /// Random words in the round-trip check.
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        /// Replace the generator matrices, as a JSON array of three matrices.
        #[arg(long, hide = true)]
        inject_generators: Option<String>,
    },
    /// Classify an isometry given as {"matrix": [[..],[..],[..]]}.
    Classify { input: String },
    /// Write an isometry as a reduced word in ι₀, ι₁, ι₂.
    Decompose { input: String },
    /// Ampleness of a class {"x":..,"e":..,"y":..} on X^[2].
    Ample { input: String },
    /// k-very ampleness of a class {"x":..,"y":..} on X.
    Kvample {
        input: String,
        #[arg(long, default_value_t = 1)]
        k: u64,
    },
    /// Solve the triangle of three interior points (default: the involution fixed points).
    Triangle { input: Option<String> },
    /// Render the disk picture as SVG.
    Plot {
        /// Length of the g*-orbit of h₁ to draw.
        #[arg(long, default_value_t = 6)]
        orbit: usize,
        /// Render an empty disk.
        #[arg(long)]
        empty: bool,
    },
    /// The g*-orbit of a class (default h₁ = {"x":1,"e":0,"y":0}).
    Orbit {
        input: Option<String>,
        #[arg(long, default_value_t = 6)]
        steps: usize,
    },
    /// Stream all classes of a given square within --bound as JSON lines.
    Classes {
        #[arg(long, allow_hyphen_values = true)]
        square: i64,
    },
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error("{0}")]
    Parse(String),
    #[error("{0}")]
    Domain(String),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    fn kind(&self) -> &'static str {
        match self {
            CliError::Parse(_) => "parse",
            CliError::Domain(_) => "domain",
            CliError::Io(_) => "io",
        }
    }

    fn code(&self) -> u8 {
        match self {
            CliError::Parse(_) => 2,
            CliError::Domain(_) | CliError::Io(_) => 3,
        }
    }
}

fn domain(e: impl std::fmt::Display) -> CliError {
    CliError::Domain(e.to_string())
}

struct Output {
    json: Value,
    text: String,
    passed: bool,
}

impl Output {
    fn ok(json: Value, text: String) -> Self {
        Output { json, text, passed: true }
    }
}

fn read_input(input: &str) -> Result<String, CliError> {
    let t = input.trim_start();
    if t.starts_with('{') || t.starts_with('[') {
        return Ok(input.to_string());
    }
    if input == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s).map_err(|e| CliError::Parse(format!("stdin: {e}")))?;
        return Ok(s);
    }
    std::fs::read_to_string(input).map_err(|e| CliError::Parse(format!("{input}: {e}")))
}

fn parse<T: for<'de> Deserialize<'de>>(input: &str) -> Result<T, CliError> {
    serde_json::from_str(&read_input(input)?).map_err(|e| CliError::Parse(e.to_string()))
}

#[derive(Deserialize)]
struct RawMatrix {
    matrix: [[JsonInt; 3]; 3],
}

fn parse_isometry(input: &str) -> Result<LatticeIsometry, CliError> {
    let raw: RawMatrix = parse(input)?;
    LatticeIsometry::new(raw.matrix.map(|r| r.map(|x| x.0))).map_err(domain)
}

fn to_json<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("serializable")
}

fn cmd_verify(cli: &Cli, samples: usize, inject: Option<&str>) -> Result<Output, CliError> {
    let mut cfg = VerifyConfig { bound: cli.bound, l_max: cli.l_max, seed: cli.seed, samples, ..VerifyConfig::default() };
    if let Some(g) = inject {
        cfg.generators = serde_json::from_str(g).map_err(|e| CliError::Parse(format!("generators: {e}")))?;
    }
    let report = verify::run(&cfg);
    let mut text = String::new();
    for c in &report.checks {
        let status = if c.passed { "PASS" } else { "FAIL" };
        text.push_str(&format!("{status} {:<24} [{}] {}\n", c.name, c.anchor, c.detail));
    }
    let passed = report.all_passed();
    text.push_str(if passed { "all checks passed\n" } else { "some checks failed\n" });
    Ok(Output { json: json!({ "passed": passed, "checks": report.checks }), text, passed })
}

fn cmd_classify(input: &str) -> Result<Output, CliError> {
    let m = parse_isometry(input)?;
    let class = classify(&m).map_err(domain)?;
    let fixed = fixed_points(&m).map_err(domain)?;
    let mut json = to_json(&class);
    json["fixed_points"] = to_json(&fixed);
    let text = format!("{} (so trace {})\nfixed points: {}\n", class.kind_name(), class.so_trace, to_json(&fixed));
    Ok(Output::ok(json, text))
}

fn cmd_decompose(cli: &Cli, input: &str) -> Result<Output, CliError> {
    let m = parse_isometry(input)?;
    let d = decompose(&m, cli.l_max).map_err(domain)?;
    let json = json!({
        "letters": d.word.letters(),
        "natural_power": d.natural_power,
        "steps": d.steps,
    });
    let mut text = format!("word: {}\n", d.word);
    for (i, s) in d.steps.iter().enumerate() {
        text.push_str(&format!("step {i}: n = {} (k = {}, l = {}), λ {} -> {}\n", s.n, s.k, s.l, s.lam_before, s.lam_after));
    }
    Ok(Output::ok(json, text))
}

fn cmd_ample(cli: &Cli, input: &str) -> Result<Output, CliError> {
    let c: HilbClass = parse(input)?;
    let a = is_ample_hilb(&c, &default_polarization(), cli.bound).map_err(domain)?;
    let json = json!({ "ample": a.is_ample(), "certificate": a });
    let text = format!("{c}: {}\n{}\n", if a.is_ample() { "ample" } else { "not ample" }, json["certificate"]);
    Ok(Output::ok(json, text))
}

fn cmd_kvample(input: &str, k: u64) -> Result<Output, CliError> {
    let l: SurfaceClass = parse(input)?;
    let v = is_k_very_ample(&l, k).map_err(domain)?;
    let json = json!({ "k": k, "k_very_ample": v.holds, "certificate": v.certificate });
    let verdict = if v.holds { "is" } else { "is not" };
    let text = format!("({}, {}) {verdict} {k}-very ample\n{}\n", l.x, l.y, json["certificate"]);
    Ok(Output::ok(json, text))
}

fn cmd_triangle(input: Option<&str>) -> Result<Output, CliError> {
    let classes: Vec<HilbClass> = match input {
        Some(s) => parse(s)?,
        None => hilbsq::hyperbolic::generator_fixed_points().iter().map(|p| p.class().clone()).collect(),
    };
    let [a, b, c]: [HilbClass; 3] =
        classes.try_into().map_err(|v: Vec<HilbClass>| CliError::Parse(format!("expected 3 classes, got {}", v.len())))?;
    let p = [a, b, c].map(InteriorPoint::new);
    let [p0, p1, p2] = match p {
        [Ok(x), Ok(y), Ok(z)] => [x, y, z],
        _ => return Err(CliError::Domain("every vertex must have positive square".into())),
    };
    // side a is opposite P₀, and so on
    let ca = distance_cosh(&p1, &p2).map_err(domain)?;
    let cb = distance_cosh(&p0, &p2).map_err(domain)?;
    let cc = distance_cosh(&p0, &p1).map_err(domain)?;
    let tri = solve_triangle(&ca, &cb, &cc).map_err(domain)?;
    let mut json = json!({ "triangle": tri });
    let mut text = format!(
        "cosh sides: {}, {}, {}\nangles: {:.12}, {:.12}, {:.12}\nλ = {}\n",
        ca, cb, cc, tri.angles[0], tri.angles[1], tri.angles[2],
        tri.lambda.as_ref().map(|l| l.to_string()).unwrap_or_else(|| format!("{:.12}", tri.lambda_approx)),
    );
    let verdict = match &tri.lambda {
        Some(l) => signature_from_lambda(l),
        None => hilbsq::hyperbolic::signature_from_lambda_f64(tri.lambda_approx),
    };
    if let SignatureVerdict::Signature { signature } = &verdict {
        let fp = free_product_structure(signature).map_err(domain)?;
        json["free_product"] = json!(fp.to_string());
        text.push_str(&format!("signature {signature}, group {fp}\n"));
    } else {
        text.push_str("exceptional λ\n");
    }
    json["signature"] = to_json(&verdict);
    Ok(Output::ok(json, text))
}

fn cmd_plot(orbit: usize, empty: bool) -> Result<Output, CliError> {
    let scene = if empty {
        DiskScene::empty()
    } else if orbit == 0 {
        DiskScene::standard()
    } else {
        DiskScene::standard_with_orbit(orbit)
    };
    let svg = render_svg(&scene);
    Ok(Output::ok(Value::String(svg.clone()), svg))
}

fn cmd_orbit(input: Option<&str>, steps: usize) -> Result<Output, CliError> {
    let base: HilbClass = match input {
        Some(s) => parse(s)?,
        None => HilbClass::new(1, 0, 0),
    };
    let g = g_star();
    let mut cur = base;
    let mut points = Vec::new();
    let mut text = String::new();
    for i in 0..=steps {
        let (x, y) = disk_point(&cur).map_err(domain)?;
        text.push_str(&format!("{i}: {cur} -> ({x:.15}, {y:.15})\n"));
        points.push(json!({ "step": i, "class": cur, "disk": [x, y] }));
        cur = g.apply(&cur);
    }
    let mut json = json!({ "points": points });
    if let Ok(FixedPoints::Boundary { attracting, .. }) = fixed_points(&g) {
        text.push_str(&format!("limit: {}\n", to_json(&attracting)));
        json["limit"] = to_json(&attracting);
    }
    Ok(Output::ok(json, text))
}

fn cmd_classes(cli: &Cli, square: i64) -> Result<Output, CliError> {
    let found = minus_d_classes(square, cli.bound);
    let lines: Vec<String> = found.iter().map(|c| to_json(c).to_string()).collect();
    let mut text = lines.join("\n");
    if !text.is_empty() {
        text.push('\n');
    }
    Ok(Output::ok(Value::Array(found.iter().map(to_json).collect()), text))
}

/// Writes to a sibling temporary file and renames it into place.
fn write_atomic(path: &Path, contents: &str) -> Result<(), CliError> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let io = |e: std::io::Error| CliError::Io(format!("{}: {e}", path.display()));
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
    tmp.write_all(contents.as_bytes()).map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}

fn run(cli: &Cli) -> Result<Output, CliError> {
    match &cli.command {
        Command::Verify { samples, inject_generators } => cmd_verify(cli, *samples, inject_generators.as_deref()),
        Command::Classify { input } => cmd_classify(input),
        Command::Decompose { input } => cmd_decompose(cli, input),
        Command::Ample { input } => cmd_ample(cli, input),
        Command::Kvample { input, k } => cmd_kvample(input, *k),
        Command::Triangle { input } => cmd_triangle(input.as_deref()),
        Command::Plot { orbit, empty } => cmd_plot(*orbit, *empty),
        Command::Orbit { input, steps } => cmd_orbit(input.as_deref(), *steps),
        Command::Classes { square } => cmd_classes(cli, *square),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let raw_svg = matches!(cli.command, Command::Plot { .. });
    let streamed = matches!(cli.command, Command::Classes { .. });
    match run(&cli) {
        Ok(out) => {
            let body = if raw_svg || cli.format == Format::Text || streamed {
                out.text
            } else {
                format!("{}\n", out.json)
            };
            let written = match &cli.out {
                Some(p) => write_atomic(p, &body),
                None => std::io::stdout().write_all(body.as_bytes()).map_err(|e| CliError::Io(e.to_string())),
            };
            if let Err(e) = written {
                return report_error(&cli, e);
            }
            if out.passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => report_error(&cli, e),
    }
}

fn report_error(cli: &Cli, e: CliError) -> ExitCode {
    match cli.format {
        Format::Json => println!("{}", json!({ "error": { "kind": e.kind(), "message": e.to_string() } })),
        Format::Text => eprintln!("error ({}): {e}", e.kind()),
    }
    ExitCode::from(e.code())
}
