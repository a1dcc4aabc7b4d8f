//! The `handleforge` command line.
//!
//! Reports go to standard output (or `--output`) as JSON with a `schema`
//! field. Exit status: 0 on success, 1 when validation or the pipeline fails,
//! 2 on usage or parse errors.

use crate::complex::{validate_complex, CellComplex, ValidationReport};
use crate::cusps::{
    attach_geometry, classify_cusp, enumerate_slopes, exceeds_two_pi, periphery, slope_length, vertex_links,
    word_names, CuspClassification, CuspGeometry, CuspSection,
};
use crate::diagram::{emit, scene3, scene4, track_meridians, Layout, RenderOptions, ViewAxis};
use crate::error::{Error, Result};
use crate::filling::{
    budget_from_env, certify_sphere, fill, instruction, link_exterior, parse_slopes, presentation, search_fillings,
    LinkComponent, SphereReport,
};
use crate::group::{tietze_simplify, Move, PresentationDoc};
use crate::handles::{
    chain_complex, cycle_membership, euler_characteristic, handle_decomposition, homology, HandleDecomposition,
    HomologyProfile,
};
use crate::library;
use crate::pairing::{
    face_cycles, load_document, load_pairing, orientation_character, to_document, validate_pairing, CharacterReport,
    FaceCycle, SidePairingSet,
};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};

#[derive(Parser, Debug)]
#[command(name = "handleforge", version, about = "Handle decompositions from polytope side-pairings")]
struct Cli {
    /// Print human-readable tables to standard error.
    #[arg(long, global = true)]
    verbose: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct Input {
    /// Complex document, optionally carrying its pairings.
    #[arg(long, conflicts_with = "example")]
    input: Option<PathBuf>,
    /// Separate pairing document.
    #[arg(long, requires = "input")]
    pairing: Option<PathBuf>,
    /// Use a bundled example instead of a file.
    #[arg(long)]
    example: Option<String>,
    /// Write the report here instead of standard output.
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check a complex and its pairing.
    Validate(Input),
    /// List the cycles of k-faces.
    Cycles {
        #[command(flatten)]
        input: Input,
        #[arg(short, default_value_t = 1)]
        k: usize,
    },
    /// Handle counts, cycle membership and chain ranks.
    Handles(Input),
    /// Homology of the handle chain complex.
    Homology(Input),
    /// Presentation of the fundamental group and its Tietze simplification.
    Pi1 {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        budget: Option<usize>,
    },
    /// Cusp cross-sections, peripheral bases and short slopes.
    Cusps {
        #[command(flatten)]
        input: Input,
        /// Geometry sidecar for slope lengths.
        #[arg(long)]
        geometry: Option<PathBuf>,
        /// List slopes with coordinates up to this bound.
        #[arg(long, default_value_t = 0)]
        bound: i64,
    },
    /// Dehn-fill cusps and try to recognise the sphere.
    Fill {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        slopes: PathBuf,
        #[arg(long)]
        budget: Option<usize>,
    },
    /// Try every combination of short slopes.
    Search {
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value_t = 1)]
        bound: i64,
        #[arg(long)]
        budget: Option<usize>,
        #[arg(long)]
        geometry: Option<PathBuf>,
    },
    /// Emit a handle diagram.
    Diagram {
        #[command(flatten)]
        input: Input,
        /// Layout document; bundled examples have a default.
        #[arg(long)]
        layout: Option<PathBuf>,
        #[arg(long, default_value = "svg")]
        format: String,
        #[arg(long, default_value = "z")]
        view_axis: String,
        #[arg(long, default_value_t = 800)]
        width: u32,
        #[arg(long, default_value_t = 800)]
        height: u32,
        /// Meridians to draw, with their longitudes, as tracked curves.
        #[arg(long)]
        slopes: Option<PathBuf>,
    },
    /// Write the bundled inputs into a directory.
    Examples {
        #[arg(long, default_value = "examples")]
        dir: PathBuf,
    },
}

struct Failed(i32, String);

impl From<Error> for Failed {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Parse(_)
            | Error::Schema(_)
            | Error::Dimension(_)
            | Error::UnknownCell(_)
            | Error::UnknownGenerator(_)
            | Error::Format(_)
            | Error::Label(_)
            | Error::Io(_) => 2,
            _ => 1,
        };
        Failed(code, e.to_string())
    }
}

/// Run the command line on `argv` (including the program name), printing to
/// the process streams.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(argv, &mut stdout.lock(), &mut stderr.lock())
}

/// [`run`] with explicit output streams.
pub fn run_with<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { out.write_all(text.as_bytes()) } else { err.write_all(text.as_bytes()) };
            return code;
        }
    };
    let verbose = cli.verbose;
    match dispatch(cli.command, verbose, out, err) {
        Ok(code) => code,
        Err(Failed(code, msg)) => {
            let _ = writeln!(err, "error: {msg}");
            code
        }
    }
}

fn load(input: &Input) -> Result<(CellComplex, SidePairingSet)> {
    if let Some(name) = &input.example {
        let e = library::by_name(name)?;
        return Ok((e.complex, e.pairing));
    }
    let path = input.input.as_ref().ok_or_else(|| Error::Invalid("give --input or --example".into()))?;
    let (c, p) = load_document(&read(path)?)?;
    let p = match (&input.pairing, p) {
        (Some(pp), _) => load_pairing(&read(pp)?)?,
        (None, Some(p)) => p,
        (None, None) => return Err(Error::Invalid("document has no pairings; give --pairing".into())),
    };
    Ok((c, p))
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))
}

fn decomposition(input: &Input) -> std::result::Result<HandleDecomposition, Failed> {
    let (c, p) = load(input)?;
    let v = validate_pairing(&c, &p);
    if !v.is_empty() {
        return Err(Failed(1, format!("pairing is invalid: {}", v.violations[0].message)));
    }
    Ok(handle_decomposition(&c, &p)?)
}

fn emit_report<T: Serialize>(input: Option<&Input>, out: &mut dyn Write, report: &T) -> std::result::Result<(), Failed> {
    let text = serde_json::to_string_pretty(report).expect("report serializes") + "\n";
    write_text(input.and_then(|i| i.output.as_deref()), out, &text)
}

fn write_text(path: Option<&Path>, out: &mut dyn Write, text: &str) -> std::result::Result<(), Failed> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| Failed(2, format!("{}: {e}", p.display()))),
        None => out.write_all(text.as_bytes()).map_err(|e| Failed(2, e.to_string())),
    }
}

fn budget(flag: Option<usize>) -> usize {
    flag.unwrap_or_else(budget_from_env)
}

fn geometry_for(input: &Input, path: Option<&PathBuf>) -> Result<Option<CuspGeometry>> {
    match (path, input.example.as_deref()) {
        (Some(p), _) => Ok(Some(CuspGeometry::parse(&read(p)?)?)),
        (None, Some("wielenberg")) => Ok(Some(library::wielenberg_geometry())),
        _ => Ok(None),
    }
}

#[derive(Serialize)]
struct ValidateReport {
    schema: &'static str,
    valid: bool,
    complex: ValidationReport,
    pairing: ValidationReport,
    orientation: Option<CharacterReport>,
}

#[derive(Serialize)]
struct CyclesReport {
    schema: &'static str,
    k: usize,
    count: usize,
    cycles: Vec<FaceCycle>,
}

#[derive(Serialize)]
struct HandlesReport {
    schema: &'static str,
    counts: Vec<usize>,
    euler: i64,
    cycles: BTreeMap<usize, Vec<Vec<String>>>,
    generators: Vec<String>,
    chain_ranks: Vec<usize>,
    homology: HomologyProfile,
}

#[derive(Serialize)]
struct HomologyReport {
    schema: &'static str,
    betti: Vec<usize>,
    torsion: Vec<Vec<i64>>,
    euler: i64,
    orientable: bool,
}

#[derive(Serialize)]
struct Pi1Report {
    schema: &'static str,
    presentation: PresentationDoc,
    abelianization: Abelian,
    simplified: PresentationDoc,
    budget: usize,
    budget_exhausted: bool,
    trace: Vec<String>,
}

#[derive(Serialize)]
struct Abelian {
    betti: usize,
    torsion: Vec<i64>,
}

#[derive(Serialize)]
struct CuspEntry {
    index: usize,
    representative: String,
    vertices: Vec<String>,
    link_counts: Vec<usize>,
    classification: CuspClassification,
    #[serde(skip_serializing_if = "Option::is_none")]
    basis: Option<Basis>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    slopes: Vec<SlopeEntry>,
}

#[derive(Serialize)]
struct Basis {
    meridian: Vec<String>,
    longitude: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    meridian_length: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    longitude_length: Option<f64>,
}

#[derive(Serialize)]
struct SlopeEntry {
    class: Vec<i64>,
    word: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    length: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    exceeds_two_pi: Option<bool>,
}

#[derive(Serialize)]
struct CuspsReport {
    schema: &'static str,
    count: usize,
    cusps: Vec<CuspEntry>,
}

#[derive(Serialize)]
struct FillReport {
    schema: &'static str,
    filled: Vec<String>,
    counts: Vec<usize>,
    euler: i64,
    closed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    certificate: Option<SphereReport>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    link_exterior: Vec<LinkComponent>,
    trace: Vec<String>,
}

fn numbered(trace: &[Move]) -> Vec<String> {
    trace.iter().map(|m| format!("{}. {}: {}", m.step, m.kind, m.detail)).collect()
}

fn dispatch(cmd: Command, verbose: bool, out: &mut dyn Write, err: &mut dyn Write) -> std::result::Result<i32, Failed> {
    match cmd {
        Command::Validate(input) => {
            let (c, p) = load(&input)?;
            let complex = validate_complex(&c);
            let pairing = if complex.is_empty() { validate_pairing(&c, &p) } else { ValidationReport::default() };
            let valid = complex.is_empty() && pairing.is_empty();
            let orientation = if valid { orientation_character(&p).ok() } else { None };
            if verbose {
                for v in complex.violations.iter().chain(&pairing.violations) {
                    let _ = writeln!(err, "{:<24} {}", v.kind, v.message);
                }
                let _ = writeln!(err, "{}", if valid { "valid" } else { "INVALID" });
            }
            emit_report(Some(&input), out, &ValidateReport { schema: "handleforge-validation/1", valid, complex, pairing, orientation })?;
            Ok(if valid { 0 } else { 1 })
        }
        Command::Cycles { input, k } => {
            let (c, p) = load(&input)?;
            if k >= c.dim() {
                return Err(Failed(2, format!("-k must be below the dimension {}", c.dim())));
            }
            let cycles = face_cycles(&c, &p, k)?;
            if verbose {
                for (i, cy) in cycles.iter().enumerate() {
                    let _ = writeln!(err, "{:>3}  {:<28} {}", i + 1, cy.representative, cy.members.join(" "));
                }
            }
            emit_report(Some(&input), out, &CyclesReport { schema: "handleforge-cycles/1", k, count: cycles.len(), cycles })?;
            Ok(0)
        }
        Command::Handles(input) => {
            let hd = decomposition(&input)?;
            let cc = chain_complex(&hd)?;
            let h = homology(&cc);
            if verbose {
                let _ = writeln!(err, "index  count");
                for (j, n) in hd.counts().iter().enumerate() {
                    let _ = writeln!(err, "{j:>5}  {n:>5}");
                }
            }
            let report = HandlesReport {
                schema: "handleforge-handles/1",
                counts: hd.counts(),
                euler: euler_characteristic(&hd),
                cycles: cycle_membership(&hd),
                generators: hd.generators.clone(),
                chain_ranks: cc.boundaries.iter().map(|b| b.rank()).collect(),
                homology: h,
            };
            emit_report(Some(&input), out, &report)?;
            Ok(0)
        }
        Command::Homology(input) => {
            let hd = decomposition(&input)?;
            let h = homology(&chain_complex(&hd)?);
            let orientable = orientation_character(&hd.gluing().pairing).map(|r| r.orientable()).unwrap_or(false);
            if verbose {
                for (j, b) in h.betti.iter().enumerate() {
                    let _ = writeln!(err, "H{j} = Z^{b} {:?}", h.torsion[j]);
                }
            }
            let report = HomologyReport {
                schema: "handleforge-homology/1",
                euler: h.euler(),
                betti: h.betti,
                torsion: h.torsion,
                orientable,
            };
            emit_report(Some(&input), out, &report)?;
            Ok(0)
        }
        Command::Pi1 { input, budget: b } => {
            let hd = decomposition(&input)?;
            let pr = presentation(&hd)?;
            let budget = budget(b);
            let s = tietze_simplify(&pr, budget);
            let (betti, torsion) = pr.abelianization();
            if verbose {
                for (l, r) in pr.labels.iter().zip(&pr.relators) {
                    let _ = writeln!(err, "{l:<24} {}", pr.word_names(r).join(" "));
                }
            }
            let report = Pi1Report {
                schema: "handleforge-pi1/1",
                presentation: pr.to_doc(),
                abelianization: Abelian { betti, torsion },
                simplified: s.presentation.to_doc(),
                budget,
                budget_exhausted: s.exhausted,
                trace: numbered(&s.trace),
            };
            emit_report(Some(&input), out, &report)?;
            Ok(0)
        }
        Command::Cusps { input, geometry, bound } => {
            let hd = decomposition(&input)?;
            let mut cusps = vertex_links(&hd)?;
            if let Some(g) = geometry_for(&input, geometry.as_ref())? {
                attach_geometry(&mut cusps, &g);
            }
            let entries = cusps.iter().map(|s| cusp_entry(&hd, s, bound)).collect::<Result<Vec<_>>>()?;
            if verbose {
                for e in &entries {
                    let _ = writeln!(err, "{:>3}  {:<12} {:<28} {:?}", e.index, e.representative, e.classification.verdict, e.link_counts);
                }
            }
            emit_report(Some(&input), out, &CuspsReport { schema: "handleforge-cusps/1", count: entries.len(), cusps: entries })?;
            Ok(0)
        }
        Command::Fill { input, slopes, budget: b } => {
            let hd = decomposition(&input)?;
            let cusps = vertex_links(&hd)?;
            let docs = parse_slopes(&read(&slopes)?)?;
            let ins = docs.iter().map(|d| instruction(&hd, &cusps, d)).collect::<Result<Vec<_>>>()?;
            let filled = fill(&hd, &cusps, &ins)?;
            let closed = !filled.boundary_flag;
            let certificate = if closed { Some(certify_sphere(&filled, budget(b))?) } else { None };
            let link = if hd.n == 3 { link_exterior(&hd, &cusps, &ins)? } else { Vec::new() };
            let trace = certificate.as_ref().map(|c| numbered(&c.trace)).unwrap_or_default();
            if verbose {
                for t in &trace {
                    let _ = writeln!(err, "{t}");
                }
                if let Some(c) = &certificate {
                    let _ = writeln!(err, "verdict: {}", c.verdict);
                }
            }
            let report = FillReport {
                schema: "handleforge-fill/1",
                filled: filled.filled.clone(),
                counts: filled.counts(),
                euler: euler_characteristic(&filled),
                closed,
                certificate,
                link_exterior: link,
                trace,
            };
            emit_report(Some(&input), out, &report)?;
            Ok(0)
        }
        Command::Search { input, bound, budget: b, geometry } => {
            let hd = decomposition(&input)?;
            let mut cusps = vertex_links(&hd)?;
            if let Some(g) = geometry_for(&input, geometry.as_ref())? {
                attach_geometry(&mut cusps, &g);
            }
            let report = search_fillings(&hd, &cusps, bound, budget(b))?;
            if verbose {
                let _ = writeln!(err, "{} successes, {} failures", report.successes.len(), report.failures.len());
                for a in &report.successes {
                    let _ = writeln!(err, "  {:?}", a.words);
                }
            }
            emit_report(Some(&input), out, &report)?;
            Ok(0)
        }
        Command::Diagram { input, layout, format, view_axis, width, height, slopes } => {
            let view_axis: ViewAxis = view_axis.parse()?;
            if width == 0 || height == 0 {
                return Err(Failed(2, "width and height must be positive".into()));
            }
            let hd = decomposition(&input)?;
            let layout = match (&layout, input.example.as_deref()) {
                (Some(p), _) => Layout::parse(&read(p)?)?,
                (None, Some(name)) => library::layout(name)?,
                (None, None) => return Err(Failed(2, "give --layout".into())),
            };
            let mut scene = match hd.n {
                3 => scene3(&hd, &layout)?,
                4 => scene4(&hd, &layout)?,
                n => return Err(Error::UnsupportedDimension(n).into()),
            };
            if let Some(p) = slopes {
                let cusps = vertex_links(&hd)?;
                scene.tracked_curves = track_meridians(&hd, &cusps, &layout, &parse_slopes(&read(&p)?)?)?;
            }
            let text = emit(&scene, &format, &RenderOptions { view_axis, width, height })?;
            if verbose {
                let _ = writeln!(err, "{} feet, {} circuits, {} arcs", scene.feet.len(), scene.arcs.len(), scene.arc_count());
            }
            write_text(input.output.as_deref(), out, &text)?;
            Ok(0)
        }
        Command::Examples { dir } => {
            let written = materialize(&dir)?;
            if verbose {
                for f in &written {
                    let _ = writeln!(err, "{f}");
                }
            }
            emit_report(None, out, &serde_json::json!({ "schema": "handleforge-examples/1", "dir": dir, "files": written }))?;
            Ok(0)
        }
    }
}

fn cusp_entry(hd: &HandleDecomposition, s: &CuspSection, bound: i64) -> Result<CuspEntry> {
    let classification = classify_cusp(s);
    let torus = hd.n == 3 && classification.verdict == "torus";
    let names = |sl: &crate::cusps::Slope| -> Result<Vec<String>> { Ok(word_names(hd, &sl.word(hd)?)) };
    let len = |sl: &crate::cusps::Slope| -> Result<Option<f64>> {
        Ok(if s.geometry.is_some() { Some(slope_length(hd, s, sl)?) } else { None })
    };
    let basis = if torus {
        let per = periphery(hd, s)?;
        let (m, l) = &per.basis;
        Some(Basis { meridian: names(m)?, longitude: names(l)?, meridian_length: len(m)?, longitude_length: len(l)? })
    } else {
        None
    };
    let slopes = if torus && bound > 0 {
        enumerate_slopes(hd, s, bound)?
            .into_iter()
            .map(|r| {
                Ok(SlopeEntry {
                    class: r.slope.class.clone(),
                    word: names(&r.slope)?,
                    length: r.length,
                    exceeds_two_pi: r.length.map(exceeds_two_pi),
                })
            })
            .collect::<Result<Vec<_>>>()?
    } else {
        Vec::new()
    };
    Ok(CuspEntry {
        index: s.index,
        representative: s.representative.clone(),
        vertices: s.vertices.clone(),
        link_counts: s.complex.counts(),
        classification,
        basis,
        slopes,
    })
}

/// Write every bundled example with its sidecars into `dir`; returns the
/// file names written.
pub fn materialize(dir: &Path) -> Result<Vec<String>> {
    std::fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    let mut put = |name: String, text: String| -> Result<()> {
        std::fs::write(dir.join(&name), text + "\n")?;
        written.push(name);
        Ok(())
    };
    for name in library::NAMES {
        let e = library::by_name(name)?;
        put(format!("{name}.json"), to_document(&e.complex, &e.pairing).to_json())?;
        if let Ok(l) = library::layout(name) {
            put(format!("{name}-layout.json"), l.to_json())?;
        }
    }
    put("wielenberg-geometry.json".into(), serde_json::to_string_pretty(&library::wielenberg_geometry()).expect("geometry serializes"))?;
    put("wielenberg-meridians.json".into(), serde_json::to_string_pretty(&library::wielenberg_meridians()).expect("slopes serialize"))?;
    put("rt1011-double-fibers.json".into(), serde_json::to_string_pretty(&library::rt_fibers()).expect("slopes serialize"))?;
    Ok(written)
}
