//! `berg`: command-line front end for the exact Markov partition analysis.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use berg_core::berg::{classify_symmetry, classify_word, parse_word, shapes_of, BergShape};
use berg_core::bifan::cutting_word;
use berg_core::oracle::{
    check_matrix, corpus, dedup_conjugates, realize_placement, scan_geometry, sweep, CheckOptions, OracleGeometry,
};
use berg_core::render::{render_bipartition, render_fan, RenderSpec};
use berg_core::report::analyze;
use berg_core::{BergError, Mat2Z, WordKind};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

#[derive(Parser)]
#[command(name = "berg", version, about = "Two-rectangle Markov partitions of hyperbolic toral automorphisms")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Output {
    /// Emit JSON instead of text.
    #[arg(long)]
    json: bool,
    /// Write output to FILE instead of stdout.
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Full report: word, generator, shapes, counts, symmetry.
    Analyze {
        /// Matrix as "a,b;c,d" or [[a,b],[c,d]].
        #[arg(allow_hyphen_values = true)]
        matrix: String,
        #[command(flatten)]
        output: Output,
    },
    /// Cutting word, (semi-)period and generator.
    Word {
        #[arg(allow_hyphen_values = true)]
        matrix: String,
        #[command(flatten)]
        output: Output,
    },
    /// Connectivity matrices along one (semi-)period.
    Matrices {
        #[arg(allow_hyphen_values = true)]
        matrix: String,
        #[command(flatten)]
        output: Output,
    },
    /// Number of nonequivalent Berg partitions, per shape and in total.
    Count {
        #[arg(allow_hyphen_values = true)]
        matrix: String,
        #[command(flatten)]
        output: Output,
    },
    /// Admissible placements of each shape and their fixed points.
    Placements {
        #[arg(allow_hyphen_values = true)]
        matrix: String,
        /// Only the shape at this fan index.
        #[arg(long)]
        index: Option<usize>,
        #[command(flatten)]
        output: Output,
    },
    /// Symmetry type of a matrix, or of a word given with --word.
    Symmetry {
        #[arg(allow_hyphen_values = true)]
        matrix: Option<String>,
        #[arg(long, conflicts_with = "matrix")]
        word: Option<String>,
        #[arg(long, value_enum, default_value = "period", requires = "word")]
        kind: Kind,
        #[command(flatten)]
        output: Output,
    },
    /// SVG of one shape (--index I) or a row of shapes (--index A..B).
    Render {
        #[arg(allow_hyphen_values = true)]
        matrix: String,
        #[arg(long, default_value = "0")]
        index: String,
        /// Anchor the shape at its k-th admissible placement.
        #[arg(long)]
        placement: Option<usize>,
        /// Draw the images of the rectangles.
        #[arg(long)]
        overlay: bool,
        #[arg(long)]
        labels: bool,
        #[arg(long, default_value_t = 480)]
        width: u32,
        #[arg(long, default_value_t = 480)]
        height: u32,
        #[arg(long, default_value_t = 6)]
        precision: usize,
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
    /// Check every derived quantity of one matrix against the placement oracle.
    Verify {
        #[arg(allow_hyphen_values = true)]
        matrix: String,
        /// Also scan for nonnegative representations with entries up to this bound.
        #[arg(long)]
        scan_bound: Option<i128>,
        #[command(flatten)]
        output: Output,
    },
    /// Verify all hyperbolic matrices with entries in [-bound, bound].
    Sweep {
        #[arg(long, default_value_t = 3)]
        bound: i128,
        /// Keep one matrix per conjugacy class.
        #[arg(long)]
        dedup: bool,
        /// Check only this many matrices, chosen with --seed.
        #[arg(long)]
        sample: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        scan_bound: Option<i128>,
        #[command(flatten)]
        output: Output,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Period,
    SemiPeriod,
}

enum Failure {
    Usage(String),
    Mismatch(String),
}

impl From<BergError> for Failure {
    fn from(e: BergError) -> Self {
        Failure::Usage(e.to_string())
    }
}

type Res<T> = std::result::Result<T, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Mismatch(msg)) => {
            eprintln!("{msg}");
            ExitCode::from(1)
        }
    }
}

fn parse_matrix(s: &str) -> Res<Mat2Z> {
    let m: Mat2Z = s.parse()?;
    m.require_hyperbolic()?;
    Ok(m)
}

fn emit(out: &Option<PathBuf>, text: &str) -> Res<()> {
    match out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| Failure::Usage(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn to_json<T: serde::Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

fn run(cmd: Command) -> Res<()> {
    match cmd {
        Command::Analyze { matrix, output } => {
            let a = analyze(&parse_matrix(&matrix)?)?;
            let text = if output.json {
                to_json(&a)
            } else {
                let mut t = String::new();
                let _ = writeln!(t, "matrix {}  trace {}  det {}", a.matrix, a.trace, a.det);
                let _ = writeln!(t, "lambda {}  mu {}", a.lambda, a.mu);
                let _ = writeln!(t, "word {}  {}  N {}  K {}  sign {:+}", a.word, a.kind.as_str(), a.n, a.k, a.sign);
                let _ = writeln!(t, "generator {}", a.generator);
                for s in &a.shapes {
                    let _ = writeln!(
                        t,
                        "  C{} = {}  count {}  {}",
                        s.index,
                        s.c_basis,
                        s.count,
                        if s.isolated { "isolated" } else { "connected" }
                    );
                }
                let _ = writeln!(t, "symmetry {}", a.symmetry.symmetry_type);
                let _ = writeln!(t, "total {}", a.total);
                t
            };
            emit(&output.out, &text)
        }
        Command::Word { matrix, output } => {
            let cw = cutting_word(&parse_matrix(&matrix)?)?;
            let text = if output.json {
                to_json(&cw)
            } else {
                format!(
                    "word {}\nkind {}\nN {}\nK {}\nsign {:+}\ngenerator {}\n",
                    cw.word_string(),
                    cw.kind.as_str(),
                    cw.n,
                    cw.k,
                    cw.sign,
                    cw.generator
                )
            };
            emit(&output.out, &text)
        }
        Command::Matrices { matrix, output } => {
            let shapes = shapes_of(&cutting_word(&parse_matrix(&matrix)?)?)?;
            let text = if output.json {
                let rows: Vec<_> = shapes.iter().map(|s| json!({"index": s.index, "C": s.c, "C_basis": s.c_raw})).collect();
                to_json(&rows)
            } else {
                shapes.iter().map(|s| format!("{} {}\n", s.index, s.c_raw)).collect()
            };
            emit(&output.out, &text)
        }
        Command::Count { matrix, output } => {
            let a = analyze(&parse_matrix(&matrix)?)?;
            let text = if output.json {
                let rows: Vec<_> = a.shapes.iter().map(|s| json!({"index": s.index, "C": s.c, "count": s.count})).collect();
                to_json(&json!({"shapes": rows, "total": a.total}))
            } else {
                let mut t: String = a.shapes.iter().map(|s| format!("{} {} {}\n", s.index, s.c_basis, s.count)).collect();
                let _ = writeln!(t, "total {}", a.total);
                t
            };
            emit(&output.out, &text)
        }
        Command::Placements { matrix, index, output } => {
            let m = parse_matrix(&matrix)?;
            let shapes = shapes_of(&cutting_word(&m)?)?;
            if let Some(i) = index {
                if i >= shapes.len() {
                    return Err(Failure::Usage(format!("index {i} out of range 0..{}", shapes.len())));
                }
            }
            let mut rows = Vec::new();
            for sh in shapes.iter().filter(|s| index.is_none_or(|i| i == s.index)) {
                let geo = OracleGeometry::of_shape(sh, &m);
                for z in scan_geometry(&geo).admissible {
                    let pl = realize_placement(sh, &m, z)?;
                    rows.push(json!({
                        "index": sh.index,
                        "lattice_point": z,
                        "class": geo.class_key(z),
                        "p1": pl.p1,
                        "p2": pl.p2,
                    }));
                }
            }
            let text = if output.json {
                to_json(&rows)
            } else {
                rows.iter()
                    .map(|r| format!("{} z={} p1={} p2={}\n", r["index"], r["lattice_point"], r["p1"], r["p2"]))
                    .collect()
            };
            emit(&output.out, &text)
        }
        Command::Symmetry { matrix, word, kind, output } => {
            let report = match (matrix, word) {
                (Some(m), None) => classify_symmetry(&cutting_word(&parse_matrix(&m)?)?),
                (None, Some(w)) => {
                    let kind = match kind {
                        Kind::Period => WordKind::Period,
                        Kind::SemiPeriod => WordKind::SemiPeriod,
                    };
                    classify_word(&parse_word(&w)?, kind)
                }
                _ => return Err(Failure::Usage("give a matrix or --word".into())),
            };
            let text = if output.json {
                to_json(&report)
            } else {
                format!(
                    "type {}\norder4 {}\nsimple2 {}\nshift2 {}\n",
                    report.symmetry_type, report.has_order4, report.has_simple2, report.has_shift2
                )
            };
            emit(&output.out, &text)
        }
        Command::Render { matrix, index, placement, overlay, labels, width, height, precision, out } => {
            let m = parse_matrix(&matrix)?;
            if let Some((a, b)) = index.split_once("..") {
                let parse = |s: &str| s.trim().parse::<usize>().map_err(|e| Failure::Usage(format!("bad index {s:?}: {e}")));
                let (a, b) = (parse(a)?, parse(b)?);
                return emit(&out, &render_fan(&m, a, b)?);
            }
            let i: usize = index.parse().map_err(|e| Failure::Usage(format!("bad index {index:?}: {e}")))?;
            let shapes = shapes_of(&cutting_word(&m)?)?;
            let sh: &BergShape =
                shapes.get(i).ok_or_else(|| Failure::Usage(format!("index {i} out of range 0..{}", shapes.len())))?;
            let mut spec = RenderSpec::new(sh.clone(), &m);
            if let Some(k) = placement {
                let pts = scan_geometry(&OracleGeometry::of_shape(sh, &m)).admissible;
                let z = *pts.get(k).ok_or_else(|| Failure::Usage(format!("placement {k} out of range 0..{}", pts.len())))?;
                spec.placement = Some(realize_placement(sh, &m, z)?);
            }
            spec.show.image_overlay = overlay;
            spec.show.neighbor_labels = labels;
            spec.width = width;
            spec.height = height;
            spec.precision = precision;
            emit(&out, &render_bipartition(&spec)?)
        }
        Command::Verify { matrix, scan_bound, output } => {
            let check = check_matrix(&parse_matrix(&matrix)?, CheckOptions { scan_bound })?;
            let text = if output.json {
                to_json(&check)
            } else {
                let mut t = String::new();
                for s in &check.shapes {
                    let _ = writeln!(
                        t,
                        "{} {} case {}  classes {}  formula {}  raw {}  {}",
                        s.index,
                        s.c,
                        s.case_id,
                        s.classes,
                        s.formula,
                        s.raw_points,
                        if s.all_ok() { "ok" } else { "MISMATCH" }
                    );
                }
                let _ = writeln!(t, "{}", if check.all_ok() { "verified" } else { "mismatch" });
                t
            };
            emit(&output.out, &text)?;
            if check.all_ok() {
                Ok(())
            } else {
                Err(Failure::Mismatch(format!("verification failed for {}", check.matrix)))
            }
        }
        Command::Sweep { bound, dedup, sample, seed, scan_bound, output } => {
            if bound < 1 {
                return Err(Failure::Usage("bound must be at least 1".into()));
            }
            let mut ms = corpus(bound);
            if dedup {
                ms = dedup_conjugates(&ms)?;
            }
            if let Some(k) = sample {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                ms.shuffle(&mut rng);
                ms.truncate(k);
                ms.sort();
            }
            let opts = CheckOptions { scan_bound };
            let report = match std::env::var("BERG_THREADS").ok() {
                Some(n) => {
                    let n: usize = n.parse().map_err(|_| Failure::Usage(format!("BERG_THREADS={n:?} is not a number")))?;
                    let pool = rayon::ThreadPoolBuilder::new()
                        .num_threads(n)
                        .build()
                        .map_err(|e| Failure::Usage(e.to_string()))?;
                    pool.install(|| sweep(&ms, opts))?
                }
                None => sweep(&ms, opts)?,
            };
            let text = if output.json {
                to_json(&report)
            } else {
                let mut t = format!(
                    "matrices: {}\nshapes: {}\nmismatches: {}\n",
                    report.matrices, report.shapes, report.mismatches
                );
                for f in &report.failures {
                    let _ = writeln!(t, "  failed {}", f.matrix);
                }
                t
            };
            emit(&output.out, &text)?;
            if report.mismatches == 0 {
                Ok(())
            } else {
                Err(Failure::Mismatch(format!("{} matrices failed", report.mismatches)))
            }
        }
    }
}
