use std::io::Read;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use atomcert::certify::{kauffman_lower_bound_from, Certificate};
use atomcert::khovanov::{expected_euler_in_a, lemma_from_complex};
use atomcert::statesum::span_report_from;
use atomcert::{
    asymptotic_check, atom, bracket, cable, cable_census, cube, good_certificate, homology,
    is_good, parse_diagram, thickness, verify, Diagram, Error, Limits,
};
use clap::{Args, Parser, Subcommand};
use num_rational::Ratio;
use serde_json::{json, Value};

/// Kauffman bracket, atom, cabling and Khovanov tools for virtual link
/// diagrams given as signed Gauss codes.
#[derive(Parser, Debug)]
#[command(name = "atomcert", version)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Global {
    /// Print JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Raise both crossing guards to their hard maxima.
    #[arg(long, global = true)]
    force: bool,
    /// Worker threads (default: available parallelism).
    #[arg(long, global = true, env = "ATOMCERT_THREADS", value_parser = clap::value_parser!(u32).range(1..))]
    threads: Option<u32>,
    /// Largest diagram whose bracket is computed.
    #[arg(long, global = true, value_parser = clap::value_parser!(u32).range(1..))]
    bracket_guard: Option<u32>,
    /// Largest diagram whose Khovanov complex is built.
    #[arg(long, global = true, value_parser = clap::value_parser!(u32).range(1..))]
    khovanov_guard: Option<u32>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Parse a diagram and report its basic invariants.
    Validate { file: PathBuf },
    /// Kauffman bracket.
    Bracket { file: PathBuf },
    /// Atom cells, Euler characteristic, genus and orientability.
    Atom { file: PathBuf },
    /// Self-touching check of both extreme states.
    Good { file: PathBuf },
    /// Bracket span against 4n + 2(chi - 2).
    Span { file: PathBuf },
    /// Blackboard m-cable, written as a Gauss code.
    Cable {
        file: PathBuf,
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
        m: u32,
    },
    /// GF(2) Khovanov homology as an `i j rank` table.
    Khovanov { file: PathBuf },
    /// Span lower bound and good-diagram certificates.
    Certify { file: PathBuf },
    /// Check a certificate against a diagram.
    Verify { certificate: PathBuf, file: PathBuf },
    /// Span hypothesis on cables of K # mirror(K).
    Asymptotic {
        file: PathBuf,
        /// Positive rational: `p/q`, integer or decimal.
        #[arg(long, value_parser = parse_epsilon)]
        eps: Ratio<i64>,
        #[arg(long, value_delimiter = ',', required = true, value_parser = clap::value_parser!(u32).range(1..))]
        m: Vec<u32>,
    },
    /// Summary table over every `.gauss` file of a directory.
    Corpus { dir: PathBuf },
}

fn parse_epsilon(s: &str) -> Result<Ratio<i64>, String> {
    let s = s.trim();
    let r = if let Some((int, frac)) = s.split_once('.') {
        if frac.is_empty() || frac.len() > 15 || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(format!("bad decimal '{s}'"));
        }
        let whole: i64 = if int.is_empty() {
            0
        } else {
            int.parse().map_err(|_| format!("bad decimal '{s}'"))?
        };
        let den = 10i64.pow(frac.len() as u32);
        let num: i64 = frac.parse().map_err(|_| format!("bad decimal '{s}'"))?;
        let sign = if int.starts_with('-') { -1 } else { 1 };
        Ratio::from_integer(whole) + Ratio::new(sign * num, den)
    } else {
        s.parse::<Ratio<i64>>()
            .map_err(|e| format!("bad rational '{s}': {e}"))?
    };
    if r <= Ratio::from_integer(0) {
        return Err("epsilon must be positive".into());
    }
    Ok(r)
}

struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::GuardExceeded { .. } => 2,
            Error::Internal(_) => 3,
            _ => 1,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn input_error(message: String) -> Failure {
    Failure { code: 1, message }
}

type Outcome = Result<(), Failure>;

fn read_text(path: &Path) -> Result<String, Failure> {
    if path == Path::new("-") {
        let mut s = String::new();
        std::io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| input_error(format!("stdin: {e}")))?;
        return Ok(s);
    }
    std::fs::read_to_string(path).map_err(|e| input_error(format!("{}: {e}", path.display())))
}

fn load(path: &Path) -> Result<Diagram, Failure> {
    let text = read_text(path)?;
    parse_diagram(&text).map_err(|e| {
        let f = Failure::from(e);
        Failure {
            message: format!("{}: {}", path.display(), f.message),
            ..f
        }
    })
}

struct Ctx {
    json: bool,
    limits: Limits,
}

impl Ctx {
    fn emit(&self, value: Value, text: impl FnOnce() -> String) {
        if self.json {
            println!("{}", serde_json::to_string_pretty(&value).expect("json"));
        } else {
            print!("{}", text());
        }
    }
}

fn kv(rows: &[(&str, String)]) -> String {
    rows.iter().map(|(k, v)| format!("{k}\t{v}\n")).collect()
}

fn validate(ctx: &Ctx, d: &Diagram) -> Outcome {
    let split = d.is_split();
    if split {
        eprintln!("warning: the diagram is split; certificates will refuse it");
    }
    let value = json!({
        "crossings": d.n(),
        "components": d.component_count(),
        "free_loops": d.free_loops(),
        "n_plus": d.n_plus(),
        "n_minus": d.n_minus(),
        "writhe": d.writhe(),
        "carter_genus": d.carter_genus(),
        "classical": d.carter_genus() == 0,
        "is_split": split,
        "gauss": d.code().to_string(),
    });
    ctx.emit(value, || {
        kv(&[
            ("crossings", d.n().to_string()),
            ("components", d.component_count().to_string()),
            ("free_loops", d.free_loops().to_string()),
            ("writhe", d.writhe().to_string()),
            ("carter_genus", d.carter_genus().to_string()),
            ("classical", (d.carter_genus() == 0).to_string()),
            ("is_split", split.to_string()),
        ])
    });
    Ok(())
}

fn bracket_cmd(ctx: &Ctx, d: &Diagram) -> Outcome {
    let b = bracket(d, &ctx.limits)?;
    ctx.emit(
        json!({ "bracket": b, "text": b.to_string(), "span": b.span(), "writhe": d.writhe() }),
        || format!("{b}\n"),
    );
    Ok(())
}

fn atom_cmd(ctx: &Ctx, d: &Diagram) -> Outcome {
    let a = atom(d);
    let mut value = serde_json::to_value(a).expect("json");
    value["carter_genus"] = json!(d.carter_genus());
    ctx.emit(value, || {
        kv(&[
            ("a_circles", a.a_circles.to_string()),
            ("b_circles", a.b_circles.to_string()),
            ("chi", a.chi.to_string()),
            (
                if a.orientable { "genus" } else { "crosscaps" },
                a.genus.to_string(),
            ),
            ("orientable", a.orientable.to_string()),
            ("carter_genus", d.carter_genus().to_string()),
        ])
    });
    Ok(())
}

fn ids(v: &[u32]) -> String {
    if v.is_empty() {
        "-".into()
    } else {
        v.iter().map(u32::to_string).collect::<Vec<_>>().join(",")
    }
}

fn good_cmd(ctx: &Ctx, d: &Diagram) -> Outcome {
    let g = is_good(d);
    ctx.emit(serde_json::to_value(&g).expect("json"), || {
        kv(&[
            ("good", g.good.to_string()),
            ("a_violations", ids(&g.a_violations)),
            ("b_violations", ids(&g.b_violations)),
        ])
    });
    Ok(())
}

fn span_cmd(ctx: &Ctx, d: &Diagram) -> Outcome {
    let b = bracket(d, &ctx.limits)?;
    let s = span_report_from(d, &b, &atom(d));
    ctx.emit(serde_json::to_value(&s).expect("json"), || {
        kv(&[
            ("span", s.span.map_or("absent".into(), |x| x.to_string())),
            ("bound", s.bound.to_string()),
            ("attained", s.attained.to_string()),
            ("leading_coeff", s.leading_coeff.to_string()),
            ("lowest_coeff", s.lowest_coeff.to_string()),
        ])
    });
    Ok(())
}

fn cable_cmd(ctx: &Ctx, d: &Diagram, m: usize) -> Outcome {
    let dm = cable(d, m)?;
    let gauss = dm.code().to_string();
    if ctx.json {
        let report = cable_census(d, m)?;
        ctx.emit(json!({ "report": report, "gauss": gauss }), String::new);
    } else {
        println!("# {m}-cable, {} crossings", dm.n());
        println!("{}", gauss.trim_end());
    }
    Ok(())
}

fn khovanov_cmd(ctx: &Ctx, d: &Diagram) -> Outcome {
    let c = cube(d, &ctx.limits)?;
    let h = homology(&c);
    let b = bracket(d, &ctx.limits)?;
    if h.euler_in_a() != expected_euler_in_a(&b, d.writhe()) {
        return Err(
            Error::Internal("graded Euler characteristic differs from the bracket".into()).into(),
        );
    }
    let t = thickness(&h)?;
    let lemma = lemma_from_complex(&c);
    let ranks: Vec<Value> = h
        .ranks
        .iter()
        .map(|(&(i, j), &r)| json!({ "i": i, "j": j, "rank": r }))
        .collect();
    ctx.emit(
        json!({
            "ranks": ranks,
            "total_rank": h.total_rank(),
            "thickness": t,
            "lemma": lemma,
            "euler_matches_bracket": true,
        }),
        || h.to_tsv(),
    );
    if !ctx.json {
        eprintln!("thickness {} (diagonals {:?})", t.thickness, t.diagonals);
    }
    Ok(())
}

fn refused_or(cert: Result<Certificate, Error>) -> Result<Result<Certificate, Error>, Failure> {
    match cert {
        Err(e @ (Error::GuardExceeded { .. } | Error::Internal(_))) => Err(e.into()),
        other => Ok(other),
    }
}

fn describe(name: &str, cert: &Result<Certificate, Error>) -> String {
    match cert {
        Ok(c) => format!(
            "{name}\t{:?}\tlower_bound {}{}\n",
            c.kind,
            c.lower_bound,
            if c.vacuous { " (vacuous)" } else { "" }
        ),
        Err(e) => format!("{name}\trefused\t{e}\n"),
    }
}

fn as_json(cert: &Result<Certificate, Error>) -> Value {
    match cert {
        Ok(c) => serde_json::to_value(c).expect("json"),
        Err(e) => json!({ "refused": e.to_string() }),
    }
}

fn certify_cmd(ctx: &Ctx, d: &Diagram) -> Outcome {
    let span = refused_or(bracket(d, &ctx.limits).and_then(|b| kauffman_lower_bound_from(d, &b)))?;
    let good = refused_or(good_certificate(d, &ctx.limits))?;
    let best = [&span, &good]
        .iter()
        .filter_map(|c| c.as_ref().ok())
        .max_by_key(|c| c.lower_bound)
        .map(|c| c.lower_bound);
    let mut value = json!({
        "kauffman_lower_bound": as_json(&span),
        "good_certificate": as_json(&good),
        "best_lower_bound": best,
    });
    if let Ok(c) = &good {
        value["kind"] = json!(c.kind);
        value["lower_bound"] = json!(c.lower_bound);
    }
    ctx.emit(value, || {
        describe("kauffman_lower_bound", &span) + &describe("good_certificate", &good)
    });
    Ok(())
}

fn verify_cmd(ctx: &Ctx, cert: &Path, d: &Diagram) -> Outcome {
    let cert = Certificate::from_json(&read_text(cert)?)?;
    match verify(&cert, d, &ctx.limits) {
        Ok(()) => {
            ctx.emit(json!({ "verified": true }), || "verified\n".into());
            Ok(())
        }
        Err(Error::Verification(m)) => {
            ctx.emit(json!({ "verified": false, "reason": m }), || {
                format!("rejected\t{m}\n")
            });
            Err(Failure {
                code: 1,
                message: format!("certificate rejected: {m}"),
            })
        }
        Err(e) => Err(e.into()),
    }
}

fn asymptotic_cmd(ctx: &Ctx, d: &Diagram, eps: Ratio<i64>, ms: &[usize]) -> Outcome {
    let r = asymptotic_check(d, eps, ms, &ctx.limits)?;
    let cert = r.to_certificate(d);
    ctx.emit(json!({ "report": r, "certificate": cert }), || {
        let mut out = format!("# {}\n", r.label);
        out.push_str("m\tcrossings\tspan\tthreshold\tusual_estimate\tpass\n");
        for e in &r.entries {
            out.push_str(&format!(
                "{}\t{}\t{}\t{}\t{}\t{}\n",
                e.m,
                e.crossings,
                e.span.map_or("absent".into(), |s| s.to_string()),
                e.threshold,
                e.usual_estimate,
                e.pass
            ));
        }
        out
    });
    Ok(())
}

const CORPUS_HEADER: &str = "file\tstatus\tcrossings\tcomponents\tcarter_genus\tsplit\tgood\tchi\tgenus\torientable\tspan\tbound\tthickness\tcertificate\tlower_bound\tnote";

fn corpus_row(ctx: &Ctx, path: &Path) -> Vec<String> {
    let name = path
        .file_name()
        .map_or_else(String::new, |n| n.to_string_lossy().into_owned());
    let fail = |status: &str, msg: String| {
        let mut row = vec![name.clone(), status.into()];
        row.extend(std::iter::repeat_n("-".to_string(), 13));
        row.push(msg);
        row
    };
    let d = match load(path) {
        Ok(d) => d,
        Err(f) => return fail("error", f.message),
    };
    let a = atom(&d);
    let good = is_good(&d).good;
    let mut notes = Vec::new();
    let b = match bracket(&d, &ctx.limits) {
        Ok(b) => Some(b),
        Err(e) => {
            notes.push(e.to_string());
            None
        }
    };
    let span = b.as_ref().map(|b| span_report_from(&d, b, &a));
    let thick = match cube(&d, &ctx.limits) {
        Ok(c) => match thickness(&homology(&c)) {
            Ok(t) => t.thickness.to_string(),
            Err(e) => {
                notes.push(e.to_string());
                "-".into()
            }
        },
        Err(Error::Internal(m)) => return fail("internal", m),
        Err(e) => {
            notes.push(e.to_string());
            "-".into()
        }
    };
    let cert = if b.is_some() {
        good_certificate(&d, &ctx.limits)
            .or_else(|_| kauffman_lower_bound_from(&d, b.as_ref().unwrap()))
            .ok()
    } else {
        None
    };
    let opt = |x: Option<String>| x.unwrap_or_else(|| "-".into());
    vec![
        name,
        "ok".into(),
        d.n().to_string(),
        d.component_count().to_string(),
        d.carter_genus().to_string(),
        d.is_split().to_string(),
        good.to_string(),
        a.chi.to_string(),
        a.genus.to_string(),
        a.orientable.to_string(),
        opt(span
            .as_ref()
            .map(|s| s.span.map_or("absent".into(), |x| x.to_string()))),
        opt(span.as_ref().map(|s| s.bound.to_string())),
        thick,
        opt(cert.as_ref().map(|c| format!("{:?}", c.kind))),
        opt(cert.as_ref().map(|c| c.lower_bound.to_string())),
        if notes.is_empty() {
            "-".into()
        } else {
            notes.join("; ")
        },
    ]
}

fn corpus_cmd(ctx: &Ctx, dir: &Path) -> Outcome {
    let entries =
        std::fs::read_dir(dir).map_err(|e| input_error(format!("{}: {e}", dir.display())))?;
    let mut files: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file() && p.extension().is_some_and(|x| x == "gauss"))
        .collect();
    files.sort();
    let rows: Vec<Vec<String>> = files.iter().map(|p| corpus_row(ctx, p)).collect();
    let columns: Vec<&str> = CORPUS_HEADER.split('\t').collect();
    let value = Value::Array(
        rows.iter()
            .map(|r| {
                Value::Object(
                    columns
                        .iter()
                        .map(|c| c.to_string())
                        .zip(r.iter().map(|x| json!(x)))
                        .collect(),
                )
            })
            .collect(),
    );
    ctx.emit(value, || {
        let mut out = format!("{CORPUS_HEADER}\n");
        for r in &rows {
            out.push_str(&r.join("\t"));
            out.push('\n');
        }
        out
    });
    Ok(())
}

fn run(cli: Cli) -> Outcome {
    let g = &cli.global;
    if let Some(t) = g.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(t as usize)
            .build_global()
            .map_err(|e| Failure {
                code: 3,
                message: e.to_string(),
            })?;
    }
    let mut limits = if g.force {
        Limits::forced()
    } else {
        Limits::default()
    };
    if let Some(b) = g.bracket_guard {
        limits.bracket = (b as usize).min(Limits::forced().bracket);
    }
    if let Some(k) = g.khovanov_guard {
        limits.khovanov = (k as usize).min(Limits::forced().khovanov);
    }
    let ctx = Ctx {
        json: g.json,
        limits,
    };
    match &cli.command {
        Command::Validate { file } => validate(&ctx, &load(file)?),
        Command::Bracket { file } => bracket_cmd(&ctx, &load(file)?),
        Command::Atom { file } => atom_cmd(&ctx, &load(file)?),
        Command::Good { file } => good_cmd(&ctx, &load(file)?),
        Command::Span { file } => span_cmd(&ctx, &load(file)?),
        Command::Cable { file, m } => cable_cmd(&ctx, &load(file)?, *m as usize),
        Command::Khovanov { file } => khovanov_cmd(&ctx, &load(file)?),
        Command::Certify { file } => certify_cmd(&ctx, &load(file)?),
        Command::Verify { certificate, file } => verify_cmd(&ctx, certificate, &load(file)?),
        Command::Asymptotic { file, eps, m } => {
            let ms: Vec<usize> = m.iter().map(|&x| x as usize).collect();
            asymptotic_cmd(&ctx, &load(file)?, *eps, &ms)
        }
        Command::Corpus { dir } => corpus_cmd(&ctx, dir),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
