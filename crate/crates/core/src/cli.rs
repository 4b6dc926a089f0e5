//! Command-line front end.
//!
//! Exit codes: 0 success, 2 usage or input error, 3 resource cap,
//! 4 empty result. Every output starts with a `# manifest:` line (an XML
//! comment in SVG) echoing the tool version and the arguments, minus
//! `--threads`.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use num_rational::BigRational;
use num_traits::ToPrimitive;

use crate::constructions::{
    p_adic_xp, poly_growth_x, robinson_x2, tm_spacetime_sft, traffic_light_xp, tsirelson_y,
    TsirelsonParams, TuringMachine,
};
use crate::dsl;
use crate::enumeration::{
    count_blocks_with, count_rect_with, periodic_points_with, sample_pattern_with, EnumError, Limits,
};
use crate::hierarchy::{
    density_estimates, encode_density, monotonize, verify_block_bound, HierarchyError, RationalFn,
};
use crate::invariants::{growth_table, trend_report, InvariantError};
use crate::sft::{LatticeBasis, Pattern, Sft2d};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_RESOURCE: i32 = 3;
pub const EXIT_EMPTY: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "sftlab", version, about = "Counting and growth invariants for 2D shifts of finite type")]
struct Cli {
    /// Worker threads for enumeration (results do not depend on it).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Generator {
    Robinson,
    Padic,
    Traffic,
    Tsirelson,
    Polygrowth,
    Tm,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum CountMode {
    Rect,
    Blocks,
    Periodic,
}

#[derive(Debug, Clone, Copy, ValueEnum, PartialEq, Eq)]
enum TableFormat {
    Text,
    Csv,
}

#[derive(Debug, Clone, Copy, ValueEnum, PartialEq, Eq)]
enum RenderFormat {
    Ascii,
    Svg,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Family {
    Constant,
    OneOverN,
    Alternating,
    Table,
}

#[derive(Debug, Subcommand)]
enum Cmd {
    /// Write a generated tile set as a .sft file.
    Gen {
        name: Generator,
        #[arg(long)]
        p: Option<u8>,
        /// Number of marks (polygrowth).
        #[arg(long)]
        m: Option<u16>,
        #[arg(long)]
        q: Option<usize>,
        #[arg(long, value_delimiter = ',')]
        bh: Vec<u8>,
        #[arg(long, value_delimiter = ',')]
        bv: Vec<u8>,
        /// Machine description (tm).
        #[arg(long)]
        machine: Option<PathBuf>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Exact counts of rectangles, central blocks or periodic points.
    Count {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "rect")]
        mode: CountMode,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        j: Option<usize>,
        /// Rectangle width (defaults to k).
        #[arg(long)]
        w: Option<usize>,
        /// Rectangle height (defaults to k).
        #[arg(long)]
        h: Option<usize>,
        /// Period lattice basis a,b,c,d (defaults to k,0,0,k).
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        lattice: Vec<i64>,
        #[arg(long, default_value_t = Limits::default().max_states)]
        max_states: usize,
        #[arg(long, value_enum, default_value = "text")]
        format: TableFormat,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Growth table and trend fits.
    Invariants {
        file: PathBuf,
        #[arg(long, value_delimiter = ',', required = true)]
        k_list: Vec<usize>,
        #[arg(long, default_value_t = 2)]
        j_extra: usize,
        #[arg(long, default_value_t = Limits::default().max_states)]
        max_states: usize,
        #[arg(long, value_enum, default_value = "text")]
        format: TableFormat,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Draw a random admissible pattern.
    Render {
        file: PathBuf,
        #[arg(long)]
        w: usize,
        #[arg(long)]
        h: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value = "ascii")]
        format: RenderFormat,
        #[arg(long, default_value_t = Limits::default().max_states)]
        max_states: usize,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Block bounds and density estimates of the encoded bit function.
    Encode {
        #[arg(long, value_enum)]
        family: Family,
        /// constant: c; alternating: c,d; table: path to the table file.
        #[arg(long, default_value = "")]
        params: String,
        #[arg(long, default_value_t = 4)]
        n_max: u64,
        #[arg(long, default_value_t = 0)]
        j_max: u64,
        /// Largest block index evaluated (n-max + 1 must not exceed it).
        #[arg(long, default_value_t = 16)]
        max_n: u64,
        #[arg(long, value_enum, default_value = "text")]
        format: TableFormat,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

/// Failure carrying its exit code.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub msg: String,
}

fn input_err(msg: impl Into<String>) -> CliError {
    CliError { code: EXIT_INPUT, msg: msg.into() }
}

impl From<EnumError> for CliError {
    fn from(e: EnumError) -> Self {
        match e {
            EnumError::ResourceCap { states, limit } => CliError {
                code: EXIT_RESOURCE,
                msg: format!(
                    "resource cap exceeded: at least {states} frontier states needed, limit {limit} (raise --max-states)"
                ),
            },
            EnumError::InvalidArgument(m) => input_err(m),
        }
    }
}

impl From<InvariantError> for CliError {
    fn from(e: InvariantError) -> Self {
        match e {
            InvariantError::Enum(e) => e.into(),
            other => input_err(other.to_string()),
        }
    }
}

impl From<HierarchyError> for CliError {
    fn from(e: HierarchyError) -> Self {
        match e {
            HierarchyError::TooLarge { .. } => CliError { code: EXIT_RESOURCE, msg: e.to_string() },
            other => input_err(other.to_string()),
        }
    }
}

/// Arguments echoed in the manifest: everything after the program name
/// except `--threads`.
fn manifest_args(args: &[String]) -> String {
    let mut out = Vec::new();
    let mut it = args.iter().skip(1);
    while let Some(a) = it.next() {
        if a == "--threads" {
            it.next();
            continue;
        }
        if a.starts_with("--threads=") {
            continue;
        }
        out.push(a.as_str());
    }
    out.join(" ")
}

fn manifest(args: &[String]) -> String {
    format!("sftlab {} {}", env!("CARGO_PKG_VERSION"), manifest_args(args))
}

fn read_sft(path: &Path) -> Result<Sft2d, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| input_err(format!("{}: {e}", path.display())))?;
    dsl::parse(&text).map_err(|e| input_err(format!("{}: {e}", path.display())))
}

fn emit(output: &Option<PathBuf>, body: String) -> Result<String, CliError> {
    match output {
        Some(path) => {
            std::fs::write(path, body).map_err(|e| input_err(format!("{}: {e}", path.display())))?;
            Ok(String::new())
        }
        None => Ok(body),
    }
}

fn gen(
    name: Generator,
    p: Option<u8>,
    m: Option<u16>,
    q: Option<usize>,
    bh: Vec<u8>,
    bv: Vec<u8>,
    machine: Option<PathBuf>,
) -> Result<Sft2d, CliError> {
    let need_p = || p.ok_or_else(|| input_err("--p is required"));
    let x = match name {
        Generator::Robinson => Ok(robinson_x2()),
        Generator::Padic => p_adic_xp(need_p()?),
        Generator::Traffic => traffic_light_xp(need_p()?),
        Generator::Polygrowth => {
            poly_growth_x(need_p()?, m.ok_or_else(|| input_err("--m is required"))?)
        }
        Generator::Tsirelson => {
            let params = TsirelsonParams {
                p: need_p()?,
                q: q.ok_or_else(|| input_err("--q is required"))?,
                b_h: bh,
                b_v: bv,
            };
            tsirelson_y(&params)
        }
        Generator::Tm => {
            let path = machine.ok_or_else(|| input_err("--machine is required"))?;
            let text = std::fs::read_to_string(&path)
                .map_err(|e| input_err(format!("{}: {e}", path.display())))?;
            let m = TuringMachine::parse(&text)
                .map_err(|e| input_err(format!("{}: {e}", path.display())))?;
            Ok(tm_spacetime_sft(&m))
        }
    };
    x.map_err(|e| input_err(e.to_string()))
}

fn rat(r: &BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

fn dec(r: &BigRational) -> String {
    format!("{:.6}", r.to_f64().unwrap_or(f64::NAN))
}

fn family(f: Family, params: &str) -> Result<RationalFn, CliError> {
    let parse_q = |s: &str| -> Result<BigRational, CliError> {
        let r = crate::invariants::parse_rational(s.trim())
            .map_err(|e| input_err(format!("bad rational {s:?}: {e}")))?;
        Ok(BigRational::new((*r.numer()).into(), (*r.denom()).into()))
    };
    let g = match f {
        Family::Constant => RationalFn::constant(parse_q(params)?),
        Family::OneOverN => RationalFn::one_over_n(),
        Family::Alternating => {
            let parts: Vec<&str> = params.split(',').collect();
            if parts.len() != 2 {
                return Err(input_err("alternating needs --params c,d"));
            }
            RationalFn::alternating(parse_q(parts[0])?, parse_q(parts[1])?)
        }
        Family::Table => {
            let text = std::fs::read_to_string(params)
                .map_err(|e| input_err(format!("{params}: {e}")))?;
            let mut rows = Vec::new();
            for line in text.lines() {
                let line = line.split('#').next().unwrap_or("").trim();
                if line.is_empty() {
                    continue;
                }
                rows.push(line.split_whitespace().map(parse_q).collect::<Result<Vec<_>, _>>()?);
            }
            RationalFn::table(rows)?
        }
    };
    Ok(g)
}

fn encode(
    f: Family,
    params: &str,
    n_max: u64,
    j_max: u64,
    max_n: u64,
    format: TableFormat,
) -> Result<String, CliError> {
    if n_max == 0 {
        return Err(input_err("--n-max must be at least 1"));
    }
    if n_max + 1 > max_n {
        return Err(CliError {
            code: EXIT_RESOURCE,
            msg: format!(
                "n-max {n_max} needs blocks up to t_{} = 2^{}; limit is --max-n {max_n}",
                n_max + 1,
                (n_max + 1) * (n_max + 1)
            ),
        });
    }
    let big_g = family(f, params)?;
    big_g.spot_check(n_max + 1, j_max)?;
    let big_g = monotonize(&big_g);
    let g = encode_density(&big_g)?;
    let mut out = String::new();
    let csv = format == TableFormat::Csv;
    if csv {
        out.push_str("n,j,average,target,bound,pass,printed_average,printed_target,printed_pass\n");
    } else {
        let _ = writeln!(
            out,
            "{:>3} {:>3} {:>10} {:>10} {:>8} {:>5} {:>10} {:>10} {:>5}",
            "n", "j", "average", "target", "bound", "pass", "printed", "p.target", "p.ok"
        );
    }
    for n in 1..=n_max {
        for j in 0..=j_max {
            let c = verify_block_bound(&g, &big_g, n, j)?;
            if csv {
                let _ = writeln!(
                    out,
                    "{n},{j},{},{},{},{},{},{},{}",
                    rat(&c.average),
                    rat(&c.target),
                    rat(&c.bound),
                    c.pass,
                    rat(&c.printed_average),
                    rat(&c.printed_target),
                    c.printed_pass
                );
            } else {
                let _ = writeln!(
                    out,
                    "{n:>3} {j:>3} {:>10} {:>10} {:>8} {:>5} {:>10} {:>10} {:>5}",
                    dec(&c.average),
                    dec(&c.target),
                    rat(&c.bound),
                    c.pass,
                    dec(&c.printed_average),
                    dec(&c.printed_target),
                    c.printed_pass
                );
            }
        }
    }
    let rows = density_estimates(&g, n_max, j_max)?;
    out.push('\n');
    if csv {
        out.push_str("n,inf_then_average,average_then_inf\n");
    } else {
        let _ = writeln!(out, "{:>3} {:>16} {:>16}", "n", "inf_then_avg", "avg_then_inf");
    }
    for r in &rows {
        if csv {
            let _ = writeln!(out, "{},{},{}", r.n, rat(&r.inf_then_average), rat(&r.average_then_inf));
        } else {
            let _ = writeln!(
                out,
                "{:>3} {:>16} {:>16}",
                r.n,
                dec(&r.inf_then_average),
                dec(&r.average_then_inf)
            );
        }
    }
    if !csv {
        let tail: Vec<&BigRational> = rows.iter().rev().take(2).map(|r| &r.average_then_inf).collect();
        let hi = tail.iter().max().expect("n_max >= 1");
        let lo = tail.iter().min().expect("n_max >= 1");
        let _ = writeln!(out, "\nlimsup estimate (last two n): {}", dec(hi));
        let _ = writeln!(out, "liminf estimate (last two n): {}", dec(lo));
    }
    Ok(out)
}

/// Splits a symbol name into its base tile and the extension suffix.
fn split_name(name: &str) -> (&str, &str) {
    name.split_once('|').unwrap_or((name, ""))
}

fn light_color(c: char) -> &'static str {
    match c {
        'r' => "#d62728",
        'g' => "#2ca02c",
        'y' => "#e8c21a",
        _ => "#cccccc",
    }
}

fn palette(i: usize) -> String {
    // golden-angle hues keep neighbouring indices apart
    let hue = (i as f64 * 137.508) % 360.0;
    format!("hsl({hue:.1},55%,75%)")
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn render_svg(x: &Sft2d, p: &Pattern, head: &str) -> String {
    const CELL: usize = 48;
    let generator = x
        .metadata()
        .lines()
        .find_map(|l| l.strip_prefix("generator="))
        .unwrap_or("");
    let mut out = String::new();
    let _ = writeln!(out, "<?xml version=\"1.0\" encoding=\"UTF-8\"?>");
    let _ = writeln!(out, "<!-- manifest: {} -->", xml_escape(head).replace("--", "- -"));
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{}\" height=\"{}\">",
        p.width * CELL,
        p.height * CELL
    );
    for row in 0..p.height {
        let y = (p.height - 1 - row) * CELL;
        for col in 0..p.width {
            let s = p.get(col, row);
            let name = x.alphabet().name(s);
            let (base, ext) = split_name(name);
            let px = col * CELL;
            match generator {
                "traffic-light" if ext.len() == 2 => {
                    let mut cs = ext.chars();
                    let (a, b) = (cs.next().unwrap(), cs.next().unwrap());
                    let _ = writeln!(
                        out,
                        "<rect x=\"{px}\" y=\"{y}\" width=\"{CELL}\" height=\"{}\" fill=\"{}\" stroke=\"#444\"/>",
                        CELL / 2,
                        light_color(a)
                    );
                    let _ = writeln!(
                        out,
                        "<rect x=\"{px}\" y=\"{}\" width=\"{CELL}\" height=\"{}\" fill=\"{}\" stroke=\"#444\"/>",
                        y + CELL / 2,
                        CELL / 2,
                        light_color(b)
                    );
                }
                _ => {
                    let fill = if generator == "tsirelson" {
                        if ext.starts_with('b') { "#3b6fd8".to_string() } else { "#ffffff".to_string() }
                    } else {
                        palette(s as usize)
                    };
                    let _ = writeln!(
                        out,
                        "<rect x=\"{px}\" y=\"{y}\" width=\"{CELL}\" height=\"{CELL}\" fill=\"{fill}\" stroke=\"#444\"/>"
                    );
                }
            }
            let _ = writeln!(
                out,
                "<text x=\"{}\" y=\"{}\" font-family=\"monospace\" font-size=\"9\" text-anchor=\"middle\">{}</text>",
                px + CELL / 2,
                y + CELL / 2 + 3,
                xml_escape(base)
            );
        }
    }
    out.push_str("</svg>\n");
    out
}

fn render_ascii(x: &Sft2d, p: &Pattern) -> String {
    let width = (0..p.height)
        .flat_map(|r| (0..p.width).map(move |c| (c, r)))
        .map(|(c, r)| x.alphabet().name(p.get(c, r)).len())
        .max()
        .unwrap_or(1);
    let mut out = String::new();
    for row in (0..p.height).rev() {
        let cells: Vec<String> = (0..p.width)
            .map(|c| format!("{:<width$}", x.alphabet().name(p.get(c, row))))
            .collect();
        let _ = writeln!(out, "{}", cells.join(" ").trim_end());
    }
    out
}

fn run(cli: Cli, args: &[String]) -> Result<String, CliError> {
    let head = manifest(args);
    let header = format!("# manifest: {head}\n");
    match cli.cmd {
        Cmd::Gen { name, p, m, q, bh, bv, machine, output } => {
            let x = gen(name, p, m, q, bh, bv, machine)?;
            emit(&output, header + &dsl::serialize(&x))
        }
        Cmd::Count { file, mode, k, j, w, h, lattice, max_states, format, output } => {
            let x = read_sft(&file)?;
            let limits = Limits { max_states };
            let csv = format == TableFormat::Csv;
            let mut body = header;
            match mode {
                CountMode::Rect => {
                    let w = w.or(k).ok_or_else(|| input_err("--w or --k is required"))?;
                    let h = h.or(k).ok_or_else(|| input_err("--h or --k is required"))?;
                    let n = count_rect_with(&x, w, h, &limits)?;
                    if csv {
                        let _ = write!(body, "mode,w,h,count\nrect,{w},{h},{n}\n");
                    } else {
                        let _ = writeln!(body, "rect {w}x{h}: {n}");
                    }
                }
                CountMode::Blocks => {
                    let k = k.ok_or_else(|| input_err("--k is required"))?;
                    let j = j.unwrap_or(k);
                    let n = count_blocks_with(&x, k, j, &limits)?.value;
                    if csv {
                        let _ = write!(body, "mode,k,j,count\nblocks,{k},{j},{n}\n");
                    } else {
                        let _ = writeln!(body, "central {k}-blocks in {j}-blocks: {n}");
                    }
                }
                CountMode::Periodic => {
                    let basis = match (lattice.as_slice(), k) {
                        ([a, b, c, d], _) => LatticeBasis::new(*a, *b, *c, *d),
                        ([], Some(k)) => LatticeBasis::square(k as i64),
                        _ => return Err(input_err("--lattice a,b,c,d or --k is required")),
                    }
                    .map_err(|e| input_err(e.to_string()))?;
                    let n = periodic_points_with(&x, &basis, &limits)?;
                    let [[a, b], [c, d]] = basis.m;
                    if csv {
                        let _ = write!(body, "mode,a,b,c,d,count\nperiodic,{a},{b},{c},{d},{n}\n");
                    } else {
                        let _ = writeln!(body, "periodic points for lattice ({a},{b}),({c},{d}): {n}");
                    }
                }
            }
            emit(&output, body)
        }
        Cmd::Invariants { file, k_list, j_extra, max_states, format, output } => {
            let x = read_sft(&file)?;
            let t = growth_table(&x, &k_list, j_extra, &Limits { max_states })?;
            let mut body = header;
            if format == TableFormat::Csv {
                body.push_str(&t.to_csv());
            } else {
                body.push_str(&t.to_text());
                body.push('\n');
                match trend_report(&t) {
                    Ok(r) => body.push_str(&r.to_text()),
                    Err(InvariantError::Degenerate { usable }) => {
                        let _ = writeln!(
                            body,
                            "trend: degenerate table ({usable} usable rows, need at least 3)"
                        );
                    }
                    Err(e) => return Err(e.into()),
                }
            }
            emit(&output, body)
        }
        Cmd::Render { file, w, h, seed, format, max_states, output } => {
            let x = read_sft(&file)?;
            let p = sample_pattern_with(&x, w, h, seed, &Limits { max_states })?.ok_or(CliError {
                code: EXIT_EMPTY,
                msg: format!("no admissible pattern of size {w}x{h}"),
            })?;
            let body = match format {
                RenderFormat::Ascii => header + &render_ascii(&x, &p),
                RenderFormat::Svg => render_svg(&x, &p, &head),
            };
            emit(&output, body)
        }
        Cmd::Encode { family, params, n_max, j_max, max_n, format, output } => {
            let body = header + &encode(family, &params, n_max, j_max, max_n, format)?;
            emit(&output, body)
        }
    }
}

/// Runs the tool on `args` (including the program name) and returns the
/// exit code, writing results to stdout and diagnostics to stderr.
pub fn main_with(args: Vec<String>) -> i32 {
    let cli = match Cli::try_parse_from(&args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
        }
    };
    if let Some(n) = cli.threads {
        if n == 0 {
            eprintln!("error: --threads must be positive");
            return EXIT_INPUT;
        }
        // a pool may already exist when called repeatedly in one process
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    match run(cli, &args) {
        Ok(out) => {
            print!("{out}");
            EXIT_OK
        }
        Err(e) => {
            eprintln!("error: {}", e.msg);
            e.code
        }
    }
}
