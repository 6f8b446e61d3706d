//! `pmedits`: k-edit occurrences, sketches and string structure from the command line.
//!
//! Inputs are read as one symbol per byte, or as whitespace-separated
//! integers with `--format tokens`. Logging goes to stderr and is controlled
//! by `PMEDITS_LOG` (for example `PMEDITS_LOG=info`).

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use pmedits::analysis::{analyze, Decomposition};
use pmedits::compress::{lz77, selfed, Phrase};
use pmedits::edit::{edit_info, CostedOccurrence, EditInfo};
use pmedits::matcher::{attach_alignments, find_occurrences, match_banded};
use pmedits::sketch::{
    decode, encode, gen_lower_bound, reduce_alphabet, sketch_size_bits, CoverStrategy, DecodeOptions, EncodeOptions,
    Sketch,
};
use pmedits::strings::{from_bytes, parse_tokens};
use pmedits::workload::{generate, Family};
use pmedits::{Error, Sym};
use serde::Serialize;
use serde_json::{json, Value};
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

#[derive(Parser)]
#[command(name = "pmedits", version, about = "Pattern matching with edits")]
struct Cli {
    /// Worker threads for per-window work (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Bytes,
    Tokens,
}

#[derive(Args)]
struct Input {
    /// How input files are split into symbols.
    #[arg(long, value_enum, default_value = "bytes")]
    format: Format,
}

#[derive(Subcommand)]
enum Command {
    /// All k-edit occurrences of PATTERN in TEXT as JSON.
    Match {
        pattern: PathBuf,
        text: PathBuf,
        #[arg(short, long)]
        k: usize,
        /// Use the banded reference matcher instead of the structural pipeline.
        #[arg(long)]
        reference: bool,
        /// Include the edit information of an optimal alignment per occurrence.
        #[arg(long)]
        edits: bool,
        #[command(flatten)]
        input: Input,
    },
    #[command(subcommand)]
    Sketch(SketchCmd),
    /// Structural decomposition of PATTERN.
    Analyze {
        pattern: PathBuf,
        #[arg(short, long)]
        k: usize,
        #[command(flatten)]
        input: Input,
    },
    /// Self-edit distance with a witness alignment.
    Selfed {
        input: String,
        /// Treat INPUT as the string itself rather than a path.
        #[arg(long)]
        literal: bool,
        #[command(flatten)]
        fmt: Input,
    },
    /// Greedy LZ77 factorization.
    Lz {
        input: String,
        #[arg(long)]
        literal: bool,
        #[command(flatten)]
        fmt: Input,
    },
    /// Writes a lower-bound instance as '0'/'1' files and prints the planted sets.
    GenLb {
        #[arg(short)]
        n: usize,
        #[arg(short)]
        m: usize,
        #[arg(short)]
        k: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        pattern_out: PathBuf,
        #[arg(long)]
        text_out: PathBuf,
    },
    /// Sketch sizes and timings over the generated families.
    Bench {
        #[arg(long, value_delimiter = ',', default_values_t = [256usize, 1024, 4096])]
        m: Vec<usize>,
        #[arg(long, value_delimiter = ',', default_values_t = [4usize, 16, 64])]
        k: Vec<usize>,
        /// Text length as a multiple of m.
        #[arg(long, default_value_t = 4)]
        ratio: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

#[derive(Subcommand)]
enum SketchCmd {
    /// Writes the sketch of all k-edit occurrences and prints a size report.
    Encode {
        pattern: PathBuf,
        text: PathBuf,
        #[arg(short, long)]
        k: usize,
        #[arg(short, long)]
        out: PathBuf,
        /// Keep input symbols instead of reducing to the pattern's alphabet.
        #[arg(long)]
        chars: bool,
        /// Starting positions per window (at most m - 3k).
        #[arg(long)]
        window: Option<usize>,
        #[arg(long, value_enum, default_value = "recursive")]
        cover: Cover,
        /// Skip the per-window masked re-check.
        #[arg(long)]
        no_verify: bool,
        #[command(flatten)]
        input: Input,
    },
    /// Decodes occurrences from a sketch file alone.
    Decode {
        sketch: PathBuf,
        /// Omit alignments and edit information.
        #[arg(long)]
        positions_only: bool,
    },
    /// Header and per-window kinds and sizes.
    Inspect { sketch: PathBuf },
}

#[derive(Clone, Copy, ValueEnum)]
enum Cover {
    Recursive,
    Minimal,
}

#[derive(Serialize)]
struct EditJson {
    x: usize,
    cx: Option<Sym>,
    y: usize,
    cy: Option<Sym>,
}

#[derive(Serialize)]
struct OccJson {
    start: usize,
    end: usize,
    cost: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    edits: Option<Vec<EditJson>>,
}

fn occ_json(o: &CostedOccurrence, info: Option<&EditInfo>) -> OccJson {
    OccJson {
        start: o.start,
        end: o.end,
        cost: o.cost,
        edits: info.map(|e| e.records.iter().map(|r| EditJson { x: r.x, cx: r.cx, y: r.y, cy: r.cy }).collect()),
    }
}

fn read_symbols(path: &Path, format: Format) -> Result<Vec<Sym>> {
    let bytes = std::fs::read(path).map_err(|e| input_error(format!("{}: {e}", path.display())))?;
    match format {
        Format::Bytes => Ok(from_bytes(&bytes)),
        Format::Tokens => {
            let text = String::from_utf8(bytes).map_err(|e| input_error(format!("{}: {e}", path.display())))?;
            Ok(parse_tokens(&text)?)
        }
    }
}

fn read_arg(input: &str, literal: bool, format: Format) -> Result<Vec<Sym>> {
    if literal {
        return match format {
            Format::Bytes => Ok(from_bytes(input.as_bytes())),
            Format::Tokens => Ok(parse_tokens(input)?),
        };
    }
    read_symbols(Path::new(input), format)
}

/// Errors that map to the input-error exit code.
#[derive(Debug)]
struct InputError(String);

impl std::fmt::Display for InputError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for InputError {}

fn input_error(msg: String) -> anyhow::Error {
    InputError(msg).into()
}

fn print(v: &impl Serialize) -> Result<()> {
    println!("{}", serde_json::to_string_pretty(v)?);
    Ok(())
}

fn sym_json(c: Sym) -> Value {
    match char::from_u32(c).filter(|ch| ch.is_ascii_graphic() || *ch == ' ') {
        Some(ch) => json!(ch.to_string()),
        None => json!(c),
    }
}

fn cmd_match(p: &[Sym], t: &[Sym], k: usize, reference: bool, edits: bool) -> Result<Value> {
    let started = Instant::now();
    let mut occs = if reference { match_banded(p, t, k) } else { find_occurrences(p, t, k)? };
    log::info!("matched {} occurrences in {:.3}s", occs.len(), started.elapsed().as_secs_f64());
    let infos: Vec<Option<EditInfo>> = if edits {
        attach_alignments(p, t, k, &mut occs);
        occs.iter().map(|o| o.alignment.as_ref().map(|a| edit_info(a, p, t))).collect()
    } else {
        vec![None; occs.len()]
    };
    let list: Vec<OccJson> = occs.iter().zip(&infos).map(|(o, i)| occ_json(o, i.as_ref())).collect();
    Ok(json!({
        "n": t.len(),
        "m": p.len(),
        "k": k,
        "mode": if reference { "reference" } else { "pipeline" },
        "occurrences": list,
    }))
}

fn decomposition_json(d: &Decomposition) -> Value {
    let period = |q: &[Sym]| q.iter().map(|&c| sym_json(c)).collect::<Vec<_>>();
    match d {
        Decomposition::Breaks(bs) => json!({
            "case": d.case_name(),
            "breaks": bs.iter().map(|b| json!({"start": b.start, "end": b.end})).collect::<Vec<_>>(),
        }),
        Decomposition::Regions(rs) => json!({
            "case": d.case_name(),
            "regions": rs.iter().map(|r| json!({
                "start": r.fragment.start,
                "end": r.fragment.end,
                "period": period(&r.period),
                "budget": r.budget,
            })).collect::<Vec<_>>(),
        }),
        Decomposition::ApproxPeriod(q) => json!({"case": d.case_name(), "period": period(q)}),
    }
}

fn phrase_json(ph: &Phrase) -> Value {
    match *ph {
        Phrase::Literal(c) => json!([sym_json(c), 0]),
        Phrase::Copy { src, len } => json!([src, len]),
    }
}

fn inspect_json(s: &Sketch) -> Value {
    let h = &s.header;
    let bits = s.window_bits();
    let mut kinds: BTreeMap<String, usize> = BTreeMap::new();
    for w in &s.windows {
        *kinds.entry(w.kind().to_string()).or_default() += 1;
    }
    json!({
        "version": h.version,
        "chars": h.chars,
        "n": h.n,
        "m": h.m,
        "k": h.k,
        "alphabet_size": h.alphabet_size,
        "window_len": h.block_len,
        "window_count": h.window_count,
        "pattern_stored": s.pattern.is_some(),
        "bits": sketch_size_bits(s),
        "kinds": kinds,
        "windows": s.windows.iter().zip(&bits).enumerate().map(|(i, (w, b))| json!({
            "index": i,
            "kind": w.kind().to_string(),
            "bits": b,
        })).collect::<Vec<_>>(),
    })
}

fn bench(ms: &[usize], ks: &[usize], ratio: usize, seed: u64) -> Result<Value> {
    let mut rows = Vec::new();
    let mut worst: f64 = 0.0;
    for family in Family::ALL {
        for &m in ms {
            for &k in ks {
                if 4 * k > m {
                    continue;
                }
                let n = ratio * m;
                let (p, t) = generate(family, n, m, k, seed)?;
                let t0 = Instant::now();
                let (sk, report) = encode(&p, &t, k, &EncodeOptions { verify: false, ..Default::default() })?;
                let enc = t0.elapsed().as_secs_f64();
                let t1 = Instant::now();
                let dec = decode(&sk, DecodeOptions { alignments: false })?;
                let dec_time = t1.elapsed().as_secs_f64();
                let (pr, tr, _) = reduce_alphabet(&p, &t, false);
                let want = match_banded(&pr, &tr, k);
                let ok = dec.len() == want.len()
                    && dec.iter().zip(&want).all(|(d, w)| d.occurrence.key() == w.key());
                let bits = sketch_size_bits(&sk);
                let lg = (m as f64).log2();
                let bound = (n as f64 / m as f64) * k as f64 * lg * lg;
                let c = bits as f64 / bound;
                worst = worst.max(c);
                let mut kinds: BTreeMap<String, usize> = BTreeMap::new();
                for w in &report.windows {
                    *kinds.entry(w.kind.to_string()).or_default() += 1;
                }
                rows.push(json!({
                    "family": family.to_string(), "n": n, "m": m, "k": k,
                    "bits": bits, "c": c, "occurrences": want.len(), "decoded_ok": ok,
                    "encode_s": enc, "decode_s": dec_time, "kinds": kinds,
                    "violations": report.violations.len(),
                }));
            }
        }
    }
    Ok(json!({"rows": rows, "fitted_c": worst}))
}

fn run(cli: Cli) -> Result<()> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global()?;
    }
    match cli.cmd {
        Command::Match { pattern, text, k, reference, edits, input } => {
            let p = read_symbols(&pattern, input.format)?;
            let t = read_symbols(&text, input.format)?;
            print(&cmd_match(&p, &t, k, reference, edits)?)
        }
        Command::Sketch(SketchCmd::Encode { pattern, text, k, out, chars, window, cover, no_verify, input }) => {
            let p = read_symbols(&pattern, input.format)?;
            let t = read_symbols(&text, input.format)?;
            let opts = EncodeOptions {
                chars,
                block_len: window,
                cover: match cover {
                    Cover::Recursive => CoverStrategy::Recursive,
                    Cover::Minimal => CoverStrategy::Minimal,
                },
                verify: !no_verify,
            };
            let started = Instant::now();
            let (sk, report) = encode(&p, &t, k, &opts)?;
            log::info!("encoded in {:.3}s", started.elapsed().as_secs_f64());
            let bytes = sk.to_bytes();
            std::fs::write(&out, &bytes).with_context(|| format!("writing {}", out.display()))?;
            for v in &report.violations {
                log::warn!("{v}");
            }
            let mut summary = inspect_json(&sk);
            summary["violations"] = json!(report.violations);
            summary.as_object_mut().unwrap().remove("windows");
            print(&summary)
        }
        Command::Sketch(SketchCmd::Decode { sketch, positions_only }) => {
            let data = std::fs::read(&sketch).map_err(|e| input_error(format!("{}: {e}", sketch.display())))?;
            let sk = Sketch::from_bytes(&data)?;
            let occs = decode(&sk, DecodeOptions { alignments: !positions_only })?;
            let list: Vec<OccJson> = occs.iter().map(|d| occ_json(&d.occurrence, d.info.as_ref())).collect();
            let h = &sk.header;
            print(&json!({"n": h.n, "m": h.m, "k": h.k, "mode": "sketch", "occurrences": list}))
        }
        Command::Sketch(SketchCmd::Inspect { sketch }) => {
            let data = std::fs::read(&sketch).map_err(|e| input_error(format!("{}: {e}", sketch.display())))?;
            print(&inspect_json(&Sketch::from_bytes(&data)?))
        }
        Command::Analyze { pattern, k, input } => {
            let p = read_symbols(&pattern, input.format)?;
            let d = analyze(&p, k)?;
            let mut v = decomposition_json(&d);
            v["m"] = json!(p.len());
            v["k"] = json!(k);
            print(&v)
        }
        Command::Selfed { input, literal, fmt } => {
            let x = read_arg(&input, literal, fmt.format)?;
            let r = selfed(&x);
            print(&json!({"length": x.len(), "selfed": r.cost, "witness": r.witness.points}))
        }
        Command::Lz { input, literal, fmt } => {
            let x = read_arg(&input, literal, fmt.format)?;
            let f = lz77(&x);
            let text: Vec<String> = f.iter().map(Phrase::to_string).collect();
            print(&json!({"length": x.len(), "z": f.len(), "phrases": f.iter().map(phrase_json).collect::<Vec<_>>(), "text": text.join("")}))
        }
        Command::GenLb { n, m, k, seed, pattern_out, text_out } => {
            let inst = gen_lower_bound(n, m, k, seed)?;
            let as_bytes = |s: &[Sym]| s.iter().map(|&c| b'0' + c as u8).collect::<Vec<u8>>();
            std::fs::write(&pattern_out, as_bytes(&inst.p)).with_context(|| format!("writing {}", pattern_out.display()))?;
            std::fs::write(&text_out, as_bytes(&inst.t)).with_context(|| format!("writing {}", text_out.display()))?;
            print(&json!({"n": n, "m": m, "k": k, "seed": seed, "blocks": inst.params.blocks(), "planted": inst.planted}))
        }
        Command::Bench { m, k, ratio, seed } => {
            if m.contains(&0) || k.contains(&0) || ratio == 0 {
                return Err(input_error("m, k and ratio must be positive".into()));
            }
            print(&bench(&m, &k, ratio, seed)?)
        }
    }
}

fn exit_code(e: &anyhow::Error) -> u8 {
    if e.downcast_ref::<InputError>().is_some() || e.downcast_ref::<std::io::Error>().is_some() {
        return 2;
    }
    match e.downcast_ref::<Error>() {
        Some(Error::Corrupt(_) | Error::Unsupported(_)) => 3,
        Some(Error::InternalInvariantBroken(_)) => 4,
        _ => 2,
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("PMEDITS_LOG", "warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}

