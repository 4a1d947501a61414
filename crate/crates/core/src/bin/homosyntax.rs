//! Command-line entry point.
//!
//! Exit codes: 0 success, 1 failed check or build error, 2 missing or
//! malformed input/resource file, 3 generation failure, 64 bad flags.

use std::fs::{self, File};
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use serde_json::json;

use homosyntax::check::run_check;
use homosyntax::corpus::{
    compute_stats, filter_tokens, length_filter, read_sentence_lines, write_sentence_lines, RawDocument, Segmenter,
    DEFAULT_MAX_WORDS, DEFAULT_MIN_WORDS,
};
use homosyntax::embeddings::{train_embeddings, AssociativeTable, TrainConfig};
use homosyntax::generate::{generate, GenerateOptions, GeneratedSentence, Model, SlotTrace};
use homosyntax::markov::{DecodePolicy, TransitionMatrix};
use homosyntax::model1::FunctionWordDictionary;
use homosyntax::model3::ScoreDirection;
use homosyntax::pos::{read_tagged_tsv, tag_sentence, write_tagged_tsv, TaggedSentence, TaggerLexicon};
use homosyntax::templates::TemplateStore;
use homosyntax::{Error, Resources, SeededRng};

const EXIT_CHECK_FAILED: u8 = 1;
const EXIT_RESOURCE: u8 = 2;
const EXIT_GENERATION: u8 = 3;
const EXIT_USAGE: u8 = 64;

#[derive(Parser)]
#[command(name = "homosyntax", version, about = "Generate Spanish sentences that keep a corpus sentence's syntax and follow a query word's meaning")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Segment raw documents into a sentence-per-line corpus.
    Ingest(IngestArgs),
    /// POS-tag a sentence-per-line corpus with a lexicon.
    Tag(TagArgs),
    /// Validate a pre-tagged corpus and optionally rewrite it canonically.
    ImportTagged(ImportArgs),
    /// Build the POS-bigram transition matrix.
    BuildMatrix(InOut),
    /// Draw one tag skeleton from a matrix.
    GenEgv(GenEgvArgs),
    /// Extract canned-text templates.
    BuildTemplates(InOut),
    /// Train word vectors.
    TrainEmb(TrainArgs),
    /// Build the associative table and, optionally, the function-word dictionary.
    BuildTa(BuildTaArgs),
    /// Generate sentences from prebuilt resources.
    Generate(GenerateArgs),
    /// Run the resource invariant suite.
    Check(CheckArgs),
}

#[derive(Args)]
struct InOut {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct IngestArgs {
    /// Document file or directory of documents; may repeat.
    #[arg(long = "in", required = true)]
    input: Vec<PathBuf>,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = DEFAULT_MIN_WORDS)]
    min_words: usize,
    #[arg(long, default_value_t = DEFAULT_MAX_WORDS)]
    max_words: usize,
    /// Extra abbreviations, one per line.
    #[arg(long)]
    abbrev: Option<PathBuf>,
    /// Also write the statistics report here.
    #[arg(long)]
    stats: Option<PathBuf>,
}

#[derive(Args)]
struct TagArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    lexicon: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ImportArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct GenEgvArgs {
    #[arg(long)]
    matrix: PathBuf,
    #[arg(long = "len", value_parser = clap::value_parser!(u64).range(3..=15))]
    len: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "topk:3", value_parser = parse_policy)]
    policy: DecodePolicy,
}

#[derive(Args)]
struct TrainArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 64)]
    dims: usize,
    #[arg(long, default_value_t = 5)]
    window: usize,
    #[arg(long, default_value_t = 5)]
    epochs: usize,
    #[arg(long, default_value_t = 5)]
    negatives: usize,
    #[arg(long, default_value_t = 2)]
    min_count: u64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
}

#[derive(Args)]
struct BuildTaArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Write the function-word dictionary here.
    #[arg(long)]
    dict_out: Option<PathBuf>,
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=3))]
    model: u8,
    #[arg(long)]
    query: String,
    #[arg(long = "len", value_parser = clap::value_parser!(u64).range(3..=15))]
    len: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    count: u64,
    #[arg(long, env = "HOMOSYNTAX_RESOURCES")]
    resources: PathBuf,
    #[arg(long, default_value = "topk:3", value_parser = parse_policy)]
    policy: DecodePolicy,
    /// Per-slot decision records as JSON-lines, to FILE or stderr.
    #[arg(long, value_name = "FILE", num_args = 0..=1, default_missing_value = "-")]
    trace: Option<PathBuf>,
    /// Score candidates with the ratios inverted.
    #[arg(long)]
    invert_score: bool,
    #[arg(long, default_value_t = 200, value_parser = clap::value_parser!(u64).range(2..))]
    cap_m: u64,
    /// Neighborhood size for model 1.
    #[arg(long, default_value_t = 20, value_parser = clap::value_parser!(u64).range(1..))]
    neighbors: u64,
    #[arg(long, default_value_t = 5)]
    max_hops: usize,
    #[arg(long, default_value_t = 10, value_parser = clap::value_parser!(u64).range(1..))]
    max_attempts: u64,
}

#[derive(Args)]
struct CheckArgs {
    #[arg(long, env = "HOMOSYNTAX_RESOURCES")]
    resources: PathBuf,
}

fn parse_policy(s: &str) -> Result<DecodePolicy, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

enum Failure {
    /// Diagnostics were already written; just exit with this code.
    Reported(u8),
    Error(u8, Error),
}

impl From<Error> for Failure {
    fn from(error: Error) -> Self {
        let code = match error.root() {
            Error::Io { .. } | Error::Format { .. } => EXIT_RESOURCE,
            Error::Config(_) => EXIT_USAGE,
            Error::Generation { .. }
            | Error::Oov(_)
            | Error::Dict(_)
            | Error::Relaxation { .. }
            | Error::Table(_)
            | Error::EmptyRank { .. }
            | Error::DegenerateScore(_)
            | Error::EmptyStore => EXIT_GENERATION,
            _ => EXIT_CHECK_FAILED,
        };
        Failure::Error(code, error)
    }
}

fn error_code(e: &Error) -> &'static str {
    match e.root() {
        Error::Io { .. } => "io",
        Error::Ingest { .. } => "ingest",
        Error::Config(_) => "config",
        Error::Tag(_) => "tag",
        Error::Format { .. } => "format",
        Error::Build(_) => "build",
        Error::Generation { .. } => "generation",
        Error::Template { .. } => "template",
        Error::EmptyStore => "empty_store",
        Error::Train(_) => "train",
        Error::Oov(_) => "oov",
        Error::Dict(_) => "dict",
        Error::Relaxation { .. } => "relaxation",
        Error::Table(_) => "table",
        Error::EmptyRank { .. } => "empty_rank",
        Error::DegenerateScore(_) => "degenerate_score",
        Error::Slot { .. } => "slot",
    }
}

fn diagnostic(e: &Error, exit: u8, extra: serde_json::Value) {
    let mut obj = json!({
        "level": "error",
        "code": error_code(e),
        "message": e.to_string(),
        "exit": exit,
    });
    if let Error::Slot { position, .. } = e {
        obj["position"] = json!(position);
    }
    if let (Some(o), Some(x)) = (obj.as_object_mut(), extra.as_object()) {
        o.extend(x.clone());
    }
    eprintln!("{obj}");
}

fn create(path: &Path) -> Result<BufWriter<File>, Error> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| io_error(dir, e))?;
    }
    File::create(path).map(BufWriter::new).map_err(|e| io_error(path, e))
}

fn io_error(path: &Path, e: io::Error) -> Error {
    Error::Io {
        path: path.to_path_buf(),
        source: e,
    }
}

fn open(path: &Path) -> Result<BufReader<File>, Error> {
    File::open(path).map(BufReader::new).map_err(|e| io_error(path, e))
}

fn write_with(path: &Path, f: impl FnOnce(&mut BufWriter<File>) -> io::Result<()>) -> Result<(), Error> {
    let mut w = create(path)?;
    f(&mut w).and_then(|_| w.flush()).map_err(|e| io_error(path, e))
}

fn read_tagged(path: &Path) -> Result<Vec<TaggedSentence>, Error> {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    read_tagged_tsv(open(path)?, &stem)
}

fn document_paths(inputs: &[PathBuf]) -> Result<Vec<PathBuf>, Error> {
    let mut paths = Vec::new();
    for input in inputs {
        if input.is_dir() {
            let mut entries: Vec<PathBuf> = fs::read_dir(input)
                .map_err(|e| io_error(input, e))?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|p| p.is_file())
                .collect();
            entries.sort();
            paths.extend(entries);
        } else if input.is_file() {
            paths.push(input.clone());
        } else {
            return Err(io_error(input, io::Error::new(io::ErrorKind::NotFound, "no such file or directory")));
        }
    }
    Ok(paths)
}

fn ingest(args: IngestArgs) -> Result<(), Failure> {
    let mut segmenter = Segmenter::default();
    if let Some(path) = &args.abbrev {
        let text = fs::read_to_string(path).map_err(|e| io_error(path, e))?;
        for line in text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#')) {
            segmenter.add_abbreviation(line);
        }
    }
    let mut sentences = Vec::new();
    for path in document_paths(&args.input)? {
        let bytes = fs::read(&path).map_err(|e| io_error(&path, e))?;
        let id = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
        let doc = RawDocument::from_bytes(id, bytes)?;
        sentences.extend(segmenter.segment(&doc).iter().map(filter_tokens));
    }
    let kept = length_filter(sentences, args.min_words, args.max_words)?;
    write_with(&args.out, |w| write_sentence_lines(w, &kept))?;
    let stats = compute_stats(&kept);
    print!("{stats}");
    if let Some(path) = &args.stats {
        write_with(path, |w| write!(w, "{stats}"))?;
    }
    Ok(())
}

fn tag(args: TagArgs) -> Result<(), Failure> {
    let lexicon = TaggerLexicon::read(open(&args.lexicon)?, &args.lexicon.display().to_string())?;
    let stem = args.input.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let sentences = read_sentence_lines(open(&args.input)?, &stem)?;
    let tagged: Vec<TaggedSentence> = sentences.iter().map(|s| tag_sentence(s, &lexicon)).collect();
    write_with(&args.out, |w| write_tagged_tsv(w, &tagged))?;
    println!("tagged {} sentences", tagged.len());
    Ok(())
}

fn import_tagged(args: ImportArgs) -> Result<(), Failure> {
    let tagged = read_tagged(&args.input)?;
    let tokens: usize = tagged.iter().map(|s| s.tokens.len()).sum();
    if let Some(out) = &args.out {
        write_with(out, |w| write_tagged_tsv(w, &tagged))?;
    }
    println!("sentences: {}\ntokens: {tokens}", tagged.len());
    Ok(())
}

fn build_matrix(args: InOut) -> Result<(), Failure> {
    let matrix = TransitionMatrix::build(&read_tagged(&args.input)?)?;
    write_with(&args.out, |w| matrix.write(w))?;
    println!("states: {}", matrix.len());
    Ok(())
}

fn gen_egv(args: GenEgvArgs) -> Result<(), Failure> {
    let matrix = TransitionMatrix::read(open(&args.matrix)?, &args.matrix.display().to_string())?;
    let mut rng = SeededRng::seed_from_u64(args.seed);
    let egv = matrix.generate_egv(None, args.len as usize, args.policy, &mut rng)?;
    let tags: Vec<&str> = egv.slots.iter().map(|t| t.truncated()).collect();
    println!("{}", tags.join(" "));
    Ok(())
}

fn build_templates(args: InOut) -> Result<(), Failure> {
    let (store, skipped) = TemplateStore::build(&read_tagged(&args.input)?);
    write_with(&args.out, |w| store.write_jsonl(w))?;
    println!("templates: {}\nskipped: {skipped}", store.len());
    Ok(())
}

fn train_emb(args: TrainArgs) -> Result<(), Failure> {
    let stem = args.input.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let corpus = read_sentence_lines(open(&args.input)?, &stem)?;
    let cfg = TrainConfig {
        dims: args.dims,
        window: args.window,
        epochs: args.epochs,
        negatives: args.negatives,
        min_count: args.min_count,
        seed: args.seed,
        ..TrainConfig::default()
    };
    let (store, report) = train_embeddings(&corpus, &cfg)?;
    write_with(&args.out, |w| store.write_text(w))?;
    println!("vocabulary: {}\ntokens: {}", report.vocab_size, report.training_tokens);
    for (i, loss) in report.epoch_losses.iter().enumerate() {
        println!("epoch {}: loss {loss:.6}", i + 1);
    }
    Ok(())
}

fn build_ta(args: BuildTaArgs) -> Result<(), Failure> {
    let corpus = read_tagged(&args.input)?;
    let table = AssociativeTable::build(&corpus);
    write_with(&args.out, |w| table.write_jsonl(w))?;
    println!("content tags: {}", table.len());
    if let Some(path) = &args.dict_out {
        let dict = FunctionWordDictionary::build(&corpus);
        write_with(path, |w| dict.write_jsonl(w))?;
        println!("function tags: {}", dict.len());
    }
    Ok(())
}

#[derive(serde::Serialize)]
struct TraceLine<'a> {
    sentence: usize,
    #[serde(flatten)]
    slot: &'a SlotTrace,
}

/// Generates `count` sentences, sentence `i` seeded with `seed + i`.
/// Work is spread over threads; results keep index order.
fn generate_all(
    model: Model,
    query: &str,
    n: usize,
    res: &Resources,
    seed: u64,
    count: usize,
    opts: &GenerateOptions,
) -> Vec<homosyntax::Result<GeneratedSentence>> {
    let workers = std::thread::available_parallelism().map_or(1, |p| p.get()).min(count);
    let mut results: Vec<Option<homosyntax::Result<GeneratedSentence>>> = (0..count).map(|_| None).collect();
    std::thread::scope(|scope| {
        for (w, chunk) in results.chunks_mut(count.div_ceil(workers)).enumerate() {
            let base = w * count.div_ceil(workers);
            scope.spawn(move || {
                for (k, slot) in chunk.iter_mut().enumerate() {
                    let i = (base + k) as u64;
                    *slot = Some(generate(model, query, n, res, seed.wrapping_add(i), opts));
                }
            });
        }
    });
    results.into_iter().map(|r| r.expect("every index is filled")).collect()
}

fn run_generate(args: GenerateArgs) -> Result<(), Failure> {
    let res = Resources::load_dir(&args.resources)?;
    let model = Model::try_from(args.model)?;
    let opts = GenerateOptions {
        neighbor_count: args.neighbors as usize,
        max_hops: args.max_hops,
        policy: args.policy,
        cap_m: args.cap_m as usize,
        direction: if args.invert_score {
            ScoreDirection::Inverted
        } else {
            ScoreDirection::Printed
        },
        max_attempts: args.max_attempts as usize,
    };
    let results = generate_all(model, &args.query, args.len as usize, &res, args.seed, args.count as usize, &opts);

    let mut trace_out: Option<Box<dyn Write>> = match args.trace.as_deref() {
        None => None,
        Some(p) if p == Path::new("-") => Some(Box::new(io::stderr())),
        Some(p) => Some(Box::new(create(p)?)),
    };
    let stdout = io::stdout();
    let mut out = stdout.lock();
    let mut failures = 0;
    for (i, result) in results.iter().enumerate() {
        match result {
            Ok(g) => {
                writeln!(out, "{}", g.text).map_err(|e| io_error(Path::new("<stdout>"), e))?;
                if let Some(t) = trace_out.as_mut() {
                    for slot in &g.trace {
                        let line = serde_json::to_string(&TraceLine { sentence: i, slot }).expect("trace serializes");
                        writeln!(t, "{line}").map_err(|e| io_error(Path::new("<trace>"), e))?;
                    }
                }
            }
            Err(e) => {
                failures += 1;
                diagnostic(e, EXIT_GENERATION, json!({ "sentence": i, "seed": args.seed.wrapping_add(i as u64) }));
            }
        }
    }
    out.flush().map_err(|e| io_error(Path::new("<stdout>"), e))?;
    if let Some(t) = trace_out.as_mut() {
        t.flush().map_err(|e| io_error(Path::new("<trace>"), e))?;
    }
    if failures > 0 {
        eprintln!("error: {failures} of {} sentences could not be generated", results.len());
        return Err(Failure::Reported(EXIT_GENERATION));
    }
    Ok(())
}

fn run_check_cmd(args: CheckArgs) -> Result<(), Failure> {
    let res = Resources::load_dir(&args.resources)?;
    let report = run_check(&res)?;
    for r in report.results.iter().filter(|r| !r.passed) {
        eprintln!("{}", json!({ "level": "error", "code": "check_failed", "check": r.name, "message": r.detail, "exit": EXIT_CHECK_FAILED }));
    }
    print!("{report}");
    if report.passed() {
        Ok(())
    } else {
        Err(Failure::Reported(EXIT_CHECK_FAILED))
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            let message = e.render().to_string();
            let first = message.lines().next().unwrap_or("invalid arguments").trim_start_matches("error: ");
            eprintln!("{}", json!({ "level": "error", "code": "usage", "message": first, "exit": EXIT_USAGE }));
            let _ = e.print();
            return ExitCode::from(EXIT_USAGE);
        }
    };
    let result = match cli.command {
        Command::Ingest(a) => ingest(a),
        Command::Tag(a) => tag(a),
        Command::ImportTagged(a) => import_tagged(a),
        Command::BuildMatrix(a) => build_matrix(a),
        Command::GenEgv(a) => gen_egv(a),
        Command::BuildTemplates(a) => build_templates(a),
        Command::TrainEmb(a) => train_emb(a),
        Command::BuildTa(a) => build_ta(a),
        Command::Generate(a) => run_generate(a),
        Command::Check(a) => run_check_cmd(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Reported(code)) => ExitCode::from(code),
        Err(Failure::Error(code, error)) => {
            diagnostic(&error, code, json!({}));
            eprintln!("error: {error}");
            ExitCode::from(code)
        }
    }
}
