//! The `kinetiq` command line.
//!
//! Exit codes: 0 success, 1 invalid input (spec, data or flags), 2 I/O
//! failure, 3 internal error.

use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use kinetiq::data::{
    build_registry, generate_synthetic, ingest_xapi, parse_dataset, parse_mix, serialize_dataset, DataError, Dataset,
    DomainOverrides, Normalization, ParameterRegistry, SimConfig,
};
use kinetiq::query::{
    parse_query, render_document, render_document_still, validate_against, Diagnostic, QueryDocument, RunError,
};
use kinetiq::render::{encode_png, write_animation, AnimationFormat};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitStatus {
    Success = 0,
    Invalid = 1,
    Io = 2,
    Internal = 3,
}

impl ExitStatus {
    pub fn code(self) -> i32 {
        self as i32
    }
}

#[derive(Debug)]
pub struct CliError {
    pub status: ExitStatus,
    pub message: String,
}

impl CliError {
    fn invalid(message: impl Into<String>) -> Self {
        CliError { status: ExitStatus::Invalid, message: message.into() }
    }

    fn io(path: &Path, e: impl fmt::Display) -> Self {
        CliError { status: ExitStatus::Io, message: format!("{}: {e}", path.display()) }
    }

    fn internal(e: impl fmt::Display) -> Self {
        CliError { status: ExitStatus::Internal, message: e.to_string() }
    }
}

impl From<DataError> for CliError {
    fn from(e: DataError) -> Self {
        CliError::invalid(e.to_string())
    }
}

#[derive(Debug, Parser)]
#[command(name = "kinetiq", version, about = "Animated layered color encodings for line charts of game telemetry")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Render the full animation loop.
    Render(RenderArgs),
    /// Render one still frame at loop time `t` as PNG.
    Frame(FrameArgs),
    /// List every selectable parameter with its normalization domain.
    Params(ParamsArgs),
    /// Check a query document, optionally against a dataset.
    Validate(ValidateArgs),
    /// Generate a seeded synthetic dataset as JSONL.
    Simgen(SimgenArgs),
    /// Serve the HTTP API.
    Serve(ServeArgs),
}

#[derive(Debug, Args)]
pub struct Inputs {
    /// Query document (JSON).
    pub spec: PathBuf,
    /// Dataset: JSONL, or a JSON array of xAPI statements. Defaults to the
    /// document's "dataset" field, resolved next to the document.
    #[arg(long, short)]
    pub data: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RenderArgs {
    #[command(flatten)]
    pub inputs: Inputs,
    /// Output file, or directory for png_sequence.
    #[arg(long, short)]
    pub out: PathBuf,
    /// Frames per loop; overrides render.n_frames.
    #[arg(long)]
    pub frames: Option<usize>,
    /// Overrides render.fps.
    #[arg(long)]
    pub fps: Option<u32>,
    /// apng, gif or png_sequence; overrides render.format.
    #[arg(long, value_parser = parse_format)]
    pub format: Option<AnimationFormat>,
}

#[derive(Debug, Args)]
pub struct FrameArgs {
    #[command(flatten)]
    pub inputs: Inputs,
    /// Loop time; wraps, so 1.25 is the same frame as 0.25.
    #[arg(long, short, allow_negative_numbers = true)]
    pub t: f64,
    /// Output PNG.
    #[arg(long, short)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ParamsArgs {
    /// Dataset: JSONL or xAPI statements.
    pub data: PathBuf,
    /// Print a JSON object of ref to domain instead of a table.
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    /// Query document (JSON).
    pub spec: PathBuf,
    /// Also check parameter refs against this dataset.
    #[arg(long, short)]
    pub data: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SimgenArgs {
    /// Required; the same seed always yields the same bytes.
    #[arg(long)]
    pub seed: u64,
    #[arg(long, default_value_t = 10)]
    pub players: usize,
    #[arg(long, default_value_t = 20)]
    pub turns: usize,
    #[arg(long, default_value_t = 4)]
    pub districts: usize,
    #[arg(long, default_value_t = 1)]
    pub level: u32,
    /// Strategy weights, e.g. `deliberate=0.7,hurried=0.3`.
    #[arg(long)]
    pub mix: Option<String>,
    /// Output file; standard output when omitted.
    #[arg(long, short)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ServeArgs {
    #[arg(long, default_value = "127.0.0.1")]
    pub host: String,
    /// 0 picks a free port.
    #[arg(long, default_value_t = 8080)]
    pub port: u16,
    /// Persist uploaded datasets here and reload them on start.
    #[arg(long)]
    pub data_dir: Option<PathBuf>,
}

fn parse_format(s: &str) -> Result<AnimationFormat, String> {
    s.parse()
}

/// Cap rayon's worker count from `KINETIQ_THREADS`, if set.
pub fn init_threads() -> Result<(), CliError> {
    let Ok(v) = std::env::var("KINETIQ_THREADS") else { return Ok(()) };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::invalid(format!("KINETIQ_THREADS must be a positive integer, got {v:?}")))?;
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(CliError::internal)
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

fn write(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    std::fs::write(path, bytes).map_err(|e| CliError::io(path, e))
}

/// JSONL, or xAPI when the text is a JSON array.
pub fn load_dataset(path: &Path, err: &mut dyn Write) -> Result<Dataset, CliError> {
    let text = read(path)?;
    if text.trim_start().starts_with('[') {
        let ingest = ingest_xapi(&text).map_err(|e| CliError::invalid(format!("{}: {e}", path.display())))?;
        for w in &ingest.warnings {
            let _ = writeln!(err, "{}: warning: {w}", path.display());
        }
        return Ok(ingest.dataset);
    }
    parse_dataset(&text).map_err(|e| CliError::invalid(format!("{}: {e}", path.display())))
}

fn print_diagnostics(err: &mut dyn Write, source: &Path, diags: &[Diagnostic]) {
    for d in diags {
        let _ = writeln!(err, "{}: {d}", source.display());
    }
}

fn load_document(path: &Path, err: &mut dyn Write) -> Result<QueryDocument, CliError> {
    let text = read(path)?;
    match parse_query(&text) {
        Ok((doc, warnings)) => {
            print_diagnostics(err, path, &warnings);
            Ok(doc)
        }
        Err(e) => {
            print_diagnostics(err, path, &e.diagnostics);
            Err(CliError::invalid(format!("{}: invalid query document", path.display())))
        }
    }
}

fn data_path(inputs_data: Option<&Path>, spec: &Path, doc: &QueryDocument) -> Result<PathBuf, CliError> {
    if let Some(p) = inputs_data {
        return Ok(p.to_path_buf());
    }
    let Some(rel) = &doc.dataset else {
        return Err(CliError::invalid("no dataset: pass --data or set \"dataset\" in the document"));
    };
    let base = spec.parent().unwrap_or(Path::new(""));
    Ok(base.join(rel))
}

struct Loaded {
    doc: QueryDocument,
    dataset: Dataset,
    registry: ParameterRegistry,
}

fn load(inputs: &Inputs, err: &mut dyn Write) -> Result<Loaded, CliError> {
    let doc = load_document(&inputs.spec, err)?;
    let path = data_path(inputs.data.as_deref(), &inputs.spec, &doc)?;
    let dataset = load_dataset(&path, err)?;
    let registry = build_registry(&dataset, &DomainOverrides::new())?;
    for w in registry.warnings() {
        let _ = writeln!(err, "{}: warning: {w}", path.display());
    }
    Ok(Loaded { doc, dataset, registry })
}

fn run_error(spec: &Path, err: &mut dyn Write, e: RunError) -> CliError {
    match e {
        RunError::Invalid(q) => {
            print_diagnostics(err, spec, &q.diagnostics);
            CliError::invalid(format!("{}: query does not fit the dataset", spec.display()))
        }
        RunError::Render(e) => CliError::internal(e),
    }
}

fn report_warnings(err: &mut dyn Write, warnings: &[String]) {
    for w in warnings {
        let _ = writeln!(err, "warning: {w}");
    }
}

pub fn cmd_render(args: &RenderArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), CliError> {
    let mut l = load(&args.inputs, err)?;
    let r = &mut l.doc.render;
    if let Some(n) = args.frames {
        r.n_frames = n;
    }
    if let Some(f) = args.fps {
        r.fps = f;
    }
    if let Some(f) = args.format {
        r.format = f;
    }
    if let Some((field, msg)) = r.problems().into_iter().next() {
        return Err(CliError::invalid(format!("{field}: {msg}")));
    }
    let run = render_document(&l.doc, &l.dataset, &l.registry).map_err(|e| run_error(&args.inputs.spec, err, e))?;
    report_warnings(err, &run.warnings);
    let written = write_animation(&run.output, l.doc.render.format, l.doc.render.fps, &args.out).map_err(|e| match e {
        kinetiq::render::RenderError::Io(io) => CliError::io(&args.out, io),
        other => CliError::internal(other),
    })?;
    let _ = writeln!(out, "wrote {} frame(s) to {}", run.output.len(), args.out.display());
    log::info!("{} file(s) written", written.len());
    Ok(())
}

pub fn cmd_frame(args: &FrameArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), CliError> {
    if !args.t.is_finite() {
        return Err(CliError::invalid("t must be finite"));
    }
    let l = load(&args.inputs, err)?;
    let run = render_document_still(&l.doc, &l.dataset, &l.registry, args.t).map_err(|e| run_error(&args.inputs.spec, err, e))?;
    report_warnings(err, &run.warnings);
    write(&args.out, &encode_png(&run.output).map_err(CliError::internal)?)?;
    let _ = writeln!(out, "wrote frame t={} to {}", args.t, args.out.display());
    Ok(())
}

fn describe(n: &Normalization) -> String {
    match n {
        Normalization::Constant(c) => format!("constant {c}"),
        Normalization::Range(d) => format!("[{}, {}]", d.lo, d.hi),
    }
}

pub fn cmd_params(args: &ParamsArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), CliError> {
    let dataset = load_dataset(&args.data, err)?;
    let registry = build_registry(&dataset, &DomainOverrides::new())?;
    for w in registry.warnings() {
        let _ = writeln!(err, "warning: {w}");
    }
    let text = if args.json {
        serde_json::to_string_pretty(&registry.to_json()).map_err(CliError::internal)? + "\n"
    } else {
        let entries = registry.entries();
        let names: Vec<String> = entries.iter().map(|(r, _)| r.to_string()).collect();
        let width = names.iter().map(String::len).max().unwrap_or(0);
        names
            .iter()
            .zip(&entries)
            .map(|(name, (_, n))| format!("{name:<width$}  {}\n", describe(n)))
            .collect()
    };
    out.write_all(text.as_bytes()).map_err(|e| CliError::io(Path::new("<stdout>"), e))
}

pub fn cmd_validate(args: &ValidateArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), CliError> {
    let doc = load_document(&args.spec, err)?;
    if let Some(data) = &args.data {
        let dataset = load_dataset(data, err)?;
        let registry = build_registry(&dataset, &DomainOverrides::new())?;
        let diags = validate_against(&doc, &registry);
        if !diags.is_empty() {
            print_diagnostics(err, &args.spec, &diags);
            return Err(CliError::invalid(format!("{}: query does not fit {}", args.spec.display(), data.display())));
        }
    }
    let _ = writeln!(out, "{}: ok ({} layer(s))", args.spec.display(), doc.layers.len());
    Ok(())
}

pub fn cmd_simgen(args: &SimgenArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let mut cfg = SimConfig::new(args.seed, args.players, args.turns, args.districts);
    cfg.level = args.level;
    if let Some(mix) = &args.mix {
        cfg.strategy_mix = parse_mix(mix)?;
    }
    let text = serialize_dataset(&generate_synthetic(&cfg)?);
    match &args.out {
        Some(p) => write(p, text.as_bytes()),
        None => out.write_all(text.as_bytes()).map_err(|e| CliError::io(Path::new("<stdout>"), e)),
    }
}

pub fn cmd_serve(args: &ServeArgs, out: &mut dyn Write) -> Result<(), CliError> {
    use kinetiq_service::{ctrl_c, serve, AppState, ServiceConfig, Store};

    let store = match &args.data_dir {
        Some(dir) => Store::persistent(dir).map_err(|e| CliError::io(dir, e))?,
        None => Store::in_memory(),
    };
    let rt = tokio::runtime::Runtime::new().map_err(CliError::internal)?;
    rt.block_on(async {
        let listener = tokio::net::TcpListener::bind((args.host.as_str(), args.port))
            .await
            .map_err(|e| CliError { status: ExitStatus::Io, message: format!("bind {}:{}: {e}", args.host, args.port) })?;
        let addr = listener.local_addr().map_err(CliError::internal)?;
        let _ = writeln!(out, "listening on http://{addr}");
        let _ = out.flush();
        serve(listener, AppState::new(store), &ServiceConfig::default(), ctrl_c()).await.map_err(CliError::internal)
    })
}

/// Parse `args` (program name first) and run. Errors are written to `err`.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> ExitStatus
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = write!(err, "{}", e.render());
            return if e.use_stderr() { ExitStatus::Invalid } else { ExitStatus::Success };
        }
    };
    let result = match &cli.command {
        Command::Render(a) => cmd_render(a, out, err),
        Command::Frame(a) => cmd_frame(a, out, err),
        Command::Params(a) => cmd_params(a, out, err),
        Command::Validate(a) => cmd_validate(a, out, err),
        Command::Simgen(a) => cmd_simgen(a, out),
        Command::Serve(a) => cmd_serve(a, out),
    };
    match result {
        Ok(()) => ExitStatus::Success,
        Err(e) => {
            let _ = writeln!(err, "error: {}", e.message);
            e.status
        }
    }
}
