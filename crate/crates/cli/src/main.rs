use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use spincert::arith::{format_rational, parse_rational};
use spincert::certify::{
    assembled_class, certify, first_feasible, CertRequest, Certificate, EffDivChoice,
    ExactStrategy, Mode, YPolicy,
};
use spincert::classes::{
    d_nc_class, effective_class, gen_weierstrass_class, scaled_canonical_class, wplus_class,
    ClassForm, EffectiveDivisor, Stratum,
};
use spincert::enumerate::{enumerate_minimal, EnumOptions, MinimalAtlas};
use spincert::graph::{csv_row, graph_invariants, InvariantOptions, LevelGraph, CSV_HEADER};
use spincert::identities::{identity_report, CheckKind, IdentityConfig, IdentityReport};
use spincert::pullback::{wplus_derivation_check, xi_identity_check};
use spincert::Error;

#[derive(Parser, Debug)]
#[command(
    name = "spincert",
    version,
    about = "Exact positivity certificates on even-spin minimal strata"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Worker threads (defaults to all cores). Output does not depend on it.
    #[arg(long, global = true)]
    workers: Option<usize>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Write the result here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// List the boundary graphs of the genus-g minimal stratum.
    Enumerate {
        #[arg(long)]
        genus: i64,
        /// Keep graphs with an empty bottom stratum.
        #[arg(long)]
        no_filter: bool,
    },
    /// Per-graph invariants.
    Invariants {
        #[command(flatten)]
        atlas: AtlasArgs,
    },
    /// A divisor class over the atlas.
    Class {
        #[command(flatten)]
        atlas: AtlasArgs,
        #[arg(long, value_enum)]
        class: ClassName,
        #[arg(long, value_enum, default_value = "reduced")]
        form: FormArg,
        #[arg(long, value_enum, default_value = "auto")]
        effdiv: EffDivArg,
        /// Mixing parameter for `--class assembled`.
        #[arg(long)]
        y: Option<String>,
    },
    Certify {
        #[arg(long)]
        genus: i64,
        #[command(flatten)]
        cert: CertArgs,
    },
    Scan {
        #[arg(long)]
        from: i64,
        #[arg(long)]
        to: i64,
        #[command(flatten)]
        cert: CertArgs,
        /// Fill the seconds column.
        #[arg(long)]
        timings: bool,
    },
    /// Pull the saturated Weierstrass class back from genus g+1.
    PullbackCheck {
        #[arg(long)]
        genus: i64,
        /// Signature in genus g+1, comma separated (default g,g).
        #[arg(long, value_delimiter = ',')]
        mu: Option<Vec<i64>>,
        #[arg(long, default_value_t = 1)]
        k: usize,
    },
    /// Exact identity suites for every genus up to `--genus-max`.
    Identities {
        #[arg(long, default_value_t = 2)]
        genus_min: i64,
        #[arg(long)]
        genus_max: i64,
        /// Sampled graphs per genus above the full-atlas range.
        #[arg(long, default_value_t = 500)]
        samples: usize,
        #[arg(long, default_value_t = 10)]
        full_atlas_max: i64,
    },
}

#[derive(Args, Debug)]
struct AtlasArgs {
    #[arg(long)]
    genus: Option<i64>,
    /// Read graphs from a file written by `enumerate` instead of enumerating.
    #[arg(long)]
    atlas: Option<PathBuf>,
    /// Treat every graph as failing the HBB shape test.
    #[arg(long)]
    no_hbb_shape: bool,
}

#[derive(Args, Debug, Clone)]
struct CertArgs {
    #[arg(long, value_enum, default_value = "coarse")]
    mode: ModeArg,
    #[arg(long, value_enum, default_value = "auto")]
    effdiv: EffDivArg,
    /// auto (feasible midpoint), recipe, or an exact rational p/q.
    #[arg(long)]
    y: Option<String>,
    #[arg(long)]
    no_hbb_shape: bool,
    #[arg(long, value_enum, default_value = "auto")]
    strategy: StrategyArg,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum ModeArg {
    Coarse,
    Exact,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum EffDivArg {
    Auto,
    Bn,
    Hur,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum StrategyArg {
    Auto,
    Stream,
    Decomposed,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum FormArg {
    Raw,
    Reduced,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum ClassName {
    Canonical,
    Dnc,
    Bn,
    Hur,
    Wplus,
    Genw,
    Assembled,
}

/// Failures sorted by exit code.
enum Failure {
    Usage(anyhow::Error),
    Invariant(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        let invariant = e.chain().any(|c| {
            matches!(
                c.downcast_ref::<Error>(),
                Some(Error::InvariantViolation(_))
            )
        });
        if invariant {
            Failure::Invariant(e)
        } else {
            Failure::Usage(e)
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        anyhow::Error::from(e).into()
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
        Err(Failure::Invariant(e)) => {
            eprintln!("invariant violation: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    if let Some(n) = cli.workers {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build_global()
            .context("configuring the worker pool")?;
    }
    let out = Output {
        path: cli.out.clone(),
    };
    match &cli.command {
        Command::Enumerate { genus, no_filter } => {
            cmd_enumerate(&out, cli.format, *genus, *no_filter)
        }
        Command::Invariants { atlas } => cmd_invariants(&out, cli.format, atlas),
        Command::Class {
            atlas,
            class,
            form,
            effdiv,
            y,
        } => cmd_class(
            &out,
            cli.format,
            atlas,
            *class,
            *form,
            *effdiv,
            y.as_deref(),
        ),
        Command::Certify { genus, cert } => cmd_certify(&out, cli.format, *genus, cert),
        Command::Scan {
            from,
            to,
            cert,
            timings,
        } => cmd_scan(&out, cli.format, *from, *to, cert, *timings),
        Command::PullbackCheck { genus, mu, k } => {
            cmd_pullback(&out, cli.format, *genus, mu.clone(), *k)
        }
        Command::Identities {
            genus_min,
            genus_max,
            samples,
            full_atlas_max,
        } => cmd_identities(
            &out,
            cli.format,
            *genus_min,
            *genus_max,
            *samples,
            *full_atlas_max,
        ),
    }
}

struct Output {
    path: Option<PathBuf>,
}

impl Output {
    fn write(&self, text: &str) -> anyhow::Result<()> {
        match &self.path {
            Some(p) => fs::write(p, text).with_context(|| format!("cannot write {}", p.display())),
            None => {
                let mut stdout = io::stdout().lock();
                stdout.write_all(text.as_bytes())?;
                stdout.flush()?;
                Ok(())
            }
        }
    }

    fn json<T: Serialize>(&self, value: &T) -> anyhow::Result<()> {
        let mut text = serde_json::to_string_pretty(value)?;
        text.push('\n');
        self.write(&text)
    }
}

fn csv_text(
    header: &[&str],
    rows: impl IntoIterator<Item = Vec<String>>,
) -> anyhow::Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for row in rows {
        w.write_record(&row)?;
    }
    Ok(String::from_utf8(
        w.into_inner().map_err(|e| anyhow!("{e}"))?,
    )?)
}

fn with_config(config: Value, body: Value) -> Value {
    let mut map = serde_json::Map::new();
    map.insert("config".into(), config);
    match body {
        Value::Object(fields) => map.extend(fields),
        other => {
            map.insert("result".into(), other);
        }
    }
    Value::Object(map)
}

fn cmd_enumerate(
    out: &Output,
    format: Option<Format>,
    genus: i64,
    no_filter: bool,
) -> Result<(), Failure> {
    let opts = EnumOptions {
        nonempty_filter: !no_filter,
    };
    let graphs = MinimalAtlas::new(genus, opts)?.collect();
    eprintln!("enumerated {} graphs in genus {genus}", graphs.len());
    let encodings: Vec<String> = graphs.iter().map(LevelGraph::canonical_encoding).collect();
    match format.unwrap_or(Format::Text) {
        Format::Text => out.write(
            &encodings
                .iter()
                .map(|e| format!("{e}\n"))
                .collect::<String>(),
        )?,
        Format::Csv => out.write(&csv_text(
            &["encoding"],
            encodings.into_iter().map(|e| vec![e]),
        )?)?,
        Format::Json => {
            let config =
                json!({"command": "enumerate", "genus": genus, "nonempty_filter": !no_filter});
            out.json(&with_config(
                config,
                json!({"graph_count": graphs.len(), "graphs": encodings}),
            ))?
        }
    }
    Ok(())
}

/// Reads graphs written by `enumerate` in any of its formats.
fn read_atlas(path: &Path) -> anyhow::Result<Vec<LevelGraph>> {
    let text =
        fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    let encodings: Vec<String> = if text.trim_start().starts_with('{') {
        let v: Value = serde_json::from_str(&text)?;
        v["graphs"]
            .as_array()
            .ok_or_else(|| anyhow!("{}: no \"graphs\" array", path.display()))?
            .iter()
            .map(|e| {
                e.as_str()
                    .map(str::to_string)
                    .ok_or_else(|| anyhow!("graph entries must be strings"))
            })
            .collect::<anyhow::Result<_>>()?
    } else if text.trim_start().starts_with("encoding") {
        let mut reader = csv::Reader::from_reader(text.as_bytes());
        let column = reader
            .headers()?
            .iter()
            .position(|h| h == "encoding")
            .ok_or_else(|| anyhow!("{}: no encoding column", path.display()))?;
        reader
            .records()
            .map(|r| Ok(r?.get(column).unwrap_or_default().to_string()))
            .collect::<anyhow::Result<_>>()?
    } else {
        text.lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#') && *l != "encoding")
            .map(str::to_string)
            .collect()
    };
    encodings
        .iter()
        .map(|e| LevelGraph::from_encoding(e).map_err(anyhow::Error::from))
        .collect()
}

fn load_graphs(args: &AtlasArgs) -> anyhow::Result<(i64, Vec<LevelGraph>)> {
    match (&args.atlas, args.genus) {
        (Some(path), genus) => {
            let graphs = read_atlas(path)?;
            let g = match (genus, graphs.first()) {
                (Some(g), _) => g,
                (None, Some(first)) => first.genus,
                (None, None) => bail!("{} holds no graphs; pass --genus", path.display()),
            };
            if let Some(bad) = graphs.iter().find(|gr| gr.genus != g) {
                bail!("{} is not a genus-{g} graph", bad.canonical_encoding());
            }
            eprintln!("loaded {} graphs from {}", graphs.len(), path.display());
            Ok((g, graphs))
        }
        (None, Some(g)) => Ok((g, enumerate_minimal(g)?)),
        (None, None) => bail!("either --genus or --atlas is required"),
    }
}

fn cmd_invariants(out: &Output, format: Option<Format>, args: &AtlasArgs) -> Result<(), Failure> {
    let (_, graphs) = load_graphs(args)?;
    let opts = InvariantOptions {
        hbb_shape: !args.no_hbb_shape,
    };
    let invs = graphs
        .iter()
        .map(|g| graph_invariants(g, opts))
        .collect::<Result<Vec<_>, _>>()?;
    match format.unwrap_or(Format::Csv) {
        Format::Csv => out.write(&csv_text(&CSV_HEADER, invs.iter().map(csv_row))?)?,
        Format::Json => out.json(&invs)?,
        Format::Text => {
            let mut text = String::new();
            for inv in &invs {
                text.push_str(&csv_row(inv).join("  "));
                text.push('\n');
            }
            out.write(&text)?
        }
    }
    Ok(())
}

fn effdiv_of(arg: EffDivArg, g: i64) -> EffectiveDivisor {
    match arg {
        EffDivArg::Auto => EffectiveDivisor::auto(g),
        EffDivArg::Bn => EffectiveDivisor::BrillNoether,
        EffDivArg::Hur => EffectiveDivisor::Hurwitz,
    }
}

fn cmd_class(
    out: &Output,
    format: Option<Format>,
    args: &AtlasArgs,
    class: ClassName,
    form: FormArg,
    effdiv: EffDivArg,
    y: Option<&str>,
) -> Result<(), Failure> {
    let (g, graphs) = load_graphs(args)?;
    let stratum = Stratum::minimal(
        g,
        graphs,
        InvariantOptions {
            hbb_shape: !args.no_hbb_shape,
        },
    )?;
    let form = match form {
        FormArg::Raw => ClassForm::Raw,
        FormArg::Reduced => ClassForm::Reduced,
    };
    let eff = effdiv_of(effdiv, g);
    let value = match class {
        ClassName::Canonical => scaled_canonical_class(&stratum)?,
        ClassName::Dnc => d_nc_class(&stratum)?,
        ClassName::Bn => effective_class(&stratum, EffectiveDivisor::BrillNoether)?,
        ClassName::Hur => effective_class(&stratum, EffectiveDivisor::Hurwitz)?,
        ClassName::Wplus => wplus_class(&stratum, form)?,
        ClassName::Genw => gen_weierstrass_class(&stratum, &[g - 1], form)?,
        ClassName::Assembled => {
            let y = parse_rational(y.ok_or_else(|| anyhow!("--class assembled needs --y"))?)?;
            assembled_class(&stratum, &y, eff)?
        }
    };
    match format.unwrap_or(Format::Json) {
        Format::Json => {
            let config = json!({
                "command": "class",
                "genus": g,
                "class": format!("{class:?}").to_lowercase(),
                "form": form,
                "effective_divisor": eff.as_str(),
                "y": y,
                "hbb_shape": !args.no_hbb_shape,
                "graph_count": stratum.graphs.len(),
            });
            out.json(&with_config(config, json!({ "class": value })))?
        }
        Format::Text => out.write(&format!("{value}\n"))?,
        Format::Csv => {
            let mut rows = vec![
                vec!["lambda".to_string(), format_rational(&value.lambda)],
                vec!["xi".to_string(), format_rational(&value.xi)],
                vec!["d_h".to_string(), format_rational(&value.d_h)],
            ];
            for (i, p) in value.psi.iter().enumerate() {
                rows.push(vec![format!("psi_{}", i + 1), format_rational(p)]);
            }
            for (k, v) in &value.boundary {
                rows.push(vec![k.clone(), format_rational(v)]);
            }
            out.write(&csv_text(&["coordinate", "coefficient"], rows)?)?
        }
    }
    Ok(())
}

fn request(genus: i64, args: &CertArgs) -> anyhow::Result<CertRequest> {
    let mode = match args.mode {
        ModeArg::Coarse => Mode::Coarse,
        ModeArg::Exact => Mode::Exact,
    };
    let mut req = CertRequest::new(genus, mode);
    req.effective_divisor = match args.effdiv {
        EffDivArg::Auto => EffDivChoice::Auto,
        EffDivArg::Bn => EffDivChoice::BrillNoether,
        EffDivArg::Hur => EffDivChoice::Hurwitz,
    };
    req.y_policy = match args.y.as_deref() {
        None => req.y_policy,
        Some("auto") => YPolicy::AutoMidpoint,
        Some("recipe") => YPolicy::PaperRecipe,
        Some(text) => YPolicy::Fixed(parse_rational(text)?),
    };
    req.hbb_shape = !args.no_hbb_shape;
    req.strategy = match args.strategy {
        StrategyArg::Auto => ExactStrategy::Auto,
        StrategyArg::Stream => ExactStrategy::Stream,
        StrategyArg::Decomposed => ExactStrategy::Decomposed,
    };
    Ok(req)
}

fn request_config(command: &str, req: &CertRequest) -> Value {
    let y = match &req.y_policy {
        YPolicy::AutoMidpoint => "auto".to_string(),
        YPolicy::PaperRecipe => "recipe".to_string(),
        YPolicy::Fixed(v) => format_rational(v),
    };
    json!({
        "command": command,
        "mode": req.mode,
        "effdiv": req.effective_divisor,
        "y": y,
        "hbb_shape": req.hbb_shape,
        "strategy": req.strategy,
    })
}

const SCAN_HEADER: [&str; 7] = [
    "genus",
    "mode",
    "status",
    "y",
    "margin",
    "graph_count",
    "seconds",
];

fn scan_row(c: &Certificate, seconds: Option<f64>) -> Vec<String> {
    vec![
        c.genus.to_string(),
        c.mode.to_string(),
        c.status.to_string(),
        c.y.as_ref().map(format_rational).unwrap_or_default(),
        c.worst_margin
            .as_ref()
            .map(format_rational)
            .unwrap_or_default(),
        c.graph_count.to_string(),
        seconds.map(|s| format!("{s:.3}")).unwrap_or_default(),
    ]
}

fn certificate_text(c: &Certificate) -> String {
    let mut s = format!(
        "genus {}  mode {}  divisor {}\nstatus   {}\nfeasible {}\ny        {}\ngraphs   {}\n",
        c.genus,
        c.mode,
        c.effective_divisor,
        c.status,
        c.feasible,
        c.y.as_ref()
            .map(format_rational)
            .unwrap_or_else(|| "-".into()),
        c.graph_count
    );
    if let Some(m) = &c.worst_margin {
        s.push_str(&format!("margin   {}\n", format_rational(m)));
    }
    if let Some(w) = &c.worst_graph {
        s.push_str(&format!("worst    {w}\n"));
    }
    for n in &c.notes {
        s.push_str(&format!("note: {n}\n"));
    }
    s
}

fn cmd_certify(
    out: &Output,
    format: Option<Format>,
    genus: i64,
    args: &CertArgs,
) -> Result<(), Failure> {
    let req = request(genus, args)?;
    eprintln!("certifying genus {genus} ({} mode)", req.mode);
    let cert = certify(&req)?;
    eprintln!("genus {genus}: {}", cert.status);
    match format.unwrap_or(Format::Json) {
        Format::Json => {
            let mut config = request_config("certify", &req);
            config["genus"] = json!(genus);
            out.json(&with_config(
                config,
                serde_json::to_value(&cert).map_err(anyhow::Error::from)?,
            ))?
        }
        Format::Csv => out.write(&csv_text(&SCAN_HEADER, [scan_row(&cert, None)])?)?,
        Format::Text => out.write(&certificate_text(&cert))?,
    }
    Ok(())
}

fn cmd_scan(
    out: &Output,
    format: Option<Format>,
    from: i64,
    to: i64,
    args: &CertArgs,
    timings: bool,
) -> Result<(), Failure> {
    if from < 2 || from > to {
        return Err(Failure::Usage(anyhow!("need 2 <= --from <= --to")));
    }
    let mut rows = Vec::new();
    for g in from..=to {
        let req = request(g, args)?;
        let start = Instant::now();
        let cert = certify(&req)?;
        let secs = start.elapsed().as_secs_f64();
        eprintln!("genus {g}: {} ({secs:.2}s)", cert.status);
        rows.push((cert, timings.then_some(secs)));
    }
    let certs: Vec<Certificate> = rows.iter().map(|(c, _)| c.clone()).collect();
    match format.unwrap_or(Format::Csv) {
        Format::Csv => out.write(&csv_text(
            &SCAN_HEADER,
            rows.iter().map(|(c, s)| scan_row(c, *s)),
        )?)?,
        Format::Json => {
            let mut config = request_config("scan", &request(from, args)?);
            config["from"] = json!(from);
            config["to"] = json!(to);
            let body = json!({
                "first_feasible": first_feasible(&certs),
                "certificates": certs,
            });
            out.json(&with_config(config, body))?
        }
        Format::Text => {
            let mut text = String::new();
            for (c, _) in &rows {
                text.push_str(&format!(
                    "{:>3}  {:<22}  y={}  margin={}\n",
                    c.genus,
                    c.status,
                    c.y.as_ref()
                        .map(format_rational)
                        .unwrap_or_else(|| "-".into()),
                    c.worst_margin
                        .as_ref()
                        .map(format_rational)
                        .unwrap_or_else(|| "-".into())
                ));
            }
            if let Some(g) = first_feasible(&certs) {
                text.push_str(&format!("first genus with non-empty feasible set: {g}\n"));
            }
            out.write(&text)?
        }
    }
    Ok(())
}

fn cmd_pullback(
    out: &Output,
    format: Option<Format>,
    genus: i64,
    mu: Option<Vec<i64>>,
    k: usize,
) -> Result<(), Failure> {
    let mu = mu.unwrap_or_else(|| vec![genus, genus]);
    let report = wplus_derivation_check(genus, &mu, k)?;
    let xi = xi_identity_check(genus, &mu)?;
    match format.unwrap_or(Format::Json) {
        Format::Json => {
            let config = json!({"command": "pullback-check", "genus": genus, "mu": mu, "k": k});
            let body = json!({"match": report.matched, "xi_identity": xi, "coordinate_diffs": report.coordinate_diffs});
            out.json(&with_config(config, body))?
        }
        _ => out.write(&format!(
            "genus {genus} mu {mu:?} k {k}: derivation {}, xi identity {}\n",
            if report.matched { "matches" } else { "differs" },
            if xi { "holds" } else { "fails" }
        ))?,
    }
    if !report.matched || !xi {
        return Err(Failure::Invariant(anyhow!(
            "pulled-back class differs from the direct formula"
        )));
    }
    Ok(())
}

fn cmd_identities(
    out: &Output,
    format: Option<Format>,
    genus_min: i64,
    genus_max: i64,
    samples: usize,
    full_atlas_max: i64,
) -> Result<(), Failure> {
    if genus_min < 2 || genus_min > genus_max {
        return Err(Failure::Usage(anyhow!(
            "need 2 <= --genus-min <= --genus-max"
        )));
    }
    let cfg = IdentityConfig {
        full_atlas_max,
        samples,
        ..IdentityConfig::default()
    };
    let mut reports: Vec<IdentityReport> = Vec::new();
    for g in genus_min..=genus_max {
        let r = identity_report(g, &cfg)?;
        eprintln!(
            "genus {g}: {} graphs, identities {}",
            r.graphs,
            if r.identities_hold() { "hold" } else { "FAIL" }
        );
        reports.push(r);
    }
    let ok = reports.iter().all(IdentityReport::identities_hold);
    match format.unwrap_or(Format::Text) {
        Format::Json => {
            let config = json!({
                "command": "identities",
                "genus_min": genus_min,
                "genus_max": genus_max,
                "samples": samples,
                "full_atlas_max": full_atlas_max,
                "seed": cfg.seed,
            });
            out.json(&with_config(
                config,
                json!({"identities_hold": ok, "reports": reports}),
            ))?
        }
        Format::Csv => {
            let rows = reports.iter().flat_map(|r| {
                r.checks.iter().map(move |c| {
                    vec![
                        r.genus.to_string(),
                        c.name.clone(),
                        format!("{:?}", c.kind).to_lowercase(),
                        c.checked.to_string(),
                        c.failed.to_string(),
                        c.first_failure.clone().unwrap_or_default(),
                    ]
                })
            });
            out.write(&csv_text(
                &[
                    "genus",
                    "check",
                    "kind",
                    "checked",
                    "failed",
                    "first_failure",
                ],
                rows,
            )?)?
        }
        Format::Text => {
            let mut text = String::new();
            for r in &reports {
                let source = if r.sampled { "sampled" } else { "full atlas" };
                text.push_str(&format!(
                    "genus {} ({} graphs, {source})\n",
                    r.genus, r.graphs
                ));
                for c in &r.checks {
                    let tag = match (c.kind, c.passed()) {
                        (_, true) => "ok   ",
                        (CheckKind::Identity, false) => "FAIL ",
                        (CheckKind::Claim, false) => "claim",
                    };
                    text.push_str(&format!(
                        "  {tag} {} ({}/{} failed)",
                        c.name, c.failed, c.checked
                    ));
                    if let Some(f) = &c.first_failure {
                        text.push_str(&format!(", e.g. {f}"));
                    }
                    text.push('\n');
                }
            }
            out.write(&text)?
        }
    }
    if !ok {
        return Err(Failure::Invariant(anyhow!("identity suite failed")));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn invariant_violations_map_to_exit_two() {
        let f: Failure = Error::InvariantViolation("x".into()).into();
        assert!(matches!(f, Failure::Invariant(_)));
        let wrapped: Failure = anyhow::Error::from(Error::InvariantViolation("x".into()))
            .context("outer")
            .into();
        assert!(matches!(wrapped, Failure::Invariant(_)));
        let f: Failure = Error::GenusOutOfRange {
            genus: 1,
            reason: "r",
        }
        .into();
        assert!(matches!(f, Failure::Usage(_)));
    }
}
