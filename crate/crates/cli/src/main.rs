use std::io::{self, Read, Write};
use std::sync::Arc;
use std::time::Duration;

use clap::{Args, Parser, Subcommand};
use kif_cli::bench;
use kif_cli::render::{self, Format, Row};
use kif_cli::stores::{load_dataset, load_graph, open_all};
use kif_cli::{read_file, CliError, PatternFlags, StoreSpec};
use kif_core::decoder;
use kif_core::graph::{ntriples, results, Endpoint};
use kif_core::model::{Entity, Statement};
use kif_core::sexpr::{self, Mode};
use kif_core::store::{collect, StoreHandle, StoreOptions};

#[derive(Parser)]
#[command(name = "kif", version, about = "Query knowledge sources as one Wikidata-shaped statement store")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct StoreFlags {
    /// sparql:<url>, rdf:<file.nt>, memory:<fixture.sexp> or mapper:<spec.json>@<inner>;
    /// repeat to mix several stores in flag order
    #[arg(long = "store", value_name = "SPEC", value_parser = parse_spec)]
    stores: Vec<StoreSpec>,
    /// Query mixed stores concurrently
    #[arg(long)]
    parallel: bool,
    /// Skip failing stores of a mix instead of failing
    #[arg(long)]
    lenient: bool,
    /// Statements per request (default: KIF_PAGE_SIZE, else 100)
    #[arg(long)]
    page_size: Option<usize>,
    #[arg(long)]
    no_cache: bool,
    /// Request timeout in seconds
    #[arg(long, default_value_t = 30)]
    timeout: u64,
}

#[derive(Args)]
struct PatternArgs {
    /// Entity or snak S-expression, e.g. wd:Q2270
    #[arg(long)]
    subject: Option<String>,
    /// Property S-expression, e.g. wd:P2177
    #[arg(long)]
    property: Option<String>,
    /// Value or snak S-expression
    #[arg(long)]
    value: Option<String>,
    /// Snak the subject must have; repeat for several
    #[arg(long = "subject-snak", value_name = "SNAK")]
    subject_snak: Vec<String>,
    /// Snak the value must have; repeat for several
    #[arg(long = "value-snak", value_name = "SNAK")]
    value_snak: Vec<String>,
    /// A whole FilterPattern S-expression; the other flags refine it
    #[arg(long)]
    pattern: Option<String>,
}

#[derive(Args)]
struct SparqlInput {
    /// Query text; read from --file or standard input when absent
    query: Option<String>,
    #[arg(long)]
    file: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Statements matching a pattern
    Filter {
        #[command(flatten)]
        stores: StoreFlags,
        #[command(flatten)]
        pattern: PatternArgs,
        #[arg(long)]
        limit: Option<usize>,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
        /// Print each statement with its annotation records
        #[arg(long)]
        annotations: bool,
    },
    /// Number of statements matching a pattern
    Count {
        #[command(flatten)]
        stores: StoreFlags,
        #[command(flatten)]
        pattern: PatternArgs,
    },
    /// Whether each statement is in the store
    Contains {
        #[command(flatten)]
        stores: StoreFlags,
        #[arg(long = "statement", value_name = "SEXP", required = true)]
        statements: Vec<String>,
    },
    /// Annotation records of statements
    Annotations {
        #[command(flatten)]
        stores: StoreFlags,
        #[arg(long = "statement", value_name = "SEXP", required = true)]
        statements: Vec<String>,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
    /// Labels, descriptions and aliases of entities in one language
    Describe {
        #[command(flatten)]
        stores: StoreFlags,
        #[arg(long = "entity", value_name = "SEXP", required = true)]
        entities: Vec<String>,
        #[arg(long, default_value = "en")]
        language: String,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
    /// Serve a graph over the SPARQL protocol until interrupted
    Serve {
        #[arg(long, required_unless_present = "fixture", conflicts_with = "fixture")]
        graph: Option<String>,
        /// Serve the encoding of an S-expression fixture instead
        #[arg(long)]
        fixture: Option<String>,
        #[arg(long, default_value = "127.0.0.1")]
        host: String,
        /// 0 picks a free port
        #[arg(long, default_value_t = 8000)]
        port: u16,
    },
    /// Encode an S-expression fixture as N-Triples
    Load {
        #[arg(long)]
        fixture: String,
        /// Output file; standard output when absent
        #[arg(long)]
        output: Option<String>,
    },
    /// Print the filter pattern a SPARQL query decodes to
    DecodeSparql {
        #[command(flatten)]
        input: SparqlInput,
    },
    /// Answer a SPARQL query through the stores; prints SPARQL results JSON
    Query {
        #[command(flatten)]
        stores: StoreFlags,
        #[command(flatten)]
        input: SparqlInput,
    },
    /// Median total and in-API time per query, as CSV
    Bench {
        #[command(flatten)]
        stores: StoreFlags,
        /// One FilterPattern per line, optionally preceded by an id
        #[arg(long)]
        queries: String,
        #[arg(long, default_value_t = 30)]
        runs: usize,
        /// CSV file; standard output when absent
        #[arg(long)]
        output: Option<String>,
    },
}

fn parse_spec(s: &str) -> Result<StoreSpec, String> {
    s.parse().map_err(|e: CliError| e.to_string())
}

impl StoreFlags {
    fn options(&self) -> Result<StoreOptions, CliError> {
        let mut options = StoreOptions::default()
            .with_cache(!self.no_cache)
            .with_timeout(Duration::from_secs(self.timeout));
        if let Some(n) = self.page_size {
            options = options.with_page_size(n);
        }
        options.validate()?;
        Ok(options)
    }

    fn open(&self) -> Result<StoreHandle, CliError> {
        open_all(&self.stores, &self.options()?, self.parallel, self.lenient)
    }
}

impl PatternArgs {
    fn flags(&self) -> PatternFlags {
        PatternFlags {
            subject: self.subject.clone(),
            property: self.property.clone(),
            value: self.value.clone(),
            subject_snak: self.subject_snak.clone(),
            value_snak: self.value_snak.clone(),
            pattern: self.pattern.clone(),
        }
    }
}

impl SparqlInput {
    fn text(&self) -> Result<String, CliError> {
        match (&self.query, &self.file) {
            (Some(q), None) => Ok(q.clone()),
            (None, Some(path)) => read_file(path),
            (None, None) => {
                let mut s = String::new();
                io::stdin().read_to_string(&mut s).map_err(|source| CliError::Io { path: "<stdin>".into(), source })?;
                Ok(s)
            }
            (Some(_), Some(_)) => Err(CliError::Usage("give the query as an argument or with --file, not both".into())),
        }
    }
}

fn statements(texts: &[String]) -> Result<Vec<Statement>, CliError> {
    texts.iter().map(|t| sexpr::parse_as::<Statement>(t).map_err(|e| CliError::sexpr("--statement", e))).collect()
}

fn write_out(path: Option<&str>, text: &str) -> Result<(), CliError> {
    let io_err = |source, path: &str| CliError::Io { path: path.to_string(), source };
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| io_err(e, p)),
        None => io::stdout().write_all(text.as_bytes()).map_err(|e| io_err(e, "<stdout>")),
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let mut out = io::stdout().lock();
    match cli.command {
        Command::Filter { stores, pattern, limit, format, annotations } => {
            let pattern = pattern.flags().to_pattern()?;
            let store = stores.open()?;
            let found = collect(store.filter(&pattern, limit)?)?;
            let rows: Vec<Row> = if annotations || format == Format::Ntriples {
                store.get_annotations(&found)?.into_iter().map(|(s, r)| (s, Some(r))).collect()
            } else {
                found.into_iter().map(|s| (s, None)).collect()
            };
            render::statements(&mut out, format, &rows)
        }
        Command::Count { stores, pattern } => {
            let pattern = pattern.flags().to_pattern()?;
            let n = stores.open()?.count(&pattern)?;
            writeln!(out, "{n}").map_err(|source| CliError::Io { path: "<stdout>".into(), source })
        }
        Command::Contains { stores, statements: texts } => {
            let stmts = statements(&texts)?;
            let store = stores.open()?;
            for s in &stmts {
                let found = store.contains(s)?;
                writeln!(out, "{found}").map_err(|source| CliError::Io { path: "<stdout>".into(), source })?;
            }
            Ok(())
        }
        Command::Annotations { stores, statements: texts, format } => {
            let stmts = statements(&texts)?;
            let rows: Vec<Row> =
                stores.open()?.get_annotations(&stmts)?.into_iter().map(|(s, r)| (s, Some(r))).collect();
            render::statements(&mut out, format, &rows)
        }
        Command::Describe { stores, entities, language, format } => {
            let entities = entities
                .iter()
                .map(|t| sexpr::parse_as::<Entity>(t).map_err(|e| CliError::sexpr("--entity", e)))
                .collect::<Result<Vec<_>, _>>()?;
            let rows = stores.open()?.get_descriptor(&entities, &language)?;
            render::descriptors(&mut out, format, &rows)
        }
        Command::Serve { graph, fixture, host, port } => {
            let graph = match (graph, fixture) {
                (Some(path), _) => load_graph(&path)?,
                (None, Some(path)) => load_dataset(&path)?
                    .encode()
                    .map_err(|e| CliError::Data { path, message: e.to_string() })?,
                (None, None) => unreachable!("clap requires one of them"),
            };
            let addr = format!("{host}:{port}");
            let endpoint =
                Endpoint::serve(Arc::new(graph), &addr).map_err(|source| CliError::Io { path: addr, source })?;
            writeln!(out, "listening on {}", endpoint.url())
                .and_then(|_| out.flush())
                .map_err(|source| CliError::Io { path: "<stdout>".into(), source })?;
            drop(out);
            endpoint.wait();
            Ok(())
        }
        Command::Load { fixture, output } => {
            let graph = load_dataset(&fixture)?
                .encode()
                .map_err(|e| CliError::Data { path: fixture.clone(), message: e.to_string() })?;
            write_out(output.as_deref(), &ntriples::serialize(&graph))
        }
        Command::DecodeSparql { input } => {
            let decoded = decoder::decode(&input.text()?)?;
            let text = match &decoded.pattern {
                Some(p) => sexpr::print(p, Mode::Compact),
                None => {
                    log::warn!("a constant of the query never occurs in a truthy triple; no statement can match");
                    "None".to_string()
                }
            };
            writeln!(out, "{text}").map_err(|source| CliError::Io { path: "<stdout>".into(), source })
        }
        Command::Query { stores, input } => {
            let text = input.text()?;
            let store = stores.open()?;
            let sols = decoder::answer(store.as_ref(), &text)?;
            writeln!(out, "{}", results::to_string(&sols))
                .map_err(|source| CliError::Io { path: "<stdout>".into(), source })
        }
        Command::Bench { mut stores, queries, runs, output } => {
            // Every run has to reach the endpoint.
            stores.no_cache = true;
            let queries = bench::parse_queries(&read_file(&queries)?)?;
            let store = stores.open()?;
            let rows = bench::run(store.as_ref(), &queries, runs)?;
            let (total, api): (f64, f64) = rows.iter().fold((0.0, 0.0), |(t, a), r| (t + r.total_ms, a + r.api_ms));
            if total > 0.0 {
                log::info!("{} queries; endpoint share of median time {:.1}%", rows.len(), 100.0 * (1.0 - api / total));
            }
            match output {
                Some(path) => {
                    let file =
                        std::fs::File::create(&path).map_err(|source| CliError::Io { path: path.clone(), source })?;
                    bench::write_csv(file, &rows)
                }
                None => bench::write_csv(out, &rows),
            }
        }
    }
}

fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    if let Err(e) = run(cli) {
        eprintln!("kif: {e}");
        std::process::exit(e.exit_code());
    }
}
