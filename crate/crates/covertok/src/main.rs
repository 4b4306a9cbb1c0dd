//! Command-line front end. All real work lives in the library.

use std::fs;
use std::io::{Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand, ValueEnum};

use covertok::baselines::bpe_train;
use covertok::corpus::{extract_candidates, CandidateOptions, Corpus};
use covertok::encoder::{
    decode, encode_text, ids_from_bytes, ids_to_bytes, load_vocab, save_vocab, vocab_text,
    EncodeMode, IdFormat,
};
use covertok::metrics::{compression_report, d_inst_sweep, d_inst_table, Algorithm, ReportOptions};
use covertok::reduction::{check_equivalence, graph_to_tok, Graph};
use covertok::trainer::select_tokens;

#[derive(Parser)]
#[command(name = "covertok", version, about = "Partition-cover tokenizer toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Count whitespace-delimited words into a word-count file.
    ///
    /// Lines are `<hex>\t<count>`, sorted; `<hex>` is the lowercase hex of
    /// the word bytes, prefixed with `_` when the word carries the
    /// word-start marker (text ingestion always adds it).
    Count {
        /// Input file (stdin when omitted).
        input: Option<PathBuf>,
        /// Output file (stdout when omitted).
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Train a vocabulary (or a BPE merge list) from text or word counts.
    Train {
        /// Input file (stdin when omitted).
        input: Option<PathBuf>,
        /// Token budget.
        #[arg(long)]
        k: usize,
        /// Longest candidate token, in symbols.
        #[arg(long, default_value_t = CandidateOptions::default().max_len)]
        max_len: usize,
        /// Minimum occurrence-weighted candidate frequency.
        #[arg(long, default_value_t = CandidateOptions::default().min_freq)]
        min_freq: u64,
        /// Selection algorithm.
        #[arg(long, value_enum, default_value_t = Algo::Greedtok)]
        algo: Algo,
        /// Treat the input as a word-count file instead of raw text.
        #[arg(long)]
        from_counts: bool,
        /// Where to write the vocabulary (greedtok) or merge list (bpe).
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Write the per-acceptance training log (greedtok only).
        #[arg(long)]
        log: Option<PathBuf>,
    },
    /// Encode text into token ids with a trained vocabulary.
    Encode {
        /// Input file (stdin when omitted).
        input: Option<PathBuf>,
        #[arg(long)]
        vocab: PathBuf,
        #[arg(long, value_enum, default_value_t = Mode::Greedy)]
        mode: Mode,
        #[arg(long, value_enum, default_value_t = Format::Dec)]
        format: Format,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Decode token ids back into bytes.
    Decode {
        /// Input file (stdin when omitted).
        input: Option<PathBuf>,
        #[arg(long)]
        vocab: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Dec)]
        format: Format,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Compression report comparing algorithms across budgets.
    Eval {
        /// Input file (stdin when omitted).
        input: Option<PathBuf>,
        /// Budgets, e.g. --k 256,512,1024.
        #[arg(long, value_delimiter = ',', required = true)]
        k: Vec<usize>,
        /// Algorithms to run.
        #[arg(long, value_enum, value_delimiter = ',', default_values_t = [Algo::Greedtok, Algo::Bpe])]
        algos: Vec<Algo>,
        #[arg(long, default_value_t = CandidateOptions::default().max_len)]
        max_len: usize,
        #[arg(long, default_value_t = CandidateOptions::default().min_freq)]
        min_freq: u64,
        /// Suppress wall-clock columns (byte-identical reruns).
        #[arg(long)]
        no_timing: bool,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Ratio of the greedy objective to the relaxed coverage objective,
    /// swept over budgets.
    Dinst {
        /// Input file (stdin when omitted).
        input: Option<PathBuf>,
        #[arg(long, value_delimiter = ',', required = true)]
        k: Vec<usize>,
        #[arg(long, default_value_t = CandidateOptions::default().max_len)]
        max_len: usize,
        #[arg(long, default_value_t = CandidateOptions::default().min_freq)]
        min_freq: u64,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Build the tokenization instance for a graph and check the
    /// vertex-cover equivalence at budget k.
    Reduce {
        /// Edge-list file: vertex count, then one `i j` line per edge.
        graph: PathBuf,
        #[arg(long)]
        k: usize,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Algo {
    Greedtok,
    Bpe,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Greedy,
    Optimal,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Dec,
    Bin,
}

fn read_input(path: &Option<PathBuf>) -> anyhow::Result<Vec<u8>> {
    match path {
        Some(p) => fs::read(p).with_context(|| format!("reading {}", p.display())),
        None => {
            let mut buf = Vec::new();
            std::io::stdin().read_to_end(&mut buf)?;
            Ok(buf)
        }
    }
}

fn write_output(path: &Option<PathBuf>, bytes: &[u8]) -> anyhow::Result<()> {
    match path {
        Some(p) => fs::write(p, bytes).with_context(|| format!("writing {}", p.display())),
        None => {
            std::io::stdout().write_all(bytes)?;
            Ok(())
        }
    }
}

fn load_corpus(input: &Option<PathBuf>, from_counts: bool) -> anyhow::Result<Corpus> {
    if from_counts {
        let path = input
            .as_ref()
            .context("--from-counts requires an input file")?;
        Ok(Corpus::load_word_counts(path)?)
    } else {
        Ok(Corpus::ingest(&read_input(input)?))
    }
}

fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Count { input, output } => {
            let corpus = Corpus::ingest(&read_input(&input)?);
            write_output(&output, corpus.word_counts_text().as_bytes())?;
        }
        Command::Train {
            input,
            k,
            max_len,
            min_freq,
            algo,
            from_counts,
            output,
            log,
        } => {
            let corpus = load_corpus(&input, from_counts)?;
            match algo {
                Algo::Greedtok => {
                    let cands = extract_candidates(&corpus, CandidateOptions { max_len, min_freq })?;
                    let outcome = select_tokens(&corpus, &cands, k)?;
                    if let Some(path) = log {
                        fs::write(path, outcome.log_text())?;
                    }
                    match output {
                        Some(path) => save_vocab(&outcome.vocab, &path)?,
                        None => print!("{}", vocab_text(&outcome.vocab)),
                    }
                }
                Algo::Bpe => {
                    let merges = bpe_train(&corpus, k)?;
                    match output {
                        Some(path) => merges.save(&path)?,
                        None => print!("{}", merges.to_text()),
                    }
                }
            }
        }
        Command::Encode {
            input,
            vocab,
            mode,
            format,
            output,
        } => {
            let vocab = load_vocab(&vocab)?;
            let text = read_input(&input)?;
            let mode = match mode {
                Mode::Greedy => EncodeMode::Greedy,
                Mode::Optimal => EncodeMode::Optimal,
            };
            let ids = encode_text(&text, &vocab, mode);
            let format = match format {
                Format::Dec => IdFormat::Dec,
                Format::Bin => IdFormat::Bin,
            };
            write_output(&output, &ids_to_bytes(&ids, format))?;
        }
        Command::Decode {
            input,
            vocab,
            format,
            output,
        } => {
            let vocab = load_vocab(&vocab)?;
            let bytes = read_input(&input)?;
            let format = match format {
                Format::Dec => IdFormat::Dec,
                Format::Bin => IdFormat::Bin,
            };
            let ids = ids_from_bytes(&bytes, format)?;
            write_output(&output, &decode(&ids, &vocab)?)?;
        }
        Command::Eval {
            input,
            k,
            algos,
            max_len,
            min_freq,
            no_timing,
            output,
        } => {
            let corpus = Corpus::ingest(&read_input(&input)?);
            let algorithms: Vec<Algorithm> = algos
                .iter()
                .map(|a| match a {
                    Algo::Greedtok => Algorithm::GreedTok,
                    Algo::Bpe => Algorithm::Bpe,
                })
                .collect();
            let report = compression_report(
                &corpus,
                &k,
                &algorithms,
                ReportOptions {
                    max_len,
                    min_freq,
                    timing: !no_timing,
                },
            )?;
            write_output(&output, report.as_bytes())?;
        }
        Command::Dinst {
            input,
            k,
            max_len,
            min_freq,
            output,
        } => {
            let corpus = Corpus::ingest(&read_input(&input)?);
            let cands = extract_candidates(&corpus, CandidateOptions { max_len, min_freq })?;
            let points = d_inst_sweep(&corpus, &cands, &k)?;
            write_output(&output, d_inst_table(&points).as_bytes())?;
        }
        Command::Reduce { graph, k } => {
            let graph = Graph::load(&graph)?;
            let instance = graph_to_tok(&graph);
            let (vc, tok) = check_equivalence(&graph, k)?;
            println!(
                "alphabet={} words={} candidates={} ℓ={}",
                instance.alphabet_size,
                instance.words.len(),
                instance.candidates.len(),
                instance.threshold
            );
            let yn = |b: bool| if b { "YES" } else { "NO" };
            println!("VC: {}, TOK: {}, ℓ={}", yn(vc), yn(tok), instance.threshold);
            if vc != tok {
                anyhow::bail!("equivalence violated: VC={} TOK={}", vc, tok);
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    if let Ok(threads) = std::env::var("COVERTOK_THREADS") {
        if let Ok(n) = threads.parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            // clap handles --help/--version as "errors" with exit 0
            let code = if err.use_stderr() { 1 } else { 0 };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}
