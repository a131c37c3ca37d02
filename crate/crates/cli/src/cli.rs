//! Argument parsing and subcommand dispatch.

use crate::bench::{csv_writer, run_bench, BenchPlan};
use crate::corpus::{english_like, random_text};
use crate::sample::sample_patterns_avoiding;
use crate::{read_file, CliError};
use clap::{Args, Parser, Subcommand};
use mag::tuner::{self, TuningInput};
use mag::{AhoCorasick, Histogram, MappingChoice, Matcher, PatternSet, SearchConfig, Variant};
use std::io::Write;
use std::path::PathBuf;

#[derive(Debug, Parser)]
#[command(
    name = "mag",
    version,
    about = "Multiple exact string matching with a strided q-gram filter"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// List every occurrence as `pattern_index<TAB>offset`.
    Search(SearchArgs),
    /// Time the variants over a matrix of pattern counts and lengths.
    Bench(BenchArgs),
    /// Print the parameters the tuner picks for a pattern set.
    Tune(TuneArgs),
    /// Write a pattern sample or a synthetic corpus.
    #[command(subcommand)]
    Gen(GenCommand),
}

/// Filter parameters shared by `search`, `bench` and `tune`.
#[derive(Debug, Clone, Args)]
pub struct FilterArgs {
    #[arg(long)]
    pub q: Option<usize>,
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub sigma_prime: Option<usize>,
    /// identity, freq, balance, lowbits:L or qgram.
    #[arg(long, value_parser = parse_mapping)]
    pub mapping: Option<MappingChoice>,
    /// Include a prefix of the text in the byte histogram.
    #[arg(long)]
    pub text_sample: bool,
}

impl FilterArgs {
    fn config(&self, variant: Variant) -> SearchConfig {
        SearchConfig {
            variant,
            q: self.q,
            k: self.k,
            mapping: self.mapping,
            sigma_prime: self.sigma_prime,
            sample_text: self.text_sample,
            ..Default::default()
        }
    }
}

#[derive(Debug, Args)]
pub struct SearchArgs {
    /// One pattern per line.
    #[arg(long)]
    pub patterns: PathBuf,
    #[arg(long)]
    pub text: PathBuf,
    #[arg(long, default_value = "mag", value_parser = parse_variant)]
    pub variant: Variant,
    #[command(flatten)]
    pub filter: FilterArgs,
    /// Print only the number of occurrences.
    #[arg(long)]
    pub count: bool,
    /// Fail unless the result equals the Aho–Corasick oracle's.
    #[arg(long)]
    pub check: bool,
    #[arg(long, default_value_t = 1)]
    pub threads: usize,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(long)]
    pub text: PathBuf,
    /// Name for the dataset column; defaults to the file name.
    #[arg(long)]
    pub dataset: Option<String>,
    #[arg(long, value_delimiter = ',', default_value = "mag,smag,ac", value_parser = parse_variant)]
    pub variants: Vec<Variant>,
    #[arg(long, value_delimiter = ',', default_value = "10,100,1000,10000")]
    pub r: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_value = "8,16,32,64")]
    pub m: Vec<usize>,
    #[command(flatten)]
    pub filter: FilterArgs,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long)]
    pub include_prep: bool,
    #[arg(long)]
    pub check: bool,
    /// Write the CSV here instead of standard output.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct TuneArgs {
    #[arg(long)]
    pub patterns: PathBuf,
    /// Text to tune for; only its length is used unless `--text-sample`.
    #[arg(long)]
    pub text: Option<PathBuf>,
    /// Text length to assume when no text is given.
    #[arg(long, default_value_t = 1 << 24)]
    pub n: usize,
    #[command(flatten)]
    pub filter: FilterArgs,
    /// Print a header line before the row.
    #[arg(long)]
    pub csv: bool,
}

#[derive(Debug, Subcommand)]
pub enum GenCommand {
    /// Cut `r` newline-free patterns of length `m` from a text.
    Patterns {
        #[arg(long)]
        text: PathBuf,
        #[arg(long)]
        r: usize,
        #[arg(long)]
        m: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate `english` text or `random:SIGMA` text of `size` bytes.
    Corpus {
        #[arg(long, default_value = "english")]
        kind: String,
        #[arg(long)]
        size: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn parse_variant(s: &str) -> Result<Variant, String> {
    s.parse().map_err(|e: mag::Error| e.to_string())
}

fn parse_mapping(s: &str) -> Result<MappingChoice, String> {
    s.parse().map_err(|e: mag::Error| e.to_string())
}

/// Runs one parsed command, writing its normal output to `out`.
pub fn run(cli: Cli, out: &mut dyn Write) -> Result<(), CliError> {
    match cli.command {
        Command::Search(args) => search(args, out),
        Command::Bench(args) => bench(args, out),
        Command::Tune(args) => tune(args, out),
        Command::Gen(cmd) => gen(cmd, out),
    }
}

fn search(args: SearchArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let ps = PatternSet::from_lines(&read_file(&args.patterns)?)?;
    let text = read_file(&args.text)?;
    let matcher = Matcher::with_text(&ps, &args.filter.config(args.variant), Some(&text))?;
    let found = matcher.find_all_parallel(&text, args.threads);
    if args.check {
        let expected = AhoCorasick::new(&ps).find_all(&text);
        if found != expected {
            return Err(CliError::Check(format!(
                "{} reported {} occurrences, oracle has {}",
                args.variant,
                found.len(),
                expected.len()
            )));
        }
    }
    let mut out = std::io::BufWriter::new(out);
    if args.count {
        writeln!(out, "{}", found.len())?;
    } else {
        for o in &found {
            writeln!(out, "{}\t{}", o.pattern, o.offset)?;
        }
    }
    out.flush()?;
    Ok(())
}

fn bench(args: BenchArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let text = read_file(&args.text)?;
    let dataset = args.dataset.clone().unwrap_or_else(|| {
        args.text
            .file_name()
            .map_or_else(|| "text".into(), |f| f.to_string_lossy().into_owned())
    });
    let plan = BenchPlan {
        dataset,
        variants: args.variants,
        rs: args.r,
        ms: args.m,
        seed: args.seed,
        include_prep: args.include_prep,
        check: args.check,
        search: args.filter.config(Variant::Mag),
    };
    let sink: Box<dyn Write + '_> = match &args.csv {
        Some(path) => Box::new(std::fs::File::create(path).map_err(|source| CliError::Io {
            path: path.clone(),
            source,
        })?),
        None => Box::new(out),
    };
    let mut writer = csv_writer(sink);
    run_bench(&text, &plan, |row| {
        writer.serialize(row)?;
        writer.flush()?;
        Ok(())
    })?;
    Ok(())
}

fn tune(args: TuneArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let ps = PatternSet::from_lines(&read_file(&args.patterns)?)?;
    let text = args.text.as_deref().map(read_file).transpose()?;
    let n = text.as_ref().map_or(args.n, Vec::len);
    let cfg = args.filter.config(Variant::Mag);
    let matcher = match &text {
        Some(text) => Matcher::with_text(&ps, &cfg, Some(text))?,
        None => Matcher::new(&ps, &cfg)?,
    };
    let params = matcher.params().expect("mag always has filter parameters");

    let mut hist = Histogram::from_patterns(&ps);
    if let (true, Some(text)) = (args.filter.text_sample, &text) {
        hist.add_sample(text);
    }
    let ti = TuningInput::new(
        hist.distinct(),
        params.sigma_prime,
        ps.len(),
        ps.min_len(),
        n,
    );
    let gram_space = params.gram_space as f64;
    let p = tuner::match_probability(gram_space, (params.q * ps.len()) as f64);
    let cost = tuner::cost_in(&ti, params.q, params.k, gram_space);

    if args.csv {
        writeln!(out, "q,k,sigma_prime,predicted_p,predicted_cost")?;
    }
    writeln!(
        out,
        "{},{},{},{p:.6},{cost:.1}",
        params.q, params.k, params.sigma_prime
    )?;
    Ok(())
}

fn gen(cmd: GenCommand, out: &mut dyn Write) -> Result<(), CliError> {
    let (bytes, path) = match cmd {
        GenCommand::Patterns {
            text,
            r,
            m,
            seed,
            out: path,
        } => {
            let text = read_file(&text)?;
            // the pattern file is line based, so windows spanning a newline are skipped
            let sample = sample_patterns_avoiding(&text, r, m, b'\n', seed)?;
            let mut bytes = Vec::with_capacity(r * (m + 1));
            for p in sample.patterns.iter() {
                bytes.extend_from_slice(p);
                bytes.push(b'\n');
            }
            (bytes, path)
        }
        GenCommand::Corpus {
            kind,
            size,
            seed,
            out: path,
        } => {
            let bytes = match kind.as_str() {
                "english" => english_like(size, seed),
                _ => {
                    let sigma = kind
                        .strip_prefix("random:")
                        .and_then(|s| s.parse::<usize>().ok())
                        .filter(|s| (1..=256).contains(s))
                        .ok_or_else(|| {
                            CliError::Usage(format!(
                                "--kind: expected `english` or `random:SIGMA`, got `{kind}`"
                            ))
                        })?;
                    random_text(size, sigma, seed)
                }
            };
            (bytes, path)
        }
    };
    match path {
        Some(path) => std::fs::write(&path, bytes).map_err(|source| CliError::Io { path, source }),
        None => Ok(out.write_all(&bytes)?),
    }
}
