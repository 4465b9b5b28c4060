//! `cogspeech`: extract features, cross-validate, train, predict, and
//! report statistics from the command line.
//!
//! Exit codes: 0 success, 2 usage, 3 data error, 4 convergence failure.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use cogspeech::config::{PipelineConfig, RESOURCES_ENV};
use cogspeech::corpus::{extract_corpus, write_provenance, write_transcripts_csv};
use cogspeech::eval::{
    cross_validate, feature_differentiation, grid_search, loso_mean_weights, majority_vote, scatter_svg, tsne, tsne_input,
    Protocol, Task, TsneParams, METRIC_NAMES,
};
use cogspeech::featureset::{write_atomic, Dataset, FeatureRegistry};
use cogspeech::fixtures::{generate_corpus, informative_matrix};
use cogspeech::ml::{FittedModel, ModelKind, ModelSpec};
use cogspeech::resources::Resources;
use cogspeech::{Error, Result};

#[derive(Parser)]
#[command(name = "cogspeech", version, about = "Speech and language features for dementia detection")]
struct Cli {
    /// Pipeline configuration (TOML). Defaults apply when omitted.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Extract the feature matrix of a corpus directory.
    Extract {
        corpus: PathBuf,
        /// Feature matrix CSV; the provenance and transcript sidecars are
        /// written next to it.
        #[arg(long)]
        out: PathBuf,
    },
    /// Cross-validate a model on a feature matrix.
    Cv {
        matrix: PathBuf,
        #[arg(long)]
        task: Option<Task>,
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        protocol: Option<Protocol>,
        /// Cross-validate every grid point and report the best one.
        #[arg(long)]
        grid: bool,
        /// Report CSV; predictions go to `<stem>.predictions.csv`.
        #[arg(long)]
        out: PathBuf,
    },
    /// Fit a model on every row of a matrix, once per seed.
    Train {
        matrix: PathBuf,
        #[command(flatten)]
        model: ModelArgs,
        /// Model file. With several seeds each model goes to
        /// `<stem>.seed<N>.json`.
        #[arg(long)]
        out: PathBuf,
    },
    /// Predict with one model, or the majority of three.
    Predict {
        matrix: PathBuf,
        #[arg(long = "model", required = true, num_args = 1..)]
        models: Vec<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Per-feature class tests, MMSE correlations and ridge weights.
    Stats {
        matrix: PathBuf,
        /// Features kept by the ridge fit behind the weight column.
        #[arg(long, default_value_t = 25)]
        k_features: usize,
        #[arg(long, default_value_t = 10.0)]
        alpha: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Two-dimensional t-SNE embedding of the samples.
    Tsne {
        matrix: PathBuf,
        /// Embed only the Bonferroni-significant features.
        #[arg(long)]
        significant_only: bool,
        #[arg(long)]
        perplexity: Option<f64>,
        #[arg(long)]
        iterations: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Coordinates CSV; the scatter plot goes to `<stem>.svg`.
        #[arg(long)]
        out: PathBuf,
    },
    /// Synthetic data for tests and demonstrations.
    Fixtures {
        #[command(subcommand)]
        command: FixtureCommand,
    },
    /// Print the feature registry as TSV.
    DumpRegistry,
}

#[derive(Subcommand)]
enum FixtureCommand {
    /// Write a synthetic corpus with transcripts, trees, audio and embeddings.
    Generate {
        dir: PathBuf,
        #[arg(long, default_value_t = 12)]
        n: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
    },
    /// Write a 509-column matrix with a few class-shifted columns.
    Informative {
        out: PathBuf,
        #[arg(long, default_value_t = 100)]
        n: usize,
        #[arg(long, default_value_t = 10)]
        informative: usize,
        #[arg(long, default_value_t = 1.2)]
        shift: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Args)]
struct ModelArgs {
    #[arg(long)]
    model: Option<ModelKind>,
    /// Comma-separated seeds, e.g. `0,1,2`.
    #[arg(long, value_delimiter = ',')]
    seed: Option<Vec<u64>>,
    #[arg(long)]
    k_features: Option<usize>,
    #[arg(long)]
    alpha: Option<f64>,
}

impl ModelArgs {
    fn spec(&self, cfg: &PipelineConfig, task: Option<Task>) -> Result<ModelSpec> {
        let kind = match (self.model, task) {
            (Some(kind), Some(task)) if Task::of(kind) != task => {
                return Err(Error::InvalidArgument(format!(
                    "model {kind} cannot run the {} task",
                    task.as_str()
                )))
            }
            (Some(kind), _) => kind,
            (None, Some(Task::Regress)) if !cfg.model.kind.is_regression() => ModelKind::Ridge,
            (None, Some(Task::Classify)) if cfg.model.kind.is_regression() => ModelKind::Svm,
            (None, _) => cfg.model.kind,
        };
        let spec = ModelSpec {
            kind,
            k_features: self.k_features.or(cfg.model.k_features),
            alpha: self.alpha.unwrap_or(cfg.model.alpha),
            ..cfg.model.clone()
        };
        spec.validate()?;
        Ok(spec)
    }

    fn seeds(&self, cfg: &PipelineConfig) -> Vec<u64> {
        self.seed.clone().unwrap_or_else(|| cfg.eval.seeds.clone())
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn load_config(path: Option<&Path>) -> Result<PipelineConfig> {
    match path {
        Some(p) => PipelineConfig::load(p),
        None => Ok(PipelineConfig::default()),
    }
}

/// `dir/stem<suffix>` for an output path `dir/stem.ext`.
fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let stem = path.file_stem().map_or_else(|| "out".into(), |s| s.to_string_lossy().into_owned());
    path.with_file_name(format!("{stem}{suffix}"))
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    write_atomic(path, |f| {
        std::io::Write::write_all(f, text.as_bytes())?;
        Ok(())
    })
}

fn run(cli: Cli) -> Result<()> {
    let cfg = load_config(cli.config.as_deref())?;
    match cli.command {
        Command::Extract { corpus, out } => extract(&cfg, &corpus, &out),
        Command::Cv {
            matrix,
            task,
            model,
            protocol,
            grid,
            out,
        } => cv(&cfg, &matrix, task, &model, protocol, grid, &out),
        Command::Train { matrix, model, out } => train(&cfg, &matrix, &model, &out),
        Command::Predict { matrix, models, out } => predict(&matrix, &models, &out),
        Command::Stats {
            matrix,
            k_features,
            alpha,
            out,
        } => stats(&cfg, &matrix, k_features, alpha, &out),
        Command::Tsne {
            matrix,
            significant_only,
            perplexity,
            iterations,
            seed,
            out,
        } => {
            let params = TsneParams {
                perplexity: perplexity.unwrap_or(cfg.eval.tsne_perplexity),
                iterations: iterations.unwrap_or(cfg.eval.tsne_iterations),
                seed,
                ..Default::default()
            };
            embed(&cfg, &matrix, significant_only, &params, &out)
        }
        Command::Fixtures { command } => match command {
            FixtureCommand::Generate { dir, n, seed } => {
                let c = generate_corpus(&dir, n, seed)?;
                println!("wrote {} samples and {}", c.ids.len(), c.config.display());
                Ok(())
            }
            FixtureCommand::Informative {
                out,
                n,
                informative,
                shift,
                seed,
            } => {
                let (data, cols) = informative_matrix(n, informative, shift, seed);
                data.write_path(&out)?;
                let names: Vec<&str> = cols.iter().map(|&c| data.names[c].as_str()).collect();
                println!("informative columns: {}", names.join(","));
                Ok(())
            }
        },
        Command::DumpRegistry => {
            let resources = Resources::load(&cfg)?;
            let registry = FeatureRegistry::new(&resources.productions, &resources.space_names())?;
            print!("{}", registry.to_tsv());
            Ok(())
        }
    }
}

fn extract(cfg: &PipelineConfig, corpus: &Path, out: &Path) -> Result<()> {
    if cfg.resource_root().is_none() {
        log::warn!("no resource root: set resources.root, pass --config, or set {RESOURCES_ENV}");
    }
    let resources = Resources::load(cfg)?;
    let registry = FeatureRegistry::new(&resources.productions, &resources.space_names())?;
    let result = extract_corpus(corpus, &resources, &registry, &cfg.extraction)?;
    result.dataset.write_path(out)?;
    write_provenance(&sibling(out, ".provenance.json"), &registry, &result.provenance)?;
    write_atomic(&sibling(out, ".transcripts.csv"), |f| write_transcripts_csv(f, &result.texts))?;
    let masked: usize = result.provenance.iter().map(|p| p.masked).sum();
    println!(
        "{} samples x {} features -> {} ({masked} masked values)",
        result.dataset.len(),
        result.dataset.n_features(),
        out.display()
    );
    Ok(())
}

fn cv(
    cfg: &PipelineConfig,
    matrix: &Path,
    task: Option<Task>,
    model: &ModelArgs,
    protocol: Option<Protocol>,
    grid: bool,
    out: &Path,
) -> Result<()> {
    let data = Dataset::read_path(matrix, None)?;
    let spec = model.spec(cfg, task)?;
    let seeds = model.seeds(cfg);
    let protocol = protocol.unwrap_or(Protocol::KFold(cfg.eval.folds));
    let report = if grid {
        let result = grid_search(&data, &spec, protocol, &seeds)?;
        let mut table = String::from("k_features,alpha,");
        table.push_str(&METRIC_NAMES.join(","));
        table.push_str(",chosen\n");
        for (i, (s, r)) in result.entries.iter().enumerate() {
            let k = s.k_features.map_or_else(|| "all".to_string(), |k| k.to_string());
            let metrics: Vec<String> = r.mean().0.iter().map(|v| v.map_or_else(String::new, |v| v.to_string())).collect();
            table.push_str(&format!("{k},{},{},{}\n", s.alpha, metrics.join(","), i == result.best));
        }
        write_text(&sibling(out, ".grid.csv"), &table)?;
        let best = result.best_spec();
        println!("chosen: k_features = {:?}, alpha = {}", best.k_features, best.alpha);
        result.best_report().clone()
    } else {
        cross_validate(&data, &spec, protocol, &seeds)?
    };
    report.save(out, &sibling(out, ".predictions.csv"))?;
    print!("{report}");
    Ok(())
}

fn train(cfg: &PipelineConfig, matrix: &Path, model: &ModelArgs, out: &Path) -> Result<()> {
    let data = Dataset::read_path(matrix, None)?;
    let spec = model.spec(cfg, None)?;
    let seeds = model.seeds(cfg);
    let all: Vec<usize> = (0..data.len()).collect();
    for &seed in &seeds {
        let path = if seeds.len() == 1 {
            out.to_path_buf()
        } else {
            sibling(out, &format!(".seed{seed}.json"))
        };
        FittedModel::fit(&data, &all, &spec, seed)?.save(&path)?;
        println!("{} (seed {seed}) -> {}", spec.describe(), path.display());
    }
    Ok(())
}

/// One model's predictions, or the element-wise majority (classifiers)
/// or mean (regressors) of three.
fn predict(matrix: &Path, paths: &[PathBuf], out: &Path) -> Result<()> {
    if paths.len() != 1 && paths.len() != 3 {
        return Err(Error::InvalidArgument(format!("expected 1 or 3 models, got {}", paths.len())));
    }
    let data = Dataset::read_path(matrix, None)?;
    let models = paths.iter().map(|p| FittedModel::load(p)).collect::<Result<Vec<_>>>()?;
    for m in &models {
        m.check_registry(&data)?;
    }
    let regression = models[0].is_regression();
    if models.iter().any(|m| m.is_regression() != regression) {
        return Err(Error::InvalidArgument("cannot combine classifiers with regressors".into()));
    }
    let each: Vec<Vec<f64>> = models.iter().map(|m| m.predict(&data.rows)).collect();
    let combined: Vec<f64> = if each.len() == 1 {
        each[0].clone()
    } else if regression {
        (0..data.len()).map(|i| each.iter().map(|p| p[i]).sum::<f64>() / each.len() as f64).collect()
    } else {
        let votes: Vec<Vec<u8>> = each.iter().map(|p| p.iter().map(|&v| v as u8).collect()).collect();
        majority_vote(&votes)?.into_iter().map(f64::from).collect()
    };
    let mut text = String::from("id,prediction\n");
    for (id, p) in data.ids.iter().zip(&combined) {
        text.push_str(&format!("{id},{p}\n"));
    }
    write_text(out, &text)?;
    println!("{} predictions -> {}", combined.len(), out.display());
    Ok(())
}

fn stats(cfg: &PipelineConfig, matrix: &Path, k: usize, alpha: f64, out: &Path) -> Result<()> {
    let data = Dataset::read_path(matrix, None)?;
    let report = feature_differentiation(&data, cfg.eval.significance, cfg.eval.bonferroni_tests)?;
    let weights = if data.mmse.iter().all(Option::is_some) {
        let spec = ModelSpec {
            k_features: Some(k.min(data.n_features())),
            alpha,
            ..ModelSpec::new(ModelKind::Ridge)
        };
        Some(loso_mean_weights(&data, &spec)?)
    } else {
        log::warn!("some samples lack MMSE scores; the weight column is omitted");
        None
    };
    write_atomic(out, |f| report.write_csv(f, weights.as_deref()))?;
    let significant = report.significant_indices();
    println!(
        "{} of {} features significant at p < {:.3e}",
        significant.len(),
        data.n_features(),
        report.threshold
    );
    for &j in &significant {
        let f = &report.features[j];
        let v = |x: Option<f64>| x.map_or_else(|| "-".to_string(), |x| format!("{x:.4}"));
        println!("  {}: AD {} vs non-AD {}, p = {:.3e}", f.name, v(f.mean_ad), v(f.mean_non_ad), f.p.unwrap_or(f64::NAN));
    }
    if let Some(w) = &weights {
        let mut order: Vec<usize> = (0..w.len()).filter(|&j| w[j] != 0.0).collect();
        order.sort_by(|&a, &b| w[b].total_cmp(&w[a]));
        let show = |label: &str, idx: &[usize]| {
            println!("{label}:");
            for &j in idx {
                println!("  {:>10.4}  {}", w[j], data.names[j]);
            }
        };
        let top = order.len().min(5);
        show("highest ridge weights", &order[..top]);
        let bottom: Vec<usize> = order.iter().rev().take(5).copied().collect();
        show("lowest ridge weights", &bottom);
    }
    Ok(())
}

fn embed(cfg: &PipelineConfig, matrix: &Path, significant_only: bool, params: &TsneParams, out: &Path) -> Result<()> {
    let data = Dataset::read_path(matrix, None)?;
    let columns = if significant_only {
        let report = feature_differentiation(&data, cfg.eval.significance, cfg.eval.bonferroni_tests)?;
        let cols = report.significant_indices();
        if cols.is_empty() {
            return Err(Error::Data("no feature is significant; drop --significant-only".into()));
        }
        Some(cols)
    } else {
        data.binary_labels()?;
        None
    };
    let x = tsne_input(&data, columns.as_deref());
    let result = tsne(&x, params)?;
    let mut text = String::from("id,x,y,label\n");
    for ((id, p), l) in data.ids.iter().zip(&result.embedding).zip(&data.labels) {
        let label = l.map_or_else(String::new, |l| l.as_binary().to_string());
        text.push_str(&format!("{id},{},{},{label}\n", p[0], p[1]));
    }
    write_text(out, &text)?;
    let labels: Vec<Option<u8>> = data.labels.iter().map(|l| l.map(|l| l.as_binary())).collect();
    write_text(&sibling(out, ".svg"), &scatter_svg(&result.embedding, &labels))?;
    println!(
        "{} points from {} features, final KL {:.4} -> {}",
        data.len(),
        x.first().map_or(0, Vec::len),
        result.kl_history.last().copied().unwrap_or(f64::NAN),
        out.display()
    );
    Ok(())
}
