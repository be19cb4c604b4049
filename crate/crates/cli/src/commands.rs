use std::path::{Path, PathBuf};

use clap::Args;
use packbench::evolver::{evolve_winners, EvolverConfig};
use packbench::heuristics::{instantiate, parse_portfolio, Heuristic, HeuristicId};
use packbench::instance::{self, Dataset, Format, ManifestEntry, ShufflePolicy};
use packbench::isa::{self, Corpus};
use packbench::metrics::{
    evaluate_dataset, generalisation_profile, summed_aeb_ranking, DatasetScorecard, LbMode, MetricConfig,
    PortfolioResult, ScorecardRow, DEFAULT_THRESHOLDS,
};
use packbench::report::{self, Header, HeatmapValue};
use packbench::simulator::CandidatePolicy;
use packbench::tuner::{self, TuneConfig};

use crate::data::{load_manifest, read, write, write_dataset};
use crate::settings::Settings;
use crate::{CliError, Command, Common};

type Res<T = ()> = Result<T, CliError>;

struct Ctx {
    settings: Settings,
    seed: u64,
    out: PathBuf,
    metrics: MetricConfig,
}

impl Ctx {
    fn new(common: &Common) -> Res<Self> {
        let mut settings = Settings::load(common.config.as_deref())?;
        let seed = settings.pick("seed", common.seed, 0)?;
        let out: String = settings.pick(
            "out",
            common.out.as_ref().map(|p| p.display().to_string()),
            "out".into(),
        )?;
        let workers = settings.pick("workers", common.workers, 0usize)?;
        if workers > 0 {
            // fails only if a pool already exists, which is harmless
            let _ = rayon::ThreadPoolBuilder::new().num_threads(workers).build_global();
        }
        let ceil = settings.pick("ceil_lb", common.ceil_lb.then_some(true), false)?;
        let falkenauer_k = settings.pick("falkenauer_k", common.falkenauer_k, 2.0)?;
        if !(falkenauer_k > 0.0 && falkenauer_k.is_finite()) {
            return Err(CliError::Usage("falkenauer-k must be positive".into()));
        }
        let candidates = common
            .candidates
            .as_deref()
            .map(str::parse::<CandidatePolicy>)
            .transpose()?;
        let candidates = settings.pick("candidates", candidates, CandidatePolicy::default())?;
        Ok(Self {
            settings,
            seed,
            out: PathBuf::from(out),
            metrics: MetricConfig {
                falkenauer_k,
                lb_mode: if ceil { LbMode::Ceiled } else { LbMode::Continuous },
                candidates,
            },
        })
    }

    fn header(&self, command: &str) -> Header {
        Header::new(command, self.seed, &self.settings.resolved(), self.metrics)
    }

    fn path(&self, name: &str) -> PathBuf {
        self.out.join(name)
    }

    fn portfolio(&mut self, flag: Option<String>) -> Res<Vec<HeuristicId>> {
        let spec = self.settings.pick("portfolio", flag, "all".to_string())?;
        Ok(parse_portfolio(&spec)?)
    }
}

pub fn run(common: &Common, command: Command) -> Res {
    let mut ctx = Ctx::new(common)?;
    match command {
        Command::Generate(a) => generate(&mut ctx, a),
        Command::Bench(a) => bench(&mut ctx, a),
        Command::Evolve(a) => evolve(&mut ctx, a),
        Command::Tune(a) => tune(&mut ctx, a),
        Command::Features(a) => features(&mut ctx, a),
        Command::Project(a) => project(&mut ctx, a),
        Command::Report(a) => report_cmd(&mut ctx, a),
    }
}

#[derive(Args, Debug)]
pub struct GenerateArgs {
    /// or1..or4, or, random, scholl1, scholl2, scholl-hard, schwerin1,
    /// schwerin2, weibull1k, weibull5k, weibull10k, or suite.
    #[arg(long)]
    pub class: Option<String>,
    /// Instances per dataset (per cell for random and scholl classes).
    #[arg(long)]
    pub instances: Option<usize>,
}

fn generated(class: &str, count: Option<usize>, seed: u64) -> Res<Vec<Dataset>> {
    let c = |d: usize| count.unwrap_or(d);
    let weibull = |name: &str, n: usize| instance::weibull_dataset(name, n, c(5), seed);
    let sets = match class {
        "suite" => instance::benchmark_suite(seed)?,
        "or" => (0..4)
            .map(|i| instance::or_like_dataset(i, c(20), seed))
            .collect::<Result<_, _>>()?,
        "or1" | "or2" | "or3" | "or4" => {
            let i = class[2..].parse::<usize>().unwrap() - 1;
            vec![instance::or_like_dataset(i, c(20), seed)?]
        }
        "random" => vec![instance::random_class_dataset(c(1), seed)?],
        "scholl1" => vec![instance::scholl1_dataset(c(2), seed)?],
        "scholl2" => vec![instance::scholl2_dataset(c(2), seed)?],
        "scholl-hard" => vec![instance::scholl_hard_dataset(c(10), seed)?],
        "schwerin1" => vec![instance::schwerin_dataset(100, c(20), seed)?],
        "schwerin2" => vec![instance::schwerin_dataset(120, c(20), seed)?],
        "weibull1k" => vec![weibull("Weibull_1k", 1_000)?],
        "weibull5k" => vec![weibull("Weibull_5k", 5_000)?],
        "weibull10k" => vec![weibull("Weibull_10k", 10_000)?],
        other => return Err(CliError::Usage(format!("unknown dataset class `{other}`"))),
    };
    Ok(sets)
}

fn generate(ctx: &mut Ctx, a: GenerateArgs) -> Res {
    let class = ctx.settings.pick("class", a.class, "suite".to_string())?;
    if let Some(n) = a.instances {
        ctx.settings.note("instances", n);
    }
    let sets = generated(&class, a.instances, ctx.seed)?;
    let mut entries = Vec::new();
    for ds in &sets {
        write_dataset(&ctx.out, &ds.name, ds)?;
        entries.push(ManifestEntry {
            name: ds.name.clone(),
            dir: ds.name.clone(),
            format: Format::Bpplib,
            shuffle: ShufflePolicy::None,
        });
        println!("{}: {} instances", ds.name, ds.len());
    }
    let manifest = ctx.header("generate").wrap(&instance::format_manifest(&entries));
    write(&ctx.path("datasets.manifest"), &manifest)
}

#[derive(Args, Debug)]
pub struct BenchArgs {
    /// Dataset manifest: `<name> <dir> <format> <shuffle>` per line.
    #[arg(long)]
    pub manifest: PathBuf,
    /// Comma-separated heuristic ids, or `all`.
    #[arg(long)]
    pub portfolio: Option<String>,
}

fn bins_csv(evals: &[packbench::metrics::DatasetEvaluation]) -> String {
    let mut s = String::from("dataset,instance");
    if let Some(first) = evals.first() {
        for h in &first.heuristics {
            s.push_str(&format!(",{h}"));
        }
    }
    s.push('\n');
    for ev in evals {
        for r in &ev.results {
            s.push_str(&format!("{},{}", ev.dataset, r.instance_id));
            for (_, b) in &r.bins {
                s.push_str(&format!(",{b}"));
            }
            s.push('\n');
        }
    }
    s
}

fn bench(ctx: &mut Ctx, a: BenchArgs) -> Res {
    let portfolio = ctx.portfolio(a.portfolio)?;
    ctx.settings.note("manifest", a.manifest.display());
    let datasets = load_manifest(&a.manifest)?;
    let heuristics = instantiate(&portfolio)?;
    let mut evals = Vec::new();
    let mut cards = Vec::new();
    for ds in &datasets {
        let ev = evaluate_dataset(ds, &heuristics, &ctx.metrics)?;
        cards.push(ev.scorecard()?);
        evals.push(ev);
    }
    let ranking = summed_aeb_ranking(&cards);
    let names: Vec<&str> = portfolio.iter().map(|h| h.name()).collect();
    let header = ctx.header("bench").with("portfolio", names.join(","));
    write(&ctx.path("scorecard.csv"), &header.wrap(&report::scorecard_csv(&cards)))?;
    for v in [HeatmapValue::Aeb, HeatmapValue::Falkenauer, HeatmapValue::Wins] {
        let file = format!("{}.csv", v.file_stem());
        write(&ctx.path(&file), &header.wrap(&report::heatmap_csv(&cards, v)))?;
    }
    write(&ctx.path("ranking.csv"), &header.wrap(&report::ranking_csv(&ranking)))?;
    write(&ctx.path("bins.csv"), &header.wrap(&bins_csv(&evals)))?;
    for (i, (h, v)) in ranking.iter().enumerate() {
        println!("{:>2} {:<4} {v:.2}", i + 1, h.name());
    }
    Ok(())
}

#[derive(Args, Debug)]
pub struct EvolveArgs {
    /// Target heuristic id, or `all` for every portfolio member.
    #[arg(long)]
    pub target: String,
    #[arg(long)]
    pub portfolio: Option<String>,
    /// Distinct strict-win instances wanted per target.
    #[arg(long)]
    pub instances: Option<usize>,
    /// Independent EA runs before giving up on a target.
    #[arg(long)]
    pub max_runs: Option<usize>,
    #[arg(long)]
    pub population: Option<usize>,
    #[arg(long)]
    pub generations: Option<usize>,
    #[arg(long)]
    pub n_items: Option<usize>,
    #[arg(long)]
    pub swap_rate: Option<f64>,
    #[arg(long)]
    pub resample_rate: Option<f64>,
}

fn evolve(ctx: &mut Ctx, a: EvolveArgs) -> Res {
    let portfolio = ctx.portfolio(a.portfolio)?;
    let targets = if a.target.eq_ignore_ascii_case("all") {
        portfolio.clone()
    } else {
        vec![a.target.parse::<HeuristicId>()?]
    };
    ctx.settings.note("target", &a.target);
    let base = EvolverConfig::new(targets[0]);
    let cfg = EvolverConfig {
        portfolio: portfolio.clone(),
        instances_wanted: ctx.settings.pick("instances", a.instances, base.instances_wanted)?,
        max_runs: ctx.settings.pick("max_runs", a.max_runs, base.max_runs)?,
        population: ctx.settings.pick("population", a.population, base.population)?,
        max_generations: ctx.settings.pick("generations", a.generations, base.max_generations)?,
        n_items: ctx.settings.pick("n_items", a.n_items, base.n_items)?,
        swap_rate: ctx.settings.pick("swap_rate", a.swap_rate, base.swap_rate)?,
        resample_rate: ctx
            .settings
            .pick("resample_rate", a.resample_rate, base.resample_rate)?,
        seed: ctx.seed,
        falkenauer_k: ctx.metrics.falkenauer_k,
        candidates: ctx.metrics.candidates,
        ..base
    };
    let header = ctx.header("evolve");
    let mut entries = Vec::new();
    let mut summary = String::from("target,instances,runs,duplicates,hard_target\n");
    for target in targets {
        let cfg = EvolverConfig { target, ..cfg.clone() };
        let set = evolve_winners(&cfg)?;
        if let Some(id) = set.replay(cfg.candidates)? {
            return Err(CliError::Contract(format!(
                "evolved instance `{id}` failed strict-win replay"
            )));
        }
        println!("{}", set.report());
        summary.push_str(&format!(
            "{},{},{},{},{}\n",
            target,
            set.instances.len(),
            set.runs,
            set.duplicates,
            set.is_hard_target()
        ));
        let dir = format!("evolved/{}", target.name());
        for e in &set.instances {
            write(
                &ctx.out.join(&dir).join(format!("{}.txt", e.instance.id)),
                &e.instance.to_bpplib(),
            )?;
        }
        write(
            &ctx.path(&format!("evolved_{}.csv", target.name())),
            &header.wrap(&set.manifest_csv()),
        )?;
        if !set.is_hard_target() {
            entries.push(ManifestEntry {
                name: target.name().to_string(),
                dir,
                format: Format::Bpplib,
                shuffle: ShufflePolicy::None,
            });
        }
    }
    write(&ctx.path("evolve_summary.csv"), &header.wrap(&summary))?;
    write(
        &ctx.path("evolved.manifest"),
        &header.wrap(&instance::format_manifest(&entries)),
    )
}

#[derive(Args, Debug)]
pub struct TuneArgs {
    #[arg(long)]
    pub heuristic: HeuristicId,
    /// Training manifest; regenerated from the training distribution if omitted.
    #[arg(long)]
    pub train: Option<PathBuf>,
    /// Objective evaluations.
    #[arg(long)]
    pub budget: Option<usize>,
    #[arg(long)]
    pub train_instances: Option<usize>,
    /// Items per regenerated Weibull training instance.
    #[arg(long)]
    pub weibull_items: Option<usize>,
    /// Manifest of datasets for the tuned vs untuned comparison.
    #[arg(long)]
    pub compare: Option<PathBuf>,
}

fn merged(datasets: Vec<Dataset>) -> Res<Dataset> {
    let mut all = Vec::new();
    for ds in datasets {
        for mut inst in ds.instances {
            inst.id = format!("{}/{}", ds.name, inst.id);
            all.push(inst);
        }
    }
    Ok(Dataset::new("train", all)?)
}

fn tune(ctx: &mut Ctx, a: TuneArgs) -> Res {
    let id = a.heuristic;
    ctx.settings.note("heuristic", id);
    let budget = ctx.settings.pick("budget", a.budget, 5000usize)?;
    let train = match &a.train {
        Some(path) => {
            ctx.settings.note("train", path.display());
            merged(load_manifest(path)?)?
        }
        None => {
            let n = ctx.settings.pick("train_instances", a.train_instances, 5usize)?;
            let items = ctx.settings.pick("weibull_items", a.weibull_items, 5000usize)?;
            tuner::training_set(id, n, items, ctx.seed)?
        }
    };
    let cfg = TuneConfig {
        budget,
        seed: ctx.seed,
        metrics: ctx.metrics,
    };
    let rep = tuner::tune(id, &train, &cfg)?;
    let header = ctx.header("tune").with("tuner", rep.method);
    write(
        &ctx.path(&format!("tune_{}.csv", id.name())),
        &header.wrap(&rep.log_csv()),
    )?;
    let summary = format!(
        "heuristic: {id}\nmethod: {}\nevaluations: {}\ndefault_aeb: {:.6}\nbest_aeb: {:.6}\nimproved: {}\nbest: {}\n",
        rep.method,
        rep.log.len(),
        rep.default_aeb,
        rep.best_aeb,
        rep.improved(),
        rep.best.describe()
    );
    write(&ctx.path(&format!("tuned_{}.txt", id.name())), &header.wrap(&summary))?;
    print!("{summary}");
    if let Some(path) = &a.compare {
        let tuned = Heuristic::with_params(id, rep.best.values().to_vec())?;
        let rows = tuner::compare(&tuned, &load_manifest(path)?, &ctx.metrics)?;
        let (gain, improved) = tuner::summarize(&rows);
        let h = header
            .with("mean_gain_pct", format!("{gain:.2}"))
            .with("datasets_improved_pct", format!("{improved:.0}"));
        write(
            &ctx.path(&format!("compare_{}.csv", id.name())),
            &h.wrap(&tuner::comparison_csv(&rows)),
        )?;
        println!("mean gain {gain:.2}% on {improved:.0}% of datasets improved");
    }
    Ok(())
}

#[derive(Args, Debug)]
pub struct FeaturesArgs {
    #[arg(long)]
    pub manifest: PathBuf,
    /// `dataset` (the manifest name) or `winner` (unique best heuristic, else `tie`).
    #[arg(long)]
    pub label: Option<String>,
    #[arg(long)]
    pub portfolio: Option<String>,
}

fn features(ctx: &mut Ctx, a: FeaturesArgs) -> Res {
    ctx.settings.note("manifest", a.manifest.display());
    let label = ctx.settings.pick("label", a.label, "dataset".to_string())?;
    let datasets = load_manifest(&a.manifest)?;
    let mut labelled = Vec::new();
    match label.as_str() {
        "dataset" => {
            for ds in &datasets {
                labelled.extend(ds.instances.iter().map(|i| (i, ds.name.clone())));
            }
        }
        "winner" => {
            let heuristics = instantiate(&ctx.portfolio(a.portfolio)?)?;
            for ds in &datasets {
                let ev = evaluate_dataset(ds, &heuristics, &ctx.metrics)?;
                for (inst, r) in ds.instances.iter().zip(&ev.results) {
                    let l = match r.winners[..] {
                        [w] => w.name().to_string(),
                        _ => "tie".to_string(),
                    };
                    labelled.push((inst, l));
                }
            }
        }
        other => return Err(CliError::Usage(format!("unknown label mode `{other}`"))),
    }
    let fv = isa::extract_all(&labelled);
    let header = ctx.header("features").with("method", isa::METHOD_TAG);
    write(&ctx.path("features.csv"), &header.wrap(&isa::features_csv(&fv)))?;
    println!("{} instances, {} features", fv.len(), isa::FEATURE_NAMES.len());
    Ok(())
}

#[derive(Args, Debug)]
pub struct ProjectArgs {
    /// features.csv written by the `features` command.
    #[arg(long)]
    pub features: PathBuf,
    /// Features kept by the elimination.
    #[arg(long)]
    pub k: Option<usize>,
    /// Comma-separated labels to keep.
    #[arg(long)]
    pub only: Option<String>,
    /// Also draw projection.svg.
    #[arg(long)]
    pub svg: bool,
}

fn csv_reader(text: &str) -> csv::Reader<&[u8]> {
    csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(text.as_bytes())
}

fn read_corpus(path: &Path) -> Res<Corpus> {
    let text = read(path)?;
    let mut rdr = csv_reader(&text);
    let bad = |m: String| CliError::Io(format!("{}: {m}", path.display()));
    let headers = rdr.headers().map_err(|e| bad(e.to_string()))?.clone();
    if headers.len() < 3 || &headers[0] != "id" || &headers[1] != "label" {
        return Err(bad("expected columns id,label,<features>".into()));
    }
    let mut corpus = Corpus {
        names: headers.iter().skip(2).map(String::from).collect(),
        ids: Vec::new(),
        labels: Vec::new(),
        rows: Vec::new(),
    };
    for rec in rdr.records() {
        let rec = rec.map_err(|e| bad(e.to_string()))?;
        corpus.ids.push(rec[0].to_string());
        corpus.labels.push(rec[1].to_string());
        let row = rec
            .iter()
            .skip(2)
            .map(|v| v.parse::<f64>().map_err(|e| bad(format!("value `{v}`: {e}"))))
            .collect::<Res<Vec<_>>>()?;
        corpus.rows.push(row);
    }
    Ok(corpus)
}

fn project(ctx: &mut Ctx, a: ProjectArgs) -> Res {
    ctx.settings.note("features", a.features.display());
    let k = ctx.settings.pick("k", a.k, 10usize)?;
    let mut corpus = read_corpus(&a.features)?;
    if let Some(only) = &a.only {
        ctx.settings.note("only", only);
        let keep: Vec<&str> = only.split(',').map(str::trim).collect();
        let rows: Vec<usize> = (0..corpus.ids.len())
            .filter(|&i| keep.contains(&corpus.labels[i].as_str()))
            .collect();
        corpus.ids = rows.iter().map(|&i| corpus.ids[i].clone()).collect();
        corpus.labels = rows.iter().map(|&i| corpus.labels[i].clone()).collect();
        corpus.rows = rows.iter().map(|&i| corpus.rows[i].clone()).collect();
    }
    let selected = isa::select_features(&corpus, k)?;
    let reduced = corpus.restrict(&selected)?;
    let p = isa::project(&reduced)?;
    let header = ctx.header("project").with("method", isa::METHOD_TAG);
    write(
        &ctx.path("selected_features.csv"),
        &header.wrap(&format!("feature\n{}\n", selected.join("\n"))),
    )?;
    write(
        &ctx.path("projection.csv"),
        &header.wrap(&isa::projection_csv(&reduced, &p)),
    )?;
    write(&ctx.path("loadings.csv"), &header.wrap(&isa::loadings_csv(&p)))?;
    if a.svg {
        write(&ctx.path("projection.svg"), &isa::scatter_svg(&reduced, &p))?;
    }
    println!(
        "selected {}; explained variance {:.3} + {:.3}",
        selected.join(","),
        p.explained_variance.0,
        p.explained_variance.1
    );
    Ok(())
}

#[derive(Args, Debug)]
pub struct ReportArgs {
    /// Require the generalisation profile (needs --bins).
    #[arg(long)]
    pub profile: bool,
    /// bins.csv written by `bench`; produces the generalisation profile.
    #[arg(long)]
    pub bins: Option<PathBuf>,
    /// scorecard.csv written by `bench`; produces boxplot statistics.
    #[arg(long)]
    pub scorecard: Option<PathBuf>,
    /// Comma-separated excess-bin thresholds in percent.
    #[arg(long)]
    pub thresholds: Option<String>,
}

fn read_results(path: &Path) -> Res<Vec<PortfolioResult>> {
    let text = read(path)?;
    let mut rdr = csv_reader(&text);
    let bad = |m: String| CliError::Io(format!("{}: {m}", path.display()));
    let headers = rdr.headers().map_err(|e| bad(e.to_string()))?.clone();
    let hs = headers
        .iter()
        .skip(2)
        .map(|h| h.parse::<HeuristicId>())
        .collect::<Result<Vec<_>, _>>()?;
    let mut out = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| bad(e.to_string()))?;
        let bins = hs
            .iter()
            .zip(rec.iter().skip(2))
            .map(|(&h, v)| {
                v.parse::<usize>()
                    .map(|b| (h, b))
                    .map_err(|e| bad(format!("`{v}`: {e}")))
            })
            .collect::<Res<Vec<_>>>()?;
        out.push(PortfolioResult::new(format!("{}/{}", &rec[0], &rec[1]), bins)?);
    }
    Ok(out)
}

fn read_scorecards(path: &Path) -> Res<Vec<DatasetScorecard>> {
    let text = read(path)?;
    let mut rdr = csv_reader(&text);
    let bad = |m: String| CliError::Io(format!("{}: {m}", path.display()));
    let mut cards: Vec<DatasetScorecard> = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| bad(e.to_string()))?;
        if rec.len() != 6 {
            return Err(bad("expected 6 scorecard columns".into()));
        }
        let num = |i: usize| rec[i].parse::<f64>().map_err(|e| bad(format!("`{}`: {e}", &rec[i])));
        let row = ScorecardRow {
            heuristic: rec[1].parse()?,
            mean_aeb: num(2)?,
            mean_falkenauer: num(3)?,
            win_fraction: num(4)?,
            instances: num(5)? as usize,
        };
        match cards.last_mut() {
            Some(c) if c.dataset == rec[0] => c.rows.push(row),
            _ => cards.push(DatasetScorecard {
                dataset: rec[0].to_string(),
                rows: vec![row],
            }),
        }
    }
    Ok(cards)
}

fn report_cmd(ctx: &mut Ctx, a: ReportArgs) -> Res {
    if a.bins.is_none() && a.scorecard.is_none() {
        return Err(CliError::Usage("report needs --bins and/or --scorecard".into()));
    }
    if a.profile && a.bins.is_none() {
        return Err(CliError::Usage("--profile needs --bins".into()));
    }
    let default = DEFAULT_THRESHOLDS.map(|x| x.to_string()).join(",");
    let spec = ctx.settings.pick("thresholds", a.thresholds, default)?;
    let thresholds = spec
        .split(',')
        .map(|t| t.trim().parse::<f64>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| CliError::Usage(format!("bad thresholds `{spec}`: {e}")))?;
    if let Some(p) = &a.bins {
        ctx.settings.note("bins", p.display());
    }
    if let Some(p) = &a.scorecard {
        ctx.settings.note("scorecard", p.display());
    }
    let header = ctx.header("report");
    if let Some(path) = &a.bins {
        let table = generalisation_profile(&read_results(path)?, &thresholds)?;
        let body = report::profile_csv(&table);
        write(&ctx.path("profile.csv"), &header.wrap(&body))?;
        print!("{body}");
    }
    if let Some(path) = &a.scorecard {
        let body = report::boxplot_csv(&read_scorecards(path)?);
        write(&ctx.path("boxplot.csv"), &header.wrap(&body))?;
    }
    Ok(())
}
