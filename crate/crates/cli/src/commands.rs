use std::fmt;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use graph_coreset::coreset::ImportanceSampler;
use graph_coreset::evaluation::{center_sets, errors_against};
use graph_coreset::graph::synth::{random_connected, road_grid};
use graph_coreset::graph::write_edge_list;
use graph_coreset::{
    ball_region, coreset_size_bound, cost, empirical_error, gen_dataset, gen_lowerbound_instance,
    gen_star_instance, load_graph, load_points_csv, local_search, run_benchmark, CandidatePool,
    CenterSet, Coreset, CoresetMethod, ErrorTrialConfig, Graph, IdentityMethod, LocalSearchConfig,
    Scenario, SensitivityMethod, UniformMethod, WeightedPointSet,
};
use log::info;

use crate::{
    BenchmarkArgs, BuildArgs, Cli, Command, EvalArgs, GenCommand, GraphArgs, Method, Mode,
    SolveArgs,
};

/// A bad combination of otherwise well-formed flags.
#[derive(Debug)]
struct Usage(String);

impl fmt::Display for Usage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    Usage(msg.into()).into()
}

/// 2 for usage, input and argument errors, 1 for failures at run time.
pub fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if cause.is::<Usage>() {
            return 2;
        }
        if let Some(e) = cause.downcast_ref::<graph_coreset::Error>() {
            return match e {
                graph_coreset::Error::Unreachable { .. } | graph_coreset::Error::UndefinedError => {
                    1
                }
                _ => 2,
            };
        }
    }
    1
}

pub fn run(cli: Cli) -> Result<()> {
    if let Some(threads) = cli.threads {
        if threads == 0 {
            return Err(usage("--threads must be at least 1"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .context("configuring the thread pool")?;
    }
    match cli.command {
        Command::Build(args) => build(args),
        Command::Benchmark(args) => benchmark(args),
        Command::Solve(args) => solve(args),
        Command::Eval(args) => eval(args),
        Command::Gen(cmd) => generate(cmd),
    }
}

fn load(args: &GraphArgs) -> Result<Graph> {
    let g = load_graph(&args.graph, args.format)?;
    info!(
        "loaded {}: {} vertices, {} edges",
        args.graph.display(),
        g.vertex_count(),
        g.edge_count()
    );
    Ok(g)
}

fn load_points(path: &Path) -> Result<WeightedPointSet> {
    load_points_csv(path).with_context(|| format!("reading {}", path.display()))
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    Ok(BufWriter::new(file))
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => {
            let mut w = create(path)?;
            w.write_all(text.as_bytes())?;
            w.flush()?;
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()?;
        }
    }
    Ok(())
}

fn meta_path(out: &Path) -> PathBuf {
    let mut name = out.as_os_str().to_owned();
    name.push(".meta");
    PathBuf::from(name)
}

fn build(args: BuildArgs) -> Result<()> {
    let g = load(&args.graph)?;
    let x = load_points(&args.data)?;
    let cfg = args.bicriteria.config();
    let sampler = ImportanceSampler::prepare(&g, &x, args.k, &cfg, args.rho, args.seed)?;
    let n = match args.size.size {
        Some(n) => n,
        None => {
            let s = &args.size;
            let (Some(eps), Some(delta), Some(sdim)) = (s.epsilon, s.delta, s.sdim) else {
                return Err(usage("give --size or all of --epsilon, --delta and --sdim"));
            };
            let n = coreset_size_bound(
                eps,
                delta,
                args.k,
                sdim,
                sampler.sensitivities.total,
                s.c0.unwrap_or(1.0),
            )?;
            info!("sized by bound: N = {n}");
            n
        }
    };
    let coreset = sampler.sample(n)?;
    info!(
        "coreset: {} distinct points from {} samples",
        coreset.len(),
        n
    );

    let mut w = create(&args.out)?;
    coreset.write_csv(&mut w)?;
    w.flush()?;
    let meta = coreset
        .meta
        .as_ref()
        .expect("sampled coresets carry metadata");
    emit(Some(&meta_path(&args.out)), &meta.to_kv())
}

fn benchmark(args: BenchmarkArgs) -> Result<()> {
    let g = load(&args.graph)?;
    let x = load_points(&args.data)?;
    let sensitivity = SensitivityMethod {
        bicriteria: args.bicriteria.config(),
        rho: args.rho,
    };
    let mut methods: Vec<&dyn CoresetMethod> = Vec::new();
    for m in &args.methods {
        let method: &dyn CoresetMethod = match m {
            Method::Coreset => &sensitivity,
            Method::Uniform => &UniformMethod,
            Method::Identity => &IdentityMethod,
        };
        if methods.iter().any(|p| p.name() == method.name()) {
            return Err(usage(format!("method '{}' given twice", method.name())));
        }
        methods.push(method);
    }
    let cfg = ErrorTrialConfig {
        center_sets: args.center_sets,
        k: args.k,
        repetitions: args.repetitions,
        seed: args.seed,
    };
    let mut report = run_benchmark(&g, &x, &args.sizes, &methods, &cfg)?;
    if args.no_timings {
        report = report.without_timings();
    }
    if let Some(path) = &args.json {
        emit(Some(path), &(report.to_json() + "\n"))?;
    }
    emit(args.out.as_deref(), &report.to_csv())
}

fn solve(args: SolveArgs) -> Result<()> {
    let g = load(&args.graph)?;
    let x = args.data.as_deref().map(load_points).transpose()?;
    let d = args.coreset.as_deref().map(load_points).transpose()?;
    let (data, pool) = match args.mode {
        Mode::XxV => (
            x.clone().ok_or_else(|| usage("mode XxV needs --data"))?,
            CandidatePool::AllVertices,
        ),
        Mode::DxV => (
            d.ok_or_else(|| usage("mode DxV needs --coreset"))?,
            CandidatePool::AllVertices,
        ),
        Mode::DxD => {
            let d = d.ok_or_else(|| usage("mode DxD needs --coreset"))?;
            let support = d.support();
            (d, CandidatePool::Restricted(support))
        }
    };
    let pool_size = match &pool {
        CandidatePool::AllVertices => g.vertex_count(),
        CandidatePool::Restricted(p) => p.len(),
    };
    if args.k == 0 || args.k > pool_size {
        return Err(usage(format!(
            "k = {} does not fit a candidate pool of {pool_size}",
            args.k
        )));
    }
    let cfg = LocalSearchConfig {
        threshold: args.threshold,
        max_iterations: args.max_iterations,
    };
    let res = local_search(&g, &data, args.k, &pool, &cfg, args.seed)?;
    let mode = match args.mode {
        Mode::XxV => "XxV",
        Mode::DxV => "DxV",
        Mode::DxD => "DxD",
    };
    let mut text = format!(
        "mode={mode}\ncenters={}\ncost={}\niterations={}\n",
        res.centers, res.cost, res.iterations
    );
    if let Some(x) = &x {
        text.push_str(&format!("cost_full={}\n", cost(&g, x, &res.centers)?));
    }
    emit(args.out.as_deref(), &text)
}

fn eval(args: EvalArgs) -> Result<()> {
    let g = load(&args.graph)?;
    let x = load_points(&args.data)?;
    let d = Coreset::new(load_points(&args.coreset)?, None);
    let text = match &args.centers {
        Some(centers) => {
            let c = CenterSet::new(centers.clone())?;
            format!("err={}\n", empirical_error(&g, &x, &d, &c)?)
        }
        None => {
            let k = args.k.ok_or_else(|| usage("random center sets need --k"))?;
            let seed = args
                .seed
                .ok_or_else(|| usage("random center sets need --seed"))?;
            if args.center_sets == 0 {
                return Err(usage("--center-sets must be at least 1"));
            }
            let sets = center_sets(g.vertex_count(), k, args.center_sets, seed)?;
            let errors = errors_against(&g, &x, &d, &sets)?;
            let max = errors.iter().copied().fold(0.0, f64::max);
            let mean = errors.iter().sum::<f64>() / errors.len() as f64;
            format!(
                "k={k}\ncenter_sets={}\nmax_err={max}\nmean_err={mean}\n",
                sets.len()
            )
        }
    };
    emit(args.out.as_deref(), &text)
}

fn write_graph(g: &Graph, out: &Path) -> Result<()> {
    let mut w = create(out)?;
    write_edge_list(g, &mut w)?;
    w.flush()?;
    info!(
        "wrote {} vertices, {} edges to {}",
        g.vertex_count(),
        g.edge_count(),
        out.display()
    );
    Ok(())
}

fn generate(cmd: GenCommand) -> Result<()> {
    match cmd {
        GenCommand::Lowerbound {
            k,
            epsilon,
            t,
            out,
            labels,
        } => {
            let inst = gen_lowerbound_instance(k, epsilon, t)?;
            write_graph(&inst.graph, &out)?;
            if let Some(path) = labels {
                let mut w = create(&path)?;
                inst.write_labels(&mut w)?;
                w.flush()?;
            }
            Ok(())
        }
        GenCommand::Star { k, epsilon, out } => write_graph(&gen_star_instance(k, epsilon)?, &out),
        GenCommand::Grid {
            rows,
            cols,
            seed,
            out,
        } => {
            if rows == 0 || cols == 0 {
                return Err(usage("grid dimensions must be positive"));
            }
            write_graph(&road_grid(rows, cols, seed), &out)
        }
        GenCommand::Random {
            vertices,
            edges,
            seed,
            out,
        } => {
            if vertices == 0 || edges + 1 < vertices {
                return Err(usage("need at least one vertex and vertices - 1 edges"));
            }
            write_graph(&random_connected(vertices, edges, seed), &out)
        }
        GenCommand::Dataset {
            graph,
            count,
            region_center,
            region_size,
            fraction,
            seed,
            out,
        } => {
            let g = load(&graph)?;
            let scenario = match (region_center, region_size) {
                (Some(center), Some(size)) => {
                    if center >= g.vertex_count() {
                        return Err(usage(format!("region center {center} is not a vertex")));
                    }
                    Scenario::Concentrated {
                        region: ball_region(&g, center, size)?,
                        fraction,
                    }
                }
                _ => Scenario::Uniform,
            };
            let x = gen_dataset(&g, &scenario, count, seed)?;
            let mut w = create(&out)?;
            graph_coreset::write_points_csv(&x, &mut w)?;
            w.flush()?;
            Ok(())
        }
    }
}
