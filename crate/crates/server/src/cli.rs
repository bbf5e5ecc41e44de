//! The `cgaedit` command line: `serve`, `edit` and `bench run`.

use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::Context;
use cgaedit_core::bench::{render_svg, render_table, run_suite, BenchTransport, Chart, Suite};
use cgaedit_core::collision::ResolverConfig;
use cgaedit_core::llm::{
    LiveConfig, LiveTransport, LlmTransport, MockScript, MockTiming, MockTransport, RetryPolicy, StrategyKind,
};
use cgaedit_core::pipeline::{execute_edit, EditConfig, SceneStore};
use cgaedit_core::scene::{load_scene_file, save_scene};
use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::api::{router, AppState, ServiceConfig};

#[derive(Debug, Parser)]
#[command(name = "cgaedit", version, about = "Edit 3D scenes from text instructions")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the HTTP/WebSocket service.
    Serve(ServeArgs),
    /// Apply one instruction to a scene file.
    Edit(EditArgs),
    /// Benchmark prompt strategies against a case suite.
    #[command(subcommand)]
    Bench(BenchCommand),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TransportKind {
    Live,
    Mock,
}

#[derive(Debug, Clone, Args)]
pub struct TransportArgs {
    #[arg(long, value_enum, default_value = "live")]
    pub transport: TransportKind,
    /// Scripted replies for `--transport mock`.
    #[arg(long)]
    pub mock_script: Option<PathBuf>,
    #[arg(long, env = "LLM_BASE_URL")]
    pub llm_base_url: Option<String>,
    #[arg(long, env = "LLM_MODEL")]
    pub llm_model: Option<String>,
}

impl TransportArgs {
    fn live_config(&self) -> LiveConfig {
        let mut cfg = LiveConfig::default();
        if let Some(url) = &self.llm_base_url {
            cfg.base_url.clone_from(url);
        }
        if let Some(model) = &self.llm_model {
            cfg.model.clone_from(model);
        }
        cfg
    }

    fn live(&self) -> anyhow::Result<LiveTransport> {
        LiveTransport::from_env(self.live_config()).context("live transport needs an API key")
    }

    pub fn build(&self) -> anyhow::Result<Arc<dyn LlmTransport>> {
        Ok(match self.transport {
            TransportKind::Live => Arc::new(self.live()?),
            TransportKind::Mock => {
                let path = self
                    .mock_script
                    .as_deref()
                    .context("--transport mock needs --mock-script")?;
                let script = MockScript::from_file(path).with_context(|| format!("loading {}", path.display()))?;
                Arc::new(MockTransport::new(script))
            }
        })
    }
}

#[derive(Debug, Clone, Args)]
pub struct PipelineArgs {
    /// Seconds the collision search may take.
    #[arg(long, default_value_t = 0.5)]
    pub collision_budget: f64,
    /// Upward step of the first repair phase.
    #[arg(long)]
    pub delta: Option<f64>,
    /// Horizontal clearance kept around objects.
    #[arg(long)]
    pub buffer: Option<f64>,
    /// Spacing of the repair grid.
    #[arg(long)]
    pub grid_res: Option<f64>,
    #[arg(long, default_value_t = 3)]
    pub max_delta_steps: u32,
    /// Total model calls per edit, first try included.
    #[arg(long, default_value_t = RetryPolicy::default().max_attempts)]
    pub max_attempts: u32,
}

impl PipelineArgs {
    pub fn edit_config(&self) -> EditConfig {
        EditConfig {
            resolver: ResolverConfig {
                delta: self.delta,
                buffer: self.buffer,
                grid_resolution: self.grid_res,
                time_budget: self.collision_budget,
                max_delta_steps: self.max_delta_steps,
            },
            retry: RetryPolicy {
                max_attempts: self.max_attempts,
            },
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct ServeArgs {
    #[arg(long, default_value = "127.0.0.1:8080")]
    pub listen: SocketAddr,
    /// Scenes are kept as JSON files here; in memory when absent.
    #[arg(long)]
    pub data_dir: Option<PathBuf>,
    #[arg(long, default_value = "cga")]
    pub strategy_default: StrategyKind,
    /// Require `Authorization: Bearer <token>`.
    #[arg(long, env = "CGAEDIT_TOKEN")]
    pub token: Option<String>,
    /// Directory with the built web client.
    #[arg(long)]
    pub static_dir: Option<PathBuf>,
    #[command(flatten)]
    pub transport: TransportArgs,
    #[command(flatten)]
    pub pipeline: PipelineArgs,
}

#[derive(Debug, Clone, Args)]
pub struct EditArgs {
    /// Scene file to read.
    pub scene: PathBuf,
    /// Instruction, with object names in quotes.
    pub query: String,
    /// Where to write the edited scene.
    #[arg(long, short)]
    pub out: PathBuf,
    #[arg(long, default_value = "cga")]
    pub strategy: StrategyKind,
    /// Also write the edit plan as JSON.
    #[arg(long)]
    pub plan: Option<PathBuf>,
    #[command(flatten)]
    pub transport: TransportArgs,
    #[command(flatten)]
    pub pipeline: PipelineArgs,
}

#[derive(Debug, Subcommand)]
pub enum BenchCommand {
    Run(BenchArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Timing {
    Virtual,
    Sleep,
}

#[derive(Debug, Clone, Args)]
pub struct BenchArgs {
    #[arg(long, value_delimiter = ',', default_value = "cga,euclidean,omniverse")]
    pub strategy: Vec<StrategyKind>,
    /// `mock` replays each case's own script.
    #[arg(long, value_enum, default_value = "mock")]
    pub transport: TransportKind,
    /// Suite directory with `scenes/` and `cases/`.
    #[arg(long)]
    pub cases: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// Whether scripted delays are slept or only reported.
    #[arg(long, value_enum, default_value = "virtual")]
    pub timing: Timing,
    /// Write success and latency charts next to the report.
    #[arg(long)]
    pub charts: bool,
    #[arg(long, env = "LLM_BASE_URL")]
    pub llm_base_url: Option<String>,
    #[arg(long, env = "LLM_MODEL")]
    pub llm_model: Option<String>,
    #[command(flatten)]
    pub pipeline: PipelineArgs,
}

pub fn serve(args: ServeArgs) -> anyhow::Result<()> {
    let transport = args.transport.build()?;
    let store = match &args.data_dir {
        Some(dir) => SceneStore::open(dir).with_context(|| format!("opening {}", dir.display()))?,
        None => SceneStore::in_memory(),
    };
    let config = ServiceConfig {
        default_strategy: args.strategy_default,
        edit: args.pipeline.edit_config(),
        token: args.token,
        static_dir: args.static_dir,
    };
    config.edit.resolver.validate()?;
    let app = router(AppState::new(store, transport, config));
    let runtime = tokio::runtime::Runtime::new()?;
    runtime.block_on(async move {
        let listener = tokio::net::TcpListener::bind(args.listen).await?;
        tracing::info!(addr = %listener.local_addr()?, "listening");
        axum::serve(listener, app)
            .with_graceful_shutdown(async {
                let _ = tokio::signal::ctrl_c().await;
            })
            .await?;
        Ok(())
    })
}

pub fn edit(args: EditArgs) -> anyhow::Result<()> {
    let scene = load_scene_file(&args.scene).with_context(|| format!("reading {}", args.scene.display()))?;
    let transport = args.transport.build()?;
    let (edited, plan) = execute_edit(&scene, &args.query, args.strategy, transport.as_ref(), &args.pipeline.edit_config())
        .map_err(|e| anyhow::anyhow!("{}: {e}", e.code()))?;
    write(&args.out, &save_scene(&edited))?;
    if let Some(path) = &args.plan {
        write(path, serde_json::to_string_pretty(&plan)?.as_bytes())?;
    }
    for entry in plan.objects.iter().filter(|e| e.before != e.after) {
        println!("{}: {:?} -> {:?}", entry.name, entry.before.center(), entry.after.center());
    }
    Ok(())
}

fn write(path: &Path, bytes: &[u8]) -> anyhow::Result<()> {
    std::fs::write(path, bytes).with_context(|| format!("writing {}", path.display()))
}

/// Exit code 2 for bad fixtures, 1 for anything else.
pub fn bench(args: BenchArgs) -> ExitCode {
    let suite = match Suite::load(&args.cases) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let live;
    let transport = match args.transport {
        TransportKind::Mock => BenchTransport::Mock {
            timing: match args.timing {
                Timing::Virtual => MockTiming::Virtual,
                Timing::Sleep => MockTiming::Sleep,
            },
        },
        TransportKind::Live => {
            let targs = TransportArgs {
                transport: TransportKind::Live,
                mock_script: None,
                llm_base_url: args.llm_base_url.clone(),
                llm_model: args.llm_model.clone(),
            };
            live = match targs.live() {
                Ok(t) => t,
                Err(e) => {
                    eprintln!("error: {e:#}");
                    return ExitCode::FAILURE;
                }
            };
            BenchTransport::Shared(&live)
        }
    };
    let report = match run_suite(&suite, &args.strategy, &transport, &args.pipeline.edit_config()) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let json = serde_json::to_string_pretty(&report).expect("reports serialize");
    let mut outputs = vec![(args.out.clone(), json)];
    if args.charts {
        outputs.push((args.out.with_extension("success.svg"), render_svg(&report, Chart::SuccessRate)));
        outputs.push((args.out.with_extension("latency.svg"), render_svg(&report, Chart::Latency)));
    }
    for (path, text) in outputs {
        if let Err(e) = write(&path, text.as_bytes()) {
            eprintln!("error: {e:#}");
            return ExitCode::FAILURE;
        }
    }
    print!("{}", render_table(&report));
    ExitCode::SUCCESS
}

pub fn run(cli: Cli) -> ExitCode {
    let result = match cli.command {
        Command::Serve(args) => serve(args),
        Command::Edit(args) => edit(args),
        Command::Bench(BenchCommand::Run(args)) => return bench(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
