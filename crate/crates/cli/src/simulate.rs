use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use gslond::sim::{fnv1a, parse_grid, run_grid, write_csv, TrialScenario};

use crate::args::SimulateArgs;
use crate::error::{CliError, CliResult};
use crate::presets::preset;

/// Text of a config given as a path or a bundled name.
pub fn load_config(name: &str) -> CliResult<String> {
    let path = Path::new(name);
    if path.exists() {
        return fs::read_to_string(path).map_err(|e| CliError::io(path, e));
    }
    preset(name)
        .map(str::to_string)
        .ok_or_else(|| CliError::Usage(format!("`{name}` is neither a readable file nor a bundled config")))
}

/// Everything needed to reproduce a simulate run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunManifest {
    pub config: String,
    pub config_hash: u64,
    pub seed: Option<u64>,
    pub replications: Option<usize>,
    pub output: PathBuf,
    pub scenarios: Vec<String>,
}

impl RunManifest {
    pub fn render(&self) -> String {
        let mut s = String::new();
        s.push_str("# gslond run manifest\n");
        s.push_str("tool = gslond\n");
        s.push_str(&format!("version = {}\n", env!("CARGO_PKG_VERSION")));
        s.push_str(&format!("config = {}\n", self.config));
        s.push_str(&format!("config_fnv1a = {:016x}\n", self.config_hash));
        s.push_str(&format!("seed = {}\n", self.seed.map_or("config".into(), |x| x.to_string())));
        s.push_str(&format!(
            "replications = {}\n",
            self.replications.map_or("config".into(), |x| x.to_string())
        ));
        s.push_str(&format!("output = {}\n", self.output.display()));
        s.push_str(&format!("scenarios = {}\n", self.scenarios.len()));
        for line in &self.scenarios {
            s.push_str(&format!("scenario = {line}\n"));
        }
        s
    }

    pub fn parse(text: &str) -> CliResult<Self> {
        let mut m = RunManifest {
            config: String::new(),
            config_hash: 0,
            seed: None,
            replications: None,
            output: PathBuf::new(),
            scenarios: Vec::new(),
        };
        let bad = |line: usize, msg: String| CliError::Core(gslond::Error::Parse { line, msg });
        let mut have_config = false;
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| bad(idx + 1, format!("expected `key = value`, got `{line}`")))?;
            let v = v.trim();
            match k.trim() {
                "tool" | "version" | "scenarios" => {}
                "config" => {
                    m.config = v.to_string();
                    have_config = true;
                }
                "config_fnv1a" => {
                    m.config_hash = u64::from_str_radix(v, 16).map_err(|_| bad(idx + 1, format!("bad hash `{v}`")))?
                }
                "seed" if v == "config" => m.seed = None,
                "seed" => m.seed = Some(v.parse().map_err(|_| bad(idx + 1, format!("bad seed `{v}`")))?),
                "replications" if v == "config" => m.replications = None,
                "replications" => {
                    m.replications = Some(v.parse().map_err(|_| bad(idx + 1, format!("bad count `{v}`")))?)
                }
                "output" => m.output = PathBuf::from(v),
                "scenario" => m.scenarios.push(v.to_string()),
                other => return Err(bad(idx + 1, format!("unknown manifest key `{other}`"))),
            }
        }
        if !have_config {
            return Err(CliError::Usage("manifest has no `config` entry".into()));
        }
        Ok(m)
    }
}

fn manifest_path(csv: &Path) -> PathBuf {
    let mut s = csv.as_os_str().to_owned();
    s.push(".manifest");
    PathBuf::from(s)
}

fn scenario_lines(grid: &[TrialScenario]) -> Vec<String> {
    grid.iter().map(|s| format!("{} seed={} {}", s.id, s.master_seed, s.describe())).collect()
}

pub fn run(args: &SimulateArgs) -> CliResult<()> {
    let (config, seed, replications, recorded, default_out) = match &args.manifest {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
            let m = RunManifest::parse(&text)?;
            (m.config.clone(), m.seed, m.replications, Some(m.clone()), m.output)
        }
        None => (
            args.config.clone().expect("clap enforces --config without --manifest"),
            args.seed,
            args.replications,
            None,
            PathBuf::from("results.csv"),
        ),
    };
    let out = args.out.clone().unwrap_or(default_out);
    let text = load_config(&config)?;
    let config_hash = fnv1a(text.as_bytes());
    let mut grid = parse_grid(&text)?;
    for s in &mut grid {
        if let Some(seed) = seed {
            s.master_seed = seed;
        }
        if let Some(r) = replications {
            s.replications = r;
        }
        s.validate()?;
    }
    let scenarios = scenario_lines(&grid);
    if let Some(m) = &recorded {
        if m.config_hash != config_hash {
            return Err(CliError::Usage(format!("config `{config}` changed since the manifest was written")));
        }
        if m.scenarios != scenarios {
            return Err(CliError::Usage("expanded scenarios differ from the manifest".into()));
        }
    }

    let jobs = args.jobs.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    if jobs == 0 {
        return Err(CliError::Usage("--jobs must be at least 1".into()));
    }
    let total = grid.len();
    let quiet = args.quiet;
    let results = run_grid(&grid, jobs, |k, r| {
        if !quiet {
            let m = &r.summary;
            eprintln!(
                "[{}/{}] {} power={:.4} fdr={:.4} saved={:.2}%",
                k + 1,
                total,
                r.scenario.id,
                m.power,
                m.fdr,
                m.saved_pct
            );
        }
    })?;

    let file = fs::File::create(&out).map_err(|e| CliError::io(&out, e))?;
    let mut w = BufWriter::new(file);
    write_csv(&mut w, &results).map_err(|e| CliError::io(&out, e))?;
    w.flush().map_err(|e| CliError::io(&out, e))?;

    let manifest = RunManifest { config, config_hash, seed, replications, output: out.clone(), scenarios };
    let mpath = manifest_path(&out);
    fs::write(&mpath, manifest.render()).map_err(|e| CliError::io(&mpath, e))?;
    if !quiet {
        eprintln!("wrote {} and {}", out.display(), mpath.display());
    }
    Ok(())
}
