use std::io::Write;

use marginrcn::dataset::write_dataset;
use marginrcn::simulate::MarginSampler;
use marginrcn::{generate_dataset, SimulatorConfig, WStarMode};

use crate::args::{SimulateArgs, WStarArg};
use crate::error::{CliError, CliResult};
use crate::output::{meta_path, to_json, DatasetMeta};

pub fn run(a: &SimulateArgs, out: &mut dyn Write) -> CliResult<()> {
    let config = SimulatorConfig {
        w_star_mode: match a.w_star {
            WStarArg::FirstAxis => WStarMode::FirstAxis,
            WStarArg::RandomUnit => WStarMode::RandomUnit,
        },
        stream: a.stream,
        ..SimulatorConfig::new(a.d, a.gamma, a.eta, a.n, a.seed)
    };
    let instance = config.instance()?;
    let rejection = MarginSampler::new(&instance).uses_rejection();
    let (ds, _) = generate_dataset(&config)?;
    write_dataset(&ds, &a.out).map_err(|e| CliError::failure(format!("{}: {e}", a.out.display())))?;
    let meta = DatasetMeta::new(config, &instance.w_star, rejection);
    let mp = meta_path(&a.out);
    std::fs::write(&mp, to_json(&meta)?).map_err(|e| CliError::failure(format!("{}: {e}", mp.display())))?;
    writeln!(
        out,
        "instance d={} gamma={} eta={} w_star={} sampler={}",
        a.d,
        a.gamma,
        a.eta,
        serde_json::to_value(meta.config.w_star_mode)?.as_str().unwrap_or("?"),
        meta.sampler
    )?;
    writeln!(out, "wrote {} examples to {} (metadata {})", ds.len(), a.out.display(), mp.display())?;
    Ok(())
}
