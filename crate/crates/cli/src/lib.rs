//! Library behind the `marginrcn` binary. Every command writes its primary
//! output either to a file or to the supplied writer, so `verify` can rerun
//! commands in-process and hash what they produce.

pub mod args;
pub mod cmd;
pub mod error;
pub mod output;
pub mod record;
pub mod sweep;
pub mod verify;

use std::io::Write;

pub use args::Cli;
pub use error::{CliError, CliResult};

pub const META_SCHEMA: &str = "marginrcn simulate-meta v1";
pub const RUN_SCHEMA: &str = "marginrcn run v1";
pub const SWEEP_SCHEMA: &str = "marginrcn sweep v1";
pub const FAMILY_SCHEMA: &str = "marginrcn family v1";
pub const LEVELS_SCHEMA: &str = "marginrcn levels v1";
pub const KRAVCHUK_SCHEMA: &str = "marginrcn kravchuk v1";

pub fn run(cli: Cli, out: &mut dyn Write) -> CliResult<()> {
    use args::Command;
    match cli.command {
        Command::Simulate(a) => cmd::simulate::run(&a, out),
        Command::Train(a) => cmd::train::run(&a, out),
        Command::Sweep(a) => sweep::run(&a, out),
        Command::Hardness(h) => cmd::hardness::run(&h, out),
        Command::Verify(a) => verify::run(&a, out),
    }
}

/// Parses `argv` (without the program name) and runs it.
pub fn run_args<I, S>(argv: I, out: &mut dyn Write) -> CliResult<()>
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let args = std::iter::once(std::ffi::OsString::from("marginrcn")).chain(argv.into_iter().map(Into::into));
    let cli = <Cli as clap::Parser>::try_parse_from(args).map_err(|e| CliError::usage(e.to_string()))?;
    run(cli, out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use marginrcn::hardness::report::CORRELATION_SCHEMA;

    #[test]
    fn version_lists_every_schema() {
        for s in [META_SCHEMA, RUN_SCHEMA, SWEEP_SCHEMA, FAMILY_SCHEMA, LEVELS_SCHEMA, KRAVCHUK_SCHEMA, CORRELATION_SCHEMA] {
            assert!(args::VERSION.contains(s), "{s}");
        }
    }
}
