use clap::Parser;

use kblink_cli::{commands, server, Cli, Command};

fn main() -> anyhow::Result<()> {
    let cli = Cli::parse();
    match &cli.command {
        Command::BuildIndex(args) => commands::build_index(args),
        Command::Link(args) => commands::link(args),
        Command::Serve(args) => server::run_serve(args),
        Command::Eval(args) => commands::eval(args),
        Command::DumpIndex(args) => commands::dump_index(args),
    }
}
