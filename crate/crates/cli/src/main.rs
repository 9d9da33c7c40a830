use anyhow::Result;
use clap::Parser;

use hydroleg_cli::{run, Cli};

fn main() -> Result<()> {
    let cli = Cli::parse();
    for path in run(&cli)? {
        println!("{}", path.display());
    }
    Ok(())
}
