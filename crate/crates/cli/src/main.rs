//! `addrccz`: exit 0 on pass, 1 on a failed check, 2 on invalid input or a
//! violated parameter bound, 3 when an exhaustive enumeration exceeds the
//! budget.

mod bundle;
mod cmd;

use std::process::ExitCode;

use clap::Parser;

fn main() -> ExitCode {
    let cli = cmd::Cli::parse();
    match cmd::run(&cli) {
        Ok(cmd::Outcome::Pass) => ExitCode::SUCCESS,
        Ok(cmd::Outcome::Fail) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            match e.downcast_ref::<addrccz::Error>() {
                Some(addrccz::Error::Budget { .. }) => {
                    eprintln!("hint: raise --budget (or ADDRCCZ_BUDGET), or use `verify sampled`");
                    ExitCode::from(3)
                }
                _ => ExitCode::from(2),
            }
        }
    }
}
