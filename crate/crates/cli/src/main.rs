use std::process::ExitCode;

use ticksim_cli::config::SEED_ENV;

fn main() -> ExitCode {
    let seed = std::env::var(SEED_ENV).ok();
    ExitCode::from(ticksim_cli::main_with(std::env::args_os(), seed.as_deref()))
}
