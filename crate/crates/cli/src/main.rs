use std::io::{stderr, stdout};
use std::process::ExitCode;

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    if let Err(e) = kinetiq_cli::init_threads() {
        eprintln!("error: {}", e.message);
        return ExitCode::from(e.status.code() as u8);
    }
    let status = kinetiq_cli::run(std::env::args_os(), &mut stdout().lock(), &mut stderr().lock());
    ExitCode::from(status.code() as u8)
}
