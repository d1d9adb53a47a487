use std::process::ExitCode;

use clap::Parser;

fn main() -> ExitCode {
    env_logger::init();
    let args = match sispace::Args::try_parse() {
        Ok(args) => args,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { sispace::EXIT_INPUT as u8 } else { 0 });
        }
    };
    ExitCode::from(sispace::run(&args) as u8)
}
