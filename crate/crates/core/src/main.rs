use std::io::{stderr, stdout};
use std::process::ExitCode;

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().collect();
    let code = dfg_fold::cli::run_command(&args, &mut stdout().lock(), &mut stderr().lock());
    ExitCode::from(code as u8)
}
