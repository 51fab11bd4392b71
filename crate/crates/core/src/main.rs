use std::panic;
use std::process::ExitCode;

use twistverify::cli::{self, EXIT_INTERNAL};

fn main() -> ExitCode {
    let code = panic::catch_unwind(|| {
        let stdout = std::io::stdout();
        let stderr = std::io::stderr();
        cli::run(std::env::args_os(), &mut stdout.lock(), &mut stderr.lock())
    })
    .unwrap_or(EXIT_INTERNAL);
    ExitCode::from(code as u8)
}
