use std::io::Write;
use std::process::ExitCode;

fn main() -> ExitCode {
    let out = witt_residue_cli::run(std::env::args_os(), std::env::var(witt_residue_cli::SEED_ENV).ok());
    print!("{}", out.stdout);
    eprint!("{}", out.stderr);
    let _ = std::io::stdout().flush();
    ExitCode::from(out.code as u8)
}
