use std::process::ExitCode;

fn main() -> ExitCode {
    let mut stdout = std::io::stdout().lock();
    match latticekit_cli::run(std::env::args_os().collect(), &mut stdout) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("latticekit: {e}");
            ExitCode::from(latticekit_cli::exit_code(&e) as u8)
        }
    }
}
