use std::process::ExitCode;

fn main() -> ExitCode {
    match deconv_cli::run(std::env::args_os()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("deconv: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
