use std::io::Write;
use std::process::ExitCode;

fn main() -> ExitCode {
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    let result = hypervirial_cli::run(std::env::args_os(), &mut out);
    let _ = out.flush();
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            if failure.code == 0 {
                print!("{}", failure.message);
            } else {
                let message = failure.message.trim_end();
                if message.starts_with("error:") {
                    eprintln!("{message}");
                } else {
                    eprintln!("error: {message}");
                }
            }
            ExitCode::from(failure.code)
        }
    }
}
