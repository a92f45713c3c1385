use std::process::ExitCode;

fn main() -> ExitCode {
    match bir_cli::run_from(std::env::args_os()) {
        Ok(out) => {
            print!("{}", out.stdout);
            eprint!("{}", out.stderr);
            ExitCode::from(out.code)
        }
        Err(e) => {
            eprintln!("bir: {e}");
            e.exit_code()
        }
    }
}
