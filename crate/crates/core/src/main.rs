use clap::Parser;
use fronts::cli::{run, Cli};
use std::io::Write;

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if e.use_stderr() => {
            let _ = e.print();
            std::process::exit(1);
        }
        Err(e) => e.exit(),
    };
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    let result = run(cli, &mut out);
    let _ = out.flush();
    if let Err(e) = result {
        eprintln!("fronts: {e}");
        std::process::exit(e.exit_code());
    }
}
