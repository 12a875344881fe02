//! Command-line front end: densities, stationary densities, moments,
//! asymptotic tables, Monte Carlo simulation, and the validation suite.
//!
//! Exit codes: 0 success, 2 configuration error, 3 numeric error,
//! 4 validation failure. Failures emit machine-readable JSON on stderr.

mod output;
mod run;

use clap::Parser;

fn main() {
    let code = match run::Cli::try_parse() {
        Err(e) => {
            let rendered = e.render().to_string();
            if e.use_stderr() {
                eprintln!("{}", run::error_json("config", rendered.trim()));
                2
            } else {
                // --help / --version go to stdout with success.
                print!("{rendered}");
                0
            }
        }
        Ok(cli) => match run::execute(cli) {
            Ok(code) => code,
            Err(err) => {
                let (kind, code) = run::classify_error(&err);
                eprintln!("{}", run::error_json(kind, &err.to_string()));
                code
            }
        },
    };
    std::process::exit(code);
}
