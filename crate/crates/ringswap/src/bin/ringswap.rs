use clap::Parser;
use ringswap::cli::{dispatch, Cli};

fn main() {
    let cli = Cli::parse();
    let (code, out, err) = dispatch(cli);
    if !out.is_empty() {
        print!("{out}");
    }
    if !err.is_empty() {
        eprint!("{err}");
    }
    std::process::exit(code);
}
