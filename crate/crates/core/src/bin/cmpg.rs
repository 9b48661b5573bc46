use cmpg::cli;

fn main() {
    let result = cli::run(std::env::args());
    print!("{}", result.output);
    std::process::exit(result.exit_code);
}
