use std::io;

fn main() {
    let code = surrogate_regret::cli::run(std::env::args_os(), &mut io::stdout(), &mut io::stderr());
    std::process::exit(code);
}
