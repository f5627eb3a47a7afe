use std::io::Write;

fn main() {
    let result = zkagree::cli::invoke(std::env::args_os());
    print!("{}", result.stdout);
    let _ = std::io::stdout().flush();
    eprint!("{}", result.stderr);
    std::process::exit(result.code);
}
