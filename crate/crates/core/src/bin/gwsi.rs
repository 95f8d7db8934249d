use gwsi::cli;

fn main() {
    if let Err(e) = cli::init_threads() {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
    std::process::exit(cli::main_with_args(std::env::args_os()));
}
