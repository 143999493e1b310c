fn main() {
    std::process::exit(bellopt_cli::run_from_args(std::env::args_os()));
}
